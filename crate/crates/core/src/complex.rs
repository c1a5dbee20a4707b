//! Bounded cochain complexes of presented groups: d^n: X^n → X^{n+1} with
//! d^{n+1} ∘ d^n = 0. Components outside the stored support are the zero
//! object; accessors pad with zero objects and zero maps so degree arithmetic
//! never branches at call sites.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{quotient_type, AmbientObject, Homomorphism, InvariantFactors, Subobject};
use crate::IntMatrix;

#[derive(Clone, PartialEq, Eq)]
pub struct ChainComplex {
    lo: i64,
    components: Vec<Arc<AmbientObject>>,
    diffs: Vec<Homomorphism>,
}

impl ChainComplex {
    /// components[i] sits in degree lo + i; diffs[i]: components[i] →
    /// components[i+1]. Trivial ends are trimmed away.
    pub fn new(
        lo: i64,
        components: Vec<Arc<AmbientObject>>,
        diffs: Vec<Homomorphism>,
    ) -> Result<Self> {
        if diffs.len() != components.len().saturating_sub(1) {
            return Err(Error::Dimension(format!(
                "{} components need {} differentials, got {}",
                components.len(),
                components.len().saturating_sub(1),
                diffs.len()
            )));
        }
        for (i, d) in diffs.iter().enumerate() {
            if *d.source() != components[i] || *d.target() != components[i + 1] {
                return Err(Error::Ambient(format!(
                    "differential {i} does not run between its neighbor components"
                )));
            }
        }
        for i in 0..diffs.len().saturating_sub(1) {
            if !diffs[i + 1].compose(&diffs[i])?.is_zero_map() {
                return Err(Error::IllDefined(format!("d∘d ≠ 0 at degree {}", lo + i as i64)));
            }
        }
        let mut x = ChainComplex { lo, components, diffs };
        x.trim();
        Ok(x)
    }

    fn trim(&mut self) {
        while self.components.first().is_some_and(|c| c.is_trivial()) {
            self.components.remove(0);
            if !self.diffs.is_empty() {
                self.diffs.remove(0);
            }
            self.lo += 1;
        }
        while self.components.last().is_some_and(|c| c.is_trivial()) {
            self.components.pop();
            self.diffs.pop();
        }
        if self.components.is_empty() {
            self.lo = 0;
        }
    }

    pub fn zero() -> Self {
        ChainComplex { lo: 0, components: Vec::new(), diffs: Vec::new() }
    }

    /// g concentrated in degree n.
    pub fn stalk(n: i64, g: Arc<AmbientObject>) -> Self {
        let mut x = ChainComplex { lo: n, components: vec![g], diffs: Vec::new() };
        x.trim();
        x
    }

    /// [g = g] in degrees n, n+1.
    pub fn disk(n: i64, g: &Arc<AmbientObject>) -> Self {
        let mut x = ChainComplex {
            lo: n,
            components: vec![g.clone(), g.clone()],
            diffs: vec![Homomorphism::identity(g)],
        };
        x.trim();
        x
    }

    pub fn is_zero_complex(&self) -> bool {
        self.components.is_empty()
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Largest nontrivial degree; lo − 1 on the zero complex.
    pub fn hi(&self) -> i64 {
        self.lo + self.components.len() as i64 - 1
    }

    pub fn degrees(&self) -> RangeInclusive<i64> {
        self.lo..=self.hi()
    }

    pub fn component(&self, n: i64) -> Arc<AmbientObject> {
        if n < self.lo || n > self.hi() {
            return AmbientObject::zero_object();
        }
        self.components[(n - self.lo) as usize].clone()
    }

    pub fn differential(&self, n: i64) -> Homomorphism {
        if n >= self.lo && n < self.hi() {
            self.diffs[(n - self.lo) as usize].clone()
        } else {
            Homomorphism::zero(&self.component(n), &self.component(n + 1))
        }
    }

    /// shift(x, n)^k = x^{n+k}, differentials scaled by (−1)^n.
    pub fn shift(&self, n: i64) -> ChainComplex {
        let diffs = if n.rem_euclid(2) == 1 {
            self.diffs.iter().map(Homomorphism::negate).collect()
        } else {
            self.diffs.clone()
        };
        ChainComplex { lo: self.lo - n, components: self.components.clone(), diffs }
    }

    pub fn direct_sum(parts: &[&ChainComplex]) -> ChainComplex {
        let live: Vec<&&ChainComplex> = parts.iter().filter(|x| !x.is_zero_complex()).collect();
        if live.is_empty() {
            return ChainComplex::zero();
        }
        let lo = live.iter().map(|x| x.lo).min().expect("nonempty");
        let hi = live.iter().map(|x| x.hi()).max().expect("nonempty");
        let components: Vec<Arc<AmbientObject>> = (lo..=hi)
            .map(|n| {
                AmbientObject::direct_sum(
                    &live.iter().map(|x| x.component(n)).collect::<Vec<_>>(),
                )
            })
            .collect();
        let diffs: Vec<Homomorphism> = (lo..hi)
            .map(|n| {
                let blocks: Vec<Homomorphism> =
                    live.iter().map(|x| x.differential(n)).collect();
                let m = IntMatrix::block_diag(
                    &blocks.iter().map(|d| d.matrix()).collect::<Vec<_>>(),
                );
                Homomorphism::new(
                    components[(n - lo) as usize].clone(),
                    components[(n - lo + 1) as usize].clone(),
                    m,
                )
                .expect("block sums of differentials are well defined")
            })
            .collect();
        ChainComplex::new(lo, components, diffs).expect("blockwise d² = 0")
    }
}

impl std::fmt::Debug for ChainComplex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero_complex() {
            return write!(f, "0-complex");
        }
        write!(f, "complex [{}..{}]", self.lo, self.hi())?;
        for (i, c) in self.components.iter().enumerate() {
            write!(f, " {}:{}", self.lo + i as i64, c.invariants())?;
        }
        Ok(())
    }
}

pub fn cycles(x: &ChainComplex, n: i64) -> Result<Subobject> {
    let d = x.differential(n);
    let zero = x.component(n + 1).zero_subobject();
    d.preimage(&zero)
}

pub fn boundaries(x: &ChainComplex, n: i64) -> Result<Subobject> {
    let d = x.differential(n - 1);
    d.image(&x.component(n - 1).full_subobject())
}

pub fn homology(x: &ChainComplex, n: i64) -> Result<InvariantFactors> {
    quotient_type(&cycles(x, n)?, &boundaries(x, n)?)
}

pub fn is_acyclic(x: &ChainComplex) -> Result<bool> {
    for n in x.degrees() {
        if !homology(x, n)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, PartialEq, Eq)]
pub struct ChainMap {
    source: ChainComplex,
    target: ChainComplex,
    /// Entries only where source and target components are both nontrivial;
    /// missing degrees are zero maps.
    maps: BTreeMap<i64, Homomorphism>,
}

impl ChainMap {
    pub fn new(
        source: ChainComplex,
        target: ChainComplex,
        maps: BTreeMap<i64, IntMatrix>,
    ) -> Result<Self> {
        let mut built = BTreeMap::new();
        for (&n, m) in &maps {
            let s = source.component(n);
            let t = target.component(n);
            let h = Homomorphism::new(s, t, m.clone())?;
            if !h.source().is_trivial() && !h.target().is_trivial() {
                built.insert(n, h);
            }
        }
        let f = ChainMap { source, target, maps: built };
        let lo = f.source.lo().min(f.target.lo()) - 1;
        let hi = f.source.hi().max(f.target.hi());
        for n in lo..=hi {
            let lhs = f.map_at(n + 1).compose(&f.source.differential(n))?;
            let rhs = f.target.differential(n).compose(&f.map_at(n))?;
            if !lhs.eq_as_map(&rhs) {
                return Err(Error::IllDefined(format!(
                    "map does not commute with differentials at degree {n}"
                )));
            }
        }
        Ok(f)
    }

    pub fn identity(x: &ChainComplex) -> Self {
        let maps = x
            .degrees()
            .map(|n| (n, Homomorphism::identity(&x.component(n))))
            .collect();
        ChainMap { source: x.clone(), target: x.clone(), maps }
    }

    pub fn zero(source: &ChainComplex, target: &ChainComplex) -> Self {
        ChainMap { source: source.clone(), target: target.clone(), maps: BTreeMap::new() }
    }

    pub fn source(&self) -> &ChainComplex {
        &self.source
    }

    pub fn target(&self) -> &ChainComplex {
        &self.target
    }

    pub fn map_at(&self, n: i64) -> Homomorphism {
        self.maps.get(&n).cloned().unwrap_or_else(|| {
            Homomorphism::zero(&self.source.component(n), &self.target.component(n))
        })
    }

    pub fn is_zero_map(&self) -> bool {
        self.maps.values().all(Homomorphism::is_zero_map)
    }
}

impl std::fmt::Debug for ChainMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "chain map {:?} → {:?}", self.source, self.target)
    }
}

/// 0 → X → Y → Z → 0, componentwise split or not.
pub struct ShortExactSequence {
    pub incl: ChainMap,
    pub proj: ChainMap,
}

impl ShortExactSequence {
    /// Degree-wise exactness: incl mono, im(incl) = ker(proj), proj epi.
    pub fn verify_exact(&self) -> Result<()> {
        if self.incl.target != self.proj.source {
            return Err(Error::NotExact("middle complexes differ".into()));
        }
        let y = &self.incl.target;
        for n in y.degrees() {
            let i = self.incl.map_at(n);
            let p = self.proj.map_at(n);
            let ker_i = i.preimage(&i.target().zero_subobject())?;
            if !ker_i.is_zero() {
                return Err(Error::NotExact(format!("inclusion has kernel at degree {n}")));
            }
            let im_i = i.image(&i.source().full_subobject())?;
            let ker_p = p.preimage(&p.target().zero_subobject())?;
            if im_i != ker_p {
                return Err(Error::NotExact(format!("image ≠ kernel at degree {n}")));
            }
            let im_p = p.image(&p.source().full_subobject())?;
            if !im_p.is_full() {
                return Err(Error::NotExact(format!("projection not onto at degree {n}")));
            }
        }
        Ok(())
    }
}

/// cone(f)^n = S^{n+1} ⊕ T^n with differential (−d_S, 0; f, d_T), together
/// with its componentwise split sequence 0 → T → cone → shift(S, 1) → 0.
pub fn cone(f: &ChainMap) -> Result<(ChainComplex, ShortExactSequence)> {
    let s = f.source();
    let t = f.target();
    let lo = (s.lo() - 1).min(t.lo());
    let hi = (s.hi() - 1).max(t.hi());
    let mut components = Vec::new();
    for n in lo..=hi {
        components.push(AmbientObject::direct_sum(&[s.component(n + 1), t.component(n)]));
    }
    let mut diffs = Vec::new();
    for n in lo..hi {
        let ds = s.differential(n + 1).matrix().neg();
        let dt = t.differential(n);
        let top = ds.hstack(&IntMatrix::zero(ds.rows(), t.component(n).rank()));
        let bottom = f.map_at(n + 1).matrix().hstack(dt.matrix());
        let idx = (n - lo) as usize;
        diffs.push(Homomorphism::new(
            components[idx].clone(),
            components[idx + 1].clone(),
            top.vstack(&bottom),
        )?);
    }
    let c = ChainComplex::new(lo, components, diffs)?;

    let mut incl_maps = BTreeMap::new();
    let mut proj_maps = BTreeMap::new();
    for n in lo..=hi {
        let sr = s.component(n + 1).rank();
        let tr = t.component(n).rank();
        let i = IntMatrix::zero(sr, tr).vstack(&IntMatrix::identity(tr));
        let p = IntMatrix::identity(sr).hstack(&IntMatrix::zero(sr, tr));
        incl_maps.insert(n, i);
        proj_maps.insert(n, p);
    }
    let seq = ShortExactSequence {
        incl: ChainMap::new(t.clone(), c.clone(), incl_maps)?,
        proj: ChainMap::new(c.clone(), s.shift(1), proj_maps)?,
    };
    Ok((c, seq))
}

/// One disk per object per degree in the range.
pub fn generator_disks(
    objects: &[Arc<AmbientObject>],
    degrees: RangeInclusive<i64>,
) -> Vec<ChainComplex> {
    let mut out = Vec::new();
    for n in degrees {
        for g in objects {
            out.push(ChainComplex::disk(n, g));
        }
    }
    out
}
