//! Filtrations of chain complexes: ascending chains of subcomplexes built
//! degree by degree through the closed-set machinery of each component (for
//! arbitrary bounded complexes) or of each cycle object (for acyclic ones).

use std::sync::Arc;

use crate::complex::{cycles, is_acyclic, ChainComplex};
use crate::error::{Error, Result};
use crate::filtration::Filtration;
use crate::group::{AmbientObject, Subobject, SubquotientPresentation};
use crate::hill::{HillContext, IndexSet};
use crate::normal::solve;
use crate::IntMatrix;

pub struct ComplexFiltration {
    complex: ChainComplex,
    /// steps[i][d]: subobject of the degree-(lo+d) component in step i.
    steps: Vec<Vec<Subobject>>,
}

impl ComplexFiltration {
    pub fn new(complex: ChainComplex, steps: Vec<Vec<Subobject>>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::InvalidFiltration("a filtration needs at least one step".into()));
        }
        let width = complex.degrees().count();
        for (i, row) in steps.iter().enumerate() {
            if row.len() != width {
                return Err(Error::Dimension(format!(
                    "step {i} covers {} degrees, complex has {width}",
                    row.len()
                )));
            }
            for (d, s) in row.iter().enumerate() {
                if *s.ambient() != complex.component(complex.lo() + d as i64) {
                    return Err(Error::Ambient(format!(
                        "step {i} at degree {} lives in the wrong component",
                        complex.lo() + d as i64
                    )));
                }
            }
        }
        Ok(ComplexFiltration { complex, steps })
    }

    pub fn complex(&self) -> &ChainComplex {
        &self.complex
    }

    pub fn sigma(&self) -> usize {
        self.steps.len() - 1
    }

    pub fn step(&self, i: usize) -> &[Subobject] {
        &self.steps[i]
    }

    pub fn step_component(&self, i: usize, n: i64) -> Subobject {
        if n < self.complex.lo() || n > self.complex.hi() {
            return AmbientObject::zero_object().zero_subobject();
        }
        self.steps[i][(n - self.complex.lo()) as usize].clone()
    }

    /// Zero start, full finish, degree-wise ascending, and d-stable steps.
    pub fn validate(&self) -> Result<()> {
        for (d, s) in self.steps[0].iter().enumerate() {
            if !s.is_zero() {
                return Err(Error::InvalidFiltration(format!(
                    "first step nonzero at degree {}",
                    self.complex.lo() + d as i64
                )));
            }
        }
        for (d, s) in self.steps[self.sigma()].iter().enumerate() {
            if !s.is_full() {
                return Err(Error::InvalidFiltration(format!(
                    "last step proper at degree {}",
                    self.complex.lo() + d as i64
                )));
            }
        }
        for i in 0..self.sigma() {
            for n in self.complex.degrees() {
                let a = self.step_component(i, n);
                let b = self.step_component(i + 1, n);
                if !a.leq(&b)? {
                    return Err(Error::InvalidFiltration(format!(
                        "step {i} not below step {} at degree {n}",
                        i + 1
                    )));
                }
            }
        }
        for (i, row) in self.steps.iter().enumerate() {
            for n in self.complex.degrees() {
                let s = &row[(n - self.complex.lo()) as usize];
                let image = self.complex.differential(n).image(s)?;
                if !image.leq(&self.step_component(i, n + 1))? {
                    return Err(Error::InvalidFiltration(format!(
                        "step {i} is not a subcomplex: d(degree {n}) escapes"
                    )));
                }
            }
        }
        Ok(())
    }

    /// The chain at one degree, as an ordinary filtration.
    pub fn degreewise(&self, n: i64) -> Result<Filtration> {
        let column: Vec<Subobject> =
            self.steps.iter().map(|row| row[(n - self.complex.lo()) as usize].clone()).collect();
        Filtration::new(self.complex.component(n), column, None)
    }

    /// Step i presented as a complex in its own right.
    pub fn step_complex(&self, i: usize) -> Result<ChainComplex> {
        self.present(|n| {
            let zero = self.complex.component(n).zero_subobject();
            (self.step_component(i, n), zero)
        })
    }

    /// Step i+1 / step i as a complex of presented subquotients.
    pub fn factor_complex(&self, i: usize) -> Result<ChainComplex> {
        self.present(|n| (self.step_component(i + 1, n), self.step_component(i, n)))
    }

    fn present(
        &self,
        pair: impl Fn(i64) -> (Subobject, Subobject),
    ) -> Result<ChainComplex> {
        let lo = self.complex.lo();
        let mut pres = Vec::new();
        for n in self.complex.degrees() {
            let (outer, inner) = pair(n);
            pres.push(SubquotientPresentation::of(&outer, &inner)?);
        }
        let components: Vec<Arc<AmbientObject>> =
            pres.iter().map(|p| p.object().clone()).collect();
        let mut diffs = Vec::new();
        for i in 0..pres.len().saturating_sub(1) {
            let d = self.complex.differential(lo + i as i64);
            diffs.push(pres[i].induce(&pres[i + 1], d.matrix())?);
        }
        ChainComplex::new(lo, components, diffs)
    }
}

fn default_chain(amb: &Arc<AmbientObject>) -> Result<Filtration> {
    if amb.is_trivial() {
        Filtration::new(amb.clone(), vec![amb.zero_subobject()], Some(vec![]))
    } else {
        Filtration::new(
            amb.clone(),
            vec![amb.zero_subobject(), amb.full_subobject()],
            Some(vec![amb.full_subobject()]),
        )
    }
}

fn contexts_for(
    ambients: &[Arc<AmbientObject>],
    supplied: &[Option<Filtration>],
    what: &str,
) -> Result<Vec<HillContext>> {
    if supplied.len() != ambients.len() {
        return Err(Error::Ambient(format!(
            "{} {what} filtrations supplied, complex support has {}",
            supplied.len(),
            ambients.len()
        )));
    }
    let mut ctxs = Vec::with_capacity(ambients.len());
    for (amb, f) in ambients.iter().zip(supplied) {
        let filtration = match f {
            Some(f) => {
                if f.ambient() != amb {
                    return Err(Error::Ambient(format!(
                        "{what} filtration does not match its object"
                    )));
                }
                f.clone()
            }
            None => default_chain(amb)?,
        };
        ctxs.push(HillContext::new(&filtration)?);
    }
    Ok(ctxs)
}

/// Chain of subcomplexes through the component image lattices. Works top
/// degree down: enlarging the highest deficient degree keeps every step a
/// subcomplex because the differential lands in already-full degrees.
pub fn cpx_filtration(
    x: &ChainComplex,
    component_filtrations: &[Option<Filtration>],
) -> Result<ComplexFiltration> {
    if x.is_zero_complex() {
        return ComplexFiltration::new(x.clone(), vec![Vec::new()]);
    }
    let ambients: Vec<Arc<AmbientObject>> = x.degrees().map(|n| x.component(n)).collect();
    let ctxs = contexts_for(&ambients, component_filtrations, "component")?;
    let width = ambients.len();
    let mut sets: Vec<IndexSet> = vec![IndexSet::new(); width];
    let mut cur: Vec<Subobject> = ambients.iter().map(|a| a.zero_subobject()).collect();
    let mut steps = vec![cur.clone()];
    let budget: usize = ctxs.iter().map(HillContext::sigma).sum::<usize>() + 1;
    for _ in 0..budget {
        let Some(d) = (0..width).rev().find(|&d| !cur[d].is_full()) else {
            return ComplexFiltration::new(x.clone(), steps);
        };
        let ctx = &ctxs[d];
        let mut delta = None;
        for w in 0..ctx.sigma() {
            if !ctx.witness(w).leq(&cur[d])? {
                delta = Some(w);
                break;
            }
        }
        let delta = delta.ok_or_else(|| {
            Error::Certificate(format!("degree {d}: all witnesses absorbed below the component"))
        })?;
        let mut seed = sets[d].clone();
        seed.insert(delta);
        sets[d] = ctx.hull(&seed)?;
        cur[d] = ctx.ell(&sets[d])?;
        steps.push(cur.clone());
    }
    Err(Error::Certificate("component chains failed to exhaust the complex".into()))
}

/// Proof-shaped descending construction for acyclic complexes: capture one
/// cycle witness at the top deficient degree, then walk down adding boundary
/// preimages and closing the forced cycles through each cycle context.
pub fn tilde_filtration(
    x: &ChainComplex,
    cycle_filtrations: &[Option<Filtration>],
    cap: usize,
) -> Result<ComplexFiltration> {
    if !is_acyclic(x)? {
        return Err(Error::NotAcyclic("tilde filtrations need an acyclic complex".into()));
    }
    if x.is_zero_complex() {
        return ComplexFiltration::new(x.clone(), vec![Vec::new()]);
    }
    let lo = x.lo();
    let width = x.degrees().count();
    let mut cycle_subs = Vec::with_capacity(width);
    let mut pres = Vec::with_capacity(width);
    for n in x.degrees() {
        let z = cycles(x, n)?;
        pres.push(SubquotientPresentation::of(&z, &x.component(n).zero_subobject())?);
        cycle_subs.push(z);
    }
    let cycle_objects: Vec<Arc<AmbientObject>> =
        pres.iter().map(|p| p.object().clone()).collect();
    let ctxs = contexts_for(&cycle_objects, cycle_filtrations, "cycle")?;

    let mut sets: Vec<IndexSet> = vec![IndexSet::new(); width];
    let mut cur: Vec<Subobject> =
        x.degrees().map(|n| x.component(n).zero_subobject()).collect();
    let mut steps = vec![cur.clone()];
    let captured = |sets: &Vec<IndexSet>, d: usize| -> Result<Subobject> {
        let l = ctxs[d].ell(&sets[d])?;
        pres[d].push_sub(&x.component(lo + d as i64), &l)
    };
    let mut rounds = 0usize;
    loop {
        rounds += 1;
        if rounds > cap {
            return Err(Error::IterationCap { site: "tilde_filtration", cap });
        }
        let mut top = None;
        for d in (0..width).rev() {
            if captured(&sets, d)? != cycle_subs[d] {
                top = Some(d);
                break;
            }
        }
        let Some(top) = top else { break };
        // descend from the top deficient degree, carrying the new cycles down
        let mut z_above = x.component(lo + top as i64 + 1).zero_subobject();
        for d in (0..=top).rev() {
            let n = lo + d as i64;
            let comp = x.component(n);
            let w = if d == top {
                let ctx = &ctxs[d];
                let cy = captured(&sets, d)?;
                let mut w = None;
                for i in 0..ctx.sigma() {
                    let pushed = pres[d].push_sub(&comp, ctx.witness(i))?;
                    if !pushed.leq(&cy)? {
                        w = Some(pushed);
                        break;
                    }
                }
                w.ok_or_else(|| {
                    Error::Certificate(format!("degree {n}: cycle deficit without a witness"))
                })?
            } else {
                // boundary preimages of every new cycle one degree up
                let d_mat = x.differential(n).matrix().clone();
                let stacked = d_mat.hstack(x.component(n + 1).relations().basis());
                let mut cols = Vec::new();
                for g in z_above.lattice().basis().columns() {
                    let z = solve(&stacked, &g).ok_or_else(|| {
                        Error::Certificate(format!(
                            "degree {}: cycle is not a boundary despite acyclicity",
                            n + 1
                        ))
                    })?;
                    cols.push(z[..comp.rank()].to_vec());
                }
                comp.subobject_from_columns(&IntMatrix::from_columns(comp.rank(), &cols)?)?
            };
            let k = cur[d].join(&w)?.meet(&cycle_subs[d])?;
            let k_up = pres[d].pull_sub(&k)?;
            let cov = ctxs[d].cover(&k_up, ctxs[d].sigma())?;
            let mut seed = sets[d].clone();
            seed.extend(cov);
            sets[d] = ctxs[d].hull(&seed)?;
            let z_new = captured(&sets, d)?;
            cur[d] = cur[d].join(&w)?.join(&z_new)?;
            if cur[d].meet(&cycle_subs[d])? != z_new {
                return Err(Error::Certificate(format!(
                    "degree {n}: step cycles escape the captured lattice"
                )));
            }
            z_above = z_new;
        }
        steps.push(cur.clone());
    }
    for (d, s) in cur.iter().enumerate() {
        if !s.is_full() {
            return Err(Error::Certificate(format!(
                "degree {}: cycles exhausted but component not covered",
                lo + d as i64
            )));
        }
    }
    ComplexFiltration::new(x.clone(), steps)
}
