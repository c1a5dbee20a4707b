//! Finitely generated abelian groups presented as Z^n modulo a relation
//! lattice, their subobjects, and maps between presentations.
//!
//! A subobject of X = Z^n/R is a lattice L with R ⊆ L ⊆ Z^n; the
//! correspondence theorem makes this faithful, and canonical HNF bases make
//! equality syntactic. Everything is exact.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::normal::{snf, solve_matrix};
use crate::{Int, IntLattice, IntMatrix};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AmbientObject {
    rank: usize,
    relations: IntLattice,
}

impl AmbientObject {
    pub fn new(rank: usize, relations: IntLattice) -> Result<Arc<Self>> {
        if relations.ambient_dim() != rank {
            return Err(Error::Dimension(format!(
                "relations live in Z^{}, ambient rank is {}",
                relations.ambient_dim(),
                rank
            )));
        }
        Ok(Arc::new(AmbientObject { rank, relations }))
    }

    /// Z^n.
    pub fn free(rank: usize) -> Arc<Self> {
        Arc::new(AmbientObject { rank, relations: IntLattice::zero(rank) })
    }

    /// Z/m as Z^1 modulo ⟨m⟩.
    pub fn cyclic(m: impl Into<Int>) -> Arc<Self> {
        let m: Int = m.into();
        let gens = IntMatrix::from_fn(1, 1, |_, _| m.clone());
        Arc::new(AmbientObject { rank: 1, relations: IntLattice::from_generators(&gens) })
    }

    pub fn zero_object() -> Arc<Self> {
        AmbientObject::free(0)
    }

    /// Block direct sum of presentations.
    pub fn direct_sum(parts: &[Arc<AmbientObject>]) -> Arc<Self> {
        let rank = parts.iter().map(|p| p.rank).sum();
        let mut relations = IntLattice::zero(0);
        for p in parts {
            relations = relations.direct_sum(&p.relations);
        }
        debug_assert_eq!(relations.ambient_dim(), rank);
        Arc::new(AmbientObject { rank, relations })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn relations(&self) -> &IntLattice {
        &self.relations
    }

    /// True when Z^n/R is the zero group.
    pub fn is_trivial(&self) -> bool {
        self.relations.is_full()
    }

    pub fn invariants(self: &Arc<Self>) -> InvariantFactors {
        quotient_type(&self.full_subobject(), &self.zero_subobject())
            .expect("zero ⊆ full always")
    }

    pub fn full_subobject(self: &Arc<Self>) -> Subobject {
        Subobject { ambient: self.clone(), lattice: IntLattice::full(self.rank) }
    }

    pub fn zero_subobject(self: &Arc<Self>) -> Subobject {
        Subobject { ambient: self.clone(), lattice: self.relations.clone() }
    }

    /// Subobject generated by element vectors (columns), i.e. span + relations.
    pub fn subobject_from_columns(self: &Arc<Self>, gens: &IntMatrix) -> Result<Subobject> {
        if gens.rows() != self.rank {
            return Err(Error::Dimension(format!(
                "generators live in Z^{}, ambient rank is {}",
                gens.rows(),
                self.rank
            )));
        }
        let lattice = IntLattice::from_generators(gens).join(&self.relations);
        Ok(Subobject { ambient: self.clone(), lattice })
    }

    /// Subobject with the given lattice, which must trap the relations.
    pub fn subobject(self: &Arc<Self>, lattice: IntLattice) -> Result<Subobject> {
        if lattice.ambient_dim() != self.rank {
            return Err(Error::Dimension(format!(
                "lattice lives in Z^{}, ambient rank is {}",
                lattice.ambient_dim(),
                self.rank
            )));
        }
        if !self.relations.leq(&lattice) {
            return Err(Error::Containment(
                "subobject lattice does not contain the relation lattice".into(),
            ));
        }
        Ok(Subobject { ambient: self.clone(), lattice })
    }
}

impl fmt::Debug for AmbientObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z^{} mod {:?}", self.rank, self.relations)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subobject {
    ambient: Arc<AmbientObject>,
    lattice: IntLattice,
}

impl Subobject {
    pub fn ambient(&self) -> &Arc<AmbientObject> {
        &self.ambient
    }

    pub fn lattice(&self) -> &IntLattice {
        &self.lattice
    }

    pub fn is_zero(&self) -> bool {
        self.lattice == *self.ambient.relations()
    }

    pub fn is_full(&self) -> bool {
        self.lattice.is_full()
    }

    fn check_same_ambient(&self, other: &Subobject) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::Ambient("subobjects of different ambients".into()));
        }
        Ok(())
    }

    pub fn join(&self, other: &Subobject) -> Result<Subobject> {
        self.check_same_ambient(other)?;
        Ok(Subobject { ambient: self.ambient.clone(), lattice: self.lattice.join(&other.lattice) })
    }

    /// Intersection; the relation lattice sits inside both sides already.
    pub fn meet(&self, other: &Subobject) -> Result<Subobject> {
        self.check_same_ambient(other)?;
        Ok(Subobject { ambient: self.ambient.clone(), lattice: self.lattice.meet(&other.lattice) })
    }

    pub fn leq(&self, other: &Subobject) -> Result<bool> {
        self.check_same_ambient(other)?;
        Ok(self.lattice.leq(&other.lattice))
    }

    pub fn contains_vec(&self, v: &[Int]) -> bool {
        self.lattice.contains(v)
    }

    /// Isomorphism type of this subobject as a group in its own right.
    pub fn invariants(&self) -> InvariantFactors {
        let zero = self.ambient.zero_subobject();
        quotient_type(self, &zero).expect("relations ⊆ every subobject lattice")
    }
}

impl fmt::Debug for Subobject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sub{:?}", self.lattice)
    }
}

/// Divisor chain d₁ | d₂ | ..., each ≥ 2, plus a free rank: the isomorphism
/// type of a finitely generated abelian group.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InvariantFactors {
    torsion: Vec<Int>,
    free_rank: usize,
}

impl InvariantFactors {
    pub fn new(torsion: Vec<Int>, free_rank: usize) -> Result<Self> {
        for i in 0..torsion.len() {
            if torsion[i] < Int::from(2) {
                return Err(Error::Dimension("invariant factor below 2".into()));
            }
            if i + 1 < torsion.len() && !(torsion[i + 1].clone() % torsion[i].clone()).is_zero() {
                return Err(Error::Dimension("broken divisor chain".into()));
            }
        }
        Ok(InvariantFactors { torsion, free_rank })
    }

    pub fn zero() -> Self {
        InvariantFactors { torsion: Vec::new(), free_rank: 0 }
    }

    pub fn free(rank: usize) -> Self {
        InvariantFactors { torsion: Vec::new(), free_rank: rank }
    }

    pub fn cyclic(m: impl Into<Int>) -> Self {
        let m: Int = m.into();
        assert!(m >= Int::from(2));
        InvariantFactors { torsion: vec![m], free_rank: 0 }
    }

    pub fn torsion(&self) -> &[Int] {
        &self.torsion
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn is_zero(&self) -> bool {
        self.torsion.is_empty() && self.free_rank == 0
    }

    /// Group order, or None when infinite.
    pub fn order(&self) -> Option<Int> {
        if self.free_rank > 0 {
            return None;
        }
        Some(self.torsion.iter().fold(Int::one(), |acc, d| acc * d))
    }

    /// Isomorphism type of the direct sum, renormalized to a divisor chain.
    pub fn direct_sum(parts: &[&InvariantFactors]) -> InvariantFactors {
        let entries: Vec<Int> =
            parts.iter().flat_map(|p| p.torsion.iter().cloned()).collect();
        let free_rank = parts.iter().map(|p| p.free_rank).sum();
        let k = entries.len();
        let diag = IntMatrix::from_fn(k, k, |i, j| {
            if i == j { entries[i].clone() } else { Int::zero() }
        });
        let torsion: Vec<Int> =
            snf(&diag).into_iter().filter(|d| !d.is_one()).collect();
        InvariantFactors { torsion, free_rank }
    }

    fn from_presentation(rank: usize, coords: &IntMatrix) -> InvariantFactors {
        let diag = snf(coords);
        let free_rank = rank - diag.len();
        let torsion = diag.into_iter().filter(|d| !d.is_one()).collect();
        InvariantFactors { torsion, free_rank }
    }
}

impl InvariantFactors {
    fn write(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for d in &self.torsion {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "Z/{d}")?;
            first = false;
        }
        if self.free_rank == 1 {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "Z")?;
        } else if self.free_rank > 1 {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "Z^{}", self.free_rank)?;
        }
        Ok(())
    }
}

impl fmt::Debug for InvariantFactors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f)
    }
}

impl fmt::Display for InvariantFactors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f)
    }
}

/// Isomorphism type of outer/inner. Expresses inner's basis in outer's basis
/// and reads off the Smith form.
pub fn quotient_type(outer: &Subobject, inner: &Subobject) -> Result<InvariantFactors> {
    if outer.ambient() != inner.ambient() {
        return Err(Error::Ambient("subobjects of different ambients".into()));
    }
    if !inner.lattice().leq(outer.lattice()) {
        return Err(Error::Containment("inner ⊄ outer".into()));
    }
    let coords = solve_matrix(outer.lattice().basis(), inner.lattice().basis())
        .expect("leq already certified solvability");
    Ok(InvariantFactors::from_presentation(outer.lattice().rank(), &coords))
}

/// A map X → Y of presented groups, given on presentations by a matrix
/// F: Z^{rank X} → Z^{rank Y} with F·R_X ⊆ R_Y.
#[derive(Clone, PartialEq, Eq)]
pub struct Homomorphism {
    source: Arc<AmbientObject>,
    target: Arc<AmbientObject>,
    matrix: IntMatrix,
}

impl Homomorphism {
    pub fn new(
        source: Arc<AmbientObject>,
        target: Arc<AmbientObject>,
        matrix: IntMatrix,
    ) -> Result<Self> {
        if matrix.rows() != target.rank() || matrix.cols() != source.rank() {
            return Err(Error::Dimension(format!(
                "map matrix is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.rank(),
                source.rank()
            )));
        }
        let pushed = source.relations().map_by(&matrix);
        if !pushed.leq(target.relations()) {
            return Err(Error::IllDefined(
                "matrix does not map source relations into target relations".into(),
            ));
        }
        Ok(Homomorphism { source, target, matrix })
    }

    pub fn identity(ambient: &Arc<AmbientObject>) -> Self {
        Homomorphism {
            source: ambient.clone(),
            target: ambient.clone(),
            matrix: IntMatrix::identity(ambient.rank()),
        }
    }

    pub fn zero(source: &Arc<AmbientObject>, target: &Arc<AmbientObject>) -> Self {
        Homomorphism {
            source: source.clone(),
            target: target.clone(),
            matrix: IntMatrix::zero(target.rank(), source.rank()),
        }
    }

    pub fn source(&self) -> &Arc<AmbientObject> {
        &self.source
    }

    pub fn target(&self) -> &Arc<AmbientObject> {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    /// self ∘ other.
    pub fn compose(&self, other: &Homomorphism) -> Result<Homomorphism> {
        if other.target != self.source {
            return Err(Error::Ambient("composition endpoints do not match".into()));
        }
        Homomorphism::new(other.source.clone(), self.target.clone(), self.matrix.mul(&other.matrix))
    }

    pub fn add(&self, other: &Homomorphism) -> Result<Homomorphism> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::Ambient("sum endpoints do not match".into()));
        }
        let m = self.matrix.sub(&other.matrix.neg());
        Homomorphism::new(self.source.clone(), self.target.clone(), m)
    }

    pub fn negate(&self) -> Homomorphism {
        Homomorphism {
            source: self.source.clone(),
            target: self.target.clone(),
            matrix: self.matrix.neg(),
        }
    }

    /// Equality as maps of quotients: the difference lands in target relations.
    pub fn eq_as_map(&self, other: &Homomorphism) -> bool {
        if self.source != other.source || self.target != other.target {
            return false;
        }
        let diff = self.matrix.sub(&other.matrix);
        for c in diff.columns() {
            if !self.target.relations().contains(&c) {
                return false;
            }
        }
        true
    }

    pub fn is_zero_map(&self) -> bool {
        self.matrix.columns().all(|c| self.target.relations().contains(&c))
    }

    pub fn image(&self, a: &Subobject) -> Result<Subobject> {
        if *a.ambient() != self.source {
            return Err(Error::Ambient("subobject not in the map's source".into()));
        }
        let lattice = a.lattice().map_by(&self.matrix).join(self.target.relations());
        Ok(Subobject { ambient: self.target.clone(), lattice })
    }

    pub fn preimage(&self, b: &Subobject) -> Result<Subobject> {
        if *b.ambient() != self.target {
            return Err(Error::Ambient("subobject not in the map's target".into()));
        }
        let lattice = b.lattice().preimage_under(&self.matrix);
        Ok(Subobject { ambient: self.source.clone(), lattice })
    }
}

impl fmt::Debug for Homomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Hom({}→{}) {:?}", self.source.rank(), self.target.rank(), self.matrix)
    }
}

/// Presentation of a subquotient outer/inner as an ambient object in its own
/// right: Z^k modulo the coordinates of inner in outer's basis, together with
/// the embedding matrix that names each presentation generator inside Z^n.
#[derive(Clone)]
pub struct SubquotientPresentation {
    object: Arc<AmbientObject>,
    embed: IntMatrix,
    inner: IntLattice,
    outer: IntLattice,
}

impl SubquotientPresentation {
    pub fn of(outer: &Subobject, inner: &Subobject) -> Result<Self> {
        if outer.ambient() != inner.ambient() {
            return Err(Error::Ambient("subobjects of different ambients".into()));
        }
        if !inner.lattice().leq(outer.lattice()) {
            return Err(Error::Containment("inner ⊄ outer".into()));
        }
        let embed = outer.lattice().basis().clone();
        let coords = inner.lattice().preimage_under(&embed);
        let object = AmbientObject::new(embed.cols(), coords)?;
        Ok(SubquotientPresentation {
            object,
            embed,
            inner: inner.lattice().clone(),
            outer: outer.lattice().clone(),
        })
    }

    pub fn object(&self) -> &Arc<AmbientObject> {
        &self.object
    }

    /// Columns of the embedding name the presentation generators in Z^n.
    pub fn embed(&self) -> &IntMatrix {
        &self.embed
    }

    /// Lattice in Z^n → lattice of coordinates {y : B·y ∈ L}. For
    /// inner ⊆ L ⊆ outer this is inclusion-preserving and inverse to push.
    pub fn pull_lattice(&self, l: &IntLattice) -> IntLattice {
        l.preimage_under(&self.embed)
    }

    /// Coordinate lattice → its realization B·L + inner inside Z^n.
    pub fn push_lattice(&self, l: &IntLattice) -> IntLattice {
        l.map_by(&self.embed).join(&self.inner)
    }

    /// Subobject of the ambient with inner ⊆ s ⊆ outer, as a subobject of the
    /// presented quotient.
    pub fn pull_sub(&self, s: &Subobject) -> Result<Subobject> {
        if !self.inner.leq(s.lattice()) || !s.lattice().leq(&self.outer) {
            return Err(Error::Containment("subobject outside the presented interval".into()));
        }
        self.object.subobject(self.pull_lattice(s.lattice()))
    }

    /// Subobject of the presented quotient realized back in the big ambient.
    pub fn push_sub(&self, ambient: &Arc<AmbientObject>, s: &Subobject) -> Result<Subobject> {
        if *s.ambient() != self.object {
            return Err(Error::Ambient("subobject not of the presented quotient".into()));
        }
        ambient.subobject(self.push_lattice(s.lattice()))
    }

    /// Map induced on presented subquotients by an ambient matrix f with
    /// f(outer) ⊆ outer' and f(inner) ⊆ inner'.
    pub fn induce(&self, target: &SubquotientPresentation, f: &IntMatrix) -> Result<Homomorphism> {
        let stacked = target.embed.hstack(target.inner.basis());
        let k = target.embed.cols();
        let mut cols = Vec::with_capacity(self.embed.cols());
        for b in self.embed.columns() {
            let fb = f.mul_vec(&b);
            let z = crate::normal::solve(&stacked, &fb).ok_or_else(|| {
                Error::Containment("matrix does not carry outer into the target outer".into())
            })?;
            cols.push(z[..k].to_vec());
        }
        let m = IntMatrix::from_columns(k, &cols)?;
        Homomorphism::new(self.object.clone(), target.object.clone(), m)
    }
}
