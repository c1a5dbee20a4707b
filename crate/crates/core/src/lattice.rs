//! Sublattices of Z^n, kept in canonical column HNF at all times.
//!
//! A `Lattice` is the column span of its basis matrix. The basis is the
//! canonical HNF described in [`crate::normal`], so two lattices are equal as
//! subgroups of Z^n exactly when their basis matrices are identical. Equality,
//! ordering and hashing derive from that.

use crate::matrix::Matrix;
use crate::normal::{col_hnf, kernel, solve, solve_matrix};
use crate::scalar::ExactInt;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lattice<T> {
    /// n x k, canonical column HNF, full column rank k.
    basis: Matrix<T>,
}

impl<T: ExactInt> Lattice<T> {
    /// Span of the columns of `gens` inside Z^n where n = `gens.rows()`.
    pub fn from_generators(gens: &Matrix<T>) -> Self {
        Lattice { basis: col_hnf(gens) }
    }

    pub fn zero(ambient: usize) -> Self {
        Lattice { basis: Matrix::zero(ambient, 0) }
    }

    pub fn full(ambient: usize) -> Self {
        Lattice { basis: Matrix::identity(ambient) }
    }

    pub fn basis(&self) -> &Matrix<T> {
        &self.basis
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.cols() == 0
    }

    pub fn is_full(&self) -> bool {
        self.basis.is_identity()
    }

    /// Coordinates of `v` in the basis, if `v` lies in the lattice.
    pub fn coords(&self, v: &[T]) -> Option<Vec<T>> {
        assert_eq!(v.len(), self.ambient_dim(), "ambient mismatch");
        solve(&self.basis, v)
    }

    pub fn contains(&self, v: &[T]) -> bool {
        self.coords(v).is_some()
    }

    pub fn leq(&self, other: &Lattice<T>) -> bool {
        assert_eq!(self.ambient_dim(), other.ambient_dim(), "ambient mismatch");
        solve_matrix(&other.basis, &self.basis).is_some()
    }

    pub fn join(&self, other: &Lattice<T>) -> Lattice<T> {
        assert_eq!(self.ambient_dim(), other.ambient_dim(), "ambient mismatch");
        Lattice::from_generators(&self.basis.hstack(&other.basis))
    }

    /// Intersection. Kernel vectors of [B_a | -B_b] pair up coordinates of a
    /// common element; the first block applied to B_a spans the meet.
    pub fn meet(&self, other: &Lattice<T>) -> Lattice<T> {
        assert_eq!(self.ambient_dim(), other.ambient_dim(), "ambient mismatch");
        let ka = self.basis.cols();
        let stacked = self.basis.hstack(&other.basis.neg());
        let k = kernel(&stacked);
        let top = k.row_range(0, ka);
        Lattice::from_generators(&self.basis.mul(&top))
    }

    /// Image under the linear map `f` (rows of `f` give the target ambient).
    pub fn map_by(&self, f: &Matrix<T>) -> Lattice<T> {
        assert_eq!(f.cols(), self.ambient_dim(), "ambient mismatch");
        Lattice::from_generators(&f.mul(&self.basis))
    }

    /// Full preimage {x : f(x) in self} as a lattice in the domain of `f`.
    ///
    /// Kernel vectors of [F | -B] have the form (x, c) with F x = B c, so the
    /// top block spans the preimage (taking c = 0 recovers ker F).
    pub fn preimage_under(&self, f: &Matrix<T>) -> Lattice<T> {
        assert_eq!(f.rows(), self.ambient_dim(), "ambient mismatch");
        let stacked = f.hstack(&self.basis.neg());
        let k = kernel(&stacked);
        Lattice::from_generators(&k.row_range(0, f.cols()))
    }

    /// External direct sum inside Z^{n_a + n_b}, blocks in order.
    pub fn direct_sum(&self, other: &Lattice<T>) -> Lattice<T> {
        Lattice { basis: Matrix::block_diag(&[&self.basis, &other.basis]) }
    }
}

impl<T: ExactInt> std::fmt::Debug for Lattice<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Lattice({}x{}) {:?}", self.ambient_dim(), self.rank(), self.basis)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn rand_lattice(rng: &mut StdRng, n: usize) -> Lattice<i64> {
        let m = rng.gen_range(0..=n + 1);
        let gens = Matrix::from_fn(n, m, |_, _| rng.gen_range(-6i64..=6));
        Lattice::from_generators(&gens)
    }

    #[test]
    fn canonical_basis_of_pinned_example() {
        let gens = Matrix::from_i64(2, 2, &[2, 1, 0, 3]);
        let l = Lattice::from_generators(&gens);
        assert_eq!(l.basis(), &Matrix::from_i64(2, 2, &[1, 0, 3, 6]));
        assert!(l.contains(&[2i64, 0]));
        assert!(l.contains(&[1i64, 3]));
        assert!(!l.contains(&[1i64, 0]));
    }

    #[test]
    fn join_meet_against_membership() {
        let mut rng = StdRng::seed_from_u64(21);
        for _ in 0..40 {
            let n = rng.gen_range(1..=3);
            let a = rand_lattice(&mut rng, n);
            let b = rand_lattice(&mut rng, n);
            let j = a.join(&b);
            let m = a.meet(&b);
            assert!(a.leq(&j) && b.leq(&j));
            assert!(m.leq(&a) && m.leq(&b));
            for col in a.basis().columns() {
                assert!(j.contains(&col));
            }
            for col in m.basis().columns() {
                assert!(a.contains(&col) && b.contains(&col));
            }
            // points of a that happen to lie in b must lie in the meet
            for col in a.basis().columns() {
                if b.contains(&col) {
                    assert!(m.contains(&col));
                }
            }
        }
    }

    #[test]
    fn modular_law_on_random_triples() {
        // a <= c implies a + (b /\ c) = (a + b) /\ c
        let mut rng = StdRng::seed_from_u64(22);
        for _ in 0..30 {
            let n = rng.gen_range(1..=3);
            let b = rand_lattice(&mut rng, n);
            let c = rand_lattice(&mut rng, n);
            let a = rand_lattice(&mut rng, n).meet(&c);
            let lhs = a.join(&b.meet(&c));
            let rhs = a.join(&b).meet(&c);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn preimage_and_image_roundtrip() {
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..30 {
            let n = rng.gen_range(1..=3);
            let m = rng.gen_range(1..=3);
            let f = Matrix::from_fn(n, m, |_, _| rng.gen_range(-4i64..=4));
            let t = rand_lattice(&mut rng, n);
            let pre = t.preimage_under(&f);
            assert!(pre.map_by(&f).leq(&t));
            // preimage is maximal among tested points
            for _ in 0..10 {
                let x: Vec<i64> = (0..m).map(|_| rng.gen_range(-3..=3)).collect();
                let fx = f.mul_vec(&x);
                assert_eq!(t.contains(&fx), pre.contains(&x));
            }
        }
    }
}
