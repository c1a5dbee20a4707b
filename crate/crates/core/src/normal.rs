//! Hermite and Smith normal forms over an exact integer scalar, plus the
//! canonical solver and integer kernel built on them.
//!
//! Convention for the column Hermite form used throughout the crate: basis
//! vectors are columns, pivot rows strictly increase from left to right,
//! pivots are positive, and every entry sharing a row with a pivot and lying
//! in an earlier column is reduced into `[0, pivot)`. This form is unique,
//! so lattices compare by comparing matrices.

use crate::matrix::Matrix;
use crate::scalar::ExactInt;

/// Row echelon Hermite form computed in place; returns the rank.
/// Row operations are mirrored on `transform` when given (so `transform`
/// accumulates a unimodular `U` with `U * original = result`).
fn row_hnf_in_place<T: ExactInt>(a: &mut Matrix<T>, mut transform: Option<&mut Matrix<T>>) -> usize {
    let (rows, cols) = (a.rows(), a.cols());
    let mut piv = 0;
    for c in 0..cols {
        if piv == rows {
            break;
        }
        // gcd-by-remainders among rows piv.. in column c
        loop {
            let best = (piv..rows)
                .filter(|&r| !a[(r, c)].is_zero())
                .min_by(|&r, &s| a[(r, c)].abs().cmp(&a[(s, c)].abs()).then(r.cmp(&s)));
            let Some(best) = best else { break };
            a.swap_rows(piv, best);
            if let Some(u) = transform.as_deref_mut() {
                u.swap_rows(piv, best);
            }
            if a[(piv, c)].is_negative() {
                a.negate_row(piv);
                if let Some(u) = transform.as_deref_mut() {
                    u.negate_row(piv);
                }
            }
            let mut dirty = false;
            for r in piv + 1..rows {
                if a[(r, c)].is_zero() {
                    continue;
                }
                let q = a[(r, c)].div_floor(&a[(piv, c)]);
                a.row_sub_scaled(r, piv, &q);
                if let Some(u) = transform.as_deref_mut() {
                    u.row_sub_scaled(r, piv, &q);
                }
                if !a[(r, c)].is_zero() {
                    dirty = true;
                }
            }
            if !dirty {
                break;
            }
        }
        if !a[(piv, c)].is_zero() {
            // entries above the pivot go into [0, pivot)
            for r in 0..piv {
                let q = a[(r, c)].div_floor(&a[(piv, c)]);
                a.row_sub_scaled(r, piv, &q);
                if let Some(u) = transform.as_deref_mut() {
                    u.row_sub_scaled(r, piv, &q);
                }
            }
            piv += 1;
        }
    }
    piv
}

/// Canonical column Hermite basis of the column span; zero columns dropped.
pub fn col_hnf<T: ExactInt>(a: &Matrix<T>) -> Matrix<T> {
    let mut t = a.transpose();
    let rank = row_hnf_in_place(&mut t, None);
    t.row_range(0, rank).transpose()
}

pub struct ColHnf<T> {
    /// `a * v`, nonzero columns (the canonical basis) first, zero columns after.
    pub h: Matrix<T>,
    pub rank: usize,
    /// Unimodular column transform.
    pub v: Matrix<T>,
}

pub fn col_hnf_with_transform<T: ExactInt>(a: &Matrix<T>) -> ColHnf<T> {
    let mut t = a.transpose();
    let mut u = Matrix::identity(t.rows());
    let rank = row_hnf_in_place(&mut t, Some(&mut u));
    ColHnf { h: t.transpose(), rank, v: u.transpose() }
}

/// Basis of `{x : a x = 0}`, canonical form, as columns.
pub fn kernel<T: ExactInt>(a: &Matrix<T>) -> Matrix<T> {
    let ColHnf { rank, v, .. } = col_hnf_with_transform(a);
    col_hnf(&v.col_range(rank, v.cols()))
}

/// One integer solution of `a x = b`, chosen canonically (forward substitution
/// through the column Hermite form), or `None` when no integer solution exists.
pub fn solve<T: ExactInt>(a: &Matrix<T>, b: &[T]) -> Option<Vec<T>> {
    assert_eq!(a.rows(), b.len(), "rhs length mismatch");
    let ColHnf { h, rank, v } = col_hnf_with_transform(a);
    let mut residual = b.to_vec();
    let mut y = vec![T::zero(); h.cols()];
    for j in 0..rank {
        let r = (0..h.rows()).find(|&r| !h[(r, j)].is_zero()).expect("nonzero column");
        let (q, rem) = residual[r].div_rem(&h[(r, j)]);
        if !rem.is_zero() {
            return None;
        }
        if !q.is_zero() {
            for i in 0..h.rows() {
                let t = q.clone() * h[(i, j)].clone();
                residual[i] = residual[i].clone() - t;
            }
        }
        y[j] = q;
    }
    if residual.iter().any(|e| !e.is_zero()) {
        return None;
    }
    Some(v.mul_vec(&y))
}

/// Columnwise [`solve`]: one `x` with `a x = b` for every column of `b`.
pub fn solve_matrix<T: ExactInt>(a: &Matrix<T>, b: &Matrix<T>) -> Option<Matrix<T>> {
    assert_eq!(a.rows(), b.rows(), "row count mismatch");
    let cols: Option<Vec<Vec<T>>> = b.columns().map(|c| solve(a, &c)).collect();
    Matrix::from_columns(a.cols(), &cols?).ok()
}

pub struct Snf<T> {
    /// Nonzero diagonal `d_1 | d_2 | ...` (trailing zeros dropped, units kept).
    pub diag: Vec<T>,
    /// Unimodular; `u * a * v` is the diagonal matrix.
    pub u: Matrix<T>,
    pub v: Matrix<T>,
}

fn diagonalize<T: ExactInt>(s: &mut Matrix<T>, u: &mut Matrix<T>, v: &mut Matrix<T>) {
    let (rows, cols) = (s.rows(), s.cols());
    let mut t = 0;
    while t < rows.min(cols) {
        // move a minimal-magnitude nonzero entry of s[t.., t..] to (t, t)
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if s[(i, j)].is_zero() {
                    continue;
                }
                match best {
                    Some((bi, bj)) if s[(bi, bj)].abs() <= s[(i, j)].abs() => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        let Some((i, j)) = best else { break };
        s.swap_rows(t, i);
        u.swap_rows(t, i);
        s.swap_cols(t, j);
        v.swap_cols(t, j);
        loop {
            if s[(t, t)].is_negative() {
                s.negate_row(t);
                u.negate_row(t);
            }
            let mut dirty = false;
            for r in t + 1..rows {
                if s[(r, t)].is_zero() {
                    continue;
                }
                let q = s[(r, t)].div_floor(&s[(t, t)]);
                s.row_sub_scaled(r, t, &q);
                u.row_sub_scaled(r, t, &q);
                if !s[(r, t)].is_zero() {
                    s.swap_rows(t, r);
                    u.swap_rows(t, r);
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // column t is clear below the pivot, so column operations that
            // subtract multiples of column t only touch row t
            for c in t + 1..cols {
                if s[(t, c)].is_zero() {
                    continue;
                }
                let q = s[(t, c)].div_floor(&s[(t, t)]);
                s.col_sub_scaled(c, t, &q);
                v.col_sub_scaled(c, t, &q);
                if !s[(t, c)].is_zero() {
                    s.swap_cols(t, c);
                    v.swap_cols(t, c);
                    dirty = true;
                }
            }
            if !dirty {
                break;
            }
        }
        t += 1;
    }
}

/// Gcd elimination confined to rows/columns `i`, `j` of an otherwise
/// diagonal matrix whose only off-diagonal entry sits in that block.
fn clear_pair<T: ExactInt>(s: &mut Matrix<T>, u: &mut Matrix<T>, v: &mut Matrix<T>, i: usize, j: usize) {
    loop {
        if s[(i, i)].is_negative() {
            s.negate_row(i);
            u.negate_row(i);
        }
        if !s[(j, i)].is_zero() {
            let q = s[(j, i)].div_floor(&s[(i, i)]);
            s.row_sub_scaled(j, i, &q);
            u.row_sub_scaled(j, i, &q);
            if !s[(j, i)].is_zero() {
                s.swap_rows(i, j);
                u.swap_rows(i, j);
                continue;
            }
        }
        if !s[(i, j)].is_zero() {
            let q = s[(i, j)].div_floor(&s[(i, i)]);
            s.col_sub_scaled(j, i, &q);
            v.col_sub_scaled(j, i, &q);
            if !s[(i, j)].is_zero() {
                s.swap_cols(i, j);
                v.swap_cols(i, j);
                continue;
            }
        }
        break;
    }
    if s[(j, j)].is_negative() {
        s.negate_row(j);
        u.negate_row(j);
    }
}

pub fn snf_with_transform<T: ExactInt>(a: &Matrix<T>) -> Snf<T> {
    let mut s = a.clone();
    let mut u = Matrix::identity(a.rows());
    let mut v = Matrix::identity(a.cols());
    diagonalize(&mut s, &mut u, &mut v);
    // Enforce the divisor chain. Zeros already trail because diagonalization
    // only stops early when the remaining block is zero, and a pair fix of two
    // nonzero entries yields (gcd, lcm), both nonzero. One nested pass
    // suffices: after row i is fixed against all later ones, d_i is the gcd of
    // everything below and later fixes replace pairs by (gcd, lcm), preserving
    // divisibility by d_i.
    let k = a.rows().min(a.cols());
    for i in 0..k {
        for j in i + 1..k {
            let (d, e) = (s[(i, i)].clone(), s[(j, j)].clone());
            if d.is_zero() || e.is_zero() || e.mod_floor(&d).is_zero() {
                continue;
            }
            let minus_one = T::zero() - T::one();
            s.col_sub_scaled(i, j, &minus_one);
            v.col_sub_scaled(i, j, &minus_one);
            clear_pair(&mut s, &mut u, &mut v, i, j);
        }
    }
    let mut diag = Vec::new();
    for i in 0..k {
        if s[(i, i)].is_zero() {
            break;
        }
        diag.push(s[(i, i)].clone());
    }
    Snf { diag, u, v }
}

/// Invariant-factor diagonal of `a`: the nonzero `d_1 | d_2 | ...` prefix.
pub fn snf<T: ExactInt>(a: &Matrix<T>) -> Vec<T> {
    snf_with_transform(a).diag
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    type M = Matrix<i64>;

    fn rand_matrix(rng: &mut StdRng, rows: usize, cols: usize, bound: i64) -> M {
        M::from_fn(rows, cols, |_, _| rng.gen_range(-bound..=bound))
    }

    #[test]
    fn col_hnf_canonical_under_column_mixing() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..40 {
            let rows = rng.gen_range(1..5);
            let cols = rng.gen_range(1..5);
            let a = rand_matrix(&mut rng, rows, cols, 6);
            let h = col_hnf(&a);
            // mix columns by a random unimodular transform: shuffles + shears
            let mut b = a.clone();
            for _ in 0..6 {
                let i = rng.gen_range(0..cols);
                let j = rng.gen_range(0..cols);
                if i != j {
                    let q = rng.gen_range(-3..=3);
                    b.col_sub_scaled(i, j, &q);
                }
                b.swap_cols(rng.gen_range(0..cols), rng.gen_range(0..cols));
            }
            assert_eq!(col_hnf(&b), h);
        }
    }

    #[test]
    fn col_hnf_shape_invariants() {
        let mut rng = StdRng::seed_from_u64(8);
        for _ in 0..60 {
            let rows = rng.gen_range(1..5);
            let cols = rng.gen_range(0..5);
            let h = col_hnf(&rand_matrix(&mut rng, rows, cols, 9));
            let mut last_pivot_row = None;
            for j in 0..h.cols() {
                let r = (0..h.rows()).find(|&r| !h[(r, j)].is_zero()).expect("no zero columns");
                assert!(h[(r, j)] > 0, "pivot positive");
                assert!(last_pivot_row.map_or(true, |p| r > p), "pivot rows increase");
                for i in 0..j {
                    assert!(h[(r, i)] >= 0 && h[(r, i)] < h[(r, j)], "reduced left of pivot");
                }
                last_pivot_row = Some(r);
            }
        }
    }

    #[test]
    fn transform_reproduces_hnf() {
        let mut rng = StdRng::seed_from_u64(9);
        for _ in 0..40 {
            let (r, c) = (rng.gen_range(1..5), rng.gen_range(1..5));
            let a = rand_matrix(&mut rng, r, c, 8);
            let ColHnf { h, rank, v } = col_hnf_with_transform(&a);
            assert_eq!(a.mul(&v), h);
            assert_eq!(col_hnf(&v), M::identity(v.cols()), "v unimodular");
            assert_eq!(h.col_range(0, rank), col_hnf(&a));
            assert!(h.col_range(rank, h.cols()).is_zero());
        }
    }

    #[test]
    fn kernel_annihilates_and_is_complete() {
        let mut rng = StdRng::seed_from_u64(10);
        for _ in 0..40 {
            let (r, c) = (rng.gen_range(1..4), rng.gen_range(1..5));
            let a = rand_matrix(&mut rng, r, c, 6);
            let k = kernel(&a);
            assert!(a.mul(&k).is_zero());
            let rank = col_hnf_with_transform(&a).rank;
            assert_eq!(k.cols(), a.cols() - rank);
        }
    }

    #[test]
    fn solve_finds_constructed_solutions() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..60 {
            let (r, c) = (rng.gen_range(1..4), rng.gen_range(1..4));
            let a = rand_matrix(&mut rng, r, c, 5);
            let x: Vec<i64> = (0..a.cols()).map(|_| rng.gen_range(-4..=4)).collect();
            let b = a.mul_vec(&x);
            let got = solve(&a, &b).expect("constructed system is solvable");
            assert_eq!(a.mul_vec(&got), b);
        }
    }

    #[test]
    fn solve_rejects_unsolvable() {
        let a = M::from_i64(1, 1, &[2]);
        assert_eq!(solve(&a, &[3]), None);
        let a = M::from_i64(2, 1, &[1, 1]);
        assert_eq!(solve(&a, &[1, 2]), None);
    }

    #[test]
    fn snf_reconstructs_and_divides() {
        let mut rng = StdRng::seed_from_u64(12);
        for _ in 0..60 {
            let (r, c) = (rng.gen_range(1..5), rng.gen_range(1..5));
            let a = rand_matrix(&mut rng, r, c, 9);
            let Snf { diag, u, v } = snf_with_transform(&a);
            let s = u.mul(&a).mul(&v);
            for i in 0..diag.len() {
                assert!(diag[i] > 0);
                assert_eq!(s[(i, i)], diag[i]);
                if i + 1 < diag.len() {
                    assert_eq!(diag[i + 1] % diag[i], 0, "divisor chain");
                }
            }
            for r in 0..s.rows() {
                for c in 0..s.cols() {
                    if r != c || r >= diag.len() {
                        assert_eq!(s[(r, c)], 0);
                    }
                }
            }
            assert_eq!(col_hnf(&u), M::identity(u.cols()));
            assert_eq!(col_hnf(&v), M::identity(v.cols()));
        }
    }
}
