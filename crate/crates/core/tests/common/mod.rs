//! Brute-force oracles and randomized instance generators shared by the
//! integration suites. Everything here recomputes answers from first
//! principles (element enumeration, BFS closure, order counting) so that
//! agreement with the library is meaningful.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;

use num_integer::Integer;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use hillcalc::filtration::Filtration;
use hillcalc::group::{AmbientObject, Homomorphism, InvariantFactors, Subobject};
use hillcalc::normal::kernel;
use hillcalc::{ChainComplex, ChainMap, Int, IntLattice, IntMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn int_vec(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&x| Int::from(x)).collect()
}

// ---------------------------------------------------------------------------
// element-level oracles (finite ambients only)

/// Canonical residue of x modulo the relations lattice. Requires full-rank
/// relations (finite group); the canonical basis is lower triangular, so a
/// single top-down sweep normalizes every coordinate into its pivot box.
pub fn reduce_mod(amb: &AmbientObject, x: &[Int]) -> Vec<Int> {
    let basis = amb.relations().basis();
    assert_eq!(basis.cols(), amb.rank(), "reduce_mod needs a finite ambient");
    let mut out = x.to_vec();
    for i in 0..amb.rank() {
        let d = &basis.row_slice(i)[i];
        let q = out[i].div_floor(d);
        if q.is_zero() {
            continue;
        }
        for r in i..amb.rank() {
            out[r] = out[r].clone() - q.clone() * basis.row_slice(r)[i].clone();
        }
    }
    out
}

/// Every element of a finite ambient, as canonical residues.
pub fn elements(amb: &AmbientObject) -> Vec<Vec<Int>> {
    let basis = amb.relations().basis();
    assert_eq!(basis.cols(), amb.rank(), "elements needs a finite ambient");
    let mut out = vec![Vec::new()];
    for i in 0..amb.rank() {
        let d = &basis.row_slice(i)[i];
        let mut next = Vec::new();
        for prefix in &out {
            let mut k = Int::zero();
            while &k < d {
                let mut e = prefix.clone();
                e.push(k.clone());
                next.push(e);
                k += 1;
            }
        }
        out = next;
    }
    out.into_iter().map(|e| reduce_mod(amb, &e)).collect()
}

/// BFS closure of a generating set under addition, in canonical residues.
pub fn closure(amb: &AmbientObject, gens: &[Vec<Int>]) -> BTreeSet<Vec<Int>> {
    let zero = vec![Int::zero(); amb.rank()];
    let mut seen: BTreeSet<Vec<Int>> = BTreeSet::new();
    seen.insert(reduce_mod(amb, &zero));
    let mut queue: VecDeque<Vec<Int>> = seen.iter().cloned().collect();
    while let Some(e) = queue.pop_front() {
        for g in gens {
            let sum: Vec<Int> =
                e.iter().zip(g).map(|(a, b)| a.clone() + b.clone()).collect();
            let sum = reduce_mod(amb, &sum);
            if seen.insert(sum.clone()) {
                queue.push_back(sum);
            }
        }
    }
    seen
}

/// The elements of a subobject, by closing its lattice basis columns.
pub fn sub_elements(sub: &Subobject) -> BTreeSet<Vec<Int>> {
    let amb = sub.ambient();
    let gens: Vec<Vec<Int>> = sub.lattice().basis().columns().collect();
    closure(amb, &gens)
}

fn small_primes(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Invariant factors of a finite ambient by order counting: the number of
/// solutions of p^k·x = 0 determines, per prime, how many factors have
/// p-valuation at least k. No normal forms anywhere.
pub fn counted_invariants(amb: &AmbientObject) -> InvariantFactors {
    let els = elements(amb);
    let order = els.len() as u64;
    if order == 1 {
        return InvariantFactors::zero();
    }
    let mut per_prime: Vec<(u64, Vec<usize>)> = Vec::new();
    let mut rank = 0usize;
    for p in small_primes(order) {
        // at_least[k] = #factors with v_p >= k+1
        let mut at_least: Vec<usize> = Vec::new();
        let mut scale = Int::from(p);
        let mut prev = 1u64;
        loop {
            let count = els
                .iter()
                .filter(|e| {
                    let s: Vec<Int> = e.iter().map(|x| x.clone() * scale.clone()).collect();
                    reduce_mod(amb, &s).iter().all(Zero::is_zero)
                })
                .count() as u64;
            let mut jump = count / prev;
            assert_eq!(jump * prev, count, "annihilator counts must divide");
            let mut factors_here = 0usize;
            while jump > 1 {
                assert_eq!(jump % p, 0, "annihilator jump is not a power of {p}");
                jump /= p;
                factors_here += 1;
            }
            if factors_here == 0 {
                break;
            }
            at_least.push(factors_here);
            prev = count;
            scale *= p;
        }
        rank = rank.max(at_least[0]);
        // ascending exponent list, one entry per factor divisible by p
        let mut exps = Vec::new();
        for (k, &m) in at_least.iter().enumerate() {
            let next = at_least.get(k + 1).copied().unwrap_or(0);
            for _ in next..m {
                exps.push(k + 1);
            }
        }
        exps.sort();
        per_prime.push((p, exps));
    }
    let mut torsion = vec![Int::one(); rank];
    for (p, exps) in &per_prime {
        let p = Int::from(*p);
        let pad = rank - exps.len();
        for (i, &e) in exps.iter().enumerate() {
            for _ in 0..e {
                torsion[pad + i] = torsion[pad + i].clone() * p.clone();
            }
        }
    }
    torsion.retain(|d| !d.is_one());
    InvariantFactors::new(torsion, 0).expect("counted divisor chain")
}

/// Multiset key for invariant factors, zero factors dropped.
pub fn factor_multiset(list: &[InvariantFactors]) -> BTreeMap<(Vec<Int>, usize), usize> {
    let mut out = BTreeMap::new();
    for f in list {
        if f.is_zero() {
            continue;
        }
        *out.entry((f.torsion().to_vec(), f.free_rank())).or_insert(0) += 1;
    }
    out
}

// ---------------------------------------------------------------------------
// golden instances

pub fn golden_u8() -> Filtration {
    let a = AmbientObject::cyclic(8);
    let s = |g: i64| a.subobject_from_columns(&IntMatrix::from_i64(1, 1, &[g])).unwrap();
    Filtration::new(
        a.clone(),
        vec![a.zero_subobject(), s(4), s(2), a.full_subobject()],
        Some(vec![s(4), s(2), s(1)]),
    )
    .unwrap()
}

pub fn golden_v8() -> Filtration {
    let z2 = AmbientObject::cyclic(2);
    hillcalc::coproduct_filtration(&[z2.clone(), z2.clone(), z2])
}

pub fn golden_m() -> Filtration {
    let a = AmbientObject::direct_sum(&[AmbientObject::cyclic(4), AmbientObject::cyclic(2)]);
    let s = |cols: &[[i64; 2]]| {
        let flat: Vec<Vec<Int>> = cols.iter().map(|c| int_vec(c)).collect();
        a.subobject_from_columns(&IntMatrix::from_columns(2, &flat).unwrap()).unwrap()
    };
    Filtration::new(
        a.clone(),
        vec![a.zero_subobject(), s(&[[2, 0]]), s(&[[2, 0], [0, 1]]), a.full_subobject()],
        Some(vec![s(&[[2, 0]]), s(&[[0, 1]]), s(&[[1, 0]])]),
    )
    .unwrap()
}

pub fn golden_f3() -> Filtration {
    let z = AmbientObject::free(1);
    hillcalc::coproduct_filtration(&[z.clone(), z.clone(), z])
}

/// The acceptance census: the four goldens plus `count` random instances
/// with σ ≤ 6 and exponent ≤ 27.
pub fn census_instances(seed: u64, count: usize) -> Vec<Filtration> {
    let mut r = rng(seed);
    let mut out = vec![golden_u8(), golden_v8(), golden_m(), golden_f3()];
    for _ in 0..count {
        out.push(rand_filtration(&mut r, 3, 5));
    }
    out
}

// ---------------------------------------------------------------------------
// randomized instances

pub const MODULI: [i64; 6] = [2, 3, 4, 8, 9, 27];

pub fn rand_finite_ambient(rng: &mut ChaCha8Rng, max_rank: usize) -> Arc<AmbientObject> {
    let rank = rng.gen_range(1..=max_rank);
    let diag = IntMatrix::from_fn(rank, rank, |i, j| {
        if i == j {
            Int::from(MODULI[rng.gen_range(0..MODULI.len())])
        } else {
            Int::zero()
        }
    });
    AmbientObject::new(rank, IntLattice::from_generators(&diag)).unwrap()
}

pub fn rand_vec(rng: &mut ChaCha8Rng, rank: usize) -> Vec<Int> {
    (0..rank).map(|_| Int::from(rng.gen_range(-4i64..=4))).collect()
}

pub fn rand_subobject(rng: &mut ChaCha8Rng, amb: &Arc<AmbientObject>) -> Subobject {
    let gens = rng.gen_range(0..=2usize);
    let cols: Vec<Vec<Int>> = (0..gens).map(|_| rand_vec(rng, amb.rank())).collect();
    amb.subobject_from_columns(&IntMatrix::from_columns(amb.rank(), &cols).unwrap())
        .unwrap()
}

/// Ascending chain of random spans, padded to reach the full object, with the
/// added spans as witnesses.
pub fn rand_filtration_on(
    rng: &mut ChaCha8Rng,
    amb: &Arc<AmbientObject>,
    max_extra: usize,
) -> Filtration {
    let mut steps = vec![amb.zero_subobject()];
    let mut wits = Vec::new();
    for _ in 0..rng.gen_range(0..=max_extra) {
        let w = rand_subobject(rng, amb);
        let next = steps.last().unwrap().join(&w).unwrap();
        steps.push(next);
        wits.push(w);
    }
    if !steps.last().unwrap().is_full() {
        steps.push(amb.full_subobject());
        wits.push(amb.full_subobject());
    }
    Filtration::new(amb.clone(), steps, Some(wits)).unwrap()
}

pub fn rand_filtration(rng: &mut ChaCha8Rng, max_rank: usize, max_extra: usize) -> Filtration {
    let amb = rand_finite_ambient(rng, max_rank);
    rand_filtration_on(rng, &amb, max_extra)
}

// ---------------------------------------------------------------------------
// random complexes and chain maps

const SMALL_MODULI: [i64; 3] = [2, 4, 8];

fn rand_small_group(rng: &mut ChaCha8Rng) -> Arc<AmbientObject> {
    if rng.gen_bool(0.3) {
        AmbientObject::free(1)
    } else {
        AmbientObject::cyclic(SMALL_MODULI[rng.gen_range(0..SMALL_MODULI.len())])
    }
}

/// Direct sum of random disks and stalks inside a fixed degree window.
/// `pieces` trades size for variety; exponents stay ≤ 8.
pub fn rand_complex(rng: &mut ChaCha8Rng, pieces: usize, allow_stalks: bool) -> ChainComplex {
    let mut parts = Vec::new();
    for _ in 0..pieces {
        let g = rand_small_group(rng);
        let n = rng.gen_range(-2i64..=1);
        if allow_stalks && rng.gen_bool(0.4) {
            parts.push(ChainComplex::stalk(n, g));
        } else {
            parts.push(ChainComplex::disk(n, &g));
        }
    }
    let refs: Vec<&ChainComplex> = parts.iter().collect();
    ChainComplex::direct_sum(&refs)
}

pub fn rand_acyclic_complex(rng: &mut ChaCha8Rng, pieces: usize) -> ChainComplex {
    rand_complex(rng, pieces, false)
}

/// Variant confined to the degree window [-2, 1]: at most 4 nonzero degrees.
pub fn rand_complex_bounded(
    rng: &mut ChaCha8Rng,
    pieces: usize,
    allow_stalks: bool,
) -> ChainComplex {
    let mut parts = Vec::new();
    for _ in 0..pieces {
        let g = rand_small_group(rng);
        if allow_stalks && rng.gen_bool(0.4) {
            parts.push(ChainComplex::stalk(rng.gen_range(-2i64..=1), g));
        } else {
            parts.push(ChainComplex::disk(rng.gen_range(-2i64..=0), &g));
        }
    }
    let refs: Vec<&ChainComplex> = parts.iter().collect();
    ChainComplex::direct_sum(&refs)
}

/// A random split pair of projections: block projections of A ⊕ B conjugated
/// by a shear I + N with N² = 0, so px + py = id and px∘py = 0 hold exactly.
pub fn rand_split_projections(
    rng: &mut ChaCha8Rng,
) -> (Arc<AmbientObject>, Homomorphism, Homomorphism) {
    let pool = [2i64, 3, 4, 8, 9];
    let ra = rng.gen_range(1..=2usize);
    let rb = rng.gen_range(1..=2usize);
    let mods: Vec<i64> = (0..ra + rb).map(|_| pool[rng.gen_range(0..pool.len())]).collect();
    let n = ra + rb;
    let diag = IntMatrix::from_fn(n, n, |i, j| {
        if i == j { Int::from(mods[i]) } else { Int::zero() }
    });
    let amb = AmbientObject::new(n, IntLattice::from_generators(&diag)).unwrap();
    let mut shear = IntMatrix::identity(n);
    for i in 0..ra {
        for j in ra..n {
            let g = mods[i].gcd(&mods[j]);
            if g > 1 {
                shear[(i, j)] = Int::from(mods[i] / g * rng.gen_range(0..g));
            }
        }
    }
    let mut unshear = shear.clone();
    for i in 0..ra {
        for j in ra..n {
            unshear[(i, j)] = -shear[(i, j)].clone();
        }
    }
    let block = IntMatrix::from_fn(n, n, |i, j| {
        if i == j && i < ra { Int::one() } else { Int::zero() }
    });
    let px_mat = shear.mul(&block).mul(&unshear);
    let py_mat = IntMatrix::identity(n).sub(&px_mat);
    let px = Homomorphism::new(amb.clone(), amb.clone(), px_mat).unwrap();
    let py = Homomorphism::new(amb.clone(), amb.clone(), py_mat).unwrap();
    (amb, px, py)
}

/// A uniformly structured random chain map: assemble the commutation and
/// well-definedness congruences independently of the library's solver, take
/// the kernel, and draw a small integer combination of its columns.
pub fn rand_chain_map(rng: &mut ChaCha8Rng, s: &ChainComplex, t: &ChainComplex) -> ChainMap {
    let lo = s.lo().min(t.lo()) - 1;
    let hi = s.hi().max(t.hi()) + 1;
    // variable blocks: vec(f^n) for degrees where both components live
    let mut offsets: BTreeMap<i64, (usize, usize, usize)> = BTreeMap::new();
    let mut total = 0usize;
    for n in lo..=hi {
        let rs = s.component(n).rank();
        let rt = t.component(n).rank();
        if rs > 0 && rt > 0 {
            offsets.insert(n, (total, rt, rs));
            total += rt * rs;
        }
    }
    if total == 0 {
        return ChainMap::zero(s, t);
    }
    struct Block {
        rows: usize,
        coeffs: Vec<(usize, IntMatrix)>,
        slack: Option<IntMatrix>,
    }
    let mut blocks = Vec::new();
    for n in lo..=hi {
        let rs_n = s.component(n).rank();
        let rt_n1 = t.component(n + 1).rank();
        // d_t f^n - f^{n+1} d_s ≡ 0 mod relations of T^{n+1}
        if rs_n > 0 && rt_n1 > 0 {
            let rows = rt_n1 * rs_n;
            let mut coeffs = Vec::new();
            if let Some(&(off, _, _)) = offsets.get(&n) {
                coeffs.push((off, IntMatrix::identity(rs_n).kron(t.differential(n).matrix())));
            }
            if let Some(&(off, _, _)) = offsets.get(&(n + 1)) {
                coeffs.push((
                    off,
                    s.differential(n)
                        .matrix()
                        .transpose()
                        .kron(&IntMatrix::identity(rt_n1))
                        .neg(),
                ));
            }
            if coeffs.is_empty() {
                continue;
            }
            let t_next = t.component(n + 1);
            let rel = t_next.relations().basis();
            let slack = (rel.cols() > 0)
                .then(|| IntMatrix::identity(rs_n).kron(rel));
            blocks.push(Block { rows, coeffs, slack });
        }
        // f^n · R_s ≡ 0 mod relations of T^n
        if let Some(&(off, rt, _)) = offsets.get(&n) {
            let s_comp = s.component(n);
            let rel_s = s_comp.relations().basis();
            if rel_s.cols() > 0 {
                let rows = rt * rel_s.cols();
                let coeffs = vec![(off, rel_s.transpose().kron(&IntMatrix::identity(rt)))];
                let t_comp = t.component(n);
                let rel_t = t_comp.relations().basis();
                let slack = (rel_t.cols() > 0)
                    .then(|| IntMatrix::identity(rel_s.cols()).kron(rel_t));
                blocks.push(Block { rows, coeffs, slack });
            }
        }
    }
    let slack_total: usize = blocks.iter().filter_map(|b| b.slack.as_ref().map(|m| m.cols())).sum();
    let all_rows: usize = blocks.iter().map(|b| b.rows).sum();
    let mut a = IntMatrix::zero(all_rows, total + slack_total);
    let mut r0 = 0;
    let mut slack_col = total;
    for b in &blocks {
        for (off, m) in &b.coeffs {
            for i in 0..m.rows() {
                for j in 0..m.cols() {
                    a[(r0 + i, off + j)] = m[(i, j)].clone();
                }
            }
        }
        if let Some(sl) = &b.slack {
            for i in 0..sl.rows() {
                for j in 0..sl.cols() {
                    a[(r0 + i, slack_col + j)] = sl[(i, j)].clone();
                }
            }
            slack_col += sl.cols();
        }
        r0 += b.rows;
    }
    let null = kernel(&a);
    let mut combo = vec![Int::zero(); total];
    for c in 0..null.cols() {
        let w = Int::from(rng.gen_range(-2i64..=2));
        if w.is_zero() {
            continue;
        }
        for r in 0..total {
            combo[r] = combo[r].clone() + w.clone() * null[(r, c)].clone();
        }
    }
    let mut maps = BTreeMap::new();
    for (&n, &(off, rt, rs)) in &offsets {
        maps.insert(n, IntMatrix::from_vec_cols(rt, rs, &combo[off..off + rt * rs]));
    }
    ChainMap::new(s.clone(), t.clone(), maps).expect("sampled from the solution lattice")
}
