//! Homotopy algebra as integer congruence systems.
//!
//! Every question here (null-homotopy, retraction, componentwise Ext) asks
//! for matrices M solving congruences of the form Σ A·M·B ≡ C modulo the
//! target relations, columnwise. Vectorizing with vec(AXB) = (Bᵀ⊗A)vec(X)
//! and adding one slack block per congruence turns each into a single exact
//! integer solve, so "none" answers are proofs, not timeouts.

use std::collections::BTreeMap;

use crate::complex::{ChainComplex, ChainMap, ShortExactSequence};
use crate::error::{Error, Result};
use crate::group::{quotient_type, AmbientObject, Homomorphism, InvariantFactors};
use crate::lattice::Lattice;
use crate::normal::{kernel, solve};
use crate::{Int, IntMatrix};

/// Offsets of vectorized matrix unknowns, one block per degree.
struct VarLayout {
    blocks: BTreeMap<i64, (usize, usize, usize)>,
    total: usize,
}

impl VarLayout {
    fn new() -> Self {
        VarLayout { blocks: BTreeMap::new(), total: 0 }
    }

    fn add(&mut self, n: i64, rows: usize, cols: usize) {
        if rows == 0 || cols == 0 {
            return;
        }
        self.blocks.insert(n, (rows, cols, self.total));
        self.total += rows * cols;
    }

    fn get(&self, n: i64) -> Option<(usize, usize, usize)> {
        self.blocks.get(&n).copied()
    }

    fn extract(&self, n: i64, sol: &[Int]) -> Option<IntMatrix> {
        let (p, q, off) = self.get(n)?;
        Some(IntMatrix::from_vec_cols(p, q, &sol[off..off + p * q]))
    }
}

/// Rows of one big linear system over the main unknowns; each equation block
/// may carry its own slack columns for a per-column congruence.
struct SystemBuilder {
    main_cols: usize,
    blocks: Vec<(usize, Vec<(usize, IntMatrix)>, Option<IntMatrix>, Vec<Int>)>,
}

impl SystemBuilder {
    fn new(main_cols: usize) -> Self {
        SystemBuilder { main_cols, blocks: Vec::new() }
    }

    fn push_eq(
        &mut self,
        rows: usize,
        terms: Vec<(usize, IntMatrix)>,
        slack: Option<IntMatrix>,
        rhs: Vec<Int>,
    ) {
        if rows == 0 {
            return;
        }
        debug_assert!(terms.iter().all(|(_, m)| m.rows() == rows));
        debug_assert_eq!(rhs.len(), rows);
        self.blocks.push((rows, terms, slack, rhs));
    }

    fn assemble(&self) -> (IntMatrix, Vec<Int>) {
        let total_rows: usize = self.blocks.iter().map(|b| b.0).sum();
        let slack_cols: usize =
            self.blocks.iter().map(|b| b.2.as_ref().map_or(0, |s| s.cols())).sum();
        let mut m = IntMatrix::zero(total_rows, self.main_cols + slack_cols);
        let mut rhs = Vec::with_capacity(total_rows);
        let mut r0 = 0;
        let mut s0 = self.main_cols;
        for (rows, terms, slack, b) in &self.blocks {
            for (c0, coeff) in terms {
                m.set_block(r0, *c0, coeff);
            }
            if let Some(s) = slack {
                m.set_block(r0, s0, s);
                s0 += s.cols();
            }
            rhs.extend(b.iter().cloned());
            r0 += rows;
        }
        (m, rhs)
    }
}

/// −(I_k ⊗ L): slack coefficients absorbing the target relations columnwise.
fn slack_for(k: usize, relations: &IntMatrix) -> Option<IntMatrix> {
    if relations.cols() == 0 || k == 0 {
        return None;
    }
    Some(IntMatrix::identity(k).kron(relations).neg())
}

pub struct Homotopy {
    pub maps: BTreeMap<i64, Homomorphism>,
}

impl Homotopy {
    pub fn map_at(&self, f: &ChainMap, n: i64) -> Homomorphism {
        self.maps.get(&n).cloned().unwrap_or_else(|| {
            Homomorphism::zero(&f.source().component(n), &f.target().component(n - 1))
        })
    }

    /// d_t h + h d_s agrees with f in every degree.
    pub fn verify(&self, f: &ChainMap) -> Result<bool> {
        let s = f.source();
        let t = f.target();
        for n in (s.lo().min(t.lo()) - 1)..=(s.hi().max(t.hi()) + 1) {
            let a = self.map_at(f, n + 1).compose(&s.differential(n))?;
            let b = t.differential(n - 1).compose(&self.map_at(f, n))?;
            if !a.add(&b)?.eq_as_map(&f.map_at(n)) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Exact search for h with f^n = h^{n+1} d_s^n + d_t^{n−1} h^n, each h^n
/// well-defined on the presentations.
pub fn null_homotopy(f: &ChainMap) -> Result<Option<Homotopy>> {
    let s = f.source();
    let t = f.target();
    let mut vars = VarLayout::new();
    for n in s.lo()..=s.hi() + 1 {
        vars.add(n, t.component(n - 1).rank(), s.component(n).rank());
    }

    let mut sys = SystemBuilder::new(vars.total);
    for n in s.lo()..=s.hi() {
        let p = t.component(n).rank();
        let q = s.component(n).rank();
        if p == 0 || q == 0 {
            continue;
        }
        let mut terms = Vec::new();
        if let Some((bp, _, off)) = vars.get(n + 1) {
            debug_assert_eq!(bp, p);
            terms.push((off, s.differential(n).matrix().transpose().kron(&IntMatrix::identity(p))));
        }
        if let Some((_, _, off)) = vars.get(n) {
            terms.push((off, IntMatrix::identity(q).kron(t.differential(n - 1).matrix())));
        }
        let slack = slack_for(q, t.component(n).relations().basis());
        sys.push_eq(p * q, terms, slack, f.map_at(n).matrix().vec_cols());
    }
    for (&n, &(p, _, off)) in &vars.blocks {
        let rel = s.component(n).relations().basis().clone();
        if rel.cols() == 0 {
            continue;
        }
        let terms = vec![(off, rel.transpose().kron(&IntMatrix::identity(p)))];
        let slack = slack_for(rel.cols(), t.component(n - 1).relations().basis());
        sys.push_eq(p * rel.cols(), terms, slack, vec![Int::from(0); p * rel.cols()]);
    }

    let (a, b) = sys.assemble();
    let Some(sol) = solve(&a, &b) else { return Ok(None) };
    let mut maps = BTreeMap::new();
    for &n in vars.blocks.keys() {
        let m = vars.extract(n, &sol).expect("block exists");
        maps.insert(n, Homomorphism::new(s.component(n), t.component(n - 1), m)?);
    }
    Ok(Some(Homotopy { maps }))
}

/// The componentwise-split Ext group: chain maps shift(z,−1) → x modulo the
/// null-homotopic ones, returned by invariant factors.
pub fn ext1_cs(z: &ChainComplex, x: &ChainComplex) -> Result<InvariantFactors> {
    let s = z.shift(-1);
    let mut gvars = VarLayout::new();
    for n in s.lo()..=s.hi() {
        gvars.add(n, x.component(n).rank(), s.component(n).rank());
    }
    if gvars.total == 0 {
        return Ok(InvariantFactors::zero());
    }

    // solution lattice of the chain-map conditions
    let mut sys = SystemBuilder::new(gvars.total);
    for n in s.lo()..=s.hi() {
        let rows_dim = x.component(n + 1).rank();
        let cols_dim = s.component(n).rank();
        if rows_dim == 0 || cols_dim == 0 {
            continue;
        }
        let mut terms = Vec::new();
        if let Some((_, _, off)) = gvars.get(n + 1) {
            terms.push((
                off,
                s.differential(n).matrix().transpose().kron(&IntMatrix::identity(rows_dim)),
            ));
        }
        if let Some((_, _, off)) = gvars.get(n) {
            terms.push((off, IntMatrix::identity(cols_dim).kron(x.differential(n).matrix()).neg()));
        }
        let slack = slack_for(cols_dim, x.component(n + 1).relations().basis());
        sys.push_eq(rows_dim * cols_dim, terms, slack, vec![Int::from(0); rows_dim * cols_dim]);
    }
    for (&n, &(p, _, off)) in &gvars.blocks {
        let rel = s.component(n).relations().basis().clone();
        if rel.cols() == 0 {
            continue;
        }
        let terms = vec![(off, rel.transpose().kron(&IntMatrix::identity(p)))];
        let slack = slack_for(rel.cols(), x.component(n).relations().basis());
        sys.push_eq(p * rel.cols(), terms, slack, vec![Int::from(0); p * rel.cols()]);
    }
    let (a, _) = sys.assemble();
    let l_cm = Lattice::from_generators(&kernel(&a).row_range(0, gvars.total));

    // trivial maps: relation insertions plus boundaries of well-defined h
    let mut triv: Vec<Vec<Int>> = Vec::new();
    for (&n, &(p, q, off)) in &gvars.blocks {
        for rcol in x.component(n).relations().basis().columns() {
            for j in 0..q {
                let mut v = vec![Int::from(0); gvars.total];
                v[off + j * p..off + j * p + p].clone_from_slice(&rcol);
                triv.push(v);
            }
        }
    }
    let mut hvars = VarLayout::new();
    for m in s.lo()..=s.hi() + 1 {
        hvars.add(m, x.component(m - 1).rank(), s.component(m).rank());
    }
    if hvars.total > 0 {
        let mut hsys = SystemBuilder::new(hvars.total);
        for (&m, &(p, _, off)) in &hvars.blocks {
            let rel = s.component(m).relations().basis().clone();
            if rel.cols() == 0 {
                continue;
            }
            let terms = vec![(off, rel.transpose().kron(&IntMatrix::identity(p)))];
            let slack = slack_for(rel.cols(), x.component(m - 1).relations().basis());
            hsys.push_eq(p * rel.cols(), terms, slack, vec![Int::from(0); p * rel.cols()]);
        }
        let (ha, _) = hsys.assemble();
        let hgen = kernel(&ha).row_range(0, hvars.total);

        let mut bmat = IntMatrix::zero(gvars.total, hvars.total);
        for (&n, &(p, q, goff)) in &gvars.blocks {
            if let Some((_, _, hoff)) = hvars.get(n + 1) {
                bmat.set_block(
                    goff,
                    hoff,
                    &s.differential(n).matrix().transpose().kron(&IntMatrix::identity(p)),
                );
            }
            if let Some((_, _, hoff)) = hvars.get(n) {
                bmat.set_block(
                    goff,
                    hoff,
                    &IntMatrix::identity(q).kron(x.differential(n - 1).matrix()),
                );
            }
        }
        let bounds = bmat.mul(&hgen);
        for c in bounds.columns() {
            triv.push(c);
        }
    }
    let l_triv = Lattice::from_generators(&IntMatrix::from_columns(gvars.total, &triv)?);

    let amb = AmbientObject::free(gvars.total);
    let outer = amb.subobject(l_cm)?;
    let inner = amb.subobject(l_triv)?;
    if !inner.leq(&outer)? {
        return Err(Error::Certificate(
            "null-homotopic maps escape the chain-map lattice".into(),
        ));
    }
    quotient_type(&outer, &inner)
}

/// M with M·a ≡ b modulo the column lattice spanned by modbasis, columnwise.
fn solve_transport(a: &IntMatrix, b: &IntMatrix, modbasis: &IntMatrix) -> Option<IntMatrix> {
    let p = b.rows();
    let q = a.rows();
    let k = a.cols();
    debug_assert_eq!(b.cols(), k);
    let main = a.transpose().kron(&IntMatrix::identity(p));
    let big = match slack_for(k, modbasis) {
        Some(s) => main.hstack(&s),
        None => main,
    };
    let sol = solve(&big, &b.vec_cols())?;
    Some(IntMatrix::from_vec_cols(p, q, &sol[..p * q]))
}

/// Degree-wise retractions r^n with r^n ∘ incl^n = id. The sequence must be
/// exact; a `None` means some degree admits no splitting in the category.
pub fn is_cs_split(seq: &ShortExactSequence) -> Result<Option<BTreeMap<i64, Homomorphism>>> {
    seq.verify_exact()?;
    let y = seq.incl.target();
    let mut out = BTreeMap::new();
    for n in y.degrees() {
        let i = seq.incl.map_at(n);
        let xc = i.source().clone();
        let yc = i.target().clone();
        if xc.rank() == 0 {
            continue;
        }
        let a = i.matrix().hstack(yc.relations().basis());
        let b = IntMatrix::identity(xc.rank())
            .hstack(&IntMatrix::zero(xc.rank(), yc.relations().basis().cols()));
        match solve_transport(&a, &b, xc.relations().basis()) {
            Some(m) => {
                out.insert(n, Homomorphism::new(yc, xc, m)?);
            }
            None => return Ok(None),
        }
    }
    Ok(Some(out))
}

/// A single chain-map retraction: degree-wise retractions that also commute
/// with the differentials.
pub fn is_split_as_complexes(seq: &ShortExactSequence) -> Result<Option<ChainMap>> {
    seq.verify_exact()?;
    let y = seq.incl.target();
    let x = seq.incl.source();
    let mut vars = VarLayout::new();
    for n in y.degrees() {
        vars.add(n, x.component(n).rank(), y.component(n).rank());
    }
    let mut sys = SystemBuilder::new(vars.total);
    for n in y.degrees() {
        let p = x.component(n).rank();
        if p == 0 {
            continue;
        }
        let i = seq.incl.map_at(n);
        let relx = x.component(n).relations().basis().clone();
        let rely = y.component(n).relations().basis().clone();
        // r ∘ incl ≡ id
        let terms = match vars.get(n) {
            Some((_, _, off)) => {
                vec![(off, i.matrix().transpose().kron(&IntMatrix::identity(p)))]
            }
            None => Vec::new(),
        };
        let slack = slack_for(p, &relx);
        sys.push_eq(p * p, terms, slack, IntMatrix::identity(p).vec_cols());
        // r kills the target presentation's relations
        if rely.cols() > 0 {
            if let Some((_, _, off)) = vars.get(n) {
                let terms = vec![(off, rely.transpose().kron(&IntMatrix::identity(p)))];
                let slack = slack_for(rely.cols(), &relx);
                sys.push_eq(p * rely.cols(), terms, slack, vec![Int::from(0); p * rely.cols()]);
            }
        }
    }
    for n in y.lo()..y.hi() {
        let p = x.component(n + 1).rank();
        let q = y.component(n).rank();
        if p == 0 || q == 0 {
            continue;
        }
        let mut terms = Vec::new();
        if let Some((_, _, off)) = vars.get(n + 1) {
            terms.push((off, y.differential(n).matrix().transpose().kron(&IntMatrix::identity(p))));
        }
        if let Some((_, _, off)) = vars.get(n) {
            terms.push((off, IntMatrix::identity(q).kron(x.differential(n).matrix()).neg()));
        }
        let slack = slack_for(q, x.component(n + 1).relations().basis());
        sys.push_eq(p * q, terms, slack, vec![Int::from(0); p * q]);
    }
    let (a, b) = sys.assemble();
    let Some(sol) = solve(&a, &b) else { return Ok(None) };
    let mut maps = BTreeMap::new();
    for &n in vars.blocks.keys() {
        maps.insert(n, vars.extract(n, &sol).expect("block exists"));
    }
    Ok(Some(ChainMap::new(y.clone(), x.clone(), maps)?))
}
