//! Closed index sets, the ℓ map, covers and hulls, induced filtrations of
//! subquotients, and the derived constructions built on them: Kaplansky
//! witnesses, summand filtrations, intersection filtrations.
//!
//! All index-set machinery is relative to one filtration with a fixed witness
//! family (A_α): S is closed when every α ∈ S satisfies
//! X_α ∩ A_α ⊆ Σ_{γ∈S, γ<α} A_γ. The closed sets form a complete sublattice
//! of the powerset, ℓ(S) = Σ_{α∈S} A_α maps it homomorphically into the
//! subobject lattice, and the verifier below checks exactly that.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Mutex;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::filtration::Filtration;
use crate::group::{Homomorphism, Subobject, SubquotientPresentation};
use crate::normal::solve;
use crate::{Int, IntLattice};

pub type IndexSet = BTreeSet<usize>;

pub const DEFAULT_EXHAUSTIVE_BOUND: usize = 12;
pub const DEFAULT_ITERATION_CAP: usize = 1000;

/// Exhaustive verification never enumerates more than 2^20 subsets; beyond
/// that the verifier samples even when the caller's bound would allow it.
const HARD_EXHAUSTIVE_CAP: usize = 20;
/// Cap on exact distributivity triples before sampling kicks in.
const TRIPLE_CAP: usize = 2_000_000;

fn fmt_set(s: &IndexSet) -> String {
    let items: Vec<String> = s.iter().map(|a| a.to_string()).collect();
    format!("{{{}}}", items.join(","))
}

fn mask_set(mask: usize) -> IndexSet {
    (0..usize::BITS as usize).filter(|a| mask >> a & 1 == 1).collect()
}

pub struct HillContext {
    filtration: Filtration,
    /// X_α ∩ A_α, fixed data of the closedness condition.
    step_meets: Vec<Subobject>,
    /// Singleton hulls; shared across threads.
    hull_memo: Mutex<BTreeMap<usize, IndexSet>>,
}

impl HillContext {
    /// Validates the filtration and materializes canonical witnesses when the
    /// input carries none.
    pub fn new(f: &Filtration) -> Result<Self> {
        let report = f.validate();
        if !report.ok() {
            return Err(Error::InvalidFiltration(report.violations[0].to_string()));
        }
        let filtration = f.with_default_witnesses();
        let ws = filtration.witnesses().expect("materialized above").to_vec();
        let step_meets = (0..filtration.sigma())
            .map(|a| filtration.step(a).meet(&ws[a]))
            .collect::<Result<Vec<_>>>()?;
        Ok(HillContext { filtration, step_meets, hull_memo: Mutex::new(BTreeMap::new()) })
    }

    pub fn filtration(&self) -> &Filtration {
        &self.filtration
    }

    pub fn sigma(&self) -> usize {
        self.filtration.sigma()
    }

    pub fn witness(&self, a: usize) -> &Subobject {
        &self.filtration.witnesses().expect("always materialized")[a]
    }

    fn check_index(&self, a: usize) -> Result<()> {
        if a >= self.sigma() {
            return Err(Error::Index(format!("witness index {a}, σ = {}", self.sigma())));
        }
        Ok(())
    }

    /// ℓ(S) = Σ_{α∈S} A_α, starting from the zero subobject.
    pub fn ell(&self, s: &IndexSet) -> Result<Subobject> {
        let mut acc = self.filtration.step(0).clone();
        for &a in s {
            self.check_index(a)?;
            acc = acc.join(self.witness(a))?;
        }
        Ok(acc)
    }

    /// The closedness condition, checked incrementally over ascending α ∈ S.
    pub fn is_closed(&self, s: &IndexSet) -> Result<bool> {
        let mut acc = self.filtration.step(0).clone();
        for &a in s {
            self.check_index(a)?;
            if !self.step_meets[a].leq(&acc)? {
                return Ok(false);
            }
            acc = acc.join(self.witness(a))?;
        }
        Ok(true)
    }

    /// Descending greedy sweep producing S′ ⊆ {0..β−1} with y ⊆ ℓ(S′).
    ///
    /// Maintains residual generators T, initially y's basis. At γ the sweep
    /// skips when T ⊆ X_γ; otherwise γ joins S′ and each generator t splits as
    /// t = x + a with x ∈ X_γ, a ∈ A_γ via the canonical solve against
    /// [B_{X_γ} | B_{A_γ}], and x replaces t.
    pub fn cover(&self, y: &Subobject, beta: usize) -> Result<IndexSet> {
        if beta > self.sigma() {
            return Err(Error::Index(format!("cover bound {beta}, σ = {}", self.sigma())));
        }
        if y.ambient() != self.filtration.ambient() {
            return Err(Error::Ambient("cover seed from a different ambient".into()));
        }
        if !y.leq(self.filtration.step(beta))? {
            return Err(Error::Containment(format!("cover seed not inside X_{beta}")));
        }
        let mut residual: Vec<Vec<Int>> = y.lattice().basis().columns().collect();
        let mut out = IndexSet::new();
        for gamma in (0..beta).rev() {
            let xg = self.filtration.step(gamma).lattice();
            if residual.iter().all(|t| xg.contains(t)) {
                continue;
            }
            out.insert(gamma);
            let ag = self.witness(gamma).lattice();
            let stacked = xg.basis().hstack(ag.basis());
            let k = xg.rank();
            let mut next = Vec::with_capacity(residual.len());
            for t in &residual {
                let z = solve(&stacked, t).ok_or_else(|| {
                    Error::Containment(format!("cover residual escapes X_{}", gamma + 1))
                })?;
                next.push(xg.basis().mul_vec(&z[..k]));
            }
            residual = next;
        }
        debug_assert!(residual.iter().all(|t| self.filtration.step(0).lattice().contains(t)));
        Ok(out)
    }

    /// Closed superset of the seed: while some α ∈ S violates closedness,
    /// union in cover(X_α ∩ A_α, α), largest violator first. Each fixed α
    /// stays fixed because later unions only add indices below it.
    pub fn hull(&self, seed: &IndexSet) -> Result<IndexSet> {
        for &a in seed {
            self.check_index(a)?;
        }
        if seed.len() == 1 {
            let a = *seed.iter().next().expect("len checked");
            if let Some(h) = self.hull_memo.lock().expect("memo poisoned").get(&a) {
                return Ok(h.clone());
            }
            let h = self.hull_worklist(seed)?;
            self.hull_memo.lock().expect("memo poisoned").insert(a, h.clone());
            return Ok(h);
        }
        self.hull_worklist(seed)
    }

    fn hull_worklist(&self, seed: &IndexSet) -> Result<IndexSet> {
        let mut cur = seed.clone();
        loop {
            let mut violator = None;
            for &a in cur.iter().rev() {
                let below: IndexSet = cur.iter().copied().filter(|&g| g < a).collect();
                let bound = self.ell(&below)?;
                if !self.step_meets[a].leq(&bound)? {
                    violator = Some(a);
                    break;
                }
            }
            let Some(a) = violator else { return Ok(cur) };
            let add = self.cover(&self.step_meets[a], a)?;
            cur.extend(add);
        }
    }

    /// Hull of a subobject seed: hull of its cover at the top of the chain.
    pub fn hull_of_subobject(&self, y: &Subobject) -> Result<IndexSet> {
        let c = self.cover(y, self.sigma())?;
        self.hull(&c)
    }

    /// (H3): present ℓ(t)/ℓ(s) and filter it by the images of
    /// F_α = ℓ(s ∪ (t∩α)), repetitions removed. `step_of` maps each moving
    /// γ ∈ t∖s to the index of the factor its witness creates; indices with
    /// zero factors are omitted.
    pub fn induced_filtration(&self, s: &IndexSet, t: &IndexSet) -> Result<InducedFiltration> {
        if !s.is_subset(t) {
            return Err(Error::Containment(format!("{} ⊄ {}", fmt_set(s), fmt_set(t))));
        }
        if !self.is_closed(s)? {
            return Err(Error::NotClosed(fmt_set(s)));
        }
        if !self.is_closed(t)? {
            return Err(Error::NotClosed(fmt_set(t)));
        }
        let ls = self.ell(s)?;
        let lt = self.ell(t)?;
        let pres = SubquotientPresentation::of(&lt, &ls)?;
        let q = pres.object().clone();
        let mut steps = vec![q.subobject(pres.pull_lattice(ls.lattice()))?];
        let mut wits: Vec<Subobject> = Vec::new();
        let mut step_of = BTreeMap::new();
        let mut acc = ls.clone();
        for &g in t {
            if s.contains(&g) {
                continue;
            }
            let next = acc.join(self.witness(g))?;
            if next == acc {
                continue;
            }
            step_of.insert(g, steps.len() - 1);
            let w_lat = pres.pull_lattice(&self.witness(g).lattice().join(ls.lattice()));
            wits.push(q.subobject(w_lat)?);
            steps.push(q.subobject(pres.pull_lattice(next.lattice()))?);
            acc = next;
        }
        let filtration = Filtration::new(q, steps, Some(wits))?;
        Ok(InducedFiltration { presentation: pres, filtration, step_of })
    }

    pub fn full_index_set(&self) -> IndexSet {
        (0..self.sigma()).collect()
    }

    /// Trap y inside w = ℓ(hull(y)) and filter both w and X/w through the
    /// closed-set machinery.
    pub fn kaplansky_witness(&self, y: &Subobject) -> Result<KaplanskyWitness> {
        let hull = self.hull_of_subobject(y)?;
        let w = self.ell(&hull)?;
        let inside = self.induced_filtration(&IndexSet::new(), &hull)?;
        let quotient = self.induced_filtration(&hull, &self.full_index_set())?;
        Ok(KaplanskyWitness { hull, w, inside, quotient })
    }

    pub fn verify_hill(&self, exhaustive_bound: usize, seed: u64) -> Result<HillReport> {
        if self.sigma() <= exhaustive_bound.min(HARD_EXHAUSTIVE_CAP) {
            self.verify_exhaustive(seed)
        } else {
            self.verify_sampled(seed)
        }
    }

    fn verify_exhaustive(&self, seed: u64) -> Result<HillReport> {
        let sigma = self.sigma();
        let n_masks: usize = 1 << sigma;
        let mut pool = LatticePool::default();
        let mut ell_id = vec![0usize; n_masks];
        ell_id[0] = pool.intern(self.filtration.step(0).lattice().clone());
        for m in 1..n_masks {
            let low = m.trailing_zeros() as usize;
            let rest = m & (m - 1);
            let l = pool.get(ell_id[rest]).join(self.witness(low).lattice());
            ell_id[m] = pool.intern(l);
        }
        let x_id: Vec<usize> = (0..=sigma)
            .map(|a| pool.intern(self.filtration.step(a).lattice().clone()))
            .collect();
        let meet_lats: Vec<IntLattice> =
            self.step_meets.iter().map(|m| m.lattice().clone()).collect();

        // closedness of every mask, memoized on (α, ℓ(below))
        let mut leq_memo: BTreeMap<(usize, usize), bool> = BTreeMap::new();
        let mut closed = vec![false; n_masks];
        for m in 0..n_masks {
            let mut ok = true;
            let mut bits = m;
            while bits != 0 {
                let a = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let below_id = ell_id[m & ((1usize << a) - 1)];
                let good = match leq_memo.get(&(a, below_id)) {
                    Some(&g) => g,
                    None => {
                        let g = meet_lats[a].leq(pool.get(below_id));
                        leq_memo.insert((a, below_id), g);
                        g
                    }
                };
                if !good {
                    ok = false;
                    break;
                }
            }
            closed[m] = ok;
        }
        let closed_masks: Vec<usize> = (0..n_masks).filter(|&m| closed[m]).collect();

        let mut h1 = CheckResult::Pass;
        for a in 0..=sigma {
            let m = (1usize << a) - 1;
            if !closed[m] {
                h1 = CheckResult::fail(format!("initial segment {} not closed", fmt_set(&mask_set(m))));
                break;
            }
            if ell_id[m] != x_id[a] {
                h1 = CheckResult::fail(format!(
                    "ℓ(initial segment {a}) = {:?} ≠ X_{a} = {:?}",
                    pool.get(ell_id[m]),
                    pool.get(x_id[a])
                ));
                break;
            }
        }

        let mut joins: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut meets: BTreeMap<(usize, usize), usize> = BTreeMap::new();

        let mut sublattice = CheckResult::Pass;
        let mut join_law = CheckResult::Pass;
        let mut meet_law = CheckResult::Pass;
        for (i, &u) in closed_masks.iter().enumerate() {
            for &v in &closed_masks[i..] {
                if sublattice.passed() && (!closed[u | v] || !closed[u & v]) {
                    sublattice = CheckResult::fail(format!(
                        "S = {}, T = {}: union closed: {}, intersection closed: {}",
                        fmt_set(&mask_set(u)),
                        fmt_set(&mask_set(v)),
                        closed[u | v],
                        closed[u & v]
                    ));
                }
                if join_law.passed()
                    && ell_id[u | v] != pool.join_id(&mut joins, ell_id[u], ell_id[v])
                {
                    join_law = CheckResult::fail(format!(
                        "ℓ(S∪T) ≠ ℓS + ℓT at S = {}, T = {}",
                        fmt_set(&mask_set(u)),
                        fmt_set(&mask_set(v))
                    ));
                }
                if meet_law.passed()
                    && ell_id[u & v] != pool.meet_id(&mut meets, ell_id[u], ell_id[v])
                {
                    meet_law = CheckResult::fail(format!(
                        "ℓ(S∩T) ≠ ℓS ∩ ℓT at S = {} ({:?}), T = {} ({:?})",
                        fmt_set(&mask_set(u)),
                        pool.get(ell_id[u]),
                        fmt_set(&mask_set(v)),
                        pool.get(ell_id[v])
                    ));
                }
                if !sublattice.passed() && !join_law.passed() && !meet_law.passed() {
                    break;
                }
            }
        }

        let mut restriction = CheckResult::Pass;
        'rest: for &u in &closed_masks {
            for a in 0..=sigma {
                let below = u & ((1usize << a) - 1);
                if ell_id[below] != pool.meet_id(&mut meets, ell_id[u], x_id[a]) {
                    restriction = CheckResult::fail(format!(
                        "ℓ(S)∩X_{a} ≠ ℓ(S∩{a}) at S = {}",
                        fmt_set(&mask_set(u))
                    ));
                    break 'rest;
                }
            }
        }

        let mut image_ids: Vec<usize> = closed_masks.iter().map(|&m| ell_id[m]).collect();
        image_ids.sort_unstable();
        image_ids.dedup();
        let mut notes = Vec::new();
        let mut distributivity = CheckResult::Pass;
        let k = image_ids.len();
        let check_triple = |pool: &mut LatticePool,
                            joins: &mut BTreeMap<(usize, usize), usize>,
                            meets: &mut BTreeMap<(usize, usize), usize>,
                            a: usize,
                            b: usize,
                            c: usize|
         -> bool {
            let bc = pool.join_id(joins, b, c);
            let lhs = pool.meet_id(meets, a, bc);
            let ab = pool.meet_id(meets, a, b);
            let ac = pool.meet_id(meets, a, c);
            lhs == pool.join_id(joins, ab, ac)
        };
        if k * k * k <= TRIPLE_CAP {
            'dist: for &a in &image_ids {
                for (bi, &b) in image_ids.iter().enumerate() {
                    for &c in &image_ids[bi..] {
                        if !check_triple(&mut pool, &mut joins, &mut meets, a, b, c) {
                            distributivity = CheckResult::fail(format!(
                                "distributivity fails on image lattices {:?}, {:?}, {:?}",
                                pool.get(a),
                                pool.get(b),
                                pool.get(c)
                            ));
                            break 'dist;
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            notes.push(format!(
                "distributivity sampled: {k} distinct image lattices exceed the exact triple cap"
            ));
            for _ in 0..5000 {
                let a = *image_ids.choose(&mut rng).expect("nonempty");
                let b = *image_ids.choose(&mut rng).expect("nonempty");
                let c = *image_ids.choose(&mut rng).expect("nonempty");
                if !check_triple(&mut pool, &mut joins, &mut meets, a, b, c) {
                    distributivity = CheckResult::fail(format!(
                        "distributivity fails on image lattices {:?}, {:?}, {:?}",
                        pool.get(a),
                        pool.get(b),
                        pool.get(c)
                    ));
                    break;
                }
            }
        }

        Ok(HillReport {
            exhaustive: true,
            census: Some(closed_masks.len()),
            h1,
            sublattice,
            join_law,
            meet_law,
            restriction,
            distributivity,
            notes,
        })
    }

    fn verify_sampled(&self, seed: u64) -> Result<HillReport> {
        let sigma = self.sigma();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pool: Vec<IndexSet> = (0..=sigma).map(|a| (0..a).collect()).collect();
        for _ in 0..40 {
            let s: IndexSet = (0..sigma).filter(|_| rng.gen_bool(0.3)).collect();
            pool.push(self.hull(&s)?);
        }
        pool.sort();
        pool.dedup();

        let mut h1 = CheckResult::Pass;
        for a in 0..=sigma {
            let seg: IndexSet = (0..a).collect();
            if !self.is_closed(&seg)? {
                h1 = CheckResult::fail(format!("initial segment {} not closed", fmt_set(&seg)));
                break;
            }
            if self.ell(&seg)? != *self.filtration.step(a) {
                h1 = CheckResult::fail(format!("ℓ(initial segment {a}) ≠ X_{a}"));
                break;
            }
        }

        let mut sublattice = CheckResult::Pass;
        let mut join_law = CheckResult::Pass;
        let mut meet_law = CheckResult::Pass;
        for _ in 0..200 {
            let s = pool.choose(&mut rng).expect("nonempty pool");
            let t = pool.choose(&mut rng).expect("nonempty pool");
            let union: IndexSet = s.union(t).copied().collect();
            let inter: IndexSet = s.intersection(t).copied().collect();
            if !self.is_closed(&union)? || !self.is_closed(&inter)? {
                sublattice = CheckResult::fail(format!(
                    "S = {}, T = {} break closure",
                    fmt_set(s),
                    fmt_set(t)
                ));
                break;
            }
            let (ls, lt) = (self.ell(s)?, self.ell(t)?);
            if self.ell(&union)? != ls.join(&lt)? {
                join_law = CheckResult::fail(format!("join law at S = {}, T = {}", fmt_set(s), fmt_set(t)));
                break;
            }
            if self.ell(&inter)? != ls.meet(&lt)? {
                meet_law = CheckResult::fail(format!("meet law at S = {}, T = {}", fmt_set(s), fmt_set(t)));
                break;
            }
        }

        let mut restriction = CheckResult::Pass;
        for _ in 0..200 {
            let s = pool.choose(&mut rng).expect("nonempty pool");
            let a = rng.gen_range(0..=sigma);
            let cut: IndexSet = s.iter().copied().filter(|&g| g < a).collect();
            if self.ell(&cut)? != self.ell(s)?.meet(self.filtration.step(a))? {
                restriction =
                    CheckResult::fail(format!("restriction law at S = {}, α = {a}", fmt_set(s)));
                break;
            }
        }

        let mut distributivity = CheckResult::Pass;
        for _ in 0..200 {
            let s = self.ell(pool.choose(&mut rng).expect("nonempty pool"))?;
            let t = self.ell(pool.choose(&mut rng).expect("nonempty pool"))?;
            let u = self.ell(pool.choose(&mut rng).expect("nonempty pool"))?;
            let lhs = s.meet(&t.join(&u)?)?;
            let rhs = s.meet(&t)?.join(&s.meet(&u)?)?;
            if lhs != rhs {
                distributivity = CheckResult::fail("distributivity fails on sampled triple".into());
                break;
            }
        }

        Ok(HillReport {
            exhaustive: false,
            census: None,
            h1,
            sublattice,
            join_law,
            meet_law,
            restriction,
            distributivity,
            notes: vec![format!("σ = {sigma} exceeds the exhaustive bound; sampled with seed {seed}")],
        })
    }

    /// Prop. §-style summand transfer: build a chain of projection-stable
    /// subobjects out of the image lattice and project it onto im(px).
    pub fn summand_filtration(
        &self,
        px: &Homomorphism,
        py: &Homomorphism,
        cap: usize,
    ) -> Result<SummandFiltration> {
        let amb = self.filtration.ambient();
        for (name, p) in [("px", px), ("py", py)] {
            if p.source() != amb || p.target() != amb {
                return Err(Error::Ambient(format!("{name} is not an endomorphism of the ambient")));
            }
        }
        let id = Homomorphism::identity(amb);
        let zero = Homomorphism::zero(amb, amb);
        if !px.compose(py)?.eq_as_map(&zero)
            || !py.compose(px)?.eq_as_map(&zero)
            || !px.add(py)?.eq_as_map(&id)
        {
            return Err(Error::NotComplementary(
                "need px∘py = py∘px = 0 and px + py = id on the ambient".into(),
            ));
        }

        let mut s_cur = IndexSet::new();
        let mut sets = vec![s_cur.clone()];
        let mut iters = 0usize;
        loop {
            let z = self.ell(&s_cur)?;
            if z.is_full() {
                break;
            }
            let mut delta = None;
            for d in 0..self.sigma() {
                if !self.witness(d).leq(&z)? {
                    delta = Some(d);
                    break;
                }
            }
            let delta = delta.ok_or_else(|| {
                Error::Certificate("all witnesses absorbed but chain below X".into())
            })?;
            let mut s_next = {
                let mut s = s_cur.clone();
                s.insert(delta);
                self.hull(&s)?
            };
            // enlarge until the step is projection-stable
            loop {
                iters += 1;
                if iters > cap {
                    return Err(Error::IterationCap { site: "summand_filtration", cap });
                }
                let q = self.ell(&s_next)?;
                let v = px.image(&q)?.join(&py.image(&q)?)?;
                if v.leq(&q)? {
                    break;
                }
                let mut widened = s_next.clone();
                widened.extend(self.cover(&v, self.sigma())?);
                s_next = self.hull(&widened)?;
            }
            s_cur = s_next;
            sets.push(s_cur.clone());
        }

        let z_steps: Vec<Subobject> =
            sets.iter().map(|s| self.ell(s)).collect::<Result<_>>()?;
        let chain = Filtration::new(amb.clone(), z_steps.clone(), None)?;
        if !chain.validate().ok() {
            return Err(Error::Certificate("summand intermediate chain failed validation".into()));
        }
        let w_full = px.image(&amb.full_subobject())?;
        let presentation = SubquotientPresentation::of(&w_full, &amb.zero_subobject())?;
        let qobj = presentation.object().clone();
        let summand_steps = z_steps
            .iter()
            .map(|z| {
                let im = px.image(z)?;
                qobj.subobject(presentation.pull_lattice(im.lattice()))
            })
            .collect::<Result<Vec<_>>>()?;
        let summand = Filtration::new(qobj, summand_steps, None)?;
        if !summand.validate().ok() {
            return Err(Error::Certificate("summand filtration failed validation".into()));
        }
        Ok(SummandFiltration { closed_sets: sets, chain, presentation, summand })
    }
}

/// ℓ(t)/ℓ(s) with its induced chain. `step_of[γ]` is the factor index fed by
/// witness γ; zero-factor indices are absent.
pub struct InducedFiltration {
    pub presentation: SubquotientPresentation,
    pub filtration: Filtration,
    pub step_of: BTreeMap<usize, usize>,
}

pub struct KaplanskyWitness {
    pub hull: IndexSet,
    pub w: Subobject,
    pub inside: InducedFiltration,
    pub quotient: InducedFiltration,
}

pub struct SummandFiltration {
    pub closed_sets: Vec<IndexSet>,
    /// The projection-stable chain Z_α on the original ambient.
    pub chain: Filtration,
    pub presentation: SubquotientPresentation,
    /// Filtration of im(px) presented through `presentation`.
    pub summand: Filtration,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CheckResult {
    Pass,
    Fail(String),
}

impl CheckResult {
    fn fail(msg: String) -> Self {
        CheckResult::Fail(msg)
    }

    pub fn passed(&self) -> bool {
        matches!(self, CheckResult::Pass)
    }
}

#[derive(Clone, Debug)]
pub struct HillReport {
    pub exhaustive: bool,
    /// |L| when the enumeration was exhaustive.
    pub census: Option<usize>,
    pub h1: CheckResult,
    pub sublattice: CheckResult,
    pub join_law: CheckResult,
    pub meet_law: CheckResult,
    pub restriction: CheckResult,
    pub distributivity: CheckResult,
    pub notes: Vec<String>,
}

impl HillReport {
    pub fn all_pass(&self) -> bool {
        self.checks().iter().all(|(_, c)| c.passed())
    }

    pub fn checks(&self) -> Vec<(&'static str, &CheckResult)> {
        vec![
            ("h1", &self.h1),
            ("sublattice", &self.sublattice),
            ("join_law", &self.join_law),
            ("meet_law", &self.meet_law),
            ("restriction", &self.restriction),
            ("distributivity", &self.distributivity),
        ]
    }
}

/// Interning table so the exhaustive verifier can run lattice algebra on
/// small integer ids.
#[derive(Default)]
struct LatticePool {
    lats: Vec<IntLattice>,
    ids: BTreeMap<IntLattice, usize>,
}

impl LatticePool {
    fn intern(&mut self, l: IntLattice) -> usize {
        if let Some(&i) = self.ids.get(&l) {
            return i;
        }
        let i = self.lats.len();
        self.lats.push(l.clone());
        self.ids.insert(l, i);
        i
    }

    fn get(&self, i: usize) -> &IntLattice {
        &self.lats[i]
    }

    fn join_id(&mut self, memo: &mut BTreeMap<(usize, usize), usize>, a: usize, b: usize) -> usize {
        let key = (a.min(b), a.max(b));
        if let Some(&i) = memo.get(&key) {
            return i;
        }
        let l = self.lats[key.0].join(&self.lats[key.1]);
        let i = self.intern(l);
        memo.insert(key, i);
        i
    }

    fn meet_id(&mut self, memo: &mut BTreeMap<(usize, usize), usize>, a: usize, b: usize) -> usize {
        let key = (a.min(b), a.max(b));
        if let Some(&i) = memo.get(&key) {
            return i;
        }
        let l = self.lats[key.0].meet(&self.lats[key.1]);
        let i = self.intern(l);
        memo.insert(key, i);
        i
    }
}

pub struct IntersectionFiltration {
    pub filtration: Filtration,
    /// Per step, per context: the hull fixpoint certificate
    /// ℓ_i(hull_i(cover_i(step))) = step.
    pub fixpoint_certificates: Vec<Vec<bool>>,
}

/// Round-robin enlargement of q until one full cycle over the contexts leaves
/// it unchanged; at that point q is an ℓ-image of a closed set in every one.
fn stabilize(ctxs: &[&HillContext], mut q: Subobject, cap: usize) -> Result<Subobject> {
    let mut stable_run = 0usize;
    let mut i = 0usize;
    let mut iters = 0usize;
    while stable_run < ctxs.len() {
        iters += 1;
        if iters > cap {
            return Err(Error::IterationCap { site: "intersection stabilize", cap });
        }
        let c = ctxs[i % ctxs.len()];
        let cov = c.cover(&q, c.sigma())?;
        let h = c.hull(&cov)?;
        let l = c.ell(&h)?;
        if l == q {
            stable_run += 1;
        } else {
            q = l;
            stable_run = 1;
        }
        i += 1;
    }
    Ok(q)
}

/// Chain whose every step lies in the image lattice of every context.
/// Candidates are stabilized one witness at a time; each round commits the
/// first inclusion-minimal stabilization in (context, witness) scan order.
pub fn intersection_filtration(
    ctxs: &[&HillContext],
    cap: usize,
) -> Result<IntersectionFiltration> {
    if ctxs.is_empty() {
        return Err(Error::Ambient("intersection of zero contexts".into()));
    }
    let amb = ctxs[0].filtration().ambient();
    for c in &ctxs[1..] {
        if c.filtration().ambient() != amb {
            return Err(Error::Ambient("contexts filter different ambients".into()));
        }
    }
    let mut cur = amb.zero_subobject();
    let mut steps = vec![cur.clone()];
    let mut rounds = 0usize;
    while !cur.is_full() {
        rounds += 1;
        if rounds > cap {
            return Err(Error::IterationCap { site: "intersection_filtration", cap });
        }
        let mut cands: Vec<Subobject> = Vec::new();
        for c in ctxs {
            for d in 0..c.sigma() {
                if !c.witness(d).leq(&cur)? {
                    cands.push(stabilize(ctxs, cur.join(c.witness(d))?, cap)?);
                }
            }
        }
        if cands.is_empty() {
            return Err(Error::Certificate("chain below X but no witness enlarges it".into()));
        }
        let mut pick = None;
        'scan: for (i, q) in cands.iter().enumerate() {
            for (j, q2) in cands.iter().enumerate() {
                if j != i && q2 != q && q2.leq(q)? {
                    continue 'scan;
                }
            }
            pick = Some(q.clone());
            break;
        }
        cur = pick.expect("finite nonempty poset has a minimal element");
        steps.push(cur.clone());
    }
    let filtration = Filtration::new(amb.clone(), steps.clone(), None)?;
    let mut fixpoint_certificates = Vec::with_capacity(steps.len());
    for s in &steps {
        let mut row = Vec::with_capacity(ctxs.len());
        for c in ctxs {
            let cov = c.cover(s, c.sigma())?;
            let h = c.hull(&cov)?;
            row.push(c.ell(&h)? == *s);
        }
        fixpoint_certificates.push(row);
    }
    Ok(IntersectionFiltration { filtration, fixpoint_certificates })
}
