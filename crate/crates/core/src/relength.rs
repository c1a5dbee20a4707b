//! The level function and chain shortening: regrade the witness indices so
//! that same-level factors merge into direct sums, then certify the rebuilt
//! chain step by step.
//!
//! lev(α) = sup{lev(γ)+1 : γ < α, γ ∈ S_α} with S_α = hull({α}) and sup ∅ = 0.
//! The shortened chain is X′_β = ℓ(T_β) over T_β = {γ : lev(γ) < β}.

use crate::error::{Error, Result};
use crate::filtration::Filtration;
use crate::group::{quotient_type, InvariantFactors};
use crate::hill::{HillContext, IndexSet};

pub struct LevelAssignment {
    /// S_α = hull({α}); closed, contains α, lives inside {0..α}.
    pub s_sets: Vec<IndexSet>,
    pub lev: Vec<usize>,
}

impl LevelAssignment {
    /// 1 + max level; zero on the empty chain.
    pub fn new_length(&self) -> usize {
        self.lev.iter().max().map_or(0, |m| m + 1)
    }
}

pub struct LevelDecomposition {
    pub level: usize,
    /// {γ : lev(γ) = level}, ascending.
    pub indices: Vec<usize>,
    /// Invariant factors of X′_{level+1}/X′_level.
    pub new_factor: InvariantFactors,
    /// Invariant factors of ⊕_γ X_{γ+1}/X_γ over the contributing indices.
    pub sum_factor: InvariantFactors,
}

pub struct RelengthCertificate {
    pub assignment: LevelAssignment,
    pub filtration: Filtration,
    pub decomposition: Vec<LevelDecomposition>,
}

pub fn levels(ctx: &HillContext) -> Result<LevelAssignment> {
    let sigma = ctx.sigma();
    let mut s_sets = Vec::with_capacity(sigma);
    let mut lev = Vec::with_capacity(sigma);
    for a in 0..sigma {
        let s: IndexSet = [a].into_iter().collect();
        let hull = ctx.hull(&s)?;
        debug_assert!(hull.contains(&a) && hull.iter().all(|&g| g <= a));
        let l = hull.iter().filter(|&&g| g < a).map(|&g| lev[g] + 1).max().unwrap_or(0);
        s_sets.push(hull);
        lev.push(l);
    }
    Ok(LevelAssignment { s_sets, lev })
}

pub fn rebound(ctx: &HillContext) -> Result<RelengthCertificate> {
    let assignment = levels(ctx)?;
    let sigma = ctx.sigma();
    let len = assignment.new_length();

    let t_sets: Vec<IndexSet> = (0..=len)
        .map(|b| (0..sigma).filter(|&g| assignment.lev[g] < b).collect())
        .collect();
    for (b, t) in t_sets.iter().enumerate() {
        let mut union = IndexSet::new();
        for g in 0..sigma {
            if assignment.lev[g] < b {
                union.extend(assignment.s_sets[g].iter().copied());
            }
        }
        if union != *t {
            return Err(Error::Certificate(format!(
                "T_{b} differs from the union of its contributing hulls"
            )));
        }
        if !ctx.is_closed(t)? {
            return Err(Error::Certificate(format!("T_{b} is not closed")));
        }
    }

    let steps = t_sets.iter().map(|t| ctx.ell(t)).collect::<Result<Vec<_>>>()?;
    let mut wits = Vec::with_capacity(len);
    for b in 0..len {
        let mut w = ctx.filtration().step(0).clone();
        for g in 0..sigma {
            if assignment.lev[g] == b {
                w = w.join(ctx.witness(g))?;
            }
        }
        wits.push(w);
    }
    let filtration =
        Filtration::new(ctx.filtration().ambient().clone(), steps.clone(), Some(wits))?;
    let report = filtration.validate();
    if !report.ok() {
        return Err(Error::Certificate(format!(
            "shortened chain fails validation: {}",
            report.violations[0]
        )));
    }

    let old_factors = ctx.filtration().factors()?;
    let mut decomposition = Vec::with_capacity(len);
    for b in 0..len {
        let indices: Vec<usize> =
            (0..sigma).filter(|&g| assignment.lev[g] == b).collect();
        let new_factor = quotient_type(&steps[b + 1], &steps[b])?;
        let parts: Vec<&InvariantFactors> = indices.iter().map(|&g| &old_factors[g]).collect();
        let sum_factor = InvariantFactors::direct_sum(&parts);
        if new_factor != sum_factor {
            return Err(Error::Certificate(format!(
                "level {b}: X′ factor {new_factor} differs from direct sum {sum_factor}"
            )));
        }
        decomposition.push(LevelDecomposition { level: b, indices, new_factor, sum_factor });
    }

    // key containments from the proof, per moving index
    for d in 0..sigma {
        let b = assignment.lev[d];
        let a_d = ctx.witness(d);
        if a_d.meet(&steps[b])? != a_d.meet(ctx.filtration().step(d))? {
            return Err(Error::Certificate(format!(
                "A_{d} ∩ X′_{b} differs from A_{d} ∩ X_{d}"
            )));
        }
        let mut partial = ctx.filtration().step(0).clone();
        for g in 0..d {
            if assignment.lev[g] == b {
                partial = partial.join(ctx.witness(g))?;
            }
        }
        if !a_d.join(&steps[b])?.meet(&partial)?.leq(&steps[b])? {
            return Err(Error::Certificate(format!(
                "(A_{d} + X′_{b}) meets earlier level-{b} witnesses outside X′_{b}"
            )));
        }
    }

    Ok(RelengthCertificate { assignment, filtration, decomposition })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filtration::coproduct_filtration;
    use crate::group::AmbientObject;
    use crate::hill::tests::{m_ctx, u8_ctx, v8_ctx};

    #[test]
    fn u8_is_uniserial() {
        let ctx = u8_ctx();
        let cert = rebound(&ctx).unwrap();
        assert_eq!(cert.assignment.lev, vec![0, 1, 2]);
        assert_eq!(cert.assignment.new_length(), 3);
        assert_eq!(cert.filtration.steps(), ctx.filtration().steps());
        let two = InvariantFactors::cyclic(2);
        for d in &cert.decomposition {
            assert_eq!(d.indices.len(), 1);
            assert_eq!(d.new_factor, two);
        }
    }

    #[test]
    fn v8_collapses_to_one_step() {
        let ctx = v8_ctx();
        let cert = rebound(&ctx).unwrap();
        assert_eq!(cert.assignment.lev, vec![0, 0, 0]);
        assert_eq!(cert.assignment.new_length(), 1);
        assert_eq!(cert.filtration.sigma(), 1);
        assert!(cert.filtration.step(1).is_full());
        let two = InvariantFactors::cyclic(2);
        assert_eq!(
            cert.decomposition[0].new_factor,
            InvariantFactors::direct_sum(&[&two, &two, &two])
        );
    }

    #[test]
    fn m_exposes_the_socle() {
        let ctx = m_ctx();
        let cert = rebound(&ctx).unwrap();
        assert_eq!(cert.assignment.lev, vec![0, 0, 1]);
        assert_eq!(cert.assignment.new_length(), 2);
        let socle = cert.filtration.step(1);
        let two = InvariantFactors::cyclic(2);
        assert_eq!(socle.invariants(), InvariantFactors::direct_sum(&[&two, &two]));
        assert_eq!(cert.decomposition[0].indices, vec![0, 1]);
        assert_eq!(cert.decomposition[1].indices, vec![2]);
        assert_eq!(cert.decomposition[1].new_factor, two);
    }

    #[test]
    fn empty_chain_on_trivial_ambient() {
        let f = Filtration::new(
            AmbientObject::zero_object(),
            vec![AmbientObject::zero_object().zero_subobject()],
            Some(vec![]),
        )
        .unwrap();
        let ctx = HillContext::new(&f).unwrap();
        let cert = rebound(&ctx).unwrap();
        assert_eq!(cert.assignment.new_length(), 0);
        assert!(cert.decomposition.is_empty());
    }

    #[test]
    fn mixed_orders_collapse_to_one_level() {
        // Z/4 ⊕ Z/9 coproduct chain: blocks are independent, one level only
        let f = coproduct_filtration(&[AmbientObject::cyclic(4), AmbientObject::cyclic(9)]);
        let ctx = HillContext::new(&f).unwrap();
        let cert = rebound(&ctx).unwrap();
        assert_eq!(cert.assignment.lev, vec![0, 0]);
        assert_eq!(cert.assignment.new_length(), 1);
        assert_eq!(
            cert.decomposition[0].new_factor,
            InvariantFactors::direct_sum(&[
                &InvariantFactors::cyclic(4),
                &InvariantFactors::cyclic(9)
            ])
        );
    }
}
