//! Finite chains 0 = X₀ ⊆ X₁ ⊆ ... ⊆ X_σ = X with optional witness
//! subobjects A_α satisfying X_α + A_α = X_{α+1}.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{quotient_type, AmbientObject, InvariantFactors, Subobject, SubquotientPresentation};
use crate::IntMatrix;

#[derive(Clone, PartialEq, Eq)]
pub struct Filtration {
    ambient: Arc<AmbientObject>,
    /// X₀ ... X_σ, length σ+1.
    steps: Vec<Subobject>,
    /// A₀ ... A_{σ−1} when present.
    witnesses: Option<Vec<Subobject>>,
}

pub type FactorList = Vec<InvariantFactors>;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Violation {
    FirstStepNotZero,
    LastStepNotFull,
    NotContained { index: usize },
    WitnessJoinMismatch { index: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::FirstStepNotZero => write!(f, "step 0 is not the zero subobject"),
            Violation::LastStepNotFull => write!(f, "final step is not the full subobject"),
            Violation::NotContained { index } => {
                write!(f, "step {} is not contained in step {}", index, index + 1)
            }
            Violation::WitnessJoinMismatch { index } => {
                write!(f, "step {} + witness {} does not reach step {}", index, index, index + 1)
            }
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Warning {
    RepeatedStep { index: usize },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::RepeatedStep { index } => {
                write!(f, "steps {} and {} coincide (zero factor)", index, index + 1)
            }
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<Warning>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl Filtration {
    /// Structural construction; deep invariants are the job of [`validate`].
    ///
    /// [`validate`]: Filtration::validate
    pub fn new(
        ambient: Arc<AmbientObject>,
        steps: Vec<Subobject>,
        witnesses: Option<Vec<Subobject>>,
    ) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::InvalidFiltration("a filtration needs at least step X₀".into()));
        }
        for s in &steps {
            if *s.ambient() != ambient {
                return Err(Error::Ambient("step subobject of a different ambient".into()));
            }
        }
        if let Some(ws) = &witnesses {
            if ws.len() + 1 != steps.len() {
                return Err(Error::InvalidFiltration(format!(
                    "{} witnesses for {} steps",
                    ws.len(),
                    steps.len()
                )));
            }
            for w in ws {
                if *w.ambient() != ambient {
                    return Err(Error::Ambient("witness subobject of a different ambient".into()));
                }
            }
        }
        Ok(Filtration { ambient, steps, witnesses })
    }

    pub fn ambient(&self) -> &Arc<AmbientObject> {
        &self.ambient
    }

    pub fn sigma(&self) -> usize {
        self.steps.len() - 1
    }

    pub fn step(&self, i: usize) -> &Subobject {
        &self.steps[i]
    }

    pub fn steps(&self) -> &[Subobject] {
        &self.steps
    }

    pub fn witnesses(&self) -> Option<&[Subobject]> {
        self.witnesses.as_deref()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        if !self.steps[0].is_zero() {
            report.violations.push(Violation::FirstStepNotZero);
        }
        if !self.steps[self.sigma()].is_full() {
            report.violations.push(Violation::LastStepNotFull);
        }
        for i in 0..self.sigma() {
            if !self.steps[i].leq(&self.steps[i + 1]).expect("same ambient by construction") {
                report.violations.push(Violation::NotContained { index: i });
            } else if self.steps[i] == self.steps[i + 1] {
                report.warnings.push(Warning::RepeatedStep { index: i });
            }
        }
        if let Some(ws) = &self.witnesses {
            for (i, w) in ws.iter().enumerate() {
                let joined = self.steps[i].join(w).expect("same ambient by construction");
                if joined != self.steps[i + 1] {
                    report.violations.push(Violation::WitnessJoinMismatch { index: i });
                }
            }
        }
        report
    }

    pub fn factors(&self) -> Result<FactorList> {
        let report = self.validate();
        if !report.ok() {
            return Err(Error::InvalidFiltration(report.violations[0].to_string()));
        }
        (0..self.sigma())
            .map(|i| quotient_type(&self.steps[i + 1], &self.steps[i]))
            .collect()
    }

    /// Canonical witnesses: A_α is generated by the canonical-basis columns
    /// of X_{α+1} that X_α misses. Existing witnesses are kept.
    pub fn with_default_witnesses(&self) -> Filtration {
        if self.witnesses.is_some() {
            return self.clone();
        }
        let mut ws = Vec::with_capacity(self.sigma());
        for i in 0..self.sigma() {
            let next = &self.steps[i + 1];
            let fresh: Vec<Vec<crate::Int>> = next
                .lattice()
                .basis()
                .columns()
                .filter(|c| !self.steps[i].lattice().contains(c))
                .collect();
            let cols = IntMatrix::from_columns(self.ambient.rank(), &fresh)
                .expect("columns drawn from one basis");
            let w = self.ambient.subobject_from_columns(&cols).expect("basis columns fit ambient");
            ws.push(w);
        }
        Filtration {
            ambient: self.ambient.clone(),
            steps: self.steps.clone(),
            witnesses: Some(ws),
        }
    }

    /// Canonical presentation of the factor X_{α+1}/X_α, the contract for
    /// [`refine`] inputs.
    ///
    /// [`refine`]: Filtration::refine
    pub fn factor_presentation(&self, alpha: usize) -> Result<SubquotientPresentation> {
        if alpha >= self.sigma() {
            return Err(Error::Index(format!("factor index {alpha} out of range")));
        }
        SubquotientPresentation::of(&self.steps[alpha + 1], &self.steps[alpha])
    }

    /// Splice a filtration of every factor into this one. Each
    /// `parts[α]` must filter the canonical factor presentation
    /// [`factor_presentation`]`(α)` exactly.
    ///
    /// [`factor_presentation`]: Filtration::factor_presentation
    pub fn refine(&self, parts: &[Filtration]) -> Result<Filtration> {
        let report = self.validate();
        if !report.ok() {
            return Err(Error::InvalidFiltration(report.violations[0].to_string()));
        }
        if parts.len() != self.sigma() {
            return Err(Error::InvalidFiltration(format!(
                "{} factor filtrations for {} factors",
                parts.len(),
                self.sigma()
            )));
        }
        let mut steps = vec![self.steps[0].clone()];
        let mut witnesses: Option<Vec<Subobject>> = Some(Vec::new());
        for (alpha, part) in parts.iter().enumerate() {
            let pres = self.factor_presentation(alpha)?;
            if part.ambient() != pres.object() {
                return Err(Error::Ambient(format!(
                    "factor filtration {alpha} is not on the canonical factor presentation"
                )));
            }
            let part_report = part.validate();
            if !part_report.ok() {
                return Err(Error::InvalidFiltration(format!(
                    "factor filtration {alpha}: {}",
                    part_report.violations[0]
                )));
            }
            for i in 1..=part.sigma() {
                let lifted = pres.push_sub(&self.ambient, &part.steps[i])?;
                steps.push(lifted);
            }
            match (&mut witnesses, part.witnesses()) {
                (Some(acc), Some(ws)) => {
                    for w in ws {
                        let lifted_lattice = pres.push_lattice(w.lattice());
                        acc.push(self.ambient.subobject(lifted_lattice)?);
                    }
                }
                _ => witnesses = None,
            }
        }
        Filtration::new(self.ambient.clone(), steps, witnesses)
    }
}

impl fmt::Debug for Filtration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Filtration(σ={})", self.sigma())
    }
}

/// Filtration of ⊕ objects by partial sums of blocks, witnessed by the block
/// inclusions. The empty list degenerates to the zero object's empty chain.
pub fn coproduct_filtration(objects: &[Arc<AmbientObject>]) -> Filtration {
    let ambient = AmbientObject::direct_sum(objects);
    let n = ambient.rank();
    let mut offsets = Vec::with_capacity(objects.len() + 1);
    offsets.push(0usize);
    for o in objects {
        offsets.push(offsets.last().unwrap() + o.rank());
    }
    let mut steps = Vec::with_capacity(objects.len() + 1);
    let mut witnesses = Vec::with_capacity(objects.len());
    for alpha in 0..=objects.len() {
        // first alpha blocks in full, the rest cut down to their relations
        let mut cols: Vec<Vec<crate::Int>> = Vec::new();
        for (i, o) in objects.iter().enumerate() {
            if i < alpha {
                for k in 0..o.rank() {
                    let mut v = vec![crate::Int::from(0); n];
                    v[offsets[i] + k] = crate::Int::from(1);
                    cols.push(v);
                }
            }
        }
        let m = IntMatrix::from_columns(n, &cols).expect("unit columns");
        steps.push(ambient.subobject_from_columns(&m).expect("unit columns fit"));
        if alpha < objects.len() {
            let mut wcols: Vec<Vec<crate::Int>> = Vec::new();
            for k in 0..objects[alpha].rank() {
                let mut v = vec![crate::Int::from(0); n];
                v[offsets[alpha] + k] = crate::Int::from(1);
                wcols.push(v);
            }
            let wm = IntMatrix::from_columns(n, &wcols).expect("unit columns");
            witnesses.push(ambient.subobject_from_columns(&wm).expect("unit columns fit"));
        }
    }
    Filtration { ambient, steps, witnesses: Some(witnesses) }
}
