//! JSON instance files. Integers travel as decimal strings so arbitrary
//! precision survives any toolchain; generator lists are arrays of vectors,
//! matrices are arrays of rows.

use std::collections::BTreeMap;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use hillcalc::group::AmbientObject;
use hillcalc::{ChainComplex, ChainMap, Filtration, Homomorphism, Int, IntLattice, IntMatrix};

use crate::CliError;

#[derive(Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Instance {
    Filtration(FiltrationInstance),
    Complex(ComplexInstance),
    Map(MapInstance),
    Batch(BatchInstance),
}

#[derive(Deserialize, Serialize)]
pub struct AmbientSpec {
    pub rank: usize,
    #[serde(default)]
    pub relations: Vec<Vec<String>>,
}

#[derive(Deserialize, Serialize)]
pub struct FiltrationInstance {
    pub ambient: AmbientSpec,
    pub steps: Vec<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witnesses: Option<Vec<Vec<Vec<String>>>>,
    /// complementary projections, for `summand`
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projections: Option<ProjectionPair>,
    /// further filtrations of the same ambient, for `intersect`
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub others: Option<Vec<FiltrationInstance>>,
    /// factor filtrations in presentation coordinates, for `refine`
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parts: Option<Vec<FiltrationInstance>>,
}

#[derive(Deserialize, Serialize)]
pub struct ProjectionPair {
    pub x: Vec<Vec<String>>,
    pub y: Vec<Vec<String>>,
}

#[derive(Deserialize, Serialize)]
pub struct ComplexInstance {
    pub lo: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hi: Option<i64>,
    pub components: Vec<AmbientSpec>,
    #[serde(default)]
    pub differentials: Vec<Vec<Vec<String>>>,
    /// per-degree chains on the components, for `cpxfilt`; null = trivial
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub component_filtrations: Option<Vec<Option<FiltrationInstance>>>,
    /// per-degree chains on the presented cycle objects, for `tildefilt`
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycle_filtrations: Option<Vec<Option<FiltrationInstance>>>,
}

#[derive(Deserialize, Serialize)]
pub struct MapInstance {
    pub source: ComplexInstance,
    pub target: ComplexInstance,
    #[serde(default)]
    pub maps: BTreeMap<String, Vec<Vec<String>>>,
}

#[derive(Deserialize, Serialize)]
pub struct BatchInstance {
    pub items: Vec<BatchItem>,
}

#[derive(Deserialize, Serialize)]
pub struct BatchItem {
    pub command: String,
    pub instance: Instance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gens: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<i64>,
}

pub fn parse_instance(text: &str) -> Result<Instance, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Malformed(format!("parse error: {e}")))
}

fn parse_int(s: &str, at: &str) -> Result<Int, CliError> {
    Int::from_str(s.trim())
        .map_err(|_| CliError::Malformed(format!("{at}: '{s}' is not a decimal integer")))
}

/// Generator list: one vector per entry, assembled as matrix columns.
pub fn generators(rows: &[Vec<String>], rank: usize, at: &str) -> Result<IntMatrix, CliError> {
    let mut cols = Vec::with_capacity(rows.len());
    for (i, r) in rows.iter().enumerate() {
        if r.len() != rank {
            return Err(CliError::Malformed(format!(
                "{at}: generator {i} has {} entries, ambient rank is {rank}",
                r.len()
            )));
        }
        let mut v = Vec::with_capacity(rank);
        for e in r {
            v.push(parse_int(e, at)?);
        }
        cols.push(v);
    }
    IntMatrix::from_columns(rank, &cols).map_err(|e| CliError::Malformed(format!("{at}: {e}")))
}

/// Row-major matrix with prescribed shape.
pub fn matrix(rows: &[Vec<String>], want_rows: usize, want_cols: usize, at: &str) -> Result<IntMatrix, CliError> {
    if rows.len() != want_rows || rows.iter().any(|r| r.len() != want_cols) {
        return Err(CliError::Malformed(format!(
            "{at}: expected a {want_rows}x{want_cols} matrix"
        )));
    }
    let mut parsed = Vec::with_capacity(want_rows);
    for r in rows {
        let mut row = Vec::with_capacity(want_cols);
        for e in r {
            row.push(parse_int(e, at)?);
        }
        parsed.push(row);
    }
    IntMatrix::from_rows(parsed).map_err(|e| CliError::Malformed(format!("{at}: {e}")))
}

pub fn ambient(spec: &AmbientSpec, at: &str) -> Result<Arc<AmbientObject>, CliError> {
    let rel = generators(&spec.relations, spec.rank, &format!("{at}.relations"))?;
    AmbientObject::new(spec.rank, IntLattice::from_generators(&rel))
        .map_err(|e| CliError::Malformed(format!("{at}: {e}")))
}

pub fn filtration(inst: &FiltrationInstance, at: &str) -> Result<Filtration, CliError> {
    let amb = ambient(&inst.ambient, &format!("{at}.ambient"))?;
    let mut steps = Vec::with_capacity(inst.steps.len());
    for (i, s) in inst.steps.iter().enumerate() {
        let m = generators(s, amb.rank(), &format!("{at}.steps[{i}]"))?;
        steps.push(
            amb.subobject_from_columns(&m)
                .map_err(|e| CliError::Malformed(format!("{at}.steps[{i}]: {e}")))?,
        );
    }
    let witnesses = match &inst.witnesses {
        None => None,
        Some(ws) => {
            let mut out = Vec::with_capacity(ws.len());
            for (i, w) in ws.iter().enumerate() {
                let m = generators(w, amb.rank(), &format!("{at}.witnesses[{i}]"))?;
                out.push(
                    amb.subobject_from_columns(&m)
                        .map_err(|e| CliError::Malformed(format!("{at}.witnesses[{i}]: {e}")))?,
                );
            }
            Some(out)
        }
    };
    Filtration::new(amb, steps, witnesses)
        .map_err(|e| CliError::Malformed(format!("{at}: {e}")))
}

pub fn complex(inst: &ComplexInstance, at: &str) -> Result<ChainComplex, CliError> {
    let mut components = Vec::with_capacity(inst.components.len());
    for (i, c) in inst.components.iter().enumerate() {
        components.push(ambient(c, &format!("{at}.components[{i}]"))?);
    }
    if let Some(hi) = inst.hi {
        let expect = inst.lo + components.len() as i64 - 1;
        if hi != expect {
            return Err(CliError::Malformed(format!(
                "{at}: hi = {hi} does not match lo + {} - 1",
                components.len()
            )));
        }
    }
    if components.len() > 1 && inst.differentials.len() != components.len() - 1 {
        return Err(CliError::Malformed(format!(
            "{at}: {} components need {} differentials",
            components.len(),
            components.len() - 1
        )));
    }
    let mut diffs = Vec::new();
    for (i, d) in inst.differentials.iter().enumerate() {
        let src = &components[i];
        let tgt = &components[i + 1];
        let m = matrix(d, tgt.rank(), src.rank(), &format!("{at}.differentials[{i}]"))?;
        diffs.push(
            Homomorphism::new(src.clone(), tgt.clone(), m)
                .map_err(|e| CliError::Malformed(format!("{at}.differentials[{i}]: {e}")))?,
        );
    }
    ChainComplex::new(inst.lo, components, diffs)
        .map_err(|e| CliError::Malformed(format!("{at}: {e}")))
}

pub fn chain_map(inst: &MapInstance, at: &str) -> Result<ChainMap, CliError> {
    let source = complex(&inst.source, &format!("{at}.source"))?;
    let target = complex(&inst.target, &format!("{at}.target"))?;
    let mut maps = BTreeMap::new();
    for (k, rows) in &inst.maps {
        let n: i64 = k
            .parse()
            .map_err(|_| CliError::Malformed(format!("{at}.maps: '{k}' is not a degree")))?;
        let rt = target.component(n).rank();
        let rs = source.component(n).rank();
        if rt == 0 || rs == 0 {
            if rows.iter().all(|r| r.is_empty()) || rows.is_empty() {
                continue;
            }
            return Err(CliError::Malformed(format!(
                "{at}.maps['{k}']: no components at this degree"
            )));
        }
        maps.insert(n, matrix(rows, rt, rs, &format!("{at}.maps['{k}']"))?);
    }
    ChainMap::new(source, target, maps).map_err(|e| CliError::Malformed(format!("{at}: {e}")))
}

/// "0,2,5" (or "") into an index set.
pub fn index_set(text: &str) -> Result<hillcalc::IndexSet, CliError> {
    let mut out = hillcalc::IndexSet::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        out.insert(
            part.parse::<usize>()
                .map_err(|_| CliError::Malformed(format!("'{part}' is not an index")))?,
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::parse_instance;

    /// parse → serialize → parse is the identity on the golden corpus, and
    /// serialization is idempotent.
    #[test]
    fn golden_instances_round_trip() {
        let dir = format!("{}/golden", env!("CARGO_MANIFEST_DIR"));
        let mut seen = 0;
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.extension().map_or(true, |e| e != "json") {
                continue;
            }
            seen += 1;
            let text = std::fs::read_to_string(&path).unwrap();
            let first = parse_instance(&text).unwrap_or_else(|_| panic!("{path:?} parses"));
            let s1 = serde_json::to_string(&first).unwrap();
            let second = parse_instance(&s1).unwrap_or_else(|_| panic!("{path:?} reparses"));
            let s2 = serde_json::to_string(&second).unwrap();
            assert_eq!(s1, s2, "{path:?} round trip not idempotent");
            let original: serde_json::Value = serde_json::from_str(&text).unwrap();
            let reserialized: serde_json::Value = serde_json::from_str(&s1).unwrap();
            assert_eq!(original, reserialized, "{path:?} loses or invents fields");
        }
        assert!(seen >= 12, "golden corpus went missing");
    }
}
