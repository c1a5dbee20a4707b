//! Report assembly. Everything goes through `serde_json::Value` whose object
//! map is ordered, so serialized reports are byte-stable by construction.

use serde_json::{json, Value};

use hillcalc::group::{AmbientObject, InvariantFactors, Subobject};
use hillcalc::{ChainComplex, Filtration, Homotopy, IndexSet, IntMatrix};

pub fn matrix_rows(m: &IntMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| {
                Value::Array(
                    m.row_slice(i).iter().map(|e| Value::String(e.to_string())).collect(),
                )
            })
            .collect(),
    )
}

/// A subobject as its canonical generator vectors (one array per generator).
pub fn subobject(s: &Subobject) -> Value {
    let basis = s.lattice().basis();
    Value::Array(
        basis
            .columns()
            .map(|c| Value::Array(c.iter().map(|e| Value::String(e.to_string())).collect()))
            .collect(),
    )
}

pub fn ambient(a: &std::sync::Arc<AmbientObject>) -> Value {
    json!({
        "rank": a.rank(),
        "relations": subobject_like(a.relations().basis()),
        "invariants": factors_value(&a.invariants()),
    })
}

fn subobject_like(basis: &IntMatrix) -> Value {
    Value::Array(
        basis
            .columns()
            .map(|c| Value::Array(c.iter().map(|e| Value::String(e.to_string())).collect()))
            .collect(),
    )
}

pub fn factors_value(f: &InvariantFactors) -> Value {
    json!({
        "torsion": f.torsion().iter().map(|d| d.to_string()).collect::<Vec<_>>(),
        "free_rank": f.free_rank(),
    })
}

pub fn index_set(s: &IndexSet) -> Value {
    Value::Array(s.iter().map(|&a| Value::Number(a.into())).collect())
}

pub fn filtration(f: &Filtration) -> Value {
    let mut out = serde_json::Map::new();
    out.insert("sigma".into(), json!(f.sigma()));
    out.insert(
        "steps".into(),
        Value::Array(f.steps().iter().map(subobject).collect()),
    );
    if let Some(ws) = f.witnesses() {
        out.insert("witnesses".into(), Value::Array(ws.iter().map(subobject).collect()));
    }
    if let Ok(factors) = f.factors() {
        out.insert(
            "factors".into(),
            Value::Array(factors.iter().map(factors_value).collect()),
        );
    }
    Value::Object(out)
}

pub fn complex(x: &ChainComplex) -> Value {
    if x.is_zero_complex() {
        return json!({"lo": 0, "hi": null, "components": [], "differentials": []});
    }
    let comps: Vec<Value> = x.degrees().map(|n| ambient(&x.component(n))).collect();
    let diffs: Vec<Value> = x
        .degrees()
        .take_while(|&n| n < x.hi())
        .map(|n| matrix_rows(x.differential(n).matrix()))
        .collect();
    json!({
        "lo": x.lo(),
        "hi": x.hi(),
        "components": comps,
        "differentials": diffs,
    })
}

pub fn homotopy(h: &Homotopy) -> Value {
    let mut out = serde_json::Map::new();
    for (n, map) in &h.maps {
        out.insert(n.to_string(), matrix_rows(map.matrix()));
    }
    Value::Object(out)
}

/// One named check with an optional counterexample payload.
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub counterexample: Option<Value>,
}

impl Check {
    pub fn pass(name: &str) -> Self {
        Check { name: name.into(), pass: true, counterexample: None }
    }

    pub fn fail(name: &str, counterexample: Value) -> Self {
        Check { name: name.into(), pass: false, counterexample: Some(counterexample) }
    }
}

pub fn assemble(
    command: &str,
    instance: &str,
    result: Value,
    certificates: Value,
    checks: &[Check],
    timing_ms: Option<u128>,
) -> Value {
    let mut checks_obj = serde_json::Map::new();
    for c in checks {
        let mut entry = serde_json::Map::new();
        entry.insert("pass".into(), Value::Bool(c.pass));
        if let Some(ce) = &c.counterexample {
            entry.insert("counterexample".into(), ce.clone());
        }
        checks_obj.insert(c.name.clone(), Value::Object(entry));
    }
    let mut out = serde_json::Map::new();
    out.insert("command".into(), Value::String(command.into()));
    out.insert("instance".into(), Value::String(instance.into()));
    out.insert("result".into(), result);
    out.insert("certificates".into(), certificates);
    out.insert("checks".into(), Value::Object(checks_obj));
    if let Some(ms) = timing_ms {
        out.insert("timing_ms".into(), json!(ms));
    }
    Value::Object(out)
}
