//! Command dispatch. Every handler returns the result payload plus named
//! checks; exit codes fall out of the checks (0 clean, 1 a check failed,
//! 2 malformed input).

use std::time::Instant;

use serde_json::{json, Value};

use hillcalc::group::{quotient_type, InvariantFactors};
use hillcalc::{
    cone, cpx_filtration, ext1_cs, homology, intersection_filtration, is_cs_split, levels,
    null_homotopy, rebound, tilde_filtration, CheckResult, Error, Filtration, HillContext,
    Homomorphism, IndexSet, Subobject,
};

use crate::instance::{self, Instance};
use crate::report::{self, Check};
use crate::CliError;

pub struct Options {
    pub exhaustive_bound: usize,
    pub iteration_cap: usize,
    pub seed: u64,
    pub timing: bool,
}

/// Per-invocation arguments, normalized between the command line and batch
/// item fields.
pub struct Request<'a> {
    pub command: &'a str,
    pub set: Option<String>,
    pub s: Option<String>,
    pub t: Option<String>,
    pub gens: Option<Vec<Vec<String>>>,
    pub degree: Option<i64>,
}

fn lib_err(e: Error) -> CliError {
    match e {
        Error::Certificate(_) | Error::IterationCap { .. } => CliError::Check(e.to_string()),
        other => CliError::Malformed(other.to_string()),
    }
}

/// result payload, certificate payload, named checks
type Outcome = (Value, Value, Vec<Check>);

pub fn execute(req: &Request, inst: &Instance, opts: &Options, label: &str) -> (Value, i32) {
    if let Instance::Batch(b) = inst {
        if req.command != "batch" {
            let err = json!({
                "command": req.command,
                "instance": label,
                "error": "batch instances only run under the batch command",
            });
            return (err, 2);
        }
        return run_batch(b, opts, label);
    }
    let started = Instant::now();
    let outcome = dispatch(req, inst, opts);
    let timing = opts.timing.then(|| started.elapsed().as_millis());
    match outcome {
        Ok((result, certificates, checks)) => {
            let exit = i32::from(checks.iter().any(|c| !c.pass));
            (
                report::assemble(req.command, label, result, certificates, &checks, timing),
                exit,
            )
        }
        Err(CliError::Check(msg)) => {
            let checks = vec![Check::fail("certificate", Value::String(msg))];
            (
                report::assemble(req.command, label, Value::Null, json!({}), &checks, timing),
                1,
            )
        }
        Err(CliError::Malformed(msg)) => {
            let err = json!({
                "command": req.command,
                "instance": label,
                "error": msg,
            });
            (err, 2)
        }
    }
}

fn run_batch(batch: &instance::BatchInstance, opts: &Options, label: &str) -> (Value, i32) {
    let results: Vec<(Value, i32)> = std::thread::scope(|scope| {
        let handles: Vec<_> = batch
            .items
            .iter()
            .enumerate()
            .map(|(i, item)| {
                scope.spawn(move || {
                    let req = Request {
                        command: &item.command,
                        set: item.set.clone(),
                        s: item.s.clone(),
                        t: item.t.clone(),
                        gens: item.gens.clone(),
                        degree: item.degree,
                    };
                    execute(&req, &item.instance, opts, &format!("{label}#{i}"))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("batch worker panicked")).collect()
    });
    let exit = results.iter().map(|(_, code)| *code).max().unwrap_or(0);
    let items: Vec<Value> = results.into_iter().map(|(v, _)| v).collect();
    (json!({"command": "batch", "instance": label, "items": items}), exit)
}

fn dispatch(req: &Request, inst: &Instance, opts: &Options) -> Result<Outcome, CliError> {
    match req.command {
        "validate" => cmd_validate(need_filtration(inst)?),
        "factors" => cmd_factors(need_filtration(inst)?),
        "refine" => cmd_refine(need_filtration(inst)?),
        "verify-hill" => cmd_verify_hill(need_filtration(inst)?, opts),
        "closed" => cmd_closed(need_filtration(inst)?, req),
        "ell" => cmd_ell(need_filtration(inst)?, req),
        "hull" => cmd_hull(need_filtration(inst)?, req),
        "h3" => cmd_h3(need_filtration(inst)?, req),
        "kaplansky" => cmd_kaplansky(need_filtration(inst)?, req),
        "relength" => cmd_relength(need_filtration(inst)?),
        "summand" => cmd_summand(need_filtration(inst)?, opts),
        "intersect" => cmd_intersect(need_filtration(inst)?, opts),
        "cone" => cmd_cone(need_map(inst)?),
        "homotopic" => cmd_homotopic(need_map(inst)?),
        "ext1cs" => cmd_ext1cs(need_map(inst)?),
        "homology" => cmd_homology(need_complex(inst)?, req),
        "cpxfilt" => cmd_cpxfilt(need_complex(inst)?),
        "tildefilt" => cmd_tildefilt(need_complex(inst)?, opts),
        other => Err(CliError::Malformed(format!("unknown command '{other}'"))),
    }
}

fn need_filtration(inst: &Instance) -> Result<&instance::FiltrationInstance, CliError> {
    match inst {
        Instance::Filtration(f) => Ok(f),
        _ => Err(CliError::Malformed("this command needs a filtration instance".into())),
    }
}

fn need_complex(inst: &Instance) -> Result<&instance::ComplexInstance, CliError> {
    match inst {
        Instance::Complex(c) => Ok(c),
        _ => Err(CliError::Malformed("this command needs a complex instance".into())),
    }
}

fn need_map(inst: &Instance) -> Result<&instance::MapInstance, CliError> {
    match inst {
        Instance::Map(m) => Ok(m),
        _ => Err(CliError::Malformed("this command needs a map instance".into())),
    }
}

fn need_set(opt: &Option<String>, flag: &str) -> Result<IndexSet, CliError> {
    match opt {
        Some(text) => instance::index_set(text),
        None => Err(CliError::Malformed(format!("--{flag} is required"))),
    }
}

fn seed_subobject(
    f: &Filtration,
    req: &Request,
) -> Result<Subobject, CliError> {
    let rows = req
        .gens
        .as_ref()
        .ok_or_else(|| CliError::Malformed("--gens is required".into()))?;
    let m = instance::generators(rows, f.ambient().rank(), "gens")?;
    f.ambient().subobject_from_columns(&m).map_err(lib_err)
}

fn cmd_validate(inst: &instance::FiltrationInstance) -> Result<Outcome, CliError> {
    let f = instance::filtration(inst, "instance")?;
    let rep = f.validate();
    let checks = if rep.ok() {
        vec![Check::pass("valid")]
    } else {
        let violations: Vec<Value> =
            rep.violations.iter().map(|v| Value::String(v.to_string())).collect();
        vec![Check::fail("valid", Value::Array(violations))]
    };
    Ok((
        json!({"sigma": f.sigma(), "valid": rep.ok()}),
        json!({"filtration": report::filtration(&f)}),
        checks,
    ))
}

fn cmd_factors(inst: &instance::FiltrationInstance) -> Result<Outcome, CliError> {
    let f = instance::filtration(inst, "instance")?;
    let factors = f.factors().map_err(lib_err)?;
    let list: Vec<Value> = factors.iter().map(report::factors_value).collect();
    Ok((json!({"factors": list}), json!({}), vec![Check::pass("valid")]))
}

fn cmd_refine(inst: &instance::FiltrationInstance) -> Result<Outcome, CliError> {
    let f = instance::filtration(inst, "instance")?;
    let parts_spec = inst
        .parts
        .as_ref()
        .ok_or_else(|| CliError::Malformed("refine needs a 'parts' array".into()))?;
    let mut parts = Vec::with_capacity(parts_spec.len());
    for (i, p) in parts_spec.iter().enumerate() {
        parts.push(instance::filtration(p, &format!("instance.parts[{i}]"))?);
    }
    let refined = f.refine(&parts).map_err(lib_err)?;
    let check = if refined.validate().ok() {
        Check::pass("refined_validates")
    } else {
        Check::fail("refined_validates", Value::Null)
    };
    Ok((
        json!({"sigma": refined.sigma()}),
        json!({"refined": report::filtration(&refined)}),
        vec![check],
    ))
}

fn cmd_verify_hill(
    inst: &instance::FiltrationInstance,
    opts: &Options,
) -> Result<Outcome, CliError> {
    let f = instance::filtration(inst, "instance")?;
    let ctx = HillContext::new(&f).map_err(lib_err)?;
    let rep = ctx.verify_hill(opts.exhaustive_bound, opts.seed).map_err(lib_err)?;
    let mut checks = Vec::new();
    for (name, outcome) in rep.checks() {
        checks.push(match outcome {
            CheckResult::Pass => Check::pass(name),
            CheckResult::Fail(msg) => Check::fail(name, Value::String(msg.clone())),
        });
    }
    let result = json!({
        "exhaustive": rep.exhaustive,
        "census": rep.census,
        "notes": rep.notes,
    });
    Ok((result, json!({}), checks))
}

fn cmd_closed(
    inst: &instance::FiltrationInstance,
    req: &Request,
) -> Result<Outcome, CliError> {
    let f = instance::filtration(inst, "instance")?;
    let ctx = HillContext::new(&f).map_err(lib_err)?;
    let set = need_set(&req.set, "set")?;
    let closed = ctx.is_closed(&set).map_err(lib_err)?;
    Ok((
        json!({"closed": closed, "set": report::index_set(&set)}),
        json!({}),
        Vec::new(),
    ))
}

fn cmd_ell(
    inst: &instance::FiltrationInstance,
    req: &Request,
) -> Result<Outcome, CliError> {
    let f = instance::filtration(inst, "instance")?;
    let ctx = HillContext::new(&f).map_err(lib_err)?;
    let set = need_set(&req.set, "set")?;
    let ell = ctx.ell(&set).map_err(lib_err)?;
    Ok((
        json!({"ell": report::subobject(&ell), "set": report::index_set(&set)}),
        json!({}),
        Vec::new(),
    ))
}

fn cmd_hull(
    inst: &instance::FiltrationInstance,
    req: &Request,
) -> Result<Outcome, CliError> {
    let f = instance::filtration(inst, "instance")?;
    let ctx = HillContext::new(&f).map_err(lib_err)?;
    let hull = match (&req.set, &req.gens) {
        (Some(text), None) => ctx.hull(&instance::index_set(text)?).map_err(lib_err)?,
        (None, Some(_)) => {
            let y = seed_subobject(&f, req)?;
            ctx.hull_of_subobject(&y).map_err(lib_err)?
        }
        _ => {
            return Err(CliError::Malformed(
                "hull needs exactly one of --set or --gens".into(),
            ))
        }
    };
    let closed = ctx.is_closed(&hull).map_err(lib_err)?;
    let check = if closed {
        Check::pass("hull_is_closed")
    } else {
        Check::fail("hull_is_closed", report::index_set(&hull))
    };
    let ell = ctx.ell(&hull).map_err(lib_err)?;
    Ok((
        json!({"ell": report::subobject(&ell), "hull": report::index_set(&hull)}),
        json!({}),
        vec![check],
    ))
}

fn cmd_h3(
    inst: &instance::FiltrationInstance,
    req: &Request,
) -> Result<Outcome, CliError> {
    let f = instance::filtration(inst, "instance")?;
    let ctx = HillContext::new(&f).map_err(lib_err)?;
    let s = need_set(&req.s, "s")?;
    let t = need_set(&req.t, "t")?;
    let ind = ctx.induced_filtration(&s, &t).map_err(lib_err)?;
    let step_of: Value = Value::Object(
        ind.step_of
            .iter()
            .map(|(&a, &i)| (a.to_string(), json!(i)))
            .collect(),
    );
    let check = conservation_check(
        &ind.filtration,
        &f,
        &t.difference(&s).copied().collect::<Vec<_>>(),
    )?;
    let result = json!({
        "object": report::factors_value(&ind.presentation.object().invariants()),
        "step_of": step_of,
    });
    Ok((
        result,
        json!({"filtration": report::filtration(&ind.filtration)}),
        vec![check],
    ))
}

/// Factor multiset of `got` must equal the original factors at `indices`,
/// zero factors dropped on both sides.
fn conservation_check(
    got: &Filtration,
    original: &Filtration,
    indices: &[usize],
) -> Result<Check, CliError> {
    let mut lhs: Vec<InvariantFactors> =
        got.factors().map_err(lib_err)?.into_iter().filter(|x| !x.is_zero()).collect();
    let mut rhs = Vec::new();
    for &a in indices {
        let q = quotient_type(original.step(a + 1), original.step(a)).map_err(lib_err)?;
        if !q.is_zero() {
            rhs.push(q);
        }
    }
    lhs.sort();
    rhs.sort();
    Ok(if lhs == rhs {
        Check::pass("factors_conserved")
    } else {
        Check::fail(
            "factors_conserved",
            json!({
                "induced": lhs.iter().map(report::factors_value).collect::<Vec<_>>(),
                "original": rhs.iter().map(report::factors_value).collect::<Vec<_>>(),
            }),
        )
    })
}

fn cmd_kaplansky(
    inst: &instance::FiltrationInstance,
    req: &Request,
) -> Result<Outcome, CliError> {
    let f = instance::filtration(inst, "instance")?;
    let ctx = HillContext::new(&f).map_err(lib_err)?;
    let y = seed_subobject(&f, req)?;
    let kw = ctx.kaplansky_witness(&y).map_err(lib_err)?;
    let mut checks = Vec::new();
    checks.push(if y.leq(&kw.w).map_err(lib_err)? {
        Check::pass("seed_trapped")
    } else {
        Check::fail("seed_trapped", Value::Null)
    });
    let hull_vec: Vec<usize> = kw.hull.iter().copied().collect();
    let rest: Vec<usize> =
        (0..f.sigma()).filter(|a| !kw.hull.contains(a)).collect();
    checks.push(conservation_check(&kw.inside.filtration, &f, &hull_vec)?);
    checks.push(conservation_check(&kw.quotient.filtration, &f, &rest)?);
    let result = json!({
        "hull": report::index_set(&kw.hull),
        "w": report::subobject(&kw.w),
    });
    let certificates = json!({
        "inside": report::filtration(&kw.inside.filtration),
        "quotient": report::filtration(&kw.quotient.filtration),
    });
    Ok((result, certificates, checks))
}

fn cmd_relength(inst: &instance::FiltrationInstance) -> Result<Outcome, CliError> {
    let f = instance::filtration(inst, "instance")?;
    let ctx = HillContext::new(&f).map_err(lib_err)?;
    let lv = levels(&ctx).map_err(lib_err)?;
    let cert = rebound(&ctx).map_err(lib_err)?;
    let decomposition: Vec<Value> = cert
        .decomposition
        .iter()
        .map(|d| {
            json!({
                "level": d.level,
                "indices": d.indices,
                "factor": report::factors_value(&d.new_factor),
            })
        })
        .collect();
    let result = json!({
        "lev": lv.lev,
        "new_length": lv.new_length(),
    });
    let certificates = json!({
        "decomposition": decomposition,
        "filtration": report::filtration(&cert.filtration),
    });
    Ok((result, certificates, vec![Check::pass("certificate")]))
}

fn cmd_summand(
    inst: &instance::FiltrationInstance,
    opts: &Options,
) -> Result<Outcome, CliError> {
    let f = instance::filtration(inst, "instance")?;
    let proj = inst
        .projections
        .as_ref()
        .ok_or_else(|| CliError::Malformed("summand needs a 'projections' object".into()))?;
    let amb = f.ambient().clone();
    let n = amb.rank();
    let px = Homomorphism::new(
        amb.clone(),
        amb.clone(),
        instance::matrix(&proj.x, n, n, "projections.x")?,
    )
    .map_err(lib_err)?;
    let py = Homomorphism::new(
        amb.clone(),
        amb.clone(),
        instance::matrix(&proj.y, n, n, "projections.y")?,
    )
    .map_err(lib_err)?;
    let ctx = HillContext::new(&f).map_err(lib_err)?;
    let sf = ctx.summand_filtration(&px, &py, opts.iteration_cap).map_err(lib_err)?;
    let mut checks = Vec::new();
    checks.push(if sf.chain.validate().ok() {
        Check::pass("chain_validates")
    } else {
        Check::fail("chain_validates", Value::Null)
    });
    checks.push(if sf.summand.validate().ok() {
        Check::pass("summand_validates")
    } else {
        Check::fail("summand_validates", Value::Null)
    });
    let closed: Vec<Value> = sf.closed_sets.iter().map(report::index_set).collect();
    let result = json!({"closed_sets": closed});
    let certificates = json!({
        "chain": report::filtration(&sf.chain),
        "summand": report::filtration(&sf.summand),
    });
    Ok((result, certificates, checks))
}

fn cmd_intersect(
    inst: &instance::FiltrationInstance,
    opts: &Options,
) -> Result<Outcome, CliError> {
    let f = instance::filtration(inst, "instance")?;
    let others_spec = inst
        .others
        .as_ref()
        .ok_or_else(|| CliError::Malformed("intersect needs an 'others' array".into()))?;
    let mut filtrations = vec![f];
    for (i, o) in others_spec.iter().enumerate() {
        filtrations.push(instance::filtration(o, &format!("instance.others[{i}]"))?);
    }
    let mut ctxs = Vec::with_capacity(filtrations.len());
    for f in &filtrations {
        ctxs.push(HillContext::new(f).map_err(lib_err)?);
    }
    let refs: Vec<&HillContext> = ctxs.iter().collect();
    let res = intersection_filtration(&refs, opts.iteration_cap).map_err(lib_err)?;
    let all_fixed = res.fixpoint_certificates.iter().flatten().all(|&b| b);
    let check = if all_fixed {
        Check::pass("fixpoints")
    } else {
        Check::fail("fixpoints", json!(res.fixpoint_certificates))
    };
    let result = json!({"sigma": res.filtration.sigma()});
    let certificates = json!({
        "filtration": report::filtration(&res.filtration),
        "fixpoints": res.fixpoint_certificates,
    });
    Ok((result, certificates, vec![check]))
}

fn cmd_cone(inst: &instance::MapInstance) -> Result<Outcome, CliError> {
    let f = instance::chain_map(inst, "instance")?;
    let (c, seq) = cone(&f).map_err(lib_err)?;
    let exact = match seq.verify_exact() {
        Ok(()) => Check::pass("exact"),
        Err(e) => Check::fail("exact", Value::String(e.to_string())),
    };
    let split = match is_cs_split(&seq).map_err(lib_err)? {
        Some(_) => Check::pass("componentwise_split"),
        None => Check::fail("componentwise_split", Value::Null),
    };
    Ok((json!({"cone": report::complex(&c)}), json!({}), vec![exact, split]))
}

fn cmd_homotopic(inst: &instance::MapInstance) -> Result<Outcome, CliError> {
    let f = instance::chain_map(inst, "instance")?;
    let mut checks = Vec::new();
    let (result, certificates) = match null_homotopy(&f).map_err(lib_err)? {
        Some(h) => {
            checks.push(if h.verify(&f).map_err(lib_err)? {
                Check::pass("homotopy_verifies")
            } else {
                Check::fail("homotopy_verifies", Value::Null)
            });
            (
                json!({"null_homotopic": true}),
                json!({"homotopy": report::homotopy(&h)}),
            )
        }
        None => (json!({"null_homotopic": false}), json!({"homotopy": null})),
    };
    Ok((result, certificates, checks))
}

fn cmd_ext1cs(inst: &instance::MapInstance) -> Result<Outcome, CliError> {
    let z = instance::complex(&inst.source, "instance.source")?;
    let x = instance::complex(&inst.target, "instance.target")?;
    let ext = ext1_cs(&z, &x).map_err(lib_err)?;
    Ok((json!({"ext1_cs": report::factors_value(&ext)}), json!({}), Vec::new()))
}

fn cmd_homology(
    inst: &instance::ComplexInstance,
    req: &Request,
) -> Result<Outcome, CliError> {
    let x = instance::complex(inst, "instance")?;
    let result = match req.degree {
        Some(n) => {
            json!({n.to_string(): report::factors_value(&homology(&x, n).map_err(lib_err)?)})
        }
        None => {
            let mut out = serde_json::Map::new();
            if !x.is_zero_complex() {
                for n in x.degrees() {
                    out.insert(
                        n.to_string(),
                        report::factors_value(&homology(&x, n).map_err(lib_err)?),
                    );
                }
            }
            Value::Object(out)
        }
    };
    Ok((result, json!({}), Vec::new()))
}

fn chains_from(
    specs: &Option<Vec<Option<instance::FiltrationInstance>>>,
    count: usize,
    what: &str,
) -> Result<Vec<Option<Filtration>>, CliError> {
    match specs {
        None => Ok(vec![None; count]),
        Some(list) => {
            if list.len() != count {
                return Err(CliError::Malformed(format!(
                    "{what}: {} entries for {count} degrees",
                    list.len()
                )));
            }
            let mut out = Vec::with_capacity(count);
            for (i, spec) in list.iter().enumerate() {
                out.push(match spec {
                    None => None,
                    Some(s) => Some(instance::filtration(s, &format!("{what}[{i}]"))?),
                });
            }
            Ok(out)
        }
    }
}

fn complex_filtration_report(
    cf: &hillcalc::ComplexFiltration,
) -> Result<Outcome, CliError> {
    let mut checks = Vec::new();
    checks.push(match cf.validate() {
        Ok(()) => Check::pass("filtration_validates"),
        Err(e) => Check::fail("filtration_validates", Value::String(e.to_string())),
    });
    let x = cf.complex();
    let mut steps = Vec::new();
    for i in 0..=cf.sigma() {
        let mut row = serde_json::Map::new();
        for n in x.degrees() {
            row.insert(n.to_string(), report::subobject(&cf.step_component(i, n)));
        }
        steps.push(Value::Object(row));
    }
    let mut factors = Vec::new();
    for i in 0..cf.sigma() {
        factors.push(report::complex(&cf.factor_complex(i).map_err(lib_err)?));
    }
    let result = json!({"sigma": cf.sigma()});
    let certificates = json!({
        "factor_complexes": factors,
        "steps": steps,
    });
    Ok((result, certificates, checks))
}

fn cmd_cpxfilt(inst: &instance::ComplexInstance) -> Result<Outcome, CliError> {
    let x = instance::complex(inst, "instance")?;
    let count = if x.is_zero_complex() { 0 } else { x.degrees().count() };
    let chains = chains_from(&inst.component_filtrations, count, "component_filtrations")?;
    let cf = cpx_filtration(&x, &chains).map_err(lib_err)?;
    complex_filtration_report(&cf)
}

fn cmd_tildefilt(
    inst: &instance::ComplexInstance,
    opts: &Options,
) -> Result<Outcome, CliError> {
    let x = instance::complex(inst, "instance")?;
    let count = if x.is_zero_complex() { 0 } else { x.degrees().count() };
    let chains = chains_from(&inst.cycle_filtrations, count, "cycle_filtrations")?;
    let cf = tilde_filtration(&x, &chains, opts.iteration_cap).map_err(lib_err)?;
    let (result, certificates, mut checks) = complex_filtration_report(&cf)?;
    for i in 0..cf.sigma() {
        let fc = cf.factor_complex(i).map_err(lib_err)?;
        let ok = hillcalc::is_acyclic(&fc).map_err(lib_err)?;
        checks.push(if ok {
            Check::pass(&format!("factor_{i}_acyclic"))
        } else {
            Check::fail(&format!("factor_{i}_acyclic"), Value::Null)
        });
    }
    Ok((result, certificates, checks))
}
