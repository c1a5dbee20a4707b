//! Report shape and exit code behavior on inputs the acceptance suite
//! doesn't exercise: failing checks, mixed batches, wrong instance kinds.

use std::process::Command;

use serde_json::Value;

fn tmp(name: &str, content: &str) -> String {
    let dir = env!("CARGO_TARGET_TMPDIR");
    std::fs::create_dir_all(dir).unwrap();
    let path = format!("{dir}/{name}");
    std::fs::write(&path, content).unwrap();
    path
}

fn run(args: &[&str]) -> (Value, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_hillcalc"))
        .args(args)
        .output()
        .expect("binary runs");
    let code = out.status.code().expect("terminated by signal");
    let report = serde_json::from_slice(&out.stdout).expect("report is JSON");
    (report, code)
}

const DESCENDING: &str = r#"{
  "kind": "filtration",
  "ambient": { "rank": 1, "relations": [["8"]] },
  "steps": [[], [["2"]], [["4"]], [["1"]]]
}"#;

#[test]
fn failed_validation_is_exit_one_with_counterexample() {
    let file = tmp("descending.json", DESCENDING);
    let (report, code) = run(&["validate", &file]);
    assert_eq!(code, 1);
    assert_eq!(report["result"]["valid"], false);
    let check = &report["checks"]["valid"];
    assert_eq!(check["pass"], false);
    assert!(
        !check["counterexample"].as_array().unwrap().is_empty(),
        "failed check must carry a counterexample"
    );
}

#[test]
fn batch_keeps_input_order_and_escalates_exit_code() {
    let batch = format!(
        r#"{{
  "kind": "batch",
  "items": [
    {{
      "command": "validate",
      "instance": {{
        "kind": "filtration",
        "ambient": {{ "rank": 1, "relations": [["8"]] }},
        "steps": [[], [["1"]]]
      }}
    }},
    {{ "command": "validate", "instance": {} }},
    {{
      "command": "validate",
      "instance": {{
        "kind": "filtration",
        "ambient": {{ "rank": 1, "relations": [["8"]] }},
        "steps": [[], [["x"]]]
      }}
    }}
  ]
}}"#,
        DESCENDING
    );
    let file = tmp("mixed_batch.json", &batch);
    let (report, code) = run(&["batch", &file]);
    assert_eq!(code, 2, "worst item exit code wins");
    let items = report["items"].as_array().unwrap();
    assert_eq!(items.len(), 3);
    assert!(items[0]["instance"].as_str().unwrap().ends_with("#0"));
    assert_eq!(items[0]["checks"]["valid"]["pass"], true);
    assert!(items[1]["instance"].as_str().unwrap().ends_with("#1"));
    assert_eq!(items[1]["checks"]["valid"]["pass"], false);
    assert!(items[2]["instance"].as_str().unwrap().ends_with("#2"));
    assert!(items[2]["error"].as_str().unwrap().contains("steps[1]"));
}

#[test]
fn wrong_instance_kind_is_exit_two() {
    let file = tmp(
        "just_a_filtration.json",
        r#"{
  "kind": "filtration",
  "ambient": { "rank": 1, "relations": [["8"]] },
  "steps": [[], [["1"]]]
}"#,
    );
    let (report, code) = run(&["homotopic", &file]);
    assert_eq!(code, 2);
    assert!(report["error"].as_str().unwrap().contains("map instance"));
}

#[test]
fn hull_rejects_ambiguous_seed_flags() {
    let file = tmp(
        "hull_seed.json",
        r#"{
  "kind": "filtration",
  "ambient": { "rank": 1, "relations": [["8"]] },
  "steps": [[], [["1"]]],
  "witnesses": [[["1"]]]
}"#,
    );
    let (_, both) = run(&["hull", &file, "--set", "0", "--gens", r#"[["4"]]"#]);
    assert_eq!(both, 2);
    let (report, code) = run(&["hull", &file, "--gens", r#"[["4"]]"#]);
    assert_eq!(code, 0);
    assert_eq!(report["checks"]["hull_is_closed"]["pass"], true);
}
