use std::path::PathBuf;
use std::process::Command;

use dgforge_cli::{emit_trace, parse_fixture, request_traces, run_pipeline, validate_fixture, CliError, SCHEMA};
use serde_json::Value;

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_dir().join(name)).unwrap()
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dgforge"))
}

const SHIPPED: [(&str, &str); 7] = [
    ("gamma5.json", "formality"),
    ("wsub.json", "formality"),
    ("p1q.json", "ext"),
    ("p1q.json", "hull"),
    ("lift.json", "lift"),
    ("tower.json", "tower"),
    ("tstructure.json", "tstructure"),
];

#[test]
fn shipped_fixtures_validate() {
    let mut seen = 0;
    for entry in std::fs::read_dir(fixture_dir()).unwrap() {
        let text = std::fs::read_to_string(entry.unwrap().path()).unwrap();
        let r = validate_fixture(&text).unwrap();
        assert!(r.passed, "{}", r.to_text());
        seen += 1;
    }
    assert_eq!(seen, 6);
}

#[test]
fn shipped_pipelines_pass_with_evidence() {
    for (file, p) in SHIPPED {
        let r = run_pipeline(&fixture(file), p).unwrap();
        assert!(r.passed, "{file} {p}: {}", r.to_text());
        for req in &r.requests {
            assert!(!req.tables.is_empty() && req.witness.is_none());
        }
    }
}

#[test]
fn gamma5_report_has_rank_tables() {
    let r = run_pipeline(&fixture("gamma5.json"), "formality").unwrap();
    let req = &r.requests[0];
    let inc = req.table("inclusion").unwrap();
    assert!(inc.rows.iter().all(|row| row[1] == row[2] && row[2] == row[3]));
    let coh: Vec<_> = req.table("cohomology").unwrap().rows.clone();
    assert_eq!(coh, vec![vec![serde_json::json!([0, 0]), 1.into()], vec![serde_json::json!([1, 1]), 1.into()]]);
}

#[test]
fn p1q_ext_dims() {
    let r = run_pipeline(&fixture("p1q.json"), "ext").unwrap();
    assert_eq!(r.requests[0].values["dims"], serde_json::json!([2, 2, 1]));
}

#[test]
fn impure_algebra_fails_with_bidegree() {
    let text = r#"{"version": 1, "algebras": {"g": {"builtin": "gamma5_impure"}},
        "pipelines": [{"pipeline": "formality", "algebra": "g"}]}"#;
    let r = run_pipeline(text, "formality").unwrap();
    assert!(!r.passed);
    assert_eq!(r.requests[0].values["counterexample"], serde_json::json!([1, 2]));
    let at = dgforge_core::grdalg::Bideg::new(1, 2).to_string();
    assert!(r.requests[0].witness.as_ref().unwrap().contains(&at));
}

#[test]
fn broken_idempotent_sum_names_the_algebra() {
    let text = fixture("wsub.json").replace(
        r#"{ "label": "e2", "value": { "e2": "1" } }"#,
        r#"{ "label": "e2", "value": { "e2": "1", "e1": "1" } }"#,
    );
    let r = validate_fixture(&text).unwrap();
    assert!(!r.passed);
    let w = r.requests[0].witness.as_ref().unwrap();
    assert!(w.contains("`algebras`") && w.contains("`wsub`"), "{w}");
}

#[test]
fn empty_file_has_no_sections() {
    let r = validate_fixture(r#"{"version": 1}"#).unwrap();
    assert!(!r.passed);
    assert!(r.requests[0].witness.as_ref().unwrap().contains("no sections"));
}

#[test]
fn malformed_section_reports_line_and_name() {
    let text = "{\n  \"version\": 1,\n  \"quivers\": {\n    \"q\": { \"vertices\": [\"x\"], \"arows\": [] }\n  }\n}\n";
    match parse_fixture(text) {
        Err(CliError::Schema { location, message }) => {
            assert!(location.contains("`quivers`") && location.contains("`q`"), "{location}");
            assert!(location.contains("line 4"), "{location}");
            assert!(message.contains("arows"), "{message}");
        }
        other => panic!("{other:?}"),
    }
    assert!(matches!(parse_fixture("{ not json"), Err(CliError::Syntax(_))));
}

#[test]
fn unknown_references_and_pipelines_are_input_errors() {
    let text = r#"{"version": 1, "pipelines": [{"pipeline": "hull", "module": "nope"}]}"#;
    assert!(matches!(run_pipeline(text, "hull"), Err(CliError::Invalid(_))));
    assert!(matches!(run_pipeline(&fixture("gamma5.json"), "bogus"), Err(CliError::UnknownPipeline(_))));
    assert!(matches!(run_pipeline(&fixture("gamma5.json"), "ext"), Err(CliError::NoRequests(_))));
    assert!(matches!(emit_trace(&fixture("gamma5.json"), "formality"), Err(CliError::NoTrace(_))));
}

#[test]
fn reports_are_deterministic() {
    for (file, p) in SHIPPED {
        let a = run_pipeline(&fixture(file), p).unwrap().to_json();
        let b = run_pipeline(&fixture(file), p).unwrap().to_json();
        assert_eq!(a, b, "{file} {p}");
    }
    assert_eq!(emit_trace(&fixture("p1q.json"), "hull").unwrap(), emit_trace(&fixture("p1q.json"), "hull").unwrap());
}

#[test]
fn hull_traces() {
    let traces = request_traces(&fixture("p1q.json"), "hull").unwrap();
    let by_subject = |s: &str| traces.iter().find(|(r, _)| r.subject == s).unwrap().1.clone();
    let lb = by_subject("b");
    assert_eq!(lb.lines().count(), 2);
    assert!(lb.starts_with("step 0: extend by L_s"));
    assert!(lb.contains("step 1: extend by L_b"));
    assert_eq!(by_subject("P_b"), "");
}

#[test]
fn lift_trace_lists_preimage_degrees() {
    let t = emit_trace(&fixture("lift.json"), "lift").unwrap();
    assert!(t.contains("entry (0,1): preimage in degree 2"), "{t}");
}

#[test]
fn refused_lift_fails_with_witness() {
    let text = fixture("lift.json").replace(r#""segment": [0, 1]"#, r#""segment": [0, 2]"#);
    let r = run_pipeline(&text, "lift").unwrap();
    assert!(!r.passed);
    assert!(r.requests[0].witness.as_ref().unwrap().starts_with("refused"));
    assert_eq!(r.requests[0].values["refused"], serde_json::json!({"r": 3, "needed": 4}));
}

#[test]
fn schema_is_json_and_names_sections() {
    let v: Value = serde_json::from_str(SCHEMA).unwrap();
    let props = v["properties"].as_object().unwrap();
    for s in ["version", "field", "algebras", "morphisms", "modules", "towers", "quivers", "quiver_modules", "pipelines"] {
        assert!(props.contains_key(s), "{s}");
    }
}

#[test]
fn binary_exit_codes() {
    let f = fixture_dir();
    let ok = bin().args(["validate"]).arg(f.join("gamma5.json")).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let run = bin().arg("run").arg(f.join("gamma5.json")).args(["--pipeline", "formality"]).output().unwrap();
    assert_eq!(run.status.code(), Some(0));
    let json: Value = serde_json::from_slice(&run.stdout).unwrap();
    assert_eq!(json["passed"], true);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("impure.json");
    std::fs::write(&bad, r#"{"version": 1, "algebras": {"g": {"builtin": "gamma5_impure"}}, "pipelines": [{"pipeline": "formality", "algebra": "g"}]}"#).unwrap();
    let fail = bin().arg("run").arg(&bad).args(["--pipeline", "formality"]).output().unwrap();
    assert_eq!(fail.status.code(), Some(1));

    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{\"version\": 1, \"algebras\": 3}").unwrap();
    let input = bin().arg("validate").arg(&broken).output().unwrap();
    assert_eq!(input.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&input.stderr).contains("`algebras`"));
    let unknown = bin().arg("run").arg(f.join("gamma5.json")).args(["--pipeline", "nope"]).output().unwrap();
    assert_eq!(unknown.status.code(), Some(2));

    let schema = bin().arg("schema").output().unwrap();
    assert_eq!(String::from_utf8(schema.stdout).unwrap(), SCHEMA);
}

#[test]
fn out_dir_variable_sets_default_output() {
    let dir = tempfile::tempdir().unwrap();
    let st = bin()
        .arg("run")
        .arg(fixture_dir().join("p1q.json"))
        .args(["--pipeline", "hull"])
        .env("DGFORGE_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(0));
    let written = std::fs::read_to_string(dir.path().join("p1q.hull.json")).unwrap();
    assert_eq!(written, run_pipeline(&fixture("p1q.json"), "hull").unwrap().to_json());
    assert!(String::from_utf8_lossy(&st.stdout).starts_with("hull: PASS"));
}
