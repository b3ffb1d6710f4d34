//! Fixture files in, reports out: the library behind the `dgforge` binary.

pub mod build;
pub mod fixture;
pub mod pipelines;
pub mod report;

use dgforge_core::exec::Exec;
use serde_json::Value;

pub use build::{build_env, Diagnostic, Env};
pub use fixture::{FixtureFile, PipelineRequest, PIPELINES, SCHEMA};
pub use report::{Report, RequestReport, Table};

/// Problems with the input itself, as opposed to a failed check.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Syntax(String),
    #[error("schema error in {location}: {message}")]
    Schema { location: String, message: String },
    #[error("invalid fixture:\n{list}", list = .0.iter().map(|d| format!("  {d}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Diagnostic>),
    #[error("unknown pipeline `{0}`; available: {list}", list = PIPELINES.join(", "))]
    UnknownPipeline(String),
    #[error("pipeline `{0}` does not support tracing; use hull or lift")]
    NoTrace(String),
    #[error("the fixture has no `{0}` requests")]
    NoRequests(String),
}

const SECTIONS: [&str; 7] = ["algebras", "morphisms", "modules", "towers", "quivers", "quiver_modules", "pipelines"];

/// Names the first section entry that fails to deserialize on its own.
fn locate(value: &Value) -> Option<(String, String, String)> {
    fn check<T: serde::de::DeserializeOwned>(v: &Value) -> Option<String> {
        serde_json::from_value::<T>(v.clone()).err().map(|e| e.to_string())
    }
    let obj = value.as_object()?;
    for s in SECTIONS {
        let Some(section) = obj.get(s) else { continue };
        let entries: Vec<(String, &Value)> = match section {
            Value::Object(m) => m.iter().map(|(k, v)| (k.clone(), v)).collect(),
            Value::Array(a) => a.iter().enumerate().map(|(k, v)| (k.to_string(), v)).collect(),
            _ => return Some((s.to_string(), String::new(), "section has the wrong shape".into())),
        };
        for (name, v) in entries {
            let err = match s {
                "algebras" => check::<fixture::AlgebraSpec>(v),
                "morphisms" => check::<fixture::MorphismSpec>(v),
                "modules" => check::<fixture::FiltModuleSpec>(v),
                "towers" => check::<fixture::TowerSpec>(v),
                "quivers" => check::<fixture::QuiverSpec>(v),
                "quiver_modules" => check::<fixture::QuiverModuleSpec>(v),
                _ => check::<PipelineRequest>(v),
            };
            if let Some(e) = err {
                return Some((s.to_string(), name, e));
            }
        }
    }
    None
}

/// Parses fixture text, reporting syntax and schema errors with line numbers.
pub fn parse_fixture(text: &str) -> Result<FixtureFile, CliError> {
    let value: Value = serde_json::from_str(text).map_err(|e| CliError::Syntax(format!("invalid JSON: {e}")))?;
    match serde_json::from_str::<FixtureFile>(text) {
        Ok(f) => Ok(f),
        Err(e) => {
            let at = format!("line {} column {}", e.line(), e.column());
            let (location, message) = match locate(&value) {
                Some((s, n, m)) if n.is_empty() => (format!("section `{s}` ({at})"), m),
                Some((s, n, m)) => (format!("section `{s}`, entry `{n}` ({at})"), m),
                None => (format!("the file header ({at})"), e.to_string()),
            };
            Err(CliError::Schema { location, message })
        }
    }
}

fn checked_env(text: &str) -> Result<(FixtureFile, Env), CliError> {
    let file = parse_fixture(text)?;
    let env = build_env(&file);
    let diags = env.diagnostics();
    if diags.is_empty() {
        Ok((file, env))
    } else {
        Err(CliError::Invalid(diags))
    }
}

/// Checks every entry without running pipelines. Construction problems
/// become a failing report; only unparsable input is an error.
pub fn validate_fixture(text: &str) -> Result<Report, CliError> {
    let file = parse_fixture(text)?;
    let env = build_env(&file);
    let mut table = Table::new("checks", &["section", "entry", "ok", "message"]);
    let mut witness = None;
    for (section, name, err) in &env.checks {
        table.push(vec![
            Value::from(section.as_str()),
            Value::from(name.as_str()),
            Value::from(err.is_none()),
            err.as_deref().map_or(Value::Null, Value::from),
        ]);
        if let (None, Some(e)) = (&witness, err) {
            witness = Some(format!("section `{section}`, entry `{name}`: {e}"));
        }
    }
    let mut req = RequestReport { subject: "fixture".into(), passed: witness.is_none(), ..Default::default() };
    req.values.insert("sections".into(), Value::from(file.section_count()));
    req.values.insert("entries".into(), Value::from(env.checks.len()));
    req.tables.push(table);
    req.witness = witness;
    Ok(Report::new("validate", vec![req]))
}

fn requests<'a>(file: &'a FixtureFile, pipeline: &str) -> Result<Vec<(usize, &'a PipelineRequest)>, CliError> {
    if !PIPELINES.contains(&pipeline) {
        return Err(CliError::UnknownPipeline(pipeline.into()));
    }
    let reqs: Vec<_> = file.pipelines.iter().enumerate().filter(|(_, r)| r.name() == pipeline).collect();
    if reqs.is_empty() {
        return Err(CliError::NoRequests(pipeline.into()));
    }
    Ok(reqs)
}

/// Runs every request of the named pipeline, concurrently, reporting in input order.
pub fn run_pipeline(text: &str, pipeline: &str) -> Result<Report, CliError> {
    let (file, env) = checked_env(text)?;
    let reqs = requests(&file, pipeline)?;
    let out = Exec::Parallel.map(&reqs, |(i, r)| pipelines::run_request(&env, *i, r, None));
    Ok(Report::new(pipeline, out))
}

/// Per-request traces of a hull or lift run, each possibly empty.
pub fn request_traces(text: &str, pipeline: &str) -> Result<Vec<(RequestReport, String)>, CliError> {
    if PIPELINES.contains(&pipeline) && !matches!(pipeline, "hull" | "lift") {
        return Err(CliError::NoTrace(pipeline.into()));
    }
    let (file, env) = checked_env(text)?;
    let reqs = requests(&file, pipeline)?;
    Ok(Exec::Parallel.map(&reqs, |(i, r)| {
        let mut buf = String::new();
        let rep = pipelines::run_request(&env, *i, r, Some(&mut buf));
        (rep, buf)
    }))
}

/// The step-by-step trace as text, one block per request.
pub fn emit_trace(text: &str, pipeline: &str) -> Result<String, CliError> {
    let mut out = String::new();
    for (rep, body) in request_traces(text, pipeline)? {
        out.push_str(&format!("# request {}: {}\n", rep.index, rep.subject));
        if body.is_empty() {
            out.push_str("(no steps)\n");
        }
        out.push_str(&body);
    }
    Ok(out)
}
