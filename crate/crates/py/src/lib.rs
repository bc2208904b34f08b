//! Python module `motif`. Structured results are returned as JSON text.

use std::path::Path;

use ::motif as core;
use core::c_model::{parse_declarations, AbiProfile, ParseConfig, TypeEnvironment};
use core::campaign::{plan_campaign, run_campaign, summarize, CampaignConfig};
use core::driver_synth::{gen_false_positive_driver, gen_fuzzing_driver, gen_test_driver, DriverSpec, PointerLengths};
use core::fuzz::{Checkpoint, Termination};
use core::mutagen::{enumerate_sites, generate_mutants, Operator, SiteOptions};
use core::seedgen::{generate_seeds, SeedTable};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use std::collections::HashMap;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn env_of(declarations: &str) -> PyResult<TypeEnvironment> {
    Ok(parse_declarations(declarations, &ParseConfig::default()).map_err(err)?.env)
}

fn spec(declarations: &str, function: &str, lengths: Option<HashMap<String, u64>>) -> PyResult<DriverSpec> {
    let env = env_of(declarations)?;
    let sig = env.signatures.get(function).cloned().ok_or_else(|| err(format!("no declaration of `{function}`")))?;
    let mut spec = DriverSpec::new(sig, env);
    spec.lengths = PointerLengths { lengths: lengths.unwrap_or_default().into_iter().collect(), ..Default::default() };
    Ok(spec)
}

/// Type environment and diagnostics of `declarations` as JSON.
#[pyfunction]
fn parse(declarations: &str) -> PyResult<String> {
    let parsed = parse_declarations(declarations, &ParseConfig::default()).map_err(err)?;
    let diagnostics: Vec<String> = parsed.diagnostics.iter().map(ToString::to_string).collect();
    Ok(serde_json::json!({ "environment": parsed.env, "diagnostics": diagnostics }).to_string())
}

/// Seed file contents for `function`.
#[pyfunction]
#[pyo3(signature = (declarations, function, lengths=None))]
fn seeds(declarations: &str, function: &str, lengths: Option<HashMap<String, u64>>) -> PyResult<Vec<Vec<u8>>> {
    let s = spec(declarations, function, lengths)?;
    let files = generate_seeds(&s.signature, &s.env, &AbiProfile::lp64(), &s.lengths, &SeedTable::default()).map_err(err)?;
    Ok(files.into_iter().map(|f| f.bytes).collect())
}

/// Fuzzing, false-positive and test driver sources.
#[pyfunction]
#[pyo3(signature = (declarations, function, lengths=None))]
fn drivers(declarations: &str, function: &str, lengths: Option<HashMap<String, u64>>) -> PyResult<(String, String, String)> {
    let s = spec(declarations, function, lengths)?;
    Ok((
        gen_fuzzing_driver(&s).map_err(err)?.source,
        gen_false_positive_driver(&s).map_err(err)?.source,
        gen_test_driver(&s).map_err(err)?.source,
    ))
}

/// Mutants of `function` as `(id, operator, original, replacement, source)`.
#[pyfunction]
#[pyo3(signature = (source, function, operators=None))]
fn mutants(source: &str, function: &str, operators: Option<Vec<String>>) -> PyResult<Vec<(u32, String, String, String, String)>> {
    let ops: Vec<Operator> = match operators {
        Some(list) => list.iter().map(|o| o.parse()).collect::<Result<_, _>>().map_err(err)?,
        None => Operator::ALL.to_vec(),
    };
    let env = env_of(source)?;
    let opts = SiteOptions::from_env(&env, env.signatures.get(function));
    let sites = enumerate_sites("input.c", source, function, &ops, &opts).map_err(err)?;
    Ok(generate_mutants(source, &sites)
        .map_err(err)?
        .into_iter()
        .map(|m| (m.id, m.operator.to_string(), m.original_token, m.replacement_token, m.mutated_source))
        .collect())
}

/// Hit-count class label of `count`.
#[pyfunction]
fn bucketize(count: u32) -> &'static str {
    core::fuzz::bucketize(count).label()
}

/// Verdict for a run. `termination` is `exit`, `signal` or `timeout`.
#[pyfunction]
fn classify(termination: &str, code: i32, trace: Vec<String>) -> PyResult<String> {
    let t = match termination {
        "exit" => Termination::Exit(code),
        "signal" => Termination::Signal(code),
        "timeout" => Termination::Timeout,
        other => return Err(err(format!("unknown termination `{other}`"))),
    };
    let trace: Vec<Checkpoint> =
        trace.iter().map(|s| Checkpoint::parse(s).ok_or_else(|| err(format!("unknown checkpoint `{s}`")))).collect::<Result<_, _>>()?;
    let v = core::fuzz::classify(&t, &trace);
    Ok(serde_json::to_value(v).map_err(err)?.as_str().unwrap_or_default().to_string())
}

/// Two-sided Fisher exact test on the table `[[a, b], [c, d]]`.
#[pyfunction]
fn fisher_exact(a: u64, b: u64, c: u64, d: u64) -> f64 {
    core::campaign::fisher_exact(a, b, c, d)
}

/// Campaign plan for the configuration file, as JSON.
#[pyfunction]
fn plan(config: &str) -> PyResult<String> {
    let cfg = CampaignConfig::load(Path::new(config)).map_err(err)?;
    serde_json::to_string(&plan_campaign(&cfg).map_err(err)?).map_err(err)
}

/// Run the campaign and return its summary as JSON.
#[pyfunction]
fn campaign(config: &str) -> PyResult<String> {
    let cfg = CampaignConfig::load(Path::new(config)).map_err(err)?;
    let outcome = run_campaign(&cfg).map_err(err)?;
    Ok(serde_json::json!({ "report": summarize(&outcome.records), "errors": outcome.errors }).to_string())
}

#[pymodule]
#[pyo3(name = "motif")]
fn motif_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(parse, m)?)?;
    m.add_function(wrap_pyfunction!(seeds, m)?)?;
    m.add_function(wrap_pyfunction!(drivers, m)?)?;
    m.add_function(wrap_pyfunction!(mutants, m)?)?;
    m.add_function(wrap_pyfunction!(bucketize, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(fisher_exact, m)?)?;
    m.add_function(wrap_pyfunction!(plan, m)?)?;
    m.add_function(wrap_pyfunction!(campaign, m)?)?;
    Ok(())
}
