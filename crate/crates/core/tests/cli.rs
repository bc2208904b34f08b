//! The `motif` binary: subcommands and exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn motif(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_motif")).args(args).output().unwrap()
}

fn corpus(f: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus").join(f).display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn config(dir: &Path, functions: &str, extra: &str) -> PathBuf {
    let text = format!(
        "run_id = \"cli\"\noutput_dir = \"{out}\"\n[subject]\nsources = [\"{a}\", \"{p}\"]\nheaders = [\"{h}\"]\n\
         functions = {functions}\n[fuzz]\nbudget_seconds = 2\nmax_execs = 200\n{extra}",
        out = dir.join("out").display(),
        a = corpus("arith.c"),
        p = corpus("planted.c"),
        h = corpus("corpus.h"),
    );
    let path = dir.join("c.toml");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn unknown_subcommand_is_usage_error() {
    let o = motif(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    assert_eq!(motif(&[]).status.code(), Some(1));
    assert_eq!(motif(&["--help"]).status.code(), Some(0));
}

#[test]
fn dry_run_prints_plan_and_runs_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), r#"["clamp_byte", "add"]"#, "");
    let o = motif(&["campaign", "--config", cfg.to_str().unwrap(), "--dry-run"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("clamp_byte: 39 mutants"), "{text}");
    assert!(text.contains("add: "));
    assert!(!dir.path().join("out").exists());

    let o = motif(&["campaign", "--config", cfg.to_str().unwrap(), "--dry-run", "--json"]);
    let plan: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(plan["functions"][0]["seed_files"], 3);
}

#[test]
fn missing_compiler_is_environment_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), r#"["add"]"#, "[build]\ncc = \"no-such-cc-motif\"\n");
    let o = motif(&["campaign", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn unknown_function_is_campaign_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), r#"["nowhere"]"#, "");
    let o = motif(&["campaign", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("nowhere"));
}

#[test]
fn campaign_then_report_and_compare() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), r#"["add"]"#, "");
    let o = motif(&["campaign", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let results = dir.path().join("out/results.ndjson");
    let lines = std::fs::read_to_string(&results).unwrap();
    assert!(lines.lines().count() > 0);

    let csv = dir.path().join("curve.csv");
    let o = motif(&["report", results.to_str().unwrap(), "--csv", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("mutation score"));
    assert!(std::fs::read_to_string(&csv).unwrap().starts_with("run_id,t_seconds,pct_killed\n"));

    let o = motif(&["report", "--compare", results.to_str().unwrap(), results.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let table = stdout(&o);
    assert!(table.contains("p_value") || table.contains("p-value"), "{table}");
}

#[test]
fn module_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let o = motif(&["parse", &corpus("corpus.h"), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["layouts"]["T_POS"]["size"], 8056);

    let o = motif(&["mutate", &corpus("planted.c"), "--function", "add", "--operators", "AOR", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["mutants"].as_array().unwrap().len(), 4);

    let out = dir.path().join("drv");
    let o = motif(&["drivers", &corpus("corpus.h"), &corpus("buffers.c"), "--function", "trim", "--length", "s=16",
        "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["fuzz_driver.c", "fp_driver.c", "test_driver.c", "motif_runtime.h", "motif_runtime.c"] {
        assert!(out.join(f).exists(), "{f}");
    }

    let seeds = dir.path().join("seeds");
    let o = motif(&["seeds", &corpus("corpus.h"), &corpus("tpos.c"), "--function", "T_POS_IsConstraintValid",
        "--out", seeds.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read(seeds.join("seed_2")).unwrap().len(), 8060);

    let o = motif(&["probe", &corpus("corpus.h")]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}
