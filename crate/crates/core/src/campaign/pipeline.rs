//! Per-function campaign: prepare, build, fuzz every kept mutant, record.

use std::collections::BTreeSet;
use std::fs::File;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::Duration;

use indexmap::IndexMap;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use wait_timeout::ChildExt;

use super::build::{write_runtime, Toolchain};
use super::config::CampaignConfig;
use super::records::{append_records, CampaignRecord, MutantVerdict};
use super::CampaignError;
use crate::c_model::{parse_declarations, ParseConfig, TypeEnvironment};
use crate::cbody::TokenizedSource;
use crate::driver_synth::{
    gen_false_positive_driver, gen_fuzzing_driver, gen_test_driver, CheckpointChannel, DriverSpec, GeneratedDriver,
};
use crate::fuzz::{classify, fuzz_mutant, FuzzConfig, FuzzError, Harness, KillOrigin};
use crate::instrument::instrument;
use crate::mutagen::{enumerate_sites, generate_mutants, tce_filter, Mutant, MutantStatus, SiteOptions, TceClass};
use crate::seedgen::{generate_seeds, write_seeds, SeedFile};

/// Everything derived from sources and configuration for one function,
/// before anything is compiled.
#[derive(Debug, Clone)]
pub struct PreparedFunction {
    pub function: String,
    pub source_path: PathBuf,
    pub source: String,
    pub env: TypeEnvironment,
    pub diagnostics: Vec<String>,
    pub spec: DriverSpec,
    pub fuzz_driver: GeneratedDriver,
    pub fp_driver: GeneratedDriver,
    pub test_driver: GeneratedDriver,
    pub seeds: Vec<SeedFile>,
    /// Mutants left after the denylist.
    pub mutants: Vec<Mutant>,
    pub denied: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionPlan {
    pub function: String,
    pub source: Option<PathBuf>,
    pub consumed_input_bytes: u64,
    pub seed_files: usize,
    pub mutants: usize,
    pub by_operator: IndexMap<String, usize>,
    pub denied: Vec<u32>,
    pub diagnostics: Vec<String>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignPlan {
    pub run_id: String,
    pub output_dir: PathBuf,
    pub results: PathBuf,
    pub budget_seconds: f64,
    pub max_execs: Option<u64>,
    pub workers: usize,
    pub tce_levels: Vec<String>,
    pub functions: Vec<FunctionPlan>,
    pub total_mutants: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CampaignOutcome {
    pub records: Vec<CampaignRecord>,
    /// Functions that could not be processed, with the reason.
    pub errors: Vec<String>,
}

struct Subject {
    sources: Vec<(PathBuf, String)>,
    headers: String,
}

fn read(path: &Path) -> Result<String, CampaignError> {
    std::fs::read_to_string(path).map_err(|e| CampaignError::Config(format!("cannot read {}: {e}", path.display())))
}

fn load_subject(cfg: &CampaignConfig) -> Result<Subject, CampaignError> {
    let sources = cfg.subject.sources.iter().map(|p| Ok((p.clone(), read(p)?))).collect::<Result<_, CampaignError>>()?;
    let mut headers = String::new();
    for h in &cfg.subject.headers {
        headers.push_str(&read(h)?);
        headers.push('\n');
    }
    Ok(Subject { sources, headers })
}

fn prepare(
    cfg: &CampaignConfig,
    subject: &Subject,
    function: &str,
    denylist: &BTreeSet<(String, u32)>,
) -> Result<PreparedFunction, CampaignError> {
    let (source_path, source) = subject
        .sources
        .iter()
        .find(|(_, text)| {
            TokenizedSource::new(text).map(|ts| ts.find_definition(function).is_ok()).unwrap_or(false)
        })
        .cloned()
        .ok_or_else(|| CampaignError::UnknownFunction(function.to_string()))?;
    let parsed = parse_declarations(&format!("{}\n{source}", subject.headers), &ParseConfig::default())?;
    let env = parsed.env;
    let sig = env.signatures.get(function).cloned().ok_or_else(|| CampaignError::UnknownFunction(function.to_string()))?;

    let mut spec = DriverSpec::new(sig.clone(), env.clone());
    spec.abi = cfg.abi().ok_or_else(|| CampaignError::Config(format!("unknown ABI `{}`", cfg.abi.profile)))?;
    spec.lengths = cfg.driver.lengths_for(function);
    spec.reset_snippet = cfg.driver.reset_snippet_for(function)?;
    spec.checkpoint_channel = cfg.driver.checkpoint_channel;
    spec.exclude_compare = cfg.driver.exclusions_for(function);

    let seeds = generate_seeds(&sig, &env, &spec.abi, &spec.lengths, &cfg.driver.seed_table())?;
    let opts = SiteOptions::from_env(&env, Some(&sig));
    let file = source_path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
    let sites = enumerate_sites(&file, &source, function, &cfg.mutation.operators, &opts)?;
    let (denied, mutants): (Vec<Mutant>, Vec<Mutant>) = generate_mutants(&source, &sites)?
        .into_iter()
        .partition(|m| denylist.contains(&(function.to_string(), m.id)));

    Ok(PreparedFunction {
        function: function.to_string(),
        fuzz_driver: gen_fuzzing_driver(&spec)?,
        fp_driver: gen_false_positive_driver(&spec)?,
        test_driver: gen_test_driver(&spec)?,
        source_path,
        source,
        env,
        diagnostics: parsed.diagnostics.iter().map(ToString::to_string).collect(),
        spec,
        seeds,
        mutants,
        denied: denied.iter().map(|m| m.id).collect(),
    })
}

/// Parse, generate drivers, seeds and mutants for `function` without
/// writing or compiling anything.
pub fn prepare_function(cfg: &CampaignConfig, function: &str) -> Result<PreparedFunction, CampaignError> {
    prepare(cfg, &load_subject(cfg)?, function, &cfg.denylist()?)
}

/// What a run would do. Nothing is written or compiled.
pub fn plan_campaign(cfg: &CampaignConfig) -> Result<CampaignPlan, CampaignError> {
    let subject = load_subject(cfg)?;
    let denylist = cfg.denylist()?;
    let mut functions = Vec::new();
    for f in &cfg.subject.functions {
        let plan = match prepare(cfg, &subject, f, &denylist) {
            Ok(p) => {
                let mut by_operator: IndexMap<String, usize> = IndexMap::new();
                for m in &p.mutants {
                    *by_operator.entry(m.operator.name().to_string()).or_default() += 1;
                }
                FunctionPlan {
                    function: f.clone(),
                    source: Some(p.source_path),
                    consumed_input_bytes: p.fuzz_driver.consumed_input_bytes,
                    seed_files: p.seeds.len(),
                    mutants: p.mutants.len(),
                    by_operator,
                    denied: p.denied,
                    diagnostics: p.diagnostics,
                    error: None,
                }
            }
            Err(e) => FunctionPlan {
                function: f.clone(),
                source: None,
                consumed_input_bytes: 0,
                seed_files: 0,
                mutants: 0,
                by_operator: IndexMap::new(),
                denied: Vec::new(),
                diagnostics: Vec::new(),
                error: Some(e.to_string()),
            },
        };
        functions.push(plan);
    }
    Ok(CampaignPlan {
        run_id: cfg.run_id.clone(),
        output_dir: cfg.output_dir.clone(),
        results: cfg.results_path(),
        budget_seconds: cfg.fuzz.budget_seconds,
        max_execs: cfg.fuzz.max_execs,
        workers: cfg.fuzz.workers,
        tce_levels: if cfg.build.tce { cfg.build.tce_levels.clone() } else { Vec::new() },
        total_mutants: functions.iter().map(|f| f.mutants).sum(),
        functions,
    })
}

pub fn render_plan(plan: &CampaignPlan) -> String {
    let mut out = format!(
        "run {} -> {}\nbudget {}s per mutant, {} worker(s){}\nequivalence levels: {}\n",
        plan.run_id,
        plan.results.display(),
        plan.budget_seconds,
        plan.workers,
        plan.max_execs.map(|n| format!(", at most {n} executions")).unwrap_or_default(),
        if plan.tce_levels.is_empty() { "off".to_string() } else { plan.tce_levels.join(",") },
    );
    for f in &plan.functions {
        match &f.error {
            Some(e) => out.push_str(&format!("{}: error: {e}\n", f.function)),
            None => {
                let ops: Vec<String> = f.by_operator.iter().map(|(k, v)| format!("{k}={v}")).collect();
                out.push_str(&format!(
                    "{}: {} mutants ({}), {} seed file(s) of {} bytes, source {}\n",
                    f.function,
                    f.mutants,
                    ops.join(" "),
                    f.seed_files,
                    f.consumed_input_bytes,
                    f.source.as_ref().map(|p| p.display().to_string()).unwrap_or_default()
                ));
                if !f.denied.is_empty() {
                    out.push_str(&format!("  denied: {:?}\n", f.denied));
                }
                for d in &f.diagnostics {
                    out.push_str(&format!("  note: {d}\n"));
                }
            }
        }
    }
    out.push_str(&format!("total: {} mutants\n", plan.total_mutants));
    out
}

/// Whether `input`, which killed a mutant, also makes the original differ
/// from itself. Returns `true` for a genuine kill.
pub fn verify_kill(input: &[u8], fp: &Harness) -> Result<bool, FuzzError> {
    let o = fp.run(input)?;
    Ok(!classify(&o.termination, &o.trace).is_kill())
}

/// Run every configured function and append the records to the results log.
/// Fails only when the toolchain is missing or the configuration is
/// unusable; per-function failures are listed in the outcome.
pub fn run_campaign(cfg: &CampaignConfig) -> Result<CampaignOutcome, CampaignError> {
    let tc = Toolchain { cc: cfg.build.cc.clone(), cflags: cfg.build.cflags.clone(), includes: cfg.include_flags() };
    tc.check()?;
    let subject = load_subject(cfg)?;
    let denylist = cfg.denylist()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.fuzz.workers)
        .build()
        .map_err(|e| CampaignError::ThreadPool(e.to_string()))?;
    std::fs::create_dir_all(&cfg.output_dir)?;
    let mut outcome = CampaignOutcome::default();
    for f in &cfg.subject.functions {
        let mut prepared = match prepare(cfg, &subject, f, &denylist) {
            Ok(p) => p,
            Err(e) => {
                outcome.errors.push(format!("{f}: {e}"));
                continue;
            }
        };
        let records = match run_function(cfg, &tc, &pool, &subject, &mut prepared) {
            Ok(r) => r,
            Err(e) if e.is_environment() => return Err(e),
            Err(e) => {
                outcome.errors.push(format!("{f}: {e}"));
                let diag = e.to_string();
                prepared
                    .mutants
                    .iter()
                    .map(|m| {
                        let mut r = base_record(cfg, m, MutantVerdict::Stillborn);
                        r.diagnostic = Some(diag.clone());
                        r
                    })
                    .collect()
            }
        };
        append_records(&cfg.results_path(), &records)?;
        outcome.records.extend(records);
    }
    Ok(outcome)
}

fn base_record(cfg: &CampaignConfig, m: &Mutant, verdict: MutantVerdict) -> CampaignRecord {
    CampaignRecord {
        run_id: cfg.run_id.clone(),
        function: m.site.function.clone(),
        mutant_id: m.id,
        operator: m.operator,
        file: m.file_name(),
        verdict,
        first_kill_seconds: None,
        kill_origin: None,
        executions: 0,
        false_positives: 0,
        killing_inputs: Vec::new(),
        replayed_from: None,
        diagnostic: None,
    }
}

/// Objects and settings shared by every mutant of one function.
struct Shared<'a> {
    cfg: &'a CampaignConfig,
    tc: &'a Toolchain,
    prep: &'a PreparedFunction,
    fdir: PathBuf,
    type_names: BTreeSet<String>,
    fuzz_driver_o: PathBuf,
    original_objects: Vec<PathBuf>,
    runtime_o: PathBuf,
    fp_exe: PathBuf,
    test_exe: PathBuf,
    seeds: Vec<Vec<u8>>,
}

fn build_ok(step: &str, r: Result<Result<(), String>, CampaignError>) -> Result<(), CampaignError> {
    r?.map_err(|diag| CampaignError::Build(format!("{step}: {}", diag.trim())))
}

fn instrument_seed(index: u64) -> u64 {
    0x6d6f_7469_6600_0000 ^ index
}

fn run_function(
    cfg: &CampaignConfig,
    tc: &Toolchain,
    pool: &rayon::ThreadPool,
    subject: &Subject,
    prep: &mut PreparedFunction,
) -> Result<Vec<CampaignRecord>, CampaignError> {
    let fdir = cfg.output_dir.join(&prep.function);
    if fdir.exists() {
        std::fs::remove_dir_all(&fdir)?;
    }
    let drivers = fdir.join("drivers");
    let runtime_c = write_runtime(&drivers)?;
    for (name, d) in [("fuzz_driver", &prep.fuzz_driver), ("fp_driver", &prep.fp_driver), ("test_driver", &prep.test_driver)] {
        std::fs::write(drivers.join(format!("{name}.c")), &d.source)?;
    }
    write_seeds(&fdir.join("seeds"), &prep.seeds)?;
    let mdir = fdir.join("mutants");
    std::fs::create_dir_all(&mdir)?;
    for m in &prep.mutants {
        std::fs::write(mdir.join(m.file_name()), &m.mutated_source)?;
    }

    let mut tce_notes: IndexMap<u32, String> = IndexMap::new();
    if cfg.build.tce {
        let report = tce_filter(
            &prep.source,
            &prep.function,
            &mut prep.mutants,
            &cfg.tce_template(),
            &cfg.build.tce_levels,
            &fdir.join("tce"),
        )?;
        for o in report.outcomes {
            let note = match o.class {
                TceClass::Kept => continue,
                TceClass::Equivalent { optlevel } => format!("object code equals the original at -O{optlevel}"),
                TceClass::Duplicate { of, optlevel } => format!("object code equals mutant {of} at -O{optlevel}"),
                TceClass::Stillborn { diagnostic } => diagnostic,
            };
            tce_notes.insert(o.id, note);
        }
    }

    let bdir = fdir.join("build");
    std::fs::create_dir_all(&bdir)?;
    let runtime_o = bdir.join("motif_runtime.o");
    build_ok("runtime", tc.compile(&runtime_c, &runtime_o, &[]))?;
    let mut driver_objs = Vec::new();
    for name in ["fuzz_driver", "fp_driver", "test_driver"] {
        let o = bdir.join(format!("{name}.o"));
        build_ok(name, tc.compile(&drivers.join(format!("{name}.c")), &o, &[&drivers]))?;
        driver_objs.push(o);
    }
    let type_names: BTreeSet<String> = prep.env.typedefs.keys().cloned().collect();
    let mut original_objects = Vec::new();
    for (i, (path, text)) in subject.sources.iter().enumerate() {
        let inst = instrument(text, &type_names, instrument_seed(i as u64))?;
        let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let src = bdir.join(format!("orig{i}_{stem}.c"));
        std::fs::write(&src, inst.source)?;
        let obj = src.with_extension("o");
        let dir = path.parent().unwrap_or(Path::new("."));
        build_ok(&format!("original {}", path.display()), tc.compile(&src, &obj, &[dir]))?;
        original_objects.push(obj);
    }
    let link_with = |driver: &Path, out: &Path| -> Result<(), CampaignError> {
        let mut objs = vec![driver.to_path_buf()];
        objs.extend(original_objects.iter().cloned());
        objs.push(runtime_o.clone());
        build_ok(&format!("link {}", out.display()), tc.link(&objs, out))
    };
    let fp_exe = bdir.join("fp_driver");
    let test_exe = bdir.join("test_driver");
    link_with(&driver_objs[1], &fp_exe)?;
    link_with(&driver_objs[2], &test_exe)?;

    let shared = Shared {
        cfg,
        tc,
        prep,
        fdir: fdir.clone(),
        type_names,
        fuzz_driver_o: driver_objs[0].clone(),
        original_objects,
        runtime_o,
        fp_exe,
        test_exe,
        seeds: prep.seeds.iter().map(|s| s.bytes.clone()).collect(),
    };
    let results: Vec<Result<MutantRun, CampaignError>> = pool.install(|| {
        prep.mutants
            .par_iter()
            .map(|m| match m.status {
                MutantStatus::TceEquivalent | MutantStatus::TceDuplicate => {
                    let mut r = base_record(cfg, m, MutantVerdict::TceDropped);
                    r.diagnostic = tce_notes.get(&m.id).cloned();
                    Ok(MutantRun { record: r, exe: None, elapsed: Duration::ZERO })
                }
                MutantStatus::Stillborn => {
                    let mut r = base_record(cfg, m, MutantVerdict::Stillborn);
                    r.diagnostic = tce_notes.get(&m.id).cloned();
                    Ok(MutantRun { record: r, exe: None, elapsed: Duration::ZERO })
                }
                _ => fuzz_one(&shared, m),
            })
            .collect()
    });
    let mut runs = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    if cfg.fuzz.cross_replay {
        cross_replay(&shared, &mut runs)?;
    }
    let mut records: Vec<CampaignRecord> = runs.into_iter().map(|r| r.record).collect();
    records.sort_by_key(|r| r.mutant_id);
    Ok(records)
}

struct MutantRun {
    record: CampaignRecord,
    exe: Option<PathBuf>,
    elapsed: Duration,
}

fn harness(cfg: &CampaignConfig, exe: &Path, workdir: PathBuf) -> Harness {
    let mut h = Harness::new(exe, workdir);
    h.timeout = Duration::from_millis(cfg.fuzz.timeout_ms);
    h.rand_seed = cfg.fuzz.rng_seed;
    h.log_on_stderr = cfg.driver.checkpoint_channel == CheckpointChannel::Stderr;
    h
}

fn fuzz_one(sh: &Shared, m: &Mutant) -> Result<MutantRun, CampaignError> {
    let cfg = sh.cfg;
    let wdir = sh.fdir.join("work").join(format!("mut{}", m.id));
    std::fs::create_dir_all(&wdir)?;
    let stillborn = |diag: String| {
        let mut r = base_record(cfg, m, MutantVerdict::Stillborn);
        r.diagnostic = Some(diag);
        Ok(MutantRun { record: r, exe: None, elapsed: Duration::ZERO })
    };
    let inst = match instrument(&m.mutated_source, &sh.type_names, instrument_seed(0x1_0000 + m.id as u64)) {
        Ok(i) => i,
        Err(e) => return stillborn(e.to_string()),
    };
    let src = wdir.join(m.file_name());
    std::fs::write(&src, inst.source)?;
    let obj = wdir.join("mutant.o");
    let dir = sh.prep.source_path.parent().unwrap_or(Path::new("."));
    if let Err(diag) = sh.tc.compile(&src, &obj, &[dir])? {
        return stillborn(diag);
    }
    let exe = wdir.join("fuzz_driver");
    let mut objs = vec![sh.fuzz_driver_o.clone()];
    objs.extend(sh.original_objects.iter().cloned());
    objs.push(obj);
    objs.push(sh.runtime_o.clone());
    if let Err(diag) = sh.tc.link(&objs, &exe)? {
        return stillborn(diag);
    }

    let mut fuzz_h = harness(cfg, &exe, wdir.join("run"));
    let fp_h = harness(cfg, &sh.fp_exe, wdir.join("fp"));
    let fcfg = FuzzConfig {
        budget: Some(cfg.fuzz.budget()),
        max_execs: cfg.fuzz.max_execs,
        rng_seed: cfg.fuzz.rng_seed ^ (m.id as u64).wrapping_mul(0x9e37_79b9),
        stop_at_first_kill: cfg.fuzz.stop_at_first_kill,
        consumed_input_bytes: sh.prep.fuzz_driver.consumed_input_bytes,
        ..FuzzConfig::default()
    };
    let outcome = fuzz_mutant(&mut fuzz_h, &sh.seeds, &fcfg, &mut |input| verify_kill(input, &fp_h))?;

    let kdir = sh.fdir.join("kills").join(format!("mut{}", m.id));
    let mut killing_inputs = Vec::new();
    for (n, k) in outcome.kills.iter().enumerate() {
        std::fs::create_dir_all(&kdir)?;
        let stem = format!("kill_{}", n + 1);
        let bin = kdir.join(format!("{stem}.bin"));
        std::fs::write(&bin, &k.input)?;
        let out = kdir.join(format!("{stem}.out"));
        let test_status = run_test_driver(&sh.test_exe, &bin, &out, fuzz_h.timeout)?;
        let meta = KillMeta {
            mutant_id: m.id,
            verdict: k.verdict,
            genuine: k.genuine,
            origin: origin_of(&k.input, &sh.seeds),
            elapsed_seconds: k.elapsed.as_secs_f64(),
            exec_index: k.exec_index,
            test_driver_status: test_status,
        };
        std::fs::write(kdir.join(format!("{stem}.json")), serde_json::to_string_pretty(&meta).expect("serializable"))?;
        if k.genuine {
            let rel = bin.strip_prefix(&cfg.output_dir).unwrap_or(&bin);
            killing_inputs.push(rel.display().to_string());
        }
    }

    let verdict = if outcome.killed {
        MutantVerdict::KilledGenuine
    } else if outcome.false_positive_count > 0 {
        MutantVerdict::LiveFpOnly
    } else {
        MutantVerdict::Live
    };
    let mut r = base_record(cfg, m, verdict);
    if let Some(k) = outcome.first_genuine() {
        r.first_kill_seconds = Some(k.elapsed.as_secs_f64());
        r.kill_origin = Some(origin_of(&k.input, &sh.seeds));
    }
    r.executions = outcome.executions;
    r.false_positives = outcome.false_positive_count;
    r.killing_inputs = killing_inputs;
    Ok(MutantRun { record: r, exe: Some(exe), elapsed: outcome.elapsed })
}

/// A kill is attributed to the seeds when its input is one of them.
fn origin_of(input: &[u8], seeds: &[Vec<u8>]) -> KillOrigin {
    if seeds.iter().any(|s| s == input) {
        KillOrigin::Seed
    } else {
        KillOrigin::Fuzzed
    }
}

#[derive(Serialize)]
struct KillMeta {
    mutant_id: u32,
    verdict: crate::fuzz::Verdict,
    genuine: bool,
    origin: KillOrigin,
    elapsed_seconds: f64,
    exec_index: u64,
    /// Exit code of the test driver, or `None` if it crashed or hung.
    test_driver_status: Option<i32>,
}

/// Run the test driver on `input`, saving its standard output to `out`.
fn run_test_driver(exe: &Path, input: &Path, out: &Path, timeout: Duration) -> Result<Option<i32>, CampaignError> {
    let mut child = Command::new(exe)
        .arg(input)
        .env("MOTIF_LOG_FILE", "/dev/null")
        .stdin(Stdio::null())
        .stdout(File::create(out)?)
        .stderr(Stdio::null())
        .spawn()?;
    match child.wait_timeout(timeout)? {
        Some(status) => Ok(status.code()),
        None => {
            let _ = child.kill();
            let _ = child.wait();
            Ok(None)
        }
    }
}

/// Replay genuine killing inputs of every mutant against the live ones.
fn cross_replay(sh: &Shared, runs: &mut [MutantRun]) -> Result<(), CampaignError> {
    let cfg = sh.cfg;
    let inputs: Vec<(u32, Vec<u8>)> = runs
        .iter()
        .flat_map(|r| r.record.killing_inputs.iter().map(move |p| (r.record.mutant_id, cfg.output_dir.join(p))))
        .map(|(id, p)| Ok((id, std::fs::read(p)?)))
        .collect::<Result<_, std::io::Error>>()?;
    for run in runs.iter_mut() {
        let live = matches!(run.record.verdict, MutantVerdict::Live | MutantVerdict::LiveFpOnly);
        let Some(exe) = run.exe.as_ref().filter(|_| live) else { continue };
        let wdir = sh.fdir.join("work").join(format!("mut{}", run.record.mutant_id));
        let h = harness(cfg, exe, wdir.join("replay"));
        let fp = harness(cfg, &sh.fp_exe, wdir.join("fp"));
        for (from, input) in inputs.iter().filter(|(id, _)| *id != run.record.mutant_id) {
            let o = h.run(input)?;
            run.record.executions += 1;
            if classify(&o.termination, &o.trace).is_kill() && verify_kill(input, &fp)? {
                run.record.verdict = MutantVerdict::KilledGenuine;
                run.record.first_kill_seconds = Some(run.elapsed.as_secs_f64());
                run.record.kill_origin = Some(origin_of(input, &sh.seeds));
                run.record.replayed_from = Some(*from);
                break;
            }
        }
    }
    Ok(())
}
