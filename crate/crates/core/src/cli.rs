//! Command-line interface.

use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use indexmap::IndexMap;
use serde::Serialize;
use serde_json::json;

use crate::c_model::{layout_of, parse_declarations, AbiProfile, CType, ParseConfig, TypeEnvironment, TypeRenderer};
use crate::campaign::{
    compare, curves_csv, fisher_table, plan_campaign, read_records, render_plan, render_summary, run_campaign,
    run_layout_probe, summarize, verify_kill, write_runtime, CampaignConfig, CampaignError, Toolchain,
};
use crate::driver_synth::{
    gen_false_positive_driver, gen_fuzzing_driver, gen_test_driver, CheckpointChannel, DriverSpec, PointerLengths,
    DEFAULT_ARRAY_LENGTH,
};
use crate::fuzz::{fuzz_mutant, FuzzConfig, Harness};
use crate::mutagen::{enumerate_sites, generate_mutants, tce_filter, CompileTemplate, Operator, SiteOptions};
use crate::seedgen::{generate_seeds, write_seeds, SeedTable};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_ENVIRONMENT: i32 = 2;
pub const EXIT_CAMPAIGN: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "motif", version, about = "Mutation testing of C functions driven by grey-box fuzzing")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse declarations and print types, layouts and signatures.
    Parse(ParseArgs),
    /// Generate the mutants of one function.
    Mutate(MutateArgs),
    /// Generate the fuzzing, false-positive and test drivers.
    Drivers(DriverArgs),
    /// Generate seed files.
    Seeds(SeedArgs),
    /// Fuzz one compiled fuzzing driver.
    Fuzz(FuzzArgs),
    /// Run a whole campaign from a configuration file.
    Campaign(CampaignArgs),
    /// Summarize results logs or compare two of them.
    Report(ReportArgs),
    /// Check computed layouts against the compiler.
    Probe(ProbeArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Headers and sources holding the declarations.
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    /// ABI profile: lp64 or ilp32.
    #[arg(long, default_value = "lp64")]
    pub abi: String,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ParseArgs {
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct MutateArgs {
    /// Source file defining the function.
    pub source: PathBuf,
    #[arg(long)]
    pub function: String,
    /// Headers parsed before the source.
    #[arg(long = "header")]
    pub headers: Vec<PathBuf>,
    /// Comma-separated operator names; all by default.
    #[arg(long, value_delimiter = ',')]
    pub operators: Vec<String>,
    /// Directory receiving one file per mutant.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Classify mutants by trivial compiler equivalence.
    #[arg(long)]
    pub tce: bool,
    /// Compile template with {src}, {out} and {optlevel}.
    #[arg(long)]
    pub tce_template: Option<String>,
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3")]
    pub tce_levels: Vec<String>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct DriverArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub function: String,
    /// Element count of a pointer parameter, as `name=count`.
    #[arg(long = "length", value_parser = parse_length)]
    pub lengths: Vec<(String, u64)>,
    #[arg(long, default_value_t = DEFAULT_ARRAY_LENGTH)]
    pub array_default_length: u64,
    /// Parameter left out of the output comparison.
    #[arg(long = "exclude")]
    pub exclude: Vec<String>,
    /// File with C statements run between the two calls.
    #[arg(long)]
    pub reset_snippet: Option<PathBuf>,
    /// Write checkpoints to stderr instead of the log file.
    #[arg(long)]
    pub stderr_checkpoints: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SeedArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub function: String,
    #[arg(long = "length", value_parser = parse_length)]
    pub lengths: Vec<(String, u64)>,
    #[arg(long, default_value_t = DEFAULT_ARRAY_LENGTH)]
    pub array_default_length: u64,
    /// Typedef holding a timestamp.
    #[arg(long = "timestamp-type")]
    pub timestamp_types: Vec<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FuzzArgs {
    /// Compiled fuzzing driver.
    #[arg(long)]
    pub driver: PathBuf,
    /// Compiled false-positive driver; kills are not checked without it.
    #[arg(long)]
    pub fp_driver: Option<PathBuf>,
    /// Directory of seed files.
    #[arg(long)]
    pub seeds: PathBuf,
    #[arg(long, default_value_t = 60.0)]
    pub budget: f64,
    #[arg(long)]
    pub max_execs: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub rng_seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub timeout_ms: u64,
    /// Bytes one argument set consumes; the largest seed by default.
    #[arg(long)]
    pub consumed: Option<u64>,
    /// Keep fuzzing after the first genuine kill.
    #[arg(long)]
    pub keep_going: bool,
    #[arg(long)]
    pub stderr_checkpoints: bool,
    /// Scratch directory; a temporary one by default.
    #[arg(long)]
    pub workdir: Option<PathBuf>,
    /// Directory receiving kill_<n>.bin files.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct CampaignArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Print the plan and run nothing.
    #[arg(long)]
    pub dry_run: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Results logs to summarize.
    pub results: Vec<PathBuf>,
    /// Compare two results logs at every kill time.
    #[arg(long, num_args = 2, value_names = ["A", "B"], conflicts_with = "results")]
    pub compare: Option<Vec<PathBuf>>,
    /// Write kill curves as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value = "cc")]
    pub cc: String,
}

fn parse_length(s: &str) -> Result<(String, u64), String> {
    let (name, n) = s.split_once('=').ok_or("expected name=count")?;
    let n = n.parse().map_err(|e| format!("bad count: {e}"))?;
    Ok((name.to_string(), n))
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(m: impl Into<String>) -> Self {
        CliError { code: EXIT_USAGE, message: m.into() }
    }
}

impl From<CampaignError> for CliError {
    fn from(e: CampaignError) -> Self {
        let code = if e.is_environment() {
            EXIT_ENVIRONMENT
        } else {
            match e {
                CampaignError::Config(_)
                | CampaignError::UnknownFunction(_)
                | CampaignError::Model(_)
                | CampaignError::Scan(_)
                | CampaignError::Driver(_)
                | CampaignError::Seed(_) => EXIT_USAGE,
                _ => EXIT_CAMPAIGN,
            }
        };
        CliError { code, message: e.to_string() }
    }
}

macro_rules! impl_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CampaignError::from(e).into()
            }
        }
    )*};
}
impl_from!(
    crate::c_model::CModelError,
    crate::cbody::ScanError,
    crate::mutagen::MutagenError,
    crate::driver_synth::DriverError,
    crate::seedgen::SeedError,
    crate::fuzz::FuzzError,
    std::io::Error
);

type CliResult = Result<i32, CliError>;

/// Run the CLI on `args` (including the program name); returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

fn dispatch(cmd: Command) -> CliResult {
    match cmd {
        Command::Parse(a) => cmd_parse(a),
        Command::Mutate(a) => cmd_mutate(a),
        Command::Drivers(a) => cmd_drivers(a),
        Command::Seeds(a) => cmd_seeds(a),
        Command::Fuzz(a) => cmd_fuzz(a),
        Command::Campaign(a) => cmd_campaign(a),
        Command::Report(a) => cmd_report(a),
        Command::Probe(a) => cmd_probe(a),
    }
}

fn print_json<T: Serialize>(v: &T) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn read_file(p: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(p).map_err(|e| CliError::usage(format!("cannot read {}: {e}", p.display())))
}

fn abi(name: &str) -> Result<AbiProfile, CliError> {
    AbiProfile::by_name(name).ok_or_else(|| CliError::usage(format!("unknown ABI profile `{name}`")))
}

/// Parse `files` in order as one translation unit; diagnostics go to stderr.
fn load_env(files: &[PathBuf], quiet: bool) -> Result<TypeEnvironment, CliError> {
    let mut text = String::new();
    for f in files {
        text.push_str(&read_file(f)?);
        text.push('\n');
    }
    let parsed = parse_declarations(&text, &ParseConfig::default())?;
    if !quiet {
        for d in &parsed.diagnostics {
            eprintln!("warning: {d}");
        }
    }
    Ok(parsed.env)
}

fn cmd_parse(a: ParseArgs) -> CliResult {
    let env = load_env(&a.common.files, a.common.json)?;
    let abi = abi(&a.common.abi)?;
    let types: Vec<(String, CType)> = env
        .typedefs
        .keys()
        .map(|n| (n.clone(), CType::alias(n.clone())))
        .chain(env.tags.iter().map(|(t, ty)| (t.clone(), ty.clone())))
        .collect();
    let renderer = TypeRenderer::default();
    if a.common.json {
        let layouts: IndexMap<String, serde_json::Value> = types
            .iter()
            .map(|(n, ty)| {
                let v = match layout_of(ty, &env, &abi) {
                    Ok(l) => serde_json::to_value(l).expect("serializable"),
                    Err(e) => json!({ "error": e.to_string() }),
                };
                (n.clone(), v)
            })
            .collect();
        let prototypes: IndexMap<&String, String> =
            env.signatures.iter().map(|(n, s)| (n, renderer.prototype(s, n))).collect();
        print_json(&json!({ "environment": env, "layouts": layouts, "prototypes": prototypes }));
    } else {
        for (n, ty) in &types {
            match layout_of(ty, &env, &abi) {
                Ok(l) => println!("{n}: size {} align {}", l.size, l.align),
                Err(e) => println!("{n}: {e}"),
            }
        }
        for (n, s) in &env.signatures {
            println!("{};", renderer.prototype(s, n));
        }
    }
    Ok(EXIT_OK)
}

fn cmd_mutate(a: MutateArgs) -> CliResult {
    let source = read_file(&a.source)?;
    let mut files = a.headers.clone();
    files.push(a.source.clone());
    let env = load_env(&files, a.json)?;
    let operators = if a.operators.is_empty() {
        Operator::ALL.to_vec()
    } else {
        a.operators.iter().map(|o| o.parse()).collect::<Result<Vec<Operator>, _>>()?
    };
    let opts = SiteOptions::from_env(&env, env.signatures.get(&a.function));
    let file = a.source.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
    let sites = enumerate_sites(&file, &source, &a.function, &operators, &opts)?;
    let mut mutants = generate_mutants(&source, &sites)?;
    let tce = if a.tce {
        let dir = tempfile::tempdir()?;
        let template = match a.tce_template {
            Some(t) => CompileTemplate(t),
            None => {
                let inc = a.source.parent().map(|d| format!(" -I{}", d.display())).unwrap_or_default();
                CompileTemplate(format!("cc -c -w{inc} -O{{optlevel}} {{src}} -o {{out}}"))
            }
        };
        Some(tce_filter(&source, &a.function, &mut mutants, &template, &a.tce_levels, dir.path())?)
    } else {
        None
    };
    if let Some(out) = &a.out {
        std::fs::create_dir_all(out)?;
        for m in &mutants {
            std::fs::write(out.join(m.file_name()), &m.mutated_source)?;
        }
    }
    if a.json {
        let list: Vec<_> = mutants
            .iter()
            .map(|m| {
                json!({
                    "id": m.id, "operator": m.operator, "file": m.file_name(),
                    "start": m.site.start, "end": m.site.end,
                    "original": m.original_token, "replacement": m.replacement_token, "status": m.status,
                })
            })
            .collect();
        print_json(&json!({ "function": a.function, "mutants": list, "tce": tce }));
    } else {
        for m in &mutants {
            println!(
                "{:>4} {} {:?} -> {:?} at {}..{} [{:?}]",
                m.id, m.operator, m.original_token, m.replacement_token, m.site.start, m.site.end, m.status
            );
        }
        println!("{} mutants", mutants.len());
    }
    Ok(EXIT_OK)
}

fn lengths(list: &[(String, u64)], default: u64) -> PointerLengths {
    PointerLengths { array_default_length: default, lengths: list.iter().cloned().collect() }
}

fn signature_env(files: &[PathBuf], function: &str, json: bool) -> Result<(TypeEnvironment, crate::c_model::FunctionSignature), CliError> {
    let env = load_env(files, json)?;
    let sig = env
        .signatures
        .get(function)
        .cloned()
        .ok_or_else(|| CliError::usage(format!("no declaration of `{function}`")))?;
    Ok((env, sig))
}

fn cmd_drivers(a: DriverArgs) -> CliResult {
    let (env, sig) = signature_env(&a.common.files, &a.function, a.common.json)?;
    let mut spec = DriverSpec::new(sig, env);
    spec.abi = abi(&a.common.abi)?;
    spec.lengths = lengths(&a.lengths, a.array_default_length);
    spec.exclude_compare = a.exclude.iter().cloned().collect();
    spec.reset_snippet = a.reset_snippet.as_deref().map(read_file).transpose()?;
    if a.stderr_checkpoints {
        spec.checkpoint_channel = CheckpointChannel::Stderr;
    }
    let drivers = [gen_fuzzing_driver(&spec)?, gen_false_positive_driver(&spec)?, gen_test_driver(&spec)?];
    let names = ["fuzz_driver.c", "fp_driver.c", "test_driver.c"];
    if let Some(out) = &a.out {
        write_runtime(out)?;
        for (n, d) in names.iter().zip(&drivers) {
            std::fs::write(out.join(n), &d.source)?;
        }
    }
    if a.common.json {
        print_json(&json!({ "function": a.function, "drivers": drivers }));
    } else if a.out.is_some() {
        println!("{} input bytes per call", drivers[0].consumed_input_bytes);
    } else {
        print!("{}", drivers[0].source);
    }
    Ok(EXIT_OK)
}

fn cmd_seeds(a: SeedArgs) -> CliResult {
    let (env, sig) = signature_env(&a.common.files, &a.function, a.common.json)?;
    let table = SeedTable { timestamp_types: a.timestamp_types.iter().cloned().collect() };
    let seeds = generate_seeds(&sig, &env, &abi(&a.common.abi)?, &lengths(&a.lengths, a.array_default_length), &table)?;
    if let Some(out) = &a.out {
        write_seeds(out, &seeds)?;
    }
    if a.common.json {
        let hex: Vec<_> = seeds
            .iter()
            .map(|s| json!({ "file": s.file_name(), "bytes": s.bytes.len(), "hex": hex(&s.bytes) }))
            .collect();
        print_json(&json!({ "function": a.function, "seeds": hex }));
    } else {
        for s in &seeds {
            let shown = &s.bytes[..s.bytes.len().min(32)];
            let more = if s.bytes.len() > 32 { " ..." } else { "" };
            println!("{}: {} bytes {}{more}", s.file_name(), s.bytes.len(), hex(shown));
        }
    }
    Ok(EXIT_OK)
}

fn hex(b: &[u8]) -> String {
    b.iter().map(|x| format!("{x:02x}")).collect::<Vec<_>>().join(" ")
}

fn cmd_fuzz(a: FuzzArgs) -> CliResult {
    let mut entries: Vec<PathBuf> = std::fs::read_dir(&a.seeds)?.map(|e| e.map(|e| e.path())).collect::<Result<_, _>>()?;
    entries.sort();
    let seeds: Vec<Vec<u8>> = entries.iter().filter(|p| p.is_file()).map(std::fs::read).collect::<Result<_, _>>()?;
    if seeds.is_empty() {
        return Err(CliError::usage(format!("no seed files in {}", a.seeds.display())));
    }
    let tmp = tempfile::tempdir()?;
    let work = a.workdir.clone().unwrap_or_else(|| tmp.path().to_path_buf());
    let setup = |exe: &Path, dir: &str| {
        let mut h = Harness::new(exe, work.join(dir));
        h.timeout = Duration::from_millis(a.timeout_ms);
        h.rand_seed = a.rng_seed;
        h.log_on_stderr = a.stderr_checkpoints;
        h
    };
    let mut fuzz_h = setup(&a.driver, "run");
    let fp_h = a.fp_driver.as_ref().map(|p| setup(p, "fp"));
    let cfg = FuzzConfig {
        budget: Some(Duration::from_secs_f64(a.budget)),
        max_execs: a.max_execs,
        rng_seed: a.rng_seed,
        stop_at_first_kill: !a.keep_going,
        consumed_input_bytes: a.consumed.unwrap_or_else(|| seeds.iter().map(|s| s.len() as u64).max().unwrap_or(0)),
        ..FuzzConfig::default()
    };
    let outcome = fuzz_mutant(&mut fuzz_h, &seeds, &cfg, &mut |input| match &fp_h {
        Some(h) => verify_kill(input, h),
        None => Ok(true),
    })?;
    if let Some(out) = &a.out {
        std::fs::create_dir_all(out)?;
        for (n, k) in outcome.kills.iter().enumerate() {
            std::fs::write(out.join(format!("kill_{}.bin", n + 1)), &k.input)?;
        }
    }
    if a.json {
        let kills: Vec<_> = outcome
            .kills
            .iter()
            .map(|k| {
                json!({
                    "verdict": k.verdict, "genuine": k.genuine, "origin": k.origin,
                    "elapsed_seconds": k.elapsed.as_secs_f64(), "exec_index": k.exec_index, "hex": hex(&k.input),
                })
            })
            .collect();
        print_json(&json!({
            "killed": outcome.killed, "executions": outcome.executions, "queue_size": outcome.queue_size,
            "kill_count": outcome.kill_count, "false_positives": outcome.false_positive_count,
            "hangs": outcome.hangs, "precondition_violations": outcome.precondition_violations,
            "elapsed_seconds": outcome.elapsed.as_secs_f64(), "kills": kills,
        }));
    } else {
        println!(
            "{}: {} executions, queue {}, {} kill(s), {} false positive(s), {} hang(s)",
            if outcome.killed { "killed" } else { "live" },
            outcome.executions,
            outcome.queue_size,
            outcome.kill_count,
            outcome.false_positive_count,
            outcome.hangs
        );
        if let Some(k) = outcome.first_genuine() {
            println!("first genuine kill after {:.3}s ({:?})", k.elapsed.as_secs_f64(), k.verdict);
        }
    }
    Ok(EXIT_OK)
}

fn cmd_campaign(a: CampaignArgs) -> CliResult {
    let cfg = CampaignConfig::load(&a.config)?;
    if a.dry_run {
        let plan = plan_campaign(&cfg)?;
        if a.json {
            print_json(&plan);
        } else {
            print!("{}", render_plan(&plan));
        }
        let failed = plan.functions.iter().any(|f| f.error.is_some());
        return Ok(if failed { EXIT_CAMPAIGN } else { EXIT_OK });
    }
    let outcome = run_campaign(&cfg)?;
    let report = summarize(&outcome.records);
    if a.json {
        print_json(&json!({ "report": report, "errors": outcome.errors, "results": cfg.results_path() }));
    } else {
        print!("{}", render_summary(&report));
        println!("results: {}", cfg.results_path().display());
    }
    for e in &outcome.errors {
        eprintln!("error: {e}");
    }
    Ok(if outcome.errors.is_empty() { EXIT_OK } else { EXIT_CAMPAIGN })
}

fn load_records(paths: &[PathBuf]) -> Result<Vec<crate::campaign::CampaignRecord>, CliError> {
    let mut out = Vec::new();
    for p in paths {
        out.extend(read_records(p).map_err(|e| CliError::usage(format!("{}: {e}", p.display())))?);
    }
    Ok(out)
}

fn cmd_report(a: ReportArgs) -> CliResult {
    if let Some(pair) = &a.compare {
        let ra = load_records(&pair[..1])?;
        let rb = load_records(&pair[1..])?;
        let rows = compare(&ra, &rb);
        if a.json {
            print_json(&rows);
        } else {
            print!("{}", fisher_table(&rows, &pair[0].display().to_string(), &pair[1].display().to_string()));
        }
        return Ok(EXIT_OK);
    }
    if a.results.is_empty() {
        return Err(CliError::usage("report needs results logs or --compare A B"));
    }
    let records = load_records(&a.results)?;
    let report = summarize(&records);
    if let Some(csv) = &a.csv {
        std::fs::write(csv, curves_csv(&report.curves))?;
    }
    if a.json {
        print_json(&report);
    } else {
        print!("{}", render_summary(&report));
    }
    Ok(EXIT_OK)
}

fn cmd_probe(a: ProbeArgs) -> CliResult {
    let env = load_env(&a.common.files, a.common.json)?;
    let tc = Toolchain { cc: a.cc, cflags: Vec::new(), includes: Vec::new() };
    tc.check()?;
    let dir = tempfile::tempdir()?;
    let (computed, mismatches) = run_layout_probe(&tc, &env, &abi(&a.common.abi)?, dir.path())?;
    if a.common.json {
        print_json(&json!({ "types": computed.len(), "mismatches": mismatches }));
    } else {
        for m in &mismatches {
            println!(
                "{}{}: {:?} computed {} compiler {}",
                m.type_name,
                m.field.as_ref().map(|f| format!(".{f}")).unwrap_or_default(),
                m.what,
                m.computed,
                m.observed
            );
        }
        println!("{} types, {} mismatches", computed.len(), mismatches.len());
    }
    Ok(if mismatches.is_empty() { EXIT_OK } else { EXIT_CAMPAIGN })
}
