//! Campaign configuration file (TOML). Relative paths are resolved against
//! the directory holding the file.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::Duration;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::CampaignError;
use crate::c_model::AbiProfile;
use crate::driver_synth::{CheckpointChannel, PointerLengths, DEFAULT_ARRAY_LENGTH};
use crate::mutagen::{CompileTemplate, Operator};
use crate::seedgen::SeedTable;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    /// Label for every record of this run.
    #[serde(default = "default_run_id")]
    pub run_id: String,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    pub subject: SubjectConfig,
    #[serde(default)]
    pub mutation: MutationConfig,
    #[serde(default)]
    pub fuzz: FuzzSection,
    #[serde(default)]
    pub build: BuildConfig,
    #[serde(default)]
    pub abi: AbiConfig,
    #[serde(default)]
    pub driver: DriverConfig,
}

fn default_run_id() -> String {
    "run-1".into()
}

fn default_output() -> PathBuf {
    PathBuf::from("motif-out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubjectConfig {
    pub sources: Vec<PathBuf>,
    /// Headers whose declarations are visible to the sources.
    #[serde(default)]
    pub headers: Vec<PathBuf>,
    #[serde(default)]
    pub include_dirs: Vec<PathBuf>,
    pub functions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MutationConfig {
    #[serde(default = "all_operators")]
    pub operators: Vec<Operator>,
    /// File listing mutants to skip, one `function:id` per line.
    #[serde(default)]
    pub denylist: Option<PathBuf>,
}

fn all_operators() -> Vec<Operator> {
    Operator::ALL.to_vec()
}

impl Default for MutationConfig {
    fn default() -> Self {
        MutationConfig { operators: all_operators(), denylist: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FuzzSection {
    pub budget_seconds: f64,
    pub max_execs: Option<u64>,
    pub workers: usize,
    pub rng_seed: u64,
    pub timeout_ms: u64,
    pub stop_at_first_kill: bool,
    /// Replay genuine killing inputs against other live mutants.
    pub cross_replay: bool,
}

impl Default for FuzzSection {
    fn default() -> Self {
        FuzzSection {
            budget_seconds: 60.0,
            max_execs: None,
            workers: 1,
            rng_seed: 0,
            timeout_ms: 1000,
            stop_at_first_kill: true,
            cross_replay: false,
        }
    }
}

impl FuzzSection {
    pub fn budget(&self) -> Duration {
        Duration::from_secs_f64(self.budget_seconds)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BuildConfig {
    pub cc: String,
    /// Flags for driver, subject and mutant objects.
    pub cflags: Vec<String>,
    /// Compile template for equivalence detection; `None` derives one from
    /// `cc` and the include directories.
    pub tce_template: Option<String>,
    pub tce_levels: Vec<String>,
    pub tce: bool,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            cc: "cc".into(),
            cflags: vec!["-O0".into(), "-g".into(), "-w".into()],
            tce_template: None,
            tce_levels: ["0", "1", "2", "3"].map(String::from).to_vec(),
            tce: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AbiConfig {
    pub profile: String,
}

impl Default for AbiConfig {
    fn default() -> Self {
        AbiConfig { profile: "lp64".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DriverConfig {
    pub array_default_length: u64,
    pub checkpoint_channel: CheckpointChannel,
    /// function -> parameter -> element count
    pub pointer_lengths: IndexMap<String, IndexMap<String, u64>>,
    /// function -> parameters left out of comparison
    pub exclude_compare: IndexMap<String, Vec<String>>,
    pub timestamp_types: Vec<String>,
    /// function -> C statements run between the two calls
    pub reset_snippets: IndexMap<String, String>,
    /// function -> file holding such statements
    pub reset_snippet_files: IndexMap<String, PathBuf>,
}

impl Default for DriverConfig {
    fn default() -> Self {
        DriverConfig {
            array_default_length: DEFAULT_ARRAY_LENGTH,
            checkpoint_channel: CheckpointChannel::File,
            pointer_lengths: IndexMap::new(),
            exclude_compare: IndexMap::new(),
            timestamp_types: Vec::new(),
            reset_snippets: IndexMap::new(),
            reset_snippet_files: IndexMap::new(),
        }
    }
}

impl DriverConfig {
    pub fn lengths_for(&self, function: &str) -> PointerLengths {
        PointerLengths {
            array_default_length: self.array_default_length,
            lengths: self.pointer_lengths.get(function).cloned().unwrap_or_default(),
        }
    }

    pub fn exclusions_for(&self, function: &str) -> BTreeSet<String> {
        self.exclude_compare.get(function).into_iter().flatten().cloned().collect()
    }

    pub fn seed_table(&self) -> SeedTable {
        SeedTable { timestamp_types: self.timestamp_types.iter().cloned().collect() }
    }

    pub fn reset_snippet_for(&self, function: &str) -> Result<Option<String>, CampaignError> {
        if let Some(s) = self.reset_snippets.get(function) {
            return Ok(Some(s.clone()));
        }
        match self.reset_snippet_files.get(function) {
            Some(p) => std::fs::read_to_string(p)
                .map(Some)
                .map_err(|e| CampaignError::Config(format!("reset snippet {}: {e}", p.display()))),
            None => Ok(None),
        }
    }
}

impl CampaignConfig {
    pub fn from_toml(text: &str, base: &Path) -> Result<Self, CampaignError> {
        let mut cfg: CampaignConfig = toml::from_str(text).map_err(|e| CampaignError::Config(e.to_string()))?;
        cfg.resolve_paths(base);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CampaignError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CampaignError::Config(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml(&text, base)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.output_dir);
        self.subject.sources.iter_mut().for_each(fix);
        self.subject.headers.iter_mut().for_each(fix);
        self.subject.include_dirs.iter_mut().for_each(fix);
        if let Some(d) = &mut self.mutation.denylist {
            fix(d);
        }
        self.driver.reset_snippet_files.values_mut().for_each(fix);
    }

    pub fn validate(&self) -> Result<(), CampaignError> {
        let bad = |m: &str| Err(CampaignError::Config(m.to_string()));
        if !(self.fuzz.budget_seconds > 0.0) {
            return bad("fuzz.budget_seconds must be positive");
        }
        if self.fuzz.workers == 0 {
            return bad("fuzz.workers must be at least 1");
        }
        if self.driver.array_default_length == 0 {
            return bad("driver.array_default_length must be at least 1");
        }
        if self.subject.sources.is_empty() || self.subject.functions.is_empty() {
            return bad("subject.sources and subject.functions must not be empty");
        }
        if self.abi().is_none() {
            return bad(&format!("unknown ABI profile `{}`", self.abi.profile));
        }
        if self.mutation.operators.is_empty() {
            return bad("mutation.operators must not be empty");
        }
        Ok(())
    }

    pub fn abi(&self) -> Option<AbiProfile> {
        AbiProfile::by_name(&self.abi.profile)
    }

    pub fn results_path(&self) -> PathBuf {
        self.output_dir.join("results.ndjson")
    }

    /// `-I` flags for the source directories and configured include dirs.
    pub fn include_flags(&self) -> Vec<String> {
        let mut dirs: Vec<PathBuf> = Vec::new();
        for s in &self.subject.sources {
            if let Some(d) = s.parent() {
                if !dirs.iter().any(|x| x == d) {
                    dirs.push(d.to_path_buf());
                }
            }
        }
        dirs.extend(self.subject.include_dirs.iter().cloned());
        dirs.iter().map(|d| format!("-I{}", d.display())).collect()
    }

    pub fn tce_template(&self) -> CompileTemplate {
        match &self.build.tce_template {
            Some(t) => CompileTemplate(t.clone()),
            None => CompileTemplate(format!(
                "{} -c -w {} -O{{optlevel}} {{src}} -o {{out}}",
                self.build.cc,
                self.include_flags().join(" ")
            )),
        }
    }

    /// Mutants listed in the denylist file as `(function, id)`.
    pub fn denylist(&self) -> Result<BTreeSet<(String, u32)>, CampaignError> {
        let Some(path) = &self.mutation.denylist else { return Ok(BTreeSet::new()) };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CampaignError::Config(format!("denylist {}: {e}", path.display())))?;
        let mut out = BTreeSet::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parsed = line.split_once(':').and_then(|(f, id)| Some((f.trim().to_string(), id.trim().parse().ok()?)));
            match parsed {
                Some(entry) => {
                    out.insert(entry);
                }
                None => {
                    return Err(CampaignError::Config(format!(
                        "denylist {}:{}: expected `function:id`",
                        path.display(),
                        i + 1
                    )))
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[subject]
sources = ["src/a.c"]
functions = ["f"]
"#;

    #[test]
    fn defaults_and_path_resolution() {
        let c = CampaignConfig::from_toml(MINIMAL, Path::new("/base")).unwrap();
        assert_eq!(c.subject.sources, [PathBuf::from("/base/src/a.c")]);
        assert_eq!(c.fuzz.budget_seconds, 60.0);
        assert_eq!(c.mutation.operators.len(), 7);
        assert_eq!(c.include_flags(), ["-I/base/src"]);
        assert_eq!(c.tce_template().0, "cc -c -w -I/base/src -O{optlevel} {src} -o {out}");
    }

    #[test]
    fn full_schema() {
        let text = r#"
run_id = "r7"
output_dir = "/tmp/o"
[subject]
sources = ["a.c"]
functions = ["trim"]
[mutation]
operators = ["AOR", "ROR"]
[fuzz]
budget_seconds = 5
workers = 2
rng_seed = 9
[driver]
timestamp_types = ["stamp_t"]
[driver.pointer_lengths.trim]
s = 16
[driver.exclude_compare]
trim = ["s"]
[driver.reset_snippets]
trim = "counter = 0;"
"#;
        let c = CampaignConfig::from_toml(text, Path::new("/b")).unwrap();
        assert_eq!(c.output_dir, PathBuf::from("/tmp/o"));
        assert_eq!(c.driver.lengths_for("trim").lengths["s"], 16);
        assert!(c.driver.exclusions_for("trim").contains("s"));
        assert_eq!(c.driver.reset_snippet_for("trim").unwrap().as_deref(), Some("counter = 0;"));
        assert_eq!(c.mutation.operators, [Operator::Aor, Operator::Ror]);
    }

    #[test]
    fn invalid_values_rejected() {
        let bad_budget = format!("{MINIMAL}[fuzz]\nbudget_seconds = 0\n");
        assert!(CampaignConfig::from_toml(&bad_budget, Path::new("/")).is_err());
        let bad_key = format!("{MINIMAL}[fuzz]\nbudget = 3\n");
        assert!(CampaignConfig::from_toml(&bad_key, Path::new("/")).is_err());
        let bad_abi = format!("{MINIMAL}[abi]\nprofile = \"pdp11\"\n");
        assert!(CampaignConfig::from_toml(&bad_abi, Path::new("/")).is_err());
    }
}
