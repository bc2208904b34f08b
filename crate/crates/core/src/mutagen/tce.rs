//! Trivial compiler equivalence: compile the original and every mutant,
//! compare the code/data sections of the objects, and drop mutants whose
//! object code equals the original's (equivalent) or an earlier mutant's
//! (duplicate).

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::ErrorKind;
use std::path::{Path, PathBuf};
use std::process::Command;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{elf, Mutant, MutantStatus, MutagenError, MUTANT_PREFIX};

/// Whitespace-separated compile command with `{src}`, `{out}` and
/// `{optlevel}` placeholders. No shell quoting is interpreted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompileTemplate(pub String);

impl Default for CompileTemplate {
    fn default() -> Self {
        CompileTemplate("cc -c -w -O{optlevel} {src} -o {out}".into())
    }
}

impl CompileTemplate {
    pub fn render(&self, src: &Path, out: &Path, optlevel: &str) -> Result<Vec<String>, MutagenError> {
        if !self.0.contains("{src}") || !self.0.contains("{out}") {
            return Err(MutagenError::BadTemplate(format!("`{}` lacks {{src}} or {{out}}", self.0)));
        }
        Ok(self
            .0
            .split_whitespace()
            .map(|w| {
                w.replace("{src}", &src.to_string_lossy())
                    .replace("{out}", &out.to_string_lossy())
                    .replace("{optlevel}", optlevel)
            })
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum TceClass {
    Kept,
    Equivalent { optlevel: String },
    Duplicate { of: u32, optlevel: String },
    Stillborn { diagnostic: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TceOutcome {
    pub id: u32,
    pub class: TceClass,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TceReport {
    pub outcomes: Vec<TceOutcome>,
}

impl TceReport {
    pub fn kept(&self) -> impl Iterator<Item = u32> + '_ {
        self.outcomes.iter().filter(|o| o.class == TceClass::Kept).map(|o| o.id)
    }

    pub fn count(&self, pred: impl Fn(&TceClass) -> bool) -> usize {
        self.outcomes.iter().filter(|o| pred(&o.class)).count()
    }
}

fn run_compile(template: &CompileTemplate, src: &Path, out: &Path, optlevel: &str) -> Result<Result<Vec<u8>, String>, MutagenError> {
    let argv = template.render(src, out, optlevel)?;
    let output = Command::new(&argv[0]).args(&argv[1..]).output().map_err(|e| match e.kind() {
        ErrorKind::NotFound => MutagenError::CompilerUnavailable(argv[0].clone()),
        _ => MutagenError::Io(e),
    })?;
    if !output.status.success() {
        return Ok(Err(String::from_utf8_lossy(&output.stderr).into_owned()));
    }
    Ok(Ok(std::fs::read(out)?))
}

/// Hash of an object file's code and data, with `mut_<function>` read as
/// `<function>` so the renamed mutant compares equal to the original.
pub fn object_code_hash(obj: &[u8], function: &str) -> Result<String, MutagenError> {
    let mutated = format!("{MUTANT_PREFIX}{function}");
    let rename = |name: &str| name.replace(&mutated, function);
    let fp = elf::fingerprint(obj, &rename).ok_or_else(|| MutagenError::Object("not a little-endian ELF64 object".into()))?;
    let digest = Sha256::digest(fp.as_bytes());
    let mut hex = String::with_capacity(64);
    for b in digest.iter() {
        let _ = write!(hex, "{b:02x}");
    }
    Ok(hex)
}

fn hashes_for(
    template: &CompileTemplate,
    src: &Path,
    stem: &str,
    workdir: &Path,
    levels: &[String],
    function: &str,
) -> Result<Result<Vec<String>, String>, MutagenError> {
    let mut out = Vec::with_capacity(levels.len());
    for level in levels {
        let obj: PathBuf = workdir.join(format!("{stem}.O{level}.o"));
        match run_compile(template, src, &obj, level)? {
            Ok(bytes) => out.push(object_code_hash(&bytes, function)?),
            Err(diag) => return Ok(Err(diag)),
        }
    }
    Ok(Ok(out))
}

/// Partition `mutants` by trivial compiler equivalence and update each
/// mutant's status. Compilation runs in parallel; classification is done in
/// id order so the lowest-numbered member of a duplicate group is kept.
pub fn tce_filter(
    original_source: &str,
    function: &str,
    mutants: &mut [Mutant],
    template: &CompileTemplate,
    levels: &[String],
    workdir: &Path,
) -> Result<TceReport, MutagenError> {
    std::fs::create_dir_all(workdir)?;
    let orig_src = workdir.join(format!("{function}.orig.c"));
    std::fs::write(&orig_src, original_source)?;
    let orig = hashes_for(template, &orig_src, &format!("{function}.orig"), workdir, levels, function)?
        .map_err(MutagenError::OriginalCompileFailure)?;

    let compiled: Vec<Result<Result<Vec<String>, String>, MutagenError>> = mutants
        .par_iter()
        .map(|m| {
            let src = workdir.join(m.file_name());
            std::fs::write(&src, &m.mutated_source)?;
            hashes_for(template, &src, &format!("{function}.mut{}", m.id), workdir, levels, function)
        })
        .collect();

    let mut seen: Vec<HashMap<String, u32>> = vec![HashMap::new(); levels.len()];
    let mut report = TceReport::default();
    let mut order: Vec<usize> = (0..mutants.len()).collect();
    order.sort_by_key(|&i| mutants[i].id);
    for i in order {
        let m = &mut mutants[i];
        let class = match &compiled[i] {
            Err(MutagenError::CompilerUnavailable(c)) => return Err(MutagenError::CompilerUnavailable(c.clone())),
            Err(e) => TceClass::Stillborn { diagnostic: e.to_string() },
            Ok(Err(diag)) => TceClass::Stillborn { diagnostic: diag.clone() },
            Ok(Ok(hashes)) => {
                if let Some(l) = (0..levels.len()).find(|&l| hashes[l] == orig[l]) {
                    TceClass::Equivalent { optlevel: levels[l].clone() }
                } else if let Some((l, of)) = (0..levels.len()).find_map(|l| seen[l].get(&hashes[l]).map(|of| (l, *of))) {
                    TceClass::Duplicate { of, optlevel: levels[l].clone() }
                } else {
                    for (l, h) in hashes.iter().enumerate() {
                        seen[l].insert(h.clone(), m.id);
                    }
                    TceClass::Kept
                }
            }
        };
        m.status = match class {
            TceClass::Kept => MutantStatus::Pending,
            TceClass::Equivalent { .. } => MutantStatus::TceEquivalent,
            TceClass::Duplicate { .. } => MutantStatus::TceDuplicate,
            TceClass::Stillborn { .. } => MutantStatus::Stillborn,
        };
        report.outcomes.push(TceOutcome { id: m.id, class });
    }
    Ok(report)
}
