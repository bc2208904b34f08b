//! Compiling and linking drivers, subjects and mutants.

use std::io::ErrorKind;
use std::path::{Path, PathBuf};
use std::process::Command;

use indexmap::IndexMap;

use super::CampaignError;
use crate::c_model::{emit_layout_probe, layout_of, AbiProfile, CType, Layout, Mismatch, ProbeTarget, TypeEnvironment};
use crate::driver_synth::RUNTIME_HEADER;

pub const RUNTIME_H: &str = include_str!("../../runtime/motif_runtime.h");
pub const RUNTIME_C: &str = include_str!("../../runtime/motif_runtime.c");

/// Write the runtime header and source into `dir`; returns the source path.
pub fn write_runtime(dir: &Path) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(RUNTIME_HEADER), RUNTIME_H)?;
    let c = dir.join("motif_runtime.c");
    std::fs::write(&c, RUNTIME_C)?;
    Ok(c)
}

#[derive(Debug, Clone)]
pub struct Toolchain {
    pub cc: String,
    pub cflags: Vec<String>,
    /// `-I` flags.
    pub includes: Vec<String>,
}

/// Compiler diagnostics of a failed step.
pub type BuildResult = Result<Result<(), String>, CampaignError>;

impl Toolchain {
    fn run(&self, args: &[String]) -> BuildResult {
        let out = Command::new(&self.cc).args(args).output().map_err(|e| match e.kind() {
            ErrorKind::NotFound => CampaignError::CompilerUnavailable(self.cc.clone()),
            _ => CampaignError::Io(e),
        })?;
        if out.status.success() {
            Ok(Ok(()))
        } else {
            Ok(Err(String::from_utf8_lossy(&out.stderr).into_owned()))
        }
    }

    /// Fails with `CompilerUnavailable` when `cc` cannot be started.
    pub fn check(&self) -> Result<(), CampaignError> {
        self.run(&["--version".to_string()])?
            .map_err(|_| CampaignError::CompilerUnavailable(format!("{} --version failed", self.cc)))
    }

    pub fn compile(&self, src: &Path, out: &Path, extra_includes: &[&Path]) -> BuildResult {
        let mut args = self.cflags.clone();
        args.extend(self.includes.iter().cloned());
        args.extend(extra_includes.iter().map(|d| format!("-I{}", d.display())));
        args.extend(["-c".into(), src.display().to_string(), "-o".into(), out.display().to_string()]);
        self.run(&args)
    }

    /// Link `objects` in order; for symbols defined more than once the first
    /// definition wins, so the original's globals are shared with the mutant.
    pub fn link(&self, objects: &[PathBuf], out: &Path) -> BuildResult {
        let mut args: Vec<String> = objects.iter().map(|o| o.display().to_string()).collect();
        args.extend(["-Wl,--allow-multiple-definition".into(), "-o".into(), out.display().to_string()]);
        self.run(&args)
    }
}

/// Probe name of tag `t` of `ty`: `struct_t`, `union_t` or `enum_t`.
fn tag_probe_name(t: &str, ty: &CType) -> String {
    let kw = match ty {
        CType::Union(_) => "union",
        CType::Enum(_) => "enum",
        _ => "struct",
    };
    format!("{kw}_{t}")
}

/// Every typedef and tag of `env` with its computed layout. Types whose
/// layout cannot be computed (incomplete, void) are skipped.
pub fn probe_targets(env: &TypeEnvironment, abi: &AbiProfile) -> (Vec<ProbeTarget>, IndexMap<String, Layout>) {
    let mut targets = Vec::new();
    let mut computed = IndexMap::new();
    let named = env
        .typedefs
        .keys()
        .map(|n| (n.clone(), CType::alias(n.clone())))
        .chain(env.tags.iter().map(|(t, ty)| (tag_probe_name(t, ty), ty.clone())));
    for (name, ty) in named {
        if let Ok(l) = layout_of(&ty, env, abi) {
            targets.push(ProbeTarget::new(name.clone(), ty));
            computed.insert(name, l);
        }
    }
    (targets, computed)
}

/// Compile and run the layout probe for every type of `env`; returns the
/// computed layouts and the disagreements with the compiler.
pub fn run_layout_probe(
    tc: &Toolchain,
    env: &TypeEnvironment,
    abi: &AbiProfile,
    workdir: &Path,
) -> Result<(IndexMap<String, Layout>, Vec<Mismatch>), CampaignError> {
    let (targets, computed) = probe_targets(env, abi);
    std::fs::create_dir_all(workdir)?;
    let src = workdir.join("layout_probe.c");
    std::fs::write(&src, emit_layout_probe(env, &targets)?)?;
    let exe = workdir.join("layout_probe");
    let mut args = tc.cflags.clone();
    args.extend([src.display().to_string(), "-o".into(), exe.display().to_string()]);
    tc.run(&args)?.map_err(|d| CampaignError::Build(format!("layout probe: {}", d.trim())))?;
    let out = Command::new(&exe).output()?;
    if !out.status.success() {
        return Err(CampaignError::Build(format!("layout probe exited with {}", out.status)));
    }
    let mismatches = crate::c_model::reconcile_layouts(&computed, &String::from_utf8_lossy(&out.stdout))?;
    Ok((computed, mismatches))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_compiler() {
        let t = Toolchain { cc: "no-such-cc-xyz".into(), cflags: vec![], includes: vec![] };
        assert!(matches!(t.check(), Err(CampaignError::CompilerUnavailable(_))));
    }

    #[test]
    fn runtime_builds() {
        let dir = tempfile::tempdir().unwrap();
        let c = write_runtime(dir.path()).unwrap();
        let t = Toolchain { cc: "cc".into(), cflags: vec!["-Wall".into(), "-Werror".into()], includes: vec![] };
        t.compile(&c, &dir.path().join("rt.o"), &[]).unwrap().unwrap();
    }

    #[test]
    fn probe_agrees_on_padding() {
        let src = "struct P { char c; double d; short s; }; typedef union { int i; char b[5]; } U; enum E { A, B };";
        let env = crate::c_model::parse_declarations(src, &Default::default()).unwrap().env;
        let dir = tempfile::tempdir().unwrap();
        let t = Toolchain { cc: "cc".into(), cflags: vec![], includes: vec![] };
        let (computed, mismatches) = run_layout_probe(&t, &env, &AbiProfile::lp64(), dir.path()).unwrap();
        assert_eq!(computed.len(), 3);
        assert_eq!(computed["struct_P"].size, 24);
        assert!(mismatches.is_empty(), "{mismatches:?}");
    }
}
