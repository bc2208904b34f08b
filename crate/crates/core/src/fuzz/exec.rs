//! Running a driver once on one input.

use std::fs::{File, OpenOptions};
use std::io::Write;
use std::os::unix::process::ExitStatusExt;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use wait_timeout::ChildExt;

use super::bucket::MAP_SIZE;
use super::FuzzError;

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(1);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    Exit(i32),
    Signal(i32),
    Timeout,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Checkpoint {
    CallOrig,
    RetOrig,
    CallMut,
    RetMut,
    Diff,
    Eq,
}

impl Checkpoint {
    pub fn parse(token: &str) -> Option<Self> {
        Some(match token {
            "CALL_ORIG" => Checkpoint::CallOrig,
            "RET_ORIG" => Checkpoint::RetOrig,
            "CALL_MUT" => Checkpoint::CallMut,
            "RET_MUT" => Checkpoint::RetMut,
            "DIFF" => Checkpoint::Diff,
            "EQ" => Checkpoint::Eq,
            _ => return None,
        })
    }

    pub fn token(self) -> &'static str {
        match self {
            Checkpoint::CallOrig => "CALL_ORIG",
            Checkpoint::RetOrig => "RET_ORIG",
            Checkpoint::CallMut => "CALL_MUT",
            Checkpoint::RetMut => "RET_MUT",
            Checkpoint::Diff => "DIFF",
            Checkpoint::Eq => "EQ",
        }
    }
}

/// Checkpoint tokens in `log`, one per line; other lines are ignored.
pub fn parse_trace(log: &str) -> Vec<Checkpoint> {
    log.lines().filter_map(|l| Checkpoint::parse(l.trim())).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecOutcome {
    pub termination: Termination,
    pub trace: Vec<Checkpoint>,
    /// Raw hit counters, `MAP_SIZE` bytes.
    pub coverage: Vec<u8>,
    pub wall: Duration,
}

/// Files and settings for repeatedly running one driver executable.
#[derive(Debug, Clone)]
pub struct Harness {
    pub exe: PathBuf,
    pub workdir: PathBuf,
    pub timeout: Duration,
    pub rand_seed: u64,
    /// Read checkpoints from the child's stderr instead of the log file.
    pub log_on_stderr: bool,
}

impl Harness {
    pub fn new(exe: impl Into<PathBuf>, workdir: impl Into<PathBuf>) -> Self {
        Harness {
            exe: exe.into(),
            workdir: workdir.into(),
            timeout: DEFAULT_TIMEOUT,
            rand_seed: 0,
            log_on_stderr: false,
        }
    }

    pub fn input_path(&self) -> PathBuf {
        self.workdir.join("cur_input")
    }

    pub fn coverage_path(&self) -> PathBuf {
        self.workdir.join("coverage.map")
    }

    pub fn log_path(&self) -> PathBuf {
        self.workdir.join("checkpoints.log")
    }

    fn stderr_path(&self) -> PathBuf {
        self.workdir.join("stderr.log")
    }

    pub fn run(&self, input: &[u8]) -> Result<ExecOutcome, FuzzError> {
        std::fs::create_dir_all(&self.workdir)?;
        std::fs::write(self.input_path(), input)?;
        reset_coverage(&self.coverage_path())?;
        File::create(self.log_path())?;
        let stderr = File::create(self.stderr_path())?;

        let start = Instant::now();
        let mut child = Command::new(&self.exe)
            .arg(self.input_path())
            .env("MOTIF_COV_FILE", self.coverage_path())
            .env("MOTIF_LOG_FILE", self.log_path())
            .env("MOTIF_RAND_SEED", self.rand_seed.to_string())
            .stdin(Stdio::null())
            .stdout(Stdio::null())
            .stderr(stderr)
            .spawn()
            .map_err(|e| FuzzError::Spawn(self.exe.display().to_string(), e))?;
        let termination = match child.wait_timeout(self.timeout)? {
            Some(status) => match (status.code(), status.signal()) {
                (Some(code), _) => Termination::Exit(code),
                (None, Some(sig)) => Termination::Signal(sig),
                (None, None) => Termination::Exit(-1),
            },
            None => {
                let _ = child.kill();
                let _ = child.wait();
                Termination::Timeout
            }
        };
        let wall = start.elapsed();
        let log = std::fs::read(if self.log_on_stderr { self.stderr_path() } else { self.log_path() })?;
        let mut coverage = std::fs::read(self.coverage_path())?;
        coverage.resize(MAP_SIZE, 0);
        Ok(ExecOutcome { termination, trace: parse_trace(&String::from_utf8_lossy(&log)), coverage, wall })
    }
}

/// Create or zero the coverage file at its fixed size.
pub fn reset_coverage(path: &Path) -> std::io::Result<()> {
    let mut f = OpenOptions::new().create(true).write(true).truncate(true).open(path)?;
    f.write_all(&[0u8; MAP_SIZE])?;
    Ok(())
}

/// One run of `exe` on `input` in a scratch directory.
pub fn run_harness(exe: &Path, input: &[u8], timeout: Duration) -> Result<ExecOutcome, FuzzError> {
    let dir = tempfile::tempdir()?;
    let mut h = Harness::new(exe, dir.path());
    h.timeout = timeout;
    h.run(input)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_parsing_skips_noise() {
        let t = parse_trace("CALL_ORIG\nsome output\nRET_ORIG\n CALL_MUT \nRET_M");
        assert_eq!(t, [Checkpoint::CallOrig, Checkpoint::RetOrig, Checkpoint::CallMut]);
    }

    #[test]
    fn missing_executable_is_spawn_failure() {
        let e = run_harness(Path::new("/nonexistent/driver"), b"", DEFAULT_TIMEOUT);
        assert!(matches!(e, Err(FuzzError::Spawn(..))));
    }

    #[test]
    fn shell_script_termination_modes() {
        let dir = tempfile::tempdir().unwrap();
        let script = dir.path().join("d.sh");
        std::fs::write(
            &script,
            "#!/bin/sh\nprintf 'CALL_ORIG\\nRET_ORIG\\n' >> \"$MOTIF_LOG_FILE\"\ncase $(cat \"$1\") in\n\
             a) printf 'CALL_MUT\\nRET_MUT\\nEQ\\n' >> \"$MOTIF_LOG_FILE\"; exit 0;;\n\
             b) kill -ABRT $$;;\nc) sleep 5;;\nesac\nexit 4\n",
        )
        .unwrap();
        std::fs::set_permissions(&script, std::os::unix::fs::PermissionsExt::from_mode(0o755)).unwrap();
        let mut h = Harness::new(&script, dir.path().join("w"));
        h.timeout = Duration::from_millis(300);
        let a = h.run(b"a").unwrap();
        assert_eq!(a.termination, Termination::Exit(0));
        assert_eq!(a.trace.last(), Some(&Checkpoint::Eq));
        assert_eq!(a.coverage.len(), MAP_SIZE);
        assert_eq!(h.run(b"b").unwrap().termination, Termination::Signal(6));
        assert_eq!(h.run(b"c").unwrap().termination, Termination::Timeout);
        let d = h.run(b"d").unwrap();
        assert_eq!(d.termination, Termination::Exit(4));
        assert_eq!(d.trace, [Checkpoint::CallOrig, Checkpoint::RetOrig]);
    }
}
