//! The fuzzing loop for one mutant.

use std::collections::{BTreeSet, HashMap};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::bucket::{signature, Bucket, VirginMap};
use super::classify::{classify, Verdict};
use super::exec::{ExecOutcome, Harness};
use super::mutate::{choose_stage, mutate_input, Bounds, Stage};
use super::FuzzError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuzzConfig {
    /// Wall-clock budget; `None` means only `max_execs` limits the run.
    pub budget: Option<Duration>,
    pub max_execs: Option<u64>,
    pub rng_seed: u64,
    /// Stop at the first genuine kill.
    pub stop_at_first_kill: bool,
    /// Bytes one argument set consumes; bounds input growth.
    pub consumed_input_bytes: u64,
    /// Mutations per scheduling of an unfavored entry.
    pub base_energy: u32,
    /// Kills kept in the outcome (all are counted).
    pub max_recorded_kills: usize,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            budget: Some(Duration::from_secs(60)),
            max_execs: None,
            rng_seed: 0,
            stop_at_first_kill: true,
            consumed_input_bytes: 0,
            base_energy: 16,
            max_recorded_kills: 32,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "origin", rename_all = "kebab-case")]
pub enum InputOrigin {
    Seed { index: usize },
    Mutated { parent: usize, stage: Stage },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KillOrigin {
    Seed,
    Fuzzed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueueEntry {
    pub bytes: Vec<u8>,
    pub found_at: Duration,
    pub exec_index: u64,
    pub origin: InputOrigin,
    pub signature: Vec<(u16, Bucket)>,
    pub favored: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KillRecord {
    pub input: Vec<u8>,
    pub verdict: Verdict,
    pub origin: KillOrigin,
    pub elapsed: Duration,
    pub exec_index: u64,
    /// Survived the false-positive check.
    pub genuine: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuzzOutcome {
    /// A genuine kill was found.
    pub killed: bool,
    pub kills: Vec<KillRecord>,
    pub kill_count: u64,
    pub false_positive_count: u64,
    pub executions: u64,
    pub queue_size: usize,
    pub hangs: u64,
    pub precondition_violations: u64,
    pub elapsed: Duration,
    pub first_kill: Option<FirstKill>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FirstKill {
    pub elapsed: Duration,
    pub exec_index: u64,
    pub origin: KillOrigin,
}

impl FuzzOutcome {
    pub fn first_genuine(&self) -> Option<&KillRecord> {
        self.kills.iter().find(|k| k.genuine)
    }
}

/// Executes inputs; the driver harness in production, a closure in tests.
pub trait Executor {
    fn execute(&mut self, input: &[u8]) -> Result<ExecOutcome, FuzzError>;
}

impl Executor for Harness {
    fn execute(&mut self, input: &[u8]) -> Result<ExecOutcome, FuzzError> {
        self.run(input)
    }
}

impl<F: FnMut(&[u8]) -> Result<ExecOutcome, FuzzError>> Executor for F {
    fn execute(&mut self, input: &[u8]) -> Result<ExecOutcome, FuzzError> {
        self(input)
    }
}

struct State<'a> {
    cfg: &'a FuzzConfig,
    start: Instant,
    virgin: VirginMap,
    queue: Vec<QueueEntry>,
    top_rated: HashMap<u16, usize>,
    seen_kills: BTreeSet<Vec<u8>>,
    out: FuzzOutcome,
    done: bool,
}

impl State<'_> {
    fn exhausted(&self) -> bool {
        self.done
            || self.cfg.max_execs.is_some_and(|m| self.out.executions >= m)
            || self.cfg.budget.is_some_and(|b| self.start.elapsed() >= b)
    }

    fn refresh_favored(&mut self, idx: usize) {
        let len = self.queue[idx].bytes.len();
        for &(edge, _) in &self.queue[idx].signature {
            let better = match self.top_rated.get(&edge) {
                Some(&cur) => len < self.queue[cur].bytes.len(),
                None => true,
            };
            if better {
                self.top_rated.insert(edge, idx);
            }
        }
        let favored: BTreeSet<usize> = self.top_rated.values().copied().collect();
        for (i, e) in self.queue.iter_mut().enumerate() {
            e.favored = favored.contains(&i);
        }
    }

    fn admit(&mut self, bytes: Vec<u8>, origin: InputOrigin, outcome: &ExecOutcome) {
        self.virgin.mark(&outcome.coverage);
        self.queue.push(QueueEntry {
            bytes,
            found_at: self.start.elapsed(),
            exec_index: self.out.executions,
            origin,
            signature: signature(&outcome.coverage),
            favored: false,
        });
        self.refresh_favored(self.queue.len() - 1);
    }

    fn run_one(
        &mut self,
        exec: &mut dyn Executor,
        verify: &mut dyn FnMut(&[u8]) -> Result<bool, FuzzError>,
        bytes: Vec<u8>,
        origin: InputOrigin,
        always_admit: bool,
    ) -> Result<(), FuzzError> {
        let outcome = exec.execute(&bytes)?;
        self.out.executions += 1;
        let verdict = classify(&outcome.termination, &outcome.trace);
        match verdict {
            Verdict::Survived => {
                if always_admit || self.virgin.is_interesting(&outcome.coverage) {
                    self.admit(bytes, origin, &outcome);
                }
            }
            Verdict::TimeoutHang => self.out.hangs += 1,
            Verdict::PreconditionViolation => self.out.precondition_violations += 1,
            Verdict::KillDiff | Verdict::KillCrashMut => {
                self.out.kill_count += 1;
                if !self.seen_kills.insert(bytes.clone()) {
                    return Ok(());
                }
                let genuine = verify(&bytes)?;
                let kill_origin = match origin {
                    InputOrigin::Seed { .. } => KillOrigin::Seed,
                    InputOrigin::Mutated { .. } => KillOrigin::Fuzzed,
                };
                let elapsed = self.start.elapsed();
                if !genuine {
                    self.out.false_positive_count += 1;
                }
                if genuine && !self.out.killed {
                    self.out.killed = true;
                    self.out.first_kill =
                        Some(FirstKill { elapsed, exec_index: self.out.executions, origin: kill_origin });
                    if self.cfg.stop_at_first_kill {
                        self.done = true;
                    }
                }
                if self.out.kills.len() < self.cfg.max_recorded_kills || (genuine && self.out.first_genuine().is_none()) {
                    self.out.kills.push(KillRecord {
                        input: bytes,
                        verdict,
                        origin: kill_origin,
                        elapsed,
                        exec_index: self.out.executions,
                        genuine,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Run the seeds, then mutate queue entries round-robin until a genuine
/// kill (when configured) or the budget ends. `verify` returns whether a
/// killing input is genuine.
pub fn fuzz_mutant(
    exec: &mut dyn Executor,
    seeds: &[Vec<u8>],
    cfg: &FuzzConfig,
    verify: &mut dyn FnMut(&[u8]) -> Result<bool, FuzzError>,
) -> Result<FuzzOutcome, FuzzError> {
    if seeds.is_empty() {
        return Err(FuzzError::NoSeeds);
    }
    let mut st = State {
        cfg,
        start: Instant::now(),
        virgin: VirginMap::new(),
        queue: Vec::new(),
        top_rated: HashMap::new(),
        seen_kills: BTreeSet::new(),
        out: FuzzOutcome::default(),
        done: false,
    };
    for (i, seed) in seeds.iter().enumerate() {
        if st.exhausted() {
            break;
        }
        st.run_one(exec, verify, seed.clone(), InputOrigin::Seed { index: i }, true)?;
    }
    if st.queue.is_empty() {
        // no seed survived; keep mutating them anyway
        for (i, seed) in seeds.iter().enumerate() {
            st.queue.push(QueueEntry {
                bytes: seed.clone(),
                found_at: Duration::ZERO,
                exec_index: 0,
                origin: InputOrigin::Seed { index: i },
                signature: Vec::new(),
                favored: false,
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let bounds = Bounds::for_consumed(cfg.consumed_input_bytes);
    let mut cursor = 0;
    while !st.exhausted() {
        let parent = cursor % st.queue.len();
        cursor += 1;
        let energy = cfg.base_energy.max(1) * if st.queue[parent].favored { 2 } else { 1 };
        for _ in 0..energy {
            if st.exhausted() {
                break;
            }
            let stage = choose_stage(&mut rng);
            let other = if st.queue.len() > 1 {
                let mut j = rng.random_range(0..st.queue.len() - 1);
                if j >= parent {
                    j += 1;
                }
                Some(st.queue[j].bytes.clone())
            } else {
                None
            };
            let child = mutate_input(&st.queue[parent].bytes, &mut rng, stage, bounds, other.as_deref());
            st.run_one(exec, verify, child, InputOrigin::Mutated { parent, stage }, false)?;
        }
    }
    st.out.queue_size = st.queue.len();
    st.out.elapsed = st.start.elapsed();
    Ok(st.out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuzz::bucket::MAP_SIZE;
    use crate::fuzz::exec::{Checkpoint, Termination};

    /// Simulated driver: the mutant diverges when the first byte is 0x42;
    /// coverage reflects the first byte's high nibble.
    fn fake(input: &[u8]) -> Result<ExecOutcome, FuzzError> {
        let mut coverage = vec![0u8; MAP_SIZE];
        let b = input.first().copied().unwrap_or(0);
        coverage[1] = 1;
        coverage[2 + (b >> 4) as usize] = 1 + (b & 0x0f);
        let (termination, last) = if b == 0x42 {
            (Termination::Signal(6), Checkpoint::Diff)
        } else {
            (Termination::Exit(0), Checkpoint::Eq)
        };
        let trace = vec![Checkpoint::CallOrig, Checkpoint::RetOrig, Checkpoint::CallMut, Checkpoint::RetMut, last];
        Ok(ExecOutcome { termination, trace, coverage, wall: Duration::ZERO })
    }

    fn cfg(seed: u64) -> FuzzConfig {
        FuzzConfig {
            budget: None,
            max_execs: Some(4000),
            rng_seed: seed,
            consumed_input_bytes: 2,
            ..FuzzConfig::default()
        }
    }

    #[test]
    fn no_seeds_is_error() {
        let r = fuzz_mutant(&mut fake, &[], &cfg(0), &mut |_| Ok(true));
        assert!(matches!(r, Err(FuzzError::NoSeeds)));
    }

    #[test]
    fn seed_kill_needs_no_fuzzing() {
        let out = fuzz_mutant(&mut fake, &[vec![0x42, 0]], &cfg(0), &mut |_| Ok(true)).unwrap();
        assert!(out.killed);
        assert_eq!(out.executions, 1);
        assert_eq!(out.first_kill.unwrap().origin, KillOrigin::Seed);
    }

    #[test]
    fn fuzzing_finds_kill_and_replays_deterministically() {
        let seeds = vec![vec![0, 0], vec![0xFF, 0]];
        let a = fuzz_mutant(&mut fake, &seeds, &cfg(7), &mut |_| Ok(true)).unwrap();
        let b = fuzz_mutant(&mut fake, &seeds, &cfg(7), &mut |_| Ok(true)).unwrap();
        assert!(a.killed);
        assert_eq!(a.first_kill.unwrap().origin, KillOrigin::Fuzzed);
        assert_eq!(a.executions, b.executions);
        assert_eq!(a.first_kill.unwrap().exec_index, b.first_kill.unwrap().exec_index);
        assert_eq!(a.kills[0].input[0], 0x42);
    }

    #[test]
    fn false_positives_do_not_stop_fuzzing() {
        let seeds = vec![vec![0x42]];
        let out = fuzz_mutant(&mut fake, &seeds, &cfg(1), &mut |_| Ok(false)).unwrap();
        assert!(!out.killed);
        assert_eq!(out.executions, 4000);
        assert!(out.false_positive_count >= 1);
        assert!(out.kills.iter().all(|k| !k.genuine));
    }

    #[test]
    fn queue_entries_were_new_at_admission() {
        let seeds = vec![vec![0, 0]];
        let mut c = cfg(3);
        c.stop_at_first_kill = true;
        c.max_execs = Some(1000);
        let mut log: Vec<Vec<u8>> = Vec::new();
        let mut exec = |i: &[u8]| {
            log.push(i.to_vec());
            let mut o = fake(i)?;
            // never kill so the queue keeps growing
            o.termination = Termination::Exit(0);
            o.trace.pop();
            o.trace.push(Checkpoint::Eq);
            Ok(o)
        };
        let out = fuzz_mutant(&mut exec, &seeds, &c, &mut |_| Ok(true)).unwrap();
        assert!(out.queue_size > 1);
        assert_eq!(out.executions, 1000);
    }
}
