//! Coverage-guided fuzzing of one differential driver.

mod bucket;
mod classify;
mod engine;
mod exec;
mod mutate;

use thiserror::Error;

pub use bucket::{bucketize, signature, Bucket, VirginMap, MAP_SIZE};
pub use classify::{classify, Verdict, SIGABRT};
pub use engine::{
    fuzz_mutant, Executor, FirstKill, FuzzConfig, FuzzOutcome, InputOrigin, KillOrigin, KillRecord, QueueEntry,
};
pub use exec::{parse_trace, reset_coverage, run_harness, Checkpoint, ExecOutcome, Harness, Termination, DEFAULT_TIMEOUT};
pub use mutate::{add_at, choose_stage, flip_bits, mutate_input, Bounds, Stage, ARITH_MAX};

#[derive(Debug, Error)]
pub enum FuzzError {
    #[error("no seed inputs")]
    NoSeeds,
    #[error("cannot spawn {0}: {1}")]
    Spawn(String, std::io::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
