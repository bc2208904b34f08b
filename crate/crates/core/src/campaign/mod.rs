//! Whole-campaign orchestration: configuration, building, fuzzing every
//! mutant, the results log and reports.

pub mod build;
pub mod config;
pub mod fisher;
mod pipeline;
pub mod records;
pub mod report;

use thiserror::Error;

use crate::c_model::CModelError;
use crate::cbody::ScanError;
use crate::driver_synth::DriverError;
use crate::fuzz::FuzzError;
use crate::mutagen::MutagenError;
use crate::seedgen::SeedError;

pub use build::{probe_targets, run_layout_probe, write_runtime, Toolchain, RUNTIME_C, RUNTIME_H};
pub use config::CampaignConfig;
pub use fisher::fisher_exact;
pub use pipeline::{
    plan_campaign, prepare_function, render_plan, run_campaign, verify_kill, CampaignOutcome, CampaignPlan,
    FunctionPlan, PreparedFunction,
};
pub use records::{append_records, read_records, CampaignRecord, MutantVerdict};
pub use report::{compare, curves_csv, fisher_table, format_score, kill_curve, mutation_score, render_summary, summarize};

#[derive(Debug, Error)]
pub enum CampaignError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("compiler unavailable: {0}")]
    CompilerUnavailable(String),
    #[error(transparent)]
    Model(#[from] CModelError),
    #[error(transparent)]
    Scan(#[from] ScanError),
    #[error(transparent)]
    Mutagen(#[from] MutagenError),
    #[error(transparent)]
    Driver(#[from] DriverError),
    #[error(transparent)]
    Seed(#[from] SeedError),
    #[error(transparent)]
    Fuzz(#[from] FuzzError),
    #[error("function `{0}` is not defined in any subject source")]
    UnknownFunction(String),
    #[error("build failed: {0}")]
    Build(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

impl CampaignError {
    /// Missing toolchain, as opposed to a problem with the subject.
    pub fn is_environment(&self) -> bool {
        matches!(
            self,
            CampaignError::CompilerUnavailable(_) | CampaignError::Mutagen(MutagenError::CompilerUnavailable(_))
        )
    }
}
