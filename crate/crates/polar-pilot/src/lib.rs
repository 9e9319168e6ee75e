//! Experiment driver for pilot selection on systematic polar codes.
//!
//! Reads flat `key = value` configurations, runs FER/BER and channel
//! estimation sweeps over a worker pool and writes CSV results. The
//! algorithms themselves live in [`polar_pilot_core`].

pub mod config;
pub mod experiment;
pub mod output;

pub use config::ExperimentConfig;
pub use experiment::{build_code, build_plan, build_spec, run_fer, run_mse, run_point, run_untimed, ResultRow};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] polar_pilot_core::Error),
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl HarnessError {
    /// Exit status for the command line: 2 for invalid input, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Core(_) | HarnessError::Config { .. } => 2,
            _ => 1,
        }
    }
}
