//! Configuration parsing, initial data, run orchestration with deterministic
//! output, verification of output directories and the convergence driver.

mod config;
mod convergence;
mod initial;
mod output;

pub use config::{
    parse_config, FourierMode, GridConfig, InitialDataSpec, InitialKind, ModelConfig, ModelSpec,
    RegularizationConfig, RunConfig, TimeConfig, Tolerances,
};
pub use convergence::{
    convergence_study, cross_grid_distance, ConvergenceMetric, ConvergenceTable, ExactSolution,
    LevelResult,
};
pub use initial::{generate_initial_data, initial_state, random_bandlimited_field};
pub use output::{
    build_report, evaluate_checks, read_diagnostics, read_manifest, run_to_directory,
    snapshot_name, verify, CheckResult, OutputSink, RunManifest, RunReport, DIAGNOSTICS_FILE,
    MANIFEST_FILE, REPORT_FILE,
};

use crate::besov::BesovError;
use crate::coefficients::CoefficientError;
use crate::diagnostics::DiagnosticsError;
use crate::solver::SolverError;
use crate::spectral::SpectralError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Line 0 means the problem is not tied to a single line.
    #[error("{}", fmt_config(*line, message))]
    Config { line: usize, message: String },
    #[error("initial data: {0}")]
    InitialData(String),
    #[error("precondition: {0}")]
    Precondition(String),
    #[error("output: {0}")]
    Output(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Coefficient(#[from] CoefficientError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Diagnostics(#[from] DiagnosticsError),
    #[error(transparent)]
    Besov(#[from] BesovError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn fmt_config(line: usize, message: &str) -> String {
    if line == 0 {
        format!("config: {message}")
    } else {
        format!("config line {line}: {message}")
    }
}

/// `count` evenly spaced densities covering [lo, hi], endpoints included.
pub fn density_samples(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        // Clamped: lo + (hi − lo) can round one ulp past hi.
        _ => (0..count)
            .map(|i| (lo + (hi - lo) * i as f64 / (count - 1) as f64).min(hi))
            .collect(),
    }
}
