//! Time integration of the regularized zero-Mach system in (ρ, u) variables,
//! the per-slab Picard map and the (ρ, v) driver.

mod picard;
mod run;
mod state;
mod step;

pub use picard::{fixed_point_solve, PicardReport};
pub use run::run_simulation;
pub use state::{Formulation, Scheme, SimState, SolverConfig};
pub use step::{
    advance, solve_pressure, step_density, step_v_formulation, step_velocity, StepOutcome,
    EXPLICIT_DIFFUSION_BOUND,
};

use crate::coefficients::CoefficientError;
use crate::spectral::SpectralError;

/// Tolerance for the startup check of κ = 2μ′ in the V formulation.
pub const RELATION_TOL: f64 = 1e-10;

/// Divergence above which run_simulation projects the initial velocity.
pub const INITIAL_DIV_TOL: f64 = 1e-10;

#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error("CFL violation: max|u|·dt/h = {value:.4} exceeds {bound}")]
    Cfl { value: f64, bound: f64 },
    #[error("explicit diffusion unstable: dt·c·|ξ|² = {value:.4} exceeds {bound}")]
    ExplicitDiffusion { value: f64, bound: f64 },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Coefficient(#[from] CoefficientError),
    #[error("Picard iteration did not contract: {iterations} iterations, last residual {last_residual:e}")]
    NonContraction {
        iterations: usize,
        last_residual: f64,
        residuals: Vec<f64>,
    },
    #[error("coefficient relation violated: residual {residual:e} at rho = {rho}")]
    RelationViolation { residual: f64, rho: f64 },
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid solver config: {0}")]
    InvalidConfig(String),
    #[error("non-finite values at t = {time}")]
    NonFinite { time: f64 },
    #[error("diagnostics sink failed at t = {time}: {message}")]
    Sink { time: f64, message: String },
}

/// Receives states during run_simulation.
pub trait DiagnosticsSink {
    /// Called at step 0, every `sample_every` steps and at the final step.
    /// `previous` is the state one step earlier (None at step 0).
    fn sample(
        &mut self,
        step: usize,
        previous: Option<&SimState>,
        state: &SimState,
    ) -> Result<(), String>;

    /// Called after every accepted step, before any `sample` for that step.
    fn observe(
        &mut self,
        _step: usize,
        _previous: &SimState,
        _state: &SimState,
    ) -> Result<(), String> {
        Ok(())
    }

    fn warn(&mut self, _message: &str) {}

    /// Called once after the loop ends, also when it aborts with an error.
    fn finish(&mut self, _final_state: &SimState) -> Result<(), String> {
        Ok(())
    }
}

impl<S: DiagnosticsSink + ?Sized> DiagnosticsSink for &mut S {
    fn sample(
        &mut self,
        step: usize,
        previous: Option<&SimState>,
        state: &SimState,
    ) -> Result<(), String> {
        (**self).sample(step, previous, state)
    }

    fn observe(
        &mut self,
        step: usize,
        previous: &SimState,
        state: &SimState,
    ) -> Result<(), String> {
        (**self).observe(step, previous, state)
    }

    fn warn(&mut self, message: &str) {
        (**self).warn(message)
    }

    fn finish(&mut self, final_state: &SimState) -> Result<(), String> {
        (**self).finish(final_state)
    }
}

#[cfg(test)]
mod tests;
