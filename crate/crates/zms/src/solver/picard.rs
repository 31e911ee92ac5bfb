//! Picard iteration of the frozen-coefficient map F over one time slab.
//!
//! Given a guess (ρ̃, ũ), F returns the backward-Euler update with every
//! coefficient and every spatial operator evaluated on the guess:
//! ρ = P_n[ρⁿ − dt·R(ρ̃; ⟨ũ⟩_ε, ⟨κ(ρ̃)⟩_ε)], u = P·P_n[uⁿ − dt·L_{ρ,ũ}ũ].
//! A fixed point is a fully implicit step, so contraction needs dt small
//! against both the diffusive and the advective time scales.

use crate::coefficients::CoefficientModel;
use crate::spectral::{leray_project, ScalarField, VectorField};

use super::step::{
    advance_density, advance_with, check_positive, check_stability, finish_state, Frozen,
    MomentumOperator, Regularizer, StepOutcome,
};
use super::{Formulation, Scheme, SimState, SolverConfig, SolverError};

/// Iterates whose residual grows past this multiple of the first one are
/// declared divergent without waiting for `picard_max_iters`.
const DIVERGENCE_FACTOR: f64 = 1e8;

#[derive(Clone, Debug, PartialEq)]
pub struct PicardReport {
    pub iterations: usize,
    /// ‖(ρ, u) − (ρ̃, ũ)‖_{L²} after each iteration.
    pub residuals: Vec<f64>,
}

impl PicardReport {
    /// Successive residual ratios r_{k+1}/r_k.
    pub fn ratios(&self) -> Vec<f64> {
        self.residuals.windows(2).map(|w| w[1] / w[0]).collect()
    }
}

/// Advances one slab of length `config.dt` by the Picard fixed point.
pub fn fixed_point_solve(
    state: &SimState,
    config: &SolverConfig,
    model: &CoefficientModel,
) -> Result<(SimState, PicardReport), SolverError> {
    config.validate()?;
    let reg = Regularizer::new(state, config)?;
    let mut picard = config.clone();
    picard.use_picard = true;
    let (next, outcome) = advance_with(state, &picard, model, &reg, config.dt)?;
    Ok((
        next,
        PicardReport {
            iterations: outcome.picard_iterations,
            residuals: outcome.picard_residuals,
        },
    ))
}

fn apply_map(
    state: &SimState,
    rho_guess: &ScalarField,
    u_guess: &VectorField,
    pi_guess: &ScalarField,
    model: &CoefficientModel,
    reg: &Regularizer,
    dt: f64,
    projection: bool,
) -> Result<(ScalarField, VectorField, ScalarField, usize), SolverError> {
    let frozen = Frozen::new(rho_guess, u_guess, model, reg);
    let rho = advance_density(
        &state.rho,
        rho_guess,
        &frozen,
        dt,
        Scheme::FullyExplicit,
        reg,
    );
    check_positive(&rho, state.time + dt)?;
    let op = MomentumOperator::new(&rho, u_guess, &frozen, model);
    let (pi, iterations) = op.solve_pressure(Some(pi_guess))?;
    let u = reg.truncate_vector(state.velocity.axpy(-dt, &op.tendency(&pi, 0.0)));
    let u = if projection { leray_project(&u) } else { u };
    Ok((rho, u, pi, iterations))
}

pub(crate) fn fixed_point_with(
    state: &SimState,
    config: &SolverConfig,
    model: &CoefficientModel,
    reg: &Regularizer,
    dt: f64,
) -> Result<(SimState, StepOutcome), SolverError> {
    debug_assert_eq!(state.formulation, Formulation::U);
    {
        let frozen = Frozen::new(&state.rho, &state.velocity, model, reg);
        check_stability(&state.rho, &frozen, dt, config, model)?;
    }
    let mut rho_guess = state.rho.clone();
    let mut u_guess = state.velocity.clone();
    let mut pi_guess = state.pi.clone();
    let mut residuals = Vec::new();
    let mut pressure_iterations = 0;
    for k in 1..=config.picard_max_iters {
        let (rho, u, pi, its) = match apply_map(
            state,
            &rho_guess,
            &u_guess,
            &pi_guess,
            model,
            reg,
            dt,
            config.projection,
        ) {
            Ok(next) => next,
            // The iterate left the admissible set (ρ > 0, finite): F is not contracting there.
            Err(SolverError::InvalidState(_) | SolverError::NonFinite { .. }) => {
                residuals.push(f64::INFINITY);
                break;
            }
            Err(e) => return Err(e),
        };
        pressure_iterations += its;
        let residual = (rho.sub(&rho_guess).l2_norm_sq() + u.sub(&u_guess).l2_norm_sq()).sqrt();
        residuals.push(residual);
        rho_guess = rho;
        u_guess = u;
        pi_guess = pi;
        if residual <= config.picard_tol {
            let next = finish_state(state, rho_guess, u_guess, pi_guess, state.time + dt, config)?;
            return Ok((
                next,
                StepOutcome {
                    pressure_iterations,
                    picard_iterations: k,
                    picard_residuals: residuals,
                },
            ));
        }
        if !residual.is_finite()
            || residual > DIVERGENCE_FACTOR * residuals[0].max(config.picard_tol)
        {
            break;
        }
    }
    Err(SolverError::NonContraction {
        iterations: residuals.len(),
        last_residual: *residuals.last().unwrap_or(&f64::INFINITY),
        residuals,
    })
}
