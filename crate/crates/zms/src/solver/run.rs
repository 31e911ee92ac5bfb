use crate::coefficients::{u_from_v, v_from_u, CoefficientModel};
use crate::spectral::{divergence, leray_project};

use super::step::{advance_with, check_model_relation, Regularizer};
use super::{DiagnosticsSink, Formulation, SimState, SolverConfig, SolverError, INITIAL_DIV_TOL};

/// Number of steps to reach t_end; the last one may be shorter than dt.
fn step_count(config: &SolverConfig) -> usize {
    let ratio = config.t_end / config.dt;
    let n = ratio.ceil();
    // Absorb roundoff like 0.3/0.1 = 3.0000000000000004.
    if n - ratio > 1.0 - 1e-9 {
        (n as usize).saturating_sub(1)
    } else {
        n as usize
    }
}

/// Projects and truncates the initial data so that div u₀ = 0 and the
/// Friedrichs band is respected.
fn prepare_initial(
    initial: &SimState,
    config: &SolverConfig,
    model: &CoefficientModel,
    reg: &Regularizer,
    sink: &mut impl DiagnosticsSink,
) -> Result<SimState, SolverError> {
    let mut state = initial.clone();
    if state.formulation == Formulation::V {
        check_model_relation(model)?;
    }
    let mut u = match state.formulation {
        Formulation::U => state.velocity.clone(),
        Formulation::V => u_from_v(&state.rho, &state.velocity, model)?,
    };
    let div = divergence(&u).linf_norm();
    if div > INITIAL_DIV_TOL {
        sink.warn(&format!(
            "initial velocity has ‖div u‖∞ = {div:.3e}; projecting onto divergence-free fields"
        ));
        u = leray_project(&u);
    }
    state.rho = reg.truncate_scalar(state.rho);
    u = reg.truncate_vector(u);
    state.velocity = match state.formulation {
        Formulation::U => u,
        Formulation::V => v_from_u(&state.rho, &u, model)?,
    };
    state.friedrichs_n = config.friedrichs_n;
    state.eps_mollify = config.eps_mollify;
    state.validate()?;
    Ok(state)
}

/// Advances `initial` to `config.t_end`, feeding samples to `sink`.
///
/// On a step failure the sink still receives `finish` with the last good
/// state before the error is returned.
pub fn run_simulation(
    initial: &SimState,
    config: &SolverConfig,
    model: &CoefficientModel,
    mut sink: impl DiagnosticsSink,
) -> Result<SimState, SolverError> {
    config.validate()?;
    initial.validate()?;
    if config.t_end == 0.0 {
        sink.sample(0, None, initial)
            .map_err(|message| SolverError::Sink {
                time: initial.time,
                message,
            })?;
        sink.finish(initial).map_err(|message| SolverError::Sink {
            time: initial.time,
            message,
        })?;
        return Ok(initial.clone());
    }
    let reg = Regularizer::new(initial, config)?;
    let mut state = prepare_initial(initial, config, model, &reg, &mut sink)?;
    let t0 = state.time;
    sink.sample(0, None, &state)
        .map_err(|message| SolverError::Sink { time: t0, message })?;

    let steps = step_count(config);
    for k in 1..=steps {
        let target = if k == steps {
            t0 + config.t_end
        } else {
            t0 + k as f64 * config.dt
        };
        let dt = target - state.time;
        let next = match advance_with(&state, config, model, &reg, dt) {
            Ok((mut next, _)) => {
                next.time = target;
                next
            }
            Err(e) => {
                let _ = sink.finish(&state);
                return Err(e);
            }
        };
        let mut delivered = sink.observe(k, &state, &next);
        if delivered.is_ok() && (k % config.sample_every == 0 || k == steps) {
            delivered = sink.sample(k, Some(&state), &next);
        }
        if let Err(message) = delivered {
            let _ = sink.finish(&next);
            return Err(SolverError::Sink {
                time: next.time,
                message,
            });
        }
        state = next;
    }
    sink.finish(&state).map_err(|message| SolverError::Sink {
        time: state.time,
        message,
    })?;
    Ok(state)
}
