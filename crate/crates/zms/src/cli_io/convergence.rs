use std::thread;

use serde::{Deserialize, Serialize};

use crate::coefficients::{CoefficientModel, ModelKind};
use crate::diagnostics::{constraint_residual, solenoidal_velocity};
use crate::solver::{run_simulation, DiagnosticsSink, SimState};
use crate::spectral::{ScalarField, VectorField};

use super::{initial_state, CliError, InitialKind, RunConfig};

/// Closed-form references for the error of each level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExactSolution {
    /// u ≡ 0 with constant κ: ρ(t) = e^{κ₀tΔ}ρ₀.
    Heat,
    /// ρ ≡ 1 with Taylor-Green data: u(t) = e^{μ(1)tΔ}u₀.
    TaylorGreen,
}

/// Quantity whose error is tabulated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvergenceMetric {
    /// √(‖Δρ‖² + ‖Δu‖²) at the final time.
    State,
    /// ‖div(v + κ∇ln ρ)‖ at the final time, whose exact value is 0.
    ConstraintResidual,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelResult {
    pub n: usize,
    pub dt: f64,
    /// Error against the exact solution, or for self-convergence the
    /// distance to the next finer level (none on the finest).
    pub error: Option<f64>,
    /// log₂(e_{i−1}/e_i)
    pub order: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub reference: String,
    pub metric: ConvergenceMetric,
    pub levels: Vec<LevelResult>,
    /// Set when a level failed; levels after the first failure are dropped.
    pub aborted: Option<String>,
}

impl ConvergenceTable {
    pub fn orders(&self) -> Vec<f64> {
        self.levels.iter().filter_map(|l| l.order).collect()
    }
}

struct NullSink;

impl DiagnosticsSink for NullSink {
    fn sample(&mut self, _: usize, _: Option<&SimState>, _: &SimState) -> Result<(), String> {
        Ok(())
    }
}

/// L² distance of two fields on grids of the same length, through their
/// Fourier coefficients (Parseval), so the grids may differ in size.
/// Nyquist bins are ignored on both sides.
pub fn cross_grid_distance(a: &ScalarField, b: &ScalarField) -> Result<f64, CliError> {
    let (ga, gb) = (a.grid(), b.grid());
    if (ga.length() - gb.length()).abs() > 1e-12 * ga.length() {
        return Err(CliError::Precondition(
            "fields live on tori of different sizes".into(),
        ));
    }
    let (fine, coarse, fs, cs) = if gb.n() >= ga.n() {
        (gb, ga, b.spectrum(), a.spectrum())
    } else {
        (ga, gb, a.spectrum(), b.spectrum())
    };
    let (nf, nc) = (fine.n(), coarse.n());
    let half = (nc / 2) as i64;
    let mut sum = 0.0;
    for my in 0..nf {
        for mx in 0..nf {
            if fine.is_nyquist(mx) || fine.is_nyquist(my) {
                continue;
            }
            let (kx, ky) = (fine.wavenumber(mx), fine.wavenumber(my));
            let c = if kx.abs() < half && ky.abs() < half {
                cs[coarse.bin(ky) * nc + coarse.bin(kx)]
            } else {
                Default::default()
            };
            sum += (fs[my * nf + mx] - c).norm_sqr();
        }
    }
    Ok((fine.area() * sum).sqrt())
}

fn heat_semigroup(f: &ScalarField, diffusivity: f64, t: f64) -> ScalarField {
    let g = f.grid().clone();
    f.apply_multiplier(|mx, my| {
        let xi2 = g.frequency(mx).powi(2) + g.frequency(my).powi(2);
        (-diffusivity * xi2 * t).exp().into()
    })
}

/// Checks that `exact` applies to `config` and returns the matching diffusivity.
fn exact_diffusivity(
    config: &RunConfig,
    model: &CoefficientModel,
    exact: ExactSolution,
    initial: &SimState,
) -> Result<f64, CliError> {
    let bad = |m: &str| Err(CliError::Precondition(m.to_string()));
    if config.regularization.eps_mollify != 0.0 || config.regularization.friedrichs_n.is_some() {
        return bad("closed-form references need an unregularized run");
    }
    match exact {
        ExactSolution::Heat => {
            let ModelKind::Kazhikhov { kappa0, .. } = *model.kind() else {
                return bad("the heat reference needs constant κ (kazhikhov model)");
            };
            let u = solenoidal_velocity(initial, model)?;
            if u.linf_norm() != 0.0 {
                return bad("the heat reference needs zero initial velocity");
            }
            Ok(kappa0)
        }
        ExactSolution::TaylorGreen => {
            let InitialKind::TaylorGreen {
                density_amplitude, ..
            } = config.initial.kind
            else {
                return bad("the Taylor-Green reference needs taylor_green initial data");
            };
            if density_amplitude != 0.0 {
                return bad(
                    "the Taylor-Green reference needs constant density (density_amplitude = 0)",
                );
            }
            Ok(model.mu(config.initial.density_offset))
        }
    }
}

fn state_distance(a: &SimState, b: &SimState, model: &CoefficientModel) -> Result<f64, CliError> {
    let (ua, ub) = (
        solenoidal_velocity(a, model)?,
        solenoidal_velocity(b, model)?,
    );
    let d = [
        cross_grid_distance(&a.rho, &b.rho)?,
        cross_grid_distance(ua.x(), ub.x())?,
        cross_grid_distance(ua.y(), ub.y())?,
    ];
    Ok(d.iter().map(|x| x * x).sum::<f64>().sqrt())
}

fn exact_error(
    state: &SimState,
    initial: &SimState,
    model: &CoefficientModel,
    exact: ExactSolution,
    diffusivity: f64,
) -> Result<f64, CliError> {
    let t = state.time - initial.time;
    let u0 = solenoidal_velocity(initial, model)?;
    let mut reference = match exact {
        ExactSolution::Heat => SimState {
            rho: heat_semigroup(&initial.rho, diffusivity, t),
            velocity: VectorField::zeros(initial.grid()),
            ..initial.clone()
        },
        ExactSolution::TaylorGreen => SimState {
            velocity: u0.map_components(|c| heat_semigroup(c, diffusivity, t)),
            ..initial.clone()
        },
    };
    reference.formulation = crate::solver::Formulation::U;
    let mut state_u = state.clone();
    state_u.velocity = solenoidal_velocity(state, model)?;
    state_u.formulation = crate::solver::Formulation::U;
    state_distance(&state_u, &reference, model)
}

/// Runs the config at (dt, N), (dt/2, 2N), ... for `refinements` levels, in
/// parallel, and tabulates errors and observed orders p̂ = log₂(e_{i−1}/e_i).
///
/// Without a closed form the error of level i is its distance to level i+1
/// (successive differences), so k levels yield k−1 errors and k−2 orders.
pub fn convergence_study(
    config: &RunConfig,
    refinements: usize,
    exact: Option<ExactSolution>,
    metric: ConvergenceMetric,
) -> Result<ConvergenceTable, CliError> {
    if refinements < 2 {
        return Err(CliError::Precondition(format!(
            "a convergence study needs k >= 2 levels, got {refinements}"
        )));
    }
    config.validate().map_err(CliError::Precondition)?;
    let model = config.model.build()?;
    let levels: Vec<RunConfig> = (0..refinements)
        .map(|i| {
            let mut c = config.clone();
            c.grid.n = config.grid.n << i;
            c.time.dt = config.time.dt / (1u64 << i) as f64;
            c.time.sample_every = config.time.sample_every << i;
            c
        })
        .collect();
    // Each level owns its state; results come back in level order.
    let results: Vec<Result<(SimState, SimState), String>> = thread::scope(|scope| {
        let handles: Vec<_> = levels
            .iter()
            .map(|c| {
                let model = &model;
                scope.spawn(move || -> Result<(SimState, SimState), String> {
                    let initial = initial_state(c, model).map_err(|e| e.to_string())?;
                    let fin = run_simulation(&initial, &c.solver_config(), model, NullSink)
                        .map_err(|e| e.to_string())?;
                    Ok((initial, fin))
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err("level panicked".into())))
            .collect()
    });
    let mut finished = Vec::new();
    let mut aborted = None;
    for (c, r) in levels.iter().zip(results) {
        match r {
            Ok(pair) => finished.push(pair),
            Err(e) => {
                aborted = Some(format!("level N = {}, dt = {}: {e}", c.grid.n, c.time.dt));
                break;
            }
        }
    }

    let mut errors: Vec<Option<f64>> = Vec::with_capacity(finished.len());
    let reference = match (exact, metric) {
        (_, ConvergenceMetric::ConstraintResidual) => {
            for (_, s) in &finished {
                errors.push(Some(constraint_residual(s, &model)?));
            }
            "exact value 0".to_string()
        }
        (Some(ex), ConvergenceMetric::State) => {
            for (init, s) in &finished {
                let d = exact_diffusivity(config, &model, ex, init)?;
                errors.push(Some(exact_error(s, init, &model, ex, d)?));
            }
            format!("closed form {ex:?}")
        }
        (None, ConvergenceMetric::State) => {
            for i in 0..finished.len() {
                errors.push(match finished.get(i + 1) {
                    Some((_, next)) => Some(state_distance(&finished[i].1, next, &model)?),
                    None => None,
                });
            }
            "successive differences".to_string()
        }
    };
    let mut table = Vec::with_capacity(finished.len());
    for (i, c) in levels.iter().take(finished.len()).enumerate() {
        let order = match (i.checked_sub(1).and_then(|j| errors[j]), errors[i]) {
            (Some(prev), Some(e)) if prev > 0.0 && e > 0.0 => Some((prev / e).log2()),
            _ => None,
        };
        table.push(LevelResult {
            n: c.grid.n,
            dt: c.time.dt,
            error: errors[i],
            order,
        });
    }
    Ok(ConvergenceTable {
        reference,
        metric,
        levels: table,
        aborted,
    })
}
