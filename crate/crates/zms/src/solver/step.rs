//! One time step of the regularized system in (ρ, u) variables:
//!
//! ∂tρ + div(ρ⟨ũ⟩_ε) − div(⟨κ̃⟩_ε∇ρ) = 0,
//! ∂tu + (⟨ũ⟩_ε − ⟨κ̃⟩_ε ρ⁻¹∇ρ)·∇u + ρ⁻¹∇μ·Du − ρ⁻¹div(μ∇u) + ρ⁻¹∇π = 0,
//!
//! with π from div(ρ⁻¹∇π) = −div((⟨ũ⟩_ε − ρ⁻¹⟨κ̃⟩_ε∇ρ)·∇u + 2μ∇ρ⁻¹·Au).
//! Diffusion is split into an implicit constant-coefficient part (the maximum
//! of the variable coefficient) and an explicit remainder.

use crate::coefficients::CoefficientModel;
use crate::spectral::{
    divergence, gradient, jacobian, leray_project, partial, project_friedrichs, solve_helmholtz,
    solve_variable_elliptic_with, EllipticOptions, Mollifier, ScalarField, TensorField,
    VectorField,
};

use super::{Formulation, Scheme, SimState, SolverConfig, SolverError, RELATION_TOL};
use crate::coefficients::{check_relation, u_from_v, v_from_u};

/// Mollification and Friedrichs truncation as configured.
pub(crate) struct Regularizer {
    mollifier: Option<Mollifier>,
    friedrichs_n: Option<f64>,
}

impl Regularizer {
    pub(crate) fn new(state: &SimState, config: &SolverConfig) -> Result<Self, SolverError> {
        let mollifier = if config.eps_mollify > 0.0 {
            Some(Mollifier::new(state.grid(), config.eps_mollify)?)
        } else {
            None
        };
        Ok(Self {
            mollifier,
            friedrichs_n: config.friedrichs_n,
        })
    }

    fn mollify_scalar(&self, f: ScalarField) -> ScalarField {
        match &self.mollifier {
            Some(m) => m.apply(&f),
            None => f,
        }
    }

    fn mollify_vector(&self, f: &VectorField) -> VectorField {
        match &self.mollifier {
            Some(m) => m.apply(f),
            None => f.clone(),
        }
    }

    pub(crate) fn truncate_scalar(&self, f: ScalarField) -> ScalarField {
        match self.friedrichs_n {
            Some(n) => project_friedrichs(&f, n),
            None => f,
        }
    }

    pub(crate) fn truncate_vector(&self, f: VectorField) -> VectorField {
        match self.friedrichs_n {
            Some(n) => project_friedrichs(&f, n),
            None => f,
        }
    }
}

/// Coefficients frozen from a guess (ρ̃, ũ): transport velocity ⟨ũ⟩_ε and
/// diffusivity ⟨κ(ρ̃)⟩_ε.
pub(crate) struct Frozen {
    pub w: VectorField,
    pub kappa: ScalarField,
}

impl Frozen {
    pub(crate) fn new(
        rho_guess: &ScalarField,
        u_guess: &VectorField,
        model: &CoefficientModel,
        reg: &Regularizer,
    ) -> Self {
        Self {
            w: reg.mollify_vector(u_guess),
            kappa: reg.mollify_scalar(model.kappa_field(rho_guess)),
        }
    }
}

pub(crate) fn check_cfl(
    w: &VectorField,
    dt: f64,
    config: &SolverConfig,
) -> Result<(), SolverError> {
    let cfl = w.linf_norm() * dt / w.grid().spacing();
    if !(cfl <= config.cfl_max) {
        return Err(SolverError::Cfl {
            value: cfl,
            bound: config.cfl_max,
        });
    }
    Ok(())
}

/// dt·c_max·|ξ|²_max for explicit diffusion; forward Euler needs ≤ 2.
pub(crate) fn check_explicit_diffusion(
    c_max: f64,
    dt: f64,
    grid_xi_max: f64,
) -> Result<(), SolverError> {
    let value = dt * c_max * grid_xi_max * grid_xi_max;
    if !(value <= EXPLICIT_DIFFUSION_BOUND) {
        return Err(SolverError::ExplicitDiffusion {
            value,
            bound: EXPLICIT_DIFFUSION_BOUND,
        });
    }
    Ok(())
}

pub const EXPLICIT_DIFFUSION_BOUND: f64 = 2.0;

/// Tendency of the density equation with the diffusion split at `kappa_ref`:
/// −div D(ρ w) + div D((κ − κ_ref)∇ρ).
pub(crate) fn density_tendency(rho: &ScalarField, frozen: &Frozen, kappa_ref: f64) -> ScalarField {
    let flux = frozen.w.mul_scalar(rho);
    let excess = frozen.kappa.add_constant(-kappa_ref);
    let diffusive = gradient(rho).mul_scalar(&excess);
    divergence(&diffusive.sub(&flux))
}

/// ρ_new from ρ_old and a frozen-coefficient tendency evaluated on `rho_eval`.
pub(crate) fn advance_density(
    rho_old: &ScalarField,
    rho_eval: &ScalarField,
    frozen: &Frozen,
    dt: f64,
    scheme: Scheme,
    reg: &Regularizer,
) -> ScalarField {
    let kappa_ref = match scheme {
        Scheme::SemiImplicit => frozen.kappa.max(),
        Scheme::FullyExplicit => 0.0,
    };
    // Implicit part acts on the unknown; it is exact only when rho_eval is rho_old.
    let explicit = rho_old.axpy(dt, &density_tendency(rho_eval, frozen, kappa_ref));
    let implicit = if kappa_ref > 0.0 {
        solve_helmholtz(&explicit, dt * kappa_ref)
    } else {
        explicit
    };
    reg.truncate_scalar(implicit)
}

/// Pieces of the momentum operator L for fixed (ρ, u, frozen coefficients).
pub(crate) struct MomentumOperator {
    /// ρ⁻¹
    inv_rho: ScalarField,
    mu: ScalarField,
    jac: TensorField,
    /// D((⟨ũ⟩ − ⟨κ̃⟩ρ⁻¹∇ρ)·∇u)
    transport: VectorField,
    nu_max: f64,
}

impl MomentumOperator {
    pub(crate) fn new(
        rho: &ScalarField,
        u: &VectorField,
        frozen: &Frozen,
        model: &CoefficientModel,
    ) -> Self {
        let inv_rho = rho.map(|r| 1.0 / r);
        let mu = model.mu_field(rho);
        let nu_max = mu.zip_map(rho, |m, r| m / r).max();
        let drift_coef = frozen.kappa.zip_map(&inv_rho, |k, a| k * a);
        let c = frozen.w.sub(&gradient(rho).mul_scalar(&drift_coef));
        let jac = jacobian(u);
        let transport = directional(&c, &jac);
        Self {
            inv_rho,
            mu,
            jac,
            transport,
            nu_max,
        }
    }

    pub(crate) fn nu_max(&self) -> f64 {
        self.nu_max
    }

    /// g with div(ρ⁻¹∇π) = div g, i.e. g = −(transport + 2μ∇ρ⁻¹·Au).
    pub(crate) fn pressure_source(&self) -> VectorField {
        // 2D: Au = [[0, w], [−w, 0]] with w = ½(∂_0u^1 − ∂_1u^0), so
        // (∇a·Au)^0 = −∂_1a·w and (∇a·Au)^1 = ∂_0a·w.
        let w = self.jac.get(0, 1).sub(self.jac.get(1, 0)).scale(0.5);
        let two_mu_w = self.mu.mul(&w).scale(2.0);
        let grad_a = gradient(&self.inv_rho);
        let viscous = VectorField::new(
            grad_a.y().mul(&two_mu_w).scale(-1.0),
            grad_a.x().mul(&two_mu_w),
        );
        self.transport.add(&viscous).scale(-1.0)
    }

    pub(crate) fn solve_pressure(
        &self,
        guess: Option<&ScalarField>,
    ) -> Result<(ScalarField, usize), SolverError> {
        let opts = EllipticOptions {
            initial_guess: guess.cloned(),
            ..Default::default()
        };
        let sol = solve_variable_elliptic_with(&self.inv_rho, &self.pressure_source(), &opts)?;
        Ok((sol.pi, sol.iterations))
    }

    /// Lu − ν_ref Δu for the given π.
    pub(crate) fn tendency(&self, pi: &ScalarField, nu_ref: f64) -> VectorField {
        let grad_mu = gradient(&self.mu);
        let b = grad_mu.mul_scalar(&self.inv_rho);
        // (ρ⁻¹∇μ·Du)^j = Σ_i b_i ∂_j u^i
        let stretch = VectorField::new(
            b.x()
                .zip_map(self.jac.get(0, 0), |p, q| p * q)
                .add(&b.y().zip_map(self.jac.get(0, 1), |p, q| p * q))
                .dealiased(),
            b.x()
                .zip_map(self.jac.get(1, 0), |p, q| p * q)
                .add(&b.y().zip_map(self.jac.get(1, 1), |p, q| p * q))
                .dealiased(),
        );
        // ρ⁻¹div(μ∇u^j) − ν_ref Δu^j
        let viscous = VectorField::new(
            self.viscous_component(0, nu_ref),
            self.viscous_component(1, nu_ref),
        );
        let pressure = gradient(pi).mul_scalar(&self.inv_rho);
        self.transport.add(&stretch).sub(&viscous).add(&pressure)
    }

    fn viscous_component(&self, j: usize, nu_ref: f64) -> ScalarField {
        let flux = VectorField::new(
            self.jac.get(0, j).mul(&self.mu),
            self.jac.get(1, j).mul(&self.mu),
        );
        let div = divergence(&flux).mul(&self.inv_rho);
        let lap = partial(self.jac.get(0, j), 0).add(&partial(self.jac.get(1, j), 1));
        div.axpy(-nu_ref, &lap)
    }
}

/// D((c·∇)u) with (c·∇u)^j = Σ_i c_i ∂_i u^j.
fn directional(c: &VectorField, jac: &TensorField) -> VectorField {
    let comp = |j: usize| {
        c.x()
            .zip_map(jac.get(0, j), |p, q| p * q)
            .add(&c.y().zip_map(jac.get(1, j), |p, q| p * q))
            .dealiased()
    };
    VectorField::new(comp(0), comp(1))
}

/// u_new from u_old, the operator and π, then Friedrichs truncation and
/// (optionally) Leray projection.
pub(crate) fn advance_velocity(
    u_old: &VectorField,
    op: &MomentumOperator,
    pi: &ScalarField,
    dt: f64,
    scheme: Scheme,
    projection: bool,
    reg: &Regularizer,
) -> VectorField {
    let nu_ref = match scheme {
        Scheme::SemiImplicit => op.nu_max(),
        Scheme::FullyExplicit => 0.0,
    };
    let explicit = u_old.axpy(-dt, &op.tendency(pi, nu_ref));
    let implicit = if nu_ref > 0.0 {
        explicit.map_components(|f| solve_helmholtz(f, dt * nu_ref))
    } else {
        explicit
    };
    let truncated = reg.truncate_vector(implicit);
    if projection {
        leray_project(&truncated)
    } else {
        truncated
    }
}

/// Per-step summary returned by [`advance`].
#[derive(Clone, Debug, PartialEq)]
pub struct StepOutcome {
    pub pressure_iterations: usize,
    /// Picard iterations (1 for a plain step).
    pub picard_iterations: usize,
    pub picard_residuals: Vec<f64>,
}

/// Startup checks shared by all entry points: CFL on ⟨u⟩_ε and, for the
/// explicit scheme, the forward-Euler diffusion bound.
pub(crate) fn check_stability(
    rho: &ScalarField,
    frozen: &Frozen,
    dt: f64,
    config: &SolverConfig,
    model: &CoefficientModel,
) -> Result<(), SolverError> {
    check_cfl(&frozen.w, dt, config)?;
    if config.scheme == Scheme::FullyExplicit {
        let nu_max = model.mu_field(rho).zip_map(rho, |m, r| m / r).max();
        let c_max = frozen.kappa.max().max(nu_max);
        check_explicit_diffusion(c_max, dt, rho.grid().max_dealiased_frequency())?;
    }
    Ok(())
}

fn u_velocity(state: &SimState, model: &CoefficientModel) -> Result<VectorField, SolverError> {
    match state.formulation {
        Formulation::U => Ok(state.velocity.clone()),
        Formulation::V => Ok(u_from_v(&state.rho, &state.velocity, model)?),
    }
}

/// One step of the density equation with coefficients frozen at the current state.
pub fn step_density(
    state: &SimState,
    config: &SolverConfig,
    model: &CoefficientModel,
) -> Result<ScalarField, SolverError> {
    config.validate()?;
    let reg = Regularizer::new(state, config)?;
    let u = u_velocity(state, model)?;
    let frozen = Frozen::new(&state.rho, &u, model, &reg);
    check_stability(&state.rho, &frozen, config.dt, config, model)?;
    Ok(advance_density(
        &state.rho,
        &state.rho,
        &frozen,
        config.dt,
        config.scheme,
        &reg,
    ))
}

/// π solving div(ρ⁻¹∇π) = −div((⟨u⟩_ε − ρ⁻¹⟨κ⟩_ε∇ρ)·∇u + 2μ∇ρ⁻¹·Au) at the current state.
pub fn solve_pressure(
    state: &SimState,
    config: &SolverConfig,
    model: &CoefficientModel,
) -> Result<ScalarField, SolverError> {
    let reg = Regularizer::new(state, config)?;
    let u = u_velocity(state, model)?;
    let frozen = Frozen::new(&state.rho, &u, model, &reg);
    let op = MomentumOperator::new(&state.rho, &u, &frozen, model);
    Ok(op.solve_pressure(Some(&state.pi))?.0)
}

/// One step of ∂t u + Lu = 0 at fixed density, with π from [`solve_pressure`].
pub fn step_velocity(
    state: &SimState,
    config: &SolverConfig,
    model: &CoefficientModel,
    pi: &ScalarField,
) -> Result<VectorField, SolverError> {
    config.validate()?;
    let reg = Regularizer::new(state, config)?;
    let u = u_velocity(state, model)?;
    let frozen = Frozen::new(&state.rho, &u, model, &reg);
    check_stability(&state.rho, &frozen, config.dt, config, model)?;
    let op = MomentumOperator::new(&state.rho, &u, &frozen, model);
    Ok(advance_velocity(
        &u,
        &op,
        pi,
        config.dt,
        config.scheme,
        config.projection,
        &reg,
    ))
}

/// Splitting step for U-form states: density first, then pressure and
/// velocity with the updated density.
pub(crate) fn step_u(
    state: &SimState,
    config: &SolverConfig,
    model: &CoefficientModel,
    reg: &Regularizer,
    dt: f64,
) -> Result<(SimState, StepOutcome), SolverError> {
    let rho = &state.rho;
    let u = &state.velocity;
    let frozen = Frozen::new(rho, u, model, reg);
    check_stability(rho, &frozen, dt, config, model)?;
    let rho_new = advance_density(rho, rho, &frozen, dt, config.scheme, reg);
    let frozen_new = Frozen {
        w: frozen.w,
        kappa: reg.mollify_scalar(model.kappa_field(&rho_new)),
    };
    check_positive(&rho_new, state.time + dt)?;
    let op = MomentumOperator::new(&rho_new, u, &frozen_new, model);
    let (pi, pressure_iterations) = op.solve_pressure(Some(&state.pi))?;
    let u_new = advance_velocity(u, &op, &pi, dt, config.scheme, config.projection, reg);
    let next = finish_state(state, rho_new, u_new, pi, state.time + dt, config)?;
    Ok((
        next,
        StepOutcome {
            pressure_iterations,
            picard_iterations: 1,
            picard_residuals: Vec::new(),
        },
    ))
}

pub(crate) fn check_positive(rho: &ScalarField, time: f64) -> Result<(), SolverError> {
    if !rho.is_finite() {
        return Err(SolverError::NonFinite { time });
    }
    let m = rho.min();
    if !(m > 0.0) {
        return Err(SolverError::InvalidState(format!(
            "density lost positivity at t = {time}: min {m}"
        )));
    }
    Ok(())
}

pub(crate) fn finish_state(
    prev: &SimState,
    rho: ScalarField,
    velocity: VectorField,
    pi: ScalarField,
    time: f64,
    config: &SolverConfig,
) -> Result<SimState, SolverError> {
    let mut next = prev.with_parts(rho, velocity, pi, time);
    next.friedrichs_n = config.friedrichs_n;
    next.eps_mollify = config.eps_mollify;
    next.validate()?;
    Ok(next)
}

pub(crate) fn check_model_relation(model: &CoefficientModel) -> Result<(), SolverError> {
    let (lo, hi) = model.rho_bounds();
    let samples: Vec<f64> = (0..=200)
        .map(|i| lo + (hi - lo) * i as f64 / 200.0)
        .collect();
    let report = check_relation(model, &samples, RELATION_TOL)?;
    if !report.pass {
        return Err(SolverError::RelationViolation {
            residual: report.max_residual,
            rho: report.worst_rho,
        });
    }
    Ok(())
}

/// Advances a V-form state: v → u, one U step, u → v with the new density.
pub fn step_v_formulation(
    state: &SimState,
    config: &SolverConfig,
    model: &CoefficientModel,
) -> Result<SimState, SolverError> {
    if state.formulation != Formulation::V {
        return Err(SolverError::InvalidState(
            "step_v_formulation needs a V-form state".into(),
        ));
    }
    config.validate()?;
    check_model_relation(model)?;
    let reg = Regularizer::new(state, config)?;
    Ok(step_v_with(state, config, model, &reg, config.dt)?.0)
}

pub(crate) fn step_v_with(
    state: &SimState,
    config: &SolverConfig,
    model: &CoefficientModel,
    reg: &Regularizer,
    dt: f64,
) -> Result<(SimState, StepOutcome), SolverError> {
    let mut u_state = state.clone();
    u_state.velocity = u_from_v(&state.rho, &state.velocity, model)?;
    u_state.formulation = Formulation::U;
    let (mut next, outcome) = if config.use_picard {
        super::picard::fixed_point_with(&u_state, config, model, reg, dt)?
    } else {
        step_u(&u_state, config, model, reg, dt)?
    };
    next.velocity = v_from_u(&next.rho, &next.velocity, model)?;
    next.formulation = Formulation::V;
    Ok((next, outcome))
}

/// One time step of length `config.dt` for either formulation, using the
/// Picard fixed point when `config.use_picard` is set.
pub fn advance(
    state: &SimState,
    config: &SolverConfig,
    model: &CoefficientModel,
) -> Result<(SimState, StepOutcome), SolverError> {
    config.validate()?;
    let reg = Regularizer::new(state, config)?;
    advance_with(state, config, model, &reg, config.dt)
}

pub(crate) fn advance_with(
    state: &SimState,
    config: &SolverConfig,
    model: &CoefficientModel,
    reg: &Regularizer,
    dt: f64,
) -> Result<(SimState, StepOutcome), SolverError> {
    match state.formulation {
        Formulation::V => step_v_with(state, config, model, reg, dt),
        Formulation::U if config.use_picard => {
            super::picard::fixed_point_with(state, config, model, reg, dt)
        }
        Formulation::U => step_u(state, config, model, reg, dt),
    }
}
