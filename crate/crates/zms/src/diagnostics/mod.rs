//! Energy identities, maximum principle, K-equation and constraint residuals,
//! and Gagliardo-Nirenberg type inequalities evaluated on simulator output.

mod checks;
mod inequalities;
mod recorder;

pub use checks::{
    density_energy_check, energy_inequality_check, max_principle_check, velocity_energy_check,
    EnergyCheck, InequalityReport, MaxPrincipleReport,
};
pub use inequalities::{
    gn3d_check, gn3d_ratio, gn_inequality_check, gn_ratio, synthetic_3d, Field3, GnInequality,
    GnKindReport, GnKindReport3, GnReport,
};
pub use recorder::{DiagnosticsRecord, Recorder};

use crate::coefficients::{u_from_v, v_from_u, CoefficientError, CoefficientModel};
use crate::solver::{Formulation, SimState};
use crate::spectral::{
    antisym_grad, divergence, gradient, jacobian, laplacian, ScalarField, VectorField,
};

#[derive(Debug, thiserror::Error)]
pub enum DiagnosticsError {
    #[error("empty history")]
    EmptyHistory,
    #[error("initial velocity is zero: the energy inequality is vacuous")]
    VacuousInequality,
    #[error("sample {index} is not mean-zero (mean {mean:e})")]
    NotMeanZero { index: usize, mean: f64 },
    #[error("states are not consecutive in time (dt = {0})")]
    NonIncreasingTime(f64),
    #[error(transparent)]
    Coefficient(#[from] CoefficientError),
}

/// Running trapezoidal integrals of the dissipation rates 2∫κ|∇ρ|², 4∫μ|Au|²
/// and of ‖∇u‖², fed one time level at a time.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CumulativeIntegrator {
    last: Option<(f64, [f64; 3])>,
    totals: [f64; 3],
}

impl CumulativeIntegrator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds the level (t, rates). Levels must arrive in increasing time;
    /// a repeated time is ignored.
    pub fn push(
        &mut self,
        t: f64,
        density_rate: f64,
        velocity_rate: f64,
        grad_u_sq: f64,
    ) -> Result<(), DiagnosticsError> {
        let rates = [density_rate, velocity_rate, grad_u_sq];
        if let Some((t0, prev)) = self.last {
            if t == t0 {
                return Ok(());
            }
            if !(t > t0) {
                return Err(DiagnosticsError::NonIncreasingTime(t - t0));
            }
            for (total, (a, b)) in self.totals.iter_mut().zip(prev.iter().zip(&rates)) {
                *total += 0.5 * (t - t0) * (a + b);
            }
        }
        self.last = Some((t, rates));
        Ok(())
    }

    /// 2∫₀ᵗ∫κ|∇ρ|²
    pub fn density_dissipation(&self) -> f64 {
        self.totals[0]
    }

    /// 4∫₀ᵗ∫μ|Au|²
    pub fn velocity_dissipation(&self) -> f64 {
        self.totals[1]
    }

    /// ∫₀ᵗ‖∇u‖²
    pub fn grad_u_integral(&self) -> f64 {
        self.totals[2]
    }

    pub fn last_time(&self) -> Option<f64> {
        self.last.map(|l| l.0)
    }
}

/// The solenoidal velocity u of a state, converting from v if needed.
pub fn solenoidal_velocity(
    state: &SimState,
    model: &CoefficientModel,
) -> Result<VectorField, DiagnosticsError> {
    Ok(match state.formulation {
        Formulation::U => state.velocity.clone(),
        Formulation::V => u_from_v(&state.rho, &state.velocity, model)?,
    })
}

/// ∫|ρ − 1|²
pub fn density_energy(rho: &ScalarField) -> f64 {
    rho.add_constant(-1.0).l2_norm_sq()
}

/// 2∫κ(ρ)|∇ρ|²
pub fn density_dissipation_rate(rho: &ScalarField, model: &CoefficientModel) -> f64 {
    let g = gradient(rho);
    let kappa = model.kappa_field(rho);
    let h2 = rho.grid().cell_area();
    let sum: f64 = kappa
        .values()
        .iter()
        .zip(g.x().values().iter().zip(g.y().values()))
        .map(|(k, (a, b))| k * (a * a + b * b))
        .sum();
    2.0 * sum * h2
}

/// ∫ρ|u|²
pub fn velocity_energy(rho: &ScalarField, u: &VectorField) -> f64 {
    let h2 = rho.grid().cell_area();
    let sum: f64 = rho
        .values()
        .iter()
        .zip(u.x().values().iter().zip(u.y().values()))
        .map(|(r, (a, b))| r * (a * a + b * b))
        .sum();
    sum * h2
}

/// 4∫μ(ρ)|Au|², with |Au|² = Σ_ij (Au)_ij².
pub fn velocity_dissipation_rate(
    rho: &ScalarField,
    u: &VectorField,
    model: &CoefficientModel,
) -> f64 {
    let au = antisym_grad(u);
    let mu = model.mu_field(rho);
    let h2 = rho.grid().cell_area();
    // In 2D |Au|² = 2(Au)_01².
    let sum: f64 = mu
        .values()
        .iter()
        .zip(au.get(0, 1).values())
        .map(|(m, w)| m * 2.0 * w * w)
        .sum();
    4.0 * sum * h2
}

/// √2‖Au‖/‖∇u‖, which is 1 for divergence-free u (‖Au‖² = ½‖∇u‖²).
pub fn au_gradient_ratio(u: &VectorField) -> Option<f64> {
    let g = jacobian(u).l2_norm();
    if g == 0.0 {
        return None;
    }
    Some(2f64.sqrt() * antisym_grad(u).l2_norm() / g)
}

/// ‖div(v + κ∇ln ρ)‖_{L²}, evaluated through the v variables.
pub fn constraint_residual(
    state: &SimState,
    model: &CoefficientModel,
) -> Result<f64, DiagnosticsError> {
    let v = match state.formulation {
        Formulation::V => state.velocity.clone(),
        Formulation::U => v_from_u(&state.rho, &state.velocity, model)?,
    };
    Ok(divergence(&u_from_v(&state.rho, &v, model)?).l2_norm())
}

/// ‖(K(ρⁿ⁺¹) − K(ρⁿ))/Δt + u·∇K − κΔK‖_{L²} with the spatial terms at the
/// later state.
pub fn k_function_residual(
    previous: &SimState,
    state: &SimState,
    model: &CoefficientModel,
) -> Result<f64, DiagnosticsError> {
    let dt = state.time - previous.time;
    if !(dt > 0.0) {
        return Err(DiagnosticsError::NonIncreasingTime(dt));
    }
    let k_new = model.big_k_field(&state.rho);
    let k_old = model.big_k_field(&previous.rho);
    let u = solenoidal_velocity(state, model)?;
    let kappa = model.kappa_field(&state.rho);
    let residual = k_new
        .sub(&k_old)
        .scale(1.0 / dt)
        .add(&u.dot_pointwise(&gradient(&k_new)))
        .sub(&kappa.mul(&laplacian(&k_new)));
    Ok(residual.l2_norm())
}

/// ‖ρ − 1‖_{H¹}
pub fn h1_density_norm(rho: &ScalarField) -> f64 {
    let a = rho.add_constant(-1.0);
    (a.l2_norm_sq() + gradient(&a).l2_norm_sq()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::SpectralGrid;
    use std::f64::consts::PI;

    #[test]
    fn integrator_trapezoid_and_monotone() {
        let mut c = CumulativeIntegrator::new();
        for i in 0..=10 {
            let t = i as f64 * 0.1;
            c.push(t, 2.0 * t, 1.0, t * t).unwrap();
        }
        assert!((c.density_dissipation() - 1.0).abs() < 1e-14);
        assert!((c.velocity_dissipation() - 1.0).abs() < 1e-14);
        assert!((c.grad_u_integral() - (1.0 / 3.0 + 0.1 * 0.1 / 6.0)).abs() < 1e-12);
        c.push(1.0, 5.0, 5.0, 5.0).unwrap();
        assert!(c.push(0.5, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn au_norm_is_half_gradient_norm_for_solenoidal_fields() {
        let g = SpectralGrid::new(32, 2.0 * PI).unwrap();
        let psi = ScalarField::from_fn(&g, |x, y| {
            x.sin() * (2.0 * y).cos() + 0.3 * (3.0 * x + y).sin()
        });
        let d = gradient(&psi);
        let u = VectorField::new(d.y().clone(), d.x().scale(-1.0));
        assert!((au_gradient_ratio(&u).unwrap() - 1.0).abs() < 1e-12);
        // A gradient field has Au = 0.
        assert!(au_gradient_ratio(&d).unwrap() < 1e-12);
    }

    #[test]
    fn k_residual_vanishes_for_constant_states() {
        let g = SpectralGrid::new(16, 1.0).unwrap();
        let model = CoefficientModel::kazhikhov(0.3, 0.1, 0.5, 2.0).unwrap();
        let a = SimState::new(
            ScalarField::constant(&g, 1.2),
            VectorField::zeros(&g),
            Formulation::U,
        )
        .unwrap();
        let mut b = a.clone();
        b.time = 0.1;
        assert_eq!(k_function_residual(&a, &b, &model).unwrap(), 0.0);
        assert!(k_function_residual(&b, &a, &model).is_err());
    }

    #[test]
    fn constraint_detects_random_v() {
        let g = SpectralGrid::new(16, 1.0).unwrap();
        let model = CoefficientModel::kazhikhov(0.3, 0.1, 0.5, 2.0).unwrap();
        let rho = ScalarField::from_fn(&g, |x, _| 1.0 + 0.2 * (2.0 * PI * x).sin());
        let v = VectorField::from_fn(
            &g,
            |x, y| (2.0 * PI * (x + y)).sin(),
            |x, _| (2.0 * PI * x).cos(),
        );
        let s = SimState::new(rho, v, Formulation::V).unwrap();
        assert!(constraint_residual(&s, &model).unwrap() > 0.1);
    }
}
