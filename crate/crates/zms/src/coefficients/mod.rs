//! Density-dependent coefficients κ(ρ), μ(ρ), ν, the structural relation
//! −κ + 2μ′ = 0, the antiderivative K and the u ↔ v change of variables.

mod spline;

use std::fmt;
use std::sync::Arc;

pub use spline::CubicSpline;

use crate::spectral::{divergence, gradient, ScalarField, VectorField};

#[derive(Debug, thiserror::Error)]
pub enum CoefficientError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("coefficient {name} = {value} is not positive at rho = {rho}")]
    NotPositive {
        name: &'static str,
        rho: f64,
        value: f64,
    },
    #[error("density must be positive, found minimum {0}")]
    NonPositiveDensity(f64),
    #[error("empty sample list")]
    EmptySamples,
    #[error("sample rho = {rho} outside model bounds [{lo}, {hi}]")]
    SampleOutOfBounds { rho: f64, lo: f64, hi: f64 },
}

/// Reference pressure, gas constant and α = (γ−1)/(γP0).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GasConstants {
    pub p0: f64,
    pub r: f64,
    pub alpha: f64,
}

impl GasConstants {
    pub fn new(p0: f64, r: f64, alpha: f64) -> Result<Self, CoefficientError> {
        for (name, v) in [("P0", p0), ("R", r), ("alpha", alpha)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CoefficientError::InvalidModel(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        Ok(Self { p0, r, alpha })
    }

    /// With R = C_p − C_v and γ = C_p/C_v, (γ−1)/γ = R/C_p, so α = R/(C_p P0).
    pub fn from_heat_capacity(p0: f64, r: f64, cp: f64) -> Result<Self, CoefficientError> {
        if !(cp > 0.0 && cp.is_finite()) {
            return Err(CoefficientError::InvalidModel(format!(
                "Cp must be positive, got {cp}"
            )));
        }
        Self::new(p0, r, r / (cp * p0))
    }

    /// ϑ = P0/(Rρ)
    pub fn temperature(&self, rho: f64) -> f64 {
        self.p0 / (self.r * rho)
    }
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum ModelKind {
    /// κ ≡ κ₀, μ = κ₀ρ/2 + μ₀.
    Kazhikhov { kappa0: f64, mu0: f64 },
    /// Constant conductivity k, κ = αkϑ, μ = −k ln ϑ/(2C_p) + μ₀ with ϑ = P0/(Rρ).
    Combustion {
        k: f64,
        cp: f64,
        gas: GasConstants,
        mu0: f64,
    },
    /// Splines through tabulated κ and μ; K integrates the κ spline exactly.
    Tabulated { kappa: CubicSpline, mu: CubicSpline },
    /// Arbitrary closures, mainly for experiments and negative tests.
    Custom {
        name: String,
        kappa: ScalarFn,
        mu: ScalarFn,
        mu_prime: ScalarFn,
        big_k: ScalarFn,
    },
}

impl fmt::Debug for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Kazhikhov { kappa0, mu0 } => {
                write!(f, "Kazhikhov {{ kappa0: {kappa0}, mu0: {mu0} }}")
            }
            Self::Combustion { k, cp, gas, mu0 } => {
                write!(
                    f,
                    "Combustion {{ k: {k}, cp: {cp}, gas: {gas:?}, mu0: {mu0} }}"
                )
            }
            Self::Tabulated { kappa, .. } => {
                write!(f, "Tabulated {{ domain: {:?} }}", kappa.domain())
            }
            Self::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

/// Positivity constants of κ and μ over the declared density bounds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoefficientBounds {
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub mu_min: f64,
    pub mu_max: f64,
}

#[derive(Clone, Debug)]
pub struct CoefficientModel {
    kind: ModelKind,
    nu: f64,
    rho_bounds: (f64, f64),
    bounds: CoefficientBounds,
}

const POSITIVITY_SAMPLES: usize = 1001;

impl CoefficientModel {
    /// Validates the model on [rho_min, rho_max]; κ and μ must stay positive.
    pub fn new(
        kind: ModelKind,
        nu: f64,
        rho_min: f64,
        rho_max: f64,
    ) -> Result<Self, CoefficientError> {
        if !(rho_min > 0.0 && rho_max >= rho_min && rho_max.is_finite()) {
            return Err(CoefficientError::InvalidModel(format!(
                "density bounds must satisfy 0 < rho_min <= rho_max, got [{rho_min}, {rho_max}]"
            )));
        }
        if !(nu >= 0.0 && nu.is_finite()) {
            return Err(CoefficientError::InvalidModel(format!(
                "nu must be nonnegative, got {nu}"
            )));
        }
        match &kind {
            ModelKind::Kazhikhov { kappa0, mu0 } => {
                if !(*kappa0 > 0.0 && kappa0.is_finite() && mu0.is_finite()) {
                    return Err(CoefficientError::InvalidModel(format!(
                        "kappa0 must be positive, got {kappa0}"
                    )));
                }
            }
            ModelKind::Combustion { k, cp, mu0, .. } => {
                if !(*k > 0.0 && *cp > 0.0 && k.is_finite() && cp.is_finite() && mu0.is_finite()) {
                    return Err(CoefficientError::InvalidModel(format!(
                        "combustion model needs k > 0 and Cp > 0, got k = {k}, Cp = {cp}"
                    )));
                }
            }
            ModelKind::Tabulated { kappa, mu } => {
                for (name, s) in [("kappa", kappa), ("mu", mu)] {
                    let (lo, hi) = s.domain();
                    if rho_min < lo || rho_max > hi || !(lo <= 1.0 && 1.0 <= hi) {
                        return Err(CoefficientError::InvalidModel(format!(
                            "{name} table covers [{lo}, {hi}] but must contain the bounds and rho = 1"
                        )));
                    }
                }
            }
            ModelKind::Custom { .. } => {}
        }
        let mut model = Self {
            kind,
            nu,
            rho_bounds: (rho_min, rho_max),
            bounds: CoefficientBounds {
                kappa_min: f64::INFINITY,
                kappa_max: f64::NEG_INFINITY,
                mu_min: f64::INFINITY,
                mu_max: f64::NEG_INFINITY,
            },
        };
        let mut b = model.bounds;
        for i in 0..POSITIVITY_SAMPLES {
            let rho = rho_min + (rho_max - rho_min) * i as f64 / (POSITIVITY_SAMPLES - 1) as f64;
            let (k, m) = (model.kappa(rho), model.mu(rho));
            if !(k > 0.0 && k.is_finite()) {
                return Err(CoefficientError::NotPositive {
                    name: "kappa",
                    rho,
                    value: k,
                });
            }
            if !(m > 0.0 && m.is_finite()) {
                return Err(CoefficientError::NotPositive {
                    name: "mu",
                    rho,
                    value: m,
                });
            }
            b.kappa_min = b.kappa_min.min(k);
            b.kappa_max = b.kappa_max.max(k);
            b.mu_min = b.mu_min.min(m);
            b.mu_max = b.mu_max.max(m);
        }
        model.bounds = b;
        Ok(model)
    }

    pub fn kazhikhov(
        kappa0: f64,
        mu0: f64,
        rho_min: f64,
        rho_max: f64,
    ) -> Result<Self, CoefficientError> {
        Self::new(ModelKind::Kazhikhov { kappa0, mu0 }, 0.0, rho_min, rho_max)
    }

    pub fn combustion(
        k: f64,
        cp: f64,
        gas: GasConstants,
        mu0: f64,
        rho_min: f64,
        rho_max: f64,
    ) -> Result<Self, CoefficientError> {
        Self::new(
            ModelKind::Combustion { k, cp, gas, mu0 },
            0.0,
            rho_min,
            rho_max,
        )
    }

    pub fn tabulated(
        rho: &[f64],
        kappa: &[f64],
        mu: &[f64],
        rho_min: f64,
        rho_max: f64,
    ) -> Result<Self, CoefficientError> {
        let kappa = CubicSpline::new(rho.to_vec(), kappa.to_vec())
            .map_err(CoefficientError::InvalidModel)?;
        let mu =
            CubicSpline::new(rho.to_vec(), mu.to_vec()).map_err(CoefficientError::InvalidModel)?;
        Self::new(ModelKind::Tabulated { kappa, mu }, 0.0, rho_min, rho_max)
    }

    /// Model from closures; `big_k` must be the antiderivative of `kappa` vanishing at 1.
    pub fn custom(
        name: &str,
        kappa: impl Fn(f64) -> f64 + Send + Sync + 'static,
        mu: impl Fn(f64) -> f64 + Send + Sync + 'static,
        mu_prime: impl Fn(f64) -> f64 + Send + Sync + 'static,
        big_k: impl Fn(f64) -> f64 + Send + Sync + 'static,
        rho_min: f64,
        rho_max: f64,
    ) -> Result<Self, CoefficientError> {
        Self::new(
            ModelKind::Custom {
                name: name.to_string(),
                kappa: Arc::new(kappa),
                mu: Arc::new(mu),
                mu_prime: Arc::new(mu_prime),
                big_k: Arc::new(big_k),
            },
            0.0,
            rho_min,
            rho_max,
        )
    }

    pub fn with_nu(mut self, nu: f64) -> Result<Self, CoefficientError> {
        if !(nu >= 0.0 && nu.is_finite()) {
            return Err(CoefficientError::InvalidModel(format!(
                "nu must be nonnegative, got {nu}"
            )));
        }
        self.nu = nu;
        Ok(self)
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn rho_bounds(&self) -> (f64, f64) {
        self.rho_bounds
    }

    pub fn bounds(&self) -> CoefficientBounds {
        self.bounds
    }

    pub fn kappa(&self, rho: f64) -> f64 {
        match &self.kind {
            ModelKind::Kazhikhov { kappa0, .. } => *kappa0,
            ModelKind::Combustion { k, gas, .. } => gas.alpha * k * gas.temperature(rho),
            ModelKind::Tabulated { kappa, .. } => kappa.eval(rho),
            ModelKind::Custom { kappa, .. } => kappa(rho),
        }
    }

    pub fn mu(&self, rho: f64) -> f64 {
        match &self.kind {
            ModelKind::Kazhikhov { kappa0, mu0 } => 0.5 * kappa0 * rho + mu0,
            ModelKind::Combustion { k, cp, gas, mu0 } => {
                -k * gas.temperature(rho).ln() / (2.0 * cp) + mu0
            }
            ModelKind::Tabulated { mu, .. } => mu.eval(rho),
            ModelKind::Custom { mu, .. } => mu(rho),
        }
    }

    pub fn mu_prime(&self, rho: f64) -> f64 {
        match &self.kind {
            ModelKind::Kazhikhov { kappa0, .. } => 0.5 * kappa0,
            ModelKind::Combustion { k, cp, .. } => k / (2.0 * cp * rho),
            ModelKind::Tabulated { mu, .. } => mu.derivative(rho),
            ModelKind::Custom { mu_prime, .. } => mu_prime(rho),
        }
    }

    /// K(ρ) = ∫₁^ρ κ(s) ds.
    pub fn big_k(&self, rho: f64) -> f64 {
        match &self.kind {
            ModelKind::Kazhikhov { kappa0, .. } => kappa0 * (rho - 1.0),
            ModelKind::Combustion { k, gas, .. } => gas.alpha * k * gas.p0 / gas.r * rho.ln(),
            ModelKind::Tabulated { kappa, .. } => kappa.integral(1.0, rho),
            ModelKind::Custom { big_k, .. } => big_k(rho),
        }
    }

    /// Second viscosity; only enters the recovery of the original pressure.
    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// −κ(ρ) + 2μ′(ρ)
    pub fn relation_residual(&self, rho: f64) -> f64 {
        -self.kappa(rho) + 2.0 * self.mu_prime(rho)
    }

    pub fn kappa_field(&self, rho: &ScalarField) -> ScalarField {
        rho.map(|r| self.kappa(r))
    }

    pub fn mu_field(&self, rho: &ScalarField) -> ScalarField {
        rho.map(|r| self.mu(r))
    }

    pub fn big_k_field(&self, rho: &ScalarField) -> ScalarField {
        rho.map(|r| self.big_k(r))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RelationReport {
    pub max_residual: f64,
    pub worst_rho: f64,
    pub pass: bool,
}

/// max |−κ(ρ) + 2μ′(ρ)| over the samples; pass iff ≤ tol.
pub fn check_relation(
    model: &CoefficientModel,
    samples: &[f64],
    tol: f64,
) -> Result<RelationReport, CoefficientError> {
    if samples.is_empty() {
        return Err(CoefficientError::EmptySamples);
    }
    let (lo, hi) = model.rho_bounds();
    let mut worst = (0.0, samples[0]);
    for &rho in samples {
        if !(rho >= lo && rho <= hi) {
            return Err(CoefficientError::SampleOutOfBounds { rho, lo, hi });
        }
        let r = model.relation_residual(rho).abs();
        if !(r <= worst.0) {
            worst = (r, rho);
        }
    }
    Ok(RelationReport {
        max_residual: worst.0,
        worst_rho: worst.1,
        pass: worst.0 <= tol,
    })
}

fn require_positive(rho: &ScalarField) -> Result<(), CoefficientError> {
    let m = rho.min();
    if !(m > 0.0) {
        return Err(CoefficientError::NonPositiveDensity(m));
    }
    Ok(())
}

/// ϑ = P0/(Rρ) pointwise.
pub fn temperature_from_density(
    rho: &ScalarField,
    gas: &GasConstants,
) -> Result<ScalarField, CoefficientError> {
    require_positive(rho)?;
    Ok(rho.map(|r| gas.temperature(r)))
}

/// (κ(ρ)/ρ)∇ρ = κ∇ln ρ, with the product dealiased.
pub fn log_density_flux(
    rho: &ScalarField,
    model: &CoefficientModel,
) -> Result<VectorField, CoefficientError> {
    require_positive(rho)?;
    let coef = rho.map(|r| model.kappa(r) / r);
    Ok(gradient(rho).mul_scalar(&coef))
}

/// u = v + κ(ρ)∇ln ρ
pub fn u_from_v(
    rho: &ScalarField,
    v: &VectorField,
    model: &CoefficientModel,
) -> Result<VectorField, CoefficientError> {
    Ok(v.add(&log_density_flux(rho, model)?))
}

/// v = u − κ(ρ)∇ln ρ
pub fn v_from_u(
    rho: &ScalarField,
    u: &VectorField,
    model: &CoefficientModel,
) -> Result<VectorField, CoefficientError> {
    Ok(u.sub(&log_density_flux(rho, model)?))
}

/// Π = π + κ(ρ)∂tρ + div(2μ(ρ)v) + ν div v, shifted to zero mean.
pub fn recover_original_pressure(
    pi: &ScalarField,
    rho: &ScalarField,
    rho_t: &ScalarField,
    v: &VectorField,
    model: &CoefficientModel,
) -> Result<ScalarField, CoefficientError> {
    require_positive(rho)?;
    let kappa = model.kappa_field(rho);
    let two_mu = model.mu_field(rho).scale(2.0);
    let div_v = divergence(v);
    let total = pi
        .add(&kappa.mul(rho_t))
        .add(&divergence(&v.mul_scalar(&two_mu)))
        .axpy(model.nu(), &div_v);
    Ok(total.add_constant(-total.mean()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::SpectralGrid;
    use std::f64::consts::PI;

    fn samples(n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| 0.5 + 1.5 * i as f64 / (n - 1) as f64)
            .collect()
    }

    #[test]
    fn kazhikhov_relation_exact() {
        let m = CoefficientModel::kazhikhov(0.3, 0.1, 0.5, 2.0).unwrap();
        let r = check_relation(&m, &samples(1000), 1e-12).unwrap();
        assert_eq!(r.max_residual, 0.0);
        assert!(r.pass);
    }

    #[test]
    fn constant_viscosity_fails_relation() {
        let m = CoefficientModel::custom("const", |_| 1.0, |_| 1.0, |_| 0.0, |r| r - 1.0, 0.5, 2.0)
            .unwrap();
        let r = check_relation(&m, &samples(10), 1e-12).unwrap();
        assert_eq!(r.max_residual, 1.0);
        assert!(!r.pass);
    }

    #[test]
    fn cubic_viscosity_with_quadratic_kappa() {
        let m = CoefficientModel::custom(
            "cubic",
            |r| r * r,
            |r| r * r * r / 6.0 + 1.0,
            |r| r * r / 2.0,
            |r| (r * r * r - 1.0) / 3.0,
            0.5,
            2.0,
        )
        .unwrap();
        assert!(check_relation(&m, &samples(100), 1e-14).unwrap().pass);
    }

    #[test]
    fn relation_invariant_under_viscosity_shift() {
        let gas = GasConstants::from_heat_capacity(1.0, 0.4, 1.4).unwrap();
        let a = CoefficientModel::combustion(0.2, 1.4, gas, 1.0, 0.5, 2.0).unwrap();
        let b = CoefficientModel::combustion(0.2, 1.4, gas, 3.0, 0.5, 2.0).unwrap();
        for rho in samples(50) {
            assert_eq!(a.relation_residual(rho), b.relation_residual(rho));
        }
    }

    #[test]
    fn rejects_nonpositive_viscosity() {
        assert!(matches!(
            CoefficientModel::kazhikhov(0.2, -0.2, 0.5, 2.0),
            Err(CoefficientError::NotPositive { name: "mu", .. })
        ));
    }

    #[test]
    fn sample_errors() {
        let m = CoefficientModel::kazhikhov(0.2, 0.1, 0.5, 2.0).unwrap();
        assert!(matches!(
            check_relation(&m, &[], 1.0),
            Err(CoefficientError::EmptySamples)
        ));
        assert!(check_relation(&m, &[3.0], 1.0).is_err());
    }

    #[test]
    fn temperature_cases() {
        let g = SpectralGrid::new(8, 2.0 * PI).unwrap();
        let unit = GasConstants::new(1.0, 1.0, 1.0).unwrap();
        let t = temperature_from_density(&ScalarField::constant(&g, 2.0), &unit).unwrap();
        assert!(t.values().iter().all(|&v| v == 0.5));
        assert!(temperature_from_density(&ScalarField::constant(&g, 0.0), &unit).is_err());
    }

    #[test]
    fn log_density_velocity_shift() {
        let g = SpectralGrid::new(64, 2.0 * PI).unwrap();
        let m =
            CoefficientModel::custom("unit", |_| 1.0, |r| 0.5 * r, |_| 0.5, |r| r - 1.0, 0.5, 2.0)
                .unwrap();
        let rho = ScalarField::from_fn(&g, |x, _| (0.1 * x.sin()).exp());
        let u = u_from_v(&rho, &VectorField::zeros(&g), &m).unwrap();
        let expect = ScalarField::from_fn(&g, |x, _| 0.1 * x.cos());
        assert!(u.x().sub(&expect).linf_norm() < 1e-12);
        assert!(u.y().linf_norm() < 1e-12);
    }

    #[test]
    fn tabulated_model_consistency() {
        let rho: Vec<f64> = (0..13).map(|i| 0.4 + 0.15 * i as f64).collect();
        let kappa: Vec<f64> = rho.iter().map(|r| 0.2 + 0.1 * r).collect();
        let mu: Vec<f64> = rho.iter().map(|r| 0.1 * r + 0.025 * r * r + 0.3).collect();
        let m = CoefficientModel::tabulated(&rho, &kappa, &mu, 0.5, 2.0).unwrap();
        assert_eq!(m.big_k(1.0), 0.0);
        for r in samples(40) {
            let d = 1e-6;
            let fd = (m.mu(r + d) - m.mu(r - d)) / (2.0 * d);
            assert!((m.mu_prime(r) - fd).abs() <= 1e-6 * fd.abs().max(1.0));
        }
    }
}
