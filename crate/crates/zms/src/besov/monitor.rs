use serde::{Deserialize, Serialize};

use crate::spectral::{gradient, jacobian, ops::nyquist_energy_fraction, ScalarField, VectorField};

use super::{BesovError, BesovIndex, DyadicPartition, RESOLUTION_WARNING_FRACTION};

/// Besov norms of one state, as tracked over a run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesovTrack {
    pub time: f64,
    /// ‖ρ − 1‖_{B¹_{2,1}}
    pub rho_b1: f64,
    /// ‖ρ − 1‖_{B³_{2,1}}
    pub rho_b3: f64,
    /// ‖u‖_{B⁰_{2,1}}
    pub u_b0: f64,
    /// ‖u‖_{B²_{2,1}}
    pub u_b2: f64,
    /// ‖∇u‖_{B¹_{2,1}}
    pub grad_u_b1: f64,
    /// ‖∇κ(ρ)‖_{B¹_{2,1}}
    pub grad_kappa_b1: f64,
    /// Largest energy fraction beyond the 2/3 band over ρ and u.
    pub nyquist_fraction: f64,
}

impl BesovTrack {
    pub fn compute(
        partition: &DyadicPartition,
        time: f64,
        rho: &ScalarField,
        u: &VectorField,
        kappa: &ScalarField,
    ) -> Result<Self, BesovError> {
        let a = rho.add_constant(-1.0);
        let a_blocks = partition.block_norms(&[&a], 2.0)?;
        let u_blocks = partition.block_norms(&[u.x(), u.y()], 2.0)?;
        let jac = jacobian(u);
        let grad_u_b1 = partition.norm_multi(
            &[jac.get(0, 0), jac.get(0, 1), jac.get(1, 0), jac.get(1, 1)],
            BesovIndex::b2_1(1.0),
        )?;
        let gk = gradient(kappa);
        let grad_kappa_b1 = partition.norm_multi(&[gk.x(), gk.y()], BesovIndex::b2_1(1.0))?;
        let nyquist_fraction = nyquist_energy_fraction(&a)
            .max(nyquist_energy_fraction(u.x()))
            .max(nyquist_energy_fraction(u.y()));
        Ok(Self {
            time,
            rho_b1: super::weighted_sum(&a_blocks, 1.0, 1.0),
            rho_b3: super::weighted_sum(&a_blocks, 3.0, 1.0),
            u_b0: super::weighted_sum(&u_blocks, 0.0, 1.0),
            u_b2: super::weighted_sum(&u_blocks, 2.0, 1.0),
            grad_u_b1,
            grad_kappa_b1,
            nyquist_fraction,
        })
    }
}

/// Trapezoidal running integral of `f` over the track.
fn running_integral(track: &[BesovTrack], f: impl Fn(&BesovTrack) -> f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(track.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in track.windows(2) {
        acc += 0.5 * (w[1].time - w[0].time) * (f(&w[0]) + f(&w[1]));
        out.push(acc);
    }
    out
}

/// LHS and RHS of the parabolic estimate with s = 1:
/// sup_τ‖a‖_{B¹} + ∫‖a‖_{B³} against ‖a₀‖_{B¹}·exp(∫‖∇u‖_{B¹} + ∫‖∇κ‖²_{B¹}).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParabolicReport {
    pub times: Vec<f64>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    /// ∫‖∇u‖_{B¹} + ∫‖∇κ‖²_{B¹}
    pub exponent: Vec<f64>,
    /// max_t LHS/RHS: the smallest C with LHS ≤ C·RHS on the run.
    pub empirical_c: f64,
}

pub fn parabolic_besov_monitor(track: &[BesovTrack]) -> Result<ParabolicReport, BesovError> {
    if track.is_empty() {
        return Err(BesovError::EmptyHistory);
    }
    let int_b3 = running_integral(track, |t| t.rho_b3);
    let int_u = running_integral(track, |t| t.grad_u_b1);
    let int_k = running_integral(track, |t| t.grad_kappa_b1 * t.grad_kappa_b1);
    let a0 = track[0].rho_b1;
    let mut sup = 0.0f64;
    let mut report = ParabolicReport {
        times: Vec::with_capacity(track.len()),
        lhs: Vec::with_capacity(track.len()),
        rhs: Vec::with_capacity(track.len()),
        exponent: Vec::with_capacity(track.len()),
        empirical_c: 0.0,
    };
    for (i, t) in track.iter().enumerate() {
        sup = sup.max(t.rho_b1);
        let lhs = sup + int_b3[i];
        let exponent = int_u[i] + int_k[i];
        let rhs = a0 * exponent.exp();
        if rhs > 0.0 {
            report.empirical_c = report.empirical_c.max(lhs / rhs);
        }
        report.times.push(t.time);
        report.lhs.push(lhs);
        report.rhs.push(rhs);
        report.exponent.push(exponent);
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StrongNormRow {
    pub time: f64,
    pub rho_b1: f64,
    pub int_rho_b3: f64,
    pub u_b0: f64,
    pub int_u_b2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StrongNormReport {
    pub rows: Vec<StrongNormRow>,
    /// max_t (‖ρ−1‖_{B¹} + ‖u‖_{B⁰})(t) / (same at t = 0)
    pub max_growth: f64,
    /// max_growth exceeded the configured factor.
    pub growth_flag: bool,
    /// Some sample carried more than the warning fraction of energy beyond the 2/3 band.
    pub under_resolved: bool,
    pub rho_b1_nonincreasing: bool,
}

pub fn strong_norm_monitor(
    track: &[BesovTrack],
    growth_factor: f64,
) -> Result<StrongNormReport, BesovError> {
    if track.is_empty() {
        return Err(BesovError::EmptyHistory);
    }
    let int_b3 = running_integral(track, |t| t.rho_b3);
    let int_u2 = running_integral(track, |t| t.u_b2);
    let rows: Vec<StrongNormRow> = track
        .iter()
        .enumerate()
        .map(|(i, t)| StrongNormRow {
            time: t.time,
            rho_b1: t.rho_b1,
            int_rho_b3: int_b3[i],
            u_b0: t.u_b0,
            int_u_b2: int_u2[i],
        })
        .collect();
    let e0 = track[0].rho_b1 + track[0].u_b0;
    let max_growth = if e0 > 0.0 {
        track
            .iter()
            .map(|t| (t.rho_b1 + t.u_b0) / e0)
            .fold(0.0, f64::max)
    } else {
        // Starting from equilibrium any growth is infinite growth.
        if track.iter().any(|t| t.rho_b1 + t.u_b0 > 0.0) {
            f64::INFINITY
        } else {
            1.0
        }
    };
    let rho_b1_nonincreasing = track
        .windows(2)
        .all(|w| w[1].rho_b1 <= w[0].rho_b1 * (1.0 + 1e-12) + 1e-15);
    Ok(StrongNormReport {
        rows,
        max_growth,
        growth_flag: max_growth > growth_factor,
        under_resolved: track
            .iter()
            .any(|t| t.nyquist_fraction > RESOLUTION_WARNING_FRACTION),
        rho_b1_nonincreasing,
    })
}
