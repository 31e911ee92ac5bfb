use serde::Serialize;

use super::{DiagnosticsError, DiagnosticsRecord};

/// Relative defect |LHS − RHS|/RHS of an energy identity over a history.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyCheck {
    pub times: Vec<f64>,
    pub defects: Vec<f64>,
    pub max_defect: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn energy_check(
    history: &[DiagnosticsRecord],
    tolerance: f64,
    sides: impl Fn(&DiagnosticsRecord) -> (f64, f64),
) -> Result<EnergyCheck, DiagnosticsError> {
    if history.is_empty() {
        return Err(DiagnosticsError::EmptyHistory);
    }
    let mut times = Vec::with_capacity(history.len());
    let mut defects = Vec::with_capacity(history.len());
    for r in history {
        let (lhs, rhs) = sides(r);
        let defect = if rhs > 0.0 {
            (lhs - rhs).abs() / rhs
        } else {
            // Zero-energy data: both sides vanish, anything else is an absolute defect.
            lhs.abs()
        };
        times.push(r.time);
        defects.push(defect);
    }
    let max_defect = defects.iter().copied().fold(0.0, f64::max);
    Ok(EnergyCheck {
        times,
        defects,
        max_defect,
        tolerance,
        pass: max_defect <= tolerance,
    })
}

/// ∫|ρ(t)−1|² + 2∫₀ᵗ∫κ|∇ρ|² = ∫|ρ₀−1|²
pub fn density_energy_check(
    history: &[DiagnosticsRecord],
    tolerance: f64,
) -> Result<EnergyCheck, DiagnosticsError> {
    energy_check(history, tolerance, |r| {
        (r.density_energy_lhs, r.density_energy_rhs)
    })
}

/// ∫ρ(t)|u(t)|² + 4∫₀ᵗ∫μ|Au|² = ∫ρ₀|u₀|²
pub fn velocity_energy_check(
    history: &[DiagnosticsRecord],
    tolerance: f64,
) -> Result<EnergyCheck, DiagnosticsError> {
    energy_check(history, tolerance, |r| {
        (r.velocity_energy_lhs, r.velocity_energy_rhs)
    })
}

/// Ĉ = sup_t (‖u(t)‖² + ∫₀ᵗ‖∇u‖²)/‖u₀‖².
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InequalityReport {
    pub c_hat: f64,
    pub series: Vec<(f64, f64)>,
}

pub fn energy_inequality_check(
    history: &[DiagnosticsRecord],
) -> Result<InequalityReport, DiagnosticsError> {
    let first = history.first().ok_or(DiagnosticsError::EmptyHistory)?;
    let e0 = first.u_l2_sq;
    if e0 == 0.0 {
        return Err(DiagnosticsError::VacuousInequality);
    }
    let series: Vec<(f64, f64)> = history
        .iter()
        .map(|r| (r.time, (r.u_l2_sq + r.grad_u_sq_integral) / e0))
        .collect();
    let c_hat = series.iter().map(|s| s.1).fold(0.0, f64::max);
    Ok(InequalityReport { c_hat, series })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaxPrincipleReport {
    pub lower: f64,
    pub upper: f64,
    /// Largest distance by which ρ left [lower, upper]; 0 if it never did.
    pub worst_excursion: f64,
    pub worst_time: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Checks ρ(t) ∈ [min ρ₀ − tol, max ρ₀ + tol] at every step, using the
/// running extremes carried by each record.
pub fn max_principle_check(
    history: &[DiagnosticsRecord],
    tolerance: f64,
) -> Result<MaxPrincipleReport, DiagnosticsError> {
    let first = history.first().ok_or(DiagnosticsError::EmptyHistory)?;
    let (lower, upper) = (first.rho_min, first.rho_max);
    let mut worst = (0.0, first.time);
    for r in history {
        let lo = r.rho_min.min(r.rho_min_running);
        let hi = r.rho_max.max(r.rho_max_running);
        let excursion = (lower - lo).max(hi - upper).max(0.0);
        if excursion > worst.0 {
            worst = (excursion, r.time);
        }
    }
    Ok(MaxPrincipleReport {
        lower,
        upper,
        worst_excursion: worst.0,
        worst_time: worst.1,
        tolerance,
        pass: worst.0 <= tolerance,
    })
}
