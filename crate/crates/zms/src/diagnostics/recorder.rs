use serde::{Deserialize, Serialize};

use crate::besov::{BesovTrack, DyadicPartition};
use crate::coefficients::CoefficientModel;
use crate::solver::{DiagnosticsSink, SimState};
use crate::spectral::{divergence, jacobian, ops::nyquist_energy_fraction};

use super::{
    constraint_residual, density_dissipation_rate, density_energy, gn_ratio, h1_density_norm,
    k_function_residual, solenoidal_velocity, velocity_dissipation_rate, velocity_energy,
    CumulativeIntegrator, DiagnosticsError, GnInequality,
};

/// Everything recorded at one sample time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub step: usize,
    pub time: f64,
    /// ∫|ρ−1|²
    pub density_energy: f64,
    /// 2∫₀ᵗ∫κ|∇ρ|²
    pub density_dissipation: f64,
    pub density_energy_lhs: f64,
    pub density_energy_rhs: f64,
    /// ∫ρ|u|²
    pub velocity_energy: f64,
    /// 4∫₀ᵗ∫μ|Au|²
    pub velocity_dissipation: f64,
    pub velocity_energy_lhs: f64,
    pub velocity_energy_rhs: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    pub mean_rho: f64,
    pub div_u_l2: f64,
    pub div_u_linf: f64,
    /// ‖div(v + κ∇ln ρ)‖_{L²}
    pub constraint_residual: f64,
    /// ‖ρ−1‖_{H¹}
    pub h1_density: f64,
    /// L² residual of the K equation over the step ending here (none at step 0).
    pub k_residual: Option<f64>,
    /// GN ratios of ρ − mean ρ; none for a constant density.
    pub gn_l4: Option<f64>,
    pub gn_linf: Option<f64>,
    pub gn_grad_l4: Option<f64>,
    /// ‖u‖²
    pub u_l2_sq: f64,
    /// ‖∇u‖²
    pub grad_u_l2_sq: f64,
    /// ∫₀ᵗ‖∇u‖²
    pub grad_u_sq_integral: f64,
    pub nyquist_fraction: f64,
    /// Extremes of ρ over every step up to here, sampled or not.
    pub rho_min_running: f64,
    pub rho_max_running: f64,
    pub besov: Option<BesovTrack>,
}

const BASE_COLUMNS: [&str; 28] = [
    "step",
    "time",
    "density_energy",
    "density_dissipation",
    "density_energy_lhs",
    "density_energy_rhs",
    "velocity_energy",
    "velocity_dissipation",
    "velocity_energy_lhs",
    "velocity_energy_rhs",
    "rho_min",
    "rho_max",
    "mean_rho",
    "div_u_l2",
    "div_u_linf",
    "constraint_residual",
    "h1_density",
    "k_residual",
    "gn_l4",
    "gn_linf",
    "gn_grad_l4",
    "u_l2_sq",
    "grad_u_l2_sq",
    "grad_u_sq_integral",
    "nyquist_fraction",
    "rho_min_running",
    "rho_max_running",
    "has_besov",
];

const BESOV_COLUMNS: [&str; 6] = [
    "besov_rho_b1",
    "besov_rho_b3",
    "besov_u_b0",
    "besov_u_b2",
    "besov_grad_u_b1",
    "besov_grad_kappa_b1",
];

fn fmt(v: f64) -> String {
    // Round-trip exact and locale-free.
    format!("{v:e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt).unwrap_or_default()
}

impl DiagnosticsRecord {
    pub fn csv_header() -> String {
        BASE_COLUMNS
            .iter()
            .chain(&BESOV_COLUMNS)
            .copied()
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn csv_row(&self) -> String {
        let mut cols = vec![
            self.step.to_string(),
            fmt(self.time),
            fmt(self.density_energy),
            fmt(self.density_dissipation),
            fmt(self.density_energy_lhs),
            fmt(self.density_energy_rhs),
            fmt(self.velocity_energy),
            fmt(self.velocity_dissipation),
            fmt(self.velocity_energy_lhs),
            fmt(self.velocity_energy_rhs),
            fmt(self.rho_min),
            fmt(self.rho_max),
            fmt(self.mean_rho),
            fmt(self.div_u_l2),
            fmt(self.div_u_linf),
            fmt(self.constraint_residual),
            fmt(self.h1_density),
            fmt_opt(self.k_residual),
            fmt_opt(self.gn_l4),
            fmt_opt(self.gn_linf),
            fmt_opt(self.gn_grad_l4),
            fmt(self.u_l2_sq),
            fmt(self.grad_u_l2_sq),
            fmt(self.grad_u_sq_integral),
            fmt(self.nyquist_fraction),
            fmt(self.rho_min_running),
            fmt(self.rho_max_running),
            u8::from(self.besov.is_some()).to_string(),
        ];
        match &self.besov {
            Some(b) => cols.extend(
                [
                    b.rho_b1,
                    b.rho_b3,
                    b.u_b0,
                    b.u_b2,
                    b.grad_u_b1,
                    b.grad_kappa_b1,
                ]
                .map(fmt),
            ),
            None => cols.extend(std::iter::repeat(String::new()).take(BESOV_COLUMNS.len())),
        }
        cols.join(",")
    }

    /// Parses a row written by [`csv_row`](Self::csv_row).
    pub fn from_csv_row(line: &str) -> Result<Self, String> {
        let cols: Vec<&str> = line.trim_end().split(',').collect();
        let expected = BASE_COLUMNS.len() + BESOV_COLUMNS.len();
        if cols.len() != expected {
            return Err(format!("expected {expected} columns, got {}", cols.len()));
        }
        let num = |i: usize| -> Result<f64, String> {
            cols[i].parse::<f64>().map_err(|e| {
                format!(
                    "column {}: {e}",
                    BASE_COLUMNS.iter().chain(&BESOV_COLUMNS).nth(i).unwrap()
                )
            })
        };
        let opt = |i: usize| -> Result<Option<f64>, String> {
            if cols[i].is_empty() {
                Ok(None)
            } else {
                num(i).map(Some)
            }
        };
        let time = num(1)?;
        let besov = if cols[27] == "1" {
            let b = |k: usize| num(28 + k);
            Some(BesovTrack {
                time,
                rho_b1: b(0)?,
                rho_b3: b(1)?,
                u_b0: b(2)?,
                u_b2: b(3)?,
                grad_u_b1: b(4)?,
                grad_kappa_b1: b(5)?,
                nyquist_fraction: num(24)?,
            })
        } else {
            None
        };
        Ok(Self {
            step: cols[0].parse().map_err(|e| format!("column step: {e}"))?,
            time,
            density_energy: num(2)?,
            density_dissipation: num(3)?,
            density_energy_lhs: num(4)?,
            density_energy_rhs: num(5)?,
            velocity_energy: num(6)?,
            velocity_dissipation: num(7)?,
            velocity_energy_lhs: num(8)?,
            velocity_energy_rhs: num(9)?,
            rho_min: num(10)?,
            rho_max: num(11)?,
            mean_rho: num(12)?,
            div_u_l2: num(13)?,
            div_u_linf: num(14)?,
            constraint_residual: num(15)?,
            h1_density: num(16)?,
            k_residual: opt(17)?,
            gn_l4: opt(18)?,
            gn_linf: opt(19)?,
            gn_grad_l4: opt(20)?,
            u_l2_sq: num(21)?,
            grad_u_l2_sq: num(22)?,
            grad_u_sq_integral: num(23)?,
            nyquist_fraction: num(24)?,
            rho_min_running: num(25)?,
            rho_max_running: num(26)?,
            besov,
        })
    }
}

/// Sink that integrates dissipation every step and builds a
/// [`DiagnosticsRecord`] at every sample.
pub struct Recorder {
    model: CoefficientModel,
    track_besov: bool,
    partition: Option<DyadicPartition>,
    integrator: CumulativeIntegrator,
    /// (∫|ρ₀−1|², ∫ρ₀|u₀|²)
    initial: Option<(f64, f64)>,
    /// Extremes of ρ over every observed time level, sampled or not.
    rho_range: Option<(f64, f64)>,
    pub records: Vec<DiagnosticsRecord>,
    pub warnings: Vec<String>,
}

impl Recorder {
    pub fn new(model: &CoefficientModel) -> Self {
        Self {
            model: model.clone(),
            track_besov: true,
            partition: None,
            integrator: CumulativeIntegrator::new(),
            initial: None,
            rho_range: None,
            records: Vec::new(),
            warnings: Vec::new(),
        }
    }

    /// Skips the Besov norms, which dominate the per-sample cost.
    pub fn without_besov(mut self) -> Self {
        self.track_besov = false;
        self
    }

    pub fn besov_track(&self) -> Vec<BesovTrack> {
        self.records.iter().filter_map(|r| r.besov).collect()
    }

    /// (min ρ, max ρ) over all time levels seen so far.
    pub fn observed_rho_range(&self) -> Option<(f64, f64)> {
        self.rho_range
    }

    fn integrate(&mut self, state: &SimState) -> Result<(), DiagnosticsError> {
        if self.integrator.last_time() == Some(state.time) {
            return Ok(());
        }
        let (lo, hi) = (state.rho.min(), state.rho.max());
        self.rho_range = Some(match self.rho_range {
            Some((a, b)) => (a.min(lo), b.max(hi)),
            None => (lo, hi),
        });
        let u = solenoidal_velocity(state, &self.model)?;
        let d_rho = density_dissipation_rate(&state.rho, &self.model);
        let d_u = velocity_dissipation_rate(&state.rho, &u, &self.model);
        let g = jacobian(&u).l2_norm_sq();
        self.integrator.push(state.time, d_rho, d_u, g)
    }

    pub fn record(
        &mut self,
        step: usize,
        previous: Option<&SimState>,
        state: &SimState,
    ) -> Result<DiagnosticsRecord, DiagnosticsError> {
        self.integrate(state)?;
        let model = &self.model;
        let u = solenoidal_velocity(state, model)?;
        let rho = &state.rho;
        let e_rho = density_energy(rho);
        let e_u = velocity_energy(rho, &u);
        let (e_rho0, e_u0) = *self.initial.get_or_insert((e_rho, e_u));
        let div = divergence(&u);
        let centered = rho.add_constant(-rho.mean());
        let gn = |kind| gn_ratio(&centered, kind);
        let nyquist_fraction = nyquist_energy_fraction(&rho.add_constant(-1.0))
            .max(nyquist_energy_fraction(u.x()))
            .max(nyquist_energy_fraction(u.y()));
        let besov = if self.track_besov {
            let partition = self
                .partition
                .get_or_insert_with(|| DyadicPartition::new(rho.grid()));
            Some(
                BesovTrack::compute(partition, state.time, rho, &u, &model.kappa_field(rho))
                    .expect("partition built on the state's grid"),
            )
        } else {
            None
        };
        let (rho_min_running, rho_max_running) =
            self.rho_range.expect("integrate records the range");
        let k_residual = match previous {
            Some(p) => Some(k_function_residual(p, state, model)?),
            None => None,
        };
        let record = DiagnosticsRecord {
            step,
            time: state.time,
            density_energy: e_rho,
            density_dissipation: self.integrator.density_dissipation(),
            density_energy_lhs: e_rho + self.integrator.density_dissipation(),
            density_energy_rhs: e_rho0,
            velocity_energy: e_u,
            velocity_dissipation: self.integrator.velocity_dissipation(),
            velocity_energy_lhs: e_u + self.integrator.velocity_dissipation(),
            velocity_energy_rhs: e_u0,
            rho_min: rho.min(),
            rho_max: rho.max(),
            mean_rho: rho.mean(),
            div_u_l2: div.l2_norm(),
            div_u_linf: div.linf_norm(),
            constraint_residual: constraint_residual(state, model)?,
            h1_density: h1_density_norm(rho),
            k_residual,
            gn_l4: gn(GnInequality::L4),
            gn_linf: gn(GnInequality::LinfInterpolation),
            gn_grad_l4: gn(GnInequality::GradL4),
            u_l2_sq: u.l2_norm_sq(),
            grad_u_l2_sq: jacobian(&u).l2_norm_sq(),
            grad_u_sq_integral: self.integrator.grad_u_integral(),
            nyquist_fraction,
            rho_min_running,
            rho_max_running,
            besov,
        };
        self.records.push(record.clone());
        Ok(record)
    }
}

impl DiagnosticsSink for Recorder {
    fn sample(
        &mut self,
        step: usize,
        previous: Option<&SimState>,
        state: &SimState,
    ) -> Result<(), String> {
        self.record(step, previous, state)
            .map(|_| ())
            .map_err(|e| e.to_string())
    }

    fn observe(
        &mut self,
        _step: usize,
        _previous: &SimState,
        state: &SimState,
    ) -> Result<(), String> {
        self.integrate(state).map_err(|e| e.to_string())
    }

    fn warn(&mut self, message: &str) {
        self.warnings.push(message.to_string());
    }
}
