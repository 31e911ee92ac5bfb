//! Littlewood-Paley blocks, Besov norms, Bony paraproducts and empirical
//! checks of the product estimate, embeddings and parabolic estimate.

mod bony;
mod estimates;
mod monitor;

pub use bony::{bony_decompose, BonyParts};
pub use estimates::{
    embedding_check, product_estimate_check, EmbeddingReport, ProductEstimateReport, ProductSample,
};
pub use monitor::{
    parabolic_besov_monitor, strong_norm_monitor, BesovTrack, ParabolicReport, StrongNormReport,
    StrongNormRow,
};

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::spectral::{ops::nyquist_energy_fraction, ScalarField, SpectralGrid};

/// Energy fraction beyond the 2/3 band above which data counts as under-resolved.
pub const RESOLUTION_WARNING_FRACTION: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BesovError {
    #[error("block index {j} outside [-1, {j_max}]")]
    BlockOutOfRange { j: i32, j_max: i32 },
    #[error("invalid Besov index: {0}")]
    InvalidIndex(String),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("empty history")]
    EmptyHistory,
}

/// Quintic smoothstep cutoff: 1 on [0, 1], 0 from 4/3 on, C² and nonincreasing.
pub fn smoothstep_chi(r: f64) -> f64 {
    if r <= 1.0 {
        1.0
    } else if r >= 4.0 / 3.0 {
        0.0
    } else {
        let t = (r - 1.0) * 3.0;
        1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t)
    }
}

/// (s, p, r) with p, r ∈ [1, ∞].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesovIndex {
    pub s: f64,
    pub p: f64,
    pub r: f64,
}

impl BesovIndex {
    pub fn new(s: f64, p: f64, r: f64) -> Result<Self, BesovError> {
        if !s.is_finite() {
            return Err(BesovError::InvalidIndex(format!(
                "s must be finite, got {s}"
            )));
        }
        if !(p >= 1.0) || !(r >= 1.0) {
            return Err(BesovError::InvalidIndex(format!(
                "need p, r >= 1, got p = {p}, r = {r}"
            )));
        }
        Ok(Self { s, p, r })
    }

    /// B^s_{2,1}, the scale used throughout the strong-solution theory.
    pub fn b2_1(s: f64) -> Self {
        Self { s, p: 2.0, r: 1.0 }
    }
}

/// Dyadic partition χ_{−1} = χ, χ_j(ξ) = χ(ξ/2^{j+1}) − χ(ξ/2^j), tabulated on a grid.
#[derive(Clone)]
pub struct DyadicPartition {
    grid: SpectralGrid,
    chi: fn(f64) -> f64,
    j_max: i32,
    /// multipliers[j + 1][idx]
    multipliers: Vec<Vec<f64>>,
}

impl std::fmt::Debug for DyadicPartition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DyadicPartition")
            .field("n", &self.grid.n())
            .field("length", &self.grid.length())
            .field("j_max", &self.j_max)
            .finish()
    }
}

impl DyadicPartition {
    pub fn new(grid: &SpectralGrid) -> Self {
        Self::with_profile(grid, smoothstep_chi)
    }

    /// `chi` must be nonincreasing, 1 on [0, 1] and 0 from 4/3 on.
    pub fn with_profile(grid: &SpectralGrid, chi: fn(f64) -> f64) -> Self {
        // Smallest J with χ(ξ/2^{J+1}) = 1 on every grid mode, so the blocks
        // −1..=J sum to the identity exactly.
        let xi_max = grid.max_abs_frequency();
        let mut j_max = -1;
        while 2f64.powi(j_max + 1) < xi_max {
            j_max += 1;
        }
        let freqs: Vec<f64> = (0..grid.len()).map(|i| grid.abs_frequency(i)).collect();
        let multipliers = (-1..=j_max)
            .map(|j| {
                freqs
                    .iter()
                    .map(|&xi| {
                        if j == -1 {
                            chi(xi)
                        } else {
                            chi(xi / 2f64.powi(j + 1)) - chi(xi / 2f64.powi(j))
                        }
                    })
                    .collect()
            })
            .collect();
        Self {
            grid: grid.clone(),
            chi,
            j_max,
            multipliers,
        }
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn j_max(&self) -> i32 {
        self.j_max
    }

    pub fn chi(&self, r: f64) -> f64 {
        (self.chi)(r)
    }

    /// χ_j on the grid, indexed like a spectrum.
    pub fn multiplier(&self, j: i32) -> Result<&[f64], BesovError> {
        self.check_j(j)?;
        Ok(&self.multipliers[(j + 1) as usize])
    }

    fn check_j(&self, j: i32) -> Result<(), BesovError> {
        if j < -1 || j > self.j_max {
            return Err(BesovError::BlockOutOfRange {
                j,
                j_max: self.j_max,
            });
        }
        Ok(())
    }

    fn check_grid(&self, f: &ScalarField) -> Result<(), BesovError> {
        if f.grid() != &self.grid {
            return Err(BesovError::GridMismatch);
        }
        Ok(())
    }

    /// Δ_j f = χ_j(D) f.
    pub fn block(&self, f: &ScalarField, j: i32) -> Result<ScalarField, BesovError> {
        self.check_grid(f)?;
        let m = self.multiplier(j)?;
        let spectrum: Vec<Complex64> = f.spectrum().iter().zip(m).map(|(c, &w)| c * w).collect();
        Ok(ScalarField::from_spectrum(&self.grid, spectrum))
    }

    /// All blocks Δ_{−1} f, ..., Δ_{j_max} f.
    pub fn blocks(&self, f: &ScalarField) -> Result<Vec<ScalarField>, BesovError> {
        (-1..=self.j_max).map(|j| self.block(f, j)).collect()
    }

    /// ‖Δ_j f‖_{L^p} for j = −1..=j_max, components of `fields` combined in ℓ²
    /// pointwise (so vector and tensor fields use |Δ_j u|).
    pub fn block_norms(&self, fields: &[&ScalarField], p: f64) -> Result<Vec<f64>, BesovError> {
        for f in fields {
            self.check_grid(f)?;
        }
        let area = self.grid.area();
        let mut out = Vec::with_capacity(self.multipliers.len());
        for (k, m) in self.multipliers.iter().enumerate() {
            if p == 2.0 {
                // Parseval: no inverse transform needed.
                let e: f64 = fields
                    .iter()
                    .map(|f| {
                        f.spectrum()
                            .iter()
                            .zip(m)
                            .map(|(c, &w)| c.norm_sqr() * w * w)
                            .sum::<f64>()
                    })
                    .sum();
                out.push((e * area).sqrt());
            } else {
                let j = k as i32 - 1;
                let blocks: Vec<ScalarField> = fields
                    .iter()
                    .map(|f| self.block(f, j))
                    .collect::<Result<_, _>>()?;
                let mut mag = ScalarField::zeros(&self.grid);
                for b in &blocks {
                    mag = mag.zip_map(b, |acc, v| acc + v * v);
                }
                out.push(mag.map(f64::sqrt).lp_norm(p));
            }
        }
        Ok(out)
    }

    /// ‖(2^{js}‖Δ_j f‖_{L^p})_j‖_{ℓ^r}.
    pub fn norm(&self, f: &ScalarField, idx: BesovIndex) -> Result<f64, BesovError> {
        self.norm_multi(&[f], idx)
    }

    pub fn norm_multi(&self, fields: &[&ScalarField], idx: BesovIndex) -> Result<f64, BesovError> {
        let norms = self.block_norms(fields, idx.p)?;
        Ok(weighted_sum(&norms, idx.s, idx.r))
    }
}

/// ℓ^r norm of (2^{js} n_j)_{j ≥ −1}.
pub fn weighted_sum(block_norms: &[f64], s: f64, r: f64) -> f64 {
    let weighted = block_norms
        .iter()
        .enumerate()
        .map(|(k, &n)| 2f64.powf(s * (k as f64 - 1.0)) * n);
    if r.is_infinite() {
        weighted.fold(0.0, f64::max)
    } else if r == 1.0 {
        weighted.sum()
    } else {
        weighted.map(|w| w.powf(r)).sum::<f64>().powf(1.0 / r)
    }
}

/// Δ_j f with the default partition of f's grid.
pub fn dyadic_block(f: &ScalarField, j: i32) -> Result<ScalarField, BesovError> {
    DyadicPartition::new(f.grid()).block(f, j)
}

/// Besov norm with the default partition of f's grid.
pub fn besov_norm(f: &ScalarField, idx: BesovIndex) -> f64 {
    DyadicPartition::new(f.grid())
        .norm(f, idx)
        .expect("partition built on the field's own grid")
}

/// True when f carries more than [`RESOLUTION_WARNING_FRACTION`] of its
/// energy beyond the 2/3 band, in which case its Besov norms are suspect.
pub fn under_resolved(f: &ScalarField) -> bool {
    nyquist_energy_fraction(f) > RESOLUTION_WARNING_FRACTION
}
