use serde::Serialize;

use crate::spectral::{gradient, ScalarField};

use super::{BesovError, BesovIndex, DyadicPartition};

/// Largest ‖ab‖_{B^s_{2,1}} / (‖a‖_{B¹_{2,1}}‖b‖_{B^s_{2,1}}) seen for one s.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProductSample {
    pub s: f64,
    pub max_ratio: f64,
    pub evaluated: usize,
    /// Pairs with a zero factor, where the ratio is 0/0.
    pub skipped: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProductEstimateReport {
    pub per_s: Vec<ProductSample>,
}

impl ProductEstimateReport {
    pub fn max_ratio(&self, s: f64) -> Option<f64> {
        self.per_s.iter().find(|p| p.s == s).map(|p| p.max_ratio)
    }
}

/// Empirical constant of ‖ab‖_{B^s_{2,1}} ≤ C‖a‖_{B¹_{2,1}}‖b‖_{B^s_{2,1}}
/// for each s, with the dealiased product.
pub fn product_estimate_check(
    partition: &DyadicPartition,
    pairs: &[(ScalarField, ScalarField)],
    s_values: &[f64],
) -> Result<ProductEstimateReport, BesovError> {
    for &s in s_values {
        if !(s > -1.0 && s <= 1.0) {
            return Err(BesovError::InvalidIndex(format!(
                "product estimate needs s in (-1, 1], got {s}"
            )));
        }
    }
    let mut per_s: Vec<ProductSample> = s_values
        .iter()
        .map(|&s| ProductSample {
            s,
            max_ratio: 0.0,
            evaluated: 0,
            skipped: 0,
        })
        .collect();
    for (a, b) in pairs {
        let a_norm = partition.norm(a, BesovIndex::b2_1(1.0))?;
        let ab = a.mul(b);
        let b_blocks = partition.block_norms(&[b], 2.0)?;
        let ab_blocks = partition.block_norms(&[&ab], 2.0)?;
        for sample in &mut per_s {
            let b_norm = super::weighted_sum(&b_blocks, sample.s, 1.0);
            let denom = a_norm * b_norm;
            if denom == 0.0 {
                sample.skipped += 1;
                continue;
            }
            let ratio = super::weighted_sum(&ab_blocks, sample.s, 1.0) / denom;
            sample.max_ratio = sample.max_ratio.max(ratio);
            sample.evaluated += 1;
        }
    }
    Ok(ProductEstimateReport { per_s })
}

/// Maxima (and for B⁰_{2,2}/L² also the minimum) of the embedding ratios.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmbeddingReport {
    /// ‖f‖_{L∞}/‖f‖_{B¹_{2,1}}
    pub linf_over_b1: f64,
    /// ‖f‖_{L²}/‖f‖_{B⁰_{2,1}}
    pub l2_over_b0: f64,
    /// ‖f‖_{H¹}/‖f‖_{B¹_{2,1}}
    pub h1_over_b1: f64,
    /// ‖f‖_{B⁰_{2,2}}/‖f‖_{L²}, min and max
    pub b0_22_over_l2: (f64, f64),
    pub evaluated: usize,
    pub skipped: usize,
}

pub fn embedding_check(
    partition: &DyadicPartition,
    samples: &[ScalarField],
) -> Result<EmbeddingReport, BesovError> {
    let mut report = EmbeddingReport {
        linf_over_b1: 0.0,
        l2_over_b0: 0.0,
        h1_over_b1: 0.0,
        b0_22_over_l2: (f64::INFINITY, 0.0),
        evaluated: 0,
        skipped: 0,
    };
    for f in samples {
        let l2 = f.l2_norm();
        if l2 == 0.0 {
            report.skipped += 1;
            continue;
        }
        let blocks = partition.block_norms(&[f], 2.0)?;
        let b1 = super::weighted_sum(&blocks, 1.0, 1.0);
        let b0 = super::weighted_sum(&blocks, 0.0, 1.0);
        let b0_22 = super::weighted_sum(&blocks, 0.0, 2.0);
        let h1 = (l2 * l2 + gradient(f).l2_norm_sq()).sqrt();
        report.linf_over_b1 = report.linf_over_b1.max(f.linf_norm() / b1);
        report.l2_over_b0 = report.l2_over_b0.max(l2 / b0);
        report.h1_over_b1 = report.h1_over_b1.max(h1 / b1);
        let r = b0_22 / l2;
        report.b0_22_over_l2 = (report.b0_22_over_l2.0.min(r), report.b0_22_over_l2.1.max(r));
        report.evaluated += 1;
    }
    Ok(report)
}
