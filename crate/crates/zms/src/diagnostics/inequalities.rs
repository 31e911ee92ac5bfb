use rand::Rng;
use serde::Serialize;

use crate::spectral::{gradient, laplacian, ScalarField};

use super::DiagnosticsError;

/// Samples whose |mean| exceeds this fraction of their max norm are rejected.
const MEAN_ZERO_TOL: f64 = 1e-10;

/// The scale-invariant ratios checked on mean-zero 2D fields.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GnInequality {
    /// ‖f‖²_{L⁴} / (‖f‖_{L²}‖∇f‖_{L²})
    L4,
    /// ‖f‖²_{L∞} / (‖f‖_{L²}‖Δf‖_{L²})
    LinfInterpolation,
    /// ‖∇f‖²_{L⁴} / (‖Δf‖_{L²}‖∇f‖_{L²})
    GradL4,
}

impl GnInequality {
    pub const ALL: [GnInequality; 3] = [
        GnInequality::L4,
        GnInequality::LinfInterpolation,
        GnInequality::GradL4,
    ];
}

fn grad_l4(f: &ScalarField) -> (f64, f64) {
    let g = gradient(f);
    let h2 = f.grid().cell_area();
    let (mut s4, mut s2) = (0.0, 0.0);
    for (a, b) in g.x().values().iter().zip(g.y().values()) {
        let m2 = a * a + b * b;
        s4 += m2 * m2;
        s2 += m2;
    }
    ((s4 * h2).powf(0.25), (s2 * h2).sqrt())
}

/// The ratio for one field; None when the denominator vanishes.
pub fn gn_ratio(f: &ScalarField, kind: GnInequality) -> Option<f64> {
    let (num, den) = match kind {
        GnInequality::L4 => {
            let l4 = f.lp_norm(4.0);
            (l4 * l4, f.l2_norm() * gradient(f).l2_norm())
        }
        GnInequality::LinfInterpolation => {
            let linf = f.linf_norm();
            (linf * linf, f.l2_norm() * laplacian(f).l2_norm())
        }
        GnInequality::GradL4 => {
            let (g4, g2) = grad_l4(f);
            (g4 * g4, laplacian(f).l2_norm() * g2)
        }
    };
    if den == 0.0 {
        None
    } else {
        Some(num / den)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GnKindReport {
    pub kind: GnInequality,
    pub max_ratio: f64,
    pub evaluated: usize,
    pub skipped: usize,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GnReport {
    pub kinds: Vec<GnKindReport>,
    pub cap: f64,
}

impl GnReport {
    pub fn pass(&self) -> bool {
        self.kinds.iter().all(|k| k.pass)
    }

    pub fn max_ratio(&self, kind: GnInequality) -> f64 {
        self.kinds
            .iter()
            .find(|k| k.kind == kind)
            .map_or(0.0, |k| k.max_ratio)
    }
}

/// Maximum ratio per inequality over mean-zero samples; zero fields are
/// skipped, fields with a nonzero mean are an error.
pub fn gn_inequality_check(
    samples: &[ScalarField],
    cap: f64,
) -> Result<GnReport, DiagnosticsError> {
    for (index, f) in samples.iter().enumerate() {
        let mean = f.mean();
        if mean.abs() > MEAN_ZERO_TOL * f.linf_norm() {
            return Err(DiagnosticsError::NotMeanZero { index, mean });
        }
    }
    let kinds = GnInequality::ALL
        .iter()
        .map(|&kind| {
            let (mut max_ratio, mut evaluated, mut skipped) = (0.0f64, 0, 0);
            for f in samples {
                match gn_ratio(f, kind) {
                    Some(r) => {
                        max_ratio = max_ratio.max(r);
                        evaluated += 1;
                    }
                    None => skipped += 1,
                }
            }
            GnKindReport {
                kind,
                max_ratio,
                evaluated,
                skipped,
                pass: max_ratio <= cap,
            }
        })
        .collect();
    Ok(GnReport { kinds, cap })
}

/// Periodic n³ array with spacing h, index (i, j, k) ↦ (k·n + j)·n + i.
#[derive(Clone, Debug, PartialEq)]
pub struct Field3 {
    pub n: usize,
    pub h: f64,
    pub data: Vec<f64>,
}

impl Field3 {
    fn at(&self, i: usize, j: usize, k: usize) -> f64 {
        let n = self.n;
        self.data[(k % n * n + j % n) * n + i % n]
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            n: self.n,
            h: self.h,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }
}

/// ‖∇f‖_{L⁴} / (‖Δf‖^{1/2}_{L²}‖f‖^{1/2}_{L∞}) with central differences and
/// the 7-point Laplacian; None for a constant array.
pub fn gn3d_ratio(f: &Field3) -> Option<f64> {
    let n = f.n;
    let h = f.h;
    let vol = h * h * h;
    let (mut g4, mut lap2) = (0.0, 0.0);
    for k in 0..n {
        let (kp, km) = (k + 1, k + n - 1);
        for j in 0..n {
            let (jp, jm) = (j + 1, j + n - 1);
            for i in 0..n {
                let (ip, im) = (i + 1, i + n - 1);
                let c = f.at(i, j, k);
                let (xp, xm) = (f.at(ip, j, k), f.at(im, j, k));
                let (yp, ym) = (f.at(i, jp, k), f.at(i, jm, k));
                let (zp, zm) = (f.at(i, j, kp), f.at(i, j, km));
                let gx = (xp - xm) / (2.0 * h);
                let gy = (yp - ym) / (2.0 * h);
                let gz = (zp - zm) / (2.0 * h);
                let m2 = gx * gx + gy * gy + gz * gz;
                g4 += m2 * m2;
                let lap = (xp + xm + yp + ym + zp + zm - 6.0 * c) / (h * h);
                lap2 += lap * lap;
            }
        }
    }
    let linf = f.data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let den = (lap2 * vol).sqrt().sqrt() * linf.sqrt();
    if den == 0.0 {
        None
    } else {
        Some((g4 * vol).powf(0.25) / den)
    }
}

pub fn gn3d_check(samples: &[Field3], cap: f64) -> GnKindReport3 {
    let (mut max_ratio, mut evaluated, mut skipped) = (0.0f64, 0, 0);
    for f in samples {
        match gn3d_ratio(f) {
            Some(r) => {
                max_ratio = max_ratio.max(r);
                evaluated += 1;
            }
            None => skipped += 1,
        }
    }
    GnKindReport3 {
        max_ratio,
        evaluated,
        skipped,
        pass: max_ratio <= cap,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GnKindReport3 {
    pub max_ratio: f64,
    pub evaluated: usize,
    pub skipped: usize,
    pub pass: bool,
}

/// Sum of `modes` random Fourier modes on [0, 2π)³ with integer wavenumbers
/// in [−k_max, k_max]³ \ {0}; the discrete mean is exactly zero.
pub fn synthetic_3d(n: usize, modes: usize, k_max: i64, rng: &mut impl Rng) -> Field3 {
    let h = 2.0 * std::f64::consts::PI / n as f64;
    let mut data = vec![0.0; n * n * n];
    for _ in 0..modes {
        let k = loop {
            let k = [
                rng.gen_range(-k_max..=k_max),
                rng.gen_range(-k_max..=k_max),
                rng.gen_range(-k_max..=k_max),
            ];
            if k != [0, 0, 0] {
                break k;
            }
        };
        let amp: f64 = rng.gen_range(0.1..1.0);
        let phase: f64 = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
        let table = |kk: i64| -> Vec<(f64, f64)> {
            (0..n)
                .map(|i| ((kk as f64) * i as f64 * h).sin_cos())
                .collect()
        };
        let (tx, ty, tz) = (table(k[0]), table(k[1]), table(k[2]));
        let (ps, pc) = phase.sin_cos();
        for (kk, &(sz, cz)) in tz.iter().enumerate() {
            for (jj, &(sy, cy)) in ty.iter().enumerate() {
                // e^{i(θy + θz + φ)}
                let (cyz, syz) = (cy * cz - sy * sz, sy * cz + cy * sz);
                let (c, s) = (cyz * pc - syz * ps, syz * pc + cyz * ps);
                let row = &mut data[(kk * n + jj) * n..(kk * n + jj + 1) * n];
                for (v, &(sx, cx)) in row.iter_mut().zip(&tx) {
                    *v += amp * (sx * c + cx * s);
                }
            }
        }
    }
    Field3 { n, h, data }
}
