use std::collections::HashMap;

use rustfft::num_complex::Complex64;

use super::ops::SpectralMap;
use super::{ScalarField, SpectralError, SpectralGrid};

/// Unnormalized bump exp(−1/(1−r²)) on the unit disk.
pub fn bump(r: f64) -> f64 {
    if r >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - r * r)).exp()
    }
}

/// Radial quadrature intervals for the bump transform (composite Simpson;
/// the integrand is smooth with a simple zero at r = 0).
const RADIAL_INTERVALS: usize = 1024;

/// m(s) = ∫₀¹ φ(r)J₀(sr) r dr / ∫₀¹ φ(r) r dr, the Fourier transform of the
/// unit-mass bump at |ξ|·ε = s.
fn bump_transform(s: f64) -> f64 {
    let h = 1.0 / RADIAL_INTERVALS as f64;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 1..RADIAL_INTERVALS {
        let r = i as f64 * h;
        let w = if i % 2 == 1 { 4.0 } else { 2.0 } * bump(r) * r;
        num += w * libm::j0(s * r);
        den += w;
    }
    num / den
}

fn sampled_multiplier(grid: &SpectralGrid, eps: f64) -> Vec<f64> {
    let n = grid.n();
    let (l, h) = (grid.length(), grid.spacing());
    // Periodic distance to the origin along one axis.
    let wrap = |i: usize| {
        let d = i as f64 * h;
        d.min(l - d)
    };
    let mut weights: Vec<f64> = (0..n * n)
        .map(|idx| bump(wrap(idx % n).hypot(wrap(idx / n)) / eps))
        .collect();
    let mass: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= mass;
    }
    // Spectra carry 1/N², the convolution multiplier is Σ_j w_j e^{−iξ·x_j}.
    let scale = (n * n) as f64;
    ScalarField::from_values(grid, weights)
        .expect("grid-sized buffer")
        .spectrum()
        .iter()
        .map(|c| c.re * scale)
        .collect()
}

fn continuous_multiplier(grid: &SpectralGrid, eps: f64) -> Vec<f64> {
    let n = grid.n();
    let base = 2.0 * std::f64::consts::PI / grid.length();
    // Radial, so evaluate once per |k|².
    let mut cache: HashMap<i64, f64> = HashMap::new();
    let mut multiplier = Vec::with_capacity(grid.len());
    for my in 0..n {
        for mx in 0..n {
            let (kx, ky) = (grid.wavenumber(mx), grid.wavenumber(my));
            let k2 = kx * kx + ky * ky;
            let m = *cache
                .entry(k2)
                .or_insert_with(|| bump_transform(eps * base * (k2 as f64).sqrt()));
            multiplier.push(m);
        }
    }
    multiplier
}

/// Widths below this many grid spacings use the continuous transform.
const RESOLVED_SPACINGS: f64 = 2.0;

/// Convolution with the periodized bump φ_ε(x) = ε⁻²φ(|x|/ε) of unit mass.
///
/// When the grid resolves the support (ε ≥ 2h) the bump is sampled on the
/// grid and renormalized to unit discrete mass, so the kernel is nonnegative
/// and pointwise bounds are preserved exactly. Narrower sampled kernels
/// collapse to the identity, so there the multiplier is the continuous
/// transform m(ε|ξ|) at the grid frequencies instead.
#[derive(Clone, Debug)]
pub struct Mollifier {
    eps: f64,
    sampled: bool,
    multiplier: Vec<f64>,
}

impl Mollifier {
    pub fn new(grid: &SpectralGrid, eps: f64) -> Result<Self, SpectralError> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(SpectralError::InvalidMollifier(format!(
                "width must be positive, got {eps}"
            )));
        }
        if eps >= grid.length() / 2.0 {
            return Err(SpectralError::InvalidMollifier(format!(
                "width {eps} reaches half the period {}; the kernel would wrap",
                grid.length() / 2.0
            )));
        }
        let sampled = eps >= RESOLVED_SPACINGS * grid.spacing();
        let multiplier = if sampled {
            sampled_multiplier(grid, eps)
        } else {
            continuous_multiplier(grid, eps)
        };
        Ok(Self {
            eps,
            sampled,
            multiplier,
        })
    }

    /// True when the kernel is the sampled nonnegative one.
    pub fn is_sampled(&self) -> bool {
        self.sampled
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Multiplier at flat spectral index `my * N + mx`.
    pub fn multiplier(&self) -> &[f64] {
        &self.multiplier
    }

    pub fn apply<F: SpectralMap>(&self, f: &F) -> F {
        f.map_scalars(|s| {
            assert!(
                s.grid().len() == self.multiplier.len(),
                "mollifier built for another grid"
            );
            let n = s.grid().n();
            s.apply_multiplier(|mx, my| Complex64::new(self.multiplier[my * n + mx], 0.0))
        })
    }
}

/// ⟨f⟩_ε = φ_ε ∗ f on the torus.
pub fn mollify<F: SpectralMap + HasGrid>(f: &F, eps: f64) -> Result<F, SpectralError> {
    Ok(Mollifier::new(f.grid_ref(), eps)?.apply(f))
}

pub trait HasGrid {
    fn grid_ref(&self) -> &SpectralGrid;
}

impl HasGrid for ScalarField {
    fn grid_ref(&self) -> &SpectralGrid {
        self.grid()
    }
}

impl HasGrid for super::VectorField {
    fn grid_ref(&self) -> &SpectralGrid {
        self.grid()
    }
}
