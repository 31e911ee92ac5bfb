//! Spectral differential operators and projectors.
//!
//! Every derivative multiplies by iξ with ξ = 2πk/L and zeroes any mode that
//! touches a Nyquist bin, so `laplacian = divergence ∘ gradient` holds exactly
//! coefficient by coefficient.

use rustfft::num_complex::Complex64;

use super::{ScalarField, SpectralGrid, TensorField, VectorField};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

fn deriv_multiplier(grid: &SpectralGrid, axis: usize) -> impl Fn(usize, usize) -> Complex64 + '_ {
    move |mx, my| {
        if grid.touches_nyquist(mx, my) {
            return ZERO;
        }
        let xi = if axis == 0 {
            grid.frequency(mx)
        } else {
            grid.frequency(my)
        };
        Complex64::new(0.0, xi)
    }
}

/// ∂_axis f
pub fn partial(f: &ScalarField, axis: usize) -> ScalarField {
    f.apply_multiplier(deriv_multiplier(f.grid(), axis))
}

pub fn gradient(f: &ScalarField) -> VectorField {
    VectorField::new(partial(f, 0), partial(f, 1))
}

pub fn divergence(w: &VectorField) -> ScalarField {
    let grid = w.grid();
    let n = grid.n();
    let (sx, sy) = (w.x().spectrum(), w.y().spectrum());
    let mut out = Vec::with_capacity(grid.len());
    for my in 0..n {
        for mx in 0..n {
            let idx = my * n + mx;
            if grid.touches_nyquist(mx, my) {
                out.push(ZERO);
            } else {
                let i = Complex64::i();
                out.push(i * grid.frequency(mx) * sx[idx] + i * grid.frequency(my) * sy[idx]);
            }
        }
    }
    ScalarField::from_spectrum(grid, out)
}

pub fn laplacian(f: &ScalarField) -> ScalarField {
    let grid = f.grid();
    f.apply_multiplier(|mx, my| {
        if grid.touches_nyquist(mx, my) {
            ZERO
        } else {
            let (a, b) = (grid.frequency(mx), grid.frequency(my));
            Complex64::new(-(a * a + b * b), 0.0)
        }
    })
}

/// Velocity gradient (∇u)_ij = ∂_i u^j.
pub fn jacobian(u: &VectorField) -> TensorField {
    TensorField::new([
        [partial(u.x(), 0), partial(u.y(), 0)],
        [partial(u.x(), 1), partial(u.y(), 1)],
    ])
}

/// Au = ½(∇u − Du) with (∇u)_ij = ∂_i u^j and (Du)_ij = ∂_j u^i.
pub fn antisym_grad(u: &VectorField) -> TensorField {
    let grid = u.grid();
    // (Au)_01 = ½(∂_0 u^1 − ∂_1 u^0); the diagonal vanishes identically.
    let a01 = partial(u.y(), 0).sub(&partial(u.x(), 1)).scale(0.5);
    let a10 = a01.scale(-1.0);
    TensorField::new([
        [ScalarField::zeros(grid), a01],
        [a10, ScalarField::zeros(grid)],
    ])
}

/// Fields a spectral projector or convolution can act on.
pub trait SpectralMap: Sized {
    fn map_scalars(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self;
}

impl SpectralMap for ScalarField {
    fn map_scalars(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        f(self)
    }
}

impl SpectralMap for VectorField {
    fn map_scalars(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        self.map_components(f)
    }
}

/// Friedrichs projector P_n: keeps modes with |ξ| ≤ n.
pub fn project_friedrichs<F: SpectralMap>(f: &F, n: f64) -> F {
    assert!(n > 0.0, "truncation radius must be positive");
    f.map_scalars(|s| {
        let grid = s.grid();
        s.apply_multiplier(|mx, my| {
            if grid.frequency(mx).hypot(grid.frequency(my)) <= n {
                Complex64::new(1.0, 0.0)
            } else {
                ZERO
            }
        })
    })
}

/// Leray projector Id + ∇(−Δ)⁻¹div, built on the same Nyquist-free symbols as
/// the differential operators. Modes with zero derivative symbol (the mean and
/// the Nyquist modes) pass through unchanged.
pub fn leray_project(u: &VectorField) -> VectorField {
    let grid = u.grid();
    let n = grid.n();
    let (sx, sy) = (u.x().spectrum(), u.y().spectrum());
    let mut ox = Vec::with_capacity(grid.len());
    let mut oy = Vec::with_capacity(grid.len());
    for my in 0..n {
        for mx in 0..n {
            let idx = my * n + mx;
            if grid.touches_nyquist(mx, my) || (mx == 0 && my == 0) {
                ox.push(sx[idx]);
                oy.push(sy[idx]);
                continue;
            }
            let (a, b) = (grid.frequency(mx), grid.frequency(my));
            let k2 = a * a + b * b;
            let proj = (sx[idx] * a + sy[idx] * b) / k2;
            ox.push(sx[idx] - proj * a);
            oy.push(sy[idx] - proj * b);
        }
    }
    VectorField::new(
        ScalarField::from_spectrum(grid, ox),
        ScalarField::from_spectrum(grid, oy),
    )
}

/// Solves (1 − c·Δ) g = f spectrally for c ≥ 0.
pub fn solve_helmholtz(f: &ScalarField, c: f64) -> ScalarField {
    let grid = f.grid();
    f.apply_multiplier(|mx, my| {
        if grid.touches_nyquist(mx, my) {
            Complex64::new(1.0, 0.0)
        } else {
            let (a, b) = (grid.frequency(mx), grid.frequency(my));
            Complex64::new(1.0 / (1.0 + c * (a * a + b * b)), 0.0)
        }
    })
}

/// Fraction of the L² energy carried by modes at or beyond 2/3 of the Nyquist
/// wavenumber on either axis.
pub fn nyquist_energy_fraction(f: &ScalarField) -> f64 {
    let grid = f.grid();
    let n = grid.n();
    let s = f.spectrum();
    let (mut high, mut total) = (0.0, 0.0);
    for my in 0..n {
        for mx in 0..n {
            let e = s[my * n + mx].norm_sqr();
            total += e;
            if !grid.dealias_keeps(mx, my) {
                high += e;
            }
        }
    }
    if total == 0.0 {
        0.0
    } else {
        high / total
    }
}
