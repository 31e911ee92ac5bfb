use std::sync::OnceLock;

use rustfft::num_complex::Complex64;

use super::{SpectralError, SpectralGrid};

/// Real scalar field on a [`SpectralGrid`] with lazily cached spectrum.
#[derive(Clone, Debug)]
pub struct ScalarField {
    grid: SpectralGrid,
    values: Vec<f64>,
    spectrum: OnceLock<Vec<Complex64>>,
}

impl ScalarField {
    pub fn from_values(grid: &SpectralGrid, values: Vec<f64>) -> Result<Self, SpectralError> {
        if values.len() != grid.len() {
            return Err(SpectralError::Shape {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(Self {
            grid: grid.clone(),
            values,
            spectrum: OnceLock::new(),
        })
    }

    /// Builds a field from coefficients; real-space values are the real part
    /// of the inverse transform. The given coefficients are cached as-is, so
    /// callers must pass Hermitian-symmetric data.
    pub fn from_spectrum(grid: &SpectralGrid, spectrum: Vec<Complex64>) -> Self {
        let values = grid.inverse(&spectrum);
        let cell = OnceLock::new();
        let _ = cell.set(spectrum);
        Self {
            grid: grid.clone(),
            values,
            spectrum: cell,
        }
    }

    pub fn zeros(grid: &SpectralGrid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: &SpectralGrid, c: f64) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![c; grid.len()],
            spectrum: OnceLock::new(),
        }
    }

    /// Samples `f(x, y)` at the grid points.
    pub fn from_fn(grid: &SpectralGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        let n = grid.n();
        let mut values = Vec::with_capacity(grid.len());
        for iy in 0..n {
            let y = grid.coord(iy);
            for ix in 0..n {
                values.push(f(grid.coord(ix), y));
            }
        }
        Self {
            grid: grid.clone(),
            values,
            spectrum: OnceLock::new(),
        }
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn spectrum(&self) -> &[Complex64] {
        self.spectrum
            .get_or_init(|| self.grid.forward(&self.values))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
            spectrum: OnceLock::new(),
        }
    }

    /// Pointwise combination without dealiasing.
    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        self.check_grid(other);
        Self {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            spectrum: OnceLock::new(),
        }
    }

    /// Linear maps act on the spectrum too, so keep it when it is cached.
    fn linear(
        &self,
        other: Option<&Self>,
        f: impl Fn(f64, f64) -> f64,
        g: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Self {
        let zero_field;
        let other = match other {
            Some(o) => {
                self.check_grid(o);
                o
            }
            None => {
                zero_field = Self::zeros(&self.grid);
                &zero_field
            }
        };
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        let spectrum = OnceLock::new();
        if let (Some(sa), Some(sb)) = (self.spectrum.get(), other.spectrum.get()) {
            let _ = spectrum.set(sa.iter().zip(sb).map(|(&a, &b)| g(a, b)).collect());
        }
        Self {
            grid: self.grid.clone(),
            values,
            spectrum,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.linear(Some(other), |a, b| a + b, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.linear(Some(other), |a, b| a - b, |a, b| a - b)
    }

    pub fn scale(&self, c: f64) -> Self {
        if let Some(s) = self.spectrum.get() {
            let spectrum = OnceLock::new();
            let _ = spectrum.set(s.iter().map(|&z| z * c).collect());
            return Self {
                grid: self.grid.clone(),
                values: self.values.iter().map(|&v| v * c).collect(),
                spectrum,
            };
        }
        self.map(|v| v * c)
    }

    /// self + c·other
    pub fn axpy(&self, c: f64, other: &Self) -> Self {
        self.linear(Some(other), |a, b| a + c * b, |a, b| a + b * c)
    }

    pub fn add_constant(&self, c: f64) -> Self {
        self.map(|v| v + c)
    }

    /// Dealiased product: pointwise multiply, then 2/3-rule truncation.
    pub fn mul(&self, other: &Self) -> Self {
        self.zip_map(other, |a, b| a * b).dealiased()
    }

    /// Applies the 2/3-rule truncation.
    pub fn dealiased(&self) -> Self {
        let grid = &self.grid;
        let n = grid.n();
        let mut s = self.spectrum().to_vec();
        for my in 0..n {
            for mx in 0..n {
                if !grid.dealias_keeps(mx, my) {
                    s[my * n + mx] = Complex64::new(0.0, 0.0);
                }
            }
        }
        Self::from_spectrum(grid, s)
    }

    /// Applies a real-to-complex spectral multiplier `m(mx, my)`.
    pub fn apply_multiplier(&self, m: impl Fn(usize, usize) -> Complex64) -> Self {
        let n = self.grid.n();
        let src = self.spectrum();
        let mut out = Vec::with_capacity(src.len());
        for my in 0..n {
            for mx in 0..n {
                out.push(src[my * n + mx] * m(mx, my));
            }
        }
        Self::from_spectrum(&self.grid, out)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Discrete L² inner product h²Σ f g.
    pub fn dot(&self, other: &Self) -> f64 {
        self.check_grid(other);
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            * self.grid.cell_area()
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.cell_area()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    /// L² norm computed from the coefficients (Parseval): L²·Σ|c_k|².
    pub fn spectral_l2_norm(&self) -> f64 {
        (self.spectrum().iter().map(|c| c.norm_sqr()).sum::<f64>() * self.grid.area()).sqrt()
    }

    pub fn linf_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Discrete L^p norm over the torus; p = ∞ gives the max norm.
    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.linf_norm();
        }
        if p == 2.0 {
            return self.l2_norm();
        }
        let sum: f64 = self.values.iter().map(|v| v.abs().powf(p)).sum();
        (sum * self.grid.cell_area()).powf(1.0 / p)
    }

    fn check_grid(&self, other: &Self) {
        assert!(self.grid == other.grid, "fields live on different grids");
    }
}

/// Two-component vector field on one grid.
#[derive(Clone, Debug)]
pub struct VectorField {
    c: [ScalarField; 2],
}

impl VectorField {
    pub fn new(x: ScalarField, y: ScalarField) -> Self {
        assert!(x.grid() == y.grid(), "components live on different grids");
        Self { c: [x, y] }
    }

    pub fn zeros(grid: &SpectralGrid) -> Self {
        Self::new(ScalarField::zeros(grid), ScalarField::zeros(grid))
    }

    pub fn from_fn(
        grid: &SpectralGrid,
        fx: impl Fn(f64, f64) -> f64,
        fy: impl Fn(f64, f64) -> f64,
    ) -> Self {
        Self::new(
            ScalarField::from_fn(grid, fx),
            ScalarField::from_fn(grid, fy),
        )
    }

    pub fn grid(&self) -> &SpectralGrid {
        self.c[0].grid()
    }

    pub fn x(&self) -> &ScalarField {
        &self.c[0]
    }

    pub fn y(&self) -> &ScalarField {
        &self.c[1]
    }

    pub fn component(&self, i: usize) -> &ScalarField {
        &self.c[i]
    }

    pub fn components(&self) -> &[ScalarField; 2] {
        &self.c
    }

    pub fn map_components(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        Self::new(f(&self.c[0]), f(&self.c[1]))
    }

    pub fn zip_components(
        &self,
        other: &Self,
        f: impl Fn(&ScalarField, &ScalarField) -> ScalarField,
    ) -> Self {
        Self::new(f(&self.c[0], &other.c[0]), f(&self.c[1], &other.c[1]))
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_components(other, ScalarField::add)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_components(other, ScalarField::sub)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map_components(|f| f.scale(c))
    }

    pub fn axpy(&self, c: f64, other: &Self) -> Self {
        self.zip_components(other, |a, b| a.axpy(c, b))
    }

    /// Each component multiplied by the scalar `s`, dealiased.
    pub fn mul_scalar(&self, s: &ScalarField) -> Self {
        self.map_components(|f| f.mul(s))
    }

    /// Dealiased pointwise dot product.
    pub fn dot_pointwise(&self, other: &Self) -> ScalarField {
        self.c[0]
            .zip_map(&other.c[0], |a, b| a * b)
            .add(&self.c[1].zip_map(&other.c[1], |a, b| a * b))
            .dealiased()
    }

    /// Pointwise Euclidean magnitude (not dealiased; diagnostics only).
    pub fn magnitude(&self) -> ScalarField {
        self.c[0].zip_map(&self.c[1], f64::hypot)
    }

    pub fn linf_norm(&self) -> f64 {
        self.magnitude().linf_norm()
    }

    /// Discrete inner product Σ_i ⟨u_i, v_i⟩.
    pub fn dot(&self, other: &Self) -> f64 {
        self.c[0].dot(&other.c[0]) + self.c[1].dot(&other.c[1])
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.c[0].l2_norm_sq() + self.c[1].l2_norm_sq()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.c[0].is_finite() && self.c[1].is_finite()
    }
}

/// Rank-2 field (T_ij), i, j ∈ {0, 1}.
#[derive(Clone, Debug)]
pub struct TensorField {
    c: [[ScalarField; 2]; 2],
}

impl TensorField {
    pub fn new(c: [[ScalarField; 2]; 2]) -> Self {
        Self { c }
    }

    pub fn get(&self, i: usize, j: usize) -> &ScalarField {
        &self.c[i][j]
    }

    pub fn transpose(&self) -> Self {
        Self::new([
            [self.c[0][0].clone(), self.c[1][0].clone()],
            [self.c[0][1].clone(), self.c[1][1].clone()],
        ])
    }

    /// Σ_ij ‖T_ij‖²_{L²}
    pub fn l2_norm_sq(&self) -> f64 {
        self.c.iter().flatten().map(ScalarField::l2_norm_sq).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }
}
