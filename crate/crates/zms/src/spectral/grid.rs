use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::SpectralError;

/// Periodic N×N grid on the torus [0, L)².
///
/// Real-space samples are stored row-major with index `iy * N + ix`, so the
/// fast axis is x (first coordinate). Spectral coefficients use the same
/// layout over FFT bins, normalized by 1/N² so that the coefficient of the
/// constant mode is the mean.
#[derive(Clone)]
pub struct SpectralGrid {
    inner: Arc<Inner>,
}

struct Inner {
    n: usize,
    length: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch_len: usize,
}

impl SpectralGrid {
    pub fn new(n: usize, length: f64) -> Result<Self, SpectralError> {
        if n < 2 || n % 2 != 0 {
            return Err(SpectralError::InvalidGrid(format!(
                "points per axis must be even and >= 2, got {n}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(SpectralError::InvalidGrid(format!(
                "domain length must be positive, got {length}"
            )));
        }
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Ok(Self {
            inner: Arc::new(Inner {
                n,
                length,
                forward,
                inverse,
                scratch_len,
            }),
        })
    }

    pub fn n(&self) -> usize {
        self.inner.n
    }

    pub fn length(&self) -> f64 {
        self.inner.length
    }

    /// Number of grid points, N².
    pub fn len(&self) -> usize {
        self.inner.n * self.inner.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.inner.length / self.inner.n as f64
    }

    pub fn cell_area(&self) -> f64 {
        let h = self.spacing();
        h * h
    }

    pub fn area(&self) -> f64 {
        self.inner.length * self.inner.length
    }

    /// Coordinate of grid index `i` along either axis.
    pub fn coord(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }

    /// Signed lattice wavenumber of FFT bin `m`, in [−N/2, N/2).
    pub fn wavenumber(&self, m: usize) -> i64 {
        let n = self.inner.n;
        if m < n / 2 {
            m as i64
        } else {
            m as i64 - n as i64
        }
    }

    /// FFT bin holding lattice wavenumber `k` (taken modulo N).
    pub fn bin(&self, k: i64) -> usize {
        k.rem_euclid(self.inner.n as i64) as usize
    }

    /// Physical frequency 2πk/L of bin `m`.
    pub fn frequency(&self, m: usize) -> f64 {
        2.0 * std::f64::consts::PI * self.wavenumber(m) as f64 / self.inner.length
    }

    pub fn is_nyquist(&self, m: usize) -> bool {
        m == self.inner.n / 2
    }

    /// Derivative multiplier frequency: the physical frequency, or zero on the
    /// Nyquist bin where the sign of the derivative is ambiguous.
    pub fn diff_frequency(&self, m: usize) -> f64 {
        if self.is_nyquist(m) {
            0.0
        } else {
            self.frequency(m)
        }
    }

    /// True when the mode (mx, my) touches a Nyquist bin on either axis.
    pub fn touches_nyquist(&self, mx: usize, my: usize) -> bool {
        self.is_nyquist(mx) || self.is_nyquist(my)
    }

    /// |ξ| for the mode stored at flat spectral index `idx`.
    pub fn abs_frequency(&self, idx: usize) -> f64 {
        let n = self.inner.n;
        let (mx, my) = (idx % n, idx / n);
        self.frequency(mx).hypot(self.frequency(my))
    }

    /// 2/3-rule: keep modes with |k_x|, |k_y| ≤ N/3.
    pub fn dealias_keeps(&self, mx: usize, my: usize) -> bool {
        let cut = self.inner.n as i64 / 3;
        self.wavenumber(mx).abs() <= cut && self.wavenumber(my).abs() <= cut
    }

    /// Largest |ξ| over all modes of the grid, Nyquist included.
    pub fn max_abs_frequency(&self) -> f64 {
        let kmax = std::f64::consts::PI * self.inner.n as f64 / self.inner.length;
        kmax * std::f64::consts::SQRT_2
    }

    /// Largest |ξ| surviving the 2/3 truncation.
    pub fn max_dealiased_frequency(&self) -> f64 {
        let cut = (self.inner.n / 3) as f64 * 2.0 * std::f64::consts::PI / self.inner.length;
        cut * std::f64::consts::SQRT_2
    }

    /// Forward transform of real samples, normalized by 1/N².
    pub fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        assert_eq!(values.len(), self.len(), "sample count does not match grid");
        let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.transform(&mut data, true);
        let scale = 1.0 / self.len() as f64;
        for c in &mut data {
            *c *= scale;
        }
        data
    }

    /// Inverse transform; the imaginary part (roundoff for Hermitian input) is dropped.
    pub fn inverse(&self, spectrum: &[Complex64]) -> Vec<f64> {
        assert_eq!(
            spectrum.len(),
            self.len(),
            "coefficient count does not match grid"
        );
        let mut data = spectrum.to_vec();
        self.transform(&mut data, false);
        data.into_iter().map(|c| c.re).collect()
    }

    fn transform(&self, data: &mut [Complex64], forward: bool) {
        let n = self.inner.n;
        let fft = if forward {
            &self.inner.forward
        } else {
            &self.inner.inverse
        };
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.inner.scratch_len];
        fft.process_with_scratch(data, &mut scratch);
        transpose(data, n);
        fft.process_with_scratch(data, &mut scratch);
        transpose(data, n);
    }
}

fn transpose(data: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}

impl PartialEq for SpectralGrid {
    fn eq(&self, other: &Self) -> bool {
        self.inner.n == other.inner.n && self.inner.length == other.inner.length
    }
}

impl fmt::Debug for SpectralGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralGrid")
            .field("n", &self.inner.n)
            .field("length", &self.inner.length)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_odd_and_nonpositive() {
        assert!(SpectralGrid::new(15, 1.0).is_err());
        assert!(SpectralGrid::new(16, 0.0).is_err());
        assert!(SpectralGrid::new(16, f64::NAN).is_err());
    }

    #[test]
    fn wavenumber_layout() {
        let g = SpectralGrid::new(8, 2.0 * std::f64::consts::PI).unwrap();
        let ks: Vec<i64> = (0..8).map(|m| g.wavenumber(m)).collect();
        assert_eq!(ks, vec![0, 1, 2, 3, -4, -3, -2, -1]);
        assert!(g.is_nyquist(4));
        assert_eq!(g.diff_frequency(4), 0.0);
        assert_eq!(g.bin(-3), 5);
    }

    #[test]
    fn single_mode_coefficient() {
        let n = 16;
        let g = SpectralGrid::new(n, 1.0).unwrap();
        let vals: Vec<f64> = (0..n * n)
            .map(|i| (2.0 * std::f64::consts::PI * (i % n) as f64 / n as f64).cos())
            .collect();
        let spec = g.forward(&vals);
        assert!((spec[1].re - 0.5).abs() < 1e-14);
        assert!((spec[n - 1].re - 0.5).abs() < 1e-14);
        let back = g.inverse(&spec);
        for (a, b) in back.iter().zip(&vals) {
            assert!((a - b).abs() < 1e-14);
        }
    }
}
