use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;

use crate::coefficients::{v_from_u, CoefficientModel};
use crate::solver::{Formulation, SimState};
use crate::spectral::{gradient, ScalarField, Snapshot, SpectralGrid, VectorField};

use super::{CliError, FourierMode, InitialDataSpec, InitialKind, RunConfig};

fn check_mode(grid: &SpectralGrid, m: &FourierMode) -> Result<(), CliError> {
    let half = (grid.n() / 2) as i64;
    if m.kx.abs() >= half || m.ky.abs() >= half {
        return Err(CliError::InitialData(format!(
            "mode ({}, {}) is not resolved on an N = {} grid",
            m.kx,
            m.ky,
            grid.n()
        )));
    }
    Ok(())
}

fn mode_sum(grid: &SpectralGrid, modes: &[FourierMode]) -> ScalarField {
    let c = 2.0 * PI / grid.length();
    ScalarField::from_fn(grid, |x, y| {
        modes
            .iter()
            .map(|m| m.amp * (c * (m.kx as f64 * x + m.ky as f64 * y) + m.phase).cos())
            .sum()
    })
}

/// Perpendicular gradient (∂₁ψ, −∂₀ψ), divergence-free to roundoff.
fn perp_gradient(psi: &ScalarField) -> VectorField {
    let g = gradient(psi);
    VectorField::new(g.y().clone(), g.x().scale(-1.0))
}

/// Mean-zero real field with random complex coefficients on the lattice
/// modes 0 < |k| ≤ band (k integer, wavenumber 2πk/L), normalized to unit
/// max norm. The band must sit inside the 2/3 dealiased range.
pub fn random_bandlimited_field(
    grid: &SpectralGrid,
    band: f64,
    rng: &mut impl Rng,
) -> Result<ScalarField, CliError> {
    let n = grid.n();
    let limit = n as f64 / 3.0;
    if !(band >= 1.0 && band < limit) {
        return Err(CliError::InitialData(format!(
            "band must lie in [1, {limit:.3}) on an N = {n} grid, got {band}"
        )));
    }
    let kmax = band.floor() as i64;
    let mut spectrum = vec![Complex64::new(0.0, 0.0); n * n];
    // Visit one mode of each ±k pair and set its partner to the conjugate.
    for ky in -kmax..=kmax {
        for kx in 0..=kmax {
            if kx == 0 && ky <= 0 {
                continue;
            }
            if ((kx * kx + ky * ky) as f64).sqrt() > band {
                continue;
            }
            let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            spectrum[grid.bin(ky) * n + grid.bin(kx)] = c;
            spectrum[grid.bin(-ky) * n + grid.bin(-kx)] = c.conj();
        }
    }
    let f = ScalarField::from_spectrum(grid, spectrum);
    let m = f.linf_norm();
    Ok(if m > 0.0 { f.scale(1.0 / m) } else { f })
}

/// Builds the initial state in u variables. The density bounds of `model`
/// are enforced, never clamped; u₀ is divergence-free to roundoff.
pub fn generate_initial_data(
    spec: &InitialDataSpec,
    grid: &SpectralGrid,
    model: &CoefficientModel,
    seed: u64,
) -> Result<SimState, CliError> {
    let offset = spec.density_offset;
    let (rho, u) = match &spec.kind {
        InitialKind::TaylorGreen {
            density_amplitude,
            velocity_amplitude,
        } => {
            let c = 2.0 * PI / grid.length();
            let (a, v) = (*density_amplitude, *velocity_amplitude);
            let rho = ScalarField::from_fn(grid, |x, _| offset + a * (c * x).sin());
            let u = VectorField::from_fn(
                grid,
                |x, y| v * (c * x).sin() * (c * y).cos(),
                |x, y| -v * (c * x).cos() * (c * y).sin(),
            );
            (rho, u)
        }
        InitialKind::FourierModes {
            density_modes,
            stream_modes,
        } => {
            for m in density_modes.iter().chain(stream_modes) {
                check_mode(grid, m)?;
                if m.kx == 0 && m.ky == 0 {
                    return Err(CliError::InitialData(
                        "the (0, 0) mode belongs in density_offset".into(),
                    ));
                }
            }
            let rho = mode_sum(grid, density_modes).add_constant(offset);
            (rho, perp_gradient(&mode_sum(grid, stream_modes)))
        }
        InitialKind::RandomBandlimited {
            band,
            density_amplitude,
            velocity_amplitude,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rho = random_bandlimited_field(grid, *band, &mut rng)?
                .scale(*density_amplitude)
                .add_constant(offset);
            let u = perp_gradient(&random_bandlimited_field(grid, *band, &mut rng)?);
            let m = u.linf_norm();
            let u = if m > 0.0 {
                u.scale(velocity_amplitude / m)
            } else {
                u
            };
            (rho, u)
        }
        InitialKind::FromSnapshot { path } => {
            let snap = Snapshot::read_from(Path::new(path))?;
            if snap.grid() != grid {
                return Err(CliError::InitialData(format!(
                    "snapshot grid N = {}, L = {} does not match the configured grid N = {}, L = {}",
                    snap.grid().n(),
                    snap.grid().length(),
                    grid.n(),
                    grid.length()
                )));
            }
            if snap.components.len() < 3 {
                return Err(CliError::InitialData(format!(
                    "snapshot has {} components, need density and two velocity components",
                    snap.components.len()
                )));
            }
            let c = &snap.components;
            let u = VectorField::new(c[1].clone(), c[2].clone());
            (c[0].add_constant(offset), u)
        }
    };
    let (lo, hi) = model.rho_bounds();
    let (rmin, rmax) = (rho.min(), rho.max());
    if !(rmin >= lo && rmax <= hi) {
        return Err(CliError::InitialData(format!(
            "initial density range [{rmin}, {rmax}] leaves the declared bounds [{lo}, {hi}]"
        )));
    }
    Ok(SimState::new(rho, u, Formulation::U)?)
}

/// Initial data for a full config, converted to the configured formulation.
pub fn initial_state(config: &RunConfig, model: &CoefficientModel) -> Result<SimState, CliError> {
    let grid = config.grid()?;
    let mut state = generate_initial_data(&config.initial, &grid, model, config.seed)?;
    if config.formulation == Formulation::V {
        state.velocity = v_from_u(&state.rho, &state.velocity, model)?;
        state.formulation = Formulation::V;
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::divergence;

    fn model() -> CoefficientModel {
        CoefficientModel::kazhikhov(0.1, 0.05, 0.5, 2.0).unwrap()
    }

    #[test]
    fn taylor_green_closed_form() {
        let g = SpectralGrid::new(32, 2.0 * PI).unwrap();
        let spec = InitialDataSpec {
            kind: InitialKind::TaylorGreen {
                density_amplitude: 0.0,
                velocity_amplitude: 1.0,
            },
            density_offset: 1.0,
        };
        let s = generate_initial_data(&spec, &g, &model(), 0).unwrap();
        assert!(s.rho.values().iter().all(|&r| r == 1.0));
        assert!(divergence(&s.velocity).linf_norm() < 1e-12);
        let (x, y) = (g.coord(3), g.coord(5));
        assert!((s.velocity.x().values()[5 * 32 + 3] - x.sin() * y.cos()).abs() < 1e-15);
    }

    #[test]
    fn random_data_is_deterministic_and_bounded() {
        let g = SpectralGrid::new(32, 1.0).unwrap();
        let spec = InitialDataSpec {
            kind: InitialKind::RandomBandlimited {
                band: 4.0,
                density_amplitude: 0.3,
                velocity_amplitude: 0.5,
            },
            density_offset: 1.0,
        };
        let a = generate_initial_data(&spec, &g, &model(), 42).unwrap();
        let b = generate_initial_data(&spec, &g, &model(), 42).unwrap();
        let c = generate_initial_data(&spec, &g, &model(), 43).unwrap();
        assert_eq!(a.rho.values(), b.rho.values());
        assert_eq!(a.velocity.x().values(), b.velocity.x().values());
        assert_ne!(a.rho.values(), c.rho.values());
        assert!((a.rho.max() - 1.0).abs() <= 0.3 + 1e-15);
        assert!((a.velocity.linf_norm() - 0.5).abs() < 1e-12);
        assert!(divergence(&a.velocity).linf_norm() < 1e-12);
        assert!((a.rho.mean() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn out_of_bounds_density_rejected() {
        let g = SpectralGrid::new(16, 2.0 * PI).unwrap();
        let spec = InitialDataSpec {
            kind: InitialKind::TaylorGreen {
                density_amplitude: 0.6,
                velocity_amplitude: 1.0,
            },
            density_offset: 1.0,
        };
        assert!(matches!(
            generate_initial_data(&spec, &g, &model(), 0),
            Err(CliError::InitialData(_))
        ));
    }

    #[test]
    fn fourier_modes_and_bad_band() {
        let g = SpectralGrid::new(16, 2.0 * PI).unwrap();
        let mode = |kx, ky, amp| FourierMode {
            kx,
            ky,
            amp,
            phase: 0.3,
        };
        let spec = InitialDataSpec {
            kind: InitialKind::FourierModes {
                density_modes: vec![mode(1, 2, 0.1)],
                stream_modes: vec![mode(2, -1, 0.4), mode(0, 3, 0.2)],
            },
            density_offset: 1.0,
        };
        let s = generate_initial_data(&spec, &g, &model(), 0).unwrap();
        assert!(divergence(&s.velocity).linf_norm() < 1e-12);
        assert!((s.rho.max() - 1.1).abs() < 1e-2);
        let bad = InitialDataSpec {
            kind: InitialKind::FourierModes {
                density_modes: vec![mode(8, 0, 0.1)],
                stream_modes: vec![],
            },
            density_offset: 1.0,
        };
        assert!(generate_initial_data(&bad, &g, &model(), 0).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(random_bandlimited_field(&g, 6.0, &mut rng).is_err());
    }
}
