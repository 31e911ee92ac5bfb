//! Pseudo-spectral simulator and analysis toolbox for the zero-Mach
//! Navier-Stokes system on the periodic torus [0, L)².

pub mod besov;
pub mod cli_io;
pub mod coefficients;
pub mod diagnostics;
pub mod solver;
pub mod spectral;
