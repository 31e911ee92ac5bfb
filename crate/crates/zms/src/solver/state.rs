use serde::{Deserialize, Serialize};

use super::SolverError;
use crate::spectral::{ScalarField, SpectralGrid, VectorField};

/// Which velocity a [`SimState`] carries: the solenoidal u or the physical v.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formulation {
    U,
    V,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Implicit constant-coefficient diffusion, explicit everything else.
    SemiImplicit,
    /// Forward Euler for every term.
    FullyExplicit,
}

/// Density, velocity (u or v, per `formulation`), pressure π and time.
#[derive(Clone, Debug)]
pub struct SimState {
    pub rho: ScalarField,
    pub velocity: VectorField,
    pub pi: ScalarField,
    pub time: f64,
    pub formulation: Formulation,
    /// Friedrichs radius the state was produced with (None = no truncation).
    pub friedrichs_n: Option<f64>,
    /// Mollification width the state was produced with (0 = off).
    pub eps_mollify: f64,
}

impl SimState {
    /// Rejects nonpositive or non-finite densities rather than clamping them.
    pub fn new(
        rho: ScalarField,
        velocity: VectorField,
        formulation: Formulation,
    ) -> Result<Self, SolverError> {
        if rho.grid() != velocity.grid() {
            return Err(SolverError::InvalidState(
                "density and velocity live on different grids".into(),
            ));
        }
        let state = Self {
            pi: ScalarField::zeros(rho.grid()),
            rho,
            velocity,
            time: 0.0,
            formulation,
            friedrichs_n: None,
            eps_mollify: 0.0,
        };
        state.validate()?;
        Ok(state)
    }

    pub fn grid(&self) -> &SpectralGrid {
        self.rho.grid()
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if !self.rho.is_finite() || !self.velocity.is_finite() || !self.pi.is_finite() {
            return Err(SolverError::NonFinite { time: self.time });
        }
        let m = self.rho.min();
        if !(m > 0.0) {
            return Err(SolverError::InvalidState(format!(
                "density must be positive, minimum is {m}"
            )));
        }
        Ok(())
    }

    pub(crate) fn with_parts(
        &self,
        rho: ScalarField,
        velocity: VectorField,
        pi: ScalarField,
        time: f64,
    ) -> Self {
        Self {
            rho,
            velocity,
            pi,
            time,
            formulation: self.formulation,
            friedrichs_n: self.friedrichs_n,
            eps_mollify: self.eps_mollify,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Mollification width ε (0 disables it).
    pub eps_mollify: f64,
    /// Friedrichs truncation radius n (None = ∞).
    pub friedrichs_n: Option<f64>,
    pub scheme: Scheme,
    /// Leray-project the velocity after each step.
    pub projection: bool,
    /// Advance with the Picard fixed point of the slab map instead of a single step.
    pub use_picard: bool,
    pub picard_tol: f64,
    pub picard_max_iters: usize,
    /// Bound on max|⟨u⟩_ε|·dt/h.
    pub cfl_max: f64,
    /// Steps between diagnostic samples (the final step is always sampled).
    pub sample_every: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_end: 0.0,
            eps_mollify: 0.0,
            friedrichs_n: None,
            scheme: Scheme::SemiImplicit,
            projection: true,
            use_picard: false,
            picard_tol: 1e-10,
            picard_max_iters: 50,
            cfl_max: 1.0,
            sample_every: 1,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |m: String| Err(SolverError::InvalidConfig(m));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return bad(format!("t_end must be nonnegative, got {}", self.t_end));
        }
        if !(self.eps_mollify >= 0.0 && self.eps_mollify.is_finite()) {
            return bad(format!(
                "eps_mollify must be nonnegative, got {}",
                self.eps_mollify
            ));
        }
        if let Some(n) = self.friedrichs_n {
            if !(n > 0.0) {
                return bad(format!("friedrichs_n must be positive, got {n}"));
            }
        }
        if !(self.picard_tol > 0.0) {
            return bad(format!(
                "picard_tol must be positive, got {}",
                self.picard_tol
            ));
        }
        if self.picard_max_iters < 1 {
            return bad("picard_max_iters must be at least 1".into());
        }
        if !(self.cfl_max > 0.0) {
            return bad(format!("cfl_max must be positive, got {}", self.cfl_max));
        }
        if self.sample_every < 1 {
            return bad("sample_every must be at least 1".into());
        }
        Ok(())
    }
}
