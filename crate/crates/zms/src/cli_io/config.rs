use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::coefficients::{CoefficientModel, GasConstants};
use crate::solver::{Formulation, Scheme, SolverConfig};
use crate::spectral::SpectralGrid;

use super::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub n: usize,
    pub length: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeConfig {
    pub dt: f64,
    pub t_end: f64,
    pub sample_every: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    Kazhikhov {
        kappa0: f64,
        mu0: f64,
    },
    Combustion {
        k: f64,
        cp: f64,
        p0: f64,
        r_gas: f64,
        mu0: f64,
    },
    Tabulated {
        rho: Vec<f64>,
        kappa: Vec<f64>,
        mu: Vec<f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub spec: ModelSpec,
    pub rho_min: f64,
    pub rho_max: f64,
    pub nu: f64,
}

impl ModelConfig {
    pub fn build(&self) -> Result<CoefficientModel, CliError> {
        let (lo, hi) = (self.rho_min, self.rho_max);
        let model = match &self.spec {
            ModelSpec::Kazhikhov { kappa0, mu0 } => {
                CoefficientModel::kazhikhov(*kappa0, *mu0, lo, hi)?
            }
            ModelSpec::Combustion {
                k,
                cp,
                p0,
                r_gas,
                mu0,
            } => {
                let gas = GasConstants::from_heat_capacity(*p0, *r_gas, *cp)?;
                CoefficientModel::combustion(*k, *cp, gas, *mu0, lo, hi)?
            }
            ModelSpec::Tabulated { rho, kappa, mu } => {
                CoefficientModel::tabulated(rho, kappa, mu, lo, hi)?
            }
        };
        Ok(model.with_nu(self.nu)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularizationConfig {
    pub eps_mollify: f64,
    /// None = no truncation.
    pub friedrichs_n: Option<f64>,
}

/// One real Fourier mode amp·cos(2π(kx·x + ky·y)/L + phase).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierMode {
    pub kx: i64,
    pub ky: i64,
    pub amp: f64,
    pub phase: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialKind {
    /// ρ₀ = offset + A sin(2πx/L), u₀ the unit-wavenumber Taylor-Green vortex.
    TaylorGreen {
        density_amplitude: f64,
        velocity_amplitude: f64,
    },
    /// ρ₀ from density modes, u₀ = ∇⊥ψ with ψ from the stream-function modes.
    FourierModes {
        density_modes: Vec<FourierMode>,
        stream_modes: Vec<FourierMode>,
    },
    /// Random modes with |k| ≤ band, rescaled to the given max norms.
    RandomBandlimited {
        band: f64,
        density_amplitude: f64,
        velocity_amplitude: f64,
    },
    /// Density and u from a snapshot with at least 3 components (ρ, u₁, u₂).
    FromSnapshot { path: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialDataSpec {
    pub kind: InitialKind,
    /// Added to the generated density perturbation; ignored for snapshots.
    pub density_offset: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative defect of both energy identities.
    pub energy: f64,
    /// Absolute excursion of ρ beyond its initial range.
    pub max_principle: f64,
    /// ‖div u‖∞ when projection is on.
    pub divergence: f64,
    /// Cap on every Gagliardo-Nirenberg ratio.
    pub gn_cap: f64,
    /// Allowed growth of the strong norm over its initial value.
    pub growth_factor: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub time: TimeConfig,
    pub model: ModelConfig,
    pub regularization: RegularizationConfig,
    pub formulation: Formulation,
    pub scheme: Scheme,
    pub projection: bool,
    pub use_picard: bool,
    pub picard_tol: f64,
    pub picard_max_iters: usize,
    pub cfl_max: f64,
    pub initial: InitialDataSpec,
    pub tolerances: Tolerances,
    pub seed: u64,
    /// Steps between field snapshots; 0 writes only the first and last.
    pub snapshot_every: usize,
    pub besov: bool,
}

impl RunConfig {
    pub fn grid(&self) -> Result<SpectralGrid, CliError> {
        Ok(SpectralGrid::new(self.grid.n, self.grid.length)?)
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            dt: self.time.dt,
            t_end: self.time.t_end,
            eps_mollify: self.regularization.eps_mollify,
            friedrichs_n: self.regularization.friedrichs_n,
            scheme: self.scheme,
            projection: self.projection,
            use_picard: self.use_picard,
            picard_tol: self.picard_tol,
            picard_max_iters: self.picard_max_iters,
            cfl_max: self.cfl_max,
            sample_every: self.time.sample_every,
        }
    }

    /// Constraints that do not depend on how the config was produced.
    pub fn validate(&self) -> Result<(), String> {
        let n = self.grid.n;
        if n < 4 || !n.is_power_of_two() {
            return Err(format!("n must be a power of two >= 4, got {n}"));
        }
        positive("length", self.grid.length)?;
        positive("dt", self.time.dt)?;
        if !(self.time.t_end >= 0.0 && self.time.t_end.is_finite()) {
            return Err(format!(
                "t_end must be nonnegative, got {}",
                self.time.t_end
            ));
        }
        if self.time.sample_every == 0 {
            return Err("sample_every must be at least 1".into());
        }
        positive("rho_min", self.model.rho_min)?;
        if self.model.rho_max < self.model.rho_min {
            return Err(format!(
                "rho_max {} is below rho_min {}",
                self.model.rho_max, self.model.rho_min
            ));
        }
        if !(self.regularization.eps_mollify >= 0.0 && self.regularization.eps_mollify.is_finite())
        {
            return Err(format!(
                "eps_mollify must be nonnegative, got {}",
                self.regularization.eps_mollify
            ));
        }
        if let Some(fnn) = self.regularization.friedrichs_n {
            positive("friedrichs_n", fnn)?;
        }
        positive("picard_tol", self.picard_tol)?;
        if self.picard_max_iters == 0 {
            return Err("picard_max_iters must be at least 1".into());
        }
        positive("cfl_max", self.cfl_max)?;
        let t = &self.tolerances;
        positive("tol_energy", t.energy)?;
        positive("tol_max_principle", t.max_principle)?;
        positive("tol_divergence", t.divergence)?;
        positive("gn_cap", t.gn_cap)?;
        positive("growth_factor", t.growth_factor)?;
        if let InitialKind::RandomBandlimited { band, .. } = self.initial.kind {
            positive("band", band)?;
        }
        Ok(())
    }

    /// Emits every resolved value in the `key = value` format, so that
    /// `parse_config(&c.to_text())` reproduces `c`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        kv("n", self.grid.n.to_string());
        kv("length", fmt_f(self.grid.length));
        kv("dt", fmt_f(self.time.dt));
        kv("t_end", fmt_f(self.time.t_end));
        kv("sample_every", self.time.sample_every.to_string());
        match &self.model.spec {
            ModelSpec::Kazhikhov { kappa0, mu0 } => {
                kv("coefficient_model", "kazhikhov".into());
                kv("kappa0", fmt_f(*kappa0));
                kv("mu0", fmt_f(*mu0));
            }
            ModelSpec::Combustion {
                k,
                cp,
                p0,
                r_gas,
                mu0,
            } => {
                kv("coefficient_model", "combustion".into());
                kv("k", fmt_f(*k));
                kv("Cp", fmt_f(*cp));
                kv("P0", fmt_f(*p0));
                kv("R", fmt_f(*r_gas));
                kv("mu0", fmt_f(*mu0));
            }
            ModelSpec::Tabulated { rho, kappa, mu } => {
                kv("coefficient_model", "tabulated".into());
                kv("table_rho", fmt_list(rho));
                kv("table_kappa", fmt_list(kappa));
                kv("table_mu", fmt_list(mu));
            }
        }
        kv("rho_min", fmt_f(self.model.rho_min));
        kv("rho_max", fmt_f(self.model.rho_max));
        kv("nu", fmt_f(self.model.nu));
        kv("eps_mollify", fmt_f(self.regularization.eps_mollify));
        kv(
            "friedrichs_n",
            self.regularization.friedrichs_n.map_or("inf".into(), fmt_f),
        );
        kv("formulation", formulation_name(self.formulation).into());
        kv("scheme", scheme_name(self.scheme).into());
        kv("projection", self.projection.to_string());
        kv("picard", self.use_picard.to_string());
        kv("picard_tol", fmt_f(self.picard_tol));
        kv("picard_max_iters", self.picard_max_iters.to_string());
        kv("cfl_max", fmt_f(self.cfl_max));
        match &self.initial.kind {
            InitialKind::TaylorGreen {
                density_amplitude,
                velocity_amplitude,
            } => {
                kv("initial", "taylor_green".into());
                kv("density_amplitude", fmt_f(*density_amplitude));
                kv("velocity_amplitude", fmt_f(*velocity_amplitude));
            }
            InitialKind::FourierModes {
                density_modes,
                stream_modes,
            } => {
                kv("initial", "fourier_modes".into());
                // An absent list means no modes, which an empty value cannot express.
                if !density_modes.is_empty() {
                    kv("density_modes", fmt_modes(density_modes));
                }
                if !stream_modes.is_empty() {
                    kv("stream_modes", fmt_modes(stream_modes));
                }
            }
            InitialKind::RandomBandlimited {
                band,
                density_amplitude,
                velocity_amplitude,
            } => {
                kv("initial", "random_bandlimited".into());
                kv("band", fmt_f(*band));
                kv("density_amplitude", fmt_f(*density_amplitude));
                kv("velocity_amplitude", fmt_f(*velocity_amplitude));
            }
            InitialKind::FromSnapshot { path } => {
                kv("initial", "from_snapshot".into());
                kv("snapshot_path", path.clone());
            }
        }
        kv("density_offset", fmt_f(self.initial.density_offset));
        kv("tol_energy", fmt_f(self.tolerances.energy));
        kv("tol_max_principle", fmt_f(self.tolerances.max_principle));
        kv("tol_divergence", fmt_f(self.tolerances.divergence));
        kv("gn_cap", fmt_f(self.tolerances.gn_cap));
        kv("growth_factor", fmt_f(self.tolerances.growth_factor));
        kv("seed", self.seed.to_string());
        kv("snapshot_every", self.snapshot_every.to_string());
        kv("besov", self.besov.to_string());
        out
    }
}

fn positive(name: &str, v: f64) -> Result<(), String> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(format!("{name} must be positive and finite, got {v}"))
    }
}

/// Shortest representation that parses back to the same f64.
fn fmt_f(v: f64) -> String {
    format!("{v:?}")
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| fmt_f(*x)).collect::<Vec<_>>().join(", ")
}

fn fmt_modes(modes: &[FourierMode]) -> String {
    modes
        .iter()
        .map(|m| format!("{} {} {} {}", m.kx, m.ky, fmt_f(m.amp), fmt_f(m.phase)))
        .collect::<Vec<_>>()
        .join("; ")
}

fn formulation_name(f: Formulation) -> &'static str {
    match f {
        Formulation::U => "u",
        Formulation::V => "v",
    }
}

fn scheme_name(s: Scheme) -> &'static str {
    match s {
        Scheme::SemiImplicit => "semi_implicit",
        Scheme::FullyExplicit => "fully_explicit",
    }
}

const KEYS: &[&str] = &[
    "n",
    "length",
    "dt",
    "t_end",
    "sample_every",
    "coefficient_model",
    "kappa0",
    "mu0",
    "k",
    "Cp",
    "P0",
    "R",
    "table_rho",
    "table_kappa",
    "table_mu",
    "rho_min",
    "rho_max",
    "nu",
    "eps_mollify",
    "friedrichs_n",
    "formulation",
    "scheme",
    "projection",
    "picard",
    "picard_tol",
    "picard_max_iters",
    "cfl_max",
    "initial",
    "density_amplitude",
    "velocity_amplitude",
    "density_modes",
    "stream_modes",
    "band",
    "snapshot_path",
    "density_offset",
    "tol_energy",
    "tol_max_principle",
    "tol_divergence",
    "gn_cap",
    "growth_factor",
    "seed",
    "snapshot_every",
    "besov",
];

/// Key/value pairs with the line each came from; keys not read by the
/// resolver are reported as unused.
struct Entries {
    map: BTreeMap<String, (usize, String)>,
    used: std::cell::RefCell<Vec<String>>,
}

impl Entries {
    fn err(line: usize, message: String) -> CliError {
        CliError::Config { line, message }
    }

    fn raw(&self, key: &str) -> Option<(usize, &str)> {
        self.used.borrow_mut().push(key.to_string());
        self.map.get(key).map(|(l, v)| (*l, v.as_str()))
    }

    fn required(&self, key: &str, context: &str) -> Result<(usize, &str), CliError> {
        self.raw(key)
            .ok_or_else(|| Self::err(0, format!("missing required key `{key}` ({context})")))
    }

    fn parse<T: std::str::FromStr>(
        line: usize,
        key: &str,
        v: &str,
        what: &str,
    ) -> Result<T, CliError> {
        v.parse::<T>()
            .map_err(|_| Self::err(line, format!("key `{key}`: expected {what}, found `{v}`")))
    }

    fn f64_req(&self, key: &str, context: &str) -> Result<f64, CliError> {
        let (l, v) = self.required(key, context)?;
        parse_f64(l, key, v)
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        match self.raw(key) {
            Some((l, v)) => parse_f64(l, key, v),
            None => Ok(default),
        }
    }

    fn usize_or(&self, key: &str, default: usize) -> Result<usize, CliError> {
        match self.raw(key) {
            Some((l, v)) => Self::parse(l, key, v, "a nonnegative integer"),
            None => Ok(default),
        }
    }

    fn bool_or(&self, key: &str, default: bool) -> Result<bool, CliError> {
        match self.raw(key) {
            Some((l, v)) => Self::parse(l, key, v, "true or false"),
            None => Ok(default),
        }
    }

    fn list_req(&self, key: &str, context: &str) -> Result<Vec<f64>, CliError> {
        let (l, v) = self.required(key, context)?;
        v.split(',').map(|x| parse_f64(l, key, x.trim())).collect()
    }

    fn modes_or_empty(&self, key: &str) -> Result<Vec<FourierMode>, CliError> {
        let Some((l, v)) = self.raw(key) else {
            return Ok(Vec::new());
        };
        v.split(';')
            .map(str::trim)
            .filter(|m| !m.is_empty())
            .map(|m| {
                let parts: Vec<&str> = m.split_whitespace().collect();
                if parts.len() != 4 {
                    return Err(Self::err(
                        l,
                        format!("key `{key}`: mode `{m}` must be `kx ky amp phase`"),
                    ));
                }
                Ok(FourierMode {
                    kx: Self::parse(l, key, parts[0], "an integer wavenumber")?,
                    ky: Self::parse(l, key, parts[1], "an integer wavenumber")?,
                    amp: parse_f64(l, key, parts[2])?,
                    phase: parse_f64(l, key, parts[3])?,
                })
            })
            .collect()
    }

    fn line_of(&self, key: &str) -> usize {
        self.map.get(key).map_or(0, |(l, _)| *l)
    }
}

/// Accepts plain floats, `inf`, and multiples of π written `pi`, `2pi` or `0.5*pi`.
fn parse_f64(line: usize, key: &str, v: &str) -> Result<f64, CliError> {
    let t = v.trim();
    if let Some(coef) = t.strip_suffix("pi") {
        let coef = coef.trim().trim_end_matches('*').trim();
        let c = if coef.is_empty() {
            Ok(1.0)
        } else {
            coef.parse::<f64>()
        };
        if let Ok(c) = c {
            return Ok(c * std::f64::consts::PI);
        }
    }
    t.parse::<f64>()
        .map_err(|_| Entries::err(line, format!("key `{key}`: expected a number, found `{v}`")))
}

/// Parses `key = value` lines; `#` starts a comment. Unknown keys, duplicate
/// keys, type mismatches and constraint violations are errors carrying the
/// offending line (0 when no single line is responsible).
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (k, v) = content.split_once('=').ok_or_else(|| {
            Entries::err(line, format!("expected `key = value`, found `{content}`"))
        })?;
        let (k, v) = (k.trim(), v.trim());
        // String values may be quoted: coefficient_model = "kazhikhov".
        let v = v
            .strip_prefix('"')
            .and_then(|s| s.strip_suffix('"'))
            .unwrap_or(v);
        if !KEYS.contains(&k) {
            return Err(Entries::err(line, format!("unknown key `{k}`")));
        }
        if v.is_empty() {
            return Err(Entries::err(line, format!("key `{k}` has no value")));
        }
        if let Some((first, _)) = map.insert(k.to_string(), (line, v.to_string())) {
            return Err(Entries::err(
                line,
                format!("duplicate key `{k}` (first set on line {first})"),
            ));
        }
    }
    let e = Entries {
        map,
        used: Default::default(),
    };
    let config = resolve(&e)?;
    let used = e.used.borrow();
    if let Some((k, (line, _))) = e.map.iter().find(|(k, _)| !used.contains(k)) {
        return Err(Entries::err(
            *line,
            format!("key `{k}` does not apply to this configuration"),
        ));
    }
    config.validate().map_err(|m| Entries::err(0, m))?;
    Ok(config)
}

fn resolve(e: &Entries) -> Result<RunConfig, CliError> {
    let (nl, nv) = e.required("n", "grid size")?;
    let n: usize = Entries::parse(nl, "n", nv, "a positive integer")?;
    if n < 4 || !n.is_power_of_two() {
        return Err(Entries::err(
            nl,
            format!("n must be a power of two >= 4, got {n}"),
        ));
    }
    let grid = GridConfig {
        n,
        length: e.f64_or("length", 2.0 * std::f64::consts::PI)?,
    };
    let time = TimeConfig {
        dt: e.f64_req("dt", "time step")?,
        t_end: e.f64_req("t_end", "final time")?,
        sample_every: e.usize_or("sample_every", 1)?,
    };
    let (ml, mv) = e.required("coefficient_model", "kazhikhov, combustion or tabulated")?;
    let spec = match mv {
        "kazhikhov" => ModelSpec::Kazhikhov {
            kappa0: e.f64_req("kappa0", "kazhikhov model")?,
            mu0: e.f64_req("mu0", "kazhikhov model")?,
        },
        "combustion" => ModelSpec::Combustion {
            k: e.f64_req("k", "combustion model")?,
            cp: e.f64_req("Cp", "combustion model")?,
            p0: e.f64_req("P0", "combustion model")?,
            r_gas: e.f64_req("R", "combustion model")?,
            mu0: e.f64_req("mu0", "combustion model")?,
        },
        "tabulated" => ModelSpec::Tabulated {
            rho: e.list_req("table_rho", "tabulated model")?,
            kappa: e.list_req("table_kappa", "tabulated model")?,
            mu: e.list_req("table_mu", "tabulated model")?,
        },
        other => return Err(Entries::err(ml, format!("unknown model `{other}`"))),
    };
    let model = ModelConfig {
        spec,
        rho_min: e.f64_req("rho_min", "density lower bound")?,
        rho_max: e.f64_req("rho_max", "density upper bound")?,
        nu: e.f64_or("nu", 0.0)?,
    };
    let friedrichs_n = match e.raw("friedrichs_n") {
        None => None,
        Some((l, v)) => {
            let x = parse_f64(l, "friedrichs_n", v)?;
            if x.is_infinite() && x > 0.0 {
                None
            } else {
                Some(x)
            }
        }
    };
    let regularization = RegularizationConfig {
        eps_mollify: e.f64_or("eps_mollify", 0.0)?,
        friedrichs_n,
    };
    let formulation = match e.raw("formulation") {
        None | Some((_, "u")) => Formulation::U,
        Some((_, "v")) => Formulation::V,
        Some((l, v)) => {
            return Err(Entries::err(
                l,
                format!("formulation must be `u` or `v`, found `{v}`"),
            ))
        }
    };
    let scheme = match e.raw("scheme") {
        None | Some((_, "semi_implicit")) => Scheme::SemiImplicit,
        Some((_, "fully_explicit")) => Scheme::FullyExplicit,
        Some((l, v)) => {
            return Err(Entries::err(
                l,
                format!("scheme must be `semi_implicit` or `fully_explicit`, found `{v}`"),
            ))
        }
    };
    let defaults = SolverConfig::default();
    let (il, iv) = e.required(
        "initial",
        "taylor_green, fourier_modes, random_bandlimited or from_snapshot",
    )?;
    let kind = match iv {
        "taylor_green" => InitialKind::TaylorGreen {
            density_amplitude: e.f64_req("density_amplitude", "taylor_green data")?,
            velocity_amplitude: e.f64_req("velocity_amplitude", "taylor_green data")?,
        },
        "fourier_modes" => InitialKind::FourierModes {
            density_modes: e.modes_or_empty("density_modes")?,
            stream_modes: e.modes_or_empty("stream_modes")?,
        },
        "random_bandlimited" => InitialKind::RandomBandlimited {
            band: e.f64_req("band", "random_bandlimited data")?,
            density_amplitude: e.f64_req("density_amplitude", "random_bandlimited data")?,
            velocity_amplitude: e.f64_req("velocity_amplitude", "random_bandlimited data")?,
        },
        "from_snapshot" => InitialKind::FromSnapshot {
            path: e
                .required("snapshot_path", "from_snapshot data")?
                .1
                .to_string(),
        },
        other => {
            return Err(Entries::err(
                il,
                format!("unknown initial data kind `{other}`"),
            ))
        }
    };
    let density_offset = match kind {
        InitialKind::FromSnapshot { .. } => e.f64_or("density_offset", 0.0)?,
        _ => e.f64_req("density_offset", "base density of generated data")?,
    };
    let config = RunConfig {
        grid,
        time,
        model,
        regularization,
        formulation,
        scheme,
        projection: e.bool_or("projection", defaults.projection)?,
        use_picard: e.bool_or("picard", defaults.use_picard)?,
        picard_tol: e.f64_or("picard_tol", defaults.picard_tol)?,
        picard_max_iters: e.usize_or("picard_max_iters", defaults.picard_max_iters)?,
        cfl_max: e.f64_or("cfl_max", defaults.cfl_max)?,
        initial: InitialDataSpec {
            kind,
            density_offset,
        },
        tolerances: Tolerances {
            energy: e.f64_or("tol_energy", 1e-2)?,
            max_principle: e.f64_or("tol_max_principle", 1e-8)?,
            divergence: e.f64_or("tol_divergence", 1e-10)?,
            gn_cap: e.f64_or("gn_cap", 10.0)?,
            growth_factor: e.f64_or("growth_factor", 10.0)?,
        },
        seed: match e.raw("seed") {
            Some((l, v)) => Entries::parse(l, "seed", v, "a nonnegative integer")?,
            None => 0,
        },
        snapshot_every: e.usize_or("snapshot_every", 0)?,
        besov: e.bool_or("besov", true)?,
    };
    // Point range errors at the line that set the value when there is one.
    if let Err(m) = config.validate() {
        let key = KEYS
            .iter()
            .find(|k| m.starts_with(&format!("{k} ")))
            .copied()
            .unwrap_or("");
        return Err(Entries::err(e.line_of(key), m));
    }
    Ok(config)
}
