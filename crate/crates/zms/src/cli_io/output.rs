use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::besov::{
    parabolic_besov_monitor, strong_norm_monitor, ParabolicReport, StrongNormReport,
};
use crate::coefficients::CoefficientModel;
use crate::diagnostics::{
    density_energy_check, energy_inequality_check, max_principle_check, solenoidal_velocity,
    velocity_energy_check, DiagnosticsError, DiagnosticsRecord, Recorder,
};
use crate::solver::{run_simulation, DiagnosticsSink, SimState};
use crate::spectral::Snapshot;

use super::{initial_state, CliError, RunConfig};

pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";
pub const MANIFEST_FILE: &str = "run_manifest.json";
pub const REPORT_FILE: &str = "report.json";

pub fn snapshot_name(time: f64) -> String {
    format!("fields_{time:.6}.zmf")
}

/// Everything needed to reproduce a run, written before the first step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub config: RunConfig,
    /// The same config in the `key = value` input format.
    pub config_text: String,
    pub grid_spacing: f64,
    pub steps: usize,
    pub kappa_range: (f64, f64),
    pub mu_range: (f64, f64),
}

impl RunManifest {
    pub fn new(config: &RunConfig, model: &CoefficientModel) -> Self {
        let b = model.bounds();
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            config_text: config.to_text(),
            grid_spacing: config.grid.length / config.grid.n as f64,
            steps: (config.time.t_end / config.time.dt).ceil() as usize,
            kappa_range: (b.kappa_min, b.kappa_max),
            mu_range: (b.mu_min, b.mu_max),
        }
    }
}

/// Sink writing diagnostics rows and snapshots as the run proceeds, so an
/// aborted run still leaves everything up to its last good state on disk.
pub struct OutputSink {
    dir: PathBuf,
    model: CoefficientModel,
    pub recorder: Recorder,
    csv: BufWriter<File>,
    snapshot_every: usize,
    last_snapshot: Option<f64>,
}

impl OutputSink {
    pub fn create(
        dir: &Path,
        config: &RunConfig,
        model: &CoefficientModel,
    ) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir)?;
        let manifest = RunManifest::new(config, model);
        std::fs::write(
            dir.join(MANIFEST_FILE),
            serde_json::to_string_pretty(&manifest)?,
        )?;
        let mut csv = BufWriter::new(File::create(dir.join(DIAGNOSTICS_FILE))?);
        writeln!(csv, "{}", DiagnosticsRecord::csv_header())?;
        let recorder = Recorder::new(model);
        Ok(Self {
            dir: dir.to_path_buf(),
            model: model.clone(),
            recorder: if config.besov {
                recorder
            } else {
                recorder.without_besov()
            },
            csv,
            snapshot_every: config.snapshot_every,
            last_snapshot: None,
        })
    }

    fn write_snapshot(&mut self, state: &SimState) -> Result<(), String> {
        if self.last_snapshot == Some(state.time) {
            return Ok(());
        }
        let u = solenoidal_velocity(state, &self.model).map_err(|e| e.to_string())?;
        let snap = Snapshot::new(
            state.time,
            vec![
                state.rho.clone(),
                u.x().clone(),
                u.y().clone(),
                state.pi.clone(),
            ],
        );
        snap.write_to(&self.dir.join(snapshot_name(state.time)))
            .map_err(|e| e.to_string())?;
        self.last_snapshot = Some(state.time);
        Ok(())
    }
}

impl DiagnosticsSink for OutputSink {
    fn sample(
        &mut self,
        step: usize,
        previous: Option<&SimState>,
        state: &SimState,
    ) -> Result<(), String> {
        let record = self
            .recorder
            .record(step, previous, state)
            .map_err(|e| e.to_string())?;
        writeln!(self.csv, "{}", record.csv_row()).map_err(|e| e.to_string())?;
        self.csv.flush().map_err(|e| e.to_string())?;
        if step == 0 {
            self.write_snapshot(state)?;
        }
        Ok(())
    }

    fn observe(
        &mut self,
        step: usize,
        previous: &SimState,
        state: &SimState,
    ) -> Result<(), String> {
        self.recorder.observe(step, previous, state)?;
        if self.snapshot_every > 0 && step % self.snapshot_every == 0 {
            self.write_snapshot(state)?;
        }
        Ok(())
    }

    fn warn(&mut self, message: &str) {
        self.recorder.warn(message);
    }

    fn finish(&mut self, final_state: &SimState) -> Result<(), String> {
        self.csv.flush().map_err(|e| e.to_string())?;
        self.write_snapshot(final_state)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    /// Disabled checks are reported but never fail the run.
    pub enabled: bool,
    pub pass: bool,
    pub value: f64,
    pub tolerance: Option<f64>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    /// None for a completed run, otherwise the error that stopped it.
    pub aborted: Option<String>,
    pub final_time: f64,
    pub samples: usize,
    pub checks: Vec<CheckResult>,
    pub warnings: Vec<String>,
    pub all_pass: bool,
}

fn check(
    name: &str,
    enabled: bool,
    pass: bool,
    value: f64,
    tolerance: Option<f64>,
    detail: String,
) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        enabled,
        pass,
        value,
        tolerance,
        detail,
    }
}

/// Runs every diagnostic check that applies to `config` on a record history.
pub fn evaluate_checks(
    config: &RunConfig,
    records: &[DiagnosticsRecord],
) -> Result<Vec<CheckResult>, CliError> {
    let tol = &config.tolerances;
    let mut checks = Vec::new();
    // The identities hold for the unregularized problem only: mollified
    // coefficients dissipate with ⟨κ⟩_ε instead of κ.
    let exact_identity = config.regularization.eps_mollify == 0.0;
    let why = if exact_identity {
        String::new()
    } else {
        "disabled: mollified coefficients".into()
    };
    let d = density_energy_check(records, tol.energy)?;
    checks.push(check(
        "density_energy_identity",
        exact_identity,
        d.pass,
        d.max_defect,
        Some(tol.energy),
        why.clone(),
    ));
    let v = velocity_energy_check(records, tol.energy)?;
    checks.push(check(
        "velocity_energy_identity",
        exact_identity,
        v.pass,
        v.max_defect,
        Some(tol.energy),
        why,
    ));

    let mp_tol =
        tol.max_principle * (config.model.rho_max - config.model.rho_min).max(f64::MIN_POSITIVE);
    let m = max_principle_check(records, mp_tol)?;
    checks.push(check(
        "maximum_principle",
        true,
        m.pass,
        m.worst_excursion,
        Some(mp_tol),
        format!(
            "initial range [{}, {}], worst at t = {}",
            m.lower, m.upper, m.worst_time
        ),
    ));

    let div = records.iter().map(|r| r.div_u_linf).fold(0.0, f64::max);
    checks.push(check(
        "divergence_free",
        config.projection,
        div <= tol.divergence,
        div,
        Some(tol.divergence),
        if config.projection {
            String::new()
        } else {
            "disabled: projection off".into()
        },
    ));

    match energy_inequality_check(records) {
        Ok(r) => checks.push(check(
            "energy_inequality_constant",
            true,
            r.c_hat.is_finite(),
            r.c_hat,
            None,
            "sup_t (‖u‖² + ∫‖∇u‖²)/‖u₀‖²".into(),
        )),
        Err(DiagnosticsError::VacuousInequality) => checks.push(check(
            "energy_inequality_constant",
            false,
            true,
            0.0,
            None,
            "disabled: zero initial velocity".into(),
        )),
        Err(e) => return Err(e.into()),
    }

    let gn = records
        .iter()
        .flat_map(|r| [r.gn_l4, r.gn_linf, r.gn_grad_l4])
        .flatten()
        .fold(0.0, f64::max);
    checks.push(check(
        "gagliardo_nirenberg",
        true,
        gn <= tol.gn_cap,
        gn,
        Some(tol.gn_cap),
        String::new(),
    ));

    let k_res = records
        .iter()
        .filter_map(|r| r.k_residual)
        .fold(0.0, f64::max);
    checks.push(check(
        "k_equation_residual",
        false,
        true,
        k_res,
        None,
        "reported only".into(),
    ));
    let constraint = records
        .iter()
        .map(|r| r.constraint_residual)
        .fold(0.0, f64::max);
    checks.push(check(
        "constraint_residual",
        false,
        true,
        constraint,
        None,
        "reported only".into(),
    ));

    let track: Vec<_> = records.iter().filter_map(|r| r.besov).collect();
    if !track.is_empty() {
        let p: ParabolicReport = parabolic_besov_monitor(&track)?;
        checks.push(check(
            "parabolic_besov_constant",
            true,
            p.empirical_c.is_finite(),
            p.empirical_c,
            None,
            "max_t LHS/RHS".into(),
        ));
        let s: StrongNormReport = strong_norm_monitor(&track, tol.growth_factor)?;
        checks.push(check(
            "strong_norm_growth",
            true,
            !s.growth_flag,
            s.max_growth,
            Some(tol.growth_factor),
            if s.under_resolved {
                "under-resolved samples present".into()
            } else {
                String::new()
            },
        ));
    }
    Ok(checks)
}

pub fn build_report(
    config: &RunConfig,
    records: &[DiagnosticsRecord],
    mut warnings: Vec<String>,
    aborted: Option<String>,
) -> Result<RunReport, CliError> {
    let checks = if records.is_empty() {
        Vec::new()
    } else {
        evaluate_checks(config, records)?
    };
    if let Some(r) = records
        .iter()
        .find(|r| r.nyquist_fraction > crate::besov::RESOLUTION_WARNING_FRACTION)
    {
        warnings.push(format!(
            "under-resolved: {:.3e} of the energy beyond the 2/3 band at t = {}",
            r.nyquist_fraction, r.time
        ));
    }
    let all_pass =
        aborted.is_none() && !records.is_empty() && checks.iter().all(|c| !c.enabled || c.pass);
    Ok(RunReport {
        aborted,
        final_time: records.last().map_or(0.0, |r| r.time),
        samples: records.len(),
        checks,
        warnings,
        all_pass,
    })
}

/// Generates the initial data, runs, and writes diagnostics.csv, snapshots,
/// run_manifest.json and report.json into `dir`. A failed run still gets a
/// report describing how far it went.
pub fn run_to_directory(config: &RunConfig, dir: &Path) -> Result<RunReport, CliError> {
    let model = config.model.build()?;
    let initial = initial_state(config, &model)?;
    let mut sink = OutputSink::create(dir, config, &model)?;
    let outcome = run_simulation(&initial, &config.solver_config(), &model, &mut sink);
    let aborted = outcome.err().map(|e| e.to_string());
    let report = build_report(
        config,
        &sink.recorder.records,
        sink.recorder.warnings.clone(),
        aborted,
    )?;
    std::fs::write(
        dir.join(REPORT_FILE),
        serde_json::to_string_pretty(&report)?,
    )?;
    Ok(report)
}

pub fn read_manifest(dir: &Path) -> Result<RunManifest, CliError> {
    let text = std::fs::read_to_string(dir.join(MANIFEST_FILE))?;
    Ok(serde_json::from_str(&text)?)
}

pub fn read_diagnostics(dir: &Path) -> Result<Vec<DiagnosticsRecord>, CliError> {
    let file = File::open(dir.join(DIAGNOSTICS_FILE))?;
    let mut lines = BufReader::new(file).lines();
    let header = lines.next().transpose()?.unwrap_or_default();
    if header.trim_end() != DiagnosticsRecord::csv_header() {
        return Err(CliError::Output(format!(
            "{DIAGNOSTICS_FILE}: unexpected header"
        )));
    }
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        records
            .push(DiagnosticsRecord::from_csv_row(&line).map_err(|e| {
                CliError::Output(format!("{DIAGNOSTICS_FILE} line {}: {e}", i + 2))
            })?);
    }
    Ok(records)
}

/// Re-runs the diagnostic suite on an existing output directory and
/// rewrites its report.json.
pub fn verify(dir: &Path) -> Result<RunReport, CliError> {
    let manifest = read_manifest(dir)?;
    let records = read_diagnostics(dir)?;
    // Keep the abort status of the original run; the CSV alone cannot tell.
    let aborted = std::fs::read_to_string(dir.join(REPORT_FILE))
        .ok()
        .and_then(|t| serde_json::from_str::<RunReport>(&t).ok())
        .and_then(|r| r.aborted);
    let report = build_report(&manifest.config, &records, Vec::new(), aborted)?;
    std::fs::write(
        dir.join(REPORT_FILE),
        serde_json::to_string_pretty(&report)?,
    )?;
    Ok(report)
}
