use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use zms::besov::{under_resolved, BesovIndex, DyadicPartition};
use zms::cli_io::{
    convergence_study, density_samples, parse_config, run_to_directory, verify, CliError,
    ConvergenceMetric, ExactSolution, RunConfig, RunReport,
};
use zms::coefficients::check_relation;
use zms::spectral::Snapshot;

#[derive(Parser)]
#[command(
    name = "zms",
    version,
    about = "Zero-Mach Navier-Stokes simulator and Besov diagnostics on the 2D torus"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation and write diagnostics, snapshots, manifest and report.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check −κ + 2μ′ = 0 for the configured model on evenly spaced densities.
    CheckRelation {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Besov norm and dyadic block norms of one snapshot component.
    Besov {
        /// Snapshot file (.zmf).
        #[arg(long, alias = "snapshot")]
        field: PathBuf,
        #[arg(long, default_value_t = 0)]
        component: usize,
        #[arg(long, allow_hyphen_values = true)]
        s: f64,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        /// Subtract this constant first, e.g. 1 to get ρ − 1 from the density.
        #[arg(long)]
        subtract: Option<f64>,
        /// Write rows (j, 2^{js}‖Δ_j f‖_{L^p}) to this CSV file.
        #[arg(long)]
        blocks_csv: Option<PathBuf>,
    },
    /// Refinement study at (dt, N), (dt/2, 2N), ...
    Convergence {
        #[arg(long)]
        config: PathBuf,
        /// Number of levels, at least 2.
        #[arg(long, alias = "levels", default_value_t = 3)]
        refinements: usize,
        #[arg(long)]
        exact: Option<ExactArg>,
        #[arg(long, value_enum, default_value_t = MetricArg::State)]
        metric: MetricArg,
        /// Also write the table as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Re-run the diagnostic suite on an output directory.
    Verify {
        #[arg(long)]
        dir: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ExactArg {
    Heat,
    TaylorGreen,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    State,
    Constraint,
}

fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

fn print_report(report: &RunReport) {
    for c in &report.checks {
        let status = match (c.enabled, c.pass) {
            (false, _) => "info",
            (true, true) => "PASS",
            (true, false) => "FAIL",
        };
        let tol = c
            .tolerance
            .map(|t| format!(" (tol {t:e})"))
            .unwrap_or_default();
        let detail = if c.detail.is_empty() {
            String::new()
        } else {
            format!("  {}", c.detail)
        };
        println!("{status:4}  {:28} {:e}{tol}{detail}", c.name, c.value);
    }
    for w in &report.warnings {
        println!("warning: {w}");
    }
    if let Some(e) = &report.aborted {
        println!("run aborted at t = {}: {e}", report.final_time);
    }
}

fn pass_code(pass: bool) -> ExitCode {
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn execute(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Run { config, out } => {
            let report = run_to_directory(&load_config(&config)?, &out)?;
            print_report(&report);
            Ok(pass_code(report.all_pass))
        }
        Command::CheckRelation {
            config,
            samples,
            tol,
        } => {
            let cfg = load_config(&config)?;
            let model = cfg.model.build()?;
            let rho = density_samples(cfg.model.rho_min, cfg.model.rho_max, samples);
            let r = check_relation(&model, &rho, tol)?;
            println!(
                "{}  max |−κ + 2μ′| = {:e} at rho = {} over {samples} samples (tol {tol:e})",
                if r.pass { "PASS" } else { "FAIL" },
                r.max_residual,
                r.worst_rho
            );
            Ok(pass_code(r.pass))
        }
        Command::Besov {
            field,
            component,
            s,
            p,
            r,
            subtract,
            blocks_csv,
        } => {
            let snap = Snapshot::read_from(&field)?;
            let field = snap.components.get(component).ok_or_else(|| {
                CliError::Precondition(format!("snapshot has {} components", snap.components.len()))
            })?;
            let field = match subtract {
                Some(c) => field.add_constant(-c),
                None => field.clone(),
            };
            let partition = DyadicPartition::new(snap.grid());
            let idx = BesovIndex::new(s, p, r)?;
            let blocks = partition.block_norms(&[&field], p)?;
            for (k, b) in blocks.iter().enumerate() {
                println!("block j = {:3}  ‖Δ_j f‖_L{p} = {b:e}", k as i32 - 1);
            }
            if let Some(path) = blocks_csv {
                let mut text = String::from("j,weighted_block_norm\n");
                for (k, b) in blocks.iter().enumerate() {
                    let j = k as i32 - 1;
                    text.push_str(&format!("{j},{:e}\n", 2f64.powf(j as f64 * s) * b));
                }
                std::fs::write(path, text)?;
            }
            println!("‖f‖_B^{s}_{{{p},{r}}} = {:e}", partition.norm(&field, idx)?);
            if under_resolved(&field) {
                println!("warning: field is under-resolved near the Nyquist band");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Convergence {
            config,
            refinements,
            exact,
            metric,
            json,
        } => {
            let exact = exact.map(|e| match e {
                ExactArg::Heat => ExactSolution::Heat,
                ExactArg::TaylorGreen => ExactSolution::TaylorGreen,
            });
            let metric = match metric {
                MetricArg::State => ConvergenceMetric::State,
                MetricArg::Constraint => ConvergenceMetric::ConstraintResidual,
            };
            let table = convergence_study(&load_config(&config)?, refinements, exact, metric)?;
            println!("reference: {}", table.reference);
            println!("{:>6} {:>12} {:>14} {:>8}", "N", "dt", "error", "order");
            for l in &table.levels {
                let e = l.error.map_or("-".into(), |e| format!("{e:.6e}"));
                let o = l.order.map_or("-".into(), |o| format!("{o:.3}"));
                println!("{:>6} {:>12e} {e:>14} {o:>8}", l.n, l.dt);
            }
            if let Some(a) = &table.aborted {
                println!("aborted: {a}");
            }
            if let Some(path) = json {
                std::fs::write(path, serde_json::to_string_pretty(&table)?)?;
            }
            Ok(pass_code(table.aborted.is_none()))
        }
        Command::Verify { dir } => {
            let report = verify(&dir)?;
            print_report(&report);
            Ok(pass_code(report.all_pass))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
