use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use eoa_core::bounds::{bounds_report, eigen_lower_bound, entropic_bound, fidelity_bound, BoundsReport};
use eoa_core::ensembles::{
    optimize, verify_superadditivity, AppendixEnsembleSpec, Direction, EnsembleSize, OptimizerConfig,
    SuperadditivityReport,
};
use eoa_core::magic::tilde_state;
use eoa_core::quantum::pure_entanglement;
use eoa_core::DensityMatrix;
use serde::Serialize;

use crate::casebook::{casebook, CaseResult};
use crate::error::{CliError, EXIT_OK, EXIT_VERIFICATION};
use crate::format::{parse_qdm, write_qdm, write_qens};
use crate::report::{Format, Report};

#[derive(Debug, Parser)]
#[command(name = "eoa", version, about = "Entanglement of assistance: bounds, ensemble search and worked checks")]
pub struct Cli {
    /// Report format on stdout.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    Max,
    Min,
}

fn parse_ensemble_size(s: &str) -> Result<EnsembleSize, String> {
    if s == "auto" {
        return Ok(EnsembleSize::Auto);
    }
    match s.parse::<usize>() {
        Ok(m) if m > 0 => Ok(EnsembleSize::Fixed(m)),
        _ => Err(format!("expected `auto` or a positive integer, got `{s}`")),
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Upper and lower bounds for a density matrix.
    Bounds {
        #[arg(long = "in", value_name = "QDM")]
        input: PathBuf,
    },
    /// Search ensembles for the largest (or smallest) average entanglement.
    Optimize {
        #[arg(long = "in", value_name = "QDM")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = DirectionArg::Max)]
        direction: DirectionArg,
        #[arg(long, value_parser = parse_ensemble_size, default_value = "auto")]
        ensemble_size: EnsembleSize,
        #[arg(long, default_value_t = OptimizerConfig::default().restarts,
              value_parser = clap::builder::RangedU64ValueParser::<usize>::new().range(1..))]
        restarts: usize,
        #[arg(long, default_value_t = OptimizerConfig::default().seed)]
        seed: u64,
        #[arg(long, default_value_t = OptimizerConfig::default().max_sweeps,
              value_parser = clap::builder::RangedU64ValueParser::<usize>::new().range(1..))]
        max_sweeps: usize,
        #[arg(long, default_value_t = OptimizerConfig::default().tol)]
        tol: f64,
        /// Write the best ensemble as QENS.
        #[arg(long, value_name = "QENS")]
        out_ensemble: Option<PathBuf>,
    },
    /// Spin-flipped state ρ̃ of a two-qubit density matrix.
    Tilde {
        #[arg(long = "in", value_name = "QDM")]
        input: PathBuf,
        /// Write ρ̃ as QDM.
        #[arg(long, value_name = "QDM")]
        out: Option<PathBuf>,
    },
    /// Check the twelve-member two-copy ensemble and the superadditivity verdict.
    VerifyAppendix,
    /// Recompute every worked value and compare with its expected value.
    Casebook,
}

/// A finished command: the report to print and the process exit code.
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub exit_code: i32,
}

impl Outcome {
    fn ok(report: Report) -> Self {
        Outcome {
            report,
            exit_code: EXIT_OK,
        }
    }
}

fn read_state(path: &Path) -> Result<DensityMatrix, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_qdm(&text).map_err(|source| CliError::Parse {
        path: path.display().to_string(),
        source,
    })
}

fn write_file(path: &Path, contents: &str) -> Result<String, CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(path.display().to_string())
}

#[derive(Serialize)]
struct BoundsResults {
    dims: [usize; 2],
    #[serde(flatten)]
    report: BoundsReport,
    best_lower: f64,
    best_upper: f64,
}

#[derive(Serialize)]
struct RestartSummary {
    seed: u64,
    value: f64,
    sweeps: usize,
    converged: bool,
}

#[derive(Serialize)]
struct MemberSummary {
    p: f64,
    entanglement: f64,
}

#[derive(Serialize)]
struct OptimizeResults {
    direction: Direction,
    best_value: f64,
    converged: bool,
    rank: usize,
    ensemble_size: usize,
    best_restart: usize,
    eigen_lower: f64,
    entropic_upper: f64,
    restarts: Vec<RestartSummary>,
    members: Vec<MemberSummary>,
    ensemble_written: Option<String>,
}

#[derive(Serialize)]
struct TildeResults {
    dims: [usize; 2],
    fidelity_with_input: f64,
    /// Row-major `[re, im]` pairs.
    entries: Vec<[f64; 2]>,
    written: Option<String>,
}

#[derive(Serialize)]
struct AppendixResults {
    #[serde(flatten)]
    verdict: SuperadditivityReport,
    constants: AppendixEnsembleSpec,
    e_alpha: f64,
    e_beta: f64,
    e_gamma: f64,
}

#[derive(Serialize)]
struct CasebookResults {
    passed: usize,
    failed: usize,
    rows: Vec<CaseResult>,
}

pub fn run(command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::Bounds { input } => {
            let rho = read_state(input)?;
            let report = bounds_report(&rho)?;
            let results = BoundsResults {
                dims: [rho.dims().d_a, rho.dims().d_b],
                best_lower: report.best_lower(),
                best_upper: report.best_upper(),
                report,
            };
            Ok(Outcome::ok(Report::new("bounds", Some(&input.display().to_string()), results)))
        }
        Command::Optimize {
            input,
            direction,
            ensemble_size,
            restarts,
            seed,
            max_sweeps,
            tol,
            out_ensemble,
        } => {
            let rho = read_state(input)?;
            let cfg = OptimizerConfig {
                direction: match direction {
                    DirectionArg::Max => Direction::Maximize,
                    DirectionArg::Min => Direction::Minimize,
                },
                ensemble_size: *ensemble_size,
                restarts: *restarts,
                seed: *seed,
                max_sweeps: *max_sweeps,
                tol: *tol,
            };
            let r = optimize(&rho, &cfg)?;
            let ensemble_written = match out_ensemble {
                Some(path) => Some(write_file(path, &write_qens(&r.best_ensemble))?),
                None => None,
            };
            let results = OptimizeResults {
                direction: cfg.direction,
                best_value: r.best_value,
                converged: r.converged,
                rank: r.rank,
                ensemble_size: r.ensemble_size,
                best_restart: r.best_restart,
                eigen_lower: eigen_lower_bound(&rho)?,
                entropic_upper: entropic_bound(&rho)?,
                restarts: r
                    .per_restart
                    .iter()
                    .map(|x| RestartSummary {
                        seed: x.seed,
                        value: x.value,
                        sweeps: x.sweeps,
                        converged: x.converged,
                    })
                    .collect(),
                members: r
                    .best_ensemble
                    .members()
                    .iter()
                    .map(|m| MemberSummary {
                        p: m.p,
                        entanglement: pure_entanglement(&m.state),
                    })
                    .collect(),
                ensemble_written,
            };
            Ok(Outcome::ok(Report::new("optimize", Some(&input.display().to_string()), results)))
        }
        Command::Tilde { input, out } => {
            let rho = read_state(input)?;
            let t = tilde_state(&rho)?;
            let written = match out {
                Some(path) => Some(write_file(path, &write_qdm(&t))?),
                None => None,
            };
            let results = TildeResults {
                dims: [rho.dims().d_a, rho.dims().d_b],
                fidelity_with_input: fidelity_bound(&rho)?,
                entries: t.matrix().data().iter().map(|z| [z.re, z.im]).collect(),
                written,
            };
            Ok(Outcome::ok(Report::new("tilde", Some(&input.display().to_string()), results)))
        }
        Command::VerifyAppendix => {
            let verdict = verify_superadditivity()?;
            let constants = AppendixEnsembleSpec::closed_form();
            let (e_alpha, e_beta, e_gamma) = constants.member_entanglements()?;
            let exit_code = if verdict.superadditive { EXIT_OK } else { EXIT_VERIFICATION };
            let results = AppendixResults {
                verdict,
                constants,
                e_alpha,
                e_beta,
                e_gamma,
            };
            Ok(Outcome {
                report: Report::new("verify-appendix", None, results),
                exit_code,
            })
        }
        Command::Casebook => {
            let rows = casebook();
            let failed = rows.iter().filter(|r| !r.pass).count();
            let results = CasebookResults {
                passed: rows.len() - failed,
                failed,
                rows,
            };
            Ok(Outcome {
                report: Report::new("casebook", None, results),
                exit_code: if failed == 0 { EXIT_OK } else { EXIT_VERIFICATION },
            })
        }
    }
}
