//! Command-line driver: regret sweeps, capacity solves, minimax
//! bracketing, α-limit tables, and the oracle agreement suite.
//!
//! Every subcommand reads an optional TOML config (`--config`) with flags
//! overriding individual keys. Documents go to stdout, or atomically to
//! `--output`; human summaries go to the other stream. Exit codes: 0
//! success, 1 config error, 2 numerical failure (non-convergence, saddle
//! or oracle-check failure), 3 size-guard refusal.

use std::path::PathBuf;
use std::process::ExitCode;

use batchpred::config::{
    PredictorSpec, PriorSpec, RawConfig, Unit, DEFAULT_BETA, DEFAULT_QUADRATURE_SIZE,
};
use batchpred::experiments::{
    cmd_capacity, cmd_limits, cmd_lowerbound, cmd_oracle_check, cmd_regret, exit_code_for_error,
    write_atomic, CommandOutput,
};
use batchpred::{Error, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "batchpred",
    version,
    about = "Numerical laboratory for batch universal prediction",
    long_about = "Computes batch regret, Rényi (α-) regret, conditional mutual and Sibson \
                  information, and capacity-achieving priors for binary i.i.d. sources, \
                  with brute-force oracles validating every fast path."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep a predictor's α-regret over a parameter grid (CSV)
    Regret(CommonArgs),
    /// Solve for the capacity-achieving prior and certify the saddle (JSON)
    Capacity(CommonArgs),
    /// Bracket the minimax regret between information and add-β bounds (CSV)
    Lowerbound(CommonArgs),
    /// Tabulate α-regret across an α ladder with its two endpoints (CSV)
    Limits(CommonArgs),
    /// Run the full fast-path-vs-oracle agreement suite
    OracleCheck(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// TOML config file; explicit flags override its keys
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Number of training batches
    #[arg(long)]
    n: Option<usize>,
    /// Samples per batch
    #[arg(long)]
    ell: Option<usize>,
    /// n values for the lowerbound sweep, comma-separated
    #[arg(long, value_delimiter = ',')]
    n_list: Option<Vec<usize>>,
    /// Batch-length exponent: ell = round(n^gamma)
    #[arg(long)]
    gamma: Option<f64>,
    /// Rényi order (1 = average regret / mutual information)
    #[arg(long)]
    alpha: Option<f64>,
    /// α ladder for the limits table, comma-separated
    #[arg(long, value_delimiter = ',')]
    alphas: Option<Vec<f64>>,
    /// Add-β pseudo-count
    #[arg(long)]
    beta: Option<f64>,
    /// Truncation endpoint of the parameter interval [delta, 1-delta]
    #[arg(long)]
    delta: Option<f64>,
    /// Source parameter for the limits table
    #[arg(long)]
    theta: Option<f64>,
    /// Solver tolerance
    #[arg(long)]
    tol: Option<f64>,
    /// Solver iteration cap
    #[arg(long)]
    max_iter: Option<usize>,
    /// Saddle-certification tolerance
    #[arg(long)]
    saddle_tol: Option<f64>,
    /// Step of the default sweep grid on [delta, 1-delta]
    #[arg(long)]
    sweep_step: Option<f64>,
    /// Node count for Dirichlet quadrature priors
    #[arg(long)]
    quadrature_size: Option<usize>,
    /// Unit for summary lines: nats or bits
    #[arg(long)]
    unit: Option<Unit>,
    /// Worker-thread count (results are identical for any value)
    #[arg(long)]
    workers: Option<usize>,
    /// Output file (written atomically); stdout if omitted
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
    /// Predictor kind: add-beta, mixture, or alpha-nml
    #[arg(long, value_name = "KIND")]
    predictor: Option<String>,
    /// Rényi order of an alpha-nml predictor (defaults to --alpha if > 1)
    #[arg(long)]
    predictor_alpha: Option<f64>,
    /// Prior kind for mixture/alpha-nml predictors: uniform or dirichlet
    #[arg(long, value_name = "KIND")]
    prior: Option<String>,
    /// Dirichlet concentration of the predictor prior
    #[arg(long)]
    prior_beta: Option<f64>,
}

impl CommonArgs {
    fn prior_spec(&self) -> Result<Option<PriorSpec>> {
        let grid_size = self.quadrature_size.unwrap_or(DEFAULT_QUADRATURE_SIZE);
        match self.prior.as_deref() {
            None => Ok(self.prior_beta.map(|beta| PriorSpec::Dirichlet {
                beta,
                grid_size,
            })),
            Some("uniform") => Ok(Some(PriorSpec::Uniform)),
            Some("dirichlet") => Ok(Some(PriorSpec::Dirichlet {
                beta: self.prior_beta.unwrap_or(1.0),
                grid_size,
            })),
            Some(other) => Err(Error::Config(format!(
                "--prior must be 'uniform' or 'dirichlet', got '{other}'"
            ))),
        }
    }

    fn predictor_spec(&self) -> Result<Option<PredictorSpec>> {
        let default_prior = || {
            self.prior_spec().map(|p| {
                p.unwrap_or(PriorSpec::Dirichlet {
                    beta: 1.0,
                    grid_size: self.quadrature_size.unwrap_or(DEFAULT_QUADRATURE_SIZE),
                })
            })
        };
        match self.predictor.as_deref() {
            None => Ok(None),
            Some("add-beta") => Ok(Some(PredictorSpec::AddBeta {
                beta: self.beta.unwrap_or(DEFAULT_BETA),
            })),
            Some("mixture") => Ok(Some(PredictorSpec::Mixture {
                prior: default_prior()?,
            })),
            Some("alpha-nml") => Ok(Some(PredictorSpec::AlphaNml {
                prior: default_prior()?,
                alpha: self
                    .predictor_alpha
                    .or(self.alpha.filter(|&a| a > 1.0))
                    .unwrap_or(2.0),
            })),
            Some(other) => Err(Error::Config(format!(
                "--predictor must be 'add-beta', 'mixture', or 'alpha-nml', got '{other}'"
            ))),
        }
    }

    fn to_raw(&self) -> Result<RawConfig> {
        Ok(RawConfig {
            n: self.n,
            ell: self.ell,
            n_list: self.n_list.clone(),
            gamma: self.gamma,
            alpha: self.alpha,
            alphas: self.alphas.clone(),
            beta: self.beta,
            delta: self.delta,
            theta: self.theta,
            tol: self.tol,
            max_iter: self.max_iter,
            saddle_tol: self.saddle_tol,
            sweep_step: self.sweep_step,
            quadrature_size: self.quadrature_size,
            unit: self.unit,
            workers: self.workers,
            output: self.output.clone(),
            grid: None,
            predictor: self.predictor_spec()?,
        })
    }

    fn resolve_raw(&self) -> Result<RawConfig> {
        let from_file = match &self.config {
            Some(path) => RawConfig::from_file(path)?,
            None => RawConfig::default(),
        };
        Ok(RawConfig::merged(from_file, self.to_raw()?))
    }
}

fn execute(
    args: &CommonArgs,
    run: impl FnOnce(RawConfig) -> Result<(CommandOutput, Option<PathBuf>)>,
) -> ExitCode {
    let outcome = args.resolve_raw().and_then(run);
    match outcome {
        Ok((out, output_path)) => {
            match output_path {
                Some(path) => {
                    if let Err(e) = write_atomic(&path, &out.rendered) {
                        eprintln!("error: {e}");
                        return ExitCode::from(exit_code_for_error(&e) as u8);
                    }
                    println!("wrote {}", path.display());
                    for line in &out.summary {
                        println!("{line}");
                    }
                }
                None => {
                    print!("{}", out.rendered);
                    for line in &out.summary {
                        eprintln!("{line}");
                    }
                }
            }
            ExitCode::from(out.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for_error(&e) as u8)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match &cli.command {
        Command::Regret(args) => execute(args, |raw| {
            let cfg = raw.resolve_regret()?;
            Ok((cmd_regret(&cfg)?, cfg.output))
        }),
        Command::Capacity(args) => execute(args, |raw| {
            let cfg = raw.resolve_capacity()?;
            Ok((cmd_capacity(&cfg)?, cfg.output))
        }),
        Command::Lowerbound(args) => execute(args, |raw| {
            let cfg = raw.resolve_lowerbound()?;
            Ok((cmd_lowerbound(&cfg)?, cfg.output))
        }),
        Command::Limits(args) => execute(args, |raw| {
            let cfg = raw.resolve_limits()?;
            Ok((cmd_limits(&cfg)?, cfg.output))
        }),
        Command::OracleCheck(args) => execute(args, |raw| {
            let cfg = raw.resolve_oracle_check()?;
            Ok((cmd_oracle_check(&cfg)?, cfg.output))
        }),
    }
}
