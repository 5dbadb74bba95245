//! Declarative run configuration: one TOML file per experiment plus
//! command-line overrides, resolved against documented defaults into
//! validated per-command configs.
//!
//! Resolution order: explicit flag > config-file key > default. Every
//! command echoes its fully-resolved configuration into the output header
//! (CSV comment lines or a JSON `config` object) so a result file is
//! self-describing. The worker count is deliberately excluded from the
//! echo: results are bit-identical across worker counts, so the echoed
//! header must be too.

use std::fmt;
use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::predictors::Predictor;
use crate::prior::Prior;
use crate::quadrature::dirichlet_quadrature;
use crate::source::{BatchSetup, ParamGrid};
use crate::{Error, Result};

/// Default endpoint of the truncated parameter interval `[δ, 1−δ]`.
pub const DEFAULT_DELTA: f64 = 0.1;
/// Default step for parameter sweep grids on `[δ, 1−δ]`.
pub const DEFAULT_SWEEP_STEP: f64 = 0.01;
/// Default node count for Dirichlet quadrature priors.
pub const DEFAULT_QUADRATURE_SIZE: usize = 64;
/// Default solver tolerance.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Default solver iteration cap.
pub const DEFAULT_MAX_ITER: usize = 10_000;
/// Default tolerance for post-hoc saddle certification.
pub const DEFAULT_SADDLE_TOL: f64 = 1e-6;
/// Default α ladder for the limits table.
pub const DEFAULT_ALPHA_LADDER: [f64; 9] =
    [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0];
/// Default n sweep for the lower-bound bracketing table.
pub const DEFAULT_N_LIST: [usize; 4] = [4, 8, 16, 32];
/// Default test-batch exponent (ℓ = round(n^γ)).
pub const DEFAULT_GAMMA: f64 = 1.0;
/// Default add-β pseudo-count.
pub const DEFAULT_BETA: f64 = 0.5;
/// Default source parameter for the limits table.
pub const DEFAULT_THETA: f64 = 0.7;

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn require<T>(value: Option<T>, key: &str) -> Result<T> {
    value.ok_or_else(|| config_err(format!("missing required key '{key}'")))
}

fn check_delta(delta: f64) -> Result<f64> {
    if delta > 0.0 && delta < 0.5 {
        Ok(delta)
    } else {
        Err(config_err(format!(
            "delta must lie strictly between 0 and 1/2, got {delta}"
        )))
    }
}

fn check_positive(value: f64, key: &str) -> Result<f64> {
    if value > 0.0 {
        Ok(value)
    } else {
        Err(config_err(format!("{key} must be positive, got {value}")))
    }
}

fn check_alpha(alpha: f64) -> Result<f64> {
    if alpha >= 1.0 {
        Ok(alpha)
    } else {
        Err(config_err(format!("alpha must be at least 1, got {alpha}")))
    }
}

fn default_workers() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

/// Unit for human-readable summaries. CSV files always carry explicit
/// nats (and, where applicable, bits) columns regardless of this setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Unit {
    Nats,
    Bits,
}

impl Unit {
    pub fn convert(self, nats: f64) -> f64 {
        match self {
            Unit::Nats => nats,
            Unit::Bits => crate::logmath::nats_to_bits(nats),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Unit::Nats => "nats",
            Unit::Bits => "bits",
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Unit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nats" => Ok(Unit::Nats),
            "bits" => Ok(Unit::Bits),
            other => Err(config_err(format!(
                "unit must be 'nats' or 'bits', got '{other}'"
            ))),
        }
    }
}

/// Parameter grid description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GridSpec {
    /// Evenly stepped binary grid from `lo` to `hi` inclusive.
    BinaryRange { lo: f64, hi: f64, step: f64 },
    /// Explicit binary success probabilities.
    BinaryList { thetas: Vec<f64> },
    /// Explicit probability vectors for a general finite alphabet.
    Points { points: Vec<Vec<f64>> },
}

impl GridSpec {
    /// The default sweep grid: `[δ, 1−δ]` with the given step.
    pub fn sweep(delta: f64, step: f64) -> GridSpec {
        GridSpec::BinaryRange {
            lo: delta,
            hi: 1.0 - delta,
            step,
        }
    }

    pub fn build(&self) -> Result<Arc<ParamGrid>> {
        let grid = match self {
            GridSpec::BinaryRange { lo, hi, step } => {
                if !(*step > 0.0) {
                    return Err(config_err(format!(
                        "grid step must be positive, got {step}"
                    )));
                }
                if !(lo <= hi) {
                    return Err(config_err(format!(
                        "grid range needs lo <= hi, got lo={lo}, hi={hi}"
                    )));
                }
                let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
                let thetas: Vec<f64> = (0..count)
                    .map(|i| (lo + i as f64 * step).min(*hi))
                    .collect();
                ParamGrid::binary(&thetas)?
            }
            GridSpec::BinaryList { thetas } => ParamGrid::binary(thetas)?,
            GridSpec::Points { points } => {
                let arity = points
                    .first()
                    .map(Vec::len)
                    .ok_or_else(|| config_err("points grid must not be empty"))?;
                ParamGrid::new(arity, points.clone())?
            }
        };
        Ok(Arc::new(grid))
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridSpec::BinaryRange { lo, hi, step } => {
                write!(f, "binary-range(lo={lo}, hi={hi}, step={step})")
            }
            GridSpec::BinaryList { thetas } => write!(f, "binary-list({thetas:?})"),
            GridSpec::Points { points } => {
                write!(f, "points({} x {})", points.len(), points.first().map_or(0, Vec::len))
            }
        }
    }
}

/// Prior description. `uniform` and `weights` refer to the run's parameter
/// grid; `dirichlet` carries its own quadrature grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PriorSpec {
    Uniform,
    Dirichlet {
        beta: f64,
        #[serde(default = "default_quadrature_size")]
        grid_size: usize,
    },
    Weights { weights: Vec<f64> },
}

fn default_quadrature_size() -> usize {
    DEFAULT_QUADRATURE_SIZE
}

impl PriorSpec {
    pub fn build(&self, grid: Option<&Arc<ParamGrid>>) -> Result<Prior> {
        match self {
            PriorSpec::Uniform => {
                let grid = grid.ok_or_else(|| {
                    config_err("prior kind 'uniform' needs a parameter grid in this context")
                })?;
                Ok(Prior::uniform(Arc::clone(grid)))
            }
            PriorSpec::Dirichlet { beta, grid_size } => dirichlet_quadrature(*beta, *grid_size),
            PriorSpec::Weights { weights } => {
                let grid = grid.ok_or_else(|| {
                    config_err("prior kind 'weights' needs a parameter grid in this context")
                })?;
                Prior::normalized(Arc::clone(grid), weights.clone())
            }
        }
    }
}

impl fmt::Display for PriorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PriorSpec::Uniform => f.write_str("uniform"),
            PriorSpec::Dirichlet { beta, grid_size } => {
                write!(f, "dirichlet(beta={beta}, grid_size={grid_size})")
            }
            PriorSpec::Weights { weights } => write!(f, "weights({weights:?})"),
        }
    }
}

/// Predictor description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PredictorSpec {
    Mixture { prior: PriorSpec },
    AddBeta { beta: f64 },
    AlphaNml { prior: PriorSpec, alpha: f64 },
}

impl PredictorSpec {
    pub fn build(&self, grid: Option<&Arc<ParamGrid>>, setup: BatchSetup) -> Result<Predictor> {
        match self {
            PredictorSpec::Mixture { prior } => Predictor::mixture(prior.build(grid)?, setup),
            PredictorSpec::AddBeta { beta } => Predictor::add_beta(*beta, setup),
            PredictorSpec::AlphaNml { prior, alpha } => {
                Predictor::alpha_nml(prior.build(grid)?, *alpha, setup)
            }
        }
    }
}

impl fmt::Display for PredictorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PredictorSpec::Mixture { prior } => write!(f, "mixture(prior={prior})"),
            PredictorSpec::AddBeta { beta } => write!(f, "add-beta(beta={beta})"),
            PredictorSpec::AlphaNml { prior, alpha } => {
                write!(f, "alpha-nml(alpha={alpha}, prior={prior})")
            }
        }
    }
}

/// Unresolved configuration: the union of every command's keys, all
/// optional. Commands pick what they need and reject what is missing.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RawConfig {
    pub n: Option<usize>,
    pub ell: Option<usize>,
    pub n_list: Option<Vec<usize>>,
    pub gamma: Option<f64>,
    pub alpha: Option<f64>,
    pub alphas: Option<Vec<f64>>,
    pub beta: Option<f64>,
    pub delta: Option<f64>,
    pub theta: Option<f64>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub saddle_tol: Option<f64>,
    pub sweep_step: Option<f64>,
    pub quadrature_size: Option<usize>,
    pub unit: Option<Unit>,
    pub workers: Option<usize>,
    pub output: Option<PathBuf>,
    pub grid: Option<GridSpec>,
    pub predictor: Option<PredictorSpec>,
}

impl RawConfig {
    /// Parses a TOML config file; parse errors keep the file's line/column
    /// information.
    pub fn from_file(path: &std::path::Path) -> Result<RawConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read config '{}': {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| config_err(format!("{}: {e}", path.display())))
    }

    /// Field-wise merge: any key set in `overrides` wins.
    pub fn merged(file: RawConfig, overrides: RawConfig) -> RawConfig {
        RawConfig {
            n: overrides.n.or(file.n),
            ell: overrides.ell.or(file.ell),
            n_list: overrides.n_list.or(file.n_list),
            gamma: overrides.gamma.or(file.gamma),
            alpha: overrides.alpha.or(file.alpha),
            alphas: overrides.alphas.or(file.alphas),
            beta: overrides.beta.or(file.beta),
            delta: overrides.delta.or(file.delta),
            theta: overrides.theta.or(file.theta),
            tol: overrides.tol.or(file.tol),
            max_iter: overrides.max_iter.or(file.max_iter),
            saddle_tol: overrides.saddle_tol.or(file.saddle_tol),
            sweep_step: overrides.sweep_step.or(file.sweep_step),
            quadrature_size: overrides.quadrature_size.or(file.quadrature_size),
            unit: overrides.unit.or(file.unit),
            workers: overrides.workers.or(file.workers),
            output: overrides.output.or(file.output),
            grid: overrides.grid.or(file.grid),
            predictor: overrides.predictor.or(file.predictor),
        }
    }

    fn setup(&self) -> Result<BatchSetup> {
        let n = require(self.n, "n")?;
        let ell = require(self.ell, "ell")?;
        BatchSetup::binary(n, ell)
    }

    fn workers(&self) -> Result<usize> {
        let workers = self.workers.unwrap_or_else(default_workers);
        if workers == 0 {
            return Err(config_err("workers must be at least 1"));
        }
        Ok(workers)
    }

    pub fn resolve_regret(&self) -> Result<RegretConfig> {
        let setup = self.setup()?;
        let delta = check_delta(self.delta.unwrap_or(DEFAULT_DELTA))?;
        let sweep_step = check_positive(self.sweep_step.unwrap_or(DEFAULT_SWEEP_STEP), "sweep_step")?;
        let grid_spec = self
            .grid
            .clone()
            .unwrap_or_else(|| GridSpec::sweep(delta, sweep_step));
        let predictor = self.predictor.clone().unwrap_or(PredictorSpec::AddBeta {
            beta: self.beta.unwrap_or(DEFAULT_BETA),
        });
        Ok(RegretConfig {
            setup,
            grid: grid_spec.build()?,
            grid_spec,
            predictor,
            alpha: check_alpha(self.alpha.unwrap_or(1.0))?,
            unit: self.unit.unwrap_or(Unit::Nats),
            workers: self.workers()?,
            output: self.output.clone(),
        })
    }

    pub fn resolve_capacity(&self) -> Result<CapacityConfig> {
        let setup = self.setup()?;
        let grid_spec = require(self.grid.clone(), "grid")?;
        let max_iter = self.max_iter.unwrap_or(DEFAULT_MAX_ITER);
        if max_iter < 1 {
            return Err(config_err("max_iter must be at least 1"));
        }
        Ok(CapacityConfig {
            setup,
            grid: grid_spec.build()?,
            grid_spec,
            alpha: check_alpha(self.alpha.unwrap_or(1.0))?,
            tol: check_positive(self.tol.unwrap_or(DEFAULT_TOL), "tol")?,
            max_iter,
            saddle_tol: check_positive(self.saddle_tol.unwrap_or(DEFAULT_SADDLE_TOL), "saddle_tol")?,
            unit: self.unit.unwrap_or(Unit::Nats),
            workers: self.workers()?,
            output: self.output.clone(),
        })
    }

    pub fn resolve_lowerbound(&self) -> Result<LowerBoundConfig> {
        let n_list = self.n_list.clone().unwrap_or_else(|| DEFAULT_N_LIST.to_vec());
        if n_list.is_empty() {
            return Err(config_err("n_list must not be empty"));
        }
        let gamma = check_positive(self.gamma.unwrap_or(DEFAULT_GAMMA), "gamma")?;
        for &n in &n_list {
            if n < 1 {
                return Err(config_err("every n in n_list must be at least 1"));
            }
            let ell = ell_for(n, gamma);
            if n * ell < 2 {
                return Err(config_err(format!(
                    "n={n} with gamma={gamma} gives n*ell={} < 2; the residual \
                     normalization ln(n*ell) degenerates",
                    n * ell
                )));
            }
        }
        Ok(LowerBoundConfig {
            n_list,
            gamma,
            delta: check_delta(self.delta.unwrap_or(DEFAULT_DELTA))?,
            sweep_step: check_positive(self.sweep_step.unwrap_or(DEFAULT_SWEEP_STEP), "sweep_step")?,
            quadrature_size: self.quadrature_size.unwrap_or(DEFAULT_QUADRATURE_SIZE),
            unit: self.unit.unwrap_or(Unit::Nats),
            workers: self.workers()?,
            output: self.output.clone(),
        })
    }

    pub fn resolve_limits(&self) -> Result<LimitsConfig> {
        let setup = self.setup()?;
        let theta = self.theta.unwrap_or(DEFAULT_THETA);
        if !(theta > 0.0 && theta < 1.0) {
            return Err(config_err(format!(
                "theta must lie strictly inside (0, 1), got {theta}"
            )));
        }
        let alphas = self
            .alphas
            .clone()
            .unwrap_or_else(|| DEFAULT_ALPHA_LADDER.to_vec());
        if alphas.is_empty() {
            return Err(config_err("alphas must not be empty"));
        }
        for &a in &alphas {
            check_alpha(a)?;
        }
        let predictor = self.predictor.clone().unwrap_or(PredictorSpec::AddBeta {
            beta: self.beta.unwrap_or(DEFAULT_BETA),
        });
        Ok(LimitsConfig {
            setup,
            predictor,
            theta,
            alphas,
            unit: self.unit.unwrap_or(Unit::Nats),
            workers: self.workers()?,
            output: self.output.clone(),
        })
    }

    pub fn resolve_oracle_check(&self) -> Result<OracleCheckConfig> {
        Ok(OracleCheckConfig {
            workers: self.workers()?,
            output: self.output.clone(),
        })
    }
}

/// ℓ = round(n^γ), floored at 1.
pub fn ell_for(n: usize, gamma: f64) -> usize {
    (n as f64).powf(gamma).round().max(1.0) as usize
}

/// Resolved config for the maximal-regret sweep.
#[derive(Debug, Clone)]
pub struct RegretConfig {
    pub setup: BatchSetup,
    pub grid: Arc<ParamGrid>,
    pub grid_spec: GridSpec,
    pub predictor: PredictorSpec,
    pub alpha: f64,
    pub unit: Unit,
    pub workers: usize,
    pub output: Option<PathBuf>,
}

impl RegretConfig {
    pub fn echo_lines(&self) -> Vec<String> {
        vec![
            "command = regret".into(),
            format!("n = {}", self.setup.n()),
            format!("ell = {}", self.setup.ell()),
            format!("alpha = {}", self.alpha),
            format!("predictor = {}", self.predictor),
            format!("grid = {} [{} points]", self.grid_spec, self.grid.len()),
            format!("unit = {}", self.unit),
        ]
    }
}

/// Resolved config for the capacity solver.
#[derive(Debug, Clone)]
pub struct CapacityConfig {
    pub setup: BatchSetup,
    pub grid: Arc<ParamGrid>,
    pub grid_spec: GridSpec,
    pub alpha: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub saddle_tol: f64,
    pub unit: Unit,
    pub workers: usize,
    pub output: Option<PathBuf>,
}

impl CapacityConfig {
    pub fn echo_map(&self) -> Vec<(String, serde_json::Value)> {
        vec![
            ("command".into(), "capacity".into()),
            ("n".into(), self.setup.n().into()),
            ("ell".into(), self.setup.ell().into()),
            ("alpha".into(), self.alpha.into()),
            ("grid".into(), format!("{} [{} points]", self.grid_spec, self.grid.len()).into()),
            ("tol".into(), self.tol.into()),
            ("max_iter".into(), self.max_iter.into()),
            ("saddle_tol".into(), self.saddle_tol.into()),
            ("unit".into(), self.unit.label().into()),
        ]
    }
}

/// Resolved config for the minimax bracketing sweep.
#[derive(Debug, Clone)]
pub struct LowerBoundConfig {
    pub n_list: Vec<usize>,
    pub gamma: f64,
    pub delta: f64,
    pub sweep_step: f64,
    pub quadrature_size: usize,
    pub unit: Unit,
    pub workers: usize,
    pub output: Option<PathBuf>,
}

impl LowerBoundConfig {
    pub fn echo_lines(&self) -> Vec<String> {
        vec![
            "command = lowerbound".into(),
            format!("n_list = {:?}", self.n_list),
            format!("gamma = {}", self.gamma),
            format!("delta = {}", self.delta),
            format!("sweep_step = {}", self.sweep_step),
            format!("quadrature_size = {}", self.quadrature_size),
            format!("unit = {}", self.unit),
        ]
    }
}

/// Resolved config for the α-limit table.
#[derive(Debug, Clone)]
pub struct LimitsConfig {
    pub setup: BatchSetup,
    pub predictor: PredictorSpec,
    pub theta: f64,
    pub alphas: Vec<f64>,
    pub unit: Unit,
    pub workers: usize,
    pub output: Option<PathBuf>,
}

impl LimitsConfig {
    pub fn echo_lines(&self) -> Vec<String> {
        vec![
            "command = limits".into(),
            format!("n = {}", self.setup.n()),
            format!("ell = {}", self.setup.ell()),
            format!("theta = {}", self.theta),
            format!("predictor = {}", self.predictor),
            format!("alphas = {:?}", self.alphas),
            format!("unit = {}", self.unit),
        ]
    }
}

/// Resolved config for the oracle agreement suite.
#[derive(Debug, Clone)]
pub struct OracleCheckConfig {
    pub workers: usize,
    pub output: Option<PathBuf>,
}
