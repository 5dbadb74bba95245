//! Priors over a parameter grid and their posteriors given training counts.

use std::sync::Arc;

use crate::logmath::log_sum_exp;
use crate::source::{log_likelihood, CountStat, ParamGrid};
use crate::{Error, Result};

/// Normalization tolerance for prior weights.
const WEIGHT_SUM_TOL: f64 = 1e-12;

/// A probability distribution over the points of a [`ParamGrid`].
///
/// Weights are non-negative and sum to 1 within `1e-12`. The grid is shared
/// behind an `Arc`, so priors are cheap to clone and solvers can produce many
/// reweightings of one grid without copying it.
#[derive(Debug, Clone)]
pub struct Prior {
    grid: Arc<ParamGrid>,
    weights: Vec<f64>,
}

impl Prior {
    /// Wraps pre-normalized weights, validating them.
    pub fn new(grid: Arc<ParamGrid>, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != grid.len() {
            return Err(Error::Domain(format!(
                "prior has {} weights for a grid of {} points",
                weights.len(),
                grid.len()
            )));
        }
        if weights.iter().any(|&w| !(w >= 0.0)) {
            return Err(Error::Domain("prior weights must be non-negative".into()));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::Domain(format!(
                "prior weights sum to {sum}, not 1"
            )));
        }
        Ok(Self { grid, weights })
    }

    /// Normalizes raw non-negative masses into a prior.
    pub fn normalized(grid: Arc<ParamGrid>, raw: Vec<f64>) -> Result<Self> {
        if raw.len() != grid.len() {
            return Err(Error::Domain(format!(
                "prior has {} weights for a grid of {} points",
                raw.len(),
                grid.len()
            )));
        }
        if raw.iter().any(|&w| !(w >= 0.0) || w.is_infinite()) {
            return Err(Error::Domain(
                "prior masses must be finite and non-negative".into(),
            ));
        }
        let sum: f64 = raw.iter().sum();
        if sum <= 0.0 {
            return Err(Error::Domain("prior masses sum to zero".into()));
        }
        let weights = raw.into_iter().map(|w| w / sum).collect();
        Ok(Self { grid, weights })
    }

    /// The uniform prior on the grid.
    pub fn uniform(grid: Arc<ParamGrid>) -> Self {
        let g = grid.len();
        Self {
            weights: vec![1.0 / g as f64; g],
            grid,
        }
    }

    /// All mass on a single grid point.
    pub fn point_mass(grid: Arc<ParamGrid>, index: usize) -> Result<Self> {
        if index >= grid.len() {
            return Err(Error::Domain(format!(
                "point mass index {index} outside grid of {} points",
                grid.len()
            )));
        }
        let mut weights = vec![0.0; grid.len()];
        weights[index] = 1.0;
        Ok(Self { grid, weights })
    }

    pub fn grid(&self) -> &Arc<ParamGrid> {
        &self.grid
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Normalized log-posterior weights given training counts, computed fully
    /// in log domain: `ln w(θⱼ | x) = ln wⱼ + ln p_θⱼ(x) − ln Σ_k (…)`.
    ///
    /// Zero-weight points stay at `-∞`. Errors with
    /// [`Error::DegenerateEvidence`] when every grid point assigns zero
    /// likelihood to the counts, since no posterior exists then.
    pub fn log_posterior(&self, training: &CountStat) -> Result<Vec<f64>> {
        let joint: Vec<f64> = self
            .weights
            .iter()
            .enumerate()
            .map(|(j, &w)| {
                if w == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    w.ln() + log_likelihood(self.grid.point(j), training)
                }
            })
            .collect();
        let evidence = log_sum_exp(&joint);
        if evidence == f64::NEG_INFINITY {
            return Err(Error::DegenerateEvidence);
        }
        Ok(joint.into_iter().map(|lj| lj - evidence).collect())
    }

    /// Posterior distribution given training counts; exponentiates
    /// [`Prior::log_posterior`] once, at the end.
    pub fn posterior(&self, training: &CountStat) -> Result<Prior> {
        let log_post = self.log_posterior(training)?;
        let mut weights: Vec<f64> = log_post.into_iter().map(f64::exp).collect();
        // Already normalized up to round-off; pin the sum to exactly 1.
        let sum: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= sum;
        }
        Ok(Self {
            grid: Arc::clone(&self.grid),
            weights,
        })
    }
}
