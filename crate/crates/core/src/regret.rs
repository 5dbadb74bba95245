//! Exact batch-regret evaluation: average, Rényi-order α, and worst-case.
//!
//! The batch regret of a predictor `p̂` against a source θ is the expected
//! excess log-loss on a fresh test batch,
//!
//! ```text
//! R(p̂, θ) = Σ_x p_θ(x) Σ_y p_θ(y) · [ ln p_θ(y) − ln p̂(y | x) ],
//! ```
//!
//! its order-α generalization replaces the expectation over `y` by a Rényi
//! divergence,
//!
//! ```text
//! R_α(p̂, θ) = 1/(α−1) · ln Σ_x p_θ(x) Σ_y p_θ(y) (p_θ(y)/p̂(y|x))^{α−1},
//! ```
//!
//! and the α → ∞ endpoint is the worst-case log-ratio over training/test
//! pairs with positive source mass. All sums run over count classes with
//! multinomial weights — `O((nℓ+1)·(ℓ+1))` terms for binary alphabets — which
//! is exactly the collapsed form of the sequence sums above for exchangeable
//! predictors.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::logmath::{log_sum_exp, nats_to_bits, ALPHA_KL_THRESHOLD};
use crate::predictors::Predictor;
use crate::source::{count_weight, log_likelihood, BatchSetup, ParamGrid};
use crate::{Error, Result};

/// Round-off negatives above this magnitude are reported as exactly zero;
/// anything more negative is left visible as a bug signal.
pub const REGRET_CLAMP: f64 = 1e-9;

/// Precomputed per-test-class data for one θ: log class weight and
/// per-sequence log-likelihood.
fn test_class_weights(pred: &Predictor, theta: &[f64]) -> Vec<(f64, f64)> {
    pred.test_classes()
        .iter()
        .map(|cy| (count_weight(theta, cy), log_likelihood(theta, cy)))
        .collect()
}

/// Average batch regret `R(p̂, θ)` in nats.
///
/// Count classes with zero `p_θ` mass are skipped (the `0 · ln 0 = 0`
/// convention); a predictor that assigns zero mass to a test class the
/// source can produce yields `+∞`, a legitimate value rather than an error.
pub fn batch_regret(pred: &Predictor, theta: &[f64]) -> f64 {
    let by_test = test_class_weights(pred, theta);
    let mut total = 0.0;
    for (ti, ct) in pred.train_classes().iter().enumerate() {
        let lw_t = count_weight(theta, ct);
        if lw_t == f64::NEG_INFINITY {
            continue;
        }
        let mut inner = 0.0;
        for (yi, &(lw_y, lp_true)) in by_test.iter().enumerate() {
            if lw_y == f64::NEG_INFINITY {
                continue;
            }
            let lp_hat = pred.log_prob_by_index(ti, yi);
            if lp_hat == f64::NEG_INFINITY {
                return f64::INFINITY;
            }
            inner += lw_y.exp() * (lp_true - lp_hat);
        }
        total += lw_t.exp() * inner;
    }
    total
}

/// Batch α-regret `R_α(p̂, θ)` in nats.
///
/// Orders within `1e-6` of 1 dispatch to [`batch_regret`] (the exact α → 1
/// limit — so the α = 1 column of a sweep is bit-identical to the average
/// regret); orders below 1 are rejected. The whole double sum is one
/// log-sum-exp over `ln w(x-class) + ln w(y-class) + (α−1)(ln p_θ − ln p̂)`.
pub fn alpha_batch_regret(pred: &Predictor, theta: &[f64], alpha: f64) -> Result<f64> {
    if !(alpha >= 1.0) {
        return Err(Error::Domain(format!(
            "regret order alpha = {alpha} must be >= 1"
        )));
    }
    if alpha < 1.0 + ALPHA_KL_THRESHOLD {
        return Ok(batch_regret(pred, theta));
    }
    let by_test = test_class_weights(pred, theta);
    let mut terms =
        Vec::with_capacity(pred.train_classes().len() * pred.test_classes().len());
    for (ti, ct) in pred.train_classes().iter().enumerate() {
        let lw_t = count_weight(theta, ct);
        if lw_t == f64::NEG_INFINITY {
            continue;
        }
        for (yi, &(lw_y, lp_true)) in by_test.iter().enumerate() {
            if lw_y == f64::NEG_INFINITY {
                continue;
            }
            let lp_hat = pred.log_prob_by_index(ti, yi);
            if lp_hat == f64::NEG_INFINITY {
                return Ok(f64::INFINITY);
            }
            terms.push(lw_t + lw_y + (alpha - 1.0) * (lp_true - lp_hat));
        }
    }
    Ok(log_sum_exp(&terms) / (alpha - 1.0))
}

/// Worst-case batch regret: the maximum of `ln p_θ(y) − ln p̂(y|x)` over all
/// training and test classes with positive `p_θ` mass — the α → ∞ limit of
/// [`alpha_batch_regret`].
pub fn worst_case_regret(pred: &Predictor, theta: &[f64]) -> f64 {
    let by_test = test_class_weights(pred, theta);
    let mut worst = f64::NEG_INFINITY;
    for (ti, ct) in pred.train_classes().iter().enumerate() {
        if count_weight(theta, ct) == f64::NEG_INFINITY {
            continue;
        }
        for (yi, &(lw_y, lp_true)) in by_test.iter().enumerate() {
            if lw_y == f64::NEG_INFINITY {
                continue;
            }
            let lp_hat = pred.log_prob_by_index(ti, yi);
            if lp_hat == f64::NEG_INFINITY {
                return f64::INFINITY;
            }
            worst = worst.max(lp_true - lp_hat);
        }
    }
    worst
}

/// Per-grid-point regret sweep with max/argmax bookkeeping.
///
/// `values` carries the reported (round-off-clamped) regrets; `raw_values`
/// keeps the unclamped numbers for debugging. Ties in the maximum resolve to
/// the lowest grid index.
#[derive(Debug, Clone)]
pub struct RegretReport {
    pub setup: BatchSetup,
    pub alpha: f64,
    pub theta_reprs: Vec<String>,
    pub values: Vec<f64>,
    pub raw_values: Vec<f64>,
    pub max_value: f64,
    pub argmax_index: usize,
}

pub(crate) fn clamp_regret(raw: f64) -> f64 {
    if raw < 0.0 && raw >= -REGRET_CLAMP {
        0.0
    } else {
        raw
    }
}

/// Evaluates `alpha_batch_regret` (plain [`batch_regret`] at α = 1) for every
/// grid point in parallel and assembles a [`RegretReport`].
///
/// The reduction order is the fixed grid order, so the report is
/// bit-identical no matter how many worker threads run the sweep.
pub fn max_regret(pred: &Predictor, grid: &ParamGrid, alpha: f64) -> Result<RegretReport> {
    if !(alpha >= 1.0) {
        return Err(Error::Domain(format!(
            "regret order alpha = {alpha} must be >= 1"
        )));
    }
    if grid.alphabet_size() != pred.setup().alphabet_size() {
        return Err(Error::Domain(format!(
            "grid alphabet size {} does not match predictor setup {}",
            grid.alphabet_size(),
            pred.setup().alphabet_size()
        )));
    }
    let raw_values: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|j| {
            if alpha < 1.0 + ALPHA_KL_THRESHOLD {
                batch_regret(pred, grid.point(j))
            } else {
                // alpha is validated above; per-point evaluation cannot fail.
                alpha_batch_regret(pred, grid.point(j), alpha).expect("alpha validated")
            }
        })
        .collect();
    let values: Vec<f64> = raw_values.iter().map(|&r| clamp_regret(r)).collect();
    let (mut max_value, mut argmax_index) = (f64::NEG_INFINITY, 0);
    for (j, &v) in values.iter().enumerate() {
        if v > max_value {
            max_value = v;
            argmax_index = j;
        }
    }
    Ok(RegretReport {
        setup: pred.setup(),
        alpha,
        theta_reprs: (0..grid.len()).map(|j| grid.theta_repr(j)).collect(),
        values,
        raw_values,
        max_value,
        argmax_index,
    })
}

impl RegretReport {
    /// Writes the report as CSV: `#`-prefixed comment lines first, then a
    /// header row, then one row per grid point. Floats carry 17 significant
    /// digits so round-trips are lossless.
    pub fn write_csv(&self, out: &mut dyn Write, comments: &[String]) -> io::Result<()> {
        for line in comments {
            writeln!(out, "# {line}")?;
        }
        writeln!(out, "theta_index,theta_repr,alpha,n,ell,regret_nats,regret_bits")?;
        for (j, repr) in self.theta_reprs.iter().enumerate() {
            let nats = self.values[j];
            writeln!(
                out,
                "{j},{repr},{:.16e},{},{},{:.16e},{:.16e}",
                self.alpha,
                self.setup.n(),
                self.setup.ell(),
                nats,
                nats_to_bits(nats)
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logmath::renyi_divergence;
    use crate::prior::Prior;
    use approx::assert_abs_diff_eq;
    use std::sync::Arc;

    fn point_mixture(theta: f64, setup: BatchSetup) -> Predictor {
        let grid = Arc::new(ParamGrid::binary(&[theta]).unwrap());
        Predictor::mixture(Prior::uniform(grid), setup).unwrap()
    }

    #[test]
    fn truthful_predictor_has_zero_regret() {
        let setup = BatchSetup::binary(2, 3).unwrap();
        let pred = point_mixture(0.62, setup);
        let theta = [1.0 - 0.62, 0.62];
        assert_abs_diff_eq!(batch_regret(&pred, &theta), 0.0, epsilon = 1e-12);
        for &alpha in &[1.0, 2.0, 8.0] {
            assert_abs_diff_eq!(
                alpha_batch_regret(&pred, &theta, alpha).unwrap(),
                0.0,
                epsilon = 1e-12
            );
        }
        assert_abs_diff_eq!(worst_case_regret(&pred, &theta), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn no_training_reduces_to_divergences_of_the_marginal() {
        // With n = 0 and ℓ = 1 the mixture predicts the prior marginal, so
        // batch regret is a plain KL and α-regret a plain Rényi divergence.
        let setup = BatchSetup::binary(0, 1).unwrap();
        let grid = Arc::new(ParamGrid::binary(&[0.3, 0.7]).unwrap());
        let pred = Predictor::mixture(Prior::uniform(grid), setup).unwrap();
        let theta = [0.3, 0.7];
        let marginal = [0.5, 0.5];
        assert_abs_diff_eq!(
            batch_regret(&pred, &theta),
            crate::logmath::kl_divergence(&theta, &marginal).unwrap(),
            epsilon = 1e-14
        );
        for &alpha in &[2.0, 4.0, 32.0] {
            assert_abs_diff_eq!(
                alpha_batch_regret(&pred, &theta, alpha).unwrap(),
                renyi_divergence(&theta, &marginal, alpha).unwrap(),
                epsilon = 1e-12
            );
        }
        // Worst case: max(ln(0.7/0.5), ln(0.3/0.5)) = ln 1.4.
        assert_abs_diff_eq!(
            worst_case_regret(&pred, &theta),
            1.4f64.ln(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn alpha_one_is_the_same_code_path() {
        let setup = BatchSetup::binary(1, 2).unwrap();
        let pred = Predictor::add_beta(0.5, setup).unwrap();
        let theta = [0.2, 0.8];
        let avg = batch_regret(&pred, &theta);
        let a1 = alpha_batch_regret(&pred, &theta, 1.0).unwrap();
        assert_eq!(avg.to_bits(), a1.to_bits());
        assert!(alpha_batch_regret(&pred, &theta, 0.9).is_err());
    }

    #[test]
    fn deterministic_theta_outside_prior_support_gives_infinite_regret() {
        // Prior on interior points, source θ = 1: the all-ones test class
        // has positive source mass and positive predictor mass, so regret is
        // finite; but a predictor over deterministic sources evaluated at an
        // unreachable class is +∞.
        let setup = BatchSetup::binary(1, 1).unwrap();
        let grid = Arc::new(ParamGrid::binary(&[0.0, 1.0]).unwrap());
        let pred = Predictor::mixture(Prior::uniform(grid), setup).unwrap();
        // θ = 0.5 reaches the mixed training class (1,1), where the
        // deterministic mixture is undefined (-inf row) → infinite regret.
        assert_eq!(batch_regret(&pred, &[0.5, 0.5]), f64::INFINITY);
        assert_eq!(
            alpha_batch_regret(&pred, &[0.5, 0.5], 2.0).unwrap(),
            f64::INFINITY
        );
        assert_eq!(worst_case_regret(&pred, &[0.5, 0.5]), f64::INFINITY);
    }

    #[test]
    fn sandwich_and_monotonicity_in_alpha() {
        let setup = BatchSetup::binary(2, 2).unwrap();
        let pred = Predictor::add_beta(0.5, setup).unwrap();
        let theta = [0.25, 0.75];
        let avg = batch_regret(&pred, &theta);
        let worst = worst_case_regret(&pred, &theta);
        let mut prev = avg;
        for &alpha in &[1.5, 2.0, 4.0, 8.0, 32.0, 256.0] {
            let r = alpha_batch_regret(&pred, &theta, alpha).unwrap();
            assert!(r >= prev - 1e-12, "monotone in alpha");
            assert!(r >= avg - 1e-12 && r <= worst + 1e-12, "sandwich");
            prev = r;
        }
    }

    #[test]
    fn max_regret_report_shape_ties_and_clamp() {
        let setup = BatchSetup::binary(1, 1).unwrap();
        let pred = Predictor::add_beta(0.5, setup).unwrap();
        // Symmetric grid + symmetric predictor: exact tie, lowest index
        // wins. The grid points are dyadic so their complements are exact
        // and the two evaluations are bitwise mirror images.
        let grid = ParamGrid::binary(&[0.25, 0.75]).unwrap();
        let report = max_regret(&pred, &grid, 1.0).unwrap();
        assert_eq!(report.values.len(), 2);
        assert_abs_diff_eq!(report.values[0], report.values[1], epsilon = 1e-14);
        assert_eq!(report.argmax_index, 0);
        assert_eq!(report.max_value, report.values[0]);
        // Clamping: tiny round-off negatives become exact zeros, anything
        // larger is left alone to signal a bug.
        assert_eq!(clamp_regret(-1e-12), 0.0);
        assert_eq!(clamp_regret(-1e-7), -1e-7);
        assert_eq!(clamp_regret(0.25), 0.25);
    }

    #[test]
    fn csv_round_trip_preserves_values() {
        let setup = BatchSetup::binary(2, 1).unwrap();
        let pred = Predictor::add_beta(0.5, setup).unwrap();
        let grid = ParamGrid::binary(&[0.1, 0.5, 0.9]).unwrap();
        let report = max_regret(&pred, &grid, 2.0).unwrap();
        let mut buf = Vec::new();
        report
            .write_csv(&mut buf, &["demo run".to_string()])
            .unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "# demo run");
        assert_eq!(
            lines.next().unwrap(),
            "theta_index,theta_repr,alpha,n,ell,regret_nats,regret_bits"
        );
        for (j, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields.len(), 7);
            assert_eq!(fields[0], j.to_string());
            // 17-significant-digit floats parse back to the exact values.
            let nats: f64 = fields[5].parse().unwrap();
            assert_eq!(nats, report.values[j]);
        }
    }
}
