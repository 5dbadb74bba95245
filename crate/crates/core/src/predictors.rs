//! Conditional batch predictors: Bayes mixtures, add-β smoothing, and α-NML.
//!
//! A predictor assigns a probability `p̂(yˡ | xⁿˡ)` to each test batch given
//! the training data. Every family here depends on its inputs only through
//! the count statistics, so predictor values live on (training class × test
//! class) tables. [`Predictor`] materializes that full table eagerly at
//! construction — afterwards the value is immutable, lookups are pure, and
//! a predictor can be shared freely across threads during parallel regret
//! sweeps. (The alternative, a lazily filled concurrent memo cache, buys
//! nothing at these table sizes and costs synchronization.)
//!
//! The free functions [`mixture_predict`], [`add_beta_predict`] and
//! [`alpha_nml_predict`] compute single entries from scratch — convenient
//! for spot checks, wasteful inside sweeps.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::logmath::{log_multinomial, log_sum_exp, ALPHA_KL_THRESHOLD};
use crate::prior::Prior;
use crate::source::{enumerate_counts, log_likelihood, BatchSetup, CountStat};
use crate::{Error, Result};

/// The add-β range with classical guarantees: β = 1/2 is the
/// Krichevsky–Trofimov rule, β = 1 is Laplace smoothing.
const ADD_BETA_STANDARD_RANGE: (f64, f64) = (0.5, 1.0);

/// Log-probability that the Bayes mixture over `prior` assigns to one test
/// sequence with counts `test`, after conditioning on `training`:
/// `ln Σⱼ w(θⱼ | training) · p_θⱼ(test)`.
///
/// Propagates [`Error::DegenerateEvidence`] when the training counts are
/// impossible under every grid point.
pub fn mixture_predict(prior: &Prior, training: &CountStat, test: &CountStat) -> Result<f64> {
    let log_post = prior.log_posterior(training)?;
    let terms: Vec<f64> = log_post
        .iter()
        .enumerate()
        .map(|(j, &lp)| lp + log_likelihood(prior.grid().point(j), test))
        .collect();
    Ok(log_sum_exp(&terms))
}

/// Log-probability of one test sequence with counts `test` under the add-β
/// rule conditioned on binary `training` counts.
///
/// Sequentially the rule predicts `(t₁ + k₁ + β) / (t + k + 2β)` for a one
/// after `t = t₀ + t₁` training samples and `k = k₀ + k₁` test samples
/// already seen; the product over a test sequence telescopes to a function
/// of the test counts alone. It is evaluated here in that canonical count
/// form, so sequences with equal counts get **bit-identical** values no
/// matter their symbol order. For β = 1/2 this is the conditional
/// Krichevsky–Trofimov predictor and coincides with the Beta(β, β) Bayes
/// mixture.
///
/// β must be positive; values outside [1/2, 1] are accepted for exploratory
/// sweeps but carry no optimality guarantees (see [`Predictor::notes`]).
pub fn add_beta_predict(beta: f64, training: &CountStat, test: &CountStat) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::Domain(format!(
            "add-beta smoothing beta = {beta} must be > 0"
        )));
    }
    if training.alphabet_size() != 2 || test.alphabet_size() != 2 {
        return Err(Error::UnsupportedClass(
            "add-beta prediction is defined for binary alphabets only".into(),
        ));
    }
    let t0 = training.counts()[0] as f64;
    let t1 = training.counts()[1] as f64;
    let t = training.total() as f64;
    let mut lp = 0.0;
    // Numerator factors for the ones, then the zeros, then all denominators:
    // a fixed order keeps equal-count sequences bit-identical.
    for j in 0..test.counts()[1] {
        lp += (t1 + beta + j as f64).ln();
    }
    for j in 0..test.counts()[0] {
        lp += (t0 + beta + j as f64).ln();
    }
    for i in 0..test.total() {
        lp -= (t + 2.0 * beta + i as f64).ln();
    }
    Ok(lp)
}

/// Log-probability of one test sequence with counts `test` under the
/// conditional α-NML predictor:
/// `p̂_α(y | x) ∝ ( Σⱼ w(θⱼ | x) · p_θⱼ(y)^α )^{1/α}`,
/// normalized over all test sequences of the same length.
///
/// Orders within `1e-6` of 1 use the α → 1 limit, which is exactly the Bayes
/// mixture. Orders below 1 are rejected.
pub fn alpha_nml_predict(
    prior: &Prior,
    alpha: f64,
    training: &CountStat,
    test: &CountStat,
) -> Result<f64> {
    if !(alpha >= 1.0) {
        return Err(Error::Domain(format!(
            "alpha-NML order alpha = {alpha} must be >= 1"
        )));
    }
    if alpha < 1.0 + ALPHA_KL_THRESHOLD {
        return mixture_predict(prior, training, test);
    }
    let log_post = prior.log_posterior(training)?;
    let grid = prior.grid();
    let score = |class: &CountStat| -> f64 {
        let terms: Vec<f64> = log_post
            .iter()
            .enumerate()
            .map(|(j, &lp)| lp + alpha * log_likelihood(grid.point(j), class))
            .collect();
        log_sum_exp(&terms) / alpha
    };
    let mut normalizer_terms = Vec::new();
    for class in enumerate_counts(test.total(), test.alphabet_size()) {
        normalizer_terms.push(log_multinomial(class.counts()) + score(&class));
    }
    Ok(score(test) - log_sum_exp(&normalizer_terms))
}

enum Family {
    Mixture(Prior),
    AddBeta(f64),
    AlphaNml { prior: Prior, alpha: f64 },
}

/// A conditional batch predictor with its full count-class table
/// materialized.
///
/// The table stores `ln p̂(y | x)` for **one** test sequence per (training
/// class, test class) pair; multiply by the multinomial coefficient — in log
/// domain, add [`log_multinomial`] — to get whole-class mass. Rows whose
/// training class is impossible under the predictor's prior are stored as
/// `-∞` (the predictor is undefined there and any evaluation against a
/// source that reaches such a class yields infinite regret).
pub struct Predictor {
    setup: BatchSetup,
    description: String,
    train_classes: Vec<CountStat>,
    test_classes: Vec<CountStat>,
    train_index: HashMap<Vec<u64>, usize>,
    test_index: HashMap<Vec<u64>, usize>,
    /// Row-major (train-class-major) log-probabilities.
    table: Vec<f64>,
    notes: Vec<String>,
}

impl Predictor {
    /// Conditional Bayes mixture over `prior`.
    pub fn mixture(prior: Prior, setup: BatchSetup) -> Result<Self> {
        check_alphabet(&prior, setup)?;
        Self::build(setup, Family::Mixture(prior))
    }

    /// Conditional add-β rule (binary alphabets only).
    pub fn add_beta(beta: f64, setup: BatchSetup) -> Result<Self> {
        if setup.alphabet_size() != 2 {
            return Err(Error::UnsupportedClass(
                "add-beta prediction is defined for binary alphabets only".into(),
            ));
        }
        if !(beta > 0.0) {
            return Err(Error::Domain(format!(
                "add-beta smoothing beta = {beta} must be > 0"
            )));
        }
        Self::build(setup, Family::AddBeta(beta))
    }

    /// Conditional α-NML predictor over `prior`.
    pub fn alpha_nml(prior: Prior, alpha: f64, setup: BatchSetup) -> Result<Self> {
        if !(alpha >= 1.0) {
            return Err(Error::Domain(format!(
                "alpha-NML order alpha = {alpha} must be >= 1"
            )));
        }
        check_alphabet(&prior, setup)?;
        Self::build(setup, Family::AlphaNml { prior, alpha })
    }

    fn build(setup: BatchSetup, family: Family) -> Result<Self> {
        let m = setup.alphabet_size();
        let train_classes = enumerate_counts(setup.train_len() as u64, m);
        let test_classes = enumerate_counts(setup.ell() as u64, m);
        let test_log_mult: Vec<f64> = test_classes
            .iter()
            .map(|c| log_multinomial(c.counts()))
            .collect();

        let (description, notes) = match &family {
            Family::Mixture(p) => (format!("bayes-mixture[{} grid points]", p.len()), vec![]),
            Family::AddBeta(beta) => {
                let mut notes = vec![];
                let (lo, hi) = ADD_BETA_STANDARD_RANGE;
                if !(lo..=hi).contains(beta) {
                    notes.push(format!(
                        "add-beta with beta = {beta} outside [{lo}, {hi}]: \
                         accepted for exploration, but no optimality guarantees apply"
                    ));
                }
                (format!("add-beta[beta={beta}]"), notes)
            }
            Family::AlphaNml { prior, alpha } => (
                format!("alpha-nml[alpha={alpha}, {} grid points]", prior.len()),
                vec![],
            ),
        };

        let rows: Vec<Vec<f64>> = train_classes
            .par_iter()
            .map(|ct| match &family {
                Family::AddBeta(beta) => test_classes
                    .iter()
                    .map(|cy| {
                        add_beta_predict(*beta, ct, cy).expect("validated at construction")
                    })
                    .collect(),
                Family::Mixture(prior) => {
                    mixture_row(prior, ct, &test_classes).unwrap_or_else(|| {
                        vec![f64::NEG_INFINITY; test_classes.len()]
                    })
                }
                Family::AlphaNml { prior, alpha } => {
                    alpha_nml_row(prior, *alpha, ct, &test_classes, &test_log_mult)
                        .unwrap_or_else(|| vec![f64::NEG_INFINITY; test_classes.len()])
                }
            })
            .collect();

        let train_index = train_classes
            .iter()
            .enumerate()
            .map(|(i, c)| (c.counts().to_vec(), i))
            .collect();
        let test_index = test_classes
            .iter()
            .enumerate()
            .map(|(i, c)| (c.counts().to_vec(), i))
            .collect();

        Ok(Self {
            setup,
            description,
            train_classes,
            test_classes,
            train_index,
            test_index,
            table: rows.into_iter().flatten().collect(),
            notes,
        })
    }

    pub fn setup(&self) -> BatchSetup {
        self.setup
    }

    /// One-line description for reports and logs.
    pub fn description(&self) -> &str {
        &self.description
    }

    /// Advisory notes attached at construction (e.g. nonstandard β).
    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    /// Training count classes, in enumeration order.
    pub fn train_classes(&self) -> &[CountStat] {
        &self.train_classes
    }

    /// Test count classes, in enumeration order.
    pub fn test_classes(&self) -> &[CountStat] {
        &self.test_classes
    }

    /// Table lookup by class indices: `ln p̂(one test sequence | training)`.
    pub fn log_prob_by_index(&self, train_idx: usize, test_idx: usize) -> f64 {
        self.table[train_idx * self.test_classes.len() + test_idx]
    }

    /// Table lookup by count statistics. Panics if the counts do not match
    /// the setup's training/test totals — that is a caller bug, not data.
    pub fn log_prob(&self, training: &CountStat, test: &CountStat) -> f64 {
        let ti = *self
            .train_index
            .get(training.counts())
            .unwrap_or_else(|| panic!("training counts {:?} not in setup", training.counts()));
        let yi = *self
            .test_index
            .get(test.counts())
            .unwrap_or_else(|| panic!("test counts {:?} not in setup", test.counts()));
        self.log_prob_by_index(ti, yi)
    }

    /// Index of a training class, if it belongs to this setup.
    pub fn train_class_index(&self, training: &CountStat) -> Option<usize> {
        self.train_index.get(training.counts()).copied()
    }
}

fn check_alphabet(prior: &Prior, setup: BatchSetup) -> Result<()> {
    if prior.grid().alphabet_size() != setup.alphabet_size() {
        return Err(Error::Domain(format!(
            "prior is over an alphabet of size {}, setup expects {}",
            prior.grid().alphabet_size(),
            setup.alphabet_size()
        )));
    }
    Ok(())
}

/// Mixture row, or `None` when the training class is impossible under the
/// prior (the conditional is undefined there).
fn mixture_row(prior: &Prior, training: &CountStat, test_classes: &[CountStat]) -> Option<Vec<f64>> {
    let log_post = match prior.log_posterior(training) {
        Ok(lp) => lp,
        Err(Error::DegenerateEvidence) => return None,
        Err(_) => unreachable!("log_posterior only fails on degenerate evidence"),
    };
    let grid = prior.grid();
    let mut terms = vec![0.0; log_post.len()];
    Some(
        test_classes
            .iter()
            .map(|cy| {
                for (j, term) in terms.iter_mut().enumerate() {
                    *term = log_post[j] + log_likelihood(grid.point(j), cy);
                }
                log_sum_exp(&terms)
            })
            .collect(),
    )
}

/// α-NML row: per-class score `(1/α) ln Σⱼ w(θⱼ|x) p_θⱼ(y)^α`, normalized
/// across all test sequences in one final log-sum-exp.
fn alpha_nml_row(
    prior: &Prior,
    alpha: f64,
    training: &CountStat,
    test_classes: &[CountStat],
    test_log_mult: &[f64],
) -> Option<Vec<f64>> {
    if alpha < 1.0 + ALPHA_KL_THRESHOLD {
        return mixture_row(prior, training, test_classes);
    }
    let log_post = match prior.log_posterior(training) {
        Ok(lp) => lp,
        Err(Error::DegenerateEvidence) => return None,
        Err(_) => unreachable!("log_posterior only fails on degenerate evidence"),
    };
    let grid = prior.grid();
    let mut terms = vec![0.0; log_post.len()];
    let scores: Vec<f64> = test_classes
        .iter()
        .map(|cy| {
            for (j, term) in terms.iter_mut().enumerate() {
                *term = log_post[j] + alpha * log_likelihood(grid.point(j), cy);
            }
            log_sum_exp(&terms) / alpha
        })
        .collect();
    let normalizer_terms: Vec<f64> = scores
        .iter()
        .zip(test_log_mult)
        .map(|(s, lm)| s + lm)
        .collect();
    let log_z = log_sum_exp(&normalizer_terms);
    Some(scores.into_iter().map(|s| s - log_z).collect())
}
