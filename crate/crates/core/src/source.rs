//! Parametric i.i.d. source model over a finite alphabet.
//!
//! A source is a point θ on the probability simplex over `m` symbols; an
//! experiment draws `n` training batches and one test batch of `ℓ` i.i.d.
//! samples each. Because every distribution in sight is exchangeable, all
//! sums over length-`k` sequences collapse to sums over count vectors
//! ("count classes") weighted by multinomial coefficients. That reduction —
//! [`enumerate_counts`] plus [`count_weight`] — is what makes `n·ℓ` in the
//! hundreds tractable for binary alphabets: the state space is
//! `O((nℓ+1)·(ℓ+1))` classes instead of `2^{nℓ+ℓ}` sequences.

use crate::logmath::log_multinomial;
use crate::{Error, Result};

/// Distinctness threshold for grid points (pairwise L1 distance).
const GRID_DISTINCT_TOL: f64 = 1e-12;

/// Normalization tolerance for simplex points.
const SIMPLEX_TOL: f64 = 1e-12;

/// Experiment shape: `n` training batches and one test batch, each of `ℓ`
/// i.i.d. samples from an alphabet of `m` symbols.
///
/// `n = 0` (prediction from no training data) is allowed; `ℓ ≥ 1` and
/// `m ≥ 2` are required.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BatchSetup {
    n: usize,
    ell: usize,
    alphabet_size: usize,
}

impl BatchSetup {
    pub fn new(n: usize, ell: usize, alphabet_size: usize) -> Result<Self> {
        if ell == 0 {
            return Err(Error::Domain("batch length ell must be >= 1".into()));
        }
        if alphabet_size < 2 {
            return Err(Error::Domain("alphabet size must be >= 2".into()));
        }
        Ok(Self {
            n,
            ell,
            alphabet_size,
        })
    }

    /// Binary-alphabet convenience constructor.
    pub fn binary(n: usize, ell: usize) -> Result<Self> {
        Self::new(n, ell, 2)
    }

    /// Number of training batches.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Samples per batch.
    pub fn ell(&self) -> usize {
        self.ell
    }

    /// Alphabet size `m`.
    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    /// Total training length `t = n·ℓ`.
    pub fn train_len(&self) -> usize {
        self.n * self.ell
    }
}

/// Sufficient statistic of an i.i.d. sample: per-symbol occurrence counts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CountStat {
    counts: Vec<u64>,
    total: u64,
}

impl CountStat {
    pub fn new(counts: Vec<u64>) -> Self {
        let total = counts.iter().sum();
        Self { counts, total }
    }

    /// The all-zero statistic over `m` symbols (an empty sample).
    pub fn empty(alphabet_size: usize) -> Self {
        Self::new(vec![0; alphabet_size])
    }

    /// Binary statistic with `n0` zeros and `n1` ones.
    pub fn binary(n0: u64, n1: u64) -> Self {
        Self::new(vec![n0, n1])
    }

    /// Tallies a symbol sequence; errors on symbols outside `0..m`.
    pub fn from_sequence(seq: &[usize], alphabet_size: usize) -> Result<Self> {
        let mut counts = vec![0u64; alphabet_size];
        for &s in seq {
            if s >= alphabet_size {
                return Err(Error::Domain(format!(
                    "symbol {s} outside alphabet of size {alphabet_size}"
                )));
            }
            counts[s] += 1;
        }
        Ok(Self::new(counts))
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn alphabet_size(&self) -> usize {
        self.counts.len()
    }

    /// Element-wise sum with another statistic over the same alphabet.
    pub fn combined(&self, other: &CountStat) -> CountStat {
        assert_eq!(
            self.counts.len(),
            other.counts.len(),
            "cannot combine counts over different alphabets"
        );
        CountStat::new(
            self.counts
                .iter()
                .zip(&other.counts)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

/// A finite family of candidate source distributions.
///
/// Every point lies on the simplex (entries in `[0, 1]`, summing to 1 within
/// `1e-12`) and points are pairwise distinct (L1 distance above `1e-12`), so
/// priors over the grid are identifiable.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamGrid {
    alphabet_size: usize,
    points: Vec<Vec<f64>>,
}

impl ParamGrid {
    pub fn new(alphabet_size: usize, points: Vec<Vec<f64>>) -> Result<Self> {
        if alphabet_size < 2 {
            return Err(Error::Domain("alphabet size must be >= 2".into()));
        }
        if points.is_empty() {
            return Err(Error::Domain("parameter grid must be non-empty".into()));
        }
        for (j, p) in points.iter().enumerate() {
            if p.len() != alphabet_size {
                return Err(Error::Domain(format!(
                    "grid point {j} has {} entries, expected {alphabet_size}",
                    p.len()
                )));
            }
            if p.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
                return Err(Error::Domain(format!(
                    "grid point {j} has entries outside [0, 1]"
                )));
            }
            let sum: f64 = p.iter().sum();
            if (sum - 1.0).abs() > SIMPLEX_TOL {
                return Err(Error::Domain(format!(
                    "grid point {j} sums to {sum}, not 1"
                )));
            }
        }
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                let dist: f64 = points[i]
                    .iter()
                    .zip(&points[j])
                    .map(|(a, b)| (a - b).abs())
                    .sum();
                if dist <= GRID_DISTINCT_TOL {
                    return Err(Error::Domain(format!(
                        "grid points {i} and {j} coincide (L1 distance {dist:.3e})"
                    )));
                }
            }
        }
        Ok(Self {
            alphabet_size,
            points,
        })
    }

    /// Binary grid from success probabilities: θ ↦ (1−θ, θ).
    pub fn binary(thetas: &[f64]) -> Result<Self> {
        let points = thetas.iter().map(|&t| vec![1.0 - t, t]).collect();
        Self::new(2, points)
    }

    /// Evenly spaced binary grid of `count` points on `[lo, hi]`.
    pub fn binary_uniform(count: usize, lo: f64, hi: f64) -> Result<Self> {
        if count == 0 {
            return Err(Error::Domain("grid must have at least one point".into()));
        }
        if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
            return Err(Error::Domain(format!(
                "invalid theta range [{lo}, {hi}]"
            )));
        }
        let thetas: Vec<f64> = if count == 1 {
            vec![lo]
        } else {
            (0..count)
                .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
                .collect()
        };
        Self::binary(&thetas)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn point(&self, index: usize) -> &[f64] {
        &self.points[index]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.points.iter().map(|p| p.as_slice())
    }

    /// For binary grids, the success probability of point `index`.
    pub fn binary_theta(&self, index: usize) -> Option<f64> {
        (self.alphabet_size == 2).then(|| self.points[index][1])
    }

    /// Compact human- and CSV-friendly rendering of a grid point: the success
    /// probability for binary grids, a semicolon-joined tuple otherwise.
    pub fn theta_repr(&self, index: usize) -> String {
        if self.alphabet_size == 2 {
            format!("{}", self.points[index][1])
        } else {
            let parts: Vec<String> = self.points[index].iter().map(|x| x.to_string()).collect();
            format!("({})", parts.join(";"))
        }
    }
}

/// Log-likelihood `ln p_θ` of a count class, i.e. of any single sequence with
/// these counts: `Σ_s c_s ln θ_s` with `0 · ln 0 = 0`.
///
/// Returns `-∞` when a positive count meets a zero parameter entry.
pub fn log_likelihood(theta: &[f64], stat: &CountStat) -> f64 {
    assert_eq!(
        theta.len(),
        stat.alphabet_size(),
        "parameter/count alphabet mismatch"
    );
    let mut ll = 0.0;
    for (&p, &c) in theta.iter().zip(stat.counts()) {
        if c > 0 {
            ll += c as f64 * p.ln(); // p = 0 makes this -inf, as it should
        }
    }
    ll
}

/// Log-probability of an entire count class under θ: the multinomial
/// coefficient times the per-sequence likelihood, in log domain.
///
/// Summed over `enumerate_counts(k, m)` these weights exponentiate to 1.
pub fn count_weight(theta: &[f64], stat: &CountStat) -> f64 {
    log_multinomial(stat.counts()) + log_likelihood(theta, stat)
}

/// Enumerates all count vectors of the given total over `m` symbols, in
/// lexicographic order (first coordinate ascending).
///
/// The list has `C(total + m − 1, m − 1)` entries — `total + 1` for binary
/// alphabets.
pub fn enumerate_counts(total: u64, alphabet_size: usize) -> Vec<CountStat> {
    assert!(alphabet_size >= 1);
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(alphabet_size);
    fill_counts(total, alphabet_size, &mut prefix, &mut out);
    out
}

fn fill_counts(rest: u64, slots: usize, prefix: &mut Vec<u64>, out: &mut Vec<CountStat>) {
    if slots == 1 {
        prefix.push(rest);
        out.push(CountStat::new(prefix.clone()));
        prefix.pop();
        return;
    }
    for first in 0..=rest {
        prefix.push(first);
        fill_counts(rest - first, slots - 1, prefix, out);
        prefix.pop();
    }
}
