//! Brute-force reference implementations by exhaustive sequence enumeration.
//!
//! Everything here exists to validate the fast count-class paths on tiny
//! instances and nothing else: sums run over all `m^{nℓ}` training sequences
//! and `m^ℓ` test sequences in plain probability arithmetic — direct
//! products and `ln`, no log-sum-exp, no multinomial weights — so the code
//! shares no numerical machinery with the paths it checks. A hard size
//! guard `m^{nℓ+ℓ} ≤ 4096` keeps every oracle call under a second; the
//! guard is a constructor-time error, never a silent truncation.

use std::sync::Arc;

use crate::predictors::Predictor;
use crate::prior::Prior;
use crate::source::{BatchSetup, CountStat, ParamGrid};
use crate::{capacity, Error, Result};

/// Hard ceiling on `m^{nℓ+ℓ}` for exhaustive enumeration.
pub const SIZE_GUARD: u64 = 4096;

/// Largest grid `oracle_capacity` will search over.
pub const CAPACITY_ORACLE_MAX_GRID: usize = 3;

/// Agreement tolerance between the two internal Sibson minimization routes.
pub const ROUTE_TOL: f64 = 1e-7;

/// First-order stationarity tolerance for the gradient-descent route.
pub const STATIONARITY_TOL: f64 = 1e-9;

fn check_size_guard(setup: BatchSetup) -> Result<()> {
    let m = setup.alphabet_size() as u128;
    let exponent = (setup.train_len() + setup.ell()) as u32;
    let size = m.checked_pow(exponent);
    match size {
        Some(s) if s <= SIZE_GUARD as u128 => Ok(()),
        _ => Err(Error::SizeGuard(format!(
            "exhaustive enumeration needs m^(n*ell+ell) = {}^{} sequences; the limit is {}",
            setup.alphabet_size(),
            exponent,
            SIZE_GUARD
        ))),
    }
}

/// All length-`len` sequences over `m` symbols, in base-`m` counting order.
fn all_sequences(len: usize, m: usize) -> Vec<Vec<usize>> {
    let total = (m as u64).pow(len as u32);
    (0..total)
        .map(|mut code| {
            let mut seq = vec![0usize; len];
            for slot in seq.iter_mut().rev() {
                *slot = (code % m as u64) as usize;
                code /= m as u64;
            }
            seq
        })
        .collect()
}

/// Probability of a sequence under θ as a direct product.
fn seq_prob(theta: &[f64], seq: &[usize]) -> f64 {
    seq.iter().map(|&s| theta[s]).product()
}

/// Dense joint law of `(θ, Xⁿ, Y)`: per-parameter probabilities of every
/// training and test sequence, materialized for instances inside the size
/// guard.
pub struct JointTable {
    grid: Arc<ParamGrid>,
    train: Vec<Vec<usize>>,
    test: Vec<Vec<usize>>,
    /// `train_probs[j][x] = p_θj(x)`.
    train_probs: Vec<Vec<f64>>,
    /// `test_probs[j][y] = p_θj(y)`.
    test_probs: Vec<Vec<f64>>,
}

impl JointTable {
    pub fn new(grid: Arc<ParamGrid>, setup: BatchSetup) -> Result<Self> {
        check_size_guard(setup)?;
        if grid.alphabet_size() != setup.alphabet_size() {
            return Err(Error::Domain(format!(
                "grid alphabet size {} does not match setup {}",
                grid.alphabet_size(),
                setup.alphabet_size()
            )));
        }
        let m = setup.alphabet_size();
        let train = all_sequences(setup.train_len(), m);
        let test = all_sequences(setup.ell(), m);
        let train_probs = (0..grid.len())
            .map(|j| train.iter().map(|x| seq_prob(grid.point(j), x)).collect())
            .collect();
        let test_probs = (0..grid.len())
            .map(|j| test.iter().map(|y| seq_prob(grid.point(j), y)).collect())
            .collect();
        Ok(Self {
            grid,
            train,
            test,
            train_probs,
            test_probs,
        })
    }

    pub fn grid(&self) -> &Arc<ParamGrid> {
        &self.grid
    }

    pub fn train_sequences(&self) -> &[Vec<usize>] {
        &self.train
    }

    pub fn test_sequences(&self) -> &[Vec<usize>] {
        &self.test
    }

    /// Joint sequence probability `p_θj(x) · p_θj(y)`.
    pub fn entry(&self, j: usize, x: usize, y: usize) -> f64 {
        self.train_probs[j][x] * self.test_probs[j][y]
    }

    /// Total mass under a prior; 1 within round-off by construction.
    pub fn total_mass(&self, prior: &Prior) -> f64 {
        let mut total = 0.0;
        for (j, &w) in prior.weights().iter().enumerate() {
            for x in 0..self.train.len() {
                for y in 0..self.test.len() {
                    total += w * self.entry(j, x, y);
                }
            }
        }
        total
    }
}

/// Average batch regret by the literal double sum over sequences.
pub fn oracle_batch_regret(pred: &Predictor, theta: &[f64], setup: BatchSetup) -> Result<f64> {
    check_size_guard(setup)?;
    let m = setup.alphabet_size();
    let mut total = 0.0;
    for x in all_sequences(setup.train_len(), m) {
        let px = seq_prob(theta, &x);
        if px == 0.0 {
            continue;
        }
        let cx = CountStat::from_sequence(&x, m)?;
        for y in all_sequences(setup.ell(), m) {
            let py = seq_prob(theta, &y);
            if py == 0.0 {
                continue;
            }
            let cy = CountStat::from_sequence(&y, m)?;
            let lp_hat = pred.log_prob(&cx, &cy);
            if lp_hat == f64::NEG_INFINITY {
                return Ok(f64::INFINITY);
            }
            total += px * py * (py.ln() - lp_hat);
        }
    }
    Ok(total)
}

/// Batch α-regret by the literal power sum over sequences (α > 1; use
/// [`oracle_batch_regret`] for the α = 1 endpoint).
pub fn oracle_alpha_batch_regret(
    pred: &Predictor,
    theta: &[f64],
    alpha: f64,
    setup: BatchSetup,
) -> Result<f64> {
    if !(alpha > 1.0) {
        return Err(Error::Domain(format!(
            "oracle alpha-regret needs alpha > 1, got {alpha}"
        )));
    }
    check_size_guard(setup)?;
    let m = setup.alphabet_size();
    let mut total = 0.0;
    for x in all_sequences(setup.train_len(), m) {
        let px = seq_prob(theta, &x);
        if px == 0.0 {
            continue;
        }
        let cx = CountStat::from_sequence(&x, m)?;
        for y in all_sequences(setup.ell(), m) {
            let py = seq_prob(theta, &y);
            if py == 0.0 {
                continue;
            }
            let cy = CountStat::from_sequence(&y, m)?;
            let lp_hat = pred.log_prob(&cx, &cy);
            if lp_hat == f64::NEG_INFINITY {
                return Ok(f64::INFINITY);
            }
            total += px * py * (py / lp_hat.exp()).powf(alpha - 1.0);
        }
    }
    Ok(total.ln() / (alpha - 1.0))
}

/// Textbook conditional mutual information from the joint table:
/// `Σ_{θ,x,y} w(θ) p_θ(x) p_θ(y) · ln( p_θ(y) / p(y|x) )`.
pub fn oracle_cond_mi(prior: &Prior, setup: BatchSetup) -> Result<f64> {
    let table = JointTable::new(Arc::clone(prior.grid()), setup)?;
    let w = prior.weights();
    let nx = table.train.len();
    let ny = table.test.len();
    let mut total = 0.0;
    for x in 0..nx {
        // Marginals p(x) and p(x, y) under the prior.
        let px_marg: f64 = (0..w.len()).map(|j| w[j] * table.train_probs[j][x]).sum();
        if px_marg == 0.0 {
            continue;
        }
        for y in 0..ny {
            let pxy_marg: f64 = (0..w.len()).map(|j| w[j] * table.entry(j, x, y)).sum();
            if pxy_marg == 0.0 {
                continue;
            }
            let py_given_x = pxy_marg / px_marg;
            for j in 0..w.len() {
                let joint = w[j] * table.entry(j, x, y);
                if joint == 0.0 {
                    continue;
                }
                total += joint * (table.test_probs[j][y] / py_given_x).ln();
            }
        }
    }
    Ok(total)
}

/// Result of the dual-route conditional Rényi minimization.
pub struct SibsonMinimization {
    /// Minimized conditional divergence via the closed-form per-sequence
    /// minimizers (normalized α-th-power means).
    pub value: f64,
    /// The same minimum found by projected gradient descent from uniform.
    pub descent_value: f64,
    /// `|value − descent_value|`; the two routes must agree within `1e-7`.
    pub route_gap: f64,
    /// Whether the routes agreed.
    pub routes_agree: bool,
    /// Worst relative first-order stationarity residual across sequences.
    pub stationarity_residual: f64,
    /// Whether every descent run reached stationarity within `1e-9`.
    pub stationary: bool,
    /// Training sequences, aligned with `minimizers`.
    pub train_sequences: Vec<Vec<usize>>,
    /// Descent-route minimizer over test sequences per training sequence;
    /// `None` where the training sequence has zero mass under the prior.
    pub minimizers: Vec<Option<Vec<f64>>>,
}

/// Minimizes the conditional Rényi divergence over per-training-sequence
/// test distributions, twice: once through the closed-form minimizer
/// `q*(y) ∝ A_x(y)^{1/α}` (where `A_x(y) = Σ_θ w(θ) p_θ(x) p_θ(y)^α`), and
/// once by projected gradient descent on `Σ_y A_x(y) q(y)^{1−α}` starting
/// from uniform. Their agreement validates that the power-mean really is
/// the minimizer and that the resulting optimum equals the closed-form
/// conditional Sibson information.
pub fn oracle_sibson_min(prior: &Prior, alpha: f64, setup: BatchSetup) -> Result<SibsonMinimization> {
    if !(alpha > 1.0) {
        return Err(Error::Domain(format!(
            "Sibson minimization oracle needs alpha > 1, got {alpha}"
        )));
    }
    let table = JointTable::new(Arc::clone(prior.grid()), setup)?;
    let w = prior.weights();
    let ny = table.test.len();

    let mut closed_sum = 0.0;
    let mut descent_sum = 0.0;
    let mut worst_residual = 0.0f64;
    let mut minimizers = Vec::with_capacity(table.train.len());

    for x in 0..table.train.len() {
        let a: Vec<f64> = (0..ny)
            .map(|y| {
                (0..w.len())
                    .map(|j| w[j] * table.train_probs[j][x] * table.test_probs[j][y].powf(alpha))
                    .sum()
            })
            .collect();
        if a.iter().all(|&v| v == 0.0) {
            minimizers.push(None);
            continue;
        }
        // Closed form: min_q Σ_y a_y q_y^{1−α} = (Σ_y a_y^{1/α})^α.
        let z: f64 = a.iter().map(|&v| v.powf(1.0 / alpha)).sum();
        closed_sum += z.powf(alpha);
        // Independent route: projected gradient descent.
        let (q, g, residual) = minimize_power_sum(&a, alpha);
        descent_sum += g;
        worst_residual = worst_residual.max(residual);
        minimizers.push(Some(q));
    }

    let value = closed_sum.ln() / (alpha - 1.0);
    let descent_value = descent_sum.ln() / (alpha - 1.0);
    let route_gap = (value - descent_value).abs();
    Ok(SibsonMinimization {
        value,
        descent_value,
        route_gap,
        routes_agree: route_gap <= ROUTE_TOL,
        stationarity_residual: worst_residual,
        stationary: worst_residual <= STATIONARITY_TOL,
        train_sequences: table.train.clone(),
        minimizers,
    })
}

/// Euclidean projection onto the probability simplex (sort-based).
fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut threshold = 0.0;
    for (i, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let candidate = (cumulative - 1.0) / (i as f64 + 1.0);
        if u - candidate > 0.0 {
            threshold = candidate;
        }
    }
    v.iter().map(|&x| (x - threshold).max(0.0)).collect()
}

/// Minimizes `g(q) = Σ_y a_y q_y^{1−α}` over the simplex by projected
/// gradient descent with a backtracking step. Returns the minimizer, the
/// attained value, and a relative first-order stationarity residual
/// (`max_y |∇_y − λ| / |λ|` over the support, where the multiplier `λ` is
/// estimated as `Σ_y q_y ∇_y`, which equals the common derivative value at
/// an exact optimum).
///
/// Convergence is declared on the residual, not on function decrease: the
/// objective flattens to machine precision long before the iterate settles,
/// so steps that change `g` by less than an ulp are still accepted and the
/// walk continues until the gradient equalizes.
fn minimize_power_sum(a: &[f64], alpha: f64) -> (Vec<f64>, f64, f64) {
    const RESIDUAL_TARGET: f64 = 1e-10;
    let ny = a.len();
    let objective = |q: &[f64]| -> f64 {
        let mut g = 0.0;
        for (&ay, &qy) in a.iter().zip(q) {
            if ay == 0.0 {
                continue;
            }
            if qy == 0.0 {
                return f64::INFINITY;
            }
            g += ay * qy.powf(1.0 - alpha);
        }
        g
    };
    let gradient = |q: &[f64], out: &mut [f64]| {
        for y in 0..ny {
            out[y] = if a[y] == 0.0 {
                0.0
            } else {
                (1.0 - alpha) * a[y] * q[y].powf(-alpha)
            };
        }
    };
    let residual_at = |q: &[f64], grad: &[f64]| -> f64 {
        let lambda: f64 = q.iter().zip(grad).map(|(&qy, &gy)| qy * gy).sum();
        let mut residual = 0.0f64;
        for (y, (&ay, &qy)) in a.iter().zip(q).enumerate() {
            if ay == 0.0 || qy == 0.0 {
                continue;
            }
            residual = residual.max((grad[y] - lambda).abs() / lambda.abs());
        }
        residual
    };

    let mut q = vec![1.0 / ny as f64; ny];
    let mut g = objective(&q);
    let mut grad = vec![0.0; ny];
    let mut step = 1.0;
    for _ in 0..500_000 {
        gradient(&q, &mut grad);
        if residual_at(&q, &grad) <= RESIDUAL_TARGET {
            break;
        }
        let mut accepted = false;
        for _ in 0..200 {
            let trial: Vec<f64> = q
                .iter()
                .zip(&grad)
                .map(|(&qy, &gy)| qy - step * gy)
                .collect();
            let projected = project_to_simplex(&trial);
            let g_trial = objective(&projected);
            // Tolerate ulp-level noise so the plateau walk keeps moving.
            if g_trial <= g * (1.0 + 1e-15) {
                q = projected;
                g = g_trial.min(g);
                step *= 1.4;
                accepted = true;
                break;
            }
            step *= 0.5;
            if step < 1e-300 {
                break;
            }
        }
        if !accepted {
            break;
        }
    }
    gradient(&q, &mut grad);
    let residual = residual_at(&q, &grad);
    let g_final = objective(&q);
    (q, g_final, residual)
}

/// Exhaustive search for the capacity over the prior simplex with the given
/// lattice step: the independent reference for the capacity solvers.
///
/// Restricted to grids of at most 3 points (the lattice grows too fast
/// beyond that) and steps of at most 1e-2 per the solver comparisons this
/// oracle backs; violations are refused, never truncated.
pub fn oracle_capacity(
    grid: &Arc<ParamGrid>,
    setup: BatchSetup,
    alpha: f64,
    step: f64,
) -> Result<f64> {
    if grid.len() > CAPACITY_ORACLE_MAX_GRID {
        return Err(Error::SizeGuard(format!(
            "capacity oracle handles grids of up to {CAPACITY_ORACLE_MAX_GRID} points, got {}",
            grid.len()
        )));
    }
    if !(step > 0.0 && step <= 1e-2) {
        return Err(Error::Domain(format!(
            "capacity oracle lattice step {step} must lie in (0, 1e-2]"
        )));
    }
    let evaluate = |weights: Vec<f64>| -> Result<f64> {
        let prior = Prior::normalized(Arc::clone(grid), weights)?;
        if alpha < 1.0 + crate::logmath::ALPHA_KL_THRESHOLD {
            capacity::cond_mutual_info(&prior, setup)
        } else {
            capacity::cond_sibson(&prior, alpha, setup)
        }
    };
    let k = (1.0 / step).round() as u64;
    let mut best = f64::NEG_INFINITY;
    match grid.len() {
        1 => {
            best = evaluate(vec![1.0])?;
        }
        2 => {
            for i in 0..=k {
                let w0 = i as f64 / k as f64;
                best = best.max(evaluate(vec![w0, 1.0 - w0])?);
            }
        }
        3 => {
            for i in 0..=k {
                for j in 0..=(k - i) {
                    let w0 = i as f64 / k as f64;
                    let w1 = j as f64 / k as f64;
                    let w2 = ((k - i - j) as f64) / k as f64;
                    best = best.max(evaluate(vec![w0, w1, w2])?);
                }
            }
        }
        _ => unreachable!("guarded above"),
    }
    Ok(best)
}
