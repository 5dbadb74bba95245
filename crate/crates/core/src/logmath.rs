//! Log-domain numerical primitives.
//!
//! All probabilities and weights in this crate travel as natural-log values
//! in plain `f64`. `f64::NEG_INFINITY` encodes exactly-zero mass, the
//! `0 · ln 0 = 0` convention applies wherever a zero-probability term
//! multiplies its own logarithm, and `+∞` is never a valid log weight.
//! Internal units are nats; [`nats_to_bits`] converts at output boundaries.

use statrs::function::gamma::ln_gamma;

use crate::{Error, Result};

/// Threshold below which Rényi orders are routed to the KL limit.
///
/// For `α ∈ [1, 1 + ALPHA_KL_THRESHOLD)` the `1/(α−1)` prefactor amplifies
/// round-off in the log-sum faster than the integrand changes, so the exact
/// `α → 1` limit (the KL divergence) is both safer and more accurate.
pub const ALPHA_KL_THRESHOLD: f64 = 1e-6;

/// Converts a value in nats to bits.
pub fn nats_to_bits(nats: f64) -> f64 {
    nats / std::f64::consts::LN_2
}

/// Computes `ln Σᵢ exp(terms[i])` with max-shift stabilization.
///
/// The empty sum has zero mass, so an empty slice (or a slice of all
/// `-∞`) returns `-∞`. Entries of `+∞` are not meaningful log weights and
/// are rejected in debug builds.
pub fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    debug_assert!(max < f64::INFINITY, "+inf is not a valid log weight");
    let sum: f64 = terms.iter().map(|&t| (t - max).exp()).sum();
    max + sum.ln()
}

/// Computes `ln C(n, k)` via the log-gamma function.
///
/// Exact to double precision for all arguments; errors if `k > n`.
pub fn log_binomial(n: u64, k: u64) -> Result<f64> {
    if k > n {
        return Err(Error::Domain(format!(
            "binomial coefficient C({n}, {k}) requires k <= n"
        )));
    }
    Ok(ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0))
}

/// Computes the log multinomial coefficient `ln (Σcᵢ)! / Πᵢ cᵢ!`.
pub fn log_multinomial(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let mut value = ln_gamma(total as f64 + 1.0);
    for &c in counts {
        value -= ln_gamma(c as f64 + 1.0);
    }
    value
}

/// Kullback–Leibler divergence `D(p ‖ q) = Σᵢ pᵢ ln(pᵢ/qᵢ)` in nats.
///
/// Zero-probability `p` entries contribute nothing (`0 · ln 0 = 0`); a
/// positive `p` entry over a zero `q` entry makes the divergence `+∞`.
/// Errors if the slices have different lengths.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::Domain(format!(
            "kl_divergence: length mismatch ({} vs {})",
            p.len(),
            q.len()
        )));
    }
    let mut div = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi == 0.0 {
            continue;
        }
        if qi == 0.0 {
            return Ok(f64::INFINITY);
        }
        div += pi * (pi.ln() - qi.ln());
    }
    Ok(div)
}

/// Rényi divergence of order `α`:
/// `D_α(p ‖ q) = (1/(α−1)) ln Σᵢ pᵢ^α qᵢ^{1−α}` in nats.
///
/// Orders below 1 are rejected; orders within [`ALPHA_KL_THRESHOLD`] of 1
/// are routed to [`kl_divergence`], the exact `α → 1` limit. The sum is
/// evaluated as a single [`log_sum_exp`] over `α ln pᵢ + (1−α) ln qᵢ`, so no
/// probability is ever exponentiated out of the log domain.
pub fn renyi_divergence(p: &[f64], q: &[f64], alpha: f64) -> Result<f64> {
    if !(alpha >= 1.0) {
        return Err(Error::Domain(format!(
            "renyi_divergence: order alpha = {alpha} must be >= 1"
        )));
    }
    if alpha < 1.0 + ALPHA_KL_THRESHOLD {
        return kl_divergence(p, q);
    }
    if p.len() != q.len() {
        return Err(Error::Domain(format!(
            "renyi_divergence: length mismatch ({} vs {})",
            p.len(),
            q.len()
        )));
    }
    let mut terms = Vec::with_capacity(p.len());
    for (&pi, &qi) in p.iter().zip(q) {
        if pi == 0.0 {
            continue; // zero mass in p never contributes, for any order
        }
        if qi == 0.0 {
            return Ok(f64::INFINITY);
        }
        terms.push(alpha * pi.ln() + (1.0 - alpha) * qi.ln());
    }
    Ok(log_sum_exp(&terms) / (alpha - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Integer-arithmetic binomial, the oracle for `log_binomial` at small n.
    fn exact_binomial(n: u64, k: u64) -> u64 {
        let k = k.min(n - k.min(n));
        let mut num: u128 = 1;
        let mut den: u128 = 1;
        for i in 0..k {
            num *= (n - i) as u128;
            den *= (i + 1) as u128;
        }
        (num / den) as u64
    }

    #[test]
    fn log_sum_exp_basic_values() {
        // ln(e^0 + e^0) = ln 2, and a shifted copy of the same sum.
        assert_abs_diff_eq!(log_sum_exp(&[0.0, 0.0]), 2.0_f64.ln(), epsilon = 1e-15);
        let big = 700.0;
        assert_abs_diff_eq!(
            log_sum_exp(&[big, big]),
            big + 2.0_f64.ln(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn log_sum_exp_handles_empty_and_zero_mass() {
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        assert_eq!(
            log_sum_exp(&[f64::NEG_INFINITY, f64::NEG_INFINITY]),
            f64::NEG_INFINITY
        );
        // -inf entries drop out of a mixed sum.
        assert_abs_diff_eq!(
            log_sum_exp(&[0.0, f64::NEG_INFINITY, 0.0]),
            2.0_f64.ln(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn log_sum_exp_survives_extreme_shifts() {
        // Unshifted evaluation would overflow e^1000; the max-shift keeps it
        // finite and exact.
        let v = log_sum_exp(&[1000.0, 1000.0 + (0.5f64).ln()]);
        assert_abs_diff_eq!(v, 1000.0 + 1.5f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn log_binomial_matches_integer_arithmetic() {
        for n in 0..=20u64 {
            for k in 0..=n {
                let expect = (exact_binomial(n, k) as f64).ln();
                assert_abs_diff_eq!(log_binomial(n, k).unwrap(), expect, epsilon = 1e-12);
            }
        }
        // Spot value: C(20, 10) = 184756.
        assert_abs_diff_eq!(
            log_binomial(20, 10).unwrap(),
            184756.0_f64.ln(),
            epsilon = 1e-12
        );
        assert!(log_binomial(3, 5).is_err());
    }

    #[test]
    fn log_multinomial_reduces_to_binomial() {
        for n in 0..=12u64 {
            for k in 0..=n {
                assert_abs_diff_eq!(
                    log_multinomial(&[k, n - k]),
                    log_binomial(n, k).unwrap(),
                    epsilon = 1e-12
                );
            }
        }
        // 4!/(1!2!1!) = 12.
        assert_abs_diff_eq!(log_multinomial(&[1, 2, 1]), 12.0_f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn kl_known_value_and_conventions() {
        // D((0.3,0.7) || (0.6,0.4)) = 0.3 ln(1/2) + 0.7 ln(7/4).
        let expect = 0.3 * (0.3f64 / 0.6).ln() + 0.7 * (0.7f64 / 0.4).ln();
        assert_abs_diff_eq!(
            kl_divergence(&[0.3, 0.7], &[0.6, 0.4]).unwrap(),
            expect,
            epsilon = 1e-15
        );
        // Identical arguments: exactly zero.
        assert_eq!(kl_divergence(&[0.3, 0.7], &[0.3, 0.7]).unwrap(), 0.0);
        // 0 ln 0 = 0 on the p side; unmatched mass on the q side is +inf.
        assert_abs_diff_eq!(
            kl_divergence(&[0.0, 1.0], &[0.5, 0.5]).unwrap(),
            2.0_f64.ln(),
            epsilon = 1e-15
        );
        assert_eq!(
            kl_divergence(&[0.5, 0.5], &[1.0, 0.0]).unwrap(),
            f64::INFINITY
        );
        assert!(kl_divergence(&[1.0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn renyi_known_value_at_order_two() {
        // D_2((0.3,0.7) || (0.5,0.5)) = ln(0.09/0.5 + 0.49/0.5) = ln 1.16.
        let d = renyi_divergence(&[0.3, 0.7], &[0.5, 0.5], 2.0).unwrap();
        assert_abs_diff_eq!(d, 1.16_f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn renyi_of_point_mass_is_order_free() {
        // p = (1,0) against uniform: D_α = ln 2 for every α > 1.
        for &alpha in &[1.5, 2.0, 4.0, 32.0, 256.0] {
            let d = renyi_divergence(&[1.0, 0.0], &[0.5, 0.5], alpha).unwrap();
            assert_abs_diff_eq!(d, 2.0_f64.ln(), epsilon = 1e-12);
        }
    }

    #[test]
    fn renyi_routes_near_one_to_kl() {
        let p = [0.3, 0.7];
        let q = [0.6, 0.4];
        let kl = kl_divergence(&p, &q).unwrap();
        // Inside the routing window: exactly the KL value.
        assert_eq!(renyi_divergence(&p, &q, 1.0).unwrap(), kl);
        assert_eq!(renyi_divergence(&p, &q, 1.0 + 0.5e-6).unwrap(), kl);
        // Just outside: the generic path, still within O(α−1) of KL.
        let d = renyi_divergence(&p, &q, 1.0 + 1e-5).unwrap();
        assert_abs_diff_eq!(d, kl, epsilon = 1e-4);
        assert!(renyi_divergence(&p, &q, 0.5).is_err());
    }

    #[test]
    fn renyi_increases_with_order() {
        let p = [0.2, 0.5, 0.3];
        let q = [0.4, 0.4, 0.2];
        let orders = [1.0, 1.5, 2.0, 4.0, 8.0, 32.0];
        let values: Vec<f64> = orders
            .iter()
            .map(|&a| renyi_divergence(&p, &q, a).unwrap())
            .collect();
        for w in values.windows(2) {
            assert!(w[1] >= w[0] - 1e-12, "Renyi order monotonicity: {values:?}");
        }
    }
}
