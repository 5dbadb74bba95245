//! Brackets the minimax regret from both sides as the batch sizes grow:
//!
//!   I_w(uniform)  <=  minimax regret  <=  max regret of add-1/2
//!
//! The midpoint reference is `½·ln(1 + 1/n)`. Scaled residuals show how fast
//! each side closes in on it: the lower gap shrinks like ln(n·ell)/(n·ell)
//! and the upper gap like 1/(n·ell).
//!
//! Run with: `cargo run --release --example lower_bound_sweep`

use batchpred::config::GridSpec;
use batchpred::{cond_mutual_info, max_regret, BatchSetup, Predictor, Prior};

fn main() -> batchpred::Result<()> {
    let grid = GridSpec::sweep(0.1, 0.01).build()?;
    println!(
        "{:>4} {:>4} {:>13} {:>13} {:>13} {:>12} {:>12}",
        "n", "ell", "I_w(uniform)", "half_log", "max_regret", "res_lower", "res_upper"
    );
    for n in [4usize, 8, 16, 32] {
        let ell = n;
        let setup = BatchSetup::binary(n, ell)?;
        let t = (n * ell) as f64;

        let uniform = Prior::uniform(grid.clone());
        let lower = cond_mutual_info(&uniform, setup)?;

        let pred = Predictor::add_beta(0.5, setup)?;
        let upper = max_regret(&pred, &grid, 1.0)?.max_value;

        let half_log = 0.5 * (1.0 + 1.0 / n as f64).ln();
        // Normalized so both columns stay O(1) along the sweep.
        let res_lower = (half_log - lower) * t / t.ln();
        let res_upper = (upper - half_log) * t;

        println!(
            "{n:>4} {ell:>4} {lower:>13.9} {half_log:>13.9} {upper:>13.9} {res_lower:>12.6} {res_upper:>12.6}"
        );
        assert!(lower <= upper, "the sandwich must hold");
    }
    println!();
    println!("Both residual columns stay bounded, so the two sides pin the");
    println!("minimax regret to within O(ln(n*ell)/(n*ell)) of half_log.");
    Ok(())
}
