//! Finds the capacity-achieving prior on a small binary grid, certifies the
//! minimax saddle, and shows that the optimal Bayes mixture is an equalizer:
//! its regret is flat across the prior's support and no alternative predictor
//! in a small battery beats it.
//!
//! Run with: `cargo run --release --example capacity_saddle`

use std::sync::Arc;

use batchpred::{
    capacity_solve, max_regret, saddle_check, BatchSetup, ParamGrid, Predictor, Prior,
};

fn main() -> batchpred::Result<()> {
    let grid = Arc::new(ParamGrid::binary(&[0.2, 0.5, 0.8])?);
    let setup = BatchSetup::binary(1, 1)?;

    let result = capacity_solve(Arc::clone(&grid), setup, 1e-10, 50_000)?;
    println!("capacity        = {:.12} nats", result.capacity);
    println!("iterations      = {}", result.iterations);
    println!("equalizer gap   = {:.3e}", result.equalizer_gap);
    println!("support gap     = {:.3e}", result.support_gap);
    for (j, w) in result.prior.weights().iter().enumerate() {
        println!("  w({}) = {:.12}", grid.theta_repr(j), w);
    }

    // Post-hoc certificate: every divergence <= capacity + tol, with equality
    // on the support. This is checked independently of the solver's own trace.
    let saddle = saddle_check(&result, setup)?;
    println!(
        "saddle check    = {} (overshoot {:.3e}, support shortfall {:.3e})",
        if saddle.pass { "PASS" } else { "FAIL" },
        saddle.overshoot,
        saddle.support_shortfall
    );

    // The capacity-achieving mixture equalizes regret: its worst grid regret
    // matches the capacity value.
    let optimal = Predictor::mixture(result.prior.clone(), setup)?;
    let opt_max = max_regret(&optimal, &grid, 1.0)?;
    println!(
        "optimal mixture: max regret {:.12} (|gap to capacity| = {:.3e})",
        opt_max.max_value,
        (opt_max.max_value - result.capacity).abs()
    );

    // Battery of challengers: every one has worst-case regret >= capacity.
    let uniform = Prior::uniform(Arc::clone(&grid));
    let battery: Vec<(&str, Predictor)> = vec![
        ("add-beta(1/2)", Predictor::add_beta(0.5, setup)?),
        ("add-beta(1)", Predictor::add_beta(1.0, setup)?),
        ("uniform mixture", Predictor::mixture(uniform, setup)?),
    ];
    for (name, pred) in &battery {
        let report = max_regret(pred, &grid, 1.0)?;
        println!(
            "  challenger {name:<16} max regret {:.12} (excess {:+.3e})",
            report.max_value,
            report.max_value - result.capacity
        );
    }
    Ok(())
}
