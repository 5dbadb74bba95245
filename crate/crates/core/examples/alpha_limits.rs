//! Traces the α-regret of one predictor at one source from α = 1 (where it
//! equals the batch regret exactly) up through α = 256 (where it approaches
//! the worst-case, single-sequence regret).
//!
//! Run with: `cargo run --release --example alpha_limits`

use batchpred::{
    alpha_batch_regret, batch_regret, worst_case_regret, BatchSetup, Predictor,
};

fn main() -> batchpred::Result<()> {
    let setup = BatchSetup::binary(2, 2)?;
    let pred = Predictor::add_beta(0.5, setup)?;
    let theta = [0.3, 0.7]; // binary source with P(symbol 1) = 0.7

    let batch = batch_regret(&pred, &theta);
    let worst = worst_case_regret(&pred, &theta);
    println!("batch regret      (alpha -> 1)   = {batch:.10} nats");
    println!("worst-case regret (alpha -> inf) = {worst:.10} nats");
    println!();
    println!("{:>8} {:>16} {:>16}", "alpha", "alpha_regret", "gap_to_worst");

    let mut prev = f64::NEG_INFINITY;
    for alpha in [1.0f64, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0] {
        let r = alpha_batch_regret(&pred, &theta, alpha)?;
        println!("{alpha:>8} {r:>16.10} {:>16.10}", worst - r);
        assert!(r >= prev - 1e-12, "alpha-regret must be nondecreasing");
        prev = r;
    }

    let r1 = alpha_batch_regret(&pred, &theta, 1.0)?;
    assert_eq!(r1, batch, "alpha = 1 must reproduce the batch regret exactly");
    println!();
    println!("The column is nondecreasing, starts exactly at the batch regret,");
    println!("and closes most of the gap to the worst case by alpha = 256.");
    Ok(())
}
