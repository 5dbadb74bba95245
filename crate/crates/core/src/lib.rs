//! A numerical laboratory for batch universal prediction under logarithmic
//! loss.
//!
//! The crate evaluates, exactly and at desk scale, the quantities that appear
//! in the regret-capacity circle of ideas for parametric i.i.d. sources:
//!
//! - **Batch regret** `R(p̂, θ)`: expected excess log-loss of a predictor on a
//!   fresh test batch of `ℓ` samples after seeing `n` training batches, and
//!   its Rényi generalization `R_α` interpolating up to worst-case regret.
//! - **Predictor families**: conditional Bayes mixtures over a finite
//!   parameter grid, the conditional add-β (Krichevsky–Trofimov at β = 1/2)
//!   rule for binary sources, and the conditional α-NML predictor.
//! - **Information measures**: conditional mutual information `I_w(θ; Y | Xⁿ)`
//!   and conditional Sibson information of order α, both in closed form over
//!   count classes.
//! - **Capacity solvers** that locate the capacity-achieving prior and
//!   certify the minimax saddle (equalizer conditions) a posteriori.
//! - **Brute-force oracles** that re-derive every fast-path quantity by
//!   exhaustive sequence enumeration on tiny instances.
//!
//! Everything is deterministic: there is no randomness anywhere in the
//! library, and parallel sweeps reduce in a fixed order so results are
//! bit-reproducible regardless of worker count.
//!
//! Entry points: [`Predictor`] for conditional batch distributions,
//! [`max_regret`] for worst-parameter sweeps, [`capacity_solve`] /
//! [`alpha_capacity_solve`] for capacity-achieving priors, and the `oracle`
//! module for exhaustive cross-checks. The `examples/` directory has one
//! runnable walk-through per capability.

pub mod capacity;
pub mod config;
pub mod experiments;
pub mod logmath;
pub mod oracle;
pub mod predictors;
pub mod prior;
pub mod quadrature;
pub mod regret;
pub mod source;

pub use capacity::{
    alpha_capacity_solve, capacity_solve, cond_mutual_info, cond_sibson, saddle_check,
    CapacityResult, SaddleReport,
};
pub use predictors::{add_beta_predict, alpha_nml_predict, mixture_predict, Predictor};
pub use prior::Prior;
pub use quadrature::dirichlet_quadrature;
pub use regret::{alpha_batch_regret, batch_regret, max_regret, worst_case_regret, RegretReport};
pub use source::{enumerate_counts, BatchSetup, CountStat, ParamGrid};

/// Errors shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument left the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Every grid point assigns zero likelihood to the observed training
    /// counts, so no posterior exists.
    #[error("degenerate evidence: every grid point assigns zero likelihood to the training counts")]
    DegenerateEvidence,
    /// The requested predictor is not defined for this source class.
    #[error("unsupported source class: {0}")]
    UnsupportedClass(String),
    /// An exhaustive-enumeration oracle refused an instance that exceeds its
    /// hard size guard.
    #[error("oracle size guard: {0}")]
    SizeGuard(String),
    /// Invalid experiment configuration.
    #[error("config error: {0}")]
    Config(String),
    /// Underlying I/O failure while reading configs or writing reports.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
