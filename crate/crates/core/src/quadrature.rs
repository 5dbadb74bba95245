//! Gauss–Jacobi discretization of symmetric Dirichlet (Beta) priors.
//!
//! A Beta(β, β) prior on the binary success probability has density
//! proportional to `θ^{β−1}(1−θ)^{β−1}`, which is singular at the endpoints
//! for β < 1 — exactly the Krichevsky–Trofimov case β = 1/2. Uniform grids
//! converge miserably against such weights; a Gauss–Jacobi rule with
//! exponents (β−1, β−1) absorbs the singularity into the quadrature weights
//! instead, so mixture integrals of polynomial likelihoods (which batch
//! likelihoods are) become **exact** once the rule has enough nodes:
//! a `G`-point rule integrates polynomials up to degree `2G − 1`.

use std::sync::Arc;

use gauss_quad::GaussJacobi;

use crate::prior::Prior;
use crate::source::ParamGrid;
use crate::{Error, Result};

/// Discretizes the Beta(β, β) prior into a `grid_size`-point [`Prior`] whose
/// nodes and weights form the Gauss–Jacobi rule for the weight
/// `θ^{β−1}(1−θ)^{β−1}` on `(0, 1)`.
///
/// The normalization constant of the Beta density cancels when the weights
/// are renormalized to sum to 1, so mixture expectations
/// `E_w[f(θ)] = Σⱼ wⱼ f(θⱼ)` equal the Beta-prior integral exactly for every
/// polynomial `f` of degree at most `2·grid_size − 1`.
///
/// Requires `β > 0` (the density must be integrable) and `grid_size ≥ 8`
/// (below that, batch likelihoods of useful degree are not integrated
/// exactly and every downstream identity check would silently degrade).
pub fn dirichlet_quadrature(beta: f64, grid_size: usize) -> Result<Prior> {
    if !(beta > 0.0) {
        return Err(Error::Domain(format!(
            "Dirichlet concentration beta = {beta} must be > 0"
        )));
    }
    if grid_size < 8 {
        return Err(Error::Domain(format!(
            "quadrature grid size {grid_size} is below the minimum of 8"
        )));
    }
    // Jacobi weight (1−x)^a (1+x)^b on [−1, 1] with a = b = β − 1 pulls back
    // to the Beta(β, β) weight under θ = (1 + x)/2.
    let rule = GaussJacobi::new(grid_size, beta - 1.0, beta - 1.0)
        .map_err(|e| Error::Domain(format!("Gauss–Jacobi rule construction failed: {e}")))?;
    let mut pairs = rule.into_node_weight_pairs();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let thetas: Vec<f64> = pairs.iter().map(|&(x, _)| 0.5 * (x + 1.0)).collect();
    let grid = Arc::new(ParamGrid::binary(&thetas)?);
    Prior::normalized(grid, pairs.into_iter().map(|(_, w)| w).collect())
}
