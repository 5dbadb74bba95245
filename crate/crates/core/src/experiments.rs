//! Experiment drivers behind the command-line subcommands.
//!
//! Each driver takes a resolved config, runs its computation inside a
//! worker pool of the configured size, and renders a complete output
//! document (CSV with `#`-comment header, or JSON) plus human-readable
//! summary lines. Rendering is separated from delivery: callers decide
//! whether the document goes to stdout or is written atomically
//! (temp-file-then-rename) to a path, so interrupted runs never leave
//! partial files.
//!
//! Exit-code convention: 0 success, 1 config error, 2 numerical failure
//! (solver did not converge, saddle certificate failed, or an oracle
//! agreement check failed), 3 size-guard refusal.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use crate::capacity::{
    alpha_capacity_solve, capacity_solve, cond_mutual_info, cond_sibson, saddle_check_at,
};
use crate::config::{
    ell_for, CapacityConfig, GridSpec, LimitsConfig, LowerBoundConfig, OracleCheckConfig,
    RegretConfig,
};
use crate::logmath::ALPHA_KL_THRESHOLD;
use crate::oracle::{
    oracle_alpha_batch_regret, oracle_batch_regret, oracle_capacity, oracle_cond_mi,
    oracle_sibson_min,
};
use crate::predictors::{alpha_nml_predict, Predictor};
use crate::prior::Prior;
use crate::quadrature::dirichlet_quadrature;
use crate::regret::{alpha_batch_regret, batch_regret, max_regret, worst_case_regret};
use crate::source::{BatchSetup, CountStat, ParamGrid};
use crate::{Error, Result};

/// A fully rendered command result, ready for delivery.
pub struct CommandOutput {
    /// The complete output document (CSV or JSON, newline-terminated).
    pub rendered: String,
    /// Process exit code the run should end with.
    pub exit_code: i32,
    /// Human-readable summary lines (not part of the document).
    pub summary: Vec<String>,
}

/// Maps library errors to the exit-code convention. Convergence failures
/// never surface as errors (commands encode them as exit code 2 directly).
pub fn exit_code_for_error(err: &Error) -> i32 {
    match err {
        Error::SizeGuard(_) => 3,
        _ => 1,
    }
}

/// Writes `content` to `path` atomically: the bytes land in a sibling
/// temp file which is then renamed over the target.
pub fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::Config(format!("output path '{}' has no file name", path.display())))?;
    let mut tmp_name = file_name.to_os_string();
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    std::fs::write(&tmp, content)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Runs `f` inside a dedicated pool of `workers` threads. All data
/// parallelism in the library goes through the ambient rayon pool, so this
/// bounds every sweep the closure performs.
pub fn run_in_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot build a {workers}-thread worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// Maximal-regret sweep: evaluates the configured predictor's α-regret at
/// every grid point and renders the CSV report.
pub fn cmd_regret(cfg: &RegretConfig) -> Result<CommandOutput> {
    let pred = cfg.predictor.build(Some(&cfg.grid), cfg.setup)?;
    let report = run_in_pool(cfg.workers, || max_regret(&pred, &cfg.grid, cfg.alpha))??;
    let mut buf = Vec::new();
    report
        .write_csv(&mut buf, &cfg.echo_lines())
        .map_err(Error::Io)?;
    let mut summary = vec![format!(
        "max regret = {:.12} {} at theta = {} (index {})",
        cfg.unit.convert(report.max_value),
        cfg.unit.label(),
        report.theta_reprs[report.argmax_index],
        report.argmax_index
    )];
    summary.extend(pred.notes().iter().map(|n| format!("note: {n}")));
    Ok(CommandOutput {
        rendered: String::from_utf8(buf).expect("CSV is UTF-8"),
        exit_code: 0,
        summary,
    })
}

fn json_f64(v: f64) -> serde_json::Value {
    // JSON has no infinities; encode them as strings rather than null so
    // they stay visible and greppable.
    if v.is_finite() {
        serde_json::json!(v)
    } else {
        serde_json::json!(format!("{v}"))
    }
}

/// Capacity solve plus saddle certification, rendered as JSON.
///
/// The run exits 0 only when the solver converged and the saddle
/// certificate passed; any shortfall exits 2 with the full result still
/// written for inspection.
pub fn cmd_capacity(cfg: &CapacityConfig) -> Result<CommandOutput> {
    let (result, saddle) = run_in_pool(cfg.workers, || -> Result<_> {
        let result = if cfg.alpha < 1.0 + ALPHA_KL_THRESHOLD {
            capacity_solve(Arc::clone(&cfg.grid), cfg.setup, cfg.tol, cfg.max_iter)?
        } else {
            alpha_capacity_solve(
                Arc::clone(&cfg.grid),
                cfg.setup,
                cfg.alpha,
                cfg.tol,
                cfg.max_iter,
            )?
        };
        let saddle = saddle_check_at(&result, cfg.setup, cfg.saddle_tol)?;
        Ok((result, saddle))
    })??;

    let prior_json: Vec<serde_json::Value> = (0..cfg.grid.len())
        .map(|j| {
            serde_json::json!({
                "theta_repr": cfg.grid.theta_repr(j),
                "weight": result.prior.weights()[j],
            })
        })
        .collect();
    let config_json: serde_json::Map<String, serde_json::Value> =
        cfg.echo_map().into_iter().collect();
    let doc = serde_json::json!({
        "capacity_nats": json_f64(result.capacity),
        "equalizer_gap": json_f64(result.equalizer_gap),
        "support_gap": json_f64(result.support_gap),
        "iterations": result.iterations,
        "prior": prior_json,
        "trace": result.trace.iter().map(|&v| json_f64(v)).collect::<Vec<_>>(),
        "alpha": result.alpha,
        "tol": result.tol,
        "converged": result.converged,
        "saddle": if saddle.pass { "PASS" } else { "FAIL" },
        "saddle_overshoot": json_f64(saddle.overshoot),
        "saddle_support_shortfall": json_f64(saddle.support_shortfall),
        "saddle_tol": saddle.tol,
        "config": config_json,
    });
    let rendered = format!("{}\n", serde_json::to_string_pretty(&doc).expect("valid JSON"));

    let ok = result.converged && saddle.pass;
    let summary = vec![
        format!(
            "capacity = {:.12} {} after {} iterations (converged: {})",
            cfg.unit.convert(result.capacity),
            cfg.unit.label(),
            result.iterations,
            result.converged
        ),
        format!(
            "saddle {}: overshoot {:.3e}, support shortfall {:.3e} (tol {:.1e})",
            if saddle.pass { "PASS" } else { "FAIL" },
            saddle.overshoot,
            saddle.support_shortfall,
            saddle.tol
        ),
    ];
    Ok(CommandOutput {
        rendered,
        exit_code: if ok { 0 } else { 2 },
        summary,
    })
}

/// Minimax bracketing sweep: for each n (with ℓ = round(n^γ)) the mutual
/// information of the quadrature uniform prior gives a lower bound on the
/// minimax regret, and the add-β(1/2) max regret over `[δ, 1−δ]` gives an
/// upper bound; `½·ln(1+1/n)` sits between them asymptotically. The two
/// residual columns rescale the gaps by the rates the bounds predict, so a
/// healthy sweep shows bounded residuals.
pub fn cmd_lowerbound(cfg: &LowerBoundConfig) -> Result<CommandOutput> {
    struct Row {
        n: usize,
        ell: usize,
        lower_bound_iw: f64,
        add_half_max_regret: f64,
        half_log_term: f64,
        residual_lower: f64,
        residual_upper: f64,
    }

    let rows = run_in_pool(cfg.workers, || -> Result<Vec<Row>> {
        let prior = dirichlet_quadrature(1.0, cfg.quadrature_size)?;
        let sweep = GridSpec::sweep(cfg.delta, cfg.sweep_step).build()?;
        cfg.n_list
            .iter()
            .map(|&n| {
                let ell = ell_for(n, cfg.gamma);
                let setup = BatchSetup::binary(n, ell)?;
                let lower_bound_iw = cond_mutual_info(&prior, setup)?;
                let pred = Predictor::add_beta(0.5, setup)?;
                let report = max_regret(&pred, &sweep, 1.0)?;
                let half_log_term = 0.5 * (1.0 + 1.0 / n as f64).ln();
                let t = (n * ell) as f64;
                Ok(Row {
                    n,
                    ell,
                    lower_bound_iw,
                    add_half_max_regret: report.max_value,
                    half_log_term,
                    residual_lower: (half_log_term - lower_bound_iw) * t / t.ln(),
                    residual_upper: (report.max_value - half_log_term) * t,
                })
            })
            .collect()
    })??;

    let mut out = String::new();
    for line in cfg.echo_lines() {
        writeln!(out, "# {line}").expect("string write");
    }
    writeln!(
        out,
        "n,ell,lower_bound_Iw,add_half_max_regret,half_log_term,residual_lower,residual_upper"
    )
    .expect("string write");
    let mut summary = Vec::new();
    for row in &rows {
        // Value columns honor the configured output unit; the residuals are
        // linear in the values, so the same conversion keeps them consistent.
        writeln!(
            out,
            "{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            row.n,
            row.ell,
            cfg.unit.convert(row.lower_bound_iw),
            cfg.unit.convert(row.add_half_max_regret),
            cfg.unit.convert(row.half_log_term),
            cfg.unit.convert(row.residual_lower),
            cfg.unit.convert(row.residual_upper)
        )
        .expect("string write");
        summary.push(format!(
            "n={}, ell={}: {:.6} <= minimax <= {:.6} {}",
            row.n,
            row.ell,
            cfg.unit.convert(row.lower_bound_iw),
            cfg.unit.convert(row.add_half_max_regret),
            cfg.unit.label()
        ));
    }
    Ok(CommandOutput {
        rendered: out,
        exit_code: 0,
        summary,
    })
}

/// α-regret table across an α ladder with the two endpoint references:
/// the average (α = 1) regret and the worst-case limit.
pub fn cmd_limits(cfg: &LimitsConfig) -> Result<CommandOutput> {
    let pred = cfg.predictor.build(None, cfg.setup)?;
    let theta = [1.0 - cfg.theta, cfg.theta];
    let (batch, worst, values) = run_in_pool(cfg.workers, || -> Result<_> {
        let batch = batch_regret(&pred, &theta);
        let worst = worst_case_regret(&pred, &theta);
        let values = cfg
            .alphas
            .iter()
            .map(|&a| alpha_batch_regret(&pred, &theta, a))
            .collect::<Result<Vec<f64>>>()?;
        Ok((batch, worst, values))
    })??;

    let mut out = String::new();
    for line in cfg.echo_lines() {
        writeln!(out, "# {line}").expect("string write");
    }
    let unit = cfg.unit.label();
    writeln!(
        out,
        "alpha,alpha_regret_{unit},batch_regret_{unit},worst_case_regret_{unit}"
    )
    .expect("string write");
    for (&a, &v) in cfg.alphas.iter().zip(&values) {
        writeln!(
            out,
            "{a},{:.16e},{:.16e},{:.16e}",
            cfg.unit.convert(v),
            cfg.unit.convert(batch),
            cfg.unit.convert(worst)
        )
        .expect("string write");
    }
    let mut summary = vec![format!(
        "batch regret {:.6}, worst case {:.6} {}; alpha sweep spans [{:.6}, {:.6}]",
        cfg.unit.convert(batch),
        cfg.unit.convert(worst),
        cfg.unit.label(),
        cfg.unit.convert(values.first().copied().unwrap_or(f64::NAN)),
        cfg.unit.convert(values.last().copied().unwrap_or(f64::NAN)),
    )];
    summary.extend(pred.notes().iter().map(|n| format!("note: {n}")));
    Ok(CommandOutput {
        rendered: out,
        exit_code: 0,
        summary,
    })
}

/// One named agreement check: the worst absolute discrepancy observed and
/// the tolerance it must stay under.
#[derive(Debug, Clone)]
pub struct OracleCheck {
    pub name: String,
    pub worst: f64,
    pub tol: f64,
    pub pass: bool,
}

impl OracleCheck {
    fn new(name: impl Into<String>, worst: f64, tol: f64) -> OracleCheck {
        OracleCheck {
            name: name.into(),
            worst,
            tol,
            pass: worst <= tol,
        }
    }
}

/// Outcome of the full oracle agreement suite.
#[derive(Debug, Clone)]
pub struct OracleCheckReport {
    pub checks: Vec<OracleCheck>,
}

impl OracleCheckReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// The standard 5-point binary grid the agreement suite sweeps.
pub fn check_grid() -> Result<Arc<ParamGrid>> {
    Ok(Arc::new(ParamGrid::binary(&[0.1, 0.3, 0.5, 0.7, 0.9])?))
}

/// Every guarded (n, ℓ) combination the agreement suite covers.
pub fn check_setups() -> Result<Vec<BatchSetup>> {
    let mut setups = Vec::new();
    for n in [0usize, 1, 2] {
        for ell in [1usize, 2, 3] {
            setups.push(BatchSetup::binary(n, ell)?);
        }
    }
    Ok(setups)
}

/// The predictor battery for one setup: a mixture, both standard add-β
/// variants, and two α-NML orders, all over the 5-point grid.
pub fn check_predictors(grid: &Arc<ParamGrid>, setup: BatchSetup) -> Result<Vec<Predictor>> {
    Ok(vec![
        Predictor::mixture(Prior::uniform(Arc::clone(grid)), setup)?,
        Predictor::add_beta(0.5, setup)?,
        Predictor::add_beta(1.0, setup)?,
        Predictor::alpha_nml(Prior::uniform(Arc::clone(grid)), 2.0, setup)?,
        Predictor::alpha_nml(Prior::uniform(Arc::clone(grid)), 4.0, setup)?,
    ])
}

/// Regret and mutual-information agreement against exhaustive enumeration:
/// every guarded setup, every predictor variant, every grid point, α ∈
/// {1, 2, 4}, all within 1e-10.
pub fn oracle_regret_mi_checks() -> Result<Vec<OracleCheck>> {
    let grid = check_grid()?;
    let mut worst_batch = 0.0f64;
    let mut worst_alpha = 0.0f64;
    let mut worst_mi = 0.0f64;
    for setup in check_setups()? {
        for pred in check_predictors(&grid, setup)? {
            for j in 0..grid.len() {
                let theta = grid.point(j);
                let reference = oracle_batch_regret(&pred, theta, setup)?;
                worst_batch = worst_batch.max((batch_regret(&pred, theta) - reference).abs());
                worst_alpha =
                    worst_alpha.max((alpha_batch_regret(&pred, theta, 1.0)? - reference).abs());
                for alpha in [2.0, 4.0] {
                    let reference = oracle_alpha_batch_regret(&pred, theta, alpha, setup)?;
                    worst_alpha = worst_alpha
                        .max((alpha_batch_regret(&pred, theta, alpha)? - reference).abs());
                }
            }
        }
        let prior = Prior::uniform(Arc::clone(&grid));
        worst_mi = worst_mi
            .max((cond_mutual_info(&prior, setup)? - oracle_cond_mi(&prior, setup)?).abs());
    }
    Ok(vec![
        OracleCheck::new("batch regret vs sequence enumeration", worst_batch, 1e-10),
        OracleCheck::new(
            "alpha regret vs sequence enumeration (alpha in {1,2,4})",
            worst_alpha,
            1e-10,
        ),
        OracleCheck::new("mutual information vs joint-table sum", worst_mi, 1e-10),
    ])
}

/// Sibson-information agreement: the closed form vs the dual-route direct
/// minimization, the α-NML predictor vs the descent minimizers, and the
/// internal route/stationarity flags.
pub fn oracle_sibson_checks() -> Result<Vec<OracleCheck>> {
    let grid = Arc::new(ParamGrid::binary(&[0.2, 0.6])?);
    let prior = Prior::uniform(Arc::clone(&grid));
    let mut worst_value = 0.0f64;
    let mut worst_minimizer = 0.0f64;
    let mut worst_route = 0.0f64;
    let mut worst_residual = 0.0f64;
    for (n, ell) in [(1usize, 1usize), (1, 2), (2, 1)] {
        let setup = BatchSetup::binary(n, ell)?;
        for alpha in [2.0, 4.0] {
            let out = oracle_sibson_min(&prior, alpha, setup)?;
            worst_value =
                worst_value.max((out.value - cond_sibson(&prior, alpha, setup)?).abs());
            worst_route = worst_route.max(out.route_gap);
            worst_residual = worst_residual.max(out.stationarity_residual);
            let test_classes: Vec<CountStat> = (0..=ell)
                .map(|ones| CountStat::binary((ell - ones) as u64, ones as u64))
                .collect();
            for (x, q) in out.train_sequences.iter().zip(&out.minimizers) {
                let q = q.as_ref().expect("interior grid: every sequence reachable");
                let cx = CountStat::from_sequence(x, 2)?;
                // Test sequences enumerate in base-2 counting order, so a
                // sequence's count class is the popcount of its index.
                for (y, &qy) in q.iter().enumerate() {
                    let ones = y.count_ones() as usize;
                    let nml =
                        alpha_nml_predict(&prior, alpha, &cx, &test_classes[ones])?.exp();
                    worst_minimizer = worst_minimizer.max((qy - nml).abs());
                }
            }
        }
    }
    Ok(vec![
        OracleCheck::new("sibson closed form vs direct minimization", worst_value, 1e-7),
        OracleCheck::new("alpha-nml predictor vs descent minimizer", worst_minimizer, 1e-7),
        OracleCheck::new("sibson minimization internal route gap", worst_route, 1e-7),
        OracleCheck::new(
            "descent stationarity residual",
            worst_residual,
            crate::oracle::STATIONARITY_TOL,
        ),
    ])
}

/// Capacity-solver agreement against exhaustive prior search: the α = 1
/// solver on two- and three-point grids vs the simplex lattice (step 1e-3,
/// bracket 2e-3), and the α ∈ {2, 4} solver on a two-point grid vs a fine
/// scalar line search (step 1e-4, bracket 1e-4).
pub fn oracle_capacity_checks() -> Result<Vec<OracleCheck>> {
    let setup = BatchSetup::binary(1, 1)?;
    let mut worst_mi_gap = 0.0f64;
    for thetas in [&[0.2, 0.8][..], &[0.2, 0.5, 0.8][..]] {
        let grid = Arc::new(ParamGrid::binary(thetas)?);
        let solved = capacity_solve(Arc::clone(&grid), setup, 1e-8, 10_000)?;
        let reference = oracle_capacity(&grid, setup, 1.0, 1e-3)?;
        worst_mi_gap = worst_mi_gap.max((solved.capacity - reference).abs());
    }
    let mut worst_alpha_gap = 0.0f64;
    let grid = Arc::new(ParamGrid::binary(&[0.2, 0.8])?);
    for alpha in [2.0, 4.0] {
        let solved = alpha_capacity_solve(Arc::clone(&grid), setup, alpha, 1e-8, 10_000)?;
        let reference = oracle_capacity(&grid, setup, alpha, 1e-4)?;
        worst_alpha_gap = worst_alpha_gap.max((solved.capacity - reference).abs());
    }
    Ok(vec![
        OracleCheck::new("capacity solve vs simplex lattice", worst_mi_gap, 2e-3),
        OracleCheck::new("alpha capacity solve vs line search", worst_alpha_gap, 1e-4),
    ])
}

/// The full agreement suite, in reporting order.
pub fn run_oracle_checks() -> Result<OracleCheckReport> {
    let mut checks = oracle_regret_mi_checks()?;
    checks.extend(oracle_sibson_checks()?);
    checks.extend(oracle_capacity_checks()?);
    Ok(OracleCheckReport { checks })
}

/// Runs the agreement suite and renders one line per check plus an overall
/// verdict. A failed check exits 2.
pub fn cmd_oracle_check(cfg: &OracleCheckConfig) -> Result<CommandOutput> {
    let report = run_in_pool(cfg.workers, run_oracle_checks)??;
    let mut out = String::new();
    writeln!(out, "# oracle agreement suite").expect("string write");
    for check in &report.checks {
        writeln!(
            out,
            "{} {:<55} worst {:>9.2e}  tol {:.0e}",
            if check.pass { "PASS" } else { "FAIL" },
            check.name,
            check.worst,
            check.tol
        )
        .expect("string write");
    }
    let pass = report.pass();
    writeln!(
        out,
        "OVERALL: {} ({} checks)",
        if pass { "PASS" } else { "FAIL" },
        report.checks.len()
    )
    .expect("string write");
    Ok(CommandOutput {
        rendered: out,
        exit_code: if pass { 0 } else { 2 },
        summary: vec![format!(
            "oracle agreement suite: {}",
            if pass { "PASS" } else { "FAIL" }
        )],
    })
}
