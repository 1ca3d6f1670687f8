//! The four subcommands. Each returns CSV text and a plain-text report.

use std::fmt::Write as _;

use infospread::analytic::{self, curve_from_rate, idle_probability};
use infospread::optimizer::{
    grid_oracle, solve_constant, solve_dynamic, OptimizationResult, Regime,
};
use infospread::oracle::p_suc_numeric;
use infospread::sim::{homogeneity_diagnostics, run_experiment, stationary_reference, PowerPlan};
use infospread::{Config, Mode, Quadrature};

use crate::config::ExperimentConfig;
use crate::csv::{Cell, CsvTable};
use crate::CliError;

/// Result of a command. `failure` is set when the command ran to completion
/// but its verdict is negative; the report is still worth printing.
#[derive(Debug)]
pub struct Output {
    pub csv: String,
    pub report: String,
    pub failure: Option<CliError>,
}

pub const VERIFY_TOLERANCE: f64 = 1e-6;
pub const ORACLE_GRID_SIZE: usize = 10_000;
pub const HOMOGENEITY_BOUND: f64 = 3.0;

/// Points of the closed-form versus quadrature comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyGrid {
    pub mu: Vec<f64>,
    pub beta: Vec<f64>,
    pub density_scale: Vec<f64>,
}

impl Default for VerifyGrid {
    fn default() -> Self {
        VerifyGrid {
            mu: log_space(1e-3, 10.0, 6),
            beta: log_space(0.1, 10.0, 6),
            density_scale: vec![0.5, 1.0, 2.0],
        }
    }
}

impl VerifyGrid {
    pub fn len(&self) -> usize {
        self.mu.len() * self.beta.len() * self.density_scale.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

fn rel_dev(closed: f64, numeric: f64) -> f64 {
    (closed - numeric).abs() / closed.abs()
}

pub fn predict(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    cfg.validate()?;
    let net = &cfg.network;
    net.require_closed_form()?;
    let curve = analytic::coverage_curve(net, cfg.mu, cfg.mode, cfg.k_max)?;
    let mut table = CsvTable::new(&["k", "expected_covered", "ratio", "redundancy"]);
    for (i, &covered) in curve.expected_covered.iter().enumerate() {
        let k = i as u64 + 1;
        table.push(&[
            Cell::Int(k),
            Cell::Real(covered),
            Cell::Real(curve.ratio(i + 1)),
            Cell::Real(analytic::redundancy_from_rate(net.n_mu, curve.rate, k)),
        ])?;
    }
    let mut report = String::new();
    let _ = writeln!(report, "mode: {}", cfg.mode);
    let _ = writeln!(report, "mu: {}", cfg.mu);
    let _ = writeln!(report, "idle probability p_i: {:.9}", curve.p_idle);
    let _ = writeln!(report, "success probability p_suc: {:.9}", curve.p_suc);
    let _ = writeln!(report, "per-slot coverage rate q: {:.9}", curve.rate);
    let _ = writeln!(
        report,
        "ratio after {} slots: {:.9}",
        cfg.k_max,
        curve.ratio(cfg.k_max)
    );
    Ok(Output {
        csv: table.render(),
        report,
        failure: None,
    })
}

pub fn verify(cfg: &ExperimentConfig, grid: &VerifyGrid) -> Result<Output, CliError> {
    cfg.validate()?;
    cfg.network.require_closed_form()?;
    if grid.is_empty() {
        return Err(CliError::Validation("verification grid is empty".into()));
    }
    let spec = Quadrature::default();
    let mut table = CsvTable::new(&[
        "density_scale",
        "mu",
        "beta",
        "closed_unicast",
        "numeric_unicast",
        "rel_dev_unicast",
        "closed_broadcast",
        "numeric_broadcast",
        "rel_dev_broadcast",
    ]);
    let mut worst = (0.0_f64, String::new());
    for &scale in &grid.density_scale {
        for &beta in &grid.beta {
            let net = Config {
                beta,
                ..cfg.network.scaled_counts(scale)
            };
            for &mu in &grid.mu {
                let mut row = vec![Cell::Real(scale), Cell::Real(mu), Cell::Real(beta)];
                for mode in [Mode::Unicast, Mode::Broadcast] {
                    let closed = analytic::p_suc(&net, mu, mode)?;
                    let numeric = p_suc_numeric(&net, mu, mode, &spec)?;
                    let dev = rel_dev(closed, numeric);
                    if dev > worst.0 || worst.1.is_empty() {
                        worst = (
                            dev,
                            format!("{mode} at scale {scale}, mu {mu:.6e}, beta {beta:.6e}"),
                        );
                    }
                    row.extend([Cell::Real(closed), Cell::Real(numeric), Cell::Real(dev)]);
                }
                table.push(&row)?;
            }
        }
    }
    let pass = worst.0 <= VERIFY_TOLERANCE;
    let mut report = String::new();
    let _ = writeln!(report, "grid points: {} (both modes each)", grid.len());
    let _ = writeln!(
        report,
        "max relative deviation: {:.3e} ({})",
        worst.0, worst.1
    );
    let _ = writeln!(report, "tolerance: {VERIFY_TOLERANCE:e}");
    let _ = writeln!(report, "verdict: {}", if pass { "PASS" } else { "FAIL" });
    let failure = (!pass).then(|| {
        CliError::OracleMismatch(format!(
            "max relative deviation {:.3e} exceeds {VERIFY_TOLERANCE:e}",
            worst.0
        ))
    });
    Ok(Output {
        csv: table.render(),
        report,
        failure,
    })
}

/// Analytic coverage ratios per slot; falls back on quadrature when `alpha != 4`.
fn analytic_ratios(cfg: &ExperimentConfig) -> Result<(Vec<f64>, f64), CliError> {
    let net = &cfg.network;
    let p_suc = if net.require_closed_form().is_ok() {
        analytic::p_suc(net, cfg.mu, cfg.mode)?
    } else {
        p_suc_numeric(net, cfg.mu, cfg.mode, &Quadrature::default())?
    };
    let mut rate = idle_probability(net) * p_suc;
    if cfg.mode == Mode::Unicast {
        rate *= f64::from(net.n_src) / f64::from(net.n_mu);
    }
    let n_mu = f64::from(net.n_mu);
    let ratios = curve_from_rate(net.n_mu, rate, cfg.k_max)
        .into_iter()
        .map(|c| c / n_mu)
        .collect();
    Ok((ratios, rate))
}

pub fn simulate(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    cfg.validate()?;
    let net = &cfg.network;
    let params = cfg.sim_params();
    let (analytic, rate) = analytic_ratios(cfg)?;
    let stats = run_experiment(
        net,
        &params,
        &PowerPlan::Constant(cfg.mu),
        cfg.mode,
        cfg.k_max,
        cfg.trials,
        cfg.seed,
    )?;
    let reference = stationary_reference(net, &params, cfg.mu, cfg.mode, cfg.trials, cfg.seed)?;
    let diag = homogeneity_diagnostics(&stats, reference)?;

    let mut table = CsvTable::new(&[
        "k",
        "mean_ratio",
        "se",
        "analytic_ratio",
        "z_homog_1",
        "z_homog_2",
    ]);
    let mut max_dev: f64 = 0.0;
    for ((s, d), &a) in stats.slots.iter().zip(&diag.slots).zip(&analytic) {
        max_dev = max_dev.max((s.ratio.mean - a).abs());
        table.push(&[
            Cell::Int(d.k as u64),
            Cell::Real(s.ratio.mean),
            Cell::Real(s.ratio.se()),
            Cell::Real(a),
            Cell::Real(d.z_first),
            Cell::Real(d.z_second),
        ])?;
    }

    let closed_m = f64::from(net.n_mu) * rate;
    let mut report = String::new();
    let _ = writeln!(
        report,
        "mode: {}, mobility: {} at {} m/s, slot period {} s, distance: {}, uplink: {}",
        cfg.mode, cfg.mobility, cfg.speed, cfg.slot_period, cfg.distance, cfg.uplink
    );
    let _ = writeln!(
        report,
        "trials: {}, seed: {}, slots: {}",
        cfg.trials, cfg.seed, cfg.k_max
    );
    let _ = writeln!(
        report,
        "max |simulated - analytic| coverage ratio: {max_dev:.6}"
    );
    let _ = writeln!(
        report,
        "per-slot successes E[M_k]: simulated network {:.4} +/- {:.4}, analysis {:.4} (relative bias {:+.4})",
        reference.expected_m,
        reference.se,
        closed_m,
        (reference.expected_m - closed_m) / closed_m
    );
    let _ = writeln!(
        report,
        "max |z| first equality (vs simulated network): {:.3}",
        diag.max_abs_z_first()
    );
    let _ = writeln!(
        report,
        "max |z| second equality (paired gap): {:.3}",
        diag.max_abs_z_second()
    );
    let holds = diag.holds_within(HOMOGENEITY_BOUND);
    let _ = writeln!(
        report,
        "homogeneous condition within {HOMOGENEITY_BOUND} SE at every slot: {}",
        if holds { "yes" } else { "no" }
    );
    Ok(Output {
        csv: table.render(),
        report,
        failure: None,
    })
}

fn describe(report: &mut String, res: &OptimizationResult<f64>) {
    let _ = writeln!(report, "[{}]", res.regime);
    let _ = writeln!(report, "k*: {}", res.k_star);
    match res.regime {
        Regime::ConstantPower => {
            let _ = writeln!(report, "mu*: {:.9e}", res.schedule.powers[0]);
        }
        Regime::DynamicPower => {
            let last = *res.schedule.powers.last().expect("non-empty schedule");
            let _ = writeln!(
                report,
                "schedule: power cap on slots 1..{}, last-slot power {:.9e}",
                res.k_star.saturating_sub(1),
                last
            );
            if let Some(cf) = res.last_slot_closed_forms {
                let _ = writeln!(
                    report,
                    "last-slot closed forms: printed {:.9e} (rel. diff {:.2e}), corrected {:.9e} (rel. diff {:.2e})",
                    cf.printed,
                    rel_dev(last, cf.printed),
                    cf.corrected,
                    rel_dev(last, cf.corrected)
                );
            }
        }
    }
    let _ = writeln!(
        report,
        "predicted final ratio: {:.12}",
        res.predicted_final_ratio
    );
    let _ = writeln!(
        report,
        "predicted redundancy: {:.9}",
        res.predicted_redundancy
    );
}

/// Grid verdict: same `k*`, and nothing on the grid beats the closed form beyond slack.
fn cross_check(
    closed: &OptimizationResult<f64>,
    grid: &OptimizationResult<f64>,
) -> Result<(), String> {
    let slack = 1e-9 * closed.predicted_redundancy.abs().max(1.0);
    if grid.k_star != closed.k_star {
        return Err(format!(
            "{}: grid k* {} differs from {}",
            closed.regime, grid.k_star, closed.k_star
        ));
    }
    if grid.predicted_redundancy < closed.predicted_redundancy - slack {
        return Err(format!(
            "{}: grid redundancy {:.9} below closed-form optimum {:.9}",
            closed.regime, grid.predicted_redundancy, closed.predicted_redundancy
        ));
    }
    Ok(())
}

pub fn optimize(cfg: &ExperimentConfig, oracle: bool) -> Result<Output, CliError> {
    cfg.validate()?;
    let net = &cfg.network;
    let constant = solve_constant(net)?;
    let dynamic = solve_dynamic(net)?;

    let mut report = String::new();
    let _ = writeln!(
        report,
        "broadcast, target ratio {}, power cap {}, slot cap {}",
        net.target_ratio, net.power_cap, net.slot_cap
    );
    describe(&mut report, &constant);
    describe(&mut report, &dynamic);
    let _ = writeln!(
        report,
        "dynamic saves {:.9} redundant receptions",
        constant.predicted_redundancy - dynamic.predicted_redundancy
    );

    let mut failure = None;
    if oracle {
        let mut problems = Vec::new();
        for closed in [&constant, &dynamic] {
            let grid = grid_oracle(net, closed.regime, ORACLE_GRID_SIZE, 1..=net.slot_cap)?;
            let _ = writeln!(
                report,
                "grid oracle ({}, {} powers): k* {}, redundancy {:.9}",
                closed.regime, ORACLE_GRID_SIZE, grid.k_star, grid.predicted_redundancy
            );
            if let Err(e) = cross_check(closed, &grid) {
                problems.push(e);
            }
        }
        let _ = writeln!(
            report,
            "oracle verdict: {}",
            if problems.is_empty() { "PASS" } else { "FAIL" }
        );
        if !problems.is_empty() {
            failure = Some(CliError::OracleMismatch(problems.join("; ")));
        }
    }

    let mut table = CsvTable::new(&[
        "slot",
        "constant_power",
        "constant_ratio",
        "dynamic_power",
        "dynamic_ratio",
    ]);
    let (c, d) = (&constant.schedule, &dynamic.schedule);
    for t in 0..c.len().max(d.len()) {
        // Both regimes share k*, so the schedules have equal length.
        table.push(&[
            Cell::Int(t as u64 + 1),
            Cell::Real(c.powers[t]),
            Cell::Real(c.per_slot_ratio[t]),
            Cell::Real(d.powers[t]),
            Cell::Real(d.per_slot_ratio[t]),
        ])?;
    }
    Ok(Output {
        csv: table.render(),
        report,
        failure,
    })
}
