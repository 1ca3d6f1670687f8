//! Empirical checks of the homogeneous condition:
//! `E[M_k] = N_u p_i p_suc` and `E[\hat M_k / M_k] = E[N_{k-1}] / N_u`.

use super::experiment::{Summary, TrialStats};
use super::slot::run_slot;
use super::world::place_nodes;
use super::SimParams;
use crate::analytic;
use crate::config::{Mode, NetworkConfig};
use crate::error::{Error, Result};

/// Fewest trials for which the diagnostics are computed.
pub const MIN_DIAGNOSTIC_TRIALS: u64 = 1000;

/// Reference value of `E[M_k]`, with its standard error (zero when exact).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuccessReference {
    pub expected_m: f64,
    pub se: f64,
}

/// `E[M_k]` predicted by the closed forms: `N_u p_i p_suc^B` (broadcast) or
/// `N_s p_i p_suc^U` (unicast).
pub fn analytic_reference(
    cfg: &NetworkConfig<f64>,
    mu: f64,
    mode: Mode,
) -> Result<SuccessReference> {
    let expected_m = f64::from(cfg.n_mu) * analytic::slot_rate(cfg, mu, mode)?;
    Ok(SuccessReference {
        expected_m,
        se: 0.0,
    })
}

/// `E[M_k]` of the simulated network itself, from `samples` independent
/// uniform placements evaluated for a single slot.
///
/// Uses a seed domain disjoint from [`run_experiment`](super::run_experiment)
/// streams with the same `seed`.
pub fn stationary_reference(
    cfg: &NetworkConfig<f64>,
    params: &SimParams,
    mu: f64,
    mode: Mode,
    samples: u64,
    seed: u64,
) -> Result<SuccessReference> {
    params.validate()?;
    if samples < 2 {
        return Err(Error::InvalidConfig(
            "need at least two calibration samples".into(),
        ));
    }
    let domain = seed ^ 0x5EED_CA1B_4A7E_0001;
    let mut summary = Summary::default();
    for i in 0..samples {
        let mut world = place_nodes(cfg, params, domain, i);
        summary.push(f64::from(
            run_slot(&mut world, cfg, params.uplink, mu, mode).m,
        ));
    }
    Ok(SuccessReference {
        expected_m: summary.mean,
        se: summary.se(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotDiagnostic {
    pub k: usize,
    pub mean_m: f64,
    pub reference_m: f64,
    /// z-score of `mean(M_k) - reference`.
    pub z_first: f64,
    /// Mean of `\hat M_k / M_k` over trials with `M_k > 0`.
    pub conditional_ratio: f64,
    /// Mean of the paired gap `\hat M_k / M_k - N_{k-1} / N_u`.
    pub gap: f64,
    /// z-score of the paired gap.
    pub z_second: f64,
    /// Trials with `M_k > 0`.
    pub informative_trials: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneityReport {
    pub slots: Vec<SlotDiagnostic>,
}

impl HomogeneityReport {
    pub fn max_abs_z_first(&self) -> f64 {
        self.slots
            .iter()
            .map(|s| s.z_first.abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_z_second(&self) -> f64 {
        self.slots
            .iter()
            .map(|s| s.z_second.abs())
            .fold(0.0, f64::max)
    }

    /// Both equalities within `bound` standard errors at every slot.
    pub fn holds_within(&self, bound: f64) -> bool {
        self.max_abs_z_first() <= bound && self.max_abs_z_second() <= bound
    }
}

fn z_score(diff: f64, se: f64) -> f64 {
    if se > 0.0 {
        diff / se
    } else if diff == 0.0 {
        0.0
    } else {
        // Degenerate spread with a nonzero gap; keep the value finite.
        diff.signum() * f64::MAX.sqrt()
    }
}

/// Per-slot z-scores for both equalities of the homogeneous condition.
///
/// The second equality is tested through the paired per-trial gap
/// `\hat M_k / M_k - N_{k-1} / N_u`, whose expectation vanishes under the
/// condition whatever the distribution of `N_{k-1}`.
pub fn homogeneity_diagnostics(
    stats: &TrialStats,
    reference: SuccessReference,
) -> Result<HomogeneityReport> {
    if stats.trials < MIN_DIAGNOSTIC_TRIALS {
        return Err(Error::InsufficientData(format!(
            "{} trials; homogeneity diagnostics need at least {MIN_DIAGNOSTIC_TRIALS}",
            stats.trials
        )));
    }
    let mut slots = Vec::with_capacity(stats.slots.len());
    for (i, s) in stats.slots.iter().enumerate() {
        let k = i + 1;
        if s.conditional_ratio.n == 0 {
            return Err(Error::InsufficientData(format!(
                "no trial had a successful reception at slot {k}"
            )));
        }
        let se_first = (s.m.se().powi(2) + reference.se.powi(2)).sqrt();
        slots.push(SlotDiagnostic {
            k,
            mean_m: s.m.mean,
            reference_m: reference.expected_m,
            z_first: z_score(s.m.mean - reference.expected_m, se_first),
            conditional_ratio: s.conditional_ratio.mean,
            gap: s.paired_gap.mean,
            z_second: z_score(s.paired_gap.mean, s.paired_gap.se()),
            informative_trials: s.conditional_ratio.n,
        });
    }
    Ok(HomogeneityReport { slots })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{run_experiment, PowerPlan};

    #[test]
    fn too_few_trials_is_insufficient() {
        let cfg = NetworkConfig::fig2();
        let stats = run_experiment(
            &cfg,
            &SimParams::fig2(),
            &PowerPlan::Constant(0.064),
            Mode::Broadcast,
            2,
            10,
            1,
        )
        .unwrap();
        let reference = analytic_reference(&cfg, 0.064, Mode::Broadcast).unwrap();
        assert!(matches!(
            homogeneity_diagnostics(&stats, reference),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn silent_slot_is_insufficient() {
        // A vanishing power leaves every trial without a reception.
        let cfg = NetworkConfig {
            beta: 1e6,
            ..NetworkConfig::fig2()
        };
        let stats = run_experiment(
            &cfg,
            &SimParams::fig2(),
            &PowerPlan::Constant(1e-9),
            Mode::Broadcast,
            1,
            1000,
            1,
        )
        .unwrap();
        let reference = SuccessReference {
            expected_m: 0.0,
            se: 0.0,
        };
        let err = homogeneity_diagnostics(&stats, reference).unwrap_err();
        assert!(matches!(err, Error::InsufficientData(ref m) if m.contains("slot 1")));
    }

    #[test]
    fn z_scores_stay_finite() {
        assert_eq!(z_score(0.0, 0.0), 0.0);
        assert!(z_score(1.0, 0.0).is_finite());
        assert_eq!(z_score(-2.0, 0.5), -4.0);
    }
}
