use rayon::prelude::*;

use super::mobility::step_mobility;
use super::slot::{run_slot, SlotRecord};
use super::world::place_nodes;
use super::SimParams;
use crate::config::{Mode, NetworkConfig};
use crate::error::{Error, Result};

/// Transmit power per slot.
#[derive(Debug, Clone, PartialEq)]
pub enum PowerPlan {
    Constant(f64),
    /// Power of slot `k` is `powers[k - 1]`; the last entry repeats past the end.
    Schedule(Vec<f64>),
}

impl PowerPlan {
    pub fn power(&self, k: usize) -> f64 {
        match self {
            PowerPlan::Constant(mu) => *mu,
            PowerPlan::Schedule(p) => p[(k - 1).min(p.len() - 1)],
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = |mu: f64| mu.is_finite() && mu > 0.0;
        match self {
            PowerPlan::Constant(mu) if !ok(*mu) => Err(Error::InvalidPower(*mu)),
            PowerPlan::Schedule(p) if p.is_empty() => {
                Err(Error::InvalidConfig("empty power schedule".into()))
            }
            PowerPlan::Schedule(p) => match p.iter().find(|&&mu| !ok(mu)) {
                Some(&bad) => Err(Error::InvalidPower(bad)),
                None => Ok(()),
            },
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialRecord {
    pub slots: Vec<SlotRecord>,
    /// Cumulative redundant receptions after each slot.
    pub redundant: Vec<u64>,
}

/// Streaming mean and variance (Welford), fed in a fixed order.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Summary {
    pub n: u64,
    pub mean: f64,
    m2: f64,
}

impl Summary {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    /// Standard error of the mean.
    pub fn se(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            (self.variance() / self.n as f64).sqrt()
        }
    }
}

/// Per-slot aggregates across trials.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SlotStats {
    /// Covered ratio `N_k / N_u`.
    pub ratio: Summary,
    /// `M_k`.
    pub m: Summary,
    /// `\hat M_k`.
    pub m_hat: Summary,
    /// Cumulative redundant receptions.
    pub redundant: Summary,
    /// `\hat M_k / M_k` over trials with `M_k > 0`.
    pub conditional_ratio: Summary,
    /// `\hat M_k / M_k - N_{k-1} / N_u` over trials with `M_k > 0`.
    pub paired_gap: Summary,
}

/// Aggregated results of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialStats {
    pub n_mu: u32,
    pub trials: u64,
    pub mode: Mode,
    pub slots: Vec<SlotStats>,
}

/// Runs trial `trial` of an experiment on its own RNG stream.
pub fn run_trial(
    cfg: &NetworkConfig<f64>,
    params: &SimParams,
    plan: &PowerPlan,
    mode: Mode,
    k_max: usize,
    seed: u64,
    trial: u64,
) -> TrialRecord {
    let mut world = place_nodes(cfg, params, seed, trial);
    let mut slots = Vec::with_capacity(k_max);
    let mut redundant = Vec::with_capacity(k_max);
    let mut total = 0u64;
    for k in 1..=k_max {
        if k > 1 {
            step_mobility(&mut world, params.mobility);
        }
        let rec = run_slot(&mut world, cfg, params.uplink, plan.power(k), mode);
        total += u64::from(rec.m_hat);
        slots.push(rec);
        redundant.push(total);
    }
    TrialRecord { slots, redundant }
}

/// Runs `trials` independent trials of `k_max` slots and aggregates them.
///
/// Trials may execute in parallel; aggregation always proceeds in trial
/// order, so identical inputs give bit-identical statistics.
pub fn run_experiment(
    cfg: &NetworkConfig<f64>,
    params: &SimParams,
    plan: &PowerPlan,
    mode: Mode,
    k_max: usize,
    trials: u64,
    seed: u64,
) -> Result<TrialStats> {
    params.validate()?;
    plan.validate()?;
    if trials == 0 || k_max == 0 {
        return Err(Error::InvalidConfig(
            "trials and k_max must be at least 1".into(),
        ));
    }
    if !(cfg.area > 0.0 && cfg.beta >= 0.0 && cfg.alpha > 2.0) {
        return Err(Error::InvalidConfig(
            "area, beta or alpha out of range".into(),
        ));
    }
    let records: Vec<TrialRecord> = (0..trials)
        .into_par_iter()
        .map(|t| run_trial(cfg, params, plan, mode, k_max, seed, t))
        .collect();

    let n_mu = f64::from(cfg.n_mu.max(1));
    let mut slots = vec![SlotStats::default(); k_max];
    for rec in &records {
        let mut prev_ratio = 0.0;
        for (k, (s, stats)) in rec.slots.iter().zip(slots.iter_mut()).enumerate() {
            let ratio = f64::from(s.covered) / n_mu;
            stats.ratio.push(ratio);
            stats.m.push(f64::from(s.m));
            stats.m_hat.push(f64::from(s.m_hat));
            stats.redundant.push(rec.redundant[k] as f64);
            if s.m > 0 {
                let cond = f64::from(s.m_hat) / f64::from(s.m);
                stats.conditional_ratio.push(cond);
                stats.paired_gap.push(cond - prev_ratio);
            }
            prev_ratio = ratio;
        }
    }
    Ok(TrialStats {
        n_mu: cfg.n_mu,
        trials,
        mode,
        slots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn welford_matches_two_pass() {
        let xs = [3.0, 1.5, 4.25, -2.0, 0.0, 9.5];
        let mut s = Summary::default();
        xs.iter().for_each(|&x| s.push(x));
        let mean = xs.iter().sum::<f64>() / 6.0;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 5.0;
        assert!((s.mean - mean).abs() < 1e-14);
        assert!((s.variance() - var).abs() < 1e-12);
        assert!((s.se() - (var / 6.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn single_trial_is_reproducible() {
        let cfg = NetworkConfig::fig2();
        let params = SimParams::fig2();
        let plan = PowerPlan::Constant(0.064);
        let a = run_trial(&cfg, &params, &plan, Mode::Broadcast, 1, 42, 0);
        let b = run_trial(&cfg, &params, &plan, Mode::Broadcast, 1, 42, 0);
        assert_eq!(a, b);
        assert_eq!(a.slots.len(), 1);
        assert_eq!(a.slots[0].m_hat, 0);
    }

    #[test]
    fn trial_invariants() {
        let cfg = NetworkConfig::fig2();
        let rec = run_trial(
            &cfg,
            &SimParams::fig2(),
            &PowerPlan::Constant(0.064),
            Mode::Broadcast,
            30,
            9,
            1,
        );
        let mut prev = 0;
        let mut redundant = 0;
        for (s, &r) in rec.slots.iter().zip(&rec.redundant) {
            assert!(s.m_hat <= s.m && s.covered >= prev && s.covered <= cfg.n_mu);
            assert_eq!(s.covered, prev + s.newly_covered());
            redundant += u64::from(s.m_hat);
            assert_eq!(r, redundant);
            prev = s.covered;
        }
    }

    #[test]
    fn experiment_is_deterministic() {
        let cfg = NetworkConfig::fig2();
        let params = SimParams::fig2();
        let plan = PowerPlan::Schedule(vec![0.064, 0.03]);
        let a = run_experiment(&cfg, &params, &plan, Mode::Broadcast, 4, 20, 5).unwrap();
        let b = run_experiment(&cfg, &params, &plan, Mode::Broadcast, 4, 20, 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_plans() {
        let cfg = NetworkConfig::fig2();
        let params = SimParams::fig2();
        assert!(run_experiment(
            &cfg,
            &params,
            &PowerPlan::Constant(0.0),
            Mode::Broadcast,
            2,
            2,
            0
        )
        .is_err());
        assert!(run_experiment(
            &cfg,
            &params,
            &PowerPlan::Schedule(vec![]),
            Mode::Broadcast,
            2,
            2,
            0
        )
        .is_err());
        assert!(run_experiment(
            &cfg,
            &params,
            &PowerPlan::Constant(0.1),
            Mode::Broadcast,
            2,
            0,
            0
        )
        .is_err());
    }
}
