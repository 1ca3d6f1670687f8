//! Redundancy minimization over transmit power and slot count (broadcast mode).
//!
//! Both regimes pick the smallest slot count that meets the target at the
//! power cap. The constant-power regime then lowers the power until the
//! target is met with equality; the dynamic regime keeps the cap on every
//! slot but the last and trims only the final slot's power.

use rayon::prelude::*;

use crate::analytic::{
    covered_ratio, idle_probability, kappa, p_suc_broadcast, redundancy_from_rate,
};
use crate::config::{Mode, NetworkConfig};
use crate::error::{Error, Infeasibility, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    ConstantPower,
    DynamicPower,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::ConstantPower => "constant",
            Regime::DynamicPower => "dynamic",
        })
    }
}

/// Per-slot transmit powers and the covered ratio predicted after each slot.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSchedule<T> {
    pub powers: Vec<T>,
    pub per_slot_ratio: Vec<T>,
}

impl<T: Real> PowerSchedule<T> {
    pub fn len(&self) -> usize {
        self.powers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.powers.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult<T> {
    pub regime: Regime,
    pub k_star: u32,
    pub schedule: PowerSchedule<T>,
    pub predicted_redundancy: T,
    pub predicted_final_ratio: T,
    /// Dynamic regime only: the last-slot power from the printed closed form
    /// and from the corrected inversion formula, for comparison with the
    /// bisection result stored in the schedule.
    pub last_slot_closed_forms: Option<LastSlotClosedForms<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LastSlotClosedForms<T> {
    pub printed: T,
    pub corrected: T,
}

/// Outcome of running a power schedule through the coverage recurrence.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleOutcome<T> {
    pub final_ratio: T,
    pub redundancy: T,
    pub per_slot_ratio: Vec<T>,
}

/// Predicted coverage and redundancy for slot-varying broadcast powers.
///
/// `R_t = R_{t-1} + (1 - R_{t-1}) q_t` and each slot adds `N_u q_t R_{t-1}`
/// redundant receptions, where `q_t = p_i p_suc(mu_t)`.
pub fn evaluate_schedule<T: Real>(
    cfg: &NetworkConfig<T>,
    powers: &[T],
) -> Result<ScheduleOutcome<T>> {
    if let Some(&bad) = powers
        .iter()
        .find(|&&p| !(p > T::zero() && p <= cfg.power_cap))
    {
        return Err(Error::InvalidPower(bad.as_f64()));
    }
    let p_idle = idle_probability(cfg);
    let nu = T::from_count(cfg.n_mu.into());
    let mut ratio = T::zero();
    let mut redundancy = T::zero();
    let mut per_slot_ratio = Vec::with_capacity(powers.len());
    for &mu in powers {
        let q = p_idle * p_suc_broadcast(cfg, mu)?;
        redundancy = redundancy + nu * q * ratio;
        ratio = ratio + (T::one() - ratio) * q;
        per_slot_ratio.push(ratio);
    }
    Ok(ScheduleOutcome {
        final_ratio: ratio,
        redundancy,
        per_slot_ratio,
    })
}

fn broadcast_rate<T: Real>(cfg: &NetworkConfig<T>, mu: T) -> Result<T> {
    Ok(idle_probability(cfg) * p_suc_broadcast(cfg, mu)?)
}

/// Smallest `k >= 1` with `1 - (1 - rate)^k >= target`, or `None` if the
/// rate is zero and the target positive.
pub fn minimal_slots<T: Real>(rate: T, target: T) -> Option<u64> {
    if target <= T::zero() {
        return Some(1);
    }
    if rate <= T::zero() {
        return None;
    }
    if rate >= T::one() {
        return Some(1);
    }
    let estimate = ((T::one() - target).ln() / (-rate).ln_1p()).ceil();
    let mut k = estimate.to_u64().unwrap_or(u64::MAX).max(1);
    // The logarithm ratio can land one off an integer boundary.
    while k > 1 && covered_ratio(rate, k - 1) >= target {
        k -= 1;
    }
    while covered_ratio(rate, k) < target {
        k += 1;
    }
    Some(k)
}

fn check_feasible<T: Real>(cfg: &NetworkConfig<T>) -> Result<(u32, T)> {
    cfg.validate()?;
    cfg.require_closed_form()?;
    let rate_cap = broadcast_rate(cfg, cfg.power_cap)?;
    let reachable = covered_ratio(rate_cap, cfg.slot_cap.into());
    if reachable >= cfg.target_ratio {
        let k = minimal_slots(rate_cap, cfg.target_ratio).expect("target reachable");
        return Ok((k as u32, rate_cap));
    }
    let per_slot_needed =
        T::one() - (T::one() - cfg.target_ratio).powf(T::from_count(cfg.slot_cap.into()).recip());
    Err(Error::Infeasible(Infeasibility {
        reachable_ratio: reachable.as_f64(),
        target_ratio: cfg.target_ratio.as_f64(),
        slot_cap: cfg.slot_cap,
        slots_needed_at_cap: minimal_slots(rate_cap, cfg.target_ratio),
        power_needed_at_slot_cap: power_for_rate(cfg, per_slot_needed).map(|p| p.as_f64()),
    }))
}

/// Power whose per-slot broadcast rate equals `rate`, if any finite power does.
fn power_for_rate<T: Real>(cfg: &NetworkConfig<T>, rate: T) -> Option<T> {
    let p_idle = idle_probability(cfg);
    let ns = T::from_count(cfg.n_src.into());
    let nb = T::from_count(cfg.n_bs.into());
    let slack = p_idle / rate - kappa(cfg.beta) - T::one();
    if !(slack > T::zero()) {
        return None;
    }
    let root = T::FRAC_PI_2() * cfg.beta.sqrt() * nb / (ns * slack);
    Some(root * root)
}

fn finish<T: Real>(
    cfg: &NetworkConfig<T>,
    regime: Regime,
    powers: Vec<T>,
    closed: Option<LastSlotClosedForms<T>>,
) -> Result<OptimizationResult<T>> {
    let outcome = evaluate_schedule(cfg, &powers)?;
    Ok(OptimizationResult {
        regime,
        k_star: powers.len() as u32,
        predicted_redundancy: outcome.redundancy,
        predicted_final_ratio: outcome.final_ratio,
        schedule: PowerSchedule {
            powers,
            per_slot_ratio: outcome.per_slot_ratio,
        },
        last_slot_closed_forms: closed,
    })
}

/// Optimal constant power and slot count.
///
/// `k*` is the fewest slots meeting the target at the power cap, and
/// `mu* = pi^2 N_b^2 beta / (4 N_s^2 (p_i / (1 - (1 - gamma)^(1/k*)) - kappa - 1)^2)`
/// meets the target with equality in `k*` slots.
pub fn solve_constant<T: Real>(cfg: &NetworkConfig<T>) -> Result<OptimizationResult<T>> {
    let (k_star, _) = check_feasible(cfg)?;
    if cfg.target_ratio <= T::zero() || cfg.beta <= T::zero() {
        // Coverage is either vacuous or independent of power.
        return finish(
            cfg,
            Regime::ConstantPower,
            vec![cfg.power_cap; k_star as usize],
            None,
        );
    }
    let per_slot =
        T::one() - (T::one() - cfg.target_ratio).powf(T::from_count(k_star.into()).recip());
    let ratio = idle_probability(cfg) / per_slot;
    let bound = T::one() + kappa(cfg.beta);
    if ratio <= bound {
        return Err(Error::DegenerateDenominator {
            ratio: ratio.as_f64(),
            bound: bound.as_f64(),
        });
    }
    let mu = power_for_rate(cfg, per_slot)
        .expect("positive slack")
        .min(cfg.power_cap);
    finish(cfg, Regime::ConstantPower, vec![mu; k_star as usize], None)
}

/// Optimal dynamic schedule: the power cap on slots `1..k*`, and on slot `k*`
/// the power that brings the covered ratio exactly to the target.
///
/// The last-slot power is found by bisection on the coverage recurrence;
/// the printed and corrected closed forms are reported alongside.
pub fn solve_dynamic<T: Real>(cfg: &NetworkConfig<T>) -> Result<OptimizationResult<T>> {
    let (k_star, rate_cap) = check_feasible(cfg)?;
    let k = k_star as usize;
    let mut powers = vec![cfg.power_cap; k];
    if cfg.target_ratio <= T::zero() || cfg.beta <= T::zero() {
        return finish(cfg, Regime::DynamicPower, powers, None);
    }
    let before_last = covered_ratio(rate_cap, (k - 1) as u64);
    let residual = cfg.target_ratio - before_last;
    // The final slot must add `residual` out of the uncovered `1 - before_last`.
    let needed_rate = residual / (T::one() - before_last);
    powers[k - 1] = bisect_power(cfg, needed_rate)?;
    let closed = last_slot_closed_forms(cfg, k_star, rate_cap);
    finish(cfg, Regime::DynamicPower, powers, Some(closed))
}

/// Smallest power in `(0, power_cap]` whose broadcast rate reaches `needed_rate`,
/// to a coverage-rate residual of 1e-12.
fn bisect_power<T: Real>(cfg: &NetworkConfig<T>, needed_rate: T) -> Result<T> {
    let tol = T::lit(1e-12);
    let mut hi = cfg.power_cap;
    if broadcast_rate(cfg, hi)? <= needed_rate + tol {
        return Ok(hi);
    }
    let mut lo = T::zero();
    for _ in 0..400 {
        let mid = T::lit(0.5) * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let r = broadcast_rate(cfg, mid)?;
        if r >= needed_rate {
            hi = mid;
            if r - needed_rate <= tol {
                break;
            }
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

fn last_slot_closed_forms<T: Real>(
    cfg: &NetworkConfig<T>,
    k_star: u32,
    rate_cap: T,
) -> LastSlotClosedForms<T> {
    let p_idle = idle_probability(cfg);
    let p_bar = rate_cap / p_idle;
    let kap = kappa(cfg.beta);
    let gamma = cfg.target_ratio;
    let nb = T::from_count(cfg.n_bs.into());
    let ns = T::from_count(cfg.n_src.into());
    let lead = T::PI() * T::PI() * nb * nb * cfg.beta / (T::lit(4.0) * ns * ns);
    let e = T::from_count((k_star - 1).into());
    let uncovered = (T::one() - p_idle * p_bar).powf(e);
    let num = uncovered + gamma - T::one();
    let printed_den = (T::one() - gamma) * (T::one() + kap)
        + (T::one() + kap - p_idle) * (T::one() - p_bar).powf(e);
    let corrected_den =
        (T::one() - gamma) * (T::one() + kap) - (T::one() + kap - p_idle) * uncovered;
    LastSlotClosedForms {
        printed: lead * num * num / (printed_den * printed_den),
        corrected: lead * num * num / (corrected_den * corrected_den),
    }
}

/// Brute-force minimizer over a uniform power grid `mu_cap * j / n`, `j = 1..=n`.
///
/// Constant regime: every schedule `[mu; k]`. Dynamic regime: every schedule
/// `[mu_cap; k - 1] ++ [mu]`. Feasible means the final ratio reaches the
/// target; ties go to the smaller `k`, then the smaller power.
pub fn grid_oracle<T: Real>(
    cfg: &NetworkConfig<T>,
    regime: Regime,
    power_grid_size: usize,
    k_range: std::ops::RangeInclusive<u32>,
) -> Result<OptimizationResult<T>> {
    cfg.validate()?;
    cfg.require_closed_form()?;
    if power_grid_size == 0 {
        return Err(Error::InvalidConfig(
            "power grid must have at least one point".into(),
        ));
    }
    let k_lo = (*k_range.start()).max(1);
    let k_hi = (*k_range.end()).min(cfg.slot_cap);
    let p_idle = idle_probability(cfg);
    let grid: Vec<T> = (1..=power_grid_size)
        .map(|j| {
            (cfg.power_cap * T::from_count(j as u64) / T::from_count(power_grid_size as u64))
                .min(cfg.power_cap)
        })
        .collect();
    let rates: Vec<T> = grid
        .iter()
        .map(|&mu| Ok(p_idle * p_suc_broadcast(cfg, mu)?))
        .collect::<Result<_>>()?;
    let rate_cap = rates[power_grid_size - 1];
    let nu = T::from_count(cfg.n_mu.into());

    // Best (redundancy, grid index) per k, evaluated in parallel and reduced in k order.
    let per_k: Vec<Option<(T, usize)>> = (k_lo..=k_hi)
        .into_par_iter()
        .map(|k| {
            let k64 = u64::from(k);
            let mut best: Option<(T, usize)> = None;
            for (j, &q) in rates.iter().enumerate() {
                let (ratio, red) = match regime {
                    Regime::ConstantPower => (
                        covered_ratio(q, k64),
                        redundancy_from_rate(cfg.n_mu, q, k64),
                    ),
                    Regime::DynamicPower => {
                        let r0 = covered_ratio(rate_cap, k64 - 1);
                        let red0 = redundancy_from_rate(cfg.n_mu, rate_cap, k64 - 1);
                        (r0 + (T::one() - r0) * q, red0 + nu * q * r0)
                    }
                };
                if ratio >= cfg.target_ratio && best.is_none_or(|(b, _)| red < b) {
                    best = Some((red, j));
                }
            }
            best
        })
        .collect();

    let mut best: Option<(u32, T, usize)> = None;
    for (k, cand) in (k_lo..=k_hi).zip(per_k) {
        if let Some((red, j)) = cand {
            if best.is_none_or(|(_, b, _)| red < b) {
                best = Some((k, red, j));
            }
        }
    }
    let Some((k, _, j)) = best else {
        return Err(check_feasible(cfg).err().unwrap_or_else(|| {
            Error::InvalidConfig("no grid point in the slot range meets the target".into())
        }));
    };
    let mut powers = match regime {
        Regime::ConstantPower => vec![grid[j]; k as usize],
        Regime::DynamicPower => vec![cfg.power_cap; k as usize],
    };
    if regime == Regime::DynamicPower {
        powers[k as usize - 1] = grid[j];
    }
    finish(cfg, regime, powers, None)
}

/// Reduced objective at a coverage-tight optimum: `N_u k p_i p_suc - N_u gamma`.
pub fn reduced_objective<T: Real>(cfg: &NetworkConfig<T>, mu: T, k: u32) -> Result<T> {
    let nu = T::from_count(cfg.n_mu.into());
    Ok(nu * T::from_count(k.into()) * broadcast_rate(cfg, mu)? - nu * cfg.target_ratio)
}

/// Broadcast is the only mode the optimizer models.
pub const MODE: Mode = Mode::Broadcast;
