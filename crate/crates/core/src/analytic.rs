//! Closed-form success probabilities, expected coverage curves and the
//! redundancy objective for path-loss exponent 4 under Rayleigh fading.

use crate::config::{Mode, NetworkConfig};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Expected coverage after each slot for one transmit power and mode.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageCurve<T> {
    pub mode: Mode,
    pub mu: T,
    pub p_suc: T,
    pub p_idle: T,
    pub n_mu: u32,
    /// Per-slot probability that a given uncovered MU becomes covered.
    pub rate: T,
    /// `expected_covered[k - 1]` is the expected covered count after slot `k`.
    pub expected_covered: Vec<T>,
}

impl<T: Real> CoverageCurve<T> {
    /// Expected covered ratio after slot `k` (1-based).
    pub fn ratio(&self, k: usize) -> T {
        self.expected_covered[k - 1] / T::from_count(self.n_mu.into())
    }

    pub fn ratios(&self) -> Vec<T> {
        let n = T::from_count(self.n_mu.into());
        self.expected_covered.iter().map(|&e| e / n).collect()
    }

    pub fn len(&self) -> usize {
        self.expected_covered.len()
    }

    pub fn is_empty(&self) -> bool {
        self.expected_covered.is_empty()
    }
}

/// Probability that a random MU holds no uplink resource block.
pub fn idle_probability<T: Real>(cfg: &NetworkConfig<T>) -> T {
    let nb = T::from_count(cfg.n_bs.into());
    let nu = T::from_count(cfg.n_mu.into());
    let shape = T::lit(3.5);
    let occupied = T::one() - (T::one() + nu / (nb * shape)).powf(-shape);
    T::one() - nb / nu * occupied
}

/// `sqrt(beta) * (pi/2 - atan(1/sqrt(beta)))`, evaluated as `sqrt(beta) * atan(sqrt(beta))`.
pub fn kappa<T: Real>(beta: T) -> T {
    if beta <= T::zero() {
        return T::zero();
    }
    let s = beta.sqrt();
    s * s.atan()
}

fn check_power<T: Real>(mu: T) -> Result<()> {
    if mu.is_finite() && mu > T::zero() {
        Ok(())
    } else {
        Err(Error::InvalidPower(mu.as_f64()))
    }
}

/// Interference-to-signal term of the cellular uplink for transmit power `mu`.
fn uplink_term<T: Real>(cfg: &NetworkConfig<T>, mu: T) -> T {
    T::FRAC_PI_2() * (cfg.beta / mu).sqrt() * T::from_count(cfg.n_bs.into())
}

/// Success probability of the nearest-MU link in unicast mode.
pub fn p_suc_unicast<T: Real>(cfg: &NetworkConfig<T>, mu: T) -> Result<T> {
    cfg.require_closed_form()?;
    check_power(mu)?;
    let nu = T::from_count(cfg.n_mu.into());
    let ns = T::from_count(cfg.n_src.into());
    let src_term = T::FRAC_PI_2() * ns * cfg.beta.sqrt();
    Ok(nu / (nu + uplink_term(cfg, mu) + src_term))
}

/// Success probability of a typical MU served by its nearest source in broadcast mode.
pub fn p_suc_broadcast<T: Real>(cfg: &NetworkConfig<T>, mu: T) -> Result<T> {
    cfg.require_closed_form()?;
    check_power(mu)?;
    let ns = T::from_count(cfg.n_src.into());
    Ok(ns / (ns * (T::one() + kappa(cfg.beta)) + uplink_term(cfg, mu)))
}

pub fn p_suc<T: Real>(cfg: &NetworkConfig<T>, mu: T, mode: Mode) -> Result<T> {
    match mode {
        Mode::Unicast => p_suc_unicast(cfg, mu),
        Mode::Broadcast => p_suc_broadcast(cfg, mu),
    }
}

/// Per-slot fresh-coverage probability `q` of an uncovered MU.
pub fn slot_rate<T: Real>(cfg: &NetworkConfig<T>, mu: T, mode: Mode) -> Result<T> {
    let q = idle_probability(cfg) * p_suc(cfg, mu, mode)?;
    Ok(match mode {
        Mode::Broadcast => q,
        Mode::Unicast => q * T::from_count(cfg.n_src.into()) / T::from_count(cfg.n_mu.into()),
    })
}

/// `1 - (1 - q)^k`, computed through `log1p` so large `k` keeps full accuracy.
pub fn covered_ratio<T: Real>(rate: T, k: u64) -> T {
    match k {
        0 => return T::zero(),
        1 => return rate,
        _ => {}
    }
    -((T::from_count(k) * (-rate).ln_1p()).exp_m1())
}

/// Expected covered counts for slots `1..=k_max` given a per-slot rate.
pub fn curve_from_rate<T: Real>(n_mu: u32, rate: T, k_max: usize) -> Vec<T> {
    let nu = T::from_count(n_mu.into());
    (1..=k_max as u64)
        .map(|k| nu * covered_ratio(rate, k))
        .collect()
}

pub fn coverage_curve<T: Real>(
    cfg: &NetworkConfig<T>,
    mu: T,
    mode: Mode,
    k_max: usize,
) -> Result<CoverageCurve<T>> {
    if k_max == 0 {
        return Err(Error::InvalidConfig("k_max must be at least 1".into()));
    }
    let p_idle = idle_probability(cfg);
    let ps = p_suc(cfg, mu, mode)?;
    let rate = slot_rate(cfg, mu, mode)?;
    Ok(CoverageCurve {
        mode,
        mu,
        p_suc: ps,
        p_idle,
        n_mu: cfg.n_mu,
        rate,
        expected_covered: curve_from_rate(cfg.n_mu, rate, k_max),
    })
}

/// Expected redundant receptions after `k` slots for a per-slot rate:
/// `N_u k q - N_u (1 - (1 - q)^k)`.
pub fn redundancy_from_rate<T: Real>(n_mu: u32, rate: T, k: u64) -> T {
    let nu = T::from_count(n_mu.into());
    let total = nu * T::from_count(k) * rate;
    let fresh = nu * covered_ratio(rate, k);
    (total - fresh).max(T::zero())
}

/// Expected redundant receptions after `k` broadcast slots at power `mu`.
pub fn redundancy<T: Real>(cfg: &NetworkConfig<T>, mu: T, k: u64) -> Result<T> {
    if k == 0 {
        return Err(Error::InvalidConfig("slot count must be at least 1".into()));
    }
    let rate = slot_rate(cfg, mu, Mode::Broadcast)?;
    Ok(redundancy_from_rate(cfg.n_mu, rate, k))
}
