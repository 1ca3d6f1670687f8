//! Network parameters shared by every module.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Transmission mode of the source nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Each source serves only its nearest mobile user.
    Unicast,
    /// Every mobile user whose SIR clears the target decodes the packet.
    Broadcast,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Unicast => "unicast",
            Mode::Broadcast => "broadcast",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "unicast" => Ok(Mode::Unicast),
            "broadcast" => Ok(Mode::Broadcast),
            other => Err(Error::InvalidConfig(format!("unknown mode `{other}`"))),
        }
    }
}

/// Node counts, geometry and the constraints of the redundancy-minimization problem.
///
/// Densities are derived as `count / area`. The path-loss exponent is carried
/// for the quadrature oracle and the simulator; closed forms only accept 4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkConfig<T> {
    /// Base stations.
    pub n_bs: u32,
    /// Mobile users (potential receivers).
    pub n_mu: u32,
    /// Mobile source nodes.
    pub n_src: u32,
    /// Network area in square meters.
    pub area: T,
    /// Target SIR, linear scale.
    pub beta: T,
    /// Path-loss exponent.
    pub alpha: T,
    /// Maximum source transmit power, normalized to the MU uplink power.
    pub power_cap: T,
    /// Maximum number of transmission slots.
    pub slot_cap: u32,
    /// Target covered ratio, in `[0, 1)`.
    pub target_ratio: T,
}

impl<T: Real> NetworkConfig<T> {
    /// Parameters of the Figure-2 scenario with a unit target SIR.
    pub fn fig2() -> Self {
        NetworkConfig {
            n_bs: 8,
            n_mu: 400,
            n_src: 4,
            area: T::lit(2000.0 * 2000.0),
            beta: T::one(),
            alpha: T::lit(4.0),
            power_cap: T::lit(0.064),
            slot_cap: 100,
            target_ratio: T::lit(0.9),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n_bs == 0 || self.n_mu == 0 || self.n_src == 0 {
            return bad(format!(
                "node counts must be positive (n_bs={}, n_mu={}, n_src={})",
                self.n_bs, self.n_mu, self.n_src
            ));
        }
        if !(self.area.is_finite() && self.area > T::zero()) {
            return bad(format!("area must be positive, got {}", self.area));
        }
        if !(self.beta.is_finite() && self.beta >= T::zero()) {
            return bad(format!("beta must be nonnegative, got {}", self.beta));
        }
        if !(self.alpha.is_finite() && self.alpha > T::lit(2.0)) {
            return bad(format!("alpha must exceed 2, got {}", self.alpha));
        }
        if !(self.power_cap.is_finite() && self.power_cap > T::zero()) {
            return bad(format!(
                "power_cap must be positive, got {}",
                self.power_cap
            ));
        }
        if self.slot_cap == 0 {
            return bad("slot_cap must be at least 1".into());
        }
        if !(self.target_ratio >= T::zero() && self.target_ratio < T::one()) {
            return bad(format!(
                "target_ratio must lie in [0, 1), got {}",
                self.target_ratio
            ));
        }
        Ok(())
    }

    /// Fails unless the path-loss exponent is exactly 4.
    pub fn require_closed_form(&self) -> Result<()> {
        if self.alpha != T::lit(4.0) {
            return Err(Error::UnsupportedExponent {
                alpha: self.alpha.as_f64(),
            });
        }
        Ok(())
    }

    pub fn density_bs(&self) -> T {
        T::from_count(self.n_bs.into()) / self.area
    }

    pub fn density_mu(&self) -> T {
        T::from_count(self.n_mu.into()) / self.area
    }

    pub fn density_src(&self) -> T {
        T::from_count(self.n_src.into()) / self.area
    }

    /// Side length of the square network.
    pub fn side(&self) -> T {
        self.area.sqrt()
    }

    /// Same counts scaled by `factor` (rounded, at least one node each).
    pub fn scaled_counts(&self, factor: f64) -> Self {
        let scale = |n: u32| ((n as f64 * factor).round() as u32).max(1);
        NetworkConfig {
            n_bs: scale(self.n_bs),
            n_mu: scale(self.n_mu),
            n_src: scale(self.n_src),
            ..*self
        }
    }
}

/// Converts a target SIR in dB to linear scale.
pub fn db_to_linear<T: Real>(db: T) -> T {
    T::lit(10.0).powf(db / T::lit(10.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig2_is_valid() {
        let cfg = NetworkConfig::<f64>::fig2();
        cfg.validate().unwrap();
        cfg.require_closed_form().unwrap();
        assert_eq!(cfg.side(), 2000.0);
        assert_eq!(cfg.density_src(), 1e-6);
    }

    #[test]
    fn rejects_out_of_range_fields() {
        let base = NetworkConfig::<f64>::fig2();
        let cases = [
            NetworkConfig { n_bs: 0, ..base },
            NetworkConfig { area: 0.0, ..base },
            NetworkConfig { beta: -1.0, ..base },
            NetworkConfig { alpha: 2.0, ..base },
            NetworkConfig {
                power_cap: 0.0,
                ..base
            },
            NetworkConfig {
                slot_cap: 0,
                ..base
            },
            NetworkConfig {
                target_ratio: 1.0,
                ..base
            },
        ];
        for cfg in cases {
            assert!(
                matches!(cfg.validate(), Err(Error::InvalidConfig(_))),
                "{cfg:?}"
            );
        }
    }

    #[test]
    fn closed_form_needs_alpha_four() {
        let cfg = NetworkConfig::<f64> {
            alpha: 3.5,
            ..NetworkConfig::fig2()
        };
        cfg.validate().unwrap();
        assert_eq!(
            cfg.require_closed_form(),
            Err(Error::UnsupportedExponent { alpha: 3.5 })
        );
    }

    #[test]
    fn db_conversion() {
        assert!((db_to_linear(10.0_f64) - 10.0).abs() < 1e-12);
        assert!((db_to_linear(0.0_f64) - 1.0).abs() < 1e-15);
        assert!((db_to_linear(3.0_f64) - 1.995_262_314_968_879_5).abs() < 1e-12);
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("Broadcast".parse::<Mode>().unwrap(), Mode::Broadcast);
        assert_eq!(" unicast ".parse::<Mode>().unwrap(), Mode::Unicast);
        assert!("multicast".parse::<Mode>().is_err());
    }
}
