use thiserror::Error;

/// Which constraint of the redundancy-minimization problem cannot be met.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Infeasibility {
    /// Coverage ratio reachable with the power cap in `slot_cap` slots.
    pub reachable_ratio: f64,
    pub target_ratio: f64,
    pub slot_cap: u32,
    /// Slots needed at the power cap, `None` when the cap never reaches the target.
    pub slots_needed_at_cap: Option<u64>,
    /// Power needed to meet the target within `slot_cap` slots, `None` when no power suffices.
    pub power_needed_at_slot_cap: Option<f64>,
}

impl std::fmt::Display for Infeasibility {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "target ratio {} unreachable: power cap reaches {:.6} within {} slots",
            self.target_ratio, self.reachable_ratio, self.slot_cap
        )?;
        match self.slots_needed_at_cap {
            Some(k) => write!(f, "; slot cap binds (power cap needs {k} slots)")?,
            None => write!(
                f,
                "; power cap binds (target above the power-cap coverage limit)"
            )?,
        }
        match self.power_needed_at_slot_cap {
            Some(p) => write!(
                f,
                "; power cap binds too (needs power {p:.6e} at the slot cap)"
            ),
            None => write!(
                f,
                "; no transmit power reaches the target within the slot cap"
            ),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("closed forms require path-loss exponent 4, got {alpha}")]
    UnsupportedExponent { alpha: f64 },

    #[error("transmit power must be positive and finite, got {0}")]
    InvalidPower(f64),

    #[error(
        "quadrature did not converge within {max_subdivisions} subdivisions \
         (estimate {estimate:.3e}, error {error:.3e})"
    )]
    QuadratureNonConvergence {
        max_subdivisions: usize,
        estimate: f64,
        error: f64,
    },

    #[error("infeasible: {0}")]
    Infeasible(Infeasibility),

    #[error(
        "degenerate power formula: p_i / (1 - (1 - gamma)^(1/k)) = {ratio} <= 1 + kappa = {bound}"
    )]
    DegenerateDenominator { ratio: f64, bound: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub type Result<T> = std::result::Result<T, Error>;
