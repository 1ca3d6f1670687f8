//! Discrete-slot Monte Carlo simulation of the spreading process.
//!
//! Each trial places MUs, sources and base stations uniformly on a square,
//! then alternates mobility steps with transmission slots. Trials use their
//! own ChaCha stream so results do not depend on execution order.

mod diagnostics;
mod experiment;
mod mobility;
mod slot;
mod world;

use std::fmt;
use std::str::FromStr;

pub use diagnostics::{
    analytic_reference, homogeneity_diagnostics, stationary_reference, HomogeneityReport,
    SlotDiagnostic, SuccessReference, MIN_DIAGNOSTIC_TRIALS,
};
pub use experiment::{
    run_experiment, run_trial, PowerPlan, SlotStats, Summary, TrialRecord, TrialStats,
};
pub use mobility::{reflect, step_mobility};
pub use slot::{run_slot, SlotRecord};
pub use world::{place_nodes, Point, SimWorld};

use crate::error::Error;

/// Node movement between slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mobility {
    /// Every position redrawn uniformly each slot.
    Iid,
    /// Fresh uniform heading each slot, straight travel of `speed * slot_period`
    /// with specular reflection at the boundary.
    RandomDirection,
}

/// How distances between nodes are measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DistanceMetric {
    /// Wrap-around distance on the square, emulating a stationary unbounded network.
    Torus,
    /// Plain Euclidean distance inside the square.
    Bounded,
}

/// Where the cellular uplink interferers come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UplinkMode {
    /// Each MU is busy independently with probability `1 - p_i`; the
    /// interferers are an independent uniform set of `N_b` transmitters.
    AnalysisMatched,
    /// Each base station schedules one uniformly chosen MU from its Voronoi
    /// cell; those MUs are busy and are the interferers.
    Structural,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimParams {
    pub mobility: Mobility,
    /// Node speed in m/s (random-direction mobility).
    pub speed: f64,
    /// Slot period `T` in seconds.
    pub slot_period: f64,
    pub distance: DistanceMetric,
    pub uplink: UplinkMode,
}

impl SimParams {
    /// Random-direction mobility at 5 m/s with a 600 s period on the torus.
    pub fn fig2() -> Self {
        SimParams {
            mobility: Mobility::RandomDirection,
            speed: 5.0,
            slot_period: 600.0,
            distance: DistanceMetric::Torus,
            uplink: UplinkMode::AnalysisMatched,
        }
    }

    pub fn validate(&self) -> crate::Result<()> {
        if !(self.speed.is_finite() && self.speed >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "speed must be nonnegative, got {}",
                self.speed
            )));
        }
        if !(self.slot_period.is_finite() && self.slot_period > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "slot_period must be positive, got {}",
                self.slot_period
            )));
        }
        Ok(())
    }
}

macro_rules! keyword_enum {
    ($ty:ident { $($variant:ident => $name:literal),+ $(,)? }) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $($ty::$variant => $name),+ })
            }
        }

        impl FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> crate::Result<Self> {
                match s.trim().to_ascii_lowercase().as_str() {
                    $($name => Ok($ty::$variant),)+
                    other => Err(Error::InvalidConfig(format!(
                        concat!("unknown ", stringify!($ty), " `{}`"), other
                    ))),
                }
            }
        }
    };
}

keyword_enum!(Mobility { Iid => "iid", RandomDirection => "random_direction" });
keyword_enum!(DistanceMetric { Torus => "torus", Bounded => "bounded" });
keyword_enum!(UplinkMode { AnalysisMatched => "analysis_matched", Structural => "structural" });
