//! Coverage and redundancy analysis for device-to-device information
//! spreading underlaid on the cellular uplink.
//!
//! - [`analytic`]: closed-form success probabilities, coverage curves, redundancy.
//! - [`oracle`]: the same success probabilities by nested adaptive quadrature.
//! - [`optimizer`]: constant and dynamic power control minimizing redundancy.
//! - [`sim`]: Monte Carlo simulator with i.i.d. and random-direction mobility.
//!
//! The analytic layers are generic over [`Real`]; the aliases below fix the scalar.

// `!(x > 0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod config;
pub mod error;
pub mod optimizer;
pub mod oracle;
pub mod quadrature;
pub mod scalar;
pub mod sim;

pub use config::{Mode, NetworkConfig};
pub use error::{Error, Infeasibility, Result};
pub use scalar::Real;

pub type Config = NetworkConfig<f64>;
pub type ConfigF32 = NetworkConfig<f32>;
pub type Curve = analytic::CoverageCurve<f64>;
pub type CurveF32 = analytic::CoverageCurve<f32>;
pub type Schedule = optimizer::PowerSchedule<f64>;
pub type Optimum = optimizer::OptimizationResult<f64>;
pub type Quadrature = quadrature::QuadratureSpec<f64>;
