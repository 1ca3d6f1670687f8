//! Front end for the `infospread` library: configuration files, CSV output
//! and the `predict`, `verify`, `simulate` and `optimize` commands.

pub mod commands;
pub mod config;
pub mod csv;

pub use commands::{Output, VerifyGrid};
pub use config::{ConfigError, ExperimentConfig};

/// Process exit statuses.
pub mod exit {
    pub const OK: i32 = 0;
    pub const OTHER: i32 = 1;
    pub const VALIDATION: i32 = 2;
    pub const INFEASIBLE: i32 = 3;
    pub const ORACLE_MISMATCH: i32 = 4;
    pub const QUADRATURE: i32 = 5;
    pub const INSUFFICIENT_DATA: i32 = 6;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("validation error: {0}")]
    Validation(String),
    #[error(transparent)]
    Core(#[from] infospread::Error),
    #[error("oracle mismatch: {0}")]
    OracleMismatch(String),
    #[error(transparent)]
    Csv(#[from] csv::NonFinite),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use infospread::Error as E;
        match self {
            CliError::Config(_) | CliError::Validation(_) => exit::VALIDATION,
            CliError::Core(e) => match e {
                E::InvalidConfig(_)
                | E::UnsupportedExponent { .. }
                | E::InvalidPower(_)
                | E::DegenerateDenominator { .. } => exit::VALIDATION,
                E::Infeasible(_) => exit::INFEASIBLE,
                E::QuadratureNonConvergence { .. } => exit::QUADRATURE,
                E::InsufficientData(_) => exit::INSUFFICIENT_DATA,
            },
            CliError::OracleMismatch(_) => exit::ORACLE_MISMATCH,
            CliError::Csv(_) | CliError::Io(_) => exit::OTHER,
        }
    }
}
