use creutz_core::analytic::AnalyticError;
use creutz_core::linalg::EigenError;
use creutz_core::localization::LocalizationError;
use creutz_core::model::ModelError;
use creutz_core::spectral::SpectralError;

/// Failure of a command, split by the exit code it maps to.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Invalid configuration, flags or output location (exit 2).
    #[error("configuration error: {0}")]
    Config(String),
    /// Eigensolver or root-finding failure (exit 3).
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        Self::Config(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Self::Numerical(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => EXIT_CONFIG,
            Self::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Config(format!("i/o: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::Config(format!("csv: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::Config(format!("json: {e}"))
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        Self::Config(e.to_string())
    }
}

impl From<EigenError> for CliError {
    fn from(e: EigenError) -> Self {
        Self::Numerical(e.to_string())
    }
}

impl From<AnalyticError> for CliError {
    fn from(e: AnalyticError) -> Self {
        Self::Numerical(e.to_string())
    }
}

impl From<LocalizationError> for CliError {
    fn from(e: LocalizationError) -> Self {
        Self::Numerical(e.to_string())
    }
}

impl From<SpectralError> for CliError {
    fn from(e: SpectralError) -> Self {
        match e {
            SpectralError::Model(_)
            | SpectralError::GridTooSmall { .. }
            | SpectralError::NotOpen
            | SpectralError::TooFewCells { .. }
            | SpectralError::SweepTooShort { .. } => Self::Config(e.to_string()),
            _ => Self::Numerical(e.to_string()),
        }
    }
}

/// Short tag of a spectral error, used in per-cell status strings.
pub fn error_kind(e: &SpectralError) -> &'static str {
    match e {
        SpectralError::Model(_) => "model",
        SpectralError::Eigen(_) => "eigen",
        SpectralError::GridTooSmall { .. } => "grid",
        SpectralError::OnSpectrum { .. } => "on-spectrum",
        SpectralError::Unresolved { .. } => "unresolved",
        SpectralError::Inconclusive { .. } => "inconclusive",
        SpectralError::NotOpen => "boundary-condition",
        SpectralError::TooFewCells { .. } => "cells",
        SpectralError::SweepTooShort { .. } => "sweep",
    }
}
