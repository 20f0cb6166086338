use std::path::PathBuf;

use hawkes_core::HawkesError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    /// A grid scheme cannot run at the requested step count.
    #[error("{scheme} with n = {steps}: {source}")]
    WellPosedness {
        scheme: String,
        steps: usize,
        #[source]
        source: HawkesError,
    },

    #[error("{context}: {source}")]
    Simulation {
        context: String,
        #[source]
        source: HawkesError,
    },

    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for configuration errors, 3 for ill-posed grids, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => 2,
            Self::WellPosedness { .. } => 3,
            Self::Simulation { .. } | Self::Io { .. } => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| Self::Io { path, source }
    }

    /// Sorts a core error raised while setting up or running `scheme`.
    pub(crate) fn from_core(scheme: &str, steps: usize, source: HawkesError) -> Self {
        match source {
            HawkesError::WellPosedness { .. } => Self::WellPosedness {
                scheme: scheme.to_string(),
                steps,
                source,
            },
            HawkesError::Config(_) | HawkesError::Unsupported(_) => {
                Self::Config(format!("schemes: {scheme} with n = {steps}: {source}"))
            }
            _ => Self::Simulation {
                context: format!("{scheme} with n = {steps}"),
                source,
            },
        }
    }
}
