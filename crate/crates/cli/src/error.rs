use std::io;
use std::process::ExitCode;

use cvteleport::Error as CoreError;
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    /// A computed result failed its own consistency check.
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Validation(_) => 2,
            Self::Core(CoreError::DivergentEnergy { .. }) => 3,
            Self::Core(_) => 2,
            Self::Io(_) => 4,
            Self::Internal(_) => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Validation(_) => "validation",
            Self::Core(CoreError::DivergentEnergy { .. }) => "divergent-energy",
            Self::Core(_) => "validation",
            Self::Io(_) => "io",
            Self::Internal(_) => "internal",
        }
    }

    /// Machine-readable form, with the divergence interval when relevant.
    pub fn to_json(&self) -> Value {
        let mut v = json!({ "kind": self.kind(), "message": self.to_string() });
        if let Self::Core(CoreError::DivergentEnergy { tau, lower, upper }) = self {
            v["tau"] = (*tau).into();
            v["finite_energy_interval"] = json!([lower, upper]);
        }
        v
    }

    pub fn exit(&self) -> ExitCode {
        ExitCode::from(self.exit_code())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
