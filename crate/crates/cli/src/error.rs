use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },

    #[error("{}key `{key}`: {message}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Invalid {
        line: Option<usize>,
        key: &'static str,
        message: String,
    },

    #[error("missing required key `{key}`")]
    Missing { key: &'static str },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(#[from] ConfigError),

    #[error(transparent)]
    Core(#[from] qdyn_core::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("refusing to write an empty trace to {}", .0.display())]
    EmptyTrace(PathBuf),

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }

    /// 2 for bad input, 3 for numerical non-convergence, 1 for a model the
    /// checks reject.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Core(e) if e.is_non_convergence() => exit::NON_CONVERGENCE,
            Self::Core(qdyn_core::Error::InferenceFailed { .. } | qdyn_core::Error::SingularCoupling { .. }) => exit::CHECK_FAILED,
            _ => exit::USAGE,
        }
    }
}

pub mod exit {
    pub const OK: u8 = 0;
    pub const CHECK_FAILED: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const NON_CONVERGENCE: u8 = 3;
}

pub type Result<T> = std::result::Result<T, CliError>;
