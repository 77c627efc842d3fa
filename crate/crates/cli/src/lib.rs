//! Configuration, orchestration and file output for the `qdyn` binary.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod output;
pub mod report;
pub mod run;

pub use config::{parse_config, AnalyticSource, ModelChoice, Mode, RunConfig};
pub use error::{exit, CliError, ConfigError};
pub use output::{trace_csv, write_trace_csv};
pub use report::{Check, VerificationReport};
pub use run::{ortho, run, verify, RunOutcome};
