//! Batch runner for the ccrflow verification suites: TOML experiment configs
//! in, one CSV report per suite out.

pub mod config;
pub mod report;
pub mod suites;

pub use config::{ConfigError, ExperimentConfig};
pub use report::{CheckKind, ConvergenceRow, Row, SuiteReport};
pub use suites::{build_checks, emit_convergence, run_suite, Check, SuiteError, SUITES};
