//! Verification, benchmark and simulation harness around the `asymblis`
//! kernels. CSV goes to stdout, diagnostics to stderr.

pub mod error;
pub mod flops;
pub mod fractions;
pub mod rates;
pub mod run;
pub mod timing;
pub mod verify;
pub mod workload;

pub use error::CliError;
pub use flops::FlopModel;
pub use run::{BenchSpec, Row};
pub use verify::{run_suite, Check, VerifyOptions};
pub use workload::{Routine, Workload};
