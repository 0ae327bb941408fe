//! Asymmetry-aware level-3 BLAS in the BLIS five-loop style.
//!
//! The crate is organised bottom-up:
//!
//! - [`matrix`], [`oracle`], [`matfile`]: dense storage, strided views,
//!   test-matrix generators and naive reference kernels.
//! - [`pack`]: blocking parameters, `Ac`/`Bc` packing and the micro-kernel.
//! - [`sched`]: machine models, static/dynamic partitioning and a
//!   deterministic simulator of asymmetric execution.
//! - [`engine`]: the parallel level-3 kernels plus the level-1/2 helpers.
//! - [`lapack`]: blocked Cholesky, LU and tridiagonal reduction.

pub mod engine;
pub mod error;
pub mod lapack;
pub mod matfile;
pub mod matrix;
pub mod oracle;
pub mod pack;
pub mod sched;

pub use error::{Error, Result};
pub use matrix::{DenseMatrix, Diag, MatMut, MatRef, Side, TriangleSpec, Uplo};
pub use pack::BlockingParams;
pub use sched::{MachineMode, MachineModel, Strategy};
