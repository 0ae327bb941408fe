//! Blocked factorizations driving the parallel level-3 kernels: upper
//! Cholesky, LU with partial pivoting and reduction to tridiagonal form.
//! Only the upper-storage variants exist.

mod cholesky;
mod lu;
mod tridiag;

use std::fmt;
use std::str::FromStr;

pub use cholesky::{potrf, potrf_unblocked};
pub use lu::{getrf, laswp, LuOutcome, PivotVector};
pub use tridiag::{householder, larfg, sytrd, Reflector, ReflectorSet};

use crate::error::{Error, Result};
use crate::sched::Strategy;

/// Block sizes, the `ilaenv` equivalent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LapackConfig {
    pub nb: usize,
    /// Block size of the recursive panel / diagonal-block factorizations.
    pub inner_nb: usize,
}

impl Default for LapackConfig {
    fn default() -> Self {
        LapackConfig { nb: 256, inner_nb: 32 }
    }
}

impl LapackConfig {
    pub fn new(nb: usize, inner_nb: usize) -> Result<Self> {
        let c = LapackConfig { nb, inner_nb };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nb == 0 || self.inner_nb == 0 || self.inner_nb > self.nb {
            return Err(Error::InvalidParams(format!(
                "need 1 <= inner_nb <= nb, got nb={} inner_nb={}",
                self.nb, self.inner_nb
            )));
        }
        Ok(())
    }
}

/// Strategies the factorizations pass to the level-3 kernels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FactorStrategies {
    /// gemm / syrk / syr2k updates.
    pub update: Strategy,
    /// Right-side triangular solves.
    pub solve: Strategy,
}

impl Default for FactorStrategies {
    fn default() -> Self {
        FactorStrategies {
            update: Strategy::D3S4,
            solve: Strategy::S3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactorRoutine {
    PotrfSyrk,
    GetrfGepp,
}

impl fmt::Display for FactorRoutine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FactorRoutine::PotrfSyrk => "potrf_syrk",
            FactorRoutine::GetrfGepp => "getrf_gepp",
        })
    }
}

impl FromStr for FactorRoutine {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "potrf_syrk" | "potrf" => Ok(FactorRoutine::PotrfSyrk),
            "getrf_gepp" | "getrf" => Ok(FactorRoutine::GetrfGepp),
            _ => Err(Error::UnknownKernel(s.to_string())),
        }
    }
}

/// Share (in %) of the factorization flops spent in the trailing update
/// for block size `b`.
///
/// Trailing orders are `t = n − j − b` for `j = 0, b, 2b, …` while `t > 0`.
/// A syrk step costs `b·t·(t+1)` flops, a gepp step `2·b·t²`; the totals
/// are `n³/3 + n²/2 + n/6` (Cholesky) and `2n³/3 − n²/2 − n/6` (LU).
pub fn flop_fraction(routine: FactorRoutine, n: usize, b: usize) -> f64 {
    if n == 0 || b == 0 {
        return 0.0;
    }
    let (nf, bf) = (n as f64, b as f64);
    let mut update = 0.0;
    let mut j = 0;
    while j + b < n {
        let t = (n - j - b) as f64;
        update += match routine {
            FactorRoutine::PotrfSyrk => bf * t * (t + 1.0),
            FactorRoutine::GetrfGepp => 2.0 * bf * t * t,
        };
        j += b;
    }
    let total = match routine {
        FactorRoutine::PotrfSyrk => nf.powi(3) / 3.0 + nf * nf / 2.0 + nf / 6.0,
        FactorRoutine::GetrfGepp => 2.0 * nf.powi(3) / 3.0 - nf * nf / 2.0 - nf / 6.0,
    };
    100.0 * update / total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_update_when_one_block() {
        assert_eq!(flop_fraction(FactorRoutine::PotrfSyrk, 100, 256), 0.0);
        assert_eq!(flop_fraction(FactorRoutine::GetrfGepp, 256, 256), 0.0);
    }

    #[test]
    fn config_validation() {
        assert!(LapackConfig::new(256, 32).is_ok());
        assert!(LapackConfig::new(16, 32).is_err());
        assert!(LapackConfig::new(0, 0).is_err());
    }
}
