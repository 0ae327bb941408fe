use asymblis::engine::Kernel;
use asymblis::Side;

use crate::workload::{Routine, Workload};

/// Flop counts behind every GFLOPS figure. Symmetric kernels count the
/// stored triangle only.
pub struct FlopModel;

impl FlopModel {
    /// `m × n` output (or right-hand side), inner / triangle order `k`.
    pub fn kernel(kernel: Kernel, side: Side, m: usize, n: usize, k: usize) -> f64 {
        let (m, n, k) = (m as f64, n as f64, k as f64);
        match kernel {
            Kernel::Gemm => 2.0 * m * n * k,
            Kernel::Symm => match side {
                Side::Left => 2.0 * m * m * n,
                Side::Right => 2.0 * m * n * n,
            },
            Kernel::Trmm | Kernel::Trsm => match side {
                Side::Left => n * m * m,
                Side::Right => m * n * n,
            },
            Kernel::Syrk => n * (n + 1.0) * k,
            Kernel::Syr2k => 2.0 * n * (n + 1.0) * k,
        }
    }

    pub fn routine(routine: Routine, n: usize) -> f64 {
        let n = n as f64;
        match routine {
            Routine::Potrf => n * n * n / 3.0,
            Routine::Getrf => 2.0 * n * n * n / 3.0,
            Routine::Sytrd => 4.0 * n * n * n / 3.0,
        }
    }

    pub fn workload(w: Workload, m: usize, n: usize, k: usize) -> f64 {
        match w {
            Workload::Kernel(case) => Self::kernel(case.kernel(), case.side(), m, n, k),
            Workload::Routine(r) => Self::routine(r, n),
        }
    }
}
