//! The level-3 kernels as five loops around packing and the micro-kernel,
//! partitioned across core classes by a [`Strategy`], plus the small
//! sequential level-1/2 set used by the factorizations.
//!
//! All kernels use fixed update forms:
//!
//! | kernel | operation |
//! |---|---|
//! | gemm  | `C += A·B` |
//! | symm  | `C += A·B` or `C += B·A`, `A` symmetric (upper stored) |
//! | trmm  | `B := A·B` or `B := B·A`, `A` upper triangular |
//! | trsm  | `B := A⁻¹·B` or `B := B·A⁻¹`, `A` upper triangular |
//! | syrk  | `C += Aᵀ·A`, upper triangle of `C` only |
//! | syr2k | `C += Aᵀ·B + Bᵀ·A`, upper triangle of `C` only |

mod blas2;
mod instrument;
mod level3;
mod nest;
mod trsm;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

pub use blas2::{axpy, dot, gemv, ger, iamax, nrm2, row_swap, scal, symv};
pub use instrument::{ChunkEvent, Instrumentation, WriteEvent};

use crate::error::{Error, Result};
use crate::matrix::{Diag, MatMut, MatRef, Side};
use crate::pack::{BlockingParams, KernelVariant};
use crate::sched::{MachineModel, Strategy};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kernel {
    Gemm,
    Symm,
    Trmm,
    Trsm,
    Syrk,
    Syr2k,
}

impl Kernel {
    pub const ALL: [Kernel; 6] = [Kernel::Gemm, Kernel::Symm, Kernel::Trmm, Kernel::Trsm, Kernel::Syrk, Kernel::Syr2k];

    pub fn name(self) -> &'static str {
        match self {
            Kernel::Gemm => "gemm",
            Kernel::Symm => "symm",
            Kernel::Trmm => "trmm",
            Kernel::Trsm => "trsm",
            Kernel::Syrk => "syrk",
            Kernel::Syr2k => "syr2k",
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kernel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Kernel::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownKernel(s.to_string()))
    }
}

/// Strategies a kernel accepts. `side` only matters for trsm.
pub fn admissible(kernel: Kernel, side: Side) -> &'static [Strategy] {
    use Strategy::*;
    match (kernel, side) {
        (Kernel::Gemm, _) => &[D3S4, D3S5, ObS4],
        (Kernel::Trsm, Side::Left) => &[S1S4],
        (Kernel::Trsm, Side::Right) => &[S3, S3S5],
        _ => &[D3S4, D3S5],
    }
}

pub fn check_admissible(kernel: Kernel, side: Side, strategy: Strategy) -> Result<()> {
    let ok = admissible(kernel, side);
    if ok.contains(&strategy) {
        return Ok(());
    }
    let label = match kernel {
        Kernel::Trsm => format!("trsm ({} side)", if side == Side::Left { "left" } else { "right" }),
        k => k.name().to_string(),
    };
    Err(Error::InadmissibleStrategy {
        kernel: label,
        strategy: strategy.to_string(),
        admissible: ok.iter().map(|s| s.name()).collect::<Vec<_>>().join(", "),
    })
}

/// Benchmark shape cases: which dimensions grow and which stay at the
/// fixed panel size.
#[allow(non_camel_case_types)]
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ShapeCase {
    SQUARE,
    GEPP,
    GEMP,
    GEPM,
    SYMP,
    SYPM,
    TRMP,
    TRPM,
    TRSP,
    TRPS,
    SYRK_N,
    SYR2K_N,
}

impl ShapeCase {
    pub const ALL: [ShapeCase; 12] = [
        ShapeCase::SQUARE,
        ShapeCase::GEPP,
        ShapeCase::GEMP,
        ShapeCase::GEPM,
        ShapeCase::SYMP,
        ShapeCase::SYPM,
        ShapeCase::TRMP,
        ShapeCase::TRPM,
        ShapeCase::TRSP,
        ShapeCase::TRPS,
        ShapeCase::SYRK_N,
        ShapeCase::SYR2K_N,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ShapeCase::SQUARE => "square",
            ShapeCase::GEPP => "gepp",
            ShapeCase::GEMP => "gemp",
            ShapeCase::GEPM => "gepm",
            ShapeCase::SYMP => "symp",
            ShapeCase::SYPM => "sypm",
            ShapeCase::TRMP => "trmp",
            ShapeCase::TRPM => "trpm",
            ShapeCase::TRSP => "trsp",
            ShapeCase::TRPS => "trps",
            ShapeCase::SYRK_N => "syrk_n",
            ShapeCase::SYR2K_N => "syr2k_n",
        }
    }

    pub fn kernel(self) -> Kernel {
        match self {
            ShapeCase::SQUARE | ShapeCase::GEPP | ShapeCase::GEMP | ShapeCase::GEPM => Kernel::Gemm,
            ShapeCase::SYMP | ShapeCase::SYPM => Kernel::Symm,
            ShapeCase::TRMP | ShapeCase::TRPM => Kernel::Trmm,
            ShapeCase::TRSP | ShapeCase::TRPS => Kernel::Trsm,
            ShapeCase::SYRK_N => Kernel::Syrk,
            ShapeCase::SYR2K_N => Kernel::Syr2k,
        }
    }

    /// Side of the structured operand; `Left` for kernels without one.
    pub fn side(self) -> Side {
        match self {
            ShapeCase::SYPM | ShapeCase::TRPM | ShapeCase::TRPS => Side::Right,
            _ => Side::Left,
        }
    }

    /// Shape cases that exercise `kernel`.
    pub fn for_kernel(kernel: Kernel) -> Vec<ShapeCase> {
        ShapeCase::ALL.into_iter().filter(|c| c.kernel() == kernel).collect()
    }

    /// `(m, n, k)` for a grown dimension `size` and fixed `panel`. For
    /// symm/trmm/trsm `k` is the order of the structured operand; for
    /// syrk/syr2k `m = n` is the order of `C`.
    pub fn dims(self, size: usize, panel: usize) -> (usize, usize, usize) {
        match self {
            ShapeCase::SQUARE => (size, size, size),
            ShapeCase::GEPP => (size, size, panel),
            ShapeCase::GEMP => (size, panel, size),
            ShapeCase::GEPM => (panel, size, size),
            ShapeCase::SYMP | ShapeCase::TRMP | ShapeCase::TRSP => (size, panel, size),
            ShapeCase::SYPM | ShapeCase::TRPM | ShapeCase::TRPS => (panel, size, size),
            ShapeCase::SYRK_N | ShapeCase::SYR2K_N => (size, size, panel),
        }
    }
}

impl fmt::Display for ShapeCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ShapeCase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ShapeCase::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownShape(s.to_string()))
    }
}

/// Dimensions of one kernel invocation (`m × n` output, inner size `k`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GemmProblem {
    pub kernel: Kernel,
    pub side: Side,
    pub m: usize,
    pub n: usize,
    pub k: usize,
}

impl GemmProblem {
    pub fn new(kernel: Kernel, side: Side, m: usize, n: usize, k: usize) -> Self {
        GemmProblem { kernel, side, m, n, k }
    }

    pub fn from_case(case: ShapeCase, size: usize, panel: usize) -> Self {
        let (m, n, k) = case.dims(size, panel);
        GemmProblem::new(case.kernel(), case.side(), m, n, k)
    }
}

/// Switches to the small-`m` Loop-3 strides when `m` is at most the
/// threshold.
pub fn select_params(problem: &GemmProblem, base: &BlockingParams) -> BlockingParams {
    let mut p = base.clone();
    if problem.m <= base.small_m_threshold {
        p.mc_by_class = base.small_m_mc_by_class.clone();
    }
    p
}

/// A configured kernel runner: machine model, blocking parameters and
/// optional instrumentation.
#[derive(Clone, Debug)]
pub struct Engine {
    pub machine: MachineModel,
    pub params: BlockingParams,
    pub variant: KernelVariant,
    /// Apply [`select_params`] per call.
    pub small_m_adjust: bool,
    pub instrumentation: Option<Arc<Instrumentation>>,
}

impl Default for Engine {
    fn default() -> Self {
        let machine = MachineModel::default();
        let params = machine.blocking_params();
        Engine::new(machine, params)
    }
}

impl Engine {
    pub fn new(machine: MachineModel, params: BlockingParams) -> Self {
        Engine {
            machine,
            params,
            variant: KernelVariant::Reference,
            small_m_adjust: true,
            instrumentation: None,
        }
    }

    /// One worker, default blocking.
    pub fn sequential() -> Self {
        Engine::new(MachineModel::single_core(), BlockingParams::default())
    }

    pub fn with_variant(mut self, variant: KernelVariant) -> Self {
        self.variant = variant;
        self
    }

    pub fn with_instrumentation(mut self, ins: Arc<Instrumentation>) -> Self {
        self.instrumentation = Some(ins);
        self
    }

    pub fn with_small_m_adjust(mut self, on: bool) -> Self {
        self.small_m_adjust = on;
        self
    }
}

pub fn gemm(c: MatMut<'_>, a: MatRef<'_>, b: MatRef<'_>, machine: &MachineModel, strategy: Strategy, params: &BlockingParams) -> Result<()> {
    Engine::new(machine.clone(), params.clone()).gemm(c, a, b, strategy)
}

pub fn symm(
    c: MatMut<'_>,
    a: MatRef<'_>,
    b: MatRef<'_>,
    side: Side,
    machine: &MachineModel,
    strategy: Strategy,
    params: &BlockingParams,
) -> Result<()> {
    Engine::new(machine.clone(), params.clone()).symm(c, a, b, side, strategy)
}

pub fn trmm(
    b: MatMut<'_>,
    a: MatRef<'_>,
    side: Side,
    diag: Diag,
    machine: &MachineModel,
    strategy: Strategy,
    params: &BlockingParams,
) -> Result<()> {
    Engine::new(machine.clone(), params.clone()).trmm(b, a, side, diag, strategy)
}

pub fn trsm(
    b: MatMut<'_>,
    a: MatRef<'_>,
    side: Side,
    diag: Diag,
    machine: &MachineModel,
    strategy: Strategy,
    params: &BlockingParams,
) -> Result<()> {
    Engine::new(machine.clone(), params.clone()).trsm(b, a, side, diag, strategy)
}

pub fn syrk(c: MatMut<'_>, a: MatRef<'_>, machine: &MachineModel, strategy: Strategy, params: &BlockingParams) -> Result<()> {
    Engine::new(machine.clone(), params.clone()).syrk(c, a, strategy)
}

pub fn syr2k(
    c: MatMut<'_>,
    a: MatRef<'_>,
    b: MatRef<'_>,
    machine: &MachineModel,
    strategy: Strategy,
    params: &BlockingParams,
) -> Result<()> {
    Engine::new(machine.clone(), params.clone()).syr2k(c, a, b, strategy)
}
