use super::nest::{run_nest, Ctx, OutputMode};
use super::trsm::{trsm_upper, TrsmArgs};
use super::{check_admissible, select_params, Engine, GemmProblem, Kernel};
use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, Diag, MatMut, MatRef, Side};
use crate::pack::{BlockingParams, OperandBlock, PackShape};
use crate::sched::Strategy;

fn conform(what: &str, ok: bool, detail: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!("{what}: {}", detail())))
    }
}

fn square(a: MatRef<'_>) -> Result<usize> {
    if a.rows() != a.cols() {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    Ok(a.rows())
}

fn dense(src: MatRef<'_>, scale: f64) -> OperandBlock<'_> {
    OperandBlock {
        scale,
        ..OperandBlock::whole(src, PackShape::Dense)
    }
}

fn tri_shape(diag: Diag) -> PackShape {
    match diag {
        Diag::Unit => PackShape::TriangularUpperUnit,
        Diag::NonUnit => PackShape::TriangularUpper,
    }
}

impl Engine {
    fn prepare(&self, kernel: Kernel, side: Side, strategy: Strategy, m: usize, n: usize, k: usize) -> Result<BlockingParams> {
        check_admissible(kernel, side, strategy)?;
        self.machine.validate()?;
        self.params.validate()?;
        Ok(if self.small_m_adjust {
            select_params(&GemmProblem::new(kernel, side, m, n, k), &self.params)
        } else {
            self.params.clone()
        })
    }

    fn ctx<'a>(&'a self, params: &'a BlockingParams, strategy: Strategy) -> Ctx<'a> {
        Ctx {
            machine: &self.machine,
            params,
            strategy,
            variant: self.variant,
            ins: self.instrumentation.as_deref(),
        }
    }

    /// `C += A·B`.
    pub fn gemm(&self, c: MatMut<'_>, a: MatRef<'_>, b: MatRef<'_>, strategy: Strategy) -> Result<()> {
        self.gemm_scaled(c, a, b, 1.0, strategy)
    }

    /// `C -= A·B`.
    pub fn gemm_sub(&self, c: MatMut<'_>, a: MatRef<'_>, b: MatRef<'_>, strategy: Strategy) -> Result<()> {
        self.gemm_scaled(c, a, b, -1.0, strategy)
    }

    fn gemm_scaled(&self, c: MatMut<'_>, a: MatRef<'_>, b: MatRef<'_>, sign: f64, strategy: Strategy) -> Result<()> {
        let (m, n, k) = (c.rows(), c.cols(), a.cols());
        conform("gemm", a.rows() == m && b.rows() == k && b.cols() == n, || {
            format!("C {}x{}, A {}x{}, B {}x{}", m, n, a.rows(), a.cols(), b.rows(), b.cols())
        })?;
        let params = self.prepare(Kernel::Gemm, Side::Left, strategy, m, n, k)?;
        run_nest(&self.ctx(&params, strategy), dense(a, sign), dense(b, 1.0), c, OutputMode::Full);
        Ok(())
    }

    /// `C += A·B` (left) or `C += B·A` (right) with `A` symmetric, read
    /// from its upper triangle.
    pub fn symm(&self, c: MatMut<'_>, a: MatRef<'_>, b: MatRef<'_>, side: Side, strategy: Strategy) -> Result<()> {
        let order = square(a)?;
        let (m, n) = (c.rows(), c.cols());
        conform("symm", b.rows() == m && b.cols() == n, || format!("C {}x{}, B {}x{}", m, n, b.rows(), b.cols()))?;
        let want = if side == Side::Left { m } else { n };
        conform("symm", order == want, || format!("A order {order}, expected {want}"))?;
        let params = self.prepare(Kernel::Symm, side, strategy, m, n, order)?;
        let sym = OperandBlock::whole(a, PackShape::SymmetricUpper);
        let (lhs, rhs) = match side {
            Side::Left => (sym, dense(b, 1.0)),
            Side::Right => (dense(b, 1.0), sym),
        };
        run_nest(&self.ctx(&params, strategy), lhs, rhs, c, OutputMode::Full);
        Ok(())
    }

    /// `B := A·B` (left) or `B := B·A` (right) with `A` upper triangular.
    /// The left product is staged one `nc`-wide column panel at a time;
    /// the right product needs the whole of `B`.
    pub fn trmm(&self, mut b: MatMut<'_>, a: MatRef<'_>, side: Side, diag: Diag, strategy: Strategy) -> Result<()> {
        let order = square(a)?;
        let (m, n) = (b.rows(), b.cols());
        let want = if side == Side::Left { m } else { n };
        conform("trmm", order == want, || format!("A order {order}, B {m}x{n}"))?;
        let params = self.prepare(Kernel::Trmm, side, strategy, m, n, order)?;
        let ctx = self.ctx(&params, strategy);
        let tri = OperandBlock::whole(a, tri_shape(diag));
        match side {
            Side::Left => {
                for jc in (0..n).step_by(params.nc) {
                    let nb = params.nc.min(n - jc);
                    let mut panel = b.rb_mut().submatrix(0, jc, m, nb);
                    let staged = DenseMatrix::from_view(panel.rb());
                    panel.fill(0.0);
                    run_nest(&ctx, tri, dense(staged.as_ref(), 1.0), panel, OutputMode::Full);
                }
            }
            Side::Right => {
                let staged = DenseMatrix::from_view(b.rb());
                b.fill(0.0);
                run_nest(&ctx, dense(staged.as_ref(), 1.0), tri, b, OutputMode::Full);
            }
        }
        Ok(())
    }

    /// `B := A⁻¹·B` (left) or `B := B·A⁻¹` (right) with `A` upper
    /// triangular. Fails on an exactly zero diagonal entry.
    pub fn trsm(&self, b: MatMut<'_>, a: MatRef<'_>, side: Side, diag: Diag, strategy: Strategy) -> Result<()> {
        let order = square(a)?;
        let (m, n) = (b.rows(), b.cols());
        let want = if side == Side::Left { m } else { n };
        conform("trsm", order == want, || format!("A order {order}, B {m}x{n}"))?;
        let params = self.prepare(Kernel::Trsm, side, strategy, m, n, order)?;
        let args = TrsmArgs {
            machine: &self.machine,
            params: &params,
            strategy,
            variant: self.variant,
            ins: self.instrumentation.as_deref(),
        };
        trsm_upper(&args, b, a, side, diag)
    }

    /// Upper triangle of `C += Aᵀ·A`, `A` is `k × n`.
    pub fn syrk(&self, c: MatMut<'_>, a: MatRef<'_>, strategy: Strategy) -> Result<()> {
        self.syrk_scaled(c, a, 1.0, strategy)
    }

    /// Upper triangle of `C -= Aᵀ·A`.
    pub fn syrk_sub(&self, c: MatMut<'_>, a: MatRef<'_>, strategy: Strategy) -> Result<()> {
        self.syrk_scaled(c, a, -1.0, strategy)
    }

    fn syrk_scaled(&self, c: MatMut<'_>, a: MatRef<'_>, sign: f64, strategy: Strategy) -> Result<()> {
        let n = square(c.rb())?;
        conform("syrk", a.cols() == n, || format!("C order {n}, A {}x{}", a.rows(), a.cols()))?;
        let params = self.prepare(Kernel::Syrk, Side::Left, strategy, n, n, a.rows())?;
        run_nest(&self.ctx(&params, strategy), dense(a.transpose(), sign), dense(a, 1.0), c, OutputMode::Upper);
        Ok(())
    }

    /// Upper triangle of `C += Aᵀ·B + Bᵀ·A`, `A` and `B` are `k × n`.
    pub fn syr2k(&self, c: MatMut<'_>, a: MatRef<'_>, b: MatRef<'_>, strategy: Strategy) -> Result<()> {
        self.syr2k_scaled(c, a, b, 1.0, strategy)
    }

    /// Upper triangle of `C -= Aᵀ·B + Bᵀ·A`.
    pub fn syr2k_sub(&self, c: MatMut<'_>, a: MatRef<'_>, b: MatRef<'_>, strategy: Strategy) -> Result<()> {
        self.syr2k_scaled(c, a, b, -1.0, strategy)
    }

    fn syr2k_scaled(&self, mut c: MatMut<'_>, a: MatRef<'_>, b: MatRef<'_>, sign: f64, strategy: Strategy) -> Result<()> {
        let n = square(c.rb())?;
        conform("syr2k", a.cols() == n && b.cols() == n && a.rows() == b.rows(), || {
            format!("C order {n}, A {}x{}, B {}x{}", a.rows(), a.cols(), b.rows(), b.cols())
        })?;
        let params = self.prepare(Kernel::Syr2k, Side::Left, strategy, n, n, a.rows())?;
        let ctx = self.ctx(&params, strategy);
        run_nest(&ctx, dense(a.transpose(), sign), dense(b, 1.0), c.rb_mut(), OutputMode::Upper);
        run_nest(&ctx, dense(b.transpose(), sign), dense(a, 1.0), c, OutputMode::Upper);
        Ok(())
    }
}
