use super::{FactorStrategies, LapackConfig};
use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::matrix::{Diag, MatMut, Side};

/// Upper Cholesky `A = UᵀU`, overwriting the upper triangle with `U`.
///
/// Right-looking: per `nb` step the diagonal block is factored
/// recursively, the block row is solved and the trailing upper triangle
/// gets a syrk update. The strictly lower triangle is neither read nor
/// written.
pub fn potrf(mut a: MatMut<'_>, cfg: &LapackConfig, eng: &Engine, st: &FactorStrategies) -> Result<()> {
    cfg.validate()?;
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::NotSquare { rows: n, cols: a.cols() });
    }
    if cfg.nb <= 1 {
        return potrf_unblocked(a);
    }
    for j in (0..n).step_by(cfg.nb) {
        let jb = cfg.nb.min(n - j);
        let (top, bottom) = a.rb_mut().submatrix(j, j, n - j, n - j).split_at_row(jb);
        let (u11, a12) = top.split_at_col(jb);
        let (_, a22) = bottom.split_at_col(jb);
        diagonal_block(u11, a12, a22, cfg.inner_nb, eng, st).map_err(|e| offset(e, j))?;
    }
    Ok(())
}

fn offset(e: Error, by: usize) -> Error {
    match e {
        Error::NotPositiveDefinite { index } => Error::NotPositiveDefinite { index: index + by },
        e => e,
    }
}

/// Factors `u11`, then `a12 := u11⁻ᵀ·a12` and `a22 -= a12ᵀ·a12`.
fn diagonal_block(
    mut u11: MatMut<'_>,
    mut a12: MatMut<'_>,
    a22: MatMut<'_>,
    inner_nb: usize,
    eng: &Engine,
    st: &FactorStrategies,
) -> Result<()> {
    recursive(u11.rb_mut(), inner_nb, eng, st)?;
    if a12.cols() == 0 {
        return Ok(());
    }
    // u11ᵀ·X = a12  ⇔  Xᵀ·u11 = a12ᵀ, a right-side upper solve.
    eng.trsm(a12.rb_mut().transpose(), u11.rb(), Side::Right, Diag::NonUnit, st.solve)?;
    eng.syrk_sub(a22, a12.rb(), st.update)
}

fn recursive(a: MatMut<'_>, inner_nb: usize, eng: &Engine, st: &FactorStrategies) -> Result<()> {
    let n = a.rows();
    if n <= inner_nb {
        return potrf_unblocked(a);
    }
    let h = n / 2;
    let (top, bottom) = a.split_at_row(h);
    let (u11, a12) = top.split_at_col(h);
    let (_, a22) = bottom.split_at_col(h);
    let mut a22 = a22;
    diagonal_block(u11, a12, a22.rb_mut(), inner_nb, eng, st)?;
    recursive(a22, inner_nb, eng, st).map_err(|e| offset(e, h))
}

/// Column-by-column upper Cholesky.
pub fn potrf_unblocked(mut a: MatMut<'_>) -> Result<()> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::NotSquare { rows: n, cols: a.cols() });
    }
    for j in 0..n {
        for i in 0..j {
            let mut s = a.get(i, j);
            for l in 0..i {
                s -= a.get(l, i) * a.get(l, j);
            }
            a.set(i, j, s / a.get(i, i));
        }
        let mut d = a.get(j, j);
        for l in 0..j {
            d -= a.get(l, j) * a.get(l, j);
        }
        if d <= 0.0 || d.is_nan() {
            return Err(Error::NotPositiveDefinite { index: j });
        }
        a.set(j, j, d.sqrt());
    }
    Ok(())
}
