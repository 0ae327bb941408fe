use std::ops::Range;

use super::{FactorStrategies, LapackConfig};
use crate::engine::{iamax, Engine};
use crate::error::{Error, Result};
use crate::matrix::{Diag, MatMut, MatRef, Side};

/// Row interchanges, 1-based: row `i+1` was swapped with row `ipiv[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PivotVector {
    pub ipiv: Vec<usize>,
}

impl PivotVector {
    pub fn identity(len: usize) -> Self {
        PivotVector { ipiv: (1..=len).collect() }
    }

    pub fn len(&self) -> usize {
        self.ipiv.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ipiv.is_empty()
    }

    /// The permutation as a row order: row `i` of `P·A` is row `perm[i]` of `A`.
    pub fn permutation(&self, rows: usize) -> Vec<usize> {
        let mut perm: Vec<usize> = (0..rows).collect();
        for (i, &p) in self.ipiv.iter().enumerate() {
            perm.swap(i, p - 1);
        }
        perm
    }
}

/// Result of [`getrf`]. A zero pivot does not stop the factorization;
/// it is reported here, LAPACK `info` style.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LuOutcome {
    pub pivots: PivotVector,
    /// First column (0-based) whose pivot was exactly zero.
    pub singular_at: Option<usize>,
}

impl LuOutcome {
    pub fn check(&self) -> Result<()> {
        match self.singular_at {
            Some(index) => Err(Error::Singular { index }),
            None => Ok(()),
        }
    }
}

/// Applies `i ↔ ipiv[i]` for increasing `i` to the columns `cols` of `a`.
pub fn laswp(mut a: MatMut<'_>, ipiv: &PivotVector, cols: Range<usize>) -> Result<()> {
    let rows = a.rows();
    for (position, &pivot) in ipiv.ipiv.iter().enumerate() {
        if pivot == 0 || pivot > rows || position >= rows {
            return Err(Error::PivotOutOfRange { position, pivot, rows });
        }
    }
    if cols.end > a.cols() {
        return Err(Error::DimensionMismatch(format!("column range {cols:?} exceeds {} columns", a.cols())));
    }
    let mut sub = a.rb_mut().submatrix(0, cols.start, rows, cols.len());
    for (i, &p) in ipiv.ipiv.iter().enumerate() {
        sub.swap_rows(i, p - 1);
    }
    Ok(())
}

/// 0-based swaps `i ↔ piv[i - first]` for `i` in `first..first + piv.len()`.
fn swap_rows(mut a: MatMut<'_>, piv: &[usize], first: usize) {
    for (o, &p) in piv.iter().enumerate() {
        a.swap_rows(first + o, p);
    }
}

/// LU with partial pivoting, `P·A = L·U`, `L` unit lower (diagonal
/// implicit) and `U` upper, both stored over `A`.
pub fn getrf(mut a: MatMut<'_>, cfg: &LapackConfig, eng: &Engine, st: &FactorStrategies) -> Result<LuOutcome> {
    cfg.validate()?;
    let (m, n) = (a.rows(), a.cols());
    let mn = m.min(n);
    let mut piv = vec![0usize; mn];
    let mut singular = None;
    if cfg.nb <= 1 {
        getf2(a.rb_mut(), &mut piv, &mut singular);
    } else {
        for j in (0..mn).step_by(cfg.nb) {
            let jb = cfg.nb.min(mn - j);
            let mut local = None;
            panel(a.rb_mut().submatrix(j, j, m - j, jb), &mut piv[j..j + jb], &mut local, cfg.inner_nb, eng, st)?;
            if singular.is_none() {
                singular = local.map(|c| c + j);
            }
            for p in &mut piv[j..j + jb] {
                *p += j;
            }
            let rows_below = a.rb_mut().submatrix(j, 0, m - j, n);
            let (left, rest) = rows_below.split_at_col(j);
            let (pan, mut right) = rest.split_at_col(jb);
            let local_piv: Vec<usize> = piv[j..j + jb].iter().map(|p| p - j).collect();
            swap_rows(left, &local_piv, 0);
            swap_rows(right.rb_mut(), &local_piv, 0);
            if j + jb < n {
                let (l_top, l_bottom) = split_rows(pan.into_ref(), jb);
                let (u12, a22) = right.split_at_row(jb);
                trailing(l_top, l_bottom, u12, a22, eng, st)?;
            }
        }
    }
    Ok(LuOutcome {
        pivots: PivotVector {
            ipiv: piv.into_iter().map(|p| p + 1).collect(),
        },
        singular_at: singular,
    })
}

/// `u12 := l11⁻¹·u12`, then `a22 -= l21·u12`.
fn trailing(
    l11: MatRef<'_>,
    l21: MatRef<'_>,
    mut u12: MatMut<'_>,
    a22: MatMut<'_>,
    eng: &Engine,
    st: &FactorStrategies,
) -> Result<()> {
    // l11·X = u12  ⇔  Xᵀ·l11ᵀ = u12ᵀ, with l11ᵀ unit upper.
    eng.trsm(u12.rb_mut().transpose(), l11.transpose(), Side::Right, Diag::Unit, st.solve)?;
    if a22.rows() > 0 {
        eng.gemm_sub(a22, l21, u12.rb(), st.update)?;
    }
    Ok(())
}

/// Recursive panel factorization of a tall `m × w` block; pivots are
/// 0-based relative to the block.
fn panel(
    mut a: MatMut<'_>,
    piv: &mut [usize],
    singular: &mut Option<usize>,
    inner_nb: usize,
    eng: &Engine,
    st: &FactorStrategies,
) -> Result<()> {
    let (m, w) = (a.rows(), a.cols());
    if w <= inner_nb {
        getf2(a, piv, singular);
        return Ok(());
    }
    let h = w / 2;
    let (mut left, mut right) = a.rb_mut().split_at_col(h);
    panel(left.rb_mut(), &mut piv[..h], singular, inner_nb, eng, st)?;
    swap_rows(right.rb_mut(), &piv[..h], 0);
    {
        let (l_top, l_bottom) = split_rows(left.rb(), h);
        let (u12, a22) = right.rb_mut().split_at_row(h);
        trailing(l_top, l_bottom, u12, a22, eng, st)?;
    }
    let mut inner = None;
    let rm = m.min(w) - h;
    panel(right.rb_mut().submatrix(h, 0, m - h, w - h), &mut piv[h..h + rm], &mut inner, inner_nb, eng, st)?;
    if singular.is_none() {
        *singular = inner.map(|c| c + h);
    }
    for p in &mut piv[h..h + rm] {
        *p += h;
    }
    swap_rows(left.submatrix(0, 0, m, h), &piv[h..h + rm], h);
    Ok(())
}

/// Unblocked right-looking LU: pivot search, row swap, scaling and a
/// rank-1 update per column.
fn getf2(mut a: MatMut<'_>, piv: &mut [usize], singular: &mut Option<usize>) {
    let (m, n) = (a.rows(), a.cols());
    for j in 0..m.min(n) {
        let col: Vec<f64> = (j..m).map(|i| a.get(i, j)).collect();
        let p = j + iamax(&col).unwrap_or(0);
        piv[j] = p;
        let pv = a.get(p, j);
        if pv != 0.0 {
            a.swap_rows(j, p);
            let r = 1.0 / pv;
            for i in j + 1..m {
                a.update(i, j, |v| v * r);
            }
        } else if singular.is_none() {
            *singular = Some(j);
        }
        for c in j + 1..n {
            let u = a.get(j, c);
            if u == 0.0 {
                continue;
            }
            for i in j + 1..m {
                let l = a.get(i, j);
                a.update(i, c, |v| v - l * u);
            }
        }
    }
}

fn split_rows(a: MatRef<'_>, r: usize) -> (MatRef<'_>, MatRef<'_>) {
    (a.submatrix(0, 0, r, a.cols()), a.submatrix(r, 0, a.rows() - r, a.cols()))
}
