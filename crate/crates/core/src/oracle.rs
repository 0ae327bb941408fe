//! Naive reference implementations of the level-3 operations.
//!
//! Every oracle is the textbook definition with a fixed loop order
//! (row outer, column middle, reduction inner), so results are
//! bit-reproducible. Structured operands are read from their upper triangle.

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, Diag, MatMut, MatRef, Side};

fn check(cond: bool, what: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(what()))
    }
}

#[inline]
fn sym_upper(a: MatRef<'_>, i: usize, j: usize) -> f64 {
    if i <= j {
        a.get(i, j)
    } else {
        a.get(j, i)
    }
}

#[inline]
fn tri_upper(a: MatRef<'_>, i: usize, j: usize, diag: Diag) -> f64 {
    if i < j {
        a.get(i, j)
    } else if i == j {
        match diag {
            Diag::Unit => 1.0,
            Diag::NonUnit => a.get(i, i),
        }
    } else {
        0.0
    }
}

/// `C += A·B`.
pub fn oracle_gemm(mut c: MatMut<'_>, a: MatRef<'_>, b: MatRef<'_>) -> Result<()> {
    let (m, n, k) = (c.rows(), c.cols(), a.cols());
    check(a.rows() == m && b.rows() == k && b.cols() == n, || {
        format!(
            "gemm C {}x{}, A {}x{}, B {}x{}",
            m,
            n,
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )
    })?;
    for i in 0..m {
        for j in 0..n {
            let mut s = 0.0;
            for p in 0..k {
                s += a.get(i, p) * b.get(p, j);
            }
            c.set(i, j, c.get(i, j) + s);
        }
    }
    Ok(())
}

/// `C += A·B` (left) or `C += B·A` (right) with `A` symmetric, upper stored.
pub fn oracle_symm(mut c: MatMut<'_>, a: MatRef<'_>, b: MatRef<'_>, side: Side) -> Result<()> {
    let (m, n) = (c.rows(), c.cols());
    let dim = match side {
        Side::Left => m,
        Side::Right => n,
    };
    check(
        a.rows() == dim && a.cols() == dim && b.rows() == m && b.cols() == n,
        || format!("symm C {m}x{n}, A {}x{}, B {}x{}", a.rows(), a.cols(), b.rows(), b.cols()),
    )?;
    for i in 0..m {
        for j in 0..n {
            let mut s = 0.0;
            match side {
                Side::Left => {
                    for p in 0..m {
                        s += sym_upper(a, i, p) * b.get(p, j);
                    }
                }
                Side::Right => {
                    for p in 0..n {
                        s += b.get(i, p) * sym_upper(a, p, j);
                    }
                }
            }
            c.set(i, j, c.get(i, j) + s);
        }
    }
    Ok(())
}

/// `B := A·B` (left) or `B := B·A` (right) with `A` upper triangular.
pub fn oracle_trmm(mut b: MatMut<'_>, a: MatRef<'_>, side: Side, diag: Diag) -> Result<()> {
    let (m, n) = (b.rows(), b.cols());
    let dim = match side {
        Side::Left => m,
        Side::Right => n,
    };
    check(a.rows() == dim && a.cols() == dim, || {
        format!("trmm B {m}x{n}, A {}x{}", a.rows(), a.cols())
    })?;
    let b0 = DenseMatrix::from_view(b.rb());
    for i in 0..m {
        for j in 0..n {
            let mut s = 0.0;
            match side {
                Side::Left => {
                    for p in i..m {
                        s += tri_upper(a, i, p, diag) * b0[(p, j)];
                    }
                }
                Side::Right => {
                    for p in 0..=j {
                        s += b0[(i, p)] * tri_upper(a, p, j, diag);
                    }
                }
            }
            b.set(i, j, s);
        }
    }
    Ok(())
}

/// `B := A⁻¹·B` (left, back substitution per column) or `B := B·A⁻¹`
/// (right, forward substitution per row), `A` upper triangular.
pub fn oracle_trsm(mut b: MatMut<'_>, a: MatRef<'_>, side: Side, diag: Diag) -> Result<()> {
    let (m, n) = (b.rows(), b.cols());
    let dim = match side {
        Side::Left => m,
        Side::Right => n,
    };
    check(a.rows() == dim && a.cols() == dim, || {
        format!("trsm B {m}x{n}, A {}x{}", a.rows(), a.cols())
    })?;
    if diag == Diag::NonUnit {
        if let Some(index) = (0..dim).find(|&i| a.get(i, i) == 0.0) {
            return Err(Error::Singular { index });
        }
    }
    match side {
        Side::Left => {
            for j in 0..n {
                for i in (0..m).rev() {
                    let mut s = b.get(i, j);
                    for p in i + 1..m {
                        s -= a.get(i, p) * b.get(p, j);
                    }
                    b.set(i, j, s / tri_upper(a, i, i, diag));
                }
            }
        }
        Side::Right => {
            for i in 0..m {
                for j in 0..n {
                    let mut s = b.get(i, j);
                    for p in 0..j {
                        s -= b.get(i, p) * a.get(p, j);
                    }
                    b.set(i, j, s / tri_upper(a, j, j, diag));
                }
            }
        }
    }
    Ok(())
}

/// Upper triangle of `C += AᵀA`, `A` is k×n. The strict lower triangle is untouched.
pub fn oracle_syrk(mut c: MatMut<'_>, a: MatRef<'_>) -> Result<()> {
    let n = c.rows();
    check(c.cols() == n && a.cols() == n, || {
        format!("syrk C {}x{}, A {}x{}", n, c.cols(), a.rows(), a.cols())
    })?;
    let k = a.rows();
    for i in 0..n {
        for j in i..n {
            let mut s = 0.0;
            for p in 0..k {
                s += a.get(p, i) * a.get(p, j);
            }
            c.set(i, j, c.get(i, j) + s);
        }
    }
    Ok(())
}

/// Upper triangle of `C += AᵀB + BᵀA`, `A` and `B` are k×n.
pub fn oracle_syr2k(mut c: MatMut<'_>, a: MatRef<'_>, b: MatRef<'_>) -> Result<()> {
    let n = c.rows();
    check(
        c.cols() == n && a.cols() == n && b.cols() == n && a.rows() == b.rows(),
        || {
            format!(
                "syr2k C {}x{}, A {}x{}, B {}x{}",
                n,
                c.cols(),
                a.rows(),
                a.cols(),
                b.rows(),
                b.cols()
            )
        },
    )?;
    let k = a.rows();
    for i in 0..n {
        for j in i..n {
            let mut s = 0.0;
            for p in 0..k {
                s += a.get(p, i) * b.get(p, j) + b.get(p, i) * a.get(p, j);
            }
            c.set(i, j, c.get(i, j) + s);
        }
    }
    Ok(())
}

/// `y += A·x` with `A` symmetric, upper stored.
pub fn oracle_symv(y: &mut [f64], a: MatRef<'_>, x: &[f64]) -> Result<()> {
    let n = a.rows();
    check(a.cols() == n && x.len() == n && y.len() == n, || {
        format!("symv A {}x{}, x {}, y {}", n, a.cols(), x.len(), y.len())
    })?;
    for (i, yi) in y.iter_mut().enumerate() {
        let mut s = 0.0;
        for (p, xp) in x.iter().enumerate() {
            s += sym_upper(a, i, p) * xp;
        }
        *yi += s;
    }
    Ok(())
}
