//! Single-threaded level-1/2 helpers used by the factorizations.

use crate::error::{Error, Result};
use crate::matrix::{MatMut, MatRef};

fn check(what: &str, got: usize, want: usize) -> Result<()> {
    if got == want {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!("{what}: length {got}, expected {want}")))
    }
}

/// `y += A·x` reading only the upper triangle of the square `A`.
pub fn symv(y: &mut [f64], a: MatRef<'_>, x: &[f64]) -> Result<()> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::NotSquare { rows: n, cols: a.cols() });
    }
    check("symv x", x.len(), n)?;
    check("symv y", y.len(), n)?;
    for j in 0..n {
        let xj = x[j];
        let mut t = 0.0;
        for i in 0..j {
            let aij = a.get(i, j);
            y[i] += aij * xj;
            t += aij * x[i];
        }
        y[j] += t + a.get(j, j) * xj;
    }
    Ok(())
}

/// `y += alpha·A·x`.
pub fn gemv(alpha: f64, a: MatRef<'_>, x: &[f64], y: &mut [f64]) -> Result<()> {
    check("gemv x", x.len(), a.cols())?;
    check("gemv y", y.len(), a.rows())?;
    for (j, &xj) in x.iter().enumerate() {
        let s = alpha * xj;
        if s == 0.0 {
            continue;
        }
        for (i, yi) in y.iter_mut().enumerate() {
            *yi += a.get(i, j) * s;
        }
    }
    Ok(())
}

/// Rank-1 update `A += alpha·x·yᵀ`.
pub fn ger(alpha: f64, x: &[f64], y: &[f64], mut a: MatMut<'_>) -> Result<()> {
    check("ger x", x.len(), a.rows())?;
    check("ger y", y.len(), a.cols())?;
    for (j, &yj) in y.iter().enumerate() {
        let s = alpha * yj;
        for (i, &xi) in x.iter().enumerate() {
            a.update(i, j, |v| v + xi * s);
        }
    }
    Ok(())
}

/// Index of the first entry of largest magnitude; `None` for an empty vector.
pub fn iamax(x: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in x.iter().enumerate() {
        let a = v.abs();
        if best.is_none_or(|(_, b)| a > b) {
            best = Some((i, a));
        }
    }
    best.map(|(i, _)| i)
}

pub fn row_swap(mut a: MatMut<'_>, i: usize, j: usize) {
    a.swap_rows(i, j);
}

pub fn scal(alpha: f64, x: &mut [f64]) {
    x.iter_mut().for_each(|v| *v *= alpha);
}

pub fn dot(x: &[f64], y: &[f64]) -> Result<f64> {
    check("dot", y.len(), x.len())?;
    Ok(x.iter().zip(y).map(|(a, b)| a * b).sum())
}

/// `y += alpha·x`.
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) -> Result<()> {
    check("axpy", y.len(), x.len())?;
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
    Ok(())
}

pub fn nrm2(x: &[f64]) -> f64 {
    // Scaled accumulation, as in the reference BLAS, to avoid overflow.
    let mut scale = 0.0f64;
    let mut ssq = 1.0f64;
    for &v in x {
        if v != 0.0 {
            let a = v.abs();
            if scale < a {
                ssq = 1.0 + ssq * (scale / a).powi(2);
                scale = a;
            } else {
                ssq += (a / scale).powi(2);
            }
        }
    }
    scale * ssq.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{make_symmetric, DenseMatrix};
    use crate::oracle::oracle_gemm;

    #[test]
    fn symv_identity_and_hand_case() {
        let i3 = DenseMatrix::identity(3);
        let mut y = vec![1.0, 1.0, 1.0];
        symv(&mut y, i3.as_ref(), &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(y, vec![2.0, 3.0, 4.0]);

        // Lower entry is garbage and must be ignored.
        let a = DenseMatrix::from_rows(&[&[1.0, 2.0], &[99.0, 3.0]]);
        let mut y = vec![0.0, 0.0];
        symv(&mut y, a.as_ref(), &[1.0, 1.0]).unwrap();
        assert_eq!(y, vec![3.0, 5.0]);
    }

    #[test]
    fn symv_matches_dense_product() {
        let n = 200;
        let a = make_symmetric(n, 4);
        let x = DenseMatrix::random(n, 1, 5);
        let mut want = DenseMatrix::zeros(n, 1);
        oracle_gemm(want.as_mut(), a.symmetrized_upper().as_ref(), x.as_ref()).unwrap();
        let mut y = vec![0.0; n];
        symv(&mut y, a.upper_triangle(false).as_ref(), x.as_slice()).unwrap();
        let num: f64 = y.iter().zip(want.as_slice()).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let den: f64 = want.as_slice().iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(num / den <= 1e-13);
    }

    #[test]
    fn symv_rejects_bad_lengths() {
        let a = DenseMatrix::identity(3);
        let mut y = vec![0.0; 2];
        assert!(matches!(symv(&mut y, a.as_ref(), &[0.0; 3]), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn iamax_first_of_ties() {
        assert_eq!(iamax(&[1.0, -3.0, 3.0]), Some(1));
        assert_eq!(iamax(&[]), None);
    }

    #[test]
    fn ger_and_gemv() {
        let mut a = DenseMatrix::zeros(2, 2);
        ger(2.0, &[1.0, 2.0], &[3.0, 4.0], a.as_mut()).unwrap();
        assert_eq!(a[(1, 1)], 16.0);
        let mut y = vec![0.0, 0.0];
        gemv(0.5, a.as_ref(), &[1.0, 0.0], &mut y).unwrap();
        assert_eq!(y, vec![3.0, 6.0]);
    }

    #[test]
    fn nrm2_survives_large_values() {
        assert_eq!(nrm2(&[3.0, 4.0]), 5.0);
        let big = nrm2(&[1e200, 1e200]);
        assert!((big / 1e200 - 2f64.sqrt()).abs() < 1e-15);
    }
}
