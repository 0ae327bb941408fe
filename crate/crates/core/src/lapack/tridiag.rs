use super::{FactorStrategies, LapackConfig};
use crate::engine::{dot, nrm2, symv, Engine};
use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, MatMut};

/// Output of [`sytrd`]: `T = tridiag(e, d, e)` plus the reflector scalars.
/// The reflector vectors themselves stay in the strictly upper part of
/// the factored matrix, LAPACK style: reflector `i` has
/// `v = (A[0..i, i+1], 1, 0, …)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReflectorSet {
    pub d: Vec<f64>,
    pub e: Vec<f64>,
    pub tau: Vec<f64>,
}

impl ReflectorSet {
    pub fn tridiagonal(&self) -> DenseMatrix {
        let n = self.d.len();
        DenseMatrix::from_fn(n, n, |i, j| {
            if i == j {
                self.d[i]
            } else if i + 1 == j {
                self.e[i]
            } else if j + 1 == i {
                self.e[j]
            } else {
                0.0
            }
        })
    }
}

/// An explicit Householder reflector `H = I − τ·v·vᵀ` with `v[0] = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Reflector {
    pub v: Vec<f64>,
    pub tau: f64,
    pub beta: f64,
}

/// Generates `H` with `H·(alpha, x) = (beta, 0)`. On return `alpha` holds
/// `beta` and `x` holds `v[1..]`; the return value is `τ`. `β` takes the
/// sign opposite to `alpha`.
pub fn larfg(alpha: &mut f64, x: &mut [f64]) -> f64 {
    let xnorm = nrm2(x);
    if xnorm == 0.0 {
        return 0.0;
    }
    let beta = -alpha.hypot(xnorm).copysign(*alpha);
    let tau = (beta - *alpha) / beta;
    let s = 1.0 / (*alpha - beta);
    x.iter_mut().for_each(|v| *v *= s);
    *alpha = beta;
    tau
}

pub fn householder(x: &[f64]) -> Reflector {
    if x.is_empty() {
        return Reflector { v: vec![], tau: 0.0, beta: 0.0 };
    }
    let mut alpha = x[0];
    let mut v = x.to_vec();
    let tau = larfg(&mut alpha, &mut v[1..]);
    v[0] = 1.0;
    Reflector { v, tau, beta: alpha }
}

/// Orthogonal reduction of a symmetric matrix (upper triangle referenced)
/// to tridiagonal form, `Qᵀ·A·Q = T`.
///
/// Blocked: each `nb` panel is reduced with single-threaded symv work
/// while accumulating `W`, then the leading block takes the rank-2`nb`
/// update `A -= V·Wᵀ + W·Vᵀ` through syr2k. The last block is reduced
/// unblocked.
pub fn sytrd(mut a: MatMut<'_>, cfg: &LapackConfig, eng: &Engine, st: &FactorStrategies) -> Result<ReflectorSet> {
    cfg.validate()?;
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::NotSquare { rows: n, cols: a.cols() });
    }
    let mut out = ReflectorSet {
        d: vec![0.0; n],
        e: vec![0.0; n.saturating_sub(1)],
        tau: vec![0.0; n.saturating_sub(1)],
    };
    if n == 0 {
        return Ok(out);
    }
    let nb = cfg.nb;
    let kk = if nb <= 1 || nb >= n { n } else { n - ((n - 1) / nb) * nb };
    // 1-based block starts, as in the reference algorithm.
    for blk in 0..(n - kk) / nb.max(1) {
        let i = n + 1 - nb - blk * nb;
        let lead = i + nb - 1;
        let w = latrd(a.rb_mut(), lead, nb, &mut out);
        let (left, right) = a.rb_mut().split_at_col(i - 1);
        let c = left.submatrix(0, 0, i - 1, i - 1);
        let v = right.into_ref().submatrix(0, 0, i - 1, nb);
        let wm = w.view(0, 0, i - 1, nb);
        eng.syr2k_sub(c, v.transpose(), wm.transpose(), st.update)?;
        for j in i..i + nb {
            a.set(j - 2, j - 1, out.e[j - 2]);
            out.d[j - 1] = a.get(j - 1, j - 1);
        }
    }
    sytd2(a.submatrix(0, 0, kk, kk), &mut out);
    Ok(out)
}

/// Unblocked reduction of the leading `n × n` block.
fn sytd2(mut a: MatMut<'_>, out: &mut ReflectorSet) {
    let n = a.rows();
    if n == 0 {
        return;
    }
    for i in (1..n).rev() {
        let col = i;
        let mut alpha = a.get(i - 1, col);
        let mut x: Vec<f64> = (0..i - 1).map(|r| a.get(r, col)).collect();
        let taui = larfg(&mut alpha, &mut x);
        for (r, &v) in x.iter().enumerate() {
            a.set(r, col, v);
        }
        out.e[i - 1] = alpha;
        if taui != 0.0 {
            a.set(i - 1, col, 1.0);
            let v: Vec<f64> = (0..i).map(|r| a.get(r, col)).collect();
            let mut w = vec![0.0; i];
            symv(&mut w, a.rb().submatrix(0, 0, i, i), &v).expect("conformant");
            w.iter_mut().for_each(|t| *t *= taui);
            let s = -0.5 * taui * dot(&w, &v).expect("conformant");
            w.iter_mut().zip(&v).for_each(|(t, vi)| *t += s * vi);
            for c in 0..i {
                for r in 0..=c {
                    a.update(r, c, |x| x - v[r] * w[c] - w[r] * v[c]);
                }
            }
            a.set(i - 1, col, out.e[i - 1]);
        }
        out.d[i] = a.get(i, i);
        out.tau[i - 1] = taui;
    }
    out.d[0] = a.get(0, 0);
}

/// Reduces the last `nb` columns of the leading `nn × nn` block and
/// returns the `nn × nb` matrix `W`. Indices follow the 1-based reference
/// formulation (`ii` is the column being reduced, `iw` its `W` column).
fn latrd(mut a: MatMut<'_>, nn: usize, nb: usize, out: &mut ReflectorSet) -> DenseMatrix {
    let mut w = DenseMatrix::zeros(nn, nb);
    for ii in (nn - nb + 1..=nn).rev() {
        let iw = ii + nb - nn;
        let col = ii - 1;
        let trail = nn - ii;
        if ii < nn {
            for r in 0..ii {
                let mut s = 0.0;
                for c in 0..trail {
                    s += a.get(r, ii + c) * w[(ii - 1, iw + c)] + w[(r, iw + c)] * a.get(ii - 1, ii + c);
                }
                a.update(r, col, |x| x - s);
            }
        }
        if ii > 1 {
            let mut alpha = a.get(ii - 2, col);
            let mut x: Vec<f64> = (0..ii - 2).map(|r| a.get(r, col)).collect();
            let tau = larfg(&mut alpha, &mut x);
            for (r, &v) in x.iter().enumerate() {
                a.set(r, col, v);
            }
            out.e[ii - 2] = alpha;
            out.tau[ii - 2] = tau;
            a.set(ii - 2, col, 1.0);

            let len = ii - 1;
            let v: Vec<f64> = (0..len).map(|r| a.get(r, col)).collect();
            let mut wv = vec![0.0; len];
            symv(&mut wv, a.rb().submatrix(0, 0, len, len), &v).expect("conformant");
            if ii < nn {
                let t: Vec<f64> = (0..trail).map(|c| (0..len).map(|r| w[(r, iw + c)] * v[r]).sum()).collect();
                for (r, x) in wv.iter_mut().enumerate() {
                    *x -= (0..trail).map(|c| a.get(r, ii + c) * t[c]).sum::<f64>();
                }
                let t2: Vec<f64> = (0..trail).map(|c| (0..len).map(|r| a.get(r, ii + c) * v[r]).sum()).collect();
                for (r, x) in wv.iter_mut().enumerate() {
                    *x -= (0..trail).map(|c| w[(r, iw + c)] * t2[c]).sum::<f64>();
                }
            }
            wv.iter_mut().for_each(|x| *x *= tau);
            let s = -0.5 * tau * dot(&wv, &v).expect("conformant");
            for (r, x) in wv.iter().enumerate() {
                w[(r, iw - 1)] = x + s * v[r];
            }
        }
    }
    w
}
