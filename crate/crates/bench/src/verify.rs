//! Oracle-equivalence and invariant checks at desk scale.

use std::fmt;

use asymblis::engine::{admissible, Engine, Kernel, ShapeCase};
use asymblis::lapack::{getrf, potrf, sytrd, FactorStrategies, LapackConfig, PivotVector};
use asymblis::matrix::{frobenius_norm, make_spd, make_symmetric, make_unit_dominant_upper, relative_error, trace};
use asymblis::oracle::{oracle_gemm, oracle_symm, oracle_syr2k, oracle_syrk, oracle_trmm, oracle_trsm};
use asymblis::pack::KernelVariant;
use asymblis::{DenseMatrix, Diag, Strategy};

use crate::workload::Routine;

pub const KERNEL_SIZES: [usize; 3] = [1, 150, 600];
pub const PANEL: usize = 64;
pub const ROUTINE_SIZES: [usize; 4] = [1, 64, 300, 600];

pub const POTRF_TOL: f64 = 1e-12;
pub const GETRF_TOL: f64 = 1e-11;
pub const SYTRD_TOL: f64 = 1e-11;
pub const EIGEN_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub max_error: f64,
    /// Bound at the size that produced `max_error`.
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, max_error: f64, tolerance: f64) -> Self {
        // NaN fails
        let passed = max_error <= tolerance;
        Check { name: name.into(), max_error, tolerance, passed }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} max_err={:.3e} tol={:.3e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.max_error,
            self.tolerance
        )
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Kernel or routine name; `None` runs everything.
    pub filter: Option<String>,
    pub seed: u64,
    pub variant: KernelVariant,
    pub kernel_sizes: Vec<usize>,
    pub routine_sizes: Vec<usize>,
    pub panel: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            filter: None,
            seed: 42,
            variant: KernelVariant::Reference,
            kernel_sizes: KERNEL_SIZES.to_vec(),
            routine_sizes: ROUTINE_SIZES.to_vec(),
            panel: PANEL,
        }
    }
}

fn selected(filter: &Option<String>, name: &str) -> bool {
    filter.as_deref().is_none_or(|f| f.eq_ignore_ascii_case(name))
}

/// Known `--filter` values.
pub fn filter_names() -> Vec<&'static str> {
    Kernel::ALL.iter().map(|k| k.name()).chain(Routine::ALL.iter().map(|r| r.name())).collect()
}

/// Runs every selected check; the caller decides what to print.
pub fn run_suite(opts: &VerifyOptions, mut report: impl FnMut(&Check)) -> Vec<Check> {
    let eng = Engine::default().with_variant(opts.variant);
    let mut out = Vec::new();
    let mut push = |c: Check| {
        report(&c);
        out.push(c);
    };
    for case in ShapeCase::ALL {
        if !selected(&opts.filter, case.kernel().name()) {
            continue;
        }
        for &st in admissible(case.kernel(), case.side()) {
            let (mut worst, mut tol, mut passed) = (0.0f64, 0.0, true);
            for (i, &size) in opts.kernel_sizes.iter().enumerate() {
                let (err, k) = kernel_error(&eng, case, size, opts.panel, st, opts.seed + i as u64);
                let err = if err.is_nan() { f64::INFINITY } else { err };
                let t = 1e-12 * (k.max(1) as f64).sqrt();
                passed &= err <= t;
                if err >= worst {
                    (worst, tol) = (err, t);
                }
            }
            push(Check {
                name: format!("{}/{} {}", case.kernel(), case, st),
                max_error: worst,
                tolerance: tol,
                passed,
            });
        }
    }
    for r in Routine::ALL {
        if !selected(&opts.filter, r.name()) {
            continue;
        }
        for c in routine_checks(&eng, r, &opts.routine_sizes, opts.seed) {
            push(c);
        }
    }
    out
}

/// Relative Frobenius error of one kernel call against its oracle, and the
/// inner dimension `k` that sets the tolerance. Symmetric rank updates
/// compare the upper triangle and return `inf` if the strict lower
/// triangle was touched.
pub fn kernel_error(eng: &Engine, case: ShapeCase, size: usize, panel: usize, st: Strategy, seed: u64) -> (f64, usize) {
    let (m, n, k) = case.dims(size, panel);
    let side = case.side();
    let fail = f64::INFINITY;
    match case.kernel() {
        Kernel::Gemm => {
            let a = DenseMatrix::random(m, k, seed);
            let b = DenseMatrix::random(k, n, seed + 1);
            let c0 = DenseMatrix::random(m, n, seed + 2);
            let (mut got, mut want) = (c0.clone(), c0);
            if eng.gemm(got.as_mut(), a.as_ref(), b.as_ref(), st).is_err() {
                return (fail, k);
            }
            oracle_gemm(want.as_mut(), a.as_ref(), b.as_ref()).expect("conformant");
            (relative_error(got.as_ref(), want.as_ref()), k)
        }
        Kernel::Symm => {
            let a = make_symmetric(k, seed);
            let b = DenseMatrix::random(m, n, seed + 1);
            let c0 = DenseMatrix::random(m, n, seed + 2);
            let (mut got, mut want) = (c0.clone(), c0);
            if eng.symm(got.as_mut(), a.as_ref(), b.as_ref(), side, st).is_err() {
                return (fail, k);
            }
            oracle_symm(want.as_mut(), a.as_ref(), b.as_ref(), side).expect("conformant");
            (relative_error(got.as_ref(), want.as_ref()), k)
        }
        Kernel::Trmm => {
            let a = DenseMatrix::random(k, k, seed);
            let b0 = DenseMatrix::random(m, n, seed + 1);
            let (mut got, mut want) = (b0.clone(), b0);
            if eng.trmm(got.as_mut(), a.as_ref(), side, Diag::NonUnit, st).is_err() {
                return (fail, k);
            }
            oracle_trmm(want.as_mut(), a.as_ref(), side, Diag::NonUnit).expect("conformant");
            (relative_error(got.as_ref(), want.as_ref()), k)
        }
        Kernel::Trsm => {
            let a = make_unit_dominant_upper(k, seed);
            let b0 = DenseMatrix::random(m, n, seed + 1);
            let (mut got, mut want) = (b0.clone(), b0);
            if eng.trsm(got.as_mut(), a.as_ref(), side, Diag::NonUnit, st).is_err() {
                return (fail, k);
            }
            oracle_trsm(want.as_mut(), a.as_ref(), side, Diag::NonUnit).expect("conformant");
            (relative_error(got.as_ref(), want.as_ref()), k)
        }
        Kernel::Syrk | Kernel::Syr2k => {
            let a = DenseMatrix::random(k, n, seed);
            let b = DenseMatrix::random(k, n, seed + 1);
            let c0 = DenseMatrix::random(n, n, seed + 2);
            let (mut got, mut want) = (c0.clone(), c0.clone());
            let res = if case.kernel() == Kernel::Syrk {
                oracle_syrk(want.as_mut(), a.as_ref()).expect("conformant");
                eng.syrk(got.as_mut(), a.as_ref(), st)
            } else {
                oracle_syr2k(want.as_mut(), a.as_ref(), b.as_ref()).expect("conformant");
                eng.syr2k(got.as_mut(), a.as_ref(), b.as_ref(), st)
            };
            if res.is_err() {
                return (fail, k);
            }
            let lower_intact = (0..n).all(|j| (j + 1..n).all(|i| got[(i, j)].to_bits() == c0[(i, j)].to_bits()));
            if !lower_intact {
                return (fail, k);
            }
            (relative_error(got.upper_triangle(false).as_ref(), want.upper_triangle(false).as_ref()), k)
        }
    }
}

fn lapack_config() -> LapackConfig {
    // small blocks so that desk-scale orders still take the blocked path
    LapackConfig::new(64, 16).expect("valid")
}

/// `‖A − UᵀU‖_F / ‖A‖_F` after a blocked Cholesky of an SPD matrix.
pub fn potrf_residual(eng: &Engine, n: usize, seed: u64) -> f64 {
    let a0 = make_spd(n, seed).expect("n > 0");
    let mut f = a0.clone();
    if potrf(f.as_mut(), &lapack_config(), eng, &FactorStrategies::default()).is_err() {
        return f64::INFINITY;
    }
    let u = f.upper_triangle(false);
    let mut utu = DenseMatrix::zeros(n, n);
    oracle_gemm(utu.as_mut(), u.as_ref().transpose(), u.as_ref()).expect("conformant");
    relative_error(utu.as_ref(), a0.as_ref())
}

/// `‖PA − LU‖_F / ‖A‖_F` for a uniform random matrix.
pub fn getrf_residual(eng: &Engine, n: usize, seed: u64) -> f64 {
    let a0 = DenseMatrix::random(n, n, seed);
    let mut f = a0.clone();
    let ipiv = match getrf(f.as_mut(), &lapack_config(), eng, &FactorStrategies::default()) {
        Ok(out) if out.singular_at.is_none() => out.pivots,
        _ => return f64::INFINITY,
    };
    lu_residual(&a0, &f, &ipiv)
}

fn lu_residual(a0: &DenseMatrix, f: &DenseMatrix, ipiv: &PivotVector) -> f64 {
    let n = a0.rows();
    let l = DenseMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Greater => f[(i, j)],
        std::cmp::Ordering::Equal => 1.0,
        std::cmp::Ordering::Less => 0.0,
    });
    let u = f.upper_triangle(false);
    let mut lu = DenseMatrix::zeros(n, n);
    oracle_gemm(lu.as_mut(), l.as_ref(), u.as_ref()).expect("conformant");
    let perm = ipiv.permutation(n);
    let pa = DenseMatrix::from_fn(n, n, |i, j| a0[(perm[i], j)]);
    relative_error(lu.as_ref(), pa.as_ref())
}

/// Relative trace and Frobenius-norm drift between `A` and the reduced `T`.
pub fn sytrd_invariants(eng: &Engine, n: usize, seed: u64) -> (f64, f64) {
    let a0 = make_symmetric(n, seed);
    let mut f = a0.clone();
    let refl = match sytrd(f.as_mut(), &lapack_config(), eng, &FactorStrategies::default()) {
        Ok(r) => r,
        Err(_) => return (f64::INFINITY, f64::INFINITY),
    };
    let t = refl.tridiagonal();
    let (ta, tt) = (trace(a0.as_ref()).expect("square"), trace(t.as_ref()).expect("square"));
    let (na, nt) = (frobenius_norm(a0.as_ref()), frobenius_norm(t.as_ref()));
    let scale = na.max(f64::MIN_POSITIVE);
    ((ta - tt).abs() / scale, (na - nt).abs() / scale)
}

/// Largest absolute gap between the sorted eigenvalues of `A` and of its
/// tridiagonal form, both from cyclic Jacobi.
pub fn sytrd_eigen_gap(eng: &Engine, n: usize, seed: u64) -> f64 {
    let a0 = make_symmetric(n, seed);
    let mut f = a0.clone();
    let cfg = LapackConfig::new(2, 1).expect("valid");
    let refl = match sytrd(f.as_mut(), &cfg, eng, &FactorStrategies::default()) {
        Ok(r) => r,
        Err(_) => return f64::INFINITY,
    };
    let want = jacobi_eigenvalues(&a0);
    let got = jacobi_eigenvalues(&refl.tridiagonal());
    want.iter().zip(&got).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

/// Cyclic Jacobi eigenvalues of a dense symmetric matrix, ascending.
pub fn jacobi_eigenvalues(a: &DenseMatrix) -> Vec<f64> {
    let n = a.rows();
    let mut a = a.clone();
    for _ in 0..100 {
        let mut off = 0.0;
        for j in 0..n {
            for i in 0..n {
                if i != j {
                    off += a[(i, j)] * a[(i, j)];
                }
            }
        }
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[(p, q)].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * a[(p, q)]);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

fn routine_checks(eng: &Engine, r: Routine, sizes: &[usize], seed: u64) -> Vec<Check> {
    let worst = |f: &dyn Fn(usize, u64) -> f64| {
        sizes
            .iter()
            .enumerate()
            .map(|(i, &n)| f(n, seed + i as u64))
            .map(|e| if e.is_nan() { f64::INFINITY } else { e })
            .fold(0.0, f64::max)
    };
    match r {
        Routine::Potrf => vec![Check::new("potrf residual", worst(&|n, s| potrf_residual(eng, n, s)), POTRF_TOL)],
        Routine::Getrf => vec![Check::new("getrf residual", worst(&|n, s| getrf_residual(eng, n, s)), GETRF_TOL)],
        Routine::Sytrd => {
            let inv: Vec<_> = sizes.iter().enumerate().map(|(i, &n)| sytrd_invariants(eng, n, seed + i as u64)).collect();
            let max = |f: fn(&(f64, f64)) -> f64| inv.iter().map(f).map(|e| if e.is_nan() { f64::INFINITY } else { e }).fold(0.0, f64::max);
            let eig = (1..=8).map(|n| sytrd_eigen_gap(eng, n, seed + n as u64)).fold(0.0, f64::max);
            vec![
                Check::new("sytrd trace", max(|p| p.0), SYTRD_TOL),
                Check::new("sytrd frobenius", max(|p| p.1), SYTRD_TOL),
                Check::new("sytrd eigenvalues n<=8", eig, EIGEN_TOL),
            ]
        }
    }
}
