use std::sync::Arc;

use asymblis::engine::{admissible, Engine, Instrumentation, Kernel, ShapeCase};
use asymblis::matrix::{make_symmetric, make_unit_dominant_upper, relative_error};
use asymblis::oracle::{oracle_gemm, oracle_symm, oracle_syr2k, oracle_syrk, oracle_trmm, oracle_trsm};
use asymblis::pack::KernelVariant;
use asymblis::{BlockingParams, DenseMatrix, Diag, Error, MachineModel, Side, Strategy};

fn small_params() -> BlockingParams {
    // Small blocks so modest problems cross every loop boundary.
    BlockingParams {
        kc: 24,
        nc: 40,
        mc_by_class: vec![16, 8],
        small_m_mc_by_class: vec![12, 4],
        small_m_threshold: 20,
        ..BlockingParams::default()
    }
}

fn engines() -> Vec<Engine> {
    let m = MachineModel::default();
    vec![Engine::new(m.clone(), m.blocking_params()), Engine::new(m, small_params()), Engine::sequential()]
}

/// Runs one kernel call through `eng` and the oracle; returns the relative
/// error and the inner dimension.
fn run_case(eng: &Engine, case: ShapeCase, size: usize, panel: usize, strategy: Strategy, seed: u64) -> (f64, usize) {
    let (m, n, k) = case.dims(size, panel);
    let side = case.side();
    match case.kernel() {
        Kernel::Gemm => {
            let a = DenseMatrix::random(m, k, seed);
            let b = DenseMatrix::random(k, n, seed + 1);
            let c0 = DenseMatrix::random(m, n, seed + 2);
            let (mut got, mut want) = (c0.clone(), c0);
            eng.gemm(got.as_mut(), a.as_ref(), b.as_ref(), strategy).unwrap();
            oracle_gemm(want.as_mut(), a.as_ref(), b.as_ref()).unwrap();
            (relative_error(got.as_ref(), want.as_ref()), k)
        }
        Kernel::Symm => {
            let a = make_symmetric(k, seed);
            let b = DenseMatrix::random(m, n, seed + 1);
            let c0 = DenseMatrix::random(m, n, seed + 2);
            let (mut got, mut want) = (c0.clone(), c0);
            eng.symm(got.as_mut(), a.as_ref(), b.as_ref(), side, strategy).unwrap();
            oracle_symm(want.as_mut(), a.as_ref(), b.as_ref(), side).unwrap();
            (relative_error(got.as_ref(), want.as_ref()), k)
        }
        Kernel::Trmm => {
            let a = DenseMatrix::random(k, k, seed);
            let b0 = DenseMatrix::random(m, n, seed + 1);
            let (mut got, mut want) = (b0.clone(), b0);
            eng.trmm(got.as_mut(), a.as_ref(), side, Diag::NonUnit, strategy).unwrap();
            oracle_trmm(want.as_mut(), a.as_ref(), side, Diag::NonUnit).unwrap();
            (relative_error(got.as_ref(), want.as_ref()), k)
        }
        Kernel::Trsm => {
            let a = make_unit_dominant_upper(k, seed);
            let b0 = DenseMatrix::random(m, n, seed + 1);
            let (mut got, mut want) = (b0.clone(), b0);
            eng.trsm(got.as_mut(), a.as_ref(), side, Diag::NonUnit, strategy).unwrap();
            oracle_trsm(want.as_mut(), a.as_ref(), side, Diag::NonUnit).unwrap();
            (relative_error(got.as_ref(), want.as_ref()), k)
        }
        Kernel::Syrk => {
            let a = DenseMatrix::random(k, n, seed);
            let c0 = DenseMatrix::random(n, n, seed + 2);
            let (mut got, mut want) = (c0.clone(), c0);
            eng.syrk(got.as_mut(), a.as_ref(), strategy).unwrap();
            oracle_syrk(want.as_mut(), a.as_ref()).unwrap();
            (relative_error(got.upper_triangle(false).as_ref(), want.upper_triangle(false).as_ref()), k)
        }
        Kernel::Syr2k => {
            let a = DenseMatrix::random(k, n, seed);
            let b = DenseMatrix::random(k, n, seed + 1);
            let c0 = DenseMatrix::random(n, n, seed + 2);
            let (mut got, mut want) = (c0.clone(), c0);
            eng.syr2k(got.as_mut(), a.as_ref(), b.as_ref(), strategy).unwrap();
            oracle_syr2k(want.as_mut(), a.as_ref(), b.as_ref()).unwrap();
            (relative_error(got.upper_triangle(false).as_ref(), want.upper_triangle(false).as_ref()), k)
        }
    }
}

#[test]
fn every_kernel_strategy_and_shape_matches_oracle() {
    for eng in engines() {
        for case in ShapeCase::ALL {
            for &st in admissible(case.kernel(), case.side()) {
                for (size, panel) in [(1, 1), (37, 9), (130, 33)] {
                    let (err, k) = run_case(&eng, case, size, panel, st, 11);
                    let tol = 1e-12 * (k as f64).sqrt();
                    assert!(err <= tol, "{case} {st} size={size} panel={panel}: err {err:e}");
                }
            }
        }
    }
}

#[test]
fn trivial_gemm() {
    let mut c = DenseMatrix::from_rows(&[&[1.0]]);
    let a = DenseMatrix::from_rows(&[&[3.0]]);
    let b = DenseMatrix::from_rows(&[&[4.0]]);
    Engine::default().gemm(c.as_mut(), a.as_ref(), b.as_ref(), Strategy::D3S4).unwrap();
    assert_eq!(c[(0, 0)], 13.0);
}

#[test]
fn gemm_300_cube_tight() {
    let eng = Engine::default();
    for st in [Strategy::D3S4, Strategy::D3S5, Strategy::ObS4] {
        let (err, k) = run_case(&eng, ShapeCase::SQUARE, 300, 0, st, 2);
        assert!(err <= 1e-13 * (k as f64).sqrt(), "{st}: {err:e}");
    }
}

#[test]
fn symm_identity_adds_b() {
    let eng = Engine::default();
    for side in [Side::Left, Side::Right] {
        let b = DenseMatrix::random(7, 5, 1);
        let order = if side == Side::Left { 7 } else { 5 };
        let a = DenseMatrix::identity(order);
        let mut c = DenseMatrix::zeros(7, 5);
        eng.symm(c.as_mut(), a.as_ref(), b.as_ref(), side, Strategy::D3S5).unwrap();
        assert_eq!(c, b);
    }
}

#[test]
fn sypm_equals_gemm_with_symmetrized_operand() {
    let eng = Engine::default();
    let a = make_symmetric(90, 3);
    let b = DenseMatrix::random(40, 90, 4);
    let mut c1 = DenseMatrix::zeros(40, 90);
    let mut c2 = DenseMatrix::zeros(40, 90);
    eng.symm(c1.as_mut(), a.as_ref(), b.as_ref(), Side::Right, Strategy::D3S4).unwrap();
    eng.gemm(c2.as_mut(), b.as_ref(), a.symmetrized_upper().as_ref(), Strategy::D3S4).unwrap();
    assert!(relative_error(c1.as_ref(), c2.as_ref()) <= 1e-14);
}

#[test]
fn trmm_and_trsm_trivia() {
    let eng = Engine::default();
    let b0 = DenseMatrix::random(9, 6, 8);
    for side in [Side::Left, Side::Right] {
        let order = if side == Side::Left { 9 } else { 6 };
        let junk = DenseMatrix::random(order, order, 1);
        let mut b = b0.clone();
        // Unit diagonal with strictly upper zero: identity, whatever lies below.
        let unit = DenseMatrix::from_fn(order, order, |i, j| if i > j { junk[(i, j)] } else { 0.0 });
        eng.trmm(b.as_mut(), unit.as_ref(), side, Diag::Unit, Strategy::D3S4).unwrap();
        assert_eq!(b, b0);
        let st = if side == Side::Left { Strategy::S1S4 } else { Strategy::S3 };
        eng.trsm(b.as_mut(), DenseMatrix::identity(order).as_ref(), side, Diag::NonUnit, st).unwrap();
        assert_eq!(b, b0);
    }
    let mut b = b0.clone();
    let two = DenseMatrix::from_fn(9, 9, |i, j| if i == j { 2.0 } else { 0.0 });
    eng.trsm(b.as_mut(), two.as_ref(), Side::Left, Diag::NonUnit, Strategy::S1S4).unwrap();
    assert_eq!(b, DenseMatrix::from_fn(9, 6, |i, j| b0[(i, j)] / 2.0));

    let mut one = DenseMatrix::from_rows(&[&[5.0, -1.0]]);
    eng.trmm(one.as_mut(), DenseMatrix::from_rows(&[&[3.0]]).as_ref(), Side::Left, Diag::NonUnit, Strategy::D3S5)
        .unwrap();
    assert_eq!(one, DenseMatrix::from_rows(&[&[15.0, -3.0]]));
}

#[test]
fn trsm_reports_zero_diagonal() {
    let eng = Engine::default();
    let mut a = make_unit_dominant_upper(12, 1);
    a[(7, 7)] = 0.0;
    let mut b = DenseMatrix::random(12, 3, 2);
    let e = eng.trsm(b.as_mut(), a.as_ref(), Side::Left, Diag::NonUnit, Strategy::S1S4).unwrap_err();
    assert_eq!(e, Error::Singular { index: 7 });
    // A unit diagonal ignores the stored zero.
    assert!(eng.trsm(b.as_mut(), a.as_ref(), Side::Left, Diag::Unit, Strategy::S1S4).is_ok());
}

#[test]
fn trsm_residual_bound() {
    let eng = Engine::default();
    for (side, st) in [(Side::Left, Strategy::S1S4), (Side::Right, Strategy::S3), (Side::Right, Strategy::S3S5)] {
        let n = 600;
        let a = make_unit_dominant_upper(n, 5);
        let (m, cols) = if side == Side::Left { (n, 48) } else { (48, n) };
        let b0 = DenseMatrix::random(m, cols, 6);
        let mut x = b0.clone();
        eng.trsm(x.as_mut(), a.as_ref(), side, Diag::NonUnit, st).unwrap();
        eng.trmm(x.as_mut(), a.as_ref(), side, Diag::NonUnit, Strategy::D3S4).unwrap();
        assert!(relative_error(x.as_ref(), b0.as_ref()) <= 1e-10, "{st}");
    }
}

#[test]
fn inadmissible_strategies_are_rejected() {
    let eng = Engine::default();
    let a = DenseMatrix::identity(4);
    let mut b = DenseMatrix::zeros(4, 4);
    let e = eng.trsm(b.as_mut(), a.as_ref(), Side::Left, Diag::NonUnit, Strategy::D3S4).unwrap_err();
    assert!(matches!(e, Error::InadmissibleStrategy { .. }));
    let e = eng.syrk(b.as_mut(), a.as_ref(), Strategy::ObS4).unwrap_err();
    assert!(matches!(e, Error::InadmissibleStrategy { .. }));
}

#[test]
fn dimension_errors() {
    let eng = Engine::default();
    let a = DenseMatrix::zeros(3, 4);
    let b = DenseMatrix::zeros(5, 2);
    let mut c = DenseMatrix::zeros(3, 2);
    assert!(matches!(
        eng.gemm(c.as_mut(), a.as_ref(), b.as_ref(), Strategy::D3S4),
        Err(Error::DimensionMismatch(_))
    ));
    let mut sq = DenseMatrix::zeros(4, 4);
    assert!(matches!(eng.syrk(sq.as_mut(), b.as_ref(), Strategy::D3S4), Err(Error::DimensionMismatch(_))));
}

#[test]
fn syrk_ones_column_increments_upper() {
    let eng = Engine::default();
    let a = DenseMatrix::from_fn(1, 9, |_, _| 1.0);
    let mut c = DenseMatrix::zeros(9, 9);
    eng.syrk(c.as_mut(), a.as_ref(), Strategy::D3S4).unwrap();
    for j in 0..9 {
        for i in 0..9 {
            assert_eq!(c[(i, j)], if i <= j { 1.0 } else { 0.0 });
        }
    }
}

#[test]
fn syr2k_with_zero_b_is_noop() {
    let eng = Engine::default();
    let a = DenseMatrix::random(5, 20, 1);
    let b = DenseMatrix::zeros(5, 20);
    let c0 = DenseMatrix::random(20, 20, 2);
    let mut c = c0.clone();
    eng.syr2k(c.as_mut(), a.as_ref(), b.as_ref(), Strategy::D3S5).unwrap();
    assert_eq!(c, c0);
}

#[test]
fn symmetric_updates_never_touch_strict_lower() {
    let canary = f64::from_bits(0x7ff8_dead_beef_0001);
    for eng in engines() {
        for st in [Strategy::D3S4, Strategy::D3S5] {
            let n = 77;
            let a = DenseMatrix::random(13, n, 3);
            let b = DenseMatrix::random(13, n, 4);
            let mut c = DenseMatrix::from_fn(n, n, |i, j| if i > j { canary } else { 0.0 });
            eng.syrk(c.as_mut(), a.as_ref(), st).unwrap();
            eng.syr2k(c.as_mut(), a.as_ref(), b.as_ref(), st).unwrap();
            for j in 0..n {
                for i in j + 1..n {
                    assert_eq!(c[(i, j)].to_bits(), canary.to_bits());
                }
            }
        }
    }
}

#[test]
fn strategies_agree_with_single_worker() {
    let seq = Engine::sequential();
    let par = Engine::new(MachineModel::default(), small_params());
    for case in ShapeCase::ALL {
        for &st in admissible(case.kernel(), case.side()) {
            let (e1, _) = run_case(&seq, case, 150, 20, st, 21);
            let (e2, _) = run_case(&par, case, 150, 20, st, 21);
            // Both are close to the same oracle, hence to each other.
            assert!(e1 <= 1e-13 && e2 <= 1e-13, "{case} {st}: {e1:e} {e2:e}");
        }
    }
}

#[test]
fn dispensed_chunks_cover_m_with_class_strides() {
    let ins = Arc::new(Instrumentation::new(false));
    let machine = MachineModel::default();
    let eng = Engine::new(machine.clone(), machine.blocking_params()).with_instrumentation(ins.clone());
    let (m, n, k) = (6000, 8, 8);
    let a = DenseMatrix::random(m, k, 1);
    let b = DenseMatrix::random(k, n, 2);
    let mut c = DenseMatrix::zeros(m, n);
    eng.gemm(c.as_mut(), a.as_ref(), b.as_ref(), Strategy::D3S4).unwrap();
    let mut chunks = ins.chunks_in(0);
    chunks.sort_by_key(|c| c.rows.start);
    let mut next = 0;
    for ch in &chunks {
        assert_eq!(ch.rows.start, next);
        let stride = [152, 32][ch.class];
        assert!(ch.rows.len() == stride || ch.rows.end == m);
        next = ch.rows.end;
    }
    assert_eq!(next, m);
}

#[test]
fn corrupted_kernel_is_detectable() {
    let eng = Engine::default().with_variant(KernelVariant::Corrupted);
    let (err, _) = run_case(&eng, ShapeCase::SQUARE, 40, 0, Strategy::D3S4, 1);
    assert!(err > 1e-6);
}

#[test]
fn free_functions_match_engine() {
    let machine = MachineModel::default();
    let params = machine.blocking_params();
    let a = DenseMatrix::random(30, 20, 1);
    let b = DenseMatrix::random(20, 10, 2);
    let mut c1 = DenseMatrix::zeros(30, 10);
    let mut c2 = DenseMatrix::zeros(30, 10);
    asymblis::engine::gemm(c1.as_mut(), a.as_ref(), b.as_ref(), &machine, Strategy::D3S4, &params).unwrap();
    Engine::new(machine, params).gemm(c2.as_mut(), a.as_ref(), b.as_ref(), Strategy::D3S4).unwrap();
    assert!(relative_error(c1.as_ref(), c2.as_ref()) <= 1e-15);
}
