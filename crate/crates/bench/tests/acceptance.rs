//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs without the libtest harness so the lines always print.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use asymblis::engine::{admissible, Engine, Instrumentation, Kernel, ShapeCase};
use asymblis::lapack::{flop_fraction, FactorRoutine};
use asymblis::sched::{dispense_chunks, simulate, split_static};
use asymblis::{BlockingParams, DenseMatrix, Diag, MachineModel, Strategy};
use asymblis_bench::verify::{
    getrf_residual, potrf_residual, run_suite, sytrd_eigen_gap, sytrd_invariants, VerifyOptions, EIGEN_TOL, GETRF_TOL,
    POTRF_TOL, SYTRD_TOL,
};

const TABLE2: [(usize, f64); 14] = [
    (100, 0.00),
    (300, 5.50),
    (500, 36.67),
    (1000, 64.97),
    (1500, 75.90),
    (2000, 81.65),
    (2500, 85.18),
    (3000, 87.58),
    (3500, 89.31),
    (4000, 90.61),
    (4500, 91.63),
    (5000, 92.46),
    (5500, 93.15),
    (6000, 93.69),
];

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn oracle_suite() -> Outcome {
    let t = Instant::now();
    let checks = run_suite(&VerifyOptions::default(), |_| {});
    let elapsed = t.elapsed();
    let failed: Vec<_> = checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
    let worst = checks.iter().map(|c| c.max_error / c.tolerance).fold(0.0, f64::max);
    outcome(
        failed.is_empty() && elapsed < Duration::from_secs(300),
        format!(
            "{} checks, failed={failed:?}, worst err/tol={worst:.2e}, {:.1}s",
            checks.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn table2() -> Outcome {
    let mut worst = 0.0f64;
    for (n, want) in TABLE2 {
        for r in [FactorRoutine::PotrfSyrk, FactorRoutine::GetrfGepp] {
            worst = worst.max((flop_fraction(r, n, 256) - want).abs());
        }
    }
    outcome(worst <= 0.15, format!("max deviation {worst:.3} pp over 14 sizes x 2 columns"))
}

fn residuals() -> Outcome {
    let eng = Engine::default();
    let sizes = [1, 100, 500, 1000];
    let po = sizes.iter().map(|&n| potrf_residual(&eng, n, n as u64)).fold(0.0, f64::max);
    let lu = sizes.iter().map(|&n| getrf_residual(&eng, n, n as u64 + 1)).fold(0.0, f64::max);
    let (mut tr, mut fro) = (0.0f64, 0.0f64);
    for n in [1, 100, 500, 1000] {
        let (a, b) = sytrd_invariants(&eng, n, n as u64 + 2);
        (tr, fro) = (tr.max(a), fro.max(b));
    }
    let eig = (1..=8).map(|n| sytrd_eigen_gap(&eng, n, 100 + n as u64)).fold(0.0, f64::max);
    outcome(
        po <= POTRF_TOL && lu <= GETRF_TOL && tr <= SYTRD_TOL && fro <= SYTRD_TOL && eig <= EIGEN_TOL,
        format!("potrf {po:.2e}, getrf {lu:.2e}, sytrd trace {tr:.2e} frob {fro:.2e}, eig {eig:.2e}"),
    )
}

fn separation() -> Outcome {
    let m = MachineModel::default().simulated();
    let d = simulate(6000, &m, Strategy::D3S4, 1.0).map(|r| r.slowdown());
    let o = simulate(6000, &m, Strategy::ObS4, 1.0).map(|r| r.slowdown());
    match (d, o) {
        (Ok(d), Ok(o)) => outcome(d <= 1.15 && o >= 3.0, format!("D3S4 {d:.3}x ideal, ObS4 {o:.3}x ideal")),
        (d, o) => outcome(false, format!("simulation error: {d:?} {o:?}")),
    }
}

fn stride_tradeoff() -> Outcome {
    // gepm: m = 256 Loop-3 iterations, each 2·n·k flops with n = k = 2000
    let cost = 2.0 * 2000.0 * 2000.0;
    let big = MachineModel::default().simulated().with_strides(&[152, 32]);
    let small = MachineModel::default().simulated().with_strides(&[116, 24]);
    let ib = simulate(256, &big, Strategy::D3S4, cost).map(|r| r.idle_fraction);
    let is = simulate(256, &small, Strategy::D3S4, cost).map(|r| r.idle_fraction);
    match (ib, is) {
        (Ok(b), Ok(s)) => outcome(s < b, format!("idle (116,24) {s:.4} vs (152,32) {b:.4}")),
        (b, s) => outcome(false, format!("simulation error: {b:?} {s:?}")),
    }
}

fn partitions() -> Outcome {
    let split = split_static(512, &[6.0, 1.0]);
    let mut runner = TestRunner::new(Config {
        cases: 1000,
        failure_persistence: None,
        ..Config::default()
    });
    let strat = (1usize..=500, prop::collection::vec(1usize..=200, 1..4), prop::collection::vec(0usize..8, 0..20));
    let prop = runner.run(&strat, |(m, strides, seq)| {
        let seq: Vec<usize> = seq.into_iter().map(|c| c % strides.len()).collect();
        let chunks = dispense_chunks(m, &strides, &seq);
        let mut next = 0;
        for ch in &chunks {
            prop_assert_eq!(ch.start, next);
            prop_assert!(ch.width >= 1 && ch.width <= strides[ch.class]);
            prop_assert!(ch.width == strides[ch.class] || ch.range().end == m);
            next = ch.range().end;
        }
        prop_assert_eq!(next, m);
        prop_assert_eq!(chunks.clone(), dispense_chunks(m, &strides, &seq));
        Ok(())
    });
    outcome(
        split.as_deref() == Ok(&[439, 73][..]) && prop.is_ok(),
        format!("split_static(512,[6,1]) = {split:?}; dispense_chunks proptest (1000 cases): {}", match &prop {
            Ok(()) => "ok".to_string(),
            Err(e) => e.to_string(),
        }),
    )
}

fn small_params() -> BlockingParams {
    BlockingParams {
        kc: 24,
        nc: 40,
        mc_by_class: vec![16, 8],
        small_m_mc_by_class: vec![12, 4],
        small_m_threshold: 20,
        ..BlockingParams::default()
    }
}

fn disjoint_writes() -> Outcome {
    const RUNS: usize = 120;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut collisions, mut multi, mut strategies) = (0usize, 0usize, std::collections::HashSet::new());
    for run in 0..RUNS {
        let case = ShapeCase::ALL[run % ShapeCase::ALL.len()];
        let sts = admissible(case.kernel(), case.side());
        let st = sts[rng.gen_range(0..sts.len())];
        strategies.insert(st);
        let (m, n, k) = (rng.gen_range(1..=200), rng.gen_range(1..=200), rng.gen_range(1..=200));
        let ins = Arc::new(Instrumentation::new(true));
        let machine = MachineModel::default();
        let params = if run % 2 == 0 { machine.blocking_params() } else { small_params() };
        let eng = Engine::new(machine, params).with_instrumentation(ins.clone());
        let seed = run as u64;
        let res = match case.kernel() {
            Kernel::Gemm => {
                let mut c = DenseMatrix::zeros(m, n);
                eng.gemm(c.as_mut(), DenseMatrix::random(m, k, seed).as_ref(), DenseMatrix::random(k, n, seed).as_ref(), st)
            }
            Kernel::Symm => {
                let (rows, cols) = (m, n);
                let order = if case.side() == asymblis::Side::Left { rows } else { cols };
                let mut c = DenseMatrix::zeros(rows, cols);
                let a = DenseMatrix::random(order, order, seed);
                eng.symm(c.as_mut(), a.as_ref(), DenseMatrix::random(rows, cols, seed).as_ref(), case.side(), st)
            }
            Kernel::Trmm | Kernel::Trsm => {
                let order = if case.side() == asymblis::Side::Left { m } else { n };
                let a = asymblis::matrix::make_unit_dominant_upper(order, seed);
                let mut b = DenseMatrix::random(m, n, seed);
                if case.kernel() == Kernel::Trmm {
                    eng.trmm(b.as_mut(), a.as_ref(), case.side(), Diag::NonUnit, st)
                } else {
                    eng.trsm(b.as_mut(), a.as_ref(), case.side(), Diag::NonUnit, st)
                }
            }
            Kernel::Syrk => {
                let mut c = DenseMatrix::zeros(n, n);
                eng.syrk(c.as_mut(), DenseMatrix::random(k, n, seed).as_ref(), st)
            }
            Kernel::Syr2k => {
                let mut c = DenseMatrix::zeros(n, n);
                let (a, b) = (DenseMatrix::random(k, n, seed), DenseMatrix::random(k, n, seed + 1));
                eng.syr2k(c.as_mut(), a.as_ref(), b.as_ref(), st)
            }
        };
        if let Err(e) = res {
            return outcome(false, format!("run {run} {case} {st}: {e}"));
        }
        collisions += ins.collisions();
        if ins.writers() > 1 {
            multi += 1;
        }
    }
    outcome(
        collisions == 0 && multi > 0 && strategies.len() == Strategy::ALL.len(),
        format!(
            "{RUNS} runs, {} strategies, {multi} with >1 writer, {collisions} collisions",
            strategies.len()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("oracle equivalence", oracle_suite),
        ("flop fractions", table2),
        ("factorization residuals", residuals),
        ("scheduling separation", separation),
        ("stride trade-off", stride_tradeoff),
        ("partition determinism", partitions),
        ("disjoint writes", disjoint_writes),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        failed += usize::from(!o.ok);
        println!("criterion {} [{name}]: {} — {}", i + 1, if o.ok { "PASS" } else { "FAIL" }, o.detail);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
