//! The `bench` command: one CSV row per (size, strategy).

use std::io::Write;
use std::time::Instant;

use asymblis::engine::{Engine, Kernel};
use asymblis::lapack::{getrf, potrf, sytrd, FactorStrategies, LapackConfig};
use asymblis::matrix::{make_spd, make_symmetric, make_unit_dominant_upper};
use asymblis::sched::{ideal_peak, simulate};
use asymblis::{DenseMatrix, Diag, MachineMode, MachineModel, Side, Strategy};

use crate::error::CliError;
use crate::flops::FlopModel;
use crate::timing::median_seconds;
use crate::workload::{Routine, Workload};

pub const HEADER: &str = "size,m,n,k,strategy,seconds_median,gflops,ideal_gflops,normalized_percent,note";

/// The size grid R = {100, 300, 500, 1000, 1500, …, 6000}.
pub fn default_sizes() -> Vec<usize> {
    let mut v = vec![100, 300, 500];
    v.extend((1000..=6000).step_by(500));
    v
}

pub const BENCH_CAP: usize = 2000;
pub const DESK_CAP: usize = 600;
pub const DEFAULT_PANEL: usize = 256;
pub const DESK_PANEL: usize = 64;

#[derive(Clone, Debug)]
pub struct BenchSpec {
    pub workload: Workload,
    pub strategies: Vec<Strategy>,
    pub sizes: Vec<usize>,
    pub panel: usize,
    pub reps: usize,
    pub machine: MachineModel,
    /// Serial GFLOPS per core class, for the ideal column.
    pub rates: Option<Vec<(String, f64)>>,
    pub seed: u64,
}

impl BenchSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.sizes.is_empty() || self.sizes[0] == 0 || self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::Usage(format!("sizes must be positive and strictly ascending, got {:?}", self.sizes)));
        }
        if self.reps == 0 {
            return Err(CliError::Usage("--reps must be at least 1".into()));
        }
        if self.panel == 0 {
            return Err(CliError::Usage("--panel must be positive".into()));
        }
        let sim = self.machine.mode == MachineMode::Simulated;
        for &s in &self.strategies {
            // the simulator never runs the kernel, so the oblivious baseline
            // is comparable for every Loop-3 kernel
            let baseline = sim && s == Strategy::ObS4 && matches!(self.workload, Workload::Kernel(c) if c.kernel() != Kernel::Trsm);
            if !baseline {
                self.workload.check(s)?;
            }
        }
        self.machine.validate()?;
        if self.machine.mode == MachineMode::Simulated && matches!(self.workload, Workload::Routine(_)) {
            return Err(CliError::Usage(format!("{} cannot be simulated; use a real machine file", self.workload)));
        }
        Ok(())
    }
}

/// Grid sizes after the desk / full caps.
pub fn capped_sizes(sizes: Option<Vec<usize>>, desk: bool, full: bool) -> Vec<usize> {
    let cap = if desk {
        DESK_CAP
    } else if full {
        usize::MAX
    } else {
        BENCH_CAP
    };
    match sizes {
        Some(s) => s,
        None => default_sizes().into_iter().filter(|&s| s <= cap).collect(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub size: usize,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub strategy: Strategy,
    pub seconds: f64,
    pub gflops: f64,
    pub ideal_gflops: Option<f64>,
    pub note: String,
}

impl Row {
    pub fn normalized_percent(&self) -> Option<f64> {
        self.ideal_gflops.map(|i| 100.0 * self.gflops / i)
    }

    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>, p: usize| v.map(|x| format!("{x:.p$}")).unwrap_or_default();
        format!(
            "{},{},{},{},{},{:.9},{:.4},{},{},{}",
            self.size,
            self.m,
            self.n,
            self.k,
            self.strategy,
            self.seconds,
            self.gflops,
            opt(self.ideal_gflops, 4),
            opt(self.normalized_percent(), 2),
            self.note
        )
    }
}

/// Runs the grid, streaming rows to `out` as they complete.
pub fn run_bench(spec: &BenchSpec, out: &mut impl Write) -> Result<Vec<Row>, CliError> {
    spec.validate()?;
    let ideal = match &spec.rates {
        Some(r) => Some(ideal_peak(&spec.machine, r)?),
        None => None,
    };
    let io = |e: std::io::Error| CliError::Usage(format!("cannot write output: {e}"));
    writeln!(out, "{HEADER}").map_err(io)?;
    let mut rows = Vec::new();
    for &size in &spec.sizes {
        let (m, n, k) = spec.workload.dims(size, spec.panel);
        let flops = FlopModel::workload(spec.workload, m, n, k);
        for &st in &spec.strategies {
            let (seconds, note) = match spec.machine.mode {
                MachineMode::Simulated => simulated(spec, ideal, m, n, k, flops, st)?,
                MachineMode::Real => (measured(spec, m, n, k, st)?, String::new()),
            };
            let gflops = if seconds > 0.0 { flops / seconds * 1e-9 } else { 0.0 };
            let row = Row {
                size,
                m,
                n,
                k,
                strategy: st,
                seconds,
                gflops,
                ideal_gflops: ideal,
                note,
            };
            writeln!(out, "{}", row.to_csv()).map_err(io)?;
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Loop-3 iteration count the strategies partition.
pub fn sim_units(w: Workload, m: usize, n: usize) -> usize {
    match w {
        Workload::Kernel(c) if c.kernel() == Kernel::Trsm && c.side() == Side::Left => n,
        Workload::Kernel(c) if matches!(c.kernel(), Kernel::Syrk | Kernel::Syr2k) => n,
        _ => m,
    }
}

fn simulated(
    spec: &BenchSpec,
    ideal: Option<f64>,
    m: usize,
    n: usize,
    _k: usize,
    flops: f64,
    st: Strategy,
) -> Result<(f64, String), CliError> {
    let units = sim_units(spec.workload, m, n);
    let params = spec.machine.blocking_params();
    let machine = if units <= params.small_m_threshold {
        let small: Vec<usize> = spec.machine.classes.iter().map(|c| c.small_m_mc_stride).collect();
        spec.machine.clone().with_strides(&small)
    } else {
        spec.machine.clone()
    };
    // GFLOPS of a speed-1 core: measured when rates are given, else 1.
    let unit_rate = ideal.map_or(1.0, |i| i / machine.aggregate_speed());
    let cost = flops / units.max(1) as f64 / (unit_rate * 1e9);
    let r = simulate(units, &machine, st, cost)?;
    Ok((r.makespan, format!("simulated idle={:.4}", r.idle_fraction)))
}

fn measured(spec: &BenchSpec, m: usize, n: usize, k: usize, st: Strategy) -> Result<f64, CliError> {
    let eng = Engine::new(spec.machine.clone(), spec.machine.blocking_params());
    let seed = spec.seed;
    let reps = spec.reps;
    let time = |f: &mut dyn FnMut() -> asymblis::Result<()>| {
        let t = Instant::now();
        f().map(|_| t.elapsed())
    };
    let secs = match spec.workload {
        Workload::Kernel(case) => {
            let side = case.side();
            match case.kernel() {
                Kernel::Gemm => {
                    let (a, b, c0) = (DenseMatrix::random(m, k, seed), DenseMatrix::random(k, n, seed + 1), DenseMatrix::zeros(m, n));
                    median_seconds(reps, || {
                        let mut c = c0.clone();
                        time(&mut || eng.gemm(c.as_mut(), a.as_ref(), b.as_ref(), st))
                    })?
                }
                Kernel::Symm => {
                    let (a, b, c0) = (make_symmetric(k, seed), DenseMatrix::random(m, n, seed + 1), DenseMatrix::zeros(m, n));
                    median_seconds(reps, || {
                        let mut c = c0.clone();
                        time(&mut || eng.symm(c.as_mut(), a.as_ref(), b.as_ref(), side, st))
                    })?
                }
                Kernel::Trmm | Kernel::Trsm => {
                    let (a, b0) = (make_unit_dominant_upper(k, seed), DenseMatrix::random(m, n, seed + 1));
                    let trsm = case.kernel() == Kernel::Trsm;
                    median_seconds(reps, || {
                        let mut b = b0.clone();
                        time(&mut || {
                            if trsm {
                                eng.trsm(b.as_mut(), a.as_ref(), side, Diag::NonUnit, st)
                            } else {
                                eng.trmm(b.as_mut(), a.as_ref(), side, Diag::NonUnit, st)
                            }
                        })
                    })?
                }
                Kernel::Syrk | Kernel::Syr2k => {
                    let (a, b, c0) = (DenseMatrix::random(k, n, seed), DenseMatrix::random(k, n, seed + 1), DenseMatrix::zeros(n, n));
                    let two = case.kernel() == Kernel::Syr2k;
                    median_seconds(reps, || {
                        let mut c = c0.clone();
                        time(&mut || {
                            if two {
                                eng.syr2k(c.as_mut(), a.as_ref(), b.as_ref(), st)
                            } else {
                                eng.syrk(c.as_mut(), a.as_ref(), st)
                            }
                        })
                    })?
                }
            }
        }
        Workload::Routine(r) => {
            let cfg = LapackConfig::default();
            let fs = FactorStrategies { update: st, ..FactorStrategies::default() };
            let a0 = match r {
                Routine::Potrf => make_spd(n, seed)?,
                Routine::Getrf => DenseMatrix::random(n, n, seed),
                Routine::Sytrd => make_symmetric(n, seed),
            };
            median_seconds(reps, || {
                let mut a = a0.clone();
                time(&mut || match r {
                    Routine::Potrf => potrf(a.as_mut(), &cfg, &eng, &fs),
                    Routine::Getrf => getrf(a.as_mut(), &cfg, &eng, &fs).map(drop),
                    Routine::Sytrd => sytrd(a.as_mut(), &cfg, &eng, &fs).map(drop),
                })
            })?
        }
    };
    Ok(secs)
}
