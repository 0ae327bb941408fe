use std::io::Write;
use std::process::{Command, Output};

use proptest::prelude::*;
use tempfile::NamedTempFile;

use asymblis::engine::ShapeCase;
use asymblis::{MachineModel, Strategy};
use asymblis_bench::run::{capped_sizes, default_sizes, run_bench, BenchSpec, HEADER};
use asymblis_bench::timing::median;
use asymblis_bench::{fractions, CliError, FlopModel, Workload};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_asymblis")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn file(text: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

const SIM_MACHINE: &str = "mode=sim\nclass big count=4 speed=6 mc=152 mc_small=116\nclass little count=4 speed=1 mc=32 mc_small=24\n";

#[test]
fn verify_potrf_passes() {
    let o = cli(&["verify", "--filter", "potrf"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("PASS potrf residual"));
}

#[test]
fn verify_with_corrupted_kernel_fails() {
    let o = cli(&["verify", "--filter", "gemm", "--corrupt-kernel"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).lines().any(|l| l.starts_with("FAIL gemm/")));
}

#[test]
fn verify_unknown_filter_is_usage_error() {
    assert_eq!(cli(&["verify", "--filter", "gemv"]).status.code(), Some(2));
}

#[test]
fn missing_subcommand_is_usage_error() {
    assert_eq!(cli(&[]).status.code(), Some(2));
    assert_eq!(cli(&["bench", "--kernel", "gemm"]).status.code(), Some(2));
}

#[test]
fn inadmissible_combination_names_alternatives() {
    let m = file(SIM_MACHINE);
    let path = m.path().to_str().unwrap();
    let o = cli(&["bench", "--kernel", "trsm", "--shape", "trsp", "--strategy", "S3", "--machine", path]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("S1S4"), "{err}");

    let o = cli(&["bench", "--kernel", "trsm", "--shape", "trsp", "--strategy", "D3S4", "--machine", path]);
    assert_eq!(o.status.code(), Some(2));
    let o = cli(&["bench", "--kernel", "gemm", "--shape", "trps", "--machine", path]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn real_gemm_rows_follow_flop_formula() {
    let m = file("class big count=1 speed=1 mc=32\n");
    let o = cli(&[
        "bench", "--kernel", "gemm", "--shape", "square", "--strategy", "D3S4", "--machine",
        m.path().to_str().unwrap(), "--sizes", "100,300", "--reps", "1",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], HEADER);
    assert_eq!(lines.len(), 3);
    for (line, n) in lines[1..].iter().zip([100.0f64, 300.0]) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f.len(), 10);
        let (secs, gflops): (f64, f64) = (f[5].parse().unwrap(), f[6].parse().unwrap());
        let want = 2.0 * n * n * n / secs * 1e-9;
        assert!((gflops - want).abs() <= 1e-3 * want + 1e-3, "{line}");
        assert_eq!((f[7], f[8], f[9]), ("", "", ""));
    }
}

#[test]
fn simulated_syrk_separates_d3s4_from_obs4() {
    let m = file(SIM_MACHINE);
    let o = cli(&[
        "bench", "--kernel", "syrk", "--machine", m.path().to_str().unwrap(), "--sizes", "2000", "--strategy", "D3S4,ObS4",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    let secs: Vec<f64> = out.lines().skip(1).map(|l| l.split(',').nth(5).unwrap().parse().unwrap()).collect();
    assert!(secs[0] <= secs[1] / 3.0, "{out}");
    assert!(out.lines().skip(1).all(|l| l.contains("simulated idle=")));
}

#[test]
fn simulated_mode_rejects_routines() {
    let m = file(SIM_MACHINE);
    let o = cli(&["bench", "--kernel", "potrf", "--machine", m.path().to_str().unwrap(), "--sizes", "100"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unreadable_or_bad_machine_file() {
    assert_eq!(cli(&["bench", "--kernel", "gemm", "--machine", "/nonexistent/machine"]).status.code(), Some(2));
    let bad = file("class big count=4\n");
    assert_eq!(cli(&["bench", "--kernel", "gemm", "--machine", bad.path().to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn fractions_match_reference_points() {
    let o = cli(&["fractions", "--nb", "256", "--sizes", "100,300,1000,6000"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some(fractions::HEADER));
    for (line, want) in lines.zip([0.0, 5.50, 64.97, 93.69]) {
        let f: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!((f[1] - want).abs() <= 0.15 && (f[2] - want).abs() <= 0.15, "{line}");
    }
    assert_eq!(cli(&["fractions", "--nb", "0"]).status.code(), Some(2));
}

#[test]
fn ideal_peak_from_files() {
    let m = file(SIM_MACHINE);
    let r = file("big 3.0 # A15\nlittle 0.5\n");
    let o = cli(&["ideal", "--machine", m.path().to_str().unwrap(), "--rates", r.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "ideal_gflops\n14.0000\n");

    let partial = file("big 3.0\n");
    let o = cli(&["ideal", "--machine", m.path().to_str().unwrap(), "--rates", partial.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("little"));
}

#[test]
fn normalized_column_with_rates() {
    let spec = BenchSpec {
        workload: Workload::Kernel(ShapeCase::GEPM),
        strategies: vec![Strategy::D3S4, Strategy::ObS4],
        sizes: vec![2000],
        panel: 256,
        reps: 1,
        machine: MachineModel::default().simulated(),
        rates: Some(vec![("big".into(), 3.0), ("little".into(), 0.5)]),
        seed: 1,
    };
    let mut buf = Vec::new();
    let rows = run_bench(&spec, &mut buf).unwrap();
    assert_eq!(rows.len(), 2);
    // m = 256 < threshold: small strides; ObS4 gated by 32 rows on a slow core
    let obs4 = &rows[1];
    assert!((obs4.normalized_percent().unwrap() - 100.0 / 3.5).abs() < 1e-9);
    assert!(rows[0].gflops > obs4.gflops);
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn spec_validation() {
    let base = BenchSpec {
        workload: Workload::Kernel(ShapeCase::SQUARE),
        strategies: vec![Strategy::D3S4],
        sizes: vec![100, 300],
        panel: 256,
        reps: 1,
        machine: MachineModel::default().simulated(),
        rates: None,
        seed: 1,
    };
    assert!(base.validate().is_ok());
    for bad in [vec![], vec![0], vec![300, 100], vec![100, 100]] {
        let s = BenchSpec { sizes: bad, ..base.clone() };
        assert!(matches!(s.validate(), Err(CliError::Usage(_))));
    }
    let s = BenchSpec { reps: 0, ..base.clone() };
    assert!(s.validate().is_err());
    let s = BenchSpec { strategies: vec![Strategy::S3], ..base };
    assert!(s.validate().is_err());
}

#[test]
fn size_grid_defaults() {
    let r = default_sizes();
    assert_eq!(r.len(), 14);
    assert_eq!((r[0], r[3], r[13]), (100, 1000, 6000));
    assert_eq!(*capped_sizes(None, false, false).last().unwrap(), 2000);
    assert_eq!(*capped_sizes(None, true, false).last().unwrap(), 500);
    assert_eq!(capped_sizes(None, false, true), r);
    assert_eq!(capped_sizes(Some(vec![7]), true, false), vec![7]);
}

#[test]
fn workload_resolution() {
    assert_eq!(Workload::resolve("gemm", None).unwrap(), Workload::Kernel(ShapeCase::SQUARE));
    assert_eq!(Workload::resolve("trsm", Some("trps")).unwrap(), Workload::Kernel(ShapeCase::TRPS));
    assert!(Workload::resolve("potrf", Some("gepp")).is_err());
    assert!(Workload::resolve("gemv", None).is_err());
    let w = Workload::resolve("sytrd", None).unwrap();
    assert_eq!(FlopModel::workload(w, 3, 3, 3), 36.0);
}

proptest! {
    #[test]
    fn median_matches_sorting(v in prop::collection::vec(-1e6f64..1e6, 1..60)) {
        let mut s = v.clone();
        s.sort_by(f64::total_cmp);
        let n = s.len();
        let want = if n % 2 == 1 { s[n / 2] } else { (s[n / 2 - 1] + s[n / 2]) / 2.0 };
        prop_assert_eq!(median(&v), Some(want));
    }
}
