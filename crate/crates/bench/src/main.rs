use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use asymblis::pack::KernelVariant;
use asymblis::sched::ideal_peak;
use asymblis::{MachineModel, Strategy};
use asymblis_bench::rates::parse_rates;
use asymblis_bench::run::{capped_sizes, run_bench, BenchSpec, DEFAULT_PANEL, DESK_PANEL};
use asymblis_bench::verify::filter_names;
use asymblis_bench::{fractions, run_suite, CliError, VerifyOptions, Workload};

#[derive(Parser)]
#[command(name = "asymblis", version, about = "Asymmetry-aware BLAS-3 verification and benchmarks")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every kernel / strategy / shape against the oracles.
    Verify(VerifyArgs),
    /// Time (or simulate) a kernel over a size grid; CSV on stdout.
    Bench(BenchArgs),
    /// Trailing-update share of potrf / getrf flops.
    Fractions(FractionArgs),
    /// Aggregate peak of a machine from per-class serial rates.
    Ideal(IdealArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Kernel or routine name (gemm, …, potrf, getrf, sytrd).
    #[arg(long)]
    filter: Option<String>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Negative control: perturb the micro-kernel.
    #[arg(long, hide = true)]
    corrupt_kernel: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    kernel: String,
    /// Shape case (square, gepp, gemp, gepm, symp, sypm, trmp, trpm, trsp, trps, syrk_n, syr2k_n).
    #[arg(long)]
    shape: Option<String>,
    /// Comma-separated; defaults to every admissible strategy.
    #[arg(long, value_delimiter = ',')]
    strategy: Vec<String>,
    #[arg(long)]
    machine: PathBuf,
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    #[arg(long)]
    panel: Option<usize>,
    #[arg(long, default_value_t = 3)]
    reps: usize,
    /// Panel 64 and sizes capped at 600.
    #[arg(long)]
    desk: bool,
    /// Run the full size grid up to 6000.
    #[arg(long)]
    full: bool,
    /// Simulate instead of timing, whatever the machine file says.
    #[arg(long)]
    sim: bool,
    /// Serial rates per class, for the ideal and normalized columns.
    #[arg(long)]
    rates: Option<PathBuf>,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

#[derive(Args)]
struct FractionArgs {
    #[arg(long)]
    nb: usize,
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
}

#[derive(Args)]
struct IdealArgs {
    #[arg(long)]
    machine: PathBuf,
    #[arg(long)]
    rates: PathBuf,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn load_machine(path: &Path) -> Result<MachineModel, CliError> {
    MachineModel::parse(&read(path)?).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn verify(args: VerifyArgs) -> Result<(), CliError> {
    if let Some(f) = &args.filter {
        if !filter_names().iter().any(|n| n.eq_ignore_ascii_case(f)) {
            return Err(CliError::Usage(format!("unknown filter '{f}'; use one of: {}", filter_names().join(", "))));
        }
    }
    let opts = VerifyOptions {
        filter: args.filter,
        seed: args.seed,
        variant: if args.corrupt_kernel { KernelVariant::Corrupted } else { KernelVariant::Reference },
        ..VerifyOptions::default()
    };
    let checks = run_suite(&opts, |c| println!("{c}"));
    let failed = checks.iter().filter(|c| !c.passed).count();
    eprintln!("{} checks, {failed} failed", checks.len());
    if failed > 0 {
        return Err(CliError::CheckFailed(failed));
    }
    Ok(())
}

fn bench(args: BenchArgs) -> Result<(), CliError> {
    let workload = Workload::resolve(&args.kernel, args.shape.as_deref())?;
    let strategies = if args.strategy.is_empty() {
        workload.admissible().to_vec()
    } else {
        args.strategy
            .iter()
            .map(|s| s.parse::<Strategy>().map_err(|e| CliError::Usage(e.to_string())))
            .collect::<Result<_, _>>()?
    };
    let mut machine = load_machine(&args.machine)?;
    if args.sim {
        machine = machine.simulated();
    }
    let rates = match &args.rates {
        Some(p) => Some(parse_rates(&read(p)?)?),
        None => None,
    };
    let spec = BenchSpec {
        workload,
        strategies,
        sizes: capped_sizes(args.sizes, args.desk, args.full),
        panel: args.panel.unwrap_or(if args.desk { DESK_PANEL } else { DEFAULT_PANEL }),
        reps: args.reps,
        machine,
        rates,
        seed: args.seed,
    };
    let stdout = io::stdout();
    run_bench(&spec, &mut stdout.lock())?;
    Ok(())
}

fn ideal(args: IdealArgs) -> Result<(), CliError> {
    let machine = load_machine(&args.machine)?;
    let rates = parse_rates(&read(&args.rates)?)?;
    let peak = ideal_peak(&machine, &rates).map_err(|e| CliError::Usage(e.to_string()))?;
    println!("ideal_gflops\n{peak:.4}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Command::Verify(a) => verify(a),
        Command::Bench(a) => bench(a),
        Command::Fractions(a) => {
            if a.nb == 0 {
                Err(CliError::Usage("--nb must be at least 1".into()))
            } else {
                let sizes = a.sizes.unwrap_or_else(asymblis_bench::run::default_sizes);
                fractions::write_fractions(&mut io::stdout().lock(), a.nb, &sizes)
                    .map_err(|e| CliError::Usage(format!("cannot write output: {e}")))
            }
        }
        Command::Ideal(a) => ideal(a),
    };
    let _ = io::stdout().flush();
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !matches!(e, CliError::CheckFailed(_)) {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
