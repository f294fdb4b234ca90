use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use qsp_core::bench::{
    bench_region, bench_runtime, runtime_slope, write_csv, write_jsonl, BenchRecord,
};
use qsp_core::completion::complete_with;
use qsp_core::decomposition::extract_angles_with;
use qsp_core::hamsim::{ideal_response, HamsimSpec, TruncationRule};
use qsp_core::io::{read_json, read_poly, write_json, UnitaryJson};
use qsp_core::pipeline::{decompose_unitary, run_hamsim, PipelineError, PipelineOptions};
use qsp_core::verify::{default_samples, measure, measure_fn, RunReport};
use qsp_core::{AngleSequence, Mode};

const EXIT_UNACHIEVABLE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "qsp",
    version,
    about = "Angle sequences for quantum signal processing"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Seed for root selection during completion.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Verification sample count (default 8 (d + 1)).
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Gate on the completion residual and on the unitarity of decomposition input.
    #[arg(long, global = true, default_value_t = 1e-4)]
    tol_unitarity: f64,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Table format for benchmark output.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Worker threads for the decomposition.
    #[arg(long, global = true, env = "QSP_THREADS")]
    threads: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Jsonl,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum ModeArg {
    Halving,
    Carving,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Halving => Mode::Halving,
            ModeArg::Carving => Mode::Carving,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RegionMode {
    Halving,
    Carving,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Truncation {
    TailSum,
    ClosedForm,
}

#[derive(Subcommand)]
enum Command {
    /// Complete a target F into a unitary F + G iX.
    Complete {
        /// Target polynomial JSON.
        #[arg(long)]
        input: PathBuf,
    },
    /// Decompose a completed unitary into an angle sequence.
    Decompose {
        /// Unitary JSON as written by `complete`.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Halving)]
        mode: ModeArg,
        /// Largest allowed deviation of a factor from primitive shape.
        #[arg(long, default_value_t = 1e-6)]
        primitive_tol: f64,
    },
    /// Angles for e^{i tau sin 2 theta} scaled by eta.
    Hamsim(HamsimArgs),
    /// Check an angle file against a target polynomial or the Hamiltonian-simulation response.
    Verify {
        #[arg(long)]
        angles: PathBuf,
        /// Target polynomial JSON.
        #[arg(long, conflicts_with = "tau", required_unless_present = "tau")]
        target: Option<PathBuf>,
        /// Compare with eta e^{i tau sin 2 theta} instead of a polynomial.
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long, requires = "tau")]
        eta: Option<f64>,
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
    },
    /// Benchmark grids.
    #[command(subcommand)]
    Bench(Bench),
}

#[derive(Args)]
struct HamsimArgs {
    #[arg(long)]
    tau: f64,
    #[arg(long, default_value_t = 1e-3)]
    eps: f64,
    /// Default 1 - eps.
    #[arg(long)]
    eta: Option<f64>,
    /// Capitalization coefficient; default 0.45 eps.
    #[arg(long)]
    cap: Option<f64>,
    #[arg(long, value_enum, default_value_t = ModeArg::Halving)]
    mode: ModeArg,
    #[arg(long, value_enum, default_value_t = Truncation::TailSum)]
    truncation: Truncation,
    /// Retries with seed + 1, seed + 2, ... when a stage fails.
    #[arg(long, default_value_t = 0)]
    retries: u32,
    /// Also write the run report to this file.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Bench {
    /// Halving wall time against degree, with the log-log slope on stderr.
    Runtime {
        #[arg(long, value_delimiter = ',', default_values_t = [50.0, 100.0, 200.0, 400.0])]
        taus: Vec<f64>,
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        /// Default 1 - eps.
        #[arg(long)]
        eta: Option<f64>,
    },
    /// Achievability over a (tau, eps) grid.
    Region {
        #[arg(long, value_delimiter = ',', default_values_t = [20.0, 40.0, 80.0, 160.0])]
        taus: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [1e-3])]
        epss: Vec<f64>,
        #[arg(long, value_enum, default_value_t = RegionMode::Both)]
        mode: RegionMode,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_UNACHIEVABLE),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn pipeline_options(g: &Global, mode: Mode) -> PipelineOptions {
    let mut opts = PipelineOptions {
        mode,
        samples: g.samples,
        ..Default::default()
    };
    opts.completion.residual_gate = g.tol_unitarity;
    opts.decompose.unitarity_gate = g.tol_unitarity;
    opts.decompose.parallel = g.threads != Some(1);
    opts
}

/// Returns `Ok(false)` when the run finished but missed its error target.
fn run(cli: Cli) -> Result<bool> {
    let g = &cli.global;
    if let Some(n) = g.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .context("thread pool")?;
    }
    match cli.command {
        Command::Complete { input } => {
            let f = read_poly(&input)?;
            let opts = pipeline_options(g, Mode::Halving);
            let (u, report) = complete_with(&f, g.seed, &opts.completion)?;
            emit_json(g.out.as_deref(), &UnitaryJson::new(&u, Some(report)))?;
            Ok(true)
        }
        Command::Decompose {
            input,
            mode,
            primitive_tol,
        } => {
            let u = read_json::<UnitaryJson>(&input)?.element()?;
            let opts = pipeline_options(g, mode.into());
            let dec = decompose_unitary(&u, &opts)?;
            for ill in &dec.ill_conditioned {
                eprintln!(
                    "warning: condition {:.3e} at recursion path '{}'",
                    ill.condition, ill.path
                );
            }
            let angles = extract_angles_with(&dec.factors, &u, primitive_tol)?;
            emit_json(g.out.as_deref(), &angles)?;
            Ok(true)
        }
        Command::Hamsim(args) => hamsim(g, args),
        Command::Verify {
            angles,
            target,
            tau,
            eta,
            eps,
        } => {
            let seq: AngleSequence = read_json(&angles)?;
            let samples = g.samples.unwrap_or_else(|| default_samples(seq.degree()));
            let report = match (target, tau) {
                (Some(path), _) => measure(&seq, &read_poly(&path)?, samples, eps),
                (None, Some(tau)) => {
                    let eta = eta.unwrap_or(1.0 - eps);
                    measure_fn(&seq, |theta| ideal_response(tau, eta, theta), samples, eps)
                }
                (None, None) => bail!("either --target or --tau is required"),
            };
            emit_json(g.out.as_deref(), &report)?;
            Ok(report.achievable)
        }
        Command::Bench(b) => bench(g, b),
    }
}

fn hamsim(g: &Global, args: HamsimArgs) -> Result<bool> {
    let mut spec = HamsimSpec {
        seed: g.seed,
        ..HamsimSpec::new(args.tau, args.eps)
    };
    if let Some(eta) = args.eta {
        spec.eta = eta;
    }
    if let Some(cap) = args.cap {
        spec.cap_coeff = cap;
    }
    spec.truncation = match args.truncation {
        Truncation::TailSum => TruncationRule::TailSum,
        Truncation::ClosedForm => TruncationRule::ClosedForm,
    };
    let mut opts = pipeline_options(g, args.mode.into());
    opts.retries = args.retries;
    let out = match run_hamsim(&spec, &opts) {
        Ok(out) => out,
        Err(e @ PipelineError::InvalidSpec(_)) => return Err(e.into()),
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(false);
        }
    };
    if out.seed != g.seed {
        eprintln!("note: succeeded with seed {}", out.seed);
    }
    let report: &RunReport = &out.report;
    eprintln!(
        "degree {} max_error {:.3e} unitarity {:.3e} achievable {}",
        report.degree, report.max_error, report.unitarity, report.achievable
    );
    emit_json(g.out.as_deref(), &out.angles)?;
    if let Some(path) = &args.report {
        write_json(path, report)?;
    }
    Ok(report.achievable)
}

fn bench(g: &Global, b: Bench) -> Result<bool> {
    let records: Vec<BenchRecord> = match b {
        Bench::Runtime { taus, eps, eta } => {
            let opts = pipeline_options(g, Mode::Halving);
            let recs = bench_runtime(&taus, eps, eta.unwrap_or(1.0 - eps), g.seed, &opts);
            match runtime_slope(&recs) {
                Some(s) => {
                    eprintln!("log-log slope of completion + decomposition time vs degree: {s:.3}")
                }
                None => eprintln!("log-log slope: not enough successful cells"),
            }
            recs
        }
        Bench::Region { taus, epss, mode } => {
            let modes: &[Mode] = match mode {
                RegionMode::Halving => &[Mode::Halving],
                RegionMode::Carving => &[Mode::Carving],
                RegionMode::Both => &[Mode::Halving, Mode::Carving],
            };
            modes
                .iter()
                .flat_map(|&m| bench_region(&taus, &epss, m, g.seed, &pipeline_options(g, m)))
                .collect()
        }
    };
    let mut sink = output(g.out.as_deref())?;
    match g.format {
        Format::Csv => write_csv(&records, &mut sink)?,
        Format::Jsonl => write_jsonl(&records, &mut sink)?,
    }
    sink.flush()?;
    Ok(true)
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(std::io::BufWriter::new(
            std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn emit_json<T: serde::Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    match path {
        Some(p) => write_json(p, value)?,
        None => {
            let mut out = std::io::stdout().lock();
            serde_json::to_writer_pretty(&mut out, value)?;
            writeln!(out)?;
        }
    }
    Ok(())
}
