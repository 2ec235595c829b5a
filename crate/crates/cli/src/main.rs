//! `fathit`: run instances through the online algorithm, play the lower-bound
//! game, generate instances and run the verification suites.
//!
//! Exit status is 0 when everything ran and held, 1 when a checked property
//! failed, and 2 on bad input.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use fathit_core::adversary::GameSummary;
use fathit_core::harness::{
    gen_random, run_adversary_sweep, run_online, verify, AnyInstance, GenParams, HarnessError, InstanceFile,
    OpponentKind, Report, Suite, VerifyParams,
};
use fathit_core::oracle::DEFAULT_BUDGET;
use fathit_core::{Fatness, Scalar, ShapeKind, Surd};

#[derive(Parser)]
#[command(name = "fathit", version, about = "Online hitting set of fat objects on the integer grid")]
struct Cli {
    /// Worker threads for sweeps and suites.
    #[arg(long, global = true, env = "FATHIT_WORKERS")]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Feed an instance file to the online algorithm and compare with the optimum.
    Run {
        file: PathBuf,
        #[arg(long)]
        transcript: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Node limit for the exact solver.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Play the lower-bound game; repeat --N for a sweep.
    Adversary {
        #[arg(long)]
        d: usize,
        #[arg(long = "N", required = true)]
        n: Vec<i64>,
        #[arg(long, default_value = "cube")]
        shape: ShapeKind,
        #[arg(long, default_value = "engine")]
        opponent: OpponentKind,
        /// Seed of the baseline opponent.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        transcript: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Generate a seeded random instance.
    Gen {
        #[arg(long)]
        d: usize,
        #[arg(long = "N")]
        n: i64,
        /// e.g. 1, 3/2 or sqrt(2).
        #[arg(long, default_value = "1")]
        alpha: String,
        /// Comma-separated shape kinds.
        #[arg(long, value_delimiter = ',', default_value = "cube")]
        shapes: Vec<ShapeKind>,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        max_width: Option<i64>,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run verification suites.
    Verify {
        #[arg(long, default_value = "all")]
        suite: Suite,
        /// key=value pairs, e.g. "d=2,N=64:256,alpha=1:sqrt(2),count=100,seed=7".
        #[arg(long, default_value = "")]
        params: String,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

/// A failure with its exit status.
struct Failure {
    code: u8,
    err: anyhow::Error,
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        Failure {
            code: e.exit_code() as u8,
            err: e.into(),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(err: anyhow::Error) -> Self {
        Failure { code: 2, err }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure { code: 2, err: e.into() }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
    ))
}

fn emit_reports(out: &mut impl Write, format: Format, reports: &[Report]) -> io::Result<()> {
    match format {
        Format::Json => {
            for r in reports {
                writeln!(out, "{}", serde_json::to_string(r).expect("report serializes"))?;
            }
        }
        Format::Csv => {
            writeln!(out, "{}", Report::CSV_HEADER)?;
            for r in reports {
                writeln!(out, "{}", r.csv_row())?;
            }
        }
    }
    Ok(())
}

fn run_file<T: Scalar>(
    inst: &InstanceFile<T>,
    transcript: Option<&Path>,
    budget: u64,
) -> Result<Report, Failure> {
    let run = run_online(inst, budget)?;
    let mut report = run.report;
    if let Some(path) = transcript {
        let mut w = create(path)?;
        run.engine.write_transcript(&mut w).map_err(HarnessError::from)?;
        w.flush()?;
        report.transcript = Some(path.display().to_string());
    }
    Ok(report)
}

fn write_trace(w: &mut impl Write, summary: &GameSummary<Surd>) -> Result<(), Failure> {
    summary.write_trace(w).map_err(|e| HarnessError::from(e).into())
}

fn execute(cli: Cli) -> Result<bool, Failure> {
    let mut stdout = io::stdout().lock();
    match cli.command {
        Command::Run {
            file,
            transcript,
            format,
            budget,
        } => {
            let text = std::fs::read_to_string(&file).with_context(|| format!("cannot read {}", file.display()))?;
            let report = match AnyInstance::parse(&text)? {
                AnyInstance::Rational(i) => run_file(&i, transcript.as_deref(), budget)?,
                AnyInstance::Surd(i) => run_file(&i, transcript.as_deref(), budget)?,
            };
            emit_reports(&mut stdout, format, std::slice::from_ref(&report))?;
            Ok(report.within_bound != Some(false))
        }
        Command::Adversary {
            d,
            n,
            shape,
            opponent,
            seed,
            transcript,
            format,
            budget,
        } => {
            let params = fathit_core::harness::AdversaryParams {
                d,
                n: n[0],
                shape,
                opponent,
                seed,
                budget,
            };
            let runs = run_adversary_sweep(&params, &n)
                .into_iter()
                .collect::<Result<Vec<_>, _>>()?;
            if let Some(path) = &transcript {
                let mut w = create(path)?;
                for run in &runs {
                    write_trace(&mut w, &run.summary)?;
                }
                w.flush()?;
            }
            let reports: Vec<Report> = runs
                .iter()
                .map(|r| Report {
                    transcript: transcript.as_ref().map(|p| p.display().to_string()),
                    ..r.report.clone()
                })
                .collect();
            emit_reports(&mut stdout, format, &reports)?;
            let held = runs.iter().all(|r| {
                r.summary.bound_met && r.opt_one && r.summary.nested && r.summary.recurrence_holds
            });
            for r in runs.iter().filter(|r| !r.summary.bound_met || !r.opt_one) {
                eprintln!(
                    "N={}: {} points against a bound of {:.3}; optimum {} (exact: {})",
                    r.report.n,
                    r.summary.total_points,
                    r.summary.bound,
                    r.opt.size(),
                    r.opt.exact
                );
            }
            Ok(held)
        }
        Command::Gen {
            d,
            n,
            alpha,
            shapes,
            count,
            seed,
            max_width,
            out,
        } => {
            let alpha = Fatness::parse_text(&alpha).map_err(HarnessError::from)?;
            let inst = gen_random(&GenParams {
                d,
                n,
                alpha,
                shapes,
                count,
                seed,
                max_width,
            })?;
            match out {
                Some(path) => {
                    let mut w = create(&path)?;
                    w.write_all(inst.to_text().as_bytes())?;
                    w.flush()?;
                }
                None => stdout.write_all(inst.to_text().as_bytes())?,
            }
            Ok(true)
        }
        Command::Verify { suite, params, format } => {
            let params = VerifyParams::parse(&params)?;
            let summary = verify(suite, &params)?;
            match format {
                Format::Json => writeln!(stdout, "{}", serde_json::to_string(&summary).expect("summary serializes"))?,
                Format::Csv => {
                    writeln!(stdout, "suite,checked,skipped,violations,passed")?;
                    for s in &summary.suites {
                        writeln!(stdout, "{},{},{},{},{}", s.suite, s.checked, s.skipped, s.violations, s.passed)?;
                    }
                }
            }
            for s in summary.suites.iter().filter(|s| !s.passed) {
                for c in &s.counterexamples {
                    eprintln!("{}: {c}", s.suite);
                }
            }
            Ok(summary.passed)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {:#}", f.err);
            ExitCode::from(f.code)
        }
    }
}
