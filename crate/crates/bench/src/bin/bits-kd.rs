use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bits_bench::commands::{self, BenchParams, Dataset, Outcome, DEFAULT_RADIX};
use bits_bench::files::{self, parse_points, parse_queries};
use bits_bench::workload::{DatasetSpec, Distribution};
use bits_bench::BenchError;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "bits-kd",
    version,
    about = "BITS kd-tree workloads, verification and benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a points file, and optionally a queries file.
    Generate {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "uniform")]
        dist: Distribution,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Coordinates lie in [0, bound).
        #[arg(long, default_value_t = 65536)]
        bound: u64,
        /// Points file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write this many windows to --queries.
        #[arg(long, default_value_t = 0)]
        windows: usize,
        #[arg(long, requires = "windows")]
        queries: Option<PathBuf>,
        #[arg(long, default_value_t = 0.01)]
        selectivity: f64,
    },
    /// Check the index against the baselines on a points and queries file.
    Verify {
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        queries: PathBuf,
        #[arg(long, default_value_t = DEFAULT_RADIX)]
        radix: u32,
        #[arg(long)]
        width: Option<u32>,
        /// Report file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Measure build, insert, query and delete costs.
    Bench {
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Dataset sizes, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "1000,10000,100000")]
        n: Vec<usize>,
        #[arg(long, default_value = "uniform")]
        dist: Distribution,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 65536)]
        bound: u64,
        #[arg(long, default_value_t = DEFAULT_RADIX)]
        radix: u32,
        #[arg(long)]
        width: Option<u32>,
        /// Use this points file instead of generating data.
        #[arg(long)]
        points: Option<PathBuf>,
        /// Windows to run against --points; generated when absent.
        #[arg(long, requires = "points")]
        queries: Option<PathBuf>,
        /// Generated windows per dataset.
        #[arg(long, default_value_t = 100)]
        query_count: usize,
        #[arg(long, default_value_t = 0.001)]
        selectivity: f64,
        #[arg(long, default_value_t = 0.1)]
        delete_fraction: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn create(path: &Path) -> Result<BufWriter<File>, BenchError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| BenchError::Io {
            path: path.display().to_string(),
            source,
        })
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, BenchError> {
    Ok(match path {
        Some(p) => Box::new(create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn io_err(path: Option<&Path>) -> impl FnOnce(io::Error) -> BenchError + '_ {
    move |source| BenchError::Io {
        path: path.map_or("<stdout>".into(), |p| p.display().to_string()),
        source,
    }
}

fn finish(outcome: Outcome, out: Option<&Path>) -> Result<ExitCode, BenchError> {
    let mut w = output(out)?;
    outcome.report.write_csv(&mut w).map_err(io_err(out))?;
    w.flush().map_err(io_err(out))?;
    if outcome.passed() {
        return Ok(ExitCode::SUCCESS);
    }
    eprintln!(
        "bits-kd: {} mismatches, {} invariant violations",
        outcome.mismatches,
        outcome.violations.len()
    );
    for v in &outcome.violations {
        eprintln!("  {v}");
    }
    Ok(ExitCode::from(1))
}

fn run(cli: Cli) -> Result<ExitCode, BenchError> {
    match cli.command {
        Command::Generate {
            k,
            n,
            dist,
            seed,
            bound,
            out,
            windows,
            queries,
            selectivity,
        } => {
            let spec = DatasetSpec {
                n,
                k,
                dist,
                seed,
                bound,
            };
            let generated = commands::generate(&spec, windows, selectivity)?;
            let mut w = output(out.as_deref())?;
            files::write_points(&mut w, k, bound, &generated.points)
                .and_then(|_| w.flush())
                .map_err(io_err(out.as_deref()))?;
            if let Some(q) = queries {
                let mut w = create(&q)?;
                files::write_queries(&mut w, &generated.windows)
                    .and_then(|_| w.flush())
                    .map_err(io_err(Some(&q)))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            points,
            queries,
            radix,
            width,
            out,
        } => {
            let p = parse_points(
                &files::read_to_string(&points)?,
                &points.display().to_string(),
            )?;
            let q = parse_queries(
                &files::read_to_string(&queries)?,
                &queries.display().to_string(),
                p.k,
            )?;
            finish(commands::verify(&p, &q, radix, width)?, out.as_deref())
        }
        Command::Bench {
            k,
            n,
            dist,
            seed,
            bound,
            radix,
            width,
            points,
            queries,
            query_count,
            selectivity,
            delete_fraction,
            out,
        } => {
            let params = BenchParams {
                k,
                sizes: n,
                dist,
                seed,
                bound,
                radix,
                width,
                queries: query_count,
                selectivity,
                delete_fraction,
            };
            let outcome = match points {
                None => commands::bench(Dataset::Generated(&params))?,
                Some(path) => {
                    let p =
                        parse_points(&files::read_to_string(&path)?, &path.display().to_string())?;
                    let q = match &queries {
                        Some(qp) => Some(parse_queries(
                            &files::read_to_string(qp)?,
                            &qp.display().to_string(),
                            p.k,
                        )?),
                        None => None,
                    };
                    commands::bench(Dataset::File {
                        points: &p,
                        queries: q.as_deref(),
                        params: &params,
                    })?
                }
            };
            finish(outcome, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("bits-kd: {e}");
            ExitCode::from(2)
        }
    }
}
