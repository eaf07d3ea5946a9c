use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use metaea::engine::MepChromosome;
use metaea::harness::{parse_config, run_experiment, write_csv};
use metaea::micro::{count_operators, decode, evaluate, OperatorCounts};
use metaea::objectives::lookup;
use metaea::{Error, Parallelism, Result};

#[derive(Parser)]
#[command(
    name = "metaea",
    version,
    about = "Evolve evolutionary algorithms with MEP"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write fitness.csv and operators.csv.
    Evolve {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads (1 = sequential, 0 = all cores).
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Print the EA(s) encoded in a chromosome file.
    Decode {
        chromosome: PathBuf,
        /// 1-based gene position; all positions when omitted.
        #[arg(long)]
        position: Option<usize>,
    },
    /// Score a chromosome by repeated runs.
    Eval {
        chromosome: PathBuf,
        #[arg(long)]
        objective: String,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        runs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Evaluate an objective at a point.
    Bench {
        #[arg(long)]
        objective: String,
        #[arg(long)]
        dim: usize,
        /// Comma-separated coordinates.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
}

fn read_chromosome(path: &Path) -> Result<MepChromosome> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_owned(),
        source: e,
    })?;
    MepChromosome::parse(&text)
}

fn counts_line(c: &OperatorCounts) -> String {
    format!(
        "initializations={} selections={} crossovers={} mutations={} total={}",
        c.initializations,
        c.selections,
        c.crossovers,
        c.mutations,
        c.total()
    )
}

/// Run `f` with the requested parallelism; `threads > 1` gets a dedicated pool.
fn with_threads<T: Send>(
    threads: usize,
    f: impl FnOnce(Parallelism) -> Result<T> + Send,
) -> Result<T> {
    match threads {
        0 => f(Parallelism::Parallel),
        1 => f(Parallelism::Sequential),
        n => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(|| f(Parallelism::Parallel)),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Evolve {
            config,
            out,
            threads,
        } => {
            let config = parse_config(&config)?;
            eprintln!(
                "{} macro run(s): {} chromosome evaluations, up to {} objective evaluations",
                config.macro_runs,
                config.chromosome_evaluations(),
                config.objective_evaluations_bound()
            );
            let result = with_threads(threads, |par| run_experiment(&config, par))?;
            for path in write_csv(&result, &out)? {
                println!("wrote {}", path.display());
            }
            let last = result.mean_fitness.len() - 1;
            println!(
                "generation 0 mean best fitness {:.6}; generation {last} mean best fitness {:.6}; best run {}",
                result.mean_fitness[0],
                result.mean_fitness[last],
                result.best_run + 1
            );
        }
        Command::Decode {
            chromosome,
            position,
        } => {
            let c = read_chromosome(&chromosome)?;
            let positions: Vec<usize> = match position {
                Some(p) if p == 0 || p > c.len() => {
                    return Err(Error::Config(format!(
                        "position {p} is outside 1..={}",
                        c.len()
                    )))
                }
                Some(p) => vec![p - 1],
                None => (0..c.len()).collect(),
            };
            for (i, p) in positions.into_iter().enumerate() {
                if i > 0 {
                    println!();
                }
                let program = decode(&c, p);
                println!("# EA {}", p + 1);
                print!("{program}");
                println!("# {}", counts_line(&count_operators(&program)));
            }
        }
        Command::Eval {
            chromosome,
            objective,
            dim,
            runs,
            seed,
            threads,
        } => {
            if runs == 0 {
                return Err(Error::Config("--runs must be at least 1".into()));
            }
            let c = read_chromosome(&chromosome)?;
            let objective = lookup(&objective, dim)?;
            let report = with_threads(threads, |par| evaluate(&c, &objective, runs, seed, par))?;
            println!("fitness {}", report.fitness);
            println!("best_gene {}", report.best_gene + 1);
            println!("runs {}", report.runs);
            println!("gene,mean");
            for (g, m) in report.per_gene_mean.iter().enumerate() {
                println!("{},{m}", g + 1);
            }
        }
        Command::Bench {
            objective,
            dim,
            point,
        } => {
            let objective = lookup(&objective, dim)?;
            let x = point
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Config(format!("bad coordinate '{t}'")))
                })
                .collect::<Result<Vec<_>>>()?;
            println!("{}", objective.evaluate(&x)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
