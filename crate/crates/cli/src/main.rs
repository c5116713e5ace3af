use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use vr3c::baselines::{run_with, Scheme};
use vr3c::harness::{run_sweep, sample_instance, trace_csv, SimDefaults, SweepSpec};
use vr3c::matrix::{build_matrix, save_matrix, MatrixSource};
use vr3c::solver::{convergence_trace, SolverOptions};
use vr3c::{Instance, SolveResult};

#[derive(Parser)]
#[command(name = "vr3c", version, about = "Fair caching, computing and bandwidth allocation for edge VR")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance with a scheme and write the result as JSON.
    Solve {
        #[command(flatten)]
        source: InstanceSource,
        /// greedy-edge, greedy-local, joint-no-cache, proposed, cache-uniform,
        /// cache-zipf[:GAMMA], cache-random[:SEED] or cache-interest.
        #[arg(long, default_value = "proposed")]
        scheme: Scheme,
        /// Cap on outer iterations of the joint solver.
        #[arg(long, default_value_t = SolverOptions::default().max_iterations)]
        max_iterations: usize,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a parameter sweep and write results.csv and summary.csv.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads; all cores when omitted.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Write the per-iteration cost change of the joint solver as CSV.
    Trace {
        #[arg(long, conflicts_with = "sample")]
        instance: Option<PathBuf>,
        /// Number of sampled default instances, seeded from --seed upward.
        #[arg(long, required_unless_present = "instance")]
        sample: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a request-probability matrix and save it as CSV.
    GenMatrix {
        #[arg(long, value_enum)]
        kind: MatrixKind,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Raw score CSV for --kind file.
        #[arg(long, required_if_eq("kind", "file"))]
        input: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check an instance file against every model constraint.
    Validate {
        #[arg(long)]
        instance: PathBuf,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct InstanceSource {
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Draw a default instance from this seed instead of reading a file.
    #[arg(long)]
    sample: Option<u64>,
}

impl InstanceSource {
    fn load(&self) -> Result<Instance> {
        let instance = match (&self.instance, self.sample) {
            (Some(path), _) => Instance::load(path)?,
            (None, Some(seed)) => sample_instance(&SimDefaults::default(), seed),
            (None, None) => unreachable!("clap requires one source"),
        };
        instance.ensure_valid()?;
        Ok(instance)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MatrixKind {
    Uniform,
    Zipf,
    Random,
    File,
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    scheme: String,
    #[serde(flatten)]
    result: &'a SolveResult,
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => Ok(std::io::stdout().write_all(text.as_bytes())?),
    }
}

fn execute(command: Command) -> Result<ExitCode> {
    match command {
        Command::Solve { source, scheme, max_iterations, out } => {
            let instance = source.load()?;
            let opts = SolverOptions { max_iterations, ..SolverOptions::default() };
            let result = run_with(scheme, &instance, &opts)?;
            let output = SolveOutput { scheme: scheme.to_string(), result: &result };
            let mut text = serde_json::to_string_pretty(&output)?;
            text.push('\n');
            write_output(out.as_deref(), &text)?;
            if result.converged {
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("warning: no convergence after {} iterations", result.iterations);
                Ok(ExitCode::from(2))
            }
        }
        Command::Sweep { config, out, jobs } => {
            let spec = SweepSpec::load(&config)?;
            let mut pool = rayon::ThreadPoolBuilder::new();
            if let Some(n) = jobs {
                if n == 0 {
                    bail!("--jobs must be at least 1");
                }
                pool = pool.num_threads(n);
            }
            let table = pool.build()?.install(|| run_sweep(&spec))?;
            fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            table.write_to(&out)?;
            if table.failed() > 0 {
                eprintln!("warning: {} of {} cells failed", table.failed(), table.records.len());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Trace { instance, sample, seed, out } => {
            let traces = match (instance, sample) {
                (Some(path), _) => {
                    let instance = Instance::load(&path)?;
                    instance.ensure_valid()?;
                    vec![(instance.seed.unwrap_or(0), convergence_trace(&instance)?)]
                }
                (None, Some(count)) => (seed..seed + count)
                    .map(|s| Ok((s, convergence_trace(&sample_instance(&SimDefaults::default(), s))?)))
                    .collect::<Result<_>>()?,
                (None, None) => unreachable!("clap requires one source"),
            };
            write_output(out.as_deref(), &trace_csv(&traces))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::GenMatrix { kind, gamma, rows, cols, seed, input, out } => {
            let source = match kind {
                MatrixKind::Uniform => MatrixSource::Uniform,
                MatrixKind::Zipf => MatrixSource::Zipf { gamma },
                MatrixKind::Random => MatrixSource::RandomRows { seed },
                MatrixKind::File => MatrixSource::FromFile { path: input.expect("required by clap") },
            };
            save_matrix(&build_matrix(&source, rows, cols)?, &out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { instance } => {
            let report = Instance::load(&instance)?.validate();
            if report.is_empty() {
                println!("{}: valid", instance.display());
                Ok(ExitCode::SUCCESS)
            } else {
                for v in &report.violations {
                    println!("{v}");
                }
                Ok(ExitCode::FAILURE)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
