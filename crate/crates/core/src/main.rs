use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use lcdo::diffuse::total_energy;
use lcdo::energy::frank_density_raw;
use lcdo::io::{csv, vtk, Checkpoint, RunConfig};
use lcdo::optimizer::{tangential_continuation, Mode, Progress, Solver, TraceRow};
use lcdo::{validate, Error};

#[derive(Parser)]
#[command(name = "lcdo", version, about = "Diffuse-interface liquid-crystal droplet minimizer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Energy breakdown of a checkpoint, or of the configured initial state (`init`).
    Evaluate {
        config: PathBuf,
        source: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Minimize from the configured initial state or a checkpoint.
    Minimize {
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long)]
        resume: Option<PathBuf>,
    },
    /// Warm-started anchoring-strength continuation.
    SweepLambda {
        config: PathBuf,
        /// Comma-separated, strictly increasing; defaults to `opt.lambda_ladder`.
        #[arg(long, value_delimiter = ',')]
        ladder: Option<Vec<f64>>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Oracle certification and property suites.
    Validate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

enum Failure {
    Error(Error),
    Budget,
    Suites,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self::Error(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Ericksen(_) => 3,
        Error::Checksum { .. } | Error::Format(_) => 5,
        Error::MalformedParameter(_) | Error::Argument(_) | Error::Config { .. } | Error::Io(_) => 2,
        Error::Consistency(_) | Error::Projection(_) => 1,
    }
}

fn load_config(path: &Path) -> Result<RunConfig, Error> {
    let config = RunConfig::load(path)?;
    for w in config.validate()? {
        eprintln!("warning: {w}");
    }
    Ok(config)
}

fn write(out: &Path, name: &str, text: &str) -> Result<(), Error> {
    fs::create_dir_all(out)?;
    fs::write(out.join(name), text)?;
    Ok(())
}

fn evaluate(config: &Path, source: &str, out: &Path) -> Result<(), Failure> {
    let config = load_config(config)?;
    let state = if source == "init" {
        config.initial_state()?
    } else {
        let ckpt = Checkpoint::load(Path::new(source))?;
        if ckpt.state.grid().dims != config.grid()?.dims {
            return Err(Error::Argument(format!("checkpoint grid {:?} differs from config {:?}", ckpt.state.grid().dims, config.dims)).into());
        }
        ckpt.state
    };
    let e = total_energy(&state, &config.model()?);
    println!("{e}");
    write(out, "evaluate.csv", &csv::evaluate(&e, state.volume()))?;
    Ok(())
}

fn save_final(out: &Path, config: &RunConfig, progress: Progress, state: lcdo::grid::FieldState, trace: &[TraceRow]) -> Result<(), Error> {
    write(out, "trace.csv", &csv::trace(trace))?;
    vtk::write(&out.join("final.vtk"), &state)?;
    Checkpoint { config: config.clone(), progress, state }.save(&out.join("final.ckpt"))
}

fn sweep(config: &RunConfig, ladder: &[f64], out: &Path) -> Result<(), Failure> {
    let state = config.initial_state()?;
    let (report, state) = tangential_continuation(state, config.volume, &config.model()?, &config.schedule, ladder)?;
    write(out, "sweep.csv", &csv::sweep(&report.rows))?;
    for r in &report.rows {
        println!("lambda {:>8}  e_total {:.10e}  |n·ν| {:.3e}  {} after {} iterations", r.lambda, r.energy.e_total, r.residual, r.termination.as_str(), r.iterations);
    }
    println!("monotone {}  limit estimate {:.10e}  {:.1}s", report.is_monotone(), report.limit_estimate, report.wall_clock.as_secs_f64());
    let progress = Progress {
        iter: report.trace.len(),
        rung: 0,
        rung_iter: 0,
        tau: config.schedule.tau,
        last_energy: report.trace.last().map_or(f64::NAN, |r| r.energy.e_total),
    };
    let mut config = config.clone();
    config.lambda = *ladder.last().expect("nonempty ladder");
    save_final(out, &config, progress, state, &report.trace)?;
    if report.any_budget() {
        return Err(Failure::Budget);
    }
    Ok(())
}

fn minimize(config: &Path, out: &Path, resume: Option<&Path>) -> Result<(), Failure> {
    let config = load_config(config)?;
    if config.mode() == Mode::TangentialContinuation {
        if resume.is_some() {
            return Err(Error::Argument("--resume is not supported in tangential-continuation mode".into()).into());
        }
        return sweep(&config, &config.schedule.lambda_ladder.clone(), out);
    }
    let model = config.model()?;
    let mut solver = match resume {
        None => Solver::new(model, config.schedule.clone(), config.volume, config.initial_state()?)?,
        Some(path) => {
            let ckpt = Checkpoint::load(path)?;
            if ckpt.state.grid().dims != config.grid()?.dims {
                return Err(Error::Argument(format!("checkpoint grid {:?} differs from config {:?}", ckpt.state.grid().dims, config.dims)).into());
            }
            if ckpt.config != config {
                eprintln!("warning: resuming with a config that differs from the checkpoint's");
            }
            Solver::resume(model, config.schedule.clone(), config.volume, ckpt.state, ckpt.progress)?
        }
    };
    let report = solver.run()?;
    let e = report.final_energy();
    println!("{e}");
    println!("{} after {} iterations, {:.1}s", report.termination.as_str(), solver.progress().iter, report.wall_clock.as_secs_f64());
    if let Some(r) = report.residual {
        println!("max |n·ν| on the interface: {r:.3e}");
    }
    let progress = solver.progress();
    save_final(out, &config, progress, solver.into_state(), &report.trace)?;
    if report.termination.is_budget() {
        return Err(Failure::Budget);
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Evaluate { config, source, out } => evaluate(&config, &source, &out),
        Command::Minimize { config, out, resume } => minimize(&config, &out, resume.as_deref()),
        Command::SweepLambda { config, ladder, out } => {
            let config = load_config(&config)?;
            let ladder = ladder.unwrap_or_else(|| config.schedule.lambda_ladder.clone());
            sweep(&config, &ladder, &out)
        }
        Command::Validate { seed } => {
            let results = validate::run_all(frank_density_raw, seed);
            print!("{}", validate::table(&results));
            if results.iter().all(|r| r.passed) {
                Ok(())
            } else {
                Err(Failure::Suites)
            }
        }
    }
}

fn threads() {
    if let Some(n) = std::env::var("LCDO_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).filter(|&n| n > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    threads();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Budget) => {
            eprintln!("iteration budget exhausted; artifacts written");
            ExitCode::from(4)
        }
        Err(Failure::Suites) => ExitCode::from(1),
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
