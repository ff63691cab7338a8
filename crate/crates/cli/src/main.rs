//! Command-line runner for the bundled and user scenarios.
//!
//! Exit codes: 0 ran clean, 2 collision, 3 parse or validation error,
//! 1 anything else.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use insitu_core::render::{parse_csv, render_log, CsvError};
use insitu_core::run::{
    bench_empty_safe_set, bench_planner, capture_trigger, run_scenario, BenchStats, Overrides, RunError, RunSummary,
    METRICS_FILE,
};
use insitu_core::scenario::ScenarioError;
use insitu_core::sim::AgentMode;
use insitu_core::Scenario;
use log::{info, warn};

#[derive(Parser)]
#[command(name = "insitu", version, about = "Model-checking local planner: scenario runner and benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run scenarios and write run.csv, metrics.json and trajectory.svg.
    Run {
        /// Scenario files or bundled names (culdesac_A, corner_B).
        #[arg(required = true)]
        scenarios: Vec<String>,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        max_ticks: Option<u64>,
        /// Output directory; with several scenarios each gets a subdirectory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Re-run the model update when a held plan starts.
        #[arg(long)]
        revalidate: bool,
        /// Run several scenarios in parallel.
        #[arg(long)]
        batch: bool,
    },
    /// Time the model update and plan search on a scenario's first trigger.
    Bench {
        scenario: String,
        #[arg(long, default_value_t = 1000)]
        reps: usize,
        /// Time the search on a model with no safe horizon instead.
        #[arg(long)]
        empty: bool,
        #[arg(long)]
        json: bool,
    },
    /// Render a run log to SVG.
    Render {
        csv: PathBuf,
        /// Scenario whose walls and start are drawn.
        #[arg(long)]
        scenario: Option<String>,
        /// Metrics file with the disturbance positions; defaults to the
        /// metrics.json beside the log.
        #[arg(long)]
        metrics: Option<PathBuf>,
        #[arg(short, long, default_value = "trajectory.svg")]
        output: PathBuf,
    },
    /// Parse and validate a scenario file.
    Validate { scenario: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Multistep,
    Onestep,
}

impl From<Mode> for AgentMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Multistep => AgentMode::MultiStep,
            Mode::Onestep => AgentMode::OneStepBaseline,
        }
    }
}

/// Failures sorted by exit code.
#[derive(Debug)]
enum Failure {
    Invalid(String),
    Other(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::Parse { .. } | ScenarioError::Validation { .. } => Failure::Invalid(e.to_string()),
            other => Failure::Other(other.into()),
        }
    }
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        match e {
            RunError::Scenario(s) => s.into(),
            other => Failure::Other(other.into()),
        }
    }
}

impl From<CsvError> for Failure {
    fn from(e: CsvError) -> Self {
        Failure::Invalid(e.to_string())
    }
}

const COLLISION: u8 = 2;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("PLANNER_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { scenarios, mode, seed, max_ticks, out, revalidate, batch } => {
            let overrides =
                Overrides { mode: mode.map(Into::into), seed, revalidate: revalidate.then_some(true), max_ticks };
            run(&scenarios, &overrides, &out, batch)
        }
        Command::Bench { scenario, reps, empty, json } => bench(&scenario, reps, empty, json),
        Command::Render { csv, scenario, metrics, output } => render(&csv, scenario.as_deref(), metrics, &output),
        Command::Validate { scenario } => validate(&scenario),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn print_summary(s: &RunSummary, dir: &Path) {
    let first = s.plans.first().map(|p| {
        let tasks: Vec<String> = p.tasks.iter().map(|t| t.to_string()).collect();
        format!("first plan <{}> -> {:?}", tasks.join(", "), p.terminal_state)
    });
    println!(
        "{} [{}] seed {}: {} ticks, path {:.3} m, collided {}, exit {}, {} plans{}; wrote {}",
        s.scenario,
        s.mode,
        s.seed,
        s.ticks,
        s.path_length,
        s.collided,
        s.exit_achieved,
        s.plans.len(),
        first.map(|f| format!(", {f}")).unwrap_or_default(),
        dir.display()
    );
}

fn run(scenarios: &[String], overrides: &Overrides, out: &Path, batch: bool) -> Result<ExitCode, Failure> {
    if scenarios.len() > 1 && !batch {
        return Err(Failure::Other(anyhow::anyhow!("several scenarios need --batch")));
    }
    let dir_for = |spec: &str| {
        if scenarios.len() == 1 {
            out.to_path_buf()
        } else {
            let stem =
                Path::new(spec).file_stem().map_or_else(|| spec.to_string(), |s| s.to_string_lossy().into_owned());
            out.join(stem)
        }
    };
    // every scenario runs in its own thread with its own state
    let results: Vec<(PathBuf, Result<RunSummary, RunError>)> = std::thread::scope(|scope| {
        let handles: Vec<_> = scenarios
            .iter()
            .map(|spec| {
                let dir = dir_for(spec);
                scope.spawn(move || {
                    info!("running {spec} into {}", dir.display());
                    let r = run_scenario::<f64>(spec, overrides, &dir).map(|(s, _)| s);
                    (dir, r)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("scenario thread panicked")).collect()
    });
    let mut collided = false;
    let mut first_err = None;
    for (dir, r) in results {
        match r {
            Ok(s) => {
                collided |= s.collided;
                print_summary(&s, &dir);
            }
            Err(e) => {
                warn!("{}: {e}", dir.display());
                first_err.get_or_insert(e);
            }
        }
    }
    if let Some(e) = first_err {
        return Err(e.into());
    }
    Ok(if collided { ExitCode::from(COLLISION) } else { ExitCode::SUCCESS })
}

fn bench(spec: &str, reps: usize, empty: bool, json: bool) -> Result<ExitCode, Failure> {
    if reps < 100 {
        return Err(Failure::Other(anyhow::anyhow!("--reps must be at least 100, got {reps}")));
    }
    let stats: BenchStats = if empty {
        bench_empty_safe_set(reps)
    } else {
        let scenario = Scenario::resolve(spec)?;
        let capture = capture_trigger(&scenario)?;
        bench_planner(&capture, &scenario.params, reps)
    };
    if json {
        println!("{}", serde_json::to_string_pretty(&stats).context("serialize stats")?);
    } else {
        println!(
            "{} reps: min {:.1} us, median {:.1} us, p99 {:.1} us, max {:.1} us, plan found {}",
            stats.reps, stats.min_us, stats.median_us, stats.p99_us, stats.max_us, stats.solved
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn disturbances(path: &Path) -> anyhow::Result<Vec<(f64, f64)>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("read {}", path.display()))?;
    let doc: serde_json::Value = serde_json::from_str(&text).with_context(|| format!("parse {}", path.display()))?;
    let plans = doc["summary"]["plans"].as_array().cloned().unwrap_or_default();
    Ok(plans.iter().filter_map(|p| Some((p["anchor"][0].as_f64()?, p["anchor"][1].as_f64()?))).collect())
}

fn render(csv: &Path, scenario: Option<&str>, metrics: Option<PathBuf>, output: &Path) -> Result<ExitCode, Failure> {
    let text = std::fs::read_to_string(csv).with_context(|| format!("read {}", csv.display()))?;
    let rows = parse_csv(&text)?;
    let (title, segments, start) = match scenario {
        Some(spec) => {
            let s = Scenario::resolve(spec)?;
            let segs: Vec<[f64; 4]> = s.world_map()?.segments().iter().map(|g| [g.a.x, g.a.y, g.b.x, g.b.y]).collect();
            (s.name.clone(), segs, Some((s.start.x, s.start.y)))
        }
        None => (csv.display().to_string(), Vec::new(), None),
    };
    let metrics = metrics.or_else(|| Some(csv.with_file_name(METRICS_FILE)).filter(|p| p.exists()));
    let marks = match metrics {
        Some(p) => disturbances(&p)?,
        None => Vec::new(),
    };
    let svg = render_log(&title, &rows, start, &segments, &marks);
    std::fs::write(output, svg).with_context(|| format!("write {}", output.display()))?;
    println!("wrote {}", output.display());
    Ok(ExitCode::SUCCESS)
}

fn validate(spec: &str) -> Result<ExitCode, Failure> {
    let s = Scenario::resolve(spec)?;
    println!("{}: ok ({} segments)", s.name, s.world_map()?.segments().len());
    Ok(ExitCode::SUCCESS)
}
