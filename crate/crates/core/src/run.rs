//! Running scenarios end to end and the artifacts they produce.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::abstraction::{update_model, Horizon, Occupancy, Offsets, PlanningRecord, SubsetReport, Tier};
use crate::checker::TieBreak;
use crate::geometry::{Disturbance, PointCloud, Pose};
use crate::planner::{make_plan, Task};
use crate::render::{render_svg, Marker};
use crate::scalar::Real;
use crate::scenario::{Scenario, ScenarioError, ScenarioScalar};
use crate::sim::{Agent, AgentMode, Event, LogRow, PlanEntry};

/// Command-line style overrides of scenario fields.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub mode: Option<AgentMode>,
    pub seed: Option<u64>,
    pub revalidate: Option<bool>,
    pub max_ticks: Option<u64>,
}

impl Overrides {
    pub fn apply<T: Clone>(&self, scenario: &Scenario<T>) -> Scenario<T> {
        let mut s = scenario.clone();
        if let Some(m) = self.mode {
            s.agent_mode = m;
        }
        if let Some(seed) = self.seed {
            s.seed = seed;
        }
        if let Some(r) = self.revalidate {
            s.revalidate = r;
        }
        if let Some(n) = self.max_ticks {
            s.max_ticks = n;
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanSummary {
    pub id: u64,
    pub tick: u64,
    pub started_tick: Option<u64>,
    pub tasks: Vec<Task>,
    pub executed: Vec<Task>,
    pub terminal_state: Horizon,
    pub tier: Tier,
    pub safe_horizons: BTreeSet<Horizon>,
    pub fallback: bool,
    pub policy: TieBreak,
    /// Triggering disturbance in the world frame.
    pub anchor: [f64; 2],
    pub elapsed_us: f64,
}

impl PlanSummary {
    fn of<T: Real>(e: &PlanEntry<T>) -> Self {
        Self {
            id: e.id,
            tick: e.tick,
            started_tick: e.started_tick,
            tasks: e.plan.tasks.clone(),
            executed: e.executed.clone(),
            terminal_state: e.plan.terminal_state,
            tier: e.plan.report.tier,
            safe_horizons: e.plan.report.safe_horizons.clone(),
            fallback: e.plan.report.fallback,
            policy: e.policy.clone(),
            anchor: [e.anchor.x.as_f64(), e.anchor.y.as_f64()],
            elapsed_us: e.record.elapsed_us,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub scenario: String,
    pub mode: AgentMode,
    pub seed: u64,
    pub collided: bool,
    pub ticks: u64,
    pub path_length: f64,
    pub exit_achieved: bool,
    pub plans: Vec<PlanSummary>,
}

/// Everything a run produced.
#[derive(Debug, Clone)]
pub struct RunOutput<T> {
    pub scenario: Scenario<T>,
    pub summary: RunSummary,
    pub rows: Vec<LogRow<T>>,
    pub agent: Agent<T>,
}

impl<T: Real> RunOutput<T> {
    pub fn csv(&self) -> String {
        to_csv(&self.rows)
    }

    pub fn records(&self) -> Vec<PlanningRecord> {
        self.agent.plans().iter().map(|e| e.record.clone()).collect()
    }

    pub fn metrics_json(&self) -> String {
        let doc = serde_json::json!({ "summary": self.summary, "planning": self.records() });
        serde_json::to_string_pretty(&doc).expect("metrics serialize")
    }

    pub fn svg(&self) -> String {
        let world = self.scenario.world_map().expect("validated world");
        let path: Vec<(f64, f64)> = std::iter::once(self.scenario.start_pose())
            .chain(self.rows.iter().map(|r| r.pose))
            .map(|p| (p.x.as_f64(), p.y.as_f64()))
            .collect();
        let markers = markers(&self.rows, &self.summary.plans);
        let segs: Vec<[f64; 4]> =
            world.segments().iter().map(|s| [s.a.x.as_f64(), s.a.y.as_f64(), s.b.x.as_f64(), s.b.y.as_f64()]).collect();
        render_svg(&self.scenario.name, &segs, &[path], &markers)
    }
}

fn markers<T: Real>(rows: &[LogRow<T>], plans: &[PlanSummary]) -> Vec<Marker> {
    let mut out: Vec<Marker> = rows
        .iter()
        .filter(|r| r.events.contains(&Event::PlanStarted))
        .map(|r| Marker::PlanStart(r.pose.x.as_f64(), r.pose.y.as_f64()))
        .collect();
    out.extend(plans.iter().map(|p| Marker::Disturbance(p.anchor[0], p.anchor[1])));
    out.extend(
        rows.iter()
            .filter(|r| r.events.contains(&Event::Collision))
            .map(|r| Marker::Collision(r.pose.x.as_f64(), r.pose.y.as_f64())),
    );
    out
}

pub fn to_csv<T: Real>(rows: &[LogRow<T>]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(LogRow::<T>::CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv_line());
        out.push('\n');
    }
    out
}

/// Runs the agent until it collides, leaves the exit region or hits
/// `max_ticks`. The final row carries `RunEnd`.
pub fn simulate<T: Real>(scenario: &Scenario<T>) -> Result<RunOutput<T>, ScenarioError> {
    scenario.validate()?;
    let world = scenario.world_map()?;
    let mut agent = Agent::new(scenario.agent_config(), scenario.start_pose())
        .map_err(|e| ScenarioError::Validation { field: "agent".into(), message: e.to_string() })?;
    let mut rows = Vec::new();
    let mut exit_achieved = false;
    for _ in 0..scenario.max_ticks {
        rows.push(agent.tick(&world));
        if agent.collided() {
            break;
        }
        if let Some(region) = &scenario.exit_region {
            if !region.contains(agent.state().pose.position()) {
                exit_achieved = true;
                break;
            }
        }
    }
    if let Some(last) = rows.last_mut() {
        last.events.push(Event::RunEnd);
    }
    let summary = RunSummary {
        scenario: scenario.name.clone(),
        mode: scenario.agent_mode,
        seed: scenario.seed,
        collided: agent.collided(),
        ticks: agent.ticks(),
        path_length: agent.path_length().as_f64(),
        exit_achieved,
        plans: agent.plans().iter().map(PlanSummary::of).collect(),
    };
    Ok(RunOutput { scenario: scenario.clone(), summary, rows, agent })
}

pub const CSV_FILE: &str = "run.csv";
pub const METRICS_FILE: &str = "metrics.json";
pub const SVG_FILE: &str = "trajectory.svg";

/// Loads, runs and writes `run.csv`, `metrics.json` and `trajectory.svg`
/// into `out_dir`.
pub fn run_scenario<T: ScenarioScalar>(
    spec: &str,
    overrides: &Overrides,
    out_dir: &Path,
) -> Result<(RunSummary, Vec<PathBuf>), RunError> {
    let scenario = overrides.apply(&Scenario::<T>::resolve(spec)?);
    let out = simulate(&scenario)?;
    std::fs::create_dir_all(out_dir).map_err(|e| RunError::io(out_dir, e))?;
    let mut written = Vec::new();
    for (file, body) in [(CSV_FILE, out.csv()), (METRICS_FILE, out.metrics_json()), (SVG_FILE, out.svg())] {
        let path = out_dir.join(file);
        std::fs::write(&path, body).map_err(|e| RunError::io(&path, e))?;
        written.push(path);
    }
    Ok((out.summary, written))
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("scenario {0} never triggered a plan")]
    NoTrigger(String),
}

impl RunError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io { path: path.display().to_string(), source }
    }
}

/// The input of the first plan of a scenario run.
#[derive(Debug, Clone, PartialEq)]
pub struct TriggerCapture<T> {
    pub cloud: PointCloud<T>,
    pub disturbance: Disturbance<T>,
    pub policy: TieBreak,
    pub pose: Pose<T>,
}

/// Runs `scenario` in multi-step mode up to its first plan and returns the
/// scan and disturbance that produced it.
pub fn capture_trigger<T: Real>(scenario: &Scenario<T>) -> Result<TriggerCapture<T>, RunError> {
    let mut s = scenario.clone();
    s.agent_mode = AgentMode::MultiStep;
    let world = s.world_map()?;
    let mut agent = Agent::new(s.agent_config(), s.start_pose())
        .map_err(|e| ScenarioError::Validation { field: "agent".into(), message: e.to_string() })?;
    for _ in 0..s.max_ticks {
        let pose = agent.state().pose;
        agent.tick(&world);
        if let Some(e) = agent.plans().first() {
            return Ok(TriggerCapture {
                cloud: e.trigger_scan.clone(),
                disturbance: e.plan.report.disturbance,
                policy: e.policy.clone(),
                pose,
            });
        }
        if agent.collided() {
            break;
        }
    }
    Err(RunError::NoTrigger(s.name.clone()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchStats {
    pub reps: usize,
    pub min_us: f64,
    pub median_us: f64,
    pub p99_us: f64,
    pub max_us: f64,
    /// Whether the timed call produced a plan.
    pub solved: bool,
}

impl BenchStats {
    fn from_samples(mut samples: Vec<f64>, solved: bool) -> Self {
        samples.sort_by(f64::total_cmp);
        let n = samples.len();
        let at = |q: f64| samples[((q * n as f64).ceil() as usize).clamp(1, n) - 1];
        Self { reps: n, min_us: samples[0], median_us: at(0.5), p99_us: at(0.99), max_us: samples[n - 1], solved }
    }
}

/// Times `update_model` plus `make_plan` on the captured trigger `reps` times.
pub fn bench_planner<T: Real>(
    capture: &TriggerCapture<T>,
    params: &crate::geometry::AbstractionParams<T>,
    reps: usize,
) -> BenchStats {
    let reps = reps.max(1);
    let mut solved = true;
    let samples = (0..reps)
        .map(|_| {
            let t0 = Instant::now();
            let report = update_model(&capture.cloud, &capture.disturbance, params);
            let plan = make_plan(report, &capture.policy);
            let us = t0.elapsed().as_secs_f64() * 1e6;
            solved &= std::hint::black_box(plan).is_ok();
            us
        })
        .collect();
    BenchStats::from_samples(samples, solved)
}

/// Times plan search on a model where no horizon is safe.
pub fn bench_empty_safe_set(reps: usize) -> BenchStats {
    let reps = reps.max(1);
    let report = SubsetReport::<f64> {
        disturbance: Disturbance::new(0.3, 0.0),
        subsets: [Occupancy::Occupied(1); 7],
        d_plus: None,
        d_minus: None,
        offsets: Offsets { dx: 0.0, dy_plus: None, dy_minus: None },
        tier: Tier::ThreeStep,
        safe_horizons: BTreeSet::new(),
        fallback: false,
    };
    let mut solved = false;
    let samples = (0..reps)
        .map(|_| {
            let t0 = Instant::now();
            let plan = make_plan(report.clone(), &TieBreak::Declaration);
            let us = t0.elapsed().as_secs_f64() * 1e6;
            solved |= std::hint::black_box(plan).is_ok();
            us
        })
        .collect();
    BenchStats::from_samples(samples, solved)
}
