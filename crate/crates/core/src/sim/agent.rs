use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::time::Instant;

use log::{debug, info};
use rand::RngCore;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::kinematics::{step, RobotConfig, RobotState};
use super::lidar::{detect_disturbance, lidar_scan, LidarConfig};
use super::tasks::{run_task, TaskConfig, TaskExecution, TaskStatus};
use super::world::WorldMap;
use super::{stream_rng, SimError, ACTUATION_STREAM, LIDAR_STREAM, PLANNER_STREAM};
use crate::abstraction::{boundary_tolerance, update_model, Horizon, PlanningRecord};
use crate::checker::TieBreak;
use crate::geometry::{AbstractionParams, Disturbance, Point, PointCloud, Pose};
use crate::planner::{make_plan, solve, Plan, Task};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum AgentMode {
    /// Plans one, two or three steps with the model checker.
    #[default]
    #[serde(rename = "multistep")]
    MultiStep,
    /// Only ever turns once per disturbance.
    #[serde(rename = "onestep")]
    OneStepBaseline,
}

impl AgentMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "multistep" => Some(Self::MultiStep),
            "onestep" => Some(Self::OneStepBaseline),
            _ => None,
        }
    }
}

impl fmt::Display for AgentMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::MultiStep => "multistep",
            Self::OneStepBaseline => "onestep",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentConfig<T> {
    pub params: AbstractionParams<T>,
    pub lidar: LidarConfig<T>,
    pub robot: RobotConfig<T>,
    pub tasks: TaskConfig<T>,
    pub mode: AgentMode,
    /// Search order for plans. For `Seeded`, every plan gets its own seed:
    /// the configured one mixed with a draw from the planner stream.
    pub tie_break: TieBreak,
    /// Re-run the model update when a held plan is triggered and replan if
    /// the safe horizons changed.
    pub revalidate: bool,
    pub dt: T,
    pub substeps: usize,
    pub seed: u64,
}

impl<T: Real> Default for AgentConfig<T> {
    fn default() -> Self {
        Self {
            params: AbstractionParams::default(),
            lidar: LidarConfig::default(),
            robot: RobotConfig::default(),
            tasks: TaskConfig::default(),
            mode: AgentMode::MultiStep,
            tie_break: TieBreak::Declaration,
            revalidate: false,
            dt: T::lit(0.2),
            substeps: 10,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Event {
    DisturbanceDetected,
    PlanCreated,
    PlanStarted,
    TaskSuccess,
    TaskFailure,
    Collision,
    RunEnd,
}

impl Event {
    pub const ALL: [Event; 7] = [
        Event::DisturbanceDetected,
        Event::PlanCreated,
        Event::PlanStarted,
        Event::TaskSuccess,
        Event::TaskFailure,
        Event::Collision,
        Event::RunEnd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Event::DisturbanceDetected => "DisturbanceDetected",
            Event::PlanCreated => "PlanCreated",
            Event::PlanStarted => "PlanStarted",
            Event::TaskSuccess => "TaskSuccess",
            Event::TaskFailure => "TaskFailure",
            Event::Collision => "Collision",
            Event::RunEnd => "RunEnd",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == s)
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One line of the run log: the pose at the end of the tick, the task that
/// was commanded during it, and what happened.
#[derive(Debug, Clone, PartialEq)]
pub struct LogRow<T> {
    pub tick: u64,
    pub t: T,
    pub pose: Pose<T>,
    pub task: Task,
    pub events: Vec<Event>,
    pub plan_id: Option<u64>,
}

impl<T: Real> LogRow<T> {
    pub const CSV_HEADER: &'static str = "tick,t,x,y,theta,task,event,plan_id";

    pub fn csv_line(&self) -> String {
        let events: Vec<&str> = self.events.iter().map(|e| e.name()).collect();
        format!(
            "{},{:.6},{:.6},{:.6},{:.6},{},{},{}",
            self.tick,
            self.t.as_f64(),
            self.pose.x.as_f64(),
            self.pose.y.as_f64(),
            self.pose.theta.as_f64(),
            self.task,
            events.join(";"),
            self.plan_id.map(|id| id.to_string()).unwrap_or_default()
        )
    }
}

/// A plan created during a run with its bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanEntry<T> {
    pub id: u64,
    pub tick: u64,
    pub plan: Plan<T>,
    /// The triggering disturbance in the world frame.
    pub anchor: Point<T>,
    pub policy: TieBreak,
    pub record: PlanningRecord,
    /// The scan the plan was computed from.
    pub trigger_scan: PointCloud<T>,
    pub started_tick: Option<u64>,
    /// Tasks actually started for this plan, in order.
    pub executed: Vec<Task>,
}

/// The closed-loop agent: one [`Agent::tick`] per LiDAR scan.
#[derive(Debug, Clone)]
pub struct Agent<T> {
    cfg: AgentConfig<T>,
    state: RobotState<T>,
    exec: TaskExecution<T>,
    queue: VecDeque<Task>,
    active: Option<usize>,
    pending: Option<usize>,
    plans: Vec<PlanEntry<T>>,
    tick: u64,
    time: T,
    lidar_rng: ChaCha8Rng,
    actuation_rng: ChaCha8Rng,
    planner_rng: ChaCha8Rng,
    flagged: bool,
    collided: bool,
    path_length: T,
}

impl<T: Real> Agent<T> {
    pub fn new(cfg: AgentConfig<T>, start: Pose<T>) -> Result<Self, SimError> {
        cfg.params.validate().map_err(|e| SimError::InvalidConfig { field: "params", reason: e.to_string() })?;
        cfg.lidar.validate()?;
        cfg.robot.validate()?;
        cfg.tasks.validate()?;
        if !(cfg.dt.is_finite() && cfg.dt > T::zero()) {
            return Err(SimError::InvalidConfig { field: "dt", reason: format!("must be > 0, got {}", cfg.dt) });
        }
        if cfg.substeps == 0 {
            return Err(SimError::InvalidConfig { field: "substeps", reason: "must be >= 1".into() });
        }
        let seed = cfg.seed;
        Ok(Self {
            state: RobotState::at_rest(start, cfg.robot.radius),
            exec: TaskExecution::resting(),
            queue: VecDeque::new(),
            active: None,
            pending: None,
            plans: Vec::new(),
            tick: 0,
            time: T::zero(),
            lidar_rng: stream_rng(seed, LIDAR_STREAM.wrapping_add(cfg.lidar.seed << 2)),
            actuation_rng: stream_rng(seed, ACTUATION_STREAM),
            planner_rng: stream_rng(seed, PLANNER_STREAM),
            flagged: false,
            collided: false,
            path_length: T::zero(),
            cfg,
        })
    }

    pub fn config(&self) -> &AgentConfig<T> {
        &self.cfg
    }

    pub fn state(&self) -> &RobotState<T> {
        &self.state
    }

    pub fn execution(&self) -> &TaskExecution<T> {
        &self.exec
    }

    pub fn plans(&self) -> &[PlanEntry<T>] {
        &self.plans
    }

    pub fn collided(&self) -> bool {
        self.collided
    }

    pub fn path_length(&self) -> T {
        self.path_length
    }

    pub fn time(&self) -> T {
        self.time
    }

    pub fn ticks(&self) -> u64 {
        self.tick
    }

    /// Driving straight with no plan being executed.
    pub fn is_resting(&self) -> bool {
        self.active.is_none()
    }

    /// The plan being executed, else the one held for its trigger.
    pub fn current_plan(&self) -> Option<&PlanEntry<T>> {
        self.active.or(self.pending).map(|i| &self.plans[i])
    }

    /// Scan, plan or trigger a held plan, then drive for one tick.
    /// Once collided the agent no longer moves.
    pub fn tick(&mut self, world: &WorldMap<T>) -> LogRow<T> {
        let mut events = Vec::new();
        if self.collided {
            return self.row(events);
        }
        self.tick += 1;
        let p = self.cfg.params;
        let cloud = lidar_scan(world, &self.state.pose, &self.cfg.lidar, self.time, &mut self.lidar_rng);
        let seen = detect_disturbance(&cloud, &p);

        if self.is_resting() && self.pending.is_none() {
            if let Some(d) = seen {
                match self.cfg.mode {
                    AgentMode::MultiStep => {
                        events.push(Event::DisturbanceDetected);
                        self.plan_multistep(&cloud, d);
                        events.push(Event::PlanCreated);
                    }
                    AgentMode::OneStepBaseline => {
                        if !self.flagged {
                            self.flagged = true;
                            events.push(Event::DisturbanceDetected);
                        }
                        if d.distance() < p.d_safe {
                            self.plan_baseline(&cloud, d);
                            events.push(Event::PlanCreated);
                        }
                    }
                }
            }
        }

        if let Some(i) = self.pending.filter(|_| self.is_resting()) {
            if self.plans[i].anchor.distance(&self.state.pose.position()) < p.d_safe {
                let i = if self.cfg.revalidate { self.revalidate(i, &cloud, seen, &mut events) } else { i };
                self.start_plan(i);
                events.push(Event::PlanStarted);
            }
        }

        // an in-plan straight segment gives way to a new disturbance
        if self.active.is_some() && self.exec.task == Task::Straight {
            if let Some(d) = seen.filter(|d| d.distance() < p.d_safe) {
                debug!("tick {}: straight segment blocked at {:?}", self.tick, d);
                self.exec.fail();
            }
        }

        let cmd = loop {
            if self.exec.is_running() {
                let (exec, cmd) =
                    run_task(&self.exec, &self.state, self.cfg.dt, &self.cfg.tasks).expect("task is running");
                self.exec = exec;
                if exec.is_running() {
                    break cmd;
                }
            }
            let status = self.exec.status;
            events.push(if status == TaskStatus::Success { Event::TaskSuccess } else { Event::TaskFailure });
            self.advance(status);
        };

        let sub = self.cfg.dt / T::lit(self.cfg.substeps as f64);
        for _ in 0..self.cfg.substeps {
            let next = step(&self.state, cmd, sub);
            self.path_length = self.path_length + next.pose.position().distance(&self.state.pose.position());
            self.state = next;
            if world.clearance(self.state.pose.position()) < self.state.radius {
                info!("tick {}: collision at ({}, {})", self.tick, self.state.pose.x, self.state.pose.y);
                self.collided = true;
                events.push(Event::Collision);
                break;
            }
        }
        self.time = self.time + self.cfg.dt;
        self.row(events)
    }

    fn row(&self, events: Vec<Event>) -> LogRow<T> {
        LogRow {
            tick: self.tick,
            t: self.time,
            pose: self.state.pose,
            task: self.exec.task,
            events,
            plan_id: self.current_plan().map(|e| e.id),
        }
    }

    fn next_policy(&mut self) -> TieBreak {
        match &self.cfg.tie_break {
            TieBreak::Declaration => TieBreak::Declaration,
            TieBreak::Seeded { seed, relabel } => {
                TieBreak::Seeded { seed: seed ^ self.planner_rng.next_u64(), relabel: relabel.clone() }
            }
        }
    }

    fn plan_multistep(&mut self, cloud: &PointCloud<T>, d: Disturbance<T>) -> usize {
        let policy = self.next_policy();
        let started = Instant::now();
        let report = update_model(cloud, &d, &self.cfg.params);
        let plan = make_plan(report, &policy).expect("model update always leaves a safe horizon");
        let elapsed = started.elapsed().as_secs_f64() * 1e6;
        self.hold(plan, d, cloud, policy, elapsed)
    }

    /// The single turn of the baseline: toward the side whose near subset is
    /// empty, by policy when both are, else toward the larger lateral gap.
    fn plan_baseline(&mut self, cloud: &PointCloud<T>, d: Disturbance<T>) -> usize {
        let policy = self.next_policy();
        let started = Instant::now();
        let report = update_model(cloud, &d, &self.cfg.params);
        let by_policy = |policy: &TieBreak| {
            let both: BTreeSet<Horizon> = [Horizon::S3, Horizon::S4].into();
            solve(&both, policy).expect("one-step horizons are reachable").0[0]
        };
        let task = match (report.is_empty(1), report.is_empty(2)) {
            (true, false) => Task::Left,
            (false, true) => Task::Right,
            (true, true) => by_policy(&policy),
            (false, false) => {
                let left = report.d_plus.map_or(T::zero(), |o| o.y.abs());
                let right = report.d_minus.map_or(T::zero(), |o| o.y.abs());
                // gaps equal up to rounding are a tie
                let tol = boundary_tolerance::<T>();
                if left > right + tol {
                    Task::Left
                } else if right > left + tol {
                    Task::Right
                } else {
                    by_policy(&policy)
                }
            }
        };
        let terminal_state = if task == Task::Left { Horizon::S3 } else { Horizon::S4 };
        let plan = Plan { tasks: vec![task], terminal_state, created_at: T::zero(), report };
        let elapsed = started.elapsed().as_secs_f64() * 1e6;
        self.hold(plan, d, cloud, policy, elapsed)
    }

    fn hold(
        &mut self,
        mut plan: Plan<T>,
        d: Disturbance<T>,
        cloud: &PointCloud<T>,
        policy: TieBreak,
        elapsed_us: f64,
    ) -> usize {
        plan.created_at = self.time;
        let id = self.plans.len() as u64;
        let record = PlanningRecord::new(id, self.tick, cloud, &plan.report, elapsed_us);
        debug!("tick {}: plan {} {:?} -> {} ({:?})", self.tick, id, plan.tasks, plan.terminal_state, plan.report.tier);
        self.plans.push(PlanEntry {
            id,
            tick: self.tick,
            anchor: self.state.pose.to_world(crate::geometry::Observation::new(d.x, d.y)),
            plan,
            policy,
            record,
            trigger_scan: cloud.clone(),
            started_tick: None,
            executed: Vec::new(),
        });
        let i = self.plans.len() - 1;
        self.pending = Some(i);
        i
    }

    fn revalidate(
        &mut self,
        i: usize,
        cloud: &PointCloud<T>,
        seen: Option<Disturbance<T>>,
        events: &mut Vec<Event>,
    ) -> usize {
        if self.cfg.mode != AgentMode::MultiStep {
            return i;
        }
        let Some(d) = seen else { return i };
        let fresh = update_model(cloud, &d, &self.cfg.params);
        if fresh.safe_horizons == self.plans[i].plan.report.safe_horizons {
            return i;
        }
        debug!("tick {}: plan {} no longer matches the scan, replanning", self.tick, i);
        events.push(Event::PlanCreated);
        self.plan_multistep(cloud, d)
    }

    fn start_plan(&mut self, i: usize) {
        self.pending = None;
        self.active = Some(i);
        self.plans[i].started_tick = Some(self.tick);
        self.queue = self.plans[i].plan.tasks.iter().copied().collect();
        let first = self.queue.pop_front().expect("plans are non-empty");
        self.begin(first);
    }

    fn begin(&mut self, task: Task) {
        let i = self.active.expect("tasks begin inside a plan");
        self.plans[i].executed.push(task);
        self.exec = match task {
            Task::Straight => {
                let travel = self.plans[i].plan.lateral_travel().unwrap_or_else(T::zero);
                TaskExecution::travel(travel)
            }
            _ => TaskExecution::turn(task, &self.cfg.tasks, &mut self.actuation_rng),
        };
    }

    fn advance(&mut self, status: TaskStatus) {
        let next = match status {
            TaskStatus::Success => self.queue.pop_front(),
            _ => None,
        };
        match next {
            Some(task) => self.begin(task),
            None => {
                self.queue.clear();
                self.active = None;
                self.flagged = false;
                self.exec = TaskExecution::resting();
            }
        }
    }
}

/// Free-function form of [`Agent::tick`].
pub fn agent_tick<T: Real>(agent: &mut Agent<T>, world: &WorldMap<T>) -> LogRow<T> {
    agent.tick(world)
}
