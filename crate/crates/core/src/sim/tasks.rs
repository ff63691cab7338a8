use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::kinematics::{RobotState, WheelCommand};
use super::SimError;
use crate::geometry::{normalize_angle, Point};
use crate::planner::Task;
use crate::scalar::Real;

/// Controller settings shared by all tasks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TaskConfig<T> {
    /// Forward speed of `T0`.
    pub linear_speed: T,
    /// Turning rate of `TL`/`TR`.
    pub angular_speed: T,
    /// A turn succeeds once the remaining angle is below this.
    pub heading_tolerance: T,
    /// A task with a target still running after this many seconds fails.
    pub timeout: T,
    /// Standard deviation of the turn angle error, in radians.
    pub actuation_noise_sigma: T,
}

impl<T: Real> Default for TaskConfig<T> {
    fn default() -> Self {
        Self {
            linear_speed: T::lit(0.2),
            angular_speed: T::FRAC_PI_4(),
            heading_tolerance: T::lit(1e-6),
            timeout: T::lit(10.0),
            actuation_noise_sigma: T::zero(),
        }
    }
}

impl<T: Real> TaskConfig<T> {
    pub fn validate(&self) -> Result<(), SimError> {
        let positive = [
            ("tasks.linear_speed", self.linear_speed),
            ("tasks.angular_speed", self.angular_speed),
            ("tasks.heading_tolerance", self.heading_tolerance),
            ("tasks.timeout", self.timeout),
        ];
        for (field, value) in positive {
            if !(value.is_finite() && value > T::zero()) {
                return Err(SimError::InvalidConfig { field, reason: format!("must be finite and > 0, got {value}") });
            }
        }
        if !(self.actuation_noise_sigma.is_finite() && self.actuation_noise_sigma >= T::zero()) {
            return Err(SimError::InvalidConfig {
                field: "tasks.actuation_noise_sigma",
                reason: format!("must be finite and >= 0, got {}", self.actuation_noise_sigma),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TaskStatus {
    Running,
    Success,
    Failure,
}

/// A task in progress. `progress` is the heading turned for `TL`/`TR` and
/// the distance travelled for `T0`, both measured from the robot state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaskExecution<T> {
    pub task: Task,
    pub status: TaskStatus,
    pub progress: T,
    /// Turn angle or travel distance at which the task succeeds; `None` for
    /// the open-ended resting `T0`.
    pub target: Option<T>,
    pub elapsed: T,
    last: Option<(Point<T>, T)>,
}

impl<T: Real> TaskExecution<T> {
    /// The open-ended resting task.
    pub fn resting() -> Self {
        Self::with_target(Task::Straight, None)
    }

    /// A `T0` that succeeds after `distance` metres.
    pub fn travel(distance: T) -> Self {
        Self::with_target(Task::Straight, Some(distance))
    }

    /// A 90 degree turn. With actuation noise the turned angle is off by an
    /// error drawn from `rng`, truncated at three standard deviations.
    pub fn turn<R: Rng>(task: Task, cfg: &TaskConfig<T>, rng: &mut R) -> Self {
        debug_assert!(task != Task::Straight);
        let sigma = cfg.actuation_noise_sigma.as_f64();
        let error = if sigma > 0.0 {
            let n = Normal::new(0.0, sigma).expect("sigma validated");
            n.sample(rng).clamp(-3.0 * sigma, 3.0 * sigma)
        } else {
            0.0
        };
        Self::with_target(task, Some(T::FRAC_PI_2() + T::lit(error)))
    }

    /// Starts `task` with the default target for its kind.
    pub fn start<R: Rng>(task: Task, cfg: &TaskConfig<T>, rng: &mut R) -> Self {
        match task {
            Task::Straight => Self::resting(),
            _ => Self::turn(task, cfg, rng),
        }
    }

    fn with_target(task: Task, target: Option<T>) -> Self {
        Self { task, status: TaskStatus::Running, progress: T::zero(), target, elapsed: T::zero(), last: None }
    }

    pub fn is_running(&self) -> bool {
        self.status == TaskStatus::Running
    }

    /// Marks a running task as failed, e.g. when an obstacle cuts it short.
    pub fn fail(&mut self) {
        if self.is_running() {
            self.status = TaskStatus::Failure;
        }
    }
}

/// One control update: folds the motion since the previous call into the
/// progress, settles the status and returns the command for the next `dt`.
pub fn run_task<T: Real>(
    exec: &TaskExecution<T>,
    state: &RobotState<T>,
    dt: T,
    cfg: &TaskConfig<T>,
) -> Result<(TaskExecution<T>, WheelCommand<T>), SimError> {
    if !exec.is_running() {
        return Err(SimError::TaskNotRunning(exec.task));
    }
    let mut next = *exec;
    let here = (state.pose.position(), state.pose.theta);
    if let Some((p, th)) = exec.last {
        next.progress = next.progress
            + match exec.task {
                Task::Straight => p.distance(&here.0),
                _ => normalize_angle(here.1 - th).expect("finite heading").abs(),
            };
        next.elapsed = next.elapsed + dt;
    }
    next.last = Some(here);

    let remaining = next.target.map(|t| t - next.progress);
    let done = match (exec.task, remaining) {
        (_, None) => false,
        (Task::Straight, Some(r)) => r <= T::lit(1e-9),
        (_, Some(r)) => r <= cfg.heading_tolerance,
    };
    if done {
        next.status = TaskStatus::Success;
        return Ok((next, WheelCommand::stop()));
    }
    if next.target.is_some() && next.elapsed > cfg.timeout {
        next.status = TaskStatus::Failure;
        return Ok((next, WheelCommand::stop()));
    }
    let cmd = match exec.task {
        Task::Straight => {
            let v = remaining.map_or(cfg.linear_speed, |r| cfg.linear_speed.min(r / dt));
            WheelCommand::forward(v)
        }
        Task::Left | Task::Right => {
            let r = remaining.expect("turns have a target");
            let w = cfg.angular_speed.min(r / dt);
            WheelCommand::rotate(if exec.task == Task::Left { w } else { -w })
        }
    };
    Ok((next, cmd))
}
