//! Planar world, simulated LiDAR, unicycle kinematics, task controllers and
//! the closed-loop agent.

mod agent;
mod kinematics;
mod lidar;
mod tasks;
mod world;

pub use agent::{agent_tick, Agent, AgentConfig, AgentMode, Event, LogRow, PlanEntry};
pub use kinematics::{step, RobotConfig, RobotState, WheelCommand};
pub use lidar::{detect_disturbance, lidar_scan, LidarConfig};
pub use tasks::{run_task, TaskConfig, TaskExecution, TaskStatus};
pub use world::{Bounds, Segment, WorldMap};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::planner::Task;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("segment {index}: {reason}")]
    InvalidSegment { index: usize, reason: &'static str },
    #[error("{field}: {reason}")]
    InvalidConfig { field: &'static str, reason: String },
    #[error("task {0} is not running")]
    TaskNotRunning(Task),
}

pub const LIDAR_STREAM: u64 = 0;
pub const ACTUATION_STREAM: u64 = 1;
pub const PLANNER_STREAM: u64 = 2;

/// Independent generator `stream` derived from the scenario seed.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
