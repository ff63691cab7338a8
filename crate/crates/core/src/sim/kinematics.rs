use serde::{Deserialize, Serialize};

use super::SimError;
use crate::geometry::Pose;
use crate::scalar::Real;

/// Footprint and speed limits of the robot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RobotConfig<T> {
    pub radius: T,
    pub max_linear_speed: T,
    pub max_angular_speed: T,
}

impl<T: Real> Default for RobotConfig<T> {
    fn default() -> Self {
        Self { radius: T::lit(0.1), max_linear_speed: T::lit(0.5), max_angular_speed: T::PI() }
    }
}

impl<T: Real> RobotConfig<T> {
    pub fn validate(&self) -> Result<(), SimError> {
        let checks = [
            ("robot.radius", self.radius),
            ("robot.max_linear_speed", self.max_linear_speed),
            ("robot.max_angular_speed", self.max_angular_speed),
        ];
        for (field, value) in checks {
            if !(value.is_finite() && value > T::zero()) {
                return Err(SimError::InvalidConfig { field, reason: format!("must be finite and > 0, got {value}") });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobotState<T> {
    pub pose: Pose<T>,
    pub radius: T,
    pub linear_speed: T,
    pub angular_speed: T,
}

impl<T: Real> RobotState<T> {
    pub fn at_rest(pose: Pose<T>, radius: T) -> Self {
        Self { pose, radius, linear_speed: T::zero(), angular_speed: T::zero() }
    }
}

/// Forward and turning speed of the unicycle model.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct WheelCommand<T> {
    pub v: T,
    pub omega: T,
}

impl<T: Real> WheelCommand<T> {
    pub fn stop() -> Self {
        Self { v: T::zero(), omega: T::zero() }
    }

    pub fn forward(v: T) -> Self {
        Self { v, omega: T::zero() }
    }

    pub fn rotate(omega: T) -> Self {
        Self { v: T::zero(), omega }
    }
}

/// Advances the unicycle by `dt` under a constant command.
///
/// The arc is integrated exactly, so splitting a step does not change the
/// result beyond rounding. Straight motion reduces to `x += v cos(theta) dt`.
pub fn step<T: Real>(state: &RobotState<T>, cmd: WheelCommand<T>, dt: T) -> RobotState<T> {
    debug_assert!(dt > T::zero());
    let Pose { x, y, theta } = state.pose;
    let dtheta = cmd.omega * dt;
    let (nx, ny) = if dtheta.abs() < T::lit(1e-12) {
        let (s, c) = theta.sin_cos();
        (x + cmd.v * c * dt, y + cmd.v * s * dt)
    } else {
        let r = cmd.v / cmd.omega;
        let (s0, c0) = theta.sin_cos();
        let (s1, c1) = (theta + dtheta).sin_cos();
        (x + r * (s1 - s0), y - r * (c1 - c0))
    };
    let pose = Pose::new(nx, ny, theta + dtheta).expect("finite command keeps the pose finite");
    RobotState { pose, radius: state.radius, linear_speed: cmd.v, angular_speed: cmd.omega }
}
