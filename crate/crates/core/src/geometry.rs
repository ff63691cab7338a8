//! Egocentric observations, poses and the tunable abstraction parameters.
//!
//! The egocentric frame puts the robot at the origin facing `+x`, with `+y`
//! to the robot's left. A left turn is therefore a positive rotation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("angle must be finite, got {0}")]
    NonFiniteAngle(f64),
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParam { field: &'static str, reason: String },
}

/// A single LiDAR return in the robot's egocentric frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Observation<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn norm(&self) -> T {
        self.x.hypot(self.y)
    }

    pub fn mirrored(&self) -> Self {
        Self { x: self.x, y: -self.y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// One sweep worth of egocentric observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloud<T> {
    pub observations: Vec<Observation<T>>,
    pub timestamp: T,
}

impl<T: Real> PointCloud<T> {
    pub fn new(observations: Vec<Observation<T>>, timestamp: T) -> Self {
        Self { observations, timestamp }
    }

    pub fn empty(timestamp: T) -> Self {
        Self { observations: Vec::new(), timestamp }
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Observation<T>> {
        self.observations.iter()
    }
}

/// Reflects a cloud about the heading axis, `(x, y) -> (x, -y)`, keeping order.
pub fn mirror_cloud<T: Real>(cloud: &PointCloud<T>) -> PointCloud<T> {
    PointCloud {
        observations: cloud.observations.iter().map(Observation::mirrored).collect(),
        timestamp: cloud.timestamp,
    }
}

/// The nearest qualifying point inside the forward sensing corridor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disturbance<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Disturbance<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn distance(&self) -> T {
        self.x.hypot(self.y)
    }

    pub fn mirrored(&self) -> Self {
        Self { x: self.x, y: -self.y }
    }
}

impl<T> From<Observation<T>> for Disturbance<T> {
    fn from(o: Observation<T>) -> Self {
        Self { x: o.x, y: o.y }
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn normalize_angle<T: Real>(theta: T) -> Result<T, GeometryError> {
    if !theta.is_finite() {
        return Err(GeometryError::NonFiniteAngle(theta.to_f64().unwrap_or(f64::NAN)));
    }
    let pi = T::PI();
    if theta > -pi && theta <= pi {
        return Ok(theta);
    }
    let two_pi = pi + pi;
    let mut r = theta % two_pi;
    if r < T::zero() {
        r = r + two_pi;
    }
    // r in [0, 2pi]
    if r > pi {
        r = r - two_pi;
    }
    if r <= -pi {
        r = pi;
    }
    Ok(r)
}

/// World-frame robot pose; `theta` is kept in `(-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose<T> {
    pub x: T,
    pub y: T,
    pub theta: T,
}

impl<T: Real> Pose<T> {
    pub fn new(x: T, y: T, theta: T) -> Result<Self, GeometryError> {
        Ok(Self { x, y, theta: normalize_angle(theta)? })
    }

    /// Maps an egocentric point into the world frame.
    pub fn to_world(&self, local: Observation<T>) -> Point<T> {
        let (s, c) = self.theta.sin_cos();
        Point { x: self.x + c * local.x - s * local.y, y: self.y + s * local.x + c * local.y }
    }

    /// Maps a world point into this pose's egocentric frame.
    pub fn to_local(&self, world: Point<T>) -> Observation<T> {
        let (s, c) = self.theta.sin_cos();
        let dx = world.x - self.x;
        let dy = world.y - self.y;
        Observation { x: c * dx + s * dy, y: -s * dx + c * dy }
    }

    pub fn position(&self) -> Point<T> {
        Point { x: self.x, y: self.y }
    }
}

/// A point in the world frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point<T>) -> T {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Tunable distances of the point-cloud abstraction and the sensing corridor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbstractionParams<T> {
    /// Radius of the safe zone that leaves room to rotate in place.
    pub d_safe: T,
    /// Minimum lateral clearance for a direction to count as open.
    pub d_min: T,
    /// Furthest lateral configuration of the abstraction.
    pub d_max: T,
    /// Length coefficient of the far subsets.
    pub beta: T,
    /// Width of the forward sensing corridor and of the far subsets.
    pub corridor_width: T,
    pub t_look: T,
    pub v: T,
    /// Distance of the fixed rear horizon point.
    pub d_back: T,
}

impl<T: Real> Default for AbstractionParams<T> {
    fn default() -> Self {
        Self {
            d_safe: T::lit(0.3),
            d_min: T::lit(0.5),
            d_max: T::lit(1.0),
            beta: T::lit(3.0),
            corridor_width: T::lit(0.25),
            t_look: T::lit(3.0),
            v: T::lit(0.2),
            d_back: T::lit(0.5),
        }
    }
}

impl<T: Real> AbstractionParams<T> {
    /// Sensing range `v * t_look`.
    pub fn lookahead(&self) -> T {
        self.v * self.t_look
    }

    pub fn half_width(&self) -> T {
        self.corridor_width * T::lit(0.5)
    }

    /// Lateral extent of the near subsets, `d_max + d_safe`.
    pub fn lateral_extent(&self) -> T {
        self.d_max + self.d_safe
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        let fields = [
            ("d_safe", self.d_safe),
            ("d_min", self.d_min),
            ("d_max", self.d_max),
            ("beta", self.beta),
            ("corridor_width", self.corridor_width),
            ("t_look", self.t_look),
            ("v", self.v),
            ("d_back", self.d_back),
        ];
        for (field, value) in fields {
            if !value.is_finite() {
                return Err(invalid(field, format!("must be finite, got {value}")));
            }
        }
        if self.d_safe <= T::zero() {
            return Err(invalid("d_safe", format!("must be > 0, got {}", self.d_safe)));
        }
        if self.d_min <= self.d_safe {
            return Err(invalid("d_min", format!("must exceed d_safe ({}), got {}", self.d_safe, self.d_min)));
        }
        if self.d_max < self.d_min {
            return Err(invalid("d_max", format!("must be >= d_min ({}), got {}", self.d_min, self.d_max)));
        }
        if self.beta <= T::one() {
            return Err(invalid("beta", format!("must be > 1, got {}", self.beta)));
        }
        if self.corridor_width <= T::zero() {
            return Err(invalid("corridor_width", format!("must be > 0, got {}", self.corridor_width)));
        }
        if self.v <= T::zero() {
            return Err(invalid("v", format!("must be > 0, got {}", self.v)));
        }
        if self.t_look <= T::zero() {
            return Err(invalid("t_look", format!("must be > 0, got {}", self.t_look)));
        }
        if self.d_back < self.d_safe {
            return Err(invalid("d_back", format!("must be >= d_safe ({}), got {}", self.d_safe, self.d_back)));
        }
        Ok(())
    }
}

fn invalid(field: &'static str, reason: String) -> GeometryError {
    GeometryError::InvalidParam { field, reason }
}
