//! JSON scenario files.
//!
//! World geometry is a list of segments `[x1, y1, x2, y2]` plus optional
//! `rects` and `u_shapes` that expand into segments when the world is built.
//! Unlisted configuration sections take their defaults.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::checker::TieBreak;
use crate::geometry::{AbstractionParams, Point, Pose};
use crate::scalar::Real;
use crate::sim::{AgentConfig, AgentMode, Bounds, LidarConfig, RobotConfig, Segment, TaskConfig, WorldMap};

/// Scalar usable in scenario files.
pub trait ScenarioScalar: Real + Serialize + DeserializeOwned {}
impl<T: Real + Serialize + DeserializeOwned> ScenarioScalar for T {}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid {field}: {message}")]
    Validation { field: String, message: String },
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("unknown bundled scenario {0:?}")]
    UnknownBundled(String),
}

impl ScenarioError {
    fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Validation { field: field.into(), message: message.into() }
    }
}

/// Axis-aligned rectangle outline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RectSpec<T> {
    pub min: [T; 2],
    pub max: [T; 2],
}

/// Three walls open on one side. `mouth` is the middle of the opening and
/// `heading` points from it toward the closed end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UShapeSpec<T> {
    pub mouth: [T; 2],
    pub heading: T,
    pub width: T,
    pub depth: T,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorldSpec<T> {
    #[serde(default)]
    pub segments: Vec<[T; 4]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rects: Vec<RectSpec<T>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub u_shapes: Vec<UShapeSpec<T>>,
}

impl<T: Real> WorldSpec<T> {
    /// All segments with macros expanded: listed segments first, then
    /// rectangles, then U-shapes.
    pub fn expand(&self) -> Vec<Segment<T>> {
        let mut out: Vec<Segment<T>> =
            self.segments.iter().map(|s| Segment::new(Point::new(s[0], s[1]), Point::new(s[2], s[3]))).collect();
        for r in &self.rects {
            let c = [
                Point::new(r.min[0], r.min[1]),
                Point::new(r.max[0], r.min[1]),
                Point::new(r.max[0], r.max[1]),
                Point::new(r.min[0], r.max[1]),
            ];
            out.extend((0..4).map(|i| Segment::new(c[i], c[(i + 1) % 4])));
        }
        for u in &self.u_shapes {
            let (s, c) = u.heading.sin_cos();
            let half = u.width * T::lit(0.5);
            // left and right of the heading
            let at =
                |along: T, side: T| Point::new(u.mouth[0] + c * along - s * side, u.mouth[1] + s * along + c * side);
            let (ml, mr) = (at(T::zero(), half), at(T::zero(), -half));
            let (bl, br) = (at(u.depth, half), at(u.depth, -half));
            out.push(Segment::new(ml, bl));
            out.push(Segment::new(bl, br));
            out.push(Segment::new(br, mr));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(serialize = "T: Serialize", deserialize = "T: ScenarioScalar"))]
pub struct Scenario<T> {
    pub name: String,
    pub world: WorldSpec<T>,
    pub start: Pose<T>,
    #[serde(default)]
    pub params: AbstractionParams<T>,
    #[serde(default)]
    pub lidar: LidarConfig<T>,
    #[serde(default)]
    pub robot: RobotConfig<T>,
    #[serde(default)]
    pub tasks: TaskConfig<T>,
    #[serde(default)]
    pub agent_mode: AgentMode,
    #[serde(default)]
    pub tie_break: TieBreak,
    #[serde(default)]
    pub seed: u64,
    pub max_ticks: u64,
    /// The run ends successfully once the robot leaves this box.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exit_region: Option<Bounds<T>>,
    #[serde(default)]
    pub revalidate: bool,
}

/// Scenarios shipped with the crate, by name.
pub const BUNDLED: [(&str, &str); 2] = [
    ("culdesac_A", include_str!("../scenarios/culdesac_A.json")),
    ("corner_B", include_str!("../scenarios/corner_B.json")),
];

impl<T: ScenarioScalar> Scenario<T> {
    /// Parses and validates a scenario document.
    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        let s: Self = serde_json::from_str(text).map_err(|e| ScenarioError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ScenarioError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|source| ScenarioError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text)
    }

    pub fn bundled(name: &str) -> Result<Self, ScenarioError> {
        let (_, text) =
            BUNDLED.iter().find(|(n, _)| *n == name).ok_or_else(|| ScenarioError::UnknownBundled(name.to_string()))?;
        Self::parse(text)
    }

    /// A file path if one exists, else a bundled scenario name.
    pub fn resolve(spec: &str) -> Result<Self, ScenarioError> {
        if Path::new(spec).exists() {
            Self::load(spec)
        } else {
            match Self::bundled(spec) {
                Err(ScenarioError::UnknownBundled(_)) => Self::load(spec),
                other => other,
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }
}

impl<T: Real> Scenario<T> {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.name.trim().is_empty() {
            return Err(ScenarioError::invalid("name", "must not be empty"));
        }
        if self.max_ticks == 0 {
            return Err(ScenarioError::invalid("max_ticks", "must be > 0"));
        }
        let start = [self.start.x, self.start.y, self.start.theta];
        if start.iter().any(|v| !v.is_finite()) {
            return Err(ScenarioError::invalid("start", "coordinates must be finite"));
        }
        self.params.validate().map_err(|e| ScenarioError::invalid("params", e.to_string()))?;
        for (what, r) in
            [("lidar", self.lidar.validate()), ("robot", self.robot.validate()), ("tasks", self.tasks.validate())]
        {
            r.map_err(|e| ScenarioError::invalid(what, e.to_string()))?;
        }
        if let TieBreak::Seeded { relabel: Some(r), .. } = &self.tie_break {
            let mut seen = r.clone();
            seen.sort_unstable();
            if seen != (0..crate::planner::STATE_COUNT).collect::<Vec<_>>() {
                return Err(ScenarioError::invalid("tie_break.relabel", "must be a permutation of the 15 states"));
            }
        }
        if let Some(b) = &self.exit_region {
            if !(b.min.x < b.max.x && b.min.y < b.max.y) {
                return Err(ScenarioError::invalid("exit_region", "min must be below max on both axes"));
            }
        }
        self.world_map().map(|_| ())
    }

    /// Builds the world; segment errors name the offending entry.
    pub fn world_map(&self) -> Result<WorldMap<T>, ScenarioError> {
        WorldMap::new(self.world.expand()).map_err(|e| {
            let field = match e {
                crate::sim::SimError::InvalidSegment { index, .. } => self.segment_field(index),
                _ => "world".to_string(),
            };
            ScenarioError::invalid(field, e.to_string())
        })
    }

    fn segment_field(&self, index: usize) -> String {
        let listed = self.world.segments.len();
        let rects = listed + 4 * self.world.rects.len();
        if index < listed {
            format!("world.segments[{index}]")
        } else if index < rects {
            format!("world.rects[{}]", (index - listed) / 4)
        } else {
            format!("world.u_shapes[{}]", (index - rects) / 3)
        }
    }

    pub fn start_pose(&self) -> Pose<T> {
        Pose::new(self.start.x, self.start.y, self.start.theta).expect("validated start")
    }

    pub fn agent_config(&self) -> AgentConfig<T> {
        AgentConfig {
            params: self.params,
            lidar: self.lidar,
            robot: self.robot,
            tasks: self.tasks,
            mode: self.agent_mode,
            tie_break: self.tie_break.clone(),
            revalidate: self.revalidate,
            seed: self.seed,
            ..AgentConfig::default()
        }
    }
}
