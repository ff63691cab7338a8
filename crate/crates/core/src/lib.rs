//! Local trajectory planning for a differential-drive robot by checking a
//! safety invariant over a small task model built from each LiDAR scan.
//!
//! The geometric parts are generic over the scalar type ([`scalar::Real`]);
//! the aliases below fix it to `f64`.

pub mod abstraction;
pub mod checker;
pub mod geometry;
pub mod planner;
pub mod render;
pub mod run;
pub mod scalar;
pub mod scenario;
pub mod sim;

pub type Observation = geometry::Observation<f64>;
pub type PointCloud = geometry::PointCloud<f64>;
pub type Disturbance = geometry::Disturbance<f64>;
pub type Pose = geometry::Pose<f64>;
pub type Point = geometry::Point<f64>;
pub type AbstractionParams = geometry::AbstractionParams<f64>;
pub type SubsetReport = abstraction::SubsetReport<f64>;
pub type Plan = planner::Plan<f64>;
pub type WorldMap = sim::WorldMap<f64>;
pub type Agent = sim::Agent<f64>;
pub type Scenario = scenario::Scenario<f64>;
pub type RunOutput = run::RunOutput<f64>;
