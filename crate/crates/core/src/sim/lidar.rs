use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::world::WorldMap;
use super::SimError;
use crate::geometry::{AbstractionParams, Disturbance, Observation, PointCloud, Pose};
use crate::scalar::Real;

/// Simulated 360 degree planar range finder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LidarConfig<T> {
    pub n_rays: usize,
    pub max_range: T,
    /// Standard deviation of Gaussian range noise.
    pub noise_sigma: T,
    /// Offset of the sensor's random stream from the scenario seed.
    pub seed: u64,
}

impl<T: Real> Default for LidarConfig<T> {
    fn default() -> Self {
        Self { n_rays: 360, max_range: T::lit(8.0), noise_sigma: T::zero(), seed: 0 }
    }
}

impl<T: Real> LidarConfig<T> {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.n_rays < 8 {
            return Err(SimError::InvalidConfig {
                field: "lidar.n_rays",
                reason: format!("must be >= 8, got {}", self.n_rays),
            });
        }
        if !(self.max_range.is_finite() && self.max_range > T::zero()) {
            return Err(SimError::InvalidConfig {
                field: "lidar.max_range",
                reason: format!("must be > 0, got {}", self.max_range),
            });
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= T::zero()) {
            return Err(SimError::InvalidConfig {
                field: "lidar.noise_sigma",
                reason: format!("must be >= 0, got {}", self.noise_sigma),
            });
        }
        Ok(())
    }

    /// Bearing of ray `i` relative to the heading; ray 0 points straight ahead.
    pub fn bearing(&self, i: usize) -> T {
        T::TAU() * T::lit(i as f64) / T::lit(self.n_rays as f64)
    }
}

/// One sweep from `pose`: the nearest hit of each ray within range, in the
/// egocentric frame. Rays without a hit are omitted. Range noise, when
/// configured, is drawn from `rng` once per hit in ray order.
pub fn lidar_scan<T: Real, R: Rng>(
    world: &WorldMap<T>,
    pose: &Pose<T>,
    cfg: &LidarConfig<T>,
    timestamp: T,
    rng: &mut R,
) -> PointCloud<T> {
    let noise =
        (cfg.noise_sigma > T::zero()).then(|| Normal::new(0.0, cfg.noise_sigma.as_f64()).expect("sigma validated"));
    let origin = pose.position();
    let mut observations = Vec::with_capacity(cfg.n_rays);
    for i in 0..cfg.n_rays {
        let bearing = cfg.bearing(i);
        let (s, c) = (pose.theta + bearing).sin_cos();
        let Some(range) = world.cast(origin, (c, s)) else { continue };
        if range > cfg.max_range {
            continue;
        }
        let range = match &noise {
            Some(n) => (range + T::lit(n.sample(rng))).max(T::zero()),
            None => range,
        };
        let (bs, bc) = bearing.sin_cos();
        observations.push(Observation::new(range * bc, range * bs));
    }
    PointCloud::new(observations, timestamp)
}

/// The observation closest to the robot inside the forward corridor
/// `0 < x <= v * t_look`, `|y| <= corridor_width / 2`. Ties keep scan order.
pub fn detect_disturbance<T: Real>(cloud: &PointCloud<T>, p: &AbstractionParams<T>) -> Option<Disturbance<T>> {
    let reach = p.lookahead();
    let half = p.half_width();
    cloud
        .iter()
        .filter(|o| o.x > T::zero() && o.x <= reach && o.y.abs() <= half)
        .fold(None, |best: Option<&Observation<T>>, o| match best {
            Some(b) if b.norm() <= o.norm() => Some(b),
            _ => Some(o),
        })
        .map(|o| Disturbance::from(*o))
}
