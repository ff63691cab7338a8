//! Model update: sorts a point cloud into the subsets `o1`..`o7` and decides
//! which horizon states of the task model are safe.
//!
//! The procedure runs in tiers and stops at the first tier that yields a plan:
//!
//! 1. Shift the cloud back by the longitudinal offset so the robot sits
//!    `d_safe` short of the disturbance, then look at the lateral strips `o1`
//!    (left) and `o2` (right). An empty strip admits a single turn.
//! 2. Otherwise take the nearest lateral disturbances `D+` and `D-`. If
//!    neither side offers more than `d_min` of clearance the robot is boxed
//!    in and turns around (`o7`, behind the robot, is assumed empty).
//! 3. Otherwise shift the cloud laterally by each open side's offset and check
//!    the far boxes in front (`o3`/`o4`) and behind (`o5`/`o6`) of the
//!    displaced robot.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::geometry::{AbstractionParams, Disturbance, Observation, PointCloud};
use crate::scalar::Real;

/// The horizon states of the task model: valid plan endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Horizon {
    S3,
    S4,
    S7,
    S8,
    S11,
    S12,
    S14,
}

impl Horizon {
    pub const ALL: [Horizon; 7] =
        [Horizon::S3, Horizon::S4, Horizon::S7, Horizon::S8, Horizon::S11, Horizon::S12, Horizon::S14];

    /// Index of the state in the task transition system.
    pub fn state(self) -> usize {
        match self {
            Horizon::S3 => 3,
            Horizon::S4 => 4,
            Horizon::S7 => 7,
            Horizon::S8 => 8,
            Horizon::S11 => 11,
            Horizon::S12 => 12,
            Horizon::S14 => 14,
        }
    }

    pub fn from_state(state: usize) -> Option<Self> {
        Self::ALL.into_iter().find(|h| h.state() == state)
    }

    /// Left/right reflection: `s3<->s4`, `s7<->s8`, `s11<->s12`.
    pub fn mirrored(self) -> Self {
        match self {
            Horizon::S3 => Horizon::S4,
            Horizon::S4 => Horizon::S3,
            Horizon::S7 => Horizon::S8,
            Horizon::S8 => Horizon::S7,
            Horizon::S11 => Horizon::S12,
            Horizon::S12 => Horizon::S11,
            Horizon::S14 => Horizon::S14,
        }
    }
}

impl fmt::Display for Horizon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.state())
    }
}

/// Plan length class chosen by the model update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Tier {
    OneStep,
    TwoStep,
    ThreeStep,
}

impl Tier {
    pub fn steps(self) -> usize {
        match self {
            Tier::OneStep => 1,
            Tier::TwoStep => 2,
            Tier::ThreeStep => 3,
        }
    }
}

/// What is known about one subset after the update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status", content = "count")]
pub enum Occupancy {
    /// Not evaluated because an earlier tier decided the plan.
    Unchecked,
    Empty,
    Occupied(usize),
    /// Never computed from data; assumed empty for the turn-around.
    AssumedEmpty,
}

impl Occupancy {
    fn of(len: usize) -> Self {
        if len == 0 {
            Occupancy::Empty
        } else {
            Occupancy::Occupied(len)
        }
    }

    pub fn is_empty(self) -> bool {
        matches!(self, Occupancy::Empty | Occupancy::AssumedEmpty)
    }

    pub fn count(self) -> Option<usize> {
        match self {
            Occupancy::Empty => Some(0),
            Occupancy::Occupied(n) => Some(n),
            Occupancy::Unchecked | Occupancy::AssumedEmpty => None,
        }
    }
}

/// Longitudinal and lateral shifts applied to the cloud.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Offsets<T> {
    pub dx: T,
    pub dy_plus: Option<T>,
    pub dy_minus: Option<T>,
}

impl<T: Real> Offsets<T> {
    pub fn mirrored(&self) -> Self {
        Self { dx: self.dx, dy_plus: self.dy_minus.map(|v| -v), dy_minus: self.dy_plus.map(|v| -v) }
    }
}

/// Outcome of [`update_model`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetReport<T> {
    pub disturbance: Disturbance<T>,
    /// `o1`..`o7`, index 0 is `o1`.
    pub subsets: [Occupancy; 7],
    pub d_plus: Option<Observation<T>>,
    pub d_minus: Option<Observation<T>>,
    pub offsets: Offsets<T>,
    pub tier: Tier,
    pub safe_horizons: BTreeSet<Horizon>,
    /// Set when every far subset was occupied and the turn-around was used.
    pub fallback: bool,
}

impl<T: Real> SubsetReport<T> {
    /// Emptiness of `o{k}` for `k` in `1..=7`; unchecked subsets read as
    /// non-empty.
    pub fn is_empty(&self, k: usize) -> bool {
        self.subsets[k - 1].is_empty()
    }

    pub fn o7_assumed(&self) -> bool {
        self.subsets[6] == Occupancy::AssumedEmpty
    }

    /// The report of the mirrored cloud: left and right swapped.
    pub fn mirrored(&self) -> Self {
        let s = &self.subsets;
        Self {
            disturbance: self.disturbance.mirrored(),
            subsets: [s[1], s[0], s[3], s[2], s[5], s[4], s[6]],
            d_plus: self.d_minus.map(|o| o.mirrored()),
            d_minus: self.d_plus.map(|o| o.mirrored()),
            offsets: self.offsets.mirrored(),
            tier: self.tier,
            safe_horizons: self.safe_horizons.iter().map(|h| h.mirrored()).collect(),
            fallback: self.fallback,
        }
    }
}

/// Shifted coordinates within this distance of a bound count as lying on it,
/// so a bound hit exactly in real arithmetic is not lost to rounding of the
/// offsets.
pub fn boundary_tolerance<T: Real>() -> T {
    T::lit(1e-9).max(T::epsilon() * T::lit(64.0))
}

fn within<T: Real>(value: T, bound: T) -> bool {
    value <= bound + boundary_tolerance::<T>()
}

fn beyond<T: Real>(value: T, bound: T) -> bool {
    value > bound + boundary_tolerance::<T>()
}

/// `D_x - d_safe`, or zero when the disturbance is already inside the safe zone.
pub fn longitudinal_offset<T: Real>(d: &Disturbance<T>, p: &AbstractionParams<T>) -> T {
    if d.x <= p.d_safe {
        T::zero()
    } else {
        d.x - p.d_safe
    }
}

/// Lateral strips `(o1, o2)` beside the robot after shifting by `dx`.
pub fn classify_near<T: Real>(
    cloud: &PointCloud<T>,
    dx: T,
    p: &AbstractionParams<T>,
) -> (Vec<Observation<T>>, Vec<Observation<T>>) {
    let extent = p.lateral_extent();
    let mut o1 = Vec::new();
    let mut o2 = Vec::new();
    for o in cloud.iter() {
        if beyond((o.x - dx).abs(), p.d_safe) {
            continue;
        }
        if o.y > T::zero() && o.y < extent {
            o1.push(*o);
        } else if o.y < T::zero() && o.y > -extent {
            o2.push(*o);
        }
    }
    (o1, o2)
}

/// Nearest lateral disturbances `D+` (from `o1`) and `D-` (from `o2`) by
/// `|y|`; ties keep the first observation in scan order.
pub fn nearest_lateral<T: Real>(
    o1: &[Observation<T>],
    o2: &[Observation<T>],
) -> (Option<Observation<T>>, Option<Observation<T>>) {
    fn nearest<T: Real>(set: &[Observation<T>]) -> Option<Observation<T>> {
        set.iter().copied().fold(None, |best: Option<Observation<T>>, o| match best {
            Some(b) if b.y.abs() <= o.y.abs() => Some(b),
            _ => Some(o),
        })
    }
    (nearest(o1), nearest(o2))
}

/// `(D+_y - d_safe, D-_y + d_safe)` wrapped with the longitudinal offset `dx`.
pub fn lateral_offsets<T: Real>(
    dx: T,
    d_plus: &Observation<T>,
    d_minus: &Observation<T>,
    p: &AbstractionParams<T>,
) -> Offsets<T> {
    Offsets { dx, dy_plus: Some(d_plus.y - p.d_safe), dy_minus: Some(d_minus.y + p.d_safe) }
}

/// Far boxes `(front, behind)` of the robot displaced by `(dx, dy)`.
///
/// With `dy = dy_plus` this is `(o3, o5)`, with `dy = dy_minus` `(o4, o6)`.
pub fn classify_far<T: Real>(
    cloud: &PointCloud<T>,
    dx: T,
    dy: T,
    p: &AbstractionParams<T>,
) -> (Vec<Observation<T>>, Vec<Observation<T>>) {
    let reach = p.beta * p.d_safe;
    let half = p.half_width();
    let mut front = Vec::new();
    let mut behind = Vec::new();
    for o in cloud.iter() {
        let x = o.x - dx;
        let y = o.y - dy;
        if beyond(y.abs(), half) {
            continue;
        }
        if beyond(x, p.d_safe) && within(x, reach) {
            front.push(*o);
        } else if beyond(-x, p.d_safe) && within(-x, reach) {
            behind.push(*o);
        }
    }
    (front, behind)
}

/// Runs the tiered model update for the disturbance `d` sensed in `cloud`.
pub fn update_model<T: Real>(cloud: &PointCloud<T>, d: &Disturbance<T>, p: &AbstractionParams<T>) -> SubsetReport<T> {
    let dx = longitudinal_offset(d, p);
    let (o1, o2) = classify_near(cloud, dx, p);
    let mut subsets = [Occupancy::Unchecked; 7];
    subsets[0] = Occupancy::of(o1.len());
    subsets[1] = Occupancy::of(o2.len());
    let (d_plus, d_minus) = nearest_lateral(&o1, &o2);
    let mut report = SubsetReport {
        disturbance: *d,
        subsets,
        d_plus,
        d_minus,
        offsets: Offsets { dx, dy_plus: None, dy_minus: None },
        tier: Tier::OneStep,
        safe_horizons: BTreeSet::new(),
        fallback: false,
    };

    let (plus, minus) = match (d_plus, d_minus) {
        (Some(plus), Some(minus)) => (plus, minus),
        _ => {
            if o1.is_empty() {
                report.safe_horizons.insert(Horizon::S3);
            }
            if o2.is_empty() {
                report.safe_horizons.insert(Horizon::S4);
            }
            return report;
        }
    };

    let plus_open = plus.y.abs() > p.d_min;
    let minus_open = minus.y.abs() > p.d_min;
    if !plus_open && !minus_open {
        return turn_around(report, false);
    }

    // only an open side is ever travelled, so only its offset is kept
    let offsets = lateral_offsets(dx, &plus, &minus, p);
    report.offsets = Offsets {
        dx,
        dy_plus: offsets.dy_plus.filter(|_| plus_open),
        dy_minus: offsets.dy_minus.filter(|_| minus_open),
    };
    report.tier = Tier::ThreeStep;
    if plus_open {
        let dy = report.offsets.dy_plus.expect("set above");
        let (o3, o5) = classify_far(cloud, dx, dy, p);
        report.subsets[2] = Occupancy::of(o3.len());
        report.subsets[4] = Occupancy::of(o5.len());
        if o3.is_empty() {
            report.safe_horizons.insert(Horizon::S7);
        }
        if o5.is_empty() {
            report.safe_horizons.insert(Horizon::S11);
        }
    }
    if minus_open {
        let dy = report.offsets.dy_minus.expect("set above");
        let (o4, o6) = classify_far(cloud, dx, dy, p);
        report.subsets[3] = Occupancy::of(o4.len());
        report.subsets[5] = Occupancy::of(o6.len());
        if o4.is_empty() {
            report.safe_horizons.insert(Horizon::S8);
        }
        if o6.is_empty() {
            report.safe_horizons.insert(Horizon::S12);
        }
    }
    if report.safe_horizons.is_empty() {
        return turn_around(report, true);
    }
    report
}

fn turn_around<T: Real>(mut report: SubsetReport<T>, fallback: bool) -> SubsetReport<T> {
    report.tier = Tier::TwoStep;
    report.subsets[6] = Occupancy::AssumedEmpty;
    report.safe_horizons = BTreeSet::from([Horizon::S14]);
    report.fallback = fallback;
    if fallback {
        log::debug!("all far subsets occupied; falling back to turn-around");
    }
    report
}

/// One structured debug line per planning event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanningRecord {
    pub plan_id: u64,
    pub tick: u64,
    pub cloud_size: usize,
    pub disturbance: [f64; 2],
    pub dx: f64,
    pub dy_plus: Option<f64>,
    pub dy_minus: Option<f64>,
    /// Cardinalities of `o1`..`o7`; `null` for unchecked or assumed subsets.
    pub subset_sizes: [Option<usize>; 7],
    pub o7_assumed: bool,
    pub tier: Tier,
    pub safe_horizons: Vec<Horizon>,
    pub elapsed_us: f64,
}

impl PlanningRecord {
    pub fn new<T: Real>(
        plan_id: u64,
        tick: u64,
        cloud: &PointCloud<T>,
        report: &SubsetReport<T>,
        elapsed_us: f64,
    ) -> Self {
        Self {
            plan_id,
            tick,
            cloud_size: cloud.len(),
            disturbance: [report.disturbance.x.as_f64(), report.disturbance.y.as_f64()],
            dx: report.offsets.dx.as_f64(),
            dy_plus: report.offsets.dy_plus.map(Real::as_f64),
            dy_minus: report.offsets.dy_minus.map(Real::as_f64),
            subset_sizes: report.subsets.map(Occupancy::count),
            o7_assumed: report.o7_assumed(),
            tier: report.tier,
            safe_horizons: report.safe_horizons.iter().copied().collect(),
            elapsed_us,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn params() -> AbstractionParams<f64> {
        AbstractionParams::default()
    }

    fn cloud(points: &[(f64, f64)]) -> PointCloud<f64> {
        PointCloud::new(points.iter().map(|&(x, y)| Observation::new(x, y)).collect(), 0.0)
    }

    #[test]
    fn longitudinal_offset_examples() {
        let p = params();
        assert_relative_eq!(longitudinal_offset(&Disturbance::new(1.0, 0.0), &p), 0.7, epsilon = 1e-12);
        assert_eq!(longitudinal_offset(&Disturbance::new(0.3, 0.0), &p), 0.0);
        assert_eq!(longitudinal_offset(&Disturbance::new(0.1, 0.0), &p), 0.0);
    }

    #[test]
    fn classify_near_examples() {
        let p = params();
        let c = cloud(&[(1.2, 0.1)]);
        let dx = longitudinal_offset(&Disturbance::new(1.2, 0.1), &p);
        assert_relative_eq!(dx, 0.9, epsilon = 1e-12);
        let (o1, o2) = classify_near(&c, dx, &p);
        assert_eq!(o1, vec![Observation::new(1.2, 0.1)]);
        assert!(o2.is_empty());

        let (o1, o2) = classify_near(&cloud(&[]), 0.0, &p);
        assert!(o1.is_empty() && o2.is_empty());

        let (o1, o2) = classify_near(&cloud(&[(0.1, 0.0)]), 0.0, &p);
        assert!(o1.is_empty() && o2.is_empty());
    }

    #[test]
    fn classify_near_respects_strict_lateral_bound() {
        let p = params();
        let (o1, o2) = classify_near(&cloud(&[(0.0, 1.3), (0.0, -1.3), (0.0, 1.29)]), 0.0, &p);
        assert_eq!(o1, vec![Observation::new(0.0, 1.29)]);
        assert!(o2.is_empty());
    }

    #[test]
    fn nearest_lateral_examples() {
        let o1 = vec![Observation::new(0.1, 0.9), Observation::new(0.2, 0.6)];
        let (dp, dm) = nearest_lateral(&o1, &[]);
        assert_eq!(dp, Some(Observation::new(0.2, 0.6)));
        assert_eq!(dm, None);
        let (dp, _) = nearest_lateral::<f64>(&[], &[]);
        assert_eq!(dp, None);
        let tie = vec![Observation::new(0.1, 0.5), Observation::new(0.2, 0.5)];
        assert_eq!(nearest_lateral(&tie, &[]).0, Some(Observation::new(0.1, 0.5)));
        let neg = vec![Observation::new(0.0, -0.9), Observation::new(0.0, -0.7)];
        assert_eq!(nearest_lateral(&[], &neg).1, Some(Observation::new(0.0, -0.7)));
    }

    #[test]
    fn lateral_offset_examples() {
        let p = params();
        let o = lateral_offsets(0.0, &Observation::new(0.0, 0.9), &Observation::new(0.0, -0.7), &p);
        assert_relative_eq!(o.dy_plus.unwrap(), 0.6, epsilon = 1e-12);
        assert_relative_eq!(o.dy_minus.unwrap(), -0.4, epsilon = 1e-12);
        let o = lateral_offsets(0.0, &Observation::new(0.0, 0.3), &Observation::new(0.0, -0.3), &p);
        assert_eq!(o.dy_plus.unwrap(), 0.0);
        assert_eq!(o.dy_minus.unwrap(), 0.0);
    }

    #[test]
    fn classify_far_examples() {
        let p = params();
        // offsets of zero make the transformed point equal the raw point
        let (front, behind) = classify_far(&cloud(&[(0.5, 0.05)]), 0.0, 0.0, &p);
        assert_eq!(front.len(), 1);
        assert!(behind.is_empty());
        let (front, behind) = classify_far(&cloud(&[(0.3, 0.0)]), 0.0, 0.0, &p);
        assert!(front.is_empty() && behind.is_empty());
        let (front, behind) = classify_far(&cloud(&[(-0.5, 0.2)]), 0.0, 0.0, &p);
        assert!(front.is_empty() && behind.is_empty());
        let (_, behind) = classify_far(&cloud(&[(-0.5, 0.1)]), 0.0, 0.0, &p);
        assert_eq!(behind.len(), 1);
        // shifted: observation (1.5, 0.65) with dx = 1.0, dy = 0.6 -> (0.5, 0.05)
        let (front, _) = classify_far(&cloud(&[(1.5, 0.65)]), 1.0, 0.6, &p);
        assert_eq!(front.len(), 1);
    }

    #[test]
    fn one_step_when_both_strips_clear() {
        let p = params();
        let c = cloud(&[(0.6, 0.0), (3.0, 3.0)]);
        let r = update_model(&c, &Disturbance::new(0.6, 0.0), &p);
        assert_eq!(r.tier, Tier::OneStep);
        assert_eq!(r.safe_horizons, BTreeSet::from([Horizon::S3, Horizon::S4]));
        assert_eq!(r.subsets[2], Occupancy::Unchecked);
    }

    #[test]
    fn one_step_single_side() {
        let p = params();
        let c = cloud(&[(0.6, 0.0), (0.3, 0.8)]);
        let r = update_model(&c, &Disturbance::new(0.6, 0.0), &p);
        assert_eq!(r.tier, Tier::OneStep);
        assert_eq!(r.safe_horizons, BTreeSet::from([Horizon::S4]));
        assert!(r.d_plus.is_some() && r.d_minus.is_none());
    }

    #[test]
    fn boxed_in_turns_around() {
        let p = params();
        let c = cloud(&[(0.6, 0.0), (0.5, 0.4), (0.5, -0.45)]);
        let r = update_model(&c, &Disturbance::new(0.6, 0.0), &p);
        assert_eq!(r.tier, Tier::TwoStep);
        assert_eq!(r.safe_horizons, BTreeSet::from([Horizon::S14]));
        assert!(r.o7_assumed() && !r.fallback);
    }

    #[test]
    fn three_step_cul_de_sac_pattern() {
        // Walls at +0.8 and -0.8 beside the displaced robot; the left far
        // boxes are blocked, the right ones are clear.
        let p = params();
        let c = cloud(&[(0.6, 0.0), (0.4, 0.8), (0.4, -0.8), (0.9, 0.5), (-0.3, 0.5)]);
        let r = update_model(&c, &Disturbance::new(0.6, 0.0), &p);
        assert_eq!(r.tier, Tier::ThreeStep);
        assert_relative_eq!(r.offsets.dy_plus.unwrap(), 0.5, epsilon = 1e-12);
        assert!(!r.is_empty(3) && !r.is_empty(5));
        assert!(r.is_empty(4) && r.is_empty(6));
        assert_eq!(r.safe_horizons, BTreeSet::from([Horizon::S8, Horizon::S12]));
    }

    #[test]
    fn one_open_side_excludes_the_other() {
        let p = params();
        let c = cloud(&[(0.6, 0.02), (0.4, -0.8)]);
        let r = update_model(&c, &Disturbance::new(0.6, 0.02), &p);
        assert_eq!(r.tier, Tier::ThreeStep);
        assert_eq!(r.subsets[2], Occupancy::Unchecked);
        assert_eq!(r.safe_horizons, BTreeSet::from([Horizon::S8, Horizon::S12]));
    }

    #[test]
    fn all_far_boxes_blocked_falls_back() {
        let p = params();
        let c = cloud(&[(0.4, 0.8), (0.4, -0.8), (0.9, 0.5), (-0.3, 0.5), (0.9, -0.5), (-0.3, -0.5)]);
        let r = update_model(&c, &Disturbance::new(0.6, 0.0), &p);
        assert_eq!(r.tier, Tier::TwoStep);
        assert!(r.fallback);
        assert_eq!(r.safe_horizons, BTreeSet::from([Horizon::S14]));
    }

    #[test]
    fn record_serializes_as_single_line() {
        let p = params();
        let c = cloud(&[(0.6, 0.0), (0.5, 0.4), (0.5, -0.45)]);
        let r = update_model(&c, &Disturbance::new(0.6, 0.0), &p);
        let line = PlanningRecord::new(1, 10, &c, &r, 12.5).to_json_line();
        assert!(!line.contains('\n'));
        let v: serde_json::Value = serde_json::from_str(&line).unwrap();
        assert_eq!(v["tier"], "TwoStep");
        assert_eq!(v["safe_horizons"][0], "s14");
        assert_eq!(v["subset_sizes"][6], serde_json::Value::Null);
    }

    #[test]
    fn generic_over_f32() {
        let p = AbstractionParams::<f32>::default();
        let c = PointCloud::new(
            vec![Observation::new(0.6f32, 0.0), Observation::new(0.5, 0.4), Observation::new(0.5, -0.45)],
            0.0,
        );
        let r = update_model(&c, &Disturbance::new(0.6, 0.0), &p);
        assert_eq!(r.tier, Tier::TwoStep);
    }

    fn arb_cloud() -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 0..60)
    }

    fn all_subsets(
        c: &PointCloud<f64>,
        dx: f64,
        dyp: f64,
        dym: f64,
        p: &AbstractionParams<f64>,
    ) -> Vec<Vec<Observation<f64>>> {
        let (o1, o2) = classify_near(c, dx, p);
        let (o3, o5) = classify_far(c, dx, dyp, p);
        let (o4, o6) = classify_far(c, dx, dym, p);
        vec![o1, o2, o3, o4, o5, o6]
    }

    proptest! {
        // open sides have |D_y| > d_min, so their lateral offsets are at
        // least d_min - d_safe from the axis
        #[test]
        fn subsets_pairwise_disjoint(points in arb_cloud(), dx in 0.0f64..1.0, dyp in 0.2f64..1.0, dym in -1.0f64..-0.2) {
            let p = params();
            let c = cloud(&points);
            let sets = all_subsets(&c, dx, dyp, dym, &p);
            for o in c.iter() {
                let hits = sets.iter().filter(|s| s.contains(o)).count();
                prop_assert!(hits <= 1, "{:?} in {} subsets", o, hits);
            }
        }

        #[test]
        fn mirror_symmetry(points in arb_cloud(), dx in 0.0f64..0.7, dy in -0.12f64..0.12) {
            let p = params();
            let mut c = cloud(&points);
            let d = Disturbance::new(dx, dy);
            c.observations.push(Observation::new(d.x, d.y));
            let r = update_model(&c, &d, &p);
            let m = update_model(&crate::geometry::mirror_cloud(&c), &d.mirrored(), &p);
            prop_assert_eq!(m, r.mirrored());
        }

        #[test]
        fn more_points_never_unlock_one_step(points in arb_cloud(), extra in arb_cloud(), dx in 0.0f64..0.7) {
            let p = params();
            let d = Disturbance::new(dx, 0.0);
            let c = cloud(&points);
            let mut bigger = c.clone();
            bigger.observations.extend(extra.iter().map(|&(x, y)| Observation::new(x, y)));
            let before = update_model(&c, &d, &p).tier;
            let after = update_model(&bigger, &d, &p).tier;
            if before != Tier::OneStep {
                prop_assert_ne!(after, Tier::OneStep);
            }
        }

        #[test]
        fn report_invariants(points in arb_cloud(), dx in 0.0f64..0.7, dy in -0.12f64..0.12) {
            let p = params();
            let d = Disturbance::new(dx, dy);
            let r = update_model(&cloud(&points), &d, &p);
            prop_assert!(!r.safe_horizons.is_empty());
            prop_assert_eq!(r.d_plus.is_some(), !r.is_empty(1));
            prop_assert_eq!(r.d_minus.is_some(), !r.is_empty(2));
            let allowed: BTreeSet<Horizon> = match r.tier {
                Tier::OneStep => [Horizon::S3, Horizon::S4].into(),
                Tier::TwoStep => [Horizon::S14].into(),
                Tier::ThreeStep => [Horizon::S7, Horizon::S8, Horizon::S11, Horizon::S12].into(),
            };
            prop_assert!(r.safe_horizons.is_subset(&allowed));
            if r.tier == Tier::TwoStep {
                prop_assert_eq!(r.safe_horizons.len(), 1);
            }
            prop_assert!(r.offsets.dx >= 0.0);
        }
    }
}
