// Independent oracles shared by the integration tests and the acceptance
// harness. Nothing here calls into the code under test except to build
// inputs.
#![allow(dead_code)]

use std::collections::BTreeSet;

use insitu_core::abstraction::{boundary_tolerance, Horizon};
use insitu_core::geometry::{Disturbance, Observation, PointCloud};
use insitu_core::planner::{Task, TaskTransitionSystem, HORIZON, SAFE};
use insitu_core::AbstractionParams;
use rand::Rng;

/// One axis of a box. `slack` widens closed ends and narrows open ends.
#[derive(Debug, Clone, Copy)]
pub struct Interval {
    pub lo: f64,
    pub lo_closed: bool,
    pub hi: f64,
    pub hi_closed: bool,
    pub slack: f64,
}

impl Interval {
    pub fn closed(lo: f64, hi: f64, slack: f64) -> Self {
        Self { lo, lo_closed: true, hi, hi_closed: true, slack }
    }

    pub fn contains(&self, v: f64) -> bool {
        let above = if self.lo_closed { v >= self.lo - self.slack } else { v > self.lo + self.slack };
        let below = if self.hi_closed { v <= self.hi + self.slack } else { v < self.hi - self.slack };
        above && below
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Rect {
    pub x: Interval,
    pub y: Interval,
}

impl Rect {
    pub fn contains(&self, o: &Observation<f64>) -> bool {
        self.x.contains(o.x) && self.y.contains(o.y)
    }

    pub fn select(&self, cloud: &PointCloud<f64>) -> Vec<Observation<f64>> {
        cloud.iter().filter(|o| self.contains(o)).copied().collect()
    }
}

/// Subsets `o1..o6` computed from boxes in the unshifted robot frame.
/// `None` marks a subset the tiering never reaches.
#[derive(Debug, Clone, Default)]
pub struct OracleReport {
    pub subsets: [Option<Vec<Observation<f64>>>; 6],
    pub d_plus: Option<Observation<f64>>,
    pub d_minus: Option<Observation<f64>>,
    pub safe: BTreeSet<Horizon>,
}

pub fn near_boxes(d: &Disturbance<f64>, p: &AbstractionParams) -> (Rect, Rect) {
    let tol = boundary_tolerance::<f64>();
    let dx = (d.x - p.d_safe).max(0.0);
    let x = Interval::closed(dx - p.d_safe, dx + p.d_safe, tol);
    let ext = p.d_max + p.d_safe;
    let left = Interval { lo: 0.0, lo_closed: false, hi: ext, hi_closed: false, slack: 0.0 };
    let right = Interval { lo: -ext, lo_closed: false, hi: 0.0, hi_closed: false, slack: 0.0 };
    (Rect { x, y: left }, Rect { x, y: right })
}

/// `(front, behind)` boxes of the robot displaced sideways by `dy`.
pub fn far_boxes(d: &Disturbance<f64>, dy: f64, p: &AbstractionParams) -> (Rect, Rect) {
    let tol = boundary_tolerance::<f64>();
    let dx = (d.x - p.d_safe).max(0.0);
    let reach = p.beta * p.d_safe;
    let h = p.corridor_width / 2.0;
    let y = Interval::closed(dy - h, dy + h, tol);
    let front = Interval { lo: dx + p.d_safe, lo_closed: false, hi: dx + reach, hi_closed: true, slack: tol };
    let behind = Interval { lo: dx - reach, lo_closed: true, hi: dx - p.d_safe, hi_closed: false, slack: tol };
    (Rect { x: front, y }, Rect { x: behind, y })
}

fn nearest(set: &[Observation<f64>]) -> Option<Observation<f64>> {
    let mut best: Option<Observation<f64>> = None;
    for o in set {
        if best.is_none_or(|b| o.y.abs() < b.y.abs()) {
            best = Some(*o);
        }
    }
    best
}

pub fn oracle_update(cloud: &PointCloud<f64>, d: &Disturbance<f64>, p: &AbstractionParams) -> OracleReport {
    let mut r = OracleReport::default();
    let (b1, b2) = near_boxes(d, p);
    let (o1, o2) = (b1.select(cloud), b2.select(cloud));
    r.d_plus = nearest(&o1);
    r.d_minus = nearest(&o2);
    let (e1, e2) = (o1.is_empty(), o2.is_empty());
    r.subsets[0] = Some(o1);
    r.subsets[1] = Some(o2);
    if e1 || e2 {
        if e1 {
            r.safe.insert(Horizon::S3);
        }
        if e2 {
            r.safe.insert(Horizon::S4);
        }
        return r;
    }
    let (dp, dm) = (r.d_plus.unwrap(), r.d_minus.unwrap());
    let (plus_open, minus_open) = (dp.y.abs() > p.d_min, dm.y.abs() > p.d_min);
    if plus_open {
        let (front, behind) = far_boxes(d, dp.y - p.d_safe, p);
        let (o3, o5) = (front.select(cloud), behind.select(cloud));
        if o3.is_empty() {
            r.safe.insert(Horizon::S7);
        }
        if o5.is_empty() {
            r.safe.insert(Horizon::S11);
        }
        r.subsets[2] = Some(o3);
        r.subsets[4] = Some(o5);
    }
    if minus_open {
        let (front, behind) = far_boxes(d, dm.y + p.d_safe, p);
        let (o4, o6) = (front.select(cloud), behind.select(cloud));
        if o4.is_empty() {
            r.safe.insert(Horizon::S8);
        }
        if o6.is_empty() {
            r.safe.insert(Horizon::S12);
        }
        r.subsets[3] = Some(o4);
        r.subsets[5] = Some(o6);
    }
    if r.safe.is_empty() {
        r.safe.insert(Horizon::S14);
    }
    r
}

/// A random scan with a disturbance inside the sensing corridor. Half the
/// clouds get wall-like point rows so every tier shows up.
pub fn random_scan<R: Rng>(rng: &mut R, p: &AbstractionParams) -> (PointCloud<f64>, Disturbance<f64>) {
    let h = p.corridor_width / 2.0;
    let mut pts = Vec::new();
    let d = Observation::new(rng.random_range(0.05..p.v * p.t_look), rng.random_range(-h..=h));
    if rng.random_bool(0.5) {
        for _ in 0..rng.random_range(0..3) {
            let y = rng.random_range(-1.6..1.6);
            let (x0, x1) = (rng.random_range(-1.5..1.0), rng.random_range(1.0..3.0));
            let n = rng.random_range(2..25);
            for i in 0..n {
                pts.push(Observation::new(x0 + (x1 - x0) * i as f64 / n as f64, y + rng.random_range(-0.01..0.01)));
            }
        }
    }
    for _ in 0..rng.random_range(0..60) {
        pts.push(Observation::new(rng.random_range(-1.5..3.0), rng.random_range(-1.8..1.8)));
    }
    // the disturbance must be the nearest corridor point, so drop anything
    // that would beat it
    let reach = p.v * p.t_look;
    pts.retain(|o| !(o.x > 0.0 && o.x <= reach && o.y.abs() <= h && o.norm() <= d.norm()));
    let at = rng.random_range(0..=pts.len());
    pts.insert(at, d);
    (PointCloud::new(pts, 0.0), Disturbance::new(d.x, d.y))
}

/// Every task sequence of length at most `depth` from `s0` whose last
/// state is the first one labelled both safe and horizon.
pub fn enumerate_plans(safe: &BTreeSet<Horizon>, depth: usize) -> Vec<(Vec<Task>, usize)> {
    let model = TaskTransitionSystem::with_safe(safe);
    let ts = model.inner();
    let goal = |s: usize| ts.label(s).contains(SAFE) && ts.label(s).contains(HORIZON);
    let mut out = Vec::new();
    let mut frontier: Vec<(Vec<Task>, usize)> = ts.initial().iter().map(|&s| (Vec::new(), s)).collect();
    for _ in 0..=depth {
        let mut next = Vec::new();
        for (tasks, s) in frontier {
            if goal(s) {
                out.push((tasks, s));
                continue;
            }
            for &(a, t) in ts.successors(s) {
                let mut w = tasks.clone();
                w.push(a);
                next.push((w, t));
            }
        }
        frontier = next;
    }
    out
}

pub fn mirrored_tasks(tasks: &[Task]) -> Vec<Task> {
    tasks.iter().map(|t| t.mirrored()).collect()
}
