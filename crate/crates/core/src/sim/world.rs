use serde::{Deserialize, Serialize};

use super::SimError;
use crate::geometry::Point;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment<T> {
    pub a: Point<T>,
    pub b: Point<T>,
}

impl<T: Real> Segment<T> {
    pub fn new(a: Point<T>, b: Point<T>) -> Self {
        Self { a, b }
    }

    pub fn length(&self) -> T {
        self.a.distance(&self.b)
    }

    /// Euclidean distance from `p` to the closest point of the segment.
    pub fn distance_to(&self, p: Point<T>) -> T {
        let ex = self.b.x - self.a.x;
        let ey = self.b.y - self.a.y;
        let len2 = ex * ex + ey * ey;
        let t = (((p.x - self.a.x) * ex + (p.y - self.a.y) * ey) / len2).max(T::zero()).min(T::one());
        let cx = self.a.x + t * ex;
        let cy = self.a.y + t * ey;
        (p.x - cx).hypot(p.y - cy)
    }

    /// Distance along the ray `origin + t * dir` to the segment, if hit.
    /// Rays parallel to the segment never hit it.
    pub fn ray_hit(&self, origin: Point<T>, dir: (T, T)) -> Option<T> {
        let ex = self.b.x - self.a.x;
        let ey = self.b.y - self.a.y;
        let denom = dir.0 * ey - dir.1 * ex;
        if denom.abs() <= T::epsilon() * self.length() {
            return None;
        }
        let wx = self.a.x - origin.x;
        let wy = self.a.y - origin.y;
        let t = (wx * ey - wy * ex) / denom;
        let s = (wx * dir.1 - wy * dir.0) / denom;
        if t > T::zero() && s >= T::zero() && s <= T::one() {
            Some(t)
        } else {
            None
        }
    }
}

/// Axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds<T> {
    pub min: Point<T>,
    pub max: Point<T>,
}

impl<T: Real> Bounds<T> {
    pub fn contains(&self, p: Point<T>) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }
}

/// Static world made of line segments.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldMap<T> {
    segments: Vec<Segment<T>>,
    bounds: Bounds<T>,
}

impl<T: Real> WorldMap<T> {
    pub fn new(segments: Vec<Segment<T>>) -> Result<Self, SimError> {
        let mut min = Point::new(T::zero(), T::zero());
        let mut max = min;
        for (i, s) in segments.iter().enumerate() {
            for p in [s.a, s.b] {
                if !(p.x.is_finite() && p.y.is_finite()) {
                    return Err(SimError::InvalidSegment { index: i, reason: "non-finite coordinate" });
                }
            }
            if s.length() <= T::zero() {
                return Err(SimError::InvalidSegment { index: i, reason: "zero length" });
            }
            if i == 0 {
                min = Point::new(s.a.x.min(s.b.x), s.a.y.min(s.b.y));
                max = Point::new(s.a.x.max(s.b.x), s.a.y.max(s.b.y));
            }
            min = Point::new(min.x.min(s.a.x).min(s.b.x), min.y.min(s.a.y).min(s.b.y));
            max = Point::new(max.x.max(s.a.x).max(s.b.x), max.y.max(s.a.y).max(s.b.y));
        }
        Ok(Self { segments, bounds: Bounds { min, max } })
    }

    pub fn empty() -> Self {
        let o = Point::new(T::zero(), T::zero());
        Self { segments: Vec::new(), bounds: Bounds { min: o, max: o } }
    }

    pub fn segments(&self) -> &[Segment<T>] {
        &self.segments
    }

    pub fn bounds(&self) -> Bounds<T> {
        self.bounds
    }

    /// Distance from `p` to the nearest segment; infinite for an empty world.
    pub fn clearance(&self, p: Point<T>) -> T {
        self.segments.iter().map(|s| s.distance_to(p)).fold(T::infinity(), T::min)
    }

    /// Nearest hit along a ray, if any.
    pub fn cast(&self, origin: Point<T>, dir: (T, T)) -> Option<T> {
        self.segments.iter().filter_map(|s| s.ray_hit(origin, dir)).fold(None, |best, t| match best {
            Some(b) if b <= t => Some(b),
            _ => Some(t),
        })
    }
}
