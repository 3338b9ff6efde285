//! Planar primitives: points, segments, capsules, and a uniform spatial hash
//! used as the broad phase for obstacle queries.

use std::collections::HashMap;
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};

/// A position (or displacement) in the plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Unit-length direction at `angle` radians, scaled by `radius`.
    pub fn polar(radius: f64, angle: f64) -> Self {
        let (sin, cos) = angle.sin_cos();
        Self::new(radius * cos, radius * sin)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Linear interpolation, `s = 0` gives `self`, `s = 1` gives `other`.
    pub fn lerp(self, other: Point2, s: f64) -> Point2 {
        Point2::new(
            self.x + s * (other.x - self.x),
            self.y + s * (other.y - self.y),
        )
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, rhs: f64) -> Point2 {
        Point2::new(self.x * rhs, self.y * rhs)
    }
}

/// Straight segment between two points; `a == b` is allowed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: Point2,
    pub b: Point2,
}

impl Segment {
    pub const fn new(a: Point2, b: Point2) -> Self {
        Self { a, b }
    }

    pub fn is_degenerate(&self) -> bool {
        self.a == self.b
    }

    /// Closest point of the segment to `p`.
    pub fn closest_point(&self, p: Point2) -> Point2 {
        let ab = self.b - self.a;
        let len2 = ab.norm_squared();
        if len2 == 0.0 {
            return self.a;
        }
        let s = ((p - self.a).dot(ab) / len2).clamp(0.0, 1.0);
        self.a.lerp(self.b, s)
    }
}

/// The set of points within `radius` of a segment: the region swept by a
/// disc whose center travels along the axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Capsule {
    pub axis: Segment,
    pub radius: f64,
}

impl Capsule {
    pub fn new(axis: Segment, radius: f64) -> Result<Self> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::param("radius", format!("must be finite and >= 0, got {radius}")));
        }
        Ok(Self { axis, radius })
    }

    /// Stationary disc.
    pub fn disc(center: Point2, radius: f64) -> Result<Self> {
        Self::new(Segment::new(center, center), radius)
    }

    pub fn contains(&self, p: Point2) -> bool {
        point_in_capsule(p, self)
    }

    /// Axis-aligned bounding box `(min, max)` inflated by the radius.
    pub fn bounding_box(&self) -> (Point2, Point2) {
        let Segment { a, b } = self.axis;
        let r = self.radius;
        (
            Point2::new(a.x.min(b.x) - r, a.y.min(b.y) - r),
            Point2::new(a.x.max(b.x) + r, a.y.max(b.y) + r),
        )
    }
}

pub fn distance(p: Point2, q: Point2) -> f64 {
    (p - q).norm()
}

pub fn point_segment_distance(p: Point2, s: &Segment) -> f64 {
    distance(p, s.closest_point(p))
}

/// Closed containment: grazing contact counts.
pub fn point_in_capsule(p: Point2, c: &Capsule) -> bool {
    point_segment_distance(p, &c.axis) <= c.radius
}

/// Minimum separation of two points moving linearly over a common unit
/// parameter, `p0 -> p1` and `q0 -> q1`.
pub fn min_distance_between_moving_points(p0: Point2, p1: Point2, q0: Point2, q1: Point2) -> f64 {
    let s = closest_approach_parameter(p0, p1, q0, q1);
    distance(p0.lerp(p1, s), q0.lerp(q1, s))
}

/// Parameter in `[0, 1]` at which the separation `|d0 + s dv|` is minimal.
pub(crate) fn closest_approach_parameter(p0: Point2, p1: Point2, q0: Point2, q1: Point2) -> f64 {
    let d0 = q0 - p0;
    let dv = (q1 - q0) - (p1 - p0);
    let vv = dv.norm_squared();
    if vv == 0.0 {
        return 0.0;
    }
    (-d0.dot(dv) / vv).clamp(0.0, 1.0)
}

/// Uniform grid over the plane; each capsule is registered in every cell its
/// inflated bounding box overlaps. Immutable once built.
#[derive(Debug, Clone)]
pub struct SpatialHashGrid {
    cell_size: f64,
    cells: HashMap<(i64, i64), Vec<usize>>,
}

impl SpatialHashGrid {
    pub fn build(capsules: &[Capsule], cell_size: f64) -> Result<Self> {
        Self::build_impl(capsules, cell_size, None)
    }

    /// Like [`build`](Self::build), but only registers cells overlapping the
    /// box `region`. Queries are exact for points inside that box and may
    /// miss capsules elsewhere.
    pub fn build_within(capsules: &[Capsule], cell_size: f64, region: (Point2, Point2)) -> Result<Self> {
        Self::build_impl(capsules, cell_size, Some(region))
    }

    fn build_impl(capsules: &[Capsule], cell_size: f64, region: Option<(Point2, Point2)>) -> Result<Self> {
        if !(cell_size > 0.0) || !cell_size.is_finite() {
            return Err(Error::param(
                "cell_size",
                format!("must be finite and > 0, got {cell_size}"),
            ));
        }
        let (clip_lo, clip_hi) = match region {
            Some((lo, hi)) => (cell_of(lo, cell_size), cell_of(hi, cell_size)),
            None => ((i64::MIN, i64::MIN), (i64::MAX, i64::MAX)),
        };
        let mut cells: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (index, capsule) in capsules.iter().enumerate() {
            let (lo, hi) = capsule.bounding_box();
            let (x0, y0) = cell_of(lo, cell_size);
            let (x1, y1) = cell_of(hi, cell_size);
            let (x0, y0) = (x0.max(clip_lo.0), y0.max(clip_lo.1));
            let (x1, y1) = (x1.min(clip_hi.0), y1.min(clip_hi.1));
            for cx in x0..=x1 {
                for cy in y0..=y1 {
                    cells.entry((cx, cy)).or_default().push(index);
                }
            }
        }
        Ok(Self { cell_size, cells })
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Integer coordinates of the cell containing `p`.
    pub fn cell_coords(&self, p: Point2) -> (i64, i64) {
        cell_of(p, self.cell_size)
    }

    /// Obstacle indices registered in the given cell, ascending.
    pub fn cell(&self, coords: (i64, i64)) -> &[usize] {
        self.cells.get(&coords).map_or(&[], Vec::as_slice)
    }

    /// Broad-phase candidates for `p`: sorted, deduplicated, and a superset of
    /// the capsules that contain `p`.
    pub fn query(&self, p: Point2) -> &[usize] {
        // Indices are pushed in increasing order and at most once per cell.
        self.cell(self.cell_coords(p))
    }

    pub fn occupied_cells(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.cells.keys().copied()
    }
}

fn cell_of(p: Point2, cell_size: f64) -> (i64, i64) {
    (
        (p.x / cell_size).floor() as i64,
        (p.y / cell_size).floor() as i64,
    )
}

pub fn grid_build(capsules: &[Capsule], cell_size: f64) -> Result<SpatialHashGrid> {
    SpatialHashGrid::build(capsules, cell_size)
}

pub fn grid_query(grid: &SpatialHashGrid, p: Point2) -> Vec<usize> {
    grid.query(p).to_vec()
}
