//! Simple-motion attainability: the set a robot with bounded speed can reach
//! within time `t` is the closed disc of radius `speed * t`. The decision tree
//! for one step is a uniform angular subdivision of that disc's boundary,
//! minus every sample that falls inside an obstacle sweep.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::geometry::{distance, Capsule, Point2, SpatialHashGrid};

/// Angular resolution used by the sampled axiom checks.
pub const AXIOM_ANGULAR_SAMPLES: usize = 720;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttainabilitySpec {
    max_speed: f64,
}

impl AttainabilitySpec {
    pub fn new(max_speed: f64) -> Result<Self> {
        if !(max_speed > 0.0) || !max_speed.is_finite() {
            return Err(Error::param(
                "max_speed",
                format!("must be finite and > 0, got {max_speed}"),
            ));
        }
        Ok(Self { max_speed })
    }

    pub fn max_speed(&self) -> f64 {
        self.max_speed
    }
}

/// Uniformly subdivided boundary of a reachable disc. Sample `k` sits at
/// angle `k * delta_alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReachableBoundary {
    pub center: Point2,
    pub radius: f64,
    pub samples: Vec<Point2>,
}

pub fn reach_set_radius(spec: &AttainabilitySpec, dt: f64) -> Result<f64> {
    if !(dt >= 0.0) || !dt.is_finite() {
        return Err(Error::param("dt", format!("must be finite and >= 0, got {dt}")));
    }
    Ok(spec.max_speed * dt)
}

/// `floor(2π / delta_alpha) + 1`. The sample at angle `2π` is kept even when it
/// duplicates the sample at angle 0.
pub fn branch_count(delta_alpha: f64) -> Result<usize> {
    validate_delta_alpha(delta_alpha)?;
    // The nudge keeps exact divisors such as 2π/3 from rounding down.
    Ok((TAU / delta_alpha + 1e-9).floor() as usize + 1)
}

fn validate_delta_alpha(delta_alpha: f64) -> Result<()> {
    if !(delta_alpha > 0.0) || delta_alpha > TAU + 1e-12 {
        return Err(Error::param(
            "delta_alpha",
            format!("must lie in (0, 2π], got {delta_alpha}"),
        ));
    }
    Ok(())
}

/// Unit directions of the decision tree branches, index `k` at `k * delta_alpha`.
pub fn branch_directions(delta_alpha: f64) -> Result<Vec<Point2>> {
    let count = branch_count(delta_alpha)?;
    Ok((0..count)
        .map(|k| Point2::polar(1.0, k as f64 * delta_alpha))
        .collect())
}

pub fn subdivide_boundary(
    center: Point2,
    spec: &AttainabilitySpec,
    dt: f64,
    delta_alpha: f64,
) -> Result<ReachableBoundary> {
    let radius = reach_set_radius(spec, dt)?;
    let samples = branch_directions(delta_alpha)?
        .into_iter()
        .map(|dir| center + dir * radius)
        .collect();
    Ok(ReachableBoundary {
        center,
        radius,
        samples,
    })
}

/// Boundary samples (with their branch indices) lying in no obstacle capsule.
///
/// With a grid, only the broad-phase candidates of each sample are tested
/// exactly; the result is identical to the exhaustive scan.
pub fn feasible_candidates(
    boundary: &ReachableBoundary,
    obstacles: &[Capsule],
    grid: Option<&SpatialHashGrid>,
) -> Vec<(usize, Point2)> {
    boundary
        .samples
        .iter()
        .copied()
        .enumerate()
        .filter(|&(_, p)| is_free(p, obstacles, grid))
        .collect()
}

/// True when `p` lies in none of the capsules.
pub fn is_free(p: Point2, obstacles: &[Capsule], grid: Option<&SpatialHashGrid>) -> bool {
    match grid {
        Some(grid) => grid.query(p).iter().all(|&i| !obstacles[i].contains(p)),
        None => obstacles.iter().all(|c| !c.contains(p)),
    }
}

/// Hausdorff distance between two closed discs.
pub fn disc_hausdorff(c1: Point2, r1: f64, c2: Point2, r2: f64) -> f64 {
    distance(c1, c2) + (r1 - r2).abs()
}

/// Brute-force Hausdorff distance between two finite point sets.
pub fn hausdorff_distance(a: &[Point2], b: &[Point2]) -> f64 {
    fn directed(from: &[Point2], to: &[Point2]) -> f64 {
        from.iter()
            .map(|&p| to.iter().map(|&q| distance(p, q)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    }
    if a.is_empty() || b.is_empty() {
        return if a.is_empty() && b.is_empty() { 0.0 } else { f64::INFINITY };
    }
    directed(a, b).max(directed(b, a))
}

/// Sampled check of the semigroup property for the disc system: the disc of
/// radius `v t2` about `x0` must coincide with the union of discs of radius
/// `v (t2 - t1)` centered on the points of the disc of radius `v t1`.
///
/// The inner disc is represented by rings of [`AXIOM_ANGULAR_SAMPLES`] points
/// (plus its center); the outer disc is probed on the same angular grid.
pub fn check_semigroup(
    spec: &AttainabilitySpec,
    x0: Point2,
    t1: f64,
    t2: f64,
    tol: f64,
) -> Result<bool> {
    if !(t1 >= 0.0) || !(t2 >= t1) {
        return Err(Error::param(
            "t1",
            format!("need 0 <= t1 <= t2, got t1 = {t1}, t2 = {t2}"),
        ));
    }
    Ok(semigroup_gap(spec, x0, t1, t2, AXIOM_ANGULAR_SAMPLES) <= tol)
}

/// Estimated Hausdorff distance between both sides of the semigroup identity.
pub fn semigroup_gap(spec: &AttainabilitySpec, x0: Point2, t1: f64, t2: f64, angular: usize) -> f64 {
    const RINGS: [f64; 3] = [1.0, 2.0 / 3.0, 1.0 / 3.0];
    let v = spec.max_speed;
    let inner = v * t1;
    let outer = v * t2;
    let hop = v * (t2 - t1);
    let directions: Vec<Point2> = (0..angular)
        .map(|k| Point2::polar(1.0, k as f64 * TAU / angular as f64))
        .collect();

    let mut centers = vec![x0];
    for scale in RINGS {
        centers.extend(directions.iter().map(|&d| x0 + d * (inner * scale)));
    }

    // Union -> outer disc: the farthest point of each hop disc from x0.
    let excess = centers
        .iter()
        .map(|&c| (distance(c, x0) + hop - outer).max(0.0))
        .fold(0.0, f64::max);

    // Outer disc -> union, probed on the boundary and at the center.
    let probes = directions.iter().map(|&d| x0 + d * outer).chain([x0]);
    let shortfall = probes
        .map(|b| {
            let nearest = centers
                .iter()
                .map(|&c| distance(b, c))
                .fold(f64::INFINITY, f64::min);
            (nearest - hop).max(0.0)
        })
        .fold(0.0, f64::max);

    excess.max(shortfall)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn spec(v: f64) -> AttainabilitySpec {
        AttainabilitySpec::new(v).unwrap()
    }

    #[test]
    fn reach_radius_examples() {
        assert!((reach_set_radius(&spec(10.0), 0.2).unwrap() - 2.0).abs() < 1e-12);
        assert!((reach_set_radius(&spec(8.0), 0.2).unwrap() - 1.6).abs() < 1e-12);
        assert_eq!(reach_set_radius(&spec(3.7), 0.0).unwrap(), 0.0);
        assert!(reach_set_radius(&spec(1.0), -0.1).is_err());
    }

    #[test]
    fn spec_rejects_nonpositive_speed() {
        assert!(AttainabilitySpec::new(0.0).is_err());
        assert!(AttainabilitySpec::new(-1.0).is_err());
        assert!(AttainabilitySpec::new(f64::INFINITY).is_err());
    }

    #[test]
    fn branch_count_for_default_step() {
        assert_eq!(branch_count(0.2).unwrap(), 32);
        let b = subdivide_boundary(Point2::ORIGIN, &spec(10.0), 0.2, 0.2).unwrap();
        assert_eq!(b.samples.len(), 32);
    }

    #[test]
    fn quarter_turn_subdivision() {
        let b = subdivide_boundary(Point2::ORIGIN, &spec(1.0), 1.0, FRAC_PI_2).unwrap();
        assert_eq!(b.samples.len(), 5);
        let expected = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0), (1.0, 0.0)];
        for (s, (x, y)) in b.samples.iter().zip(expected) {
            assert!((s.x - x).abs() < 1e-12 && (s.y - y).abs() < 1e-12, "{s:?}");
        }
    }

    #[test]
    fn zero_time_collapses_to_center() {
        let c = Point2::new(1.5, -2.0);
        let b = subdivide_boundary(c, &spec(8.0), 0.0, 0.2).unwrap();
        assert!(b.samples.iter().all(|&s| s == c));
    }

    #[test]
    fn delta_alpha_bounds() {
        assert!(branch_count(0.0).is_err());
        assert!(branch_count(-0.1).is_err());
        assert!(branch_count(TAU + 0.1).is_err());
        assert_eq!(branch_count(TAU).unwrap(), 2);
        assert_eq!(branch_count(TAU / 3.0).unwrap(), 4);
        assert_eq!(branch_count(PI).unwrap(), 3);
    }

    #[test]
    fn samples_lie_on_circle_in_angle_order() {
        let c = Point2::new(3.0, 4.0);
        let b = subdivide_boundary(c, &spec(2.5), 0.7, 0.3).unwrap();
        for (k, s) in b.samples.iter().enumerate() {
            assert!((distance(*s, c) - b.radius).abs() < 1e-9);
            let angle = (s.y - c.y).atan2(s.x - c.x).rem_euclid(TAU);
            let expected = (k as f64 * 0.3).rem_euclid(TAU);
            let diff = (angle - expected).abs();
            assert!(diff < 1e-9 || (TAU - diff) < 1e-9);
        }
    }

    #[test]
    fn semigroup_examples() {
        let s = spec(1.0);
        assert!(check_semigroup(&s, Point2::ORIGIN, 1.0, 2.0, 1e-6).unwrap());
        assert!(check_semigroup(&s, Point2::new(2.0, -1.0), 1.3, 1.3, 1e-6).unwrap());
        assert!(check_semigroup(&s, Point2::ORIGIN, 0.0, 1.0, 1e-6).unwrap());
        assert!(check_semigroup(&s, Point2::ORIGIN, 2.0, 1.0, 1e-6).is_err());
    }

    #[test]
    fn semigroup_gap_vanishes_on_the_probe_grid() {
        let s = spec(1.0);
        assert!(semigroup_gap(&s, Point2::ORIGIN, 1.0, 1.5, 720) < 1e-9);
        assert!(semigroup_gap(&s, Point2::ORIGIN, 1.0, 1.0, 720) < 1e-12);
        assert!(semigroup_gap(&s, Point2::new(-3.0, 2.0), 0.4, 2.0, 7) < 1e-9);
    }

    #[test]
    fn feasible_without_obstacles_keeps_everything() {
        let b = subdivide_boundary(Point2::ORIGIN, &spec(10.0), 0.2, 0.2).unwrap();
        let kept = feasible_candidates(&b, &[], None);
        assert_eq!(kept.len(), 32);
        assert!(kept.iter().enumerate().all(|(i, &(k, _))| i == k));
    }

    #[test]
    fn feasible_total_blockage() {
        let b = subdivide_boundary(Point2::ORIGIN, &spec(1.0), 1.0, 0.2).unwrap();
        let wall = Capsule::disc(Point2::ORIGIN, 1.5).unwrap();
        assert!(feasible_candidates(&b, &[wall], None).is_empty());
    }

    #[test]
    fn feasible_is_order_preserving_subset() {
        let b = subdivide_boundary(Point2::ORIGIN, &spec(1.0), 1.0, 0.2).unwrap();
        let blocker = Capsule::disc(Point2::new(1.0, 0.0), 0.5).unwrap();
        let kept = feasible_candidates(&b, &[blocker], None);
        assert!(kept.len() < 32 && !kept.is_empty());
        assert!(kept.windows(2).all(|w| w[0].0 < w[1].0));
        for (k, p) in kept {
            assert_eq!(b.samples[k], p);
            assert!(!blocker.contains(p));
        }
    }

    #[test]
    fn hausdorff_of_point_sets() {
        let a = [Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)];
        let b = [Point2::new(0.0, 0.0)];
        assert_eq!(hausdorff_distance(&a, &b), 1.0);
        assert_eq!(hausdorff_distance(&a, &a), 0.0);
        assert_eq!(disc_hausdorff(Point2::ORIGIN, 1.0, Point2::new(3.0, 4.0), 2.0), 6.0);
    }
}
