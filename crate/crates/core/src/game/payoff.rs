use crate::error::{Error, Result};
use crate::geometry::{closest_approach_parameter, distance, min_distance_between_moving_points, Point2};

/// How a realized pair of trajectories is scored. The evader maximizes, the
/// pursuer minimizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PayoffKind {
    /// Inter-robot distance at the final instant.
    Terminal,
    /// Smallest inter-robot distance over the whole horizon.
    MinOverTime,
    /// First instant at which the robots are within `alpha` of each other,
    /// `+∞` if that never happens.
    CaptureTime { alpha: f64 },
}

impl PayoffKind {
    pub fn capture_time(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::param("alpha", format!("must be finite and > 0, got {alpha}")));
        }
        Ok(PayoffKind::CaptureTime { alpha })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            PayoffKind::CaptureTime { alpha } => Self::capture_time(alpha).map(|_| ()),
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PayoffKind::Terminal => "terminal",
            PayoffKind::MinOverTime => "min_over_time",
            PayoffKind::CaptureTime { .. } => "capture_time",
        }
    }
}

/// Earliest parameter `s ∈ [0, 1]` at which two linearly moving points come
/// within `alpha` of each other.
pub fn capture_parameter(p0: Point2, p1: Point2, q0: Point2, q1: Point2, alpha: f64) -> Option<f64> {
    let d0 = q0 - p0;
    if d0.norm() <= alpha {
        return Some(0.0);
    }
    let s_min = closest_approach_parameter(p0, p1, q0, q1);
    if distance(p0.lerp(p1, s_min), q0.lerp(q1, s_min)) > alpha {
        return None;
    }
    // |d0 + s dv|² = alpha² has a root in (0, s_min]; take the smaller one.
    let dv = (q1 - q0) - (p1 - p0);
    let a = dv.norm_squared();
    let b = d0.dot(dv);
    let c = d0.norm_squared() - alpha * alpha;
    let disc = (b * b - a * c).max(0.0);
    let s = (-b - disc.sqrt()) / a;
    Some(s.clamp(0.0, s_min))
}

/// Scores trajectories sampled at common partition instants; consecutive
/// samples are joined by straight segments.
pub fn payoff_between(
    kind: PayoffKind,
    times: &[f64],
    pursuer: &[Point2],
    evader: &[Point2],
) -> Result<f64> {
    if times.is_empty() || pursuer.len() != times.len() || evader.len() != times.len() {
        return Err(Error::InvalidInput(format!(
            "trajectories must share a nonempty partition: {} instants, {} pursuer and {} evader points",
            times.len(),
            pursuer.len(),
            evader.len()
        )));
    }
    if times.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::InvalidInput("partition instants must be nondecreasing".into()));
    }
    let last = times.len() - 1;
    Ok(match kind {
        PayoffKind::Terminal => distance(pursuer[last], evader[last]),
        PayoffKind::MinOverTime => {
            let first = distance(pursuer[0], evader[0]);
            (0..last)
                .map(|i| min_distance_between_moving_points(pursuer[i], pursuer[i + 1], evader[i], evader[i + 1]))
                .fold(first, f64::min)
        }
        PayoffKind::CaptureTime { alpha } => capture_time_of(alpha, times, pursuer, evader).unwrap_or(f64::INFINITY),
    })
}

pub(crate) fn capture_time_of(alpha: f64, times: &[f64], pursuer: &[Point2], evader: &[Point2]) -> Option<f64> {
    if distance(pursuer[0], evader[0]) <= alpha {
        return Some(times[0]);
    }
    (0..times.len() - 1).find_map(|i| {
        capture_parameter(pursuer[i], pursuer[i + 1], evader[i], evader[i + 1], alpha)
            .map(|s| times[i] + s * (times[i + 1] - times[i]))
    })
}
