use crate::dynamics::{feasible_candidates, is_free, subdivide_boundary, AttainabilitySpec};
use crate::error::{Error, Result, Robot};
use crate::geometry::{distance, min_distance_between_moving_points, Capsule, Point2, SpatialHashGrid};

use super::PayoffKind;

/// Decision tree branch chosen by one robot for one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    /// Boundary sample `k`, at angle `k * delta_alpha`.
    Boundary(usize),
    /// Fallback when every boundary sample is blocked.
    StayPut,
}

/// One robot's options for a step after obstacle pruning.
#[derive(Debug, Clone, PartialEq)]
pub struct Options {
    pub candidates: Vec<(Branch, Point2)>,
    /// Boundary samples removed because they fell inside an obstacle sweep.
    pub pruned: usize,
}

/// Feasible branches for `robot` at `position`, with the stay-put fallback.
pub fn robot_options(
    robot: Robot,
    position: Point2,
    spec: &AttainabilitySpec,
    dt: f64,
    delta_alpha: f64,
    obstacles: &[Capsule],
    grid: Option<&SpatialHashGrid>,
) -> Result<Options> {
    let boundary = subdivide_boundary(position, spec, dt, delta_alpha)?;
    let total = boundary.samples.len();
    let kept = feasible_candidates(&boundary, obstacles, grid);
    let pruned = total - kept.len();
    if !kept.is_empty() {
        return Ok(Options {
            candidates: kept.into_iter().map(|(k, p)| (Branch::Boundary(k), p)).collect(),
            pruned,
        });
    }
    if is_free(position, obstacles, grid) {
        Ok(Options {
            candidates: vec![(Branch::StayPut, position)],
            pruned,
        })
    } else {
        Err(Error::RobotTrapped { robot })
    }
}

/// Everything one receding-horizon step needs.
#[derive(Debug, Clone, Copy)]
pub struct StepProblem<'a> {
    pub pursuer: Point2,
    pub evader: Point2,
    pub pursuer_spec: AttainabilitySpec,
    pub evader_spec: AttainabilitySpec,
    pub dt: f64,
    pub delta_alpha: f64,
    pub payoff: PayoffKind,
    /// Obstacle sweeps over `[t, t + dt]`.
    pub obstacles: &'a [Capsule],
    pub grid: Option<&'a SpatialHashGrid>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDecision {
    pub pursuer_branch: Branch,
    pub evader_branch: Branch,
    pub pursuer_target: Point2,
    pub evader_target: Point2,
    /// Surrogate payoff of the chosen pair.
    pub value: f64,
    pub pursuer_pruned: usize,
    pub evader_pruned: usize,
}

/// One-step surrogate: endpoint distance, or the exact minimum along the two
/// step segments when scoring capture time.
pub(crate) fn step_score(kind: PayoffKind, x1: Point2, p: Point2, x2: Point2, e: Point2) -> f64 {
    match kind {
        PayoffKind::Terminal | PayoffKind::MinOverTime => distance(p, e),
        PayoffKind::CaptureTime { .. } => min_distance_between_moving_points(x1, p, x2, e),
    }
}

/// Min-max selection over both decision trees: the evader best-responds to
/// every pursuer branch, the pursuer takes the branch whose best response is
/// smallest. Ties go to the lowest branch index on both sides.
pub fn step_minimax(problem: &StepProblem<'_>) -> Result<StepDecision> {
    let pursuer = robot_options(
        Robot::Pursuer,
        problem.pursuer,
        &problem.pursuer_spec,
        problem.dt,
        problem.delta_alpha,
        problem.obstacles,
        problem.grid,
    )?;
    let evader = robot_options(
        Robot::Evader,
        problem.evader,
        &problem.evader_spec,
        problem.dt,
        problem.delta_alpha,
        problem.obstacles,
        problem.grid,
    )?;

    let score = |p: Point2, e: Point2| step_score(problem.payoff, problem.pursuer, p, problem.evader, e);

    // (pursuer index, evader index, value)
    let mut best: Option<(usize, usize, f64)> = None;
    for (i, &(_, p)) in pursuer.candidates.iter().enumerate() {
        let bound = best.map_or(f64::INFINITY, |b| b.2);
        let mut reply: Option<(usize, f64)> = None;
        for (j, &(_, e)) in evader.candidates.iter().enumerate() {
            let v = score(p, e);
            if reply.is_none_or(|(_, rv)| v > rv) {
                reply = Some((j, v));
                // Cannot beat the incumbent strictly; later ties lose anyway.
                if v >= bound {
                    break;
                }
            }
        }
        let (j, v) = reply.expect("option lists are never empty");
        if v < bound {
            best = Some((i, j, v));
        }
    }
    let (i, j, value) = best.expect("option lists are never empty");
    let (pursuer_branch, pursuer_target) = pursuer.candidates[i];
    let (evader_branch, evader_target) = evader.candidates[j];
    Ok(StepDecision {
        pursuer_branch,
        evader_branch,
        pursuer_target,
        evader_target,
        value,
        pursuer_pruned: pursuer.pruned,
        evader_pruned: evader.pruned,
    })
}
