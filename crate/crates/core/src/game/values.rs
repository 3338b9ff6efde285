//! Exact values of the discretized alternating games on the binary partition
//! of `[0, T]` into `2^n` equal steps.
//!
//! * upper game: each step the pursuer commits first and the evader answers
//!   knowing the pursuer's move;
//! * lower game: the evader commits first;
//! * truncated upper game: the upper game in which the evader does not move
//!   on the last step.
//!
//! Values are computed by depth-first min-max with alpha-beta cutoffs, which
//! returns the exact root value whatever the move ordering. Without
//! obstacles and with terminal payoff the search also cuts on admissible
//! distance bounds (see [`DistanceBounds`]). Every visited node counts
//! against a node budget.

use std::f64::consts::TAU;

use crate::dynamics::{branch_count, branch_directions, AttainabilitySpec};
use crate::error::{Error, Result, Robot};
use crate::geometry::{distance, min_distance_between_moving_points, Capsule, Point2};
use crate::obstacles::ObstacleField;

use super::payoff::{capture_parameter, PayoffKind};

pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;

/// Who commits first within every step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InformationOrder {
    Upper,
    Lower,
    TruncatedUpper,
}

/// A finite alternating game on a binary partition.
#[derive(Debug, Clone)]
pub struct DiscreteGame<'a> {
    pub pursuer_spec: AttainabilitySpec,
    pub evader_spec: AttainabilitySpec,
    pub field: &'a ObstacleField,
    pub horizon: f64,
    /// Partition level `n`: `2^n` steps of length `horizon / 2^n`.
    pub level: u32,
    pub delta_alpha: f64,
    pub payoff: PayoffKind,
    pub node_budget: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GameValueReport {
    pub upper_value: f64,
    pub lower_value: f64,
    pub partition_level: u32,
    pub branch_factor: usize,
    /// Nodes visited by both searches together.
    pub nodes: u64,
}

impl GameValueReport {
    pub fn gap(&self) -> f64 {
        gap(self.upper_value, self.lower_value)
    }
}

fn gap(upper: f64, lower: f64) -> f64 {
    if upper == lower {
        0.0
    } else {
        upper - lower
    }
}

impl<'a> DiscreteGame<'a> {
    pub fn new(
        pursuer_spec: AttainabilitySpec,
        evader_spec: AttainabilitySpec,
        field: &'a ObstacleField,
        horizon: f64,
        level: u32,
        delta_alpha: f64,
        payoff: PayoffKind,
    ) -> Self {
        Self {
            pursuer_spec,
            evader_spec,
            field,
            horizon,
            level,
            delta_alpha,
            payoff,
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }

    pub fn with_node_budget(mut self, budget: u64) -> Self {
        self.node_budget = budget;
        self
    }

    pub fn steps(&self) -> usize {
        1usize << self.level
    }

    pub fn upper_value(&self, pursuer: Point2, evader: Point2) -> Result<f64> {
        self.value(InformationOrder::Upper, pursuer, evader).map(|(v, _)| v)
    }

    pub fn lower_value(&self, pursuer: Point2, evader: Point2) -> Result<f64> {
        self.value(InformationOrder::Lower, pursuer, evader).map(|(v, _)| v)
    }

    pub fn truncated_upper_value(&self, pursuer: Point2, evader: Point2) -> Result<f64> {
        self.value(InformationOrder::TruncatedUpper, pursuer, evader)
            .map(|(v, _)| v)
    }

    pub fn report(&self, pursuer: Point2, evader: Point2) -> Result<GameValueReport> {
        let (upper_value, upper_nodes) = self.value(InformationOrder::Upper, pursuer, evader)?;
        let (lower_value, lower_nodes) = self.value(InformationOrder::Lower, pursuer, evader)?;
        Ok(GameValueReport {
            upper_value,
            lower_value,
            partition_level: self.level,
            branch_factor: branch_count(self.delta_alpha)?,
            nodes: upper_nodes + lower_nodes,
        })
    }

    /// Game value and the number of nodes visited.
    pub fn value(&self, order: InformationOrder, pursuer: Point2, evader: Point2) -> Result<(f64, u64)> {
        self.validate()?;
        if !pursuer.is_finite() || !evader.is_finite() {
            return Err(Error::InvalidInput("start positions must be finite".into()));
        }
        let mut search = Search::new(self, order)?;
        let value = search.root(pursuer, evader)?;
        Ok((value, search.nodes))
    }

    fn validate(&self) -> Result<()> {
        if !(self.horizon >= 0.0) || !self.horizon.is_finite() {
            return Err(Error::param("horizon", format!("must be finite and >= 0, got {}", self.horizon)));
        }
        if self.level > 20 {
            return Err(Error::param("level", format!("{} is beyond any feasible search", self.level)));
        }
        branch_count(self.delta_alpha)?;
        self.payoff.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mover {
    Pursuer,
    Evader,
}

/// Admissible bounds on the terminal distance for the obstacle-free game.
///
/// With step lengths `a1` (pursuer) and `a2` (evader) and candidate
/// directions no more than `δ` from any heading:
/// * a pursuer move changes the distance `d` to at least `d - a1` and, aiming
///   at the evader, to at most `max(a1, sqrt(d² - 2 a1 d cos δ + a1²))`;
/// * an evader move changes `d` to at most `d + a2` and, fleeing, to at
///   least `d + a2 cos δ`.
///
/// All maps are nondecreasing in `d`, so folding them over the remaining moves
/// bounds the value of any node.
#[derive(Debug, Clone, Copy)]
struct DistanceBounds {
    a1: f64,
    a2: f64,
    cos_half_gap: f64,
}

impl DistanceBounds {
    const SLACK: f64 = 1e-9;

    fn lower(&self, d: f64, moves: &[Mover]) -> f64 {
        let d = moves.iter().fold(d, |d, m| match m {
            Mover::Pursuer => d - self.a1,
            Mover::Evader => d + self.a2 * self.cos_half_gap,
        });
        d.max(0.0) - Self::SLACK
    }

    fn upper(&self, d: f64, moves: &[Mover]) -> f64 {
        moves.iter().fold(d, |d, m| match m {
            Mover::Pursuer => {
                let aimed = (d * d - 2.0 * self.a1 * d * self.cos_half_gap + self.a1 * self.a1).max(0.0).sqrt();
                aimed.max(self.a1)
            }
            Mover::Evader => d + self.a2,
        }) + Self::SLACK
    }
}

/// Running payoff state along a branch.
#[derive(Debug, Clone, Copy)]
enum Running {
    Terminal,
    Min(f64),
    Capture(f64),
}

struct Search {
    order: InformationOrder,
    payoff: PayoffKind,
    steps: usize,
    step_len: f64,
    pursuer_offsets: Vec<Point2>,
    evader_offsets: Vec<Point2>,
    capsules: Vec<Vec<Capsule>>,
    /// Moves in play order, one entry per ply.
    plies: Vec<Mover>,
    bounds: Option<DistanceBounds>,
    budget: u64,
    nodes: u64,
    /// Per-ply scratch for ordered candidate lists.
    scratch: Vec<Vec<(f64, Point2)>>,
}

impl Search {
    fn new(game: &DiscreteGame<'_>, order: InformationOrder) -> Result<Self> {
        let steps = game.steps();
        let step_len = game.horizon / steps as f64;
        let directions = branch_directions(game.delta_alpha)?;
        let a1 = game.pursuer_spec.max_speed() * step_len;
        let a2 = game.evader_spec.max_speed() * step_len;
        let capsules = (0..steps)
            .map(|k| game.field.sweeps(k as f64 * step_len, (k + 1) as f64 * step_len))
            .collect::<Result<Vec<_>>>()?;

        let mut plies = Vec::with_capacity(2 * steps);
        for k in 0..steps {
            match order {
                InformationOrder::Upper => plies.extend([Mover::Pursuer, Mover::Evader]),
                InformationOrder::Lower => plies.extend([Mover::Evader, Mover::Pursuer]),
                InformationOrder::TruncatedUpper => {
                    plies.push(Mover::Pursuer);
                    if k + 1 < steps {
                        plies.push(Mover::Evader);
                    }
                }
            }
        }

        let bounds = (game.field.is_empty() && game.payoff == PayoffKind::Terminal).then(|| {
            // Widest angular gap between consecutive branches, wrap-around included.
            let last = (directions.len() - 1) as f64 * game.delta_alpha;
            let widest = game.delta_alpha.max(TAU - last);
            DistanceBounds {
                a1,
                a2,
                cos_half_gap: (widest / 2.0).cos(),
            }
        });

        Ok(Self {
            order,
            payoff: game.payoff,
            steps,
            step_len,
            pursuer_offsets: directions.iter().map(|&d| d * a1).collect(),
            evader_offsets: directions.iter().map(|&d| d * a2).collect(),
            capsules,
            scratch: vec![Vec::new(); plies.len()],
            plies,
            bounds,
            budget: game.node_budget,
            nodes: 0,
        })
    }

    fn root(&mut self, pursuer: Point2, evader: Point2) -> Result<f64> {
        let d0 = distance(pursuer, evader);
        let running = match self.payoff {
            PayoffKind::Terminal => Running::Terminal,
            PayoffKind::MinOverTime => Running::Min(d0),
            PayoffKind::CaptureTime { alpha } => {
                if d0 <= alpha {
                    return Ok(0.0);
                }
                Running::Capture(alpha)
            }
        };
        if self.step_len == 0.0 {
            return Ok(leaf(running, pursuer, evader));
        }
        self.step_node(0, pursuer, evader, running, f64::NEG_INFINITY, f64::INFINITY)
    }

    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::NodeBudgetExceeded { budget: self.budget });
        }
        Ok(())
    }

    /// Start of step `k` with both robots at rest.
    fn step_node(&mut self, k: usize, x1: Point2, x2: Point2, running: Running, alpha: f64, beta: f64) -> Result<f64> {
        if k == self.steps {
            return Ok(leaf(running, x1, x2));
        }
        let ply = self.ply_of_step(k);
        match self.plies[ply] {
            Mover::Pursuer => self.pursuer_move(ply, k, x1, x2, None, running, alpha, beta),
            Mover::Evader => self.evader_move(ply, k, x1, x2, None, running, alpha, beta),
        }
    }

    fn ply_of_step(&self, k: usize) -> usize {
        2 * k
    }

    fn bound_cut(&self, ply: usize, separation: f64, alpha: f64, beta: f64) -> Option<f64> {
        let bounds = self.bounds?;
        let rest = &self.plies[ply..];
        let lo = bounds.lower(separation, rest);
        if lo >= beta {
            return Some(lo);
        }
        let hi = bounds.upper(separation, rest);
        if hi <= alpha {
            return Some(hi);
        }
        None
    }

    /// Pursuer chooses; `evader_target` is set when the evader already moved
    /// this step.
    #[allow(clippy::too_many_arguments)]
    fn pursuer_move(
        &mut self,
        ply: usize,
        k: usize,
        x1: Point2,
        x2: Point2,
        evader_target: Option<Point2>,
        running: Running,
        alpha: f64,
        mut beta: f64,
    ) -> Result<f64> {
        self.tick()?;
        let evader_now = evader_target.unwrap_or(x2);
        if let Some(v) = self.bound_cut(ply, distance(x1, evader_now), alpha, beta) {
            return Ok(v);
        }
        let mut options = std::mem::take(&mut self.scratch[ply]);
        self.fill_options(&mut options, Robot::Pursuer, x1, k, |p| distance(p, evader_now))?;
        options.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut best = f64::INFINITY;
        let mut outcome = Ok(());
        for &(_, p) in options.iter() {
            let v = match evader_target {
                Some(e) => self.finish_step(k, x1, p, x2, e, running, alpha, beta),
                None if self.evader_frozen(k) => self.finish_step(k, x1, p, x2, x2, running, alpha, beta),
                None => self.evader_move(ply + 1, k, x1, x2, Some(p), running, alpha, beta),
            };
            let v = match v {
                Ok(v) => v,
                Err(e) => {
                    outcome = Err(e);
                    break;
                }
            };
            best = best.min(v);
            beta = beta.min(v);
            if best <= alpha {
                break;
            }
        }
        self.scratch[ply] = options;
        outcome.map(|_| best)
    }

    #[allow(clippy::too_many_arguments)]
    fn evader_move(
        &mut self,
        ply: usize,
        k: usize,
        x1: Point2,
        x2: Point2,
        pursuer_target: Option<Point2>,
        running: Running,
        mut alpha: f64,
        beta: f64,
    ) -> Result<f64> {
        self.tick()?;
        let pursuer_now = pursuer_target.unwrap_or(x1);
        if let Some(v) = self.bound_cut(ply, distance(pursuer_now, x2), alpha, beta) {
            return Ok(v);
        }
        let mut options = std::mem::take(&mut self.scratch[ply]);
        self.fill_options(&mut options, Robot::Evader, x2, k, |e| distance(pursuer_now, e))?;
        options.sort_by(|a, b| b.0.total_cmp(&a.0));

        let mut best = f64::NEG_INFINITY;
        let mut outcome = Ok(());
        for &(_, e) in options.iter() {
            let v = match pursuer_target {
                Some(p) => self.finish_step(k, x1, p, x2, e, running, alpha, beta),
                None => self.pursuer_move(ply + 1, k, x1, x2, Some(e), running, alpha, beta),
            };
            let v = match v {
                Ok(v) => v,
                Err(e) => {
                    outcome = Err(e);
                    break;
                }
            };
            best = best.max(v);
            alpha = alpha.max(v);
            if best >= beta {
                break;
            }
        }
        self.scratch[ply] = options;
        outcome.map(|_| best)
    }

    /// Truncated games skip the evader's final move.
    fn evader_frozen(&self, k: usize) -> bool {
        self.order == InformationOrder::TruncatedUpper && k + 1 == self.steps
    }

    #[allow(clippy::too_many_arguments)]
    fn finish_step(
        &mut self,
        k: usize,
        x1: Point2,
        p: Point2,
        x2: Point2,
        e: Point2,
        running: Running,
        alpha: f64,
        beta: f64,
    ) -> Result<f64> {
        let running = match running {
            Running::Terminal => Running::Terminal,
            Running::Min(m) => Running::Min(m.min(min_distance_between_moving_points(x1, p, x2, e))),
            Running::Capture(a) => {
                if let Some(s) = capture_parameter(x1, p, x2, e, a) {
                    return Ok((k as f64 + s) * self.step_len);
                }
                Running::Capture(a)
            }
        };
        self.step_node(k + 1, p, e, running, alpha, beta)
    }

    /// Feasible targets with their ordering keys.
    fn fill_options(
        &self,
        out: &mut Vec<(f64, Point2)>,
        robot: Robot,
        from: Point2,
        k: usize,
        key: impl Fn(Point2) -> f64,
    ) -> Result<()> {
        out.clear();
        let offsets = match robot {
            Robot::Pursuer => &self.pursuer_offsets,
            Robot::Evader => &self.evader_offsets,
        };
        let capsules = &self.capsules[k];
        let free = |q: Point2| capsules.iter().all(|c| !c.contains(q));
        out.extend(offsets.iter().map(|&o| from + o).filter(|&q| free(q)).map(|q| (key(q), q)));
        if out.is_empty() {
            if free(from) {
                out.push((key(from), from));
            } else {
                return Err(Error::RobotTrapped { robot });
            }
        }
        Ok(())
    }
}

fn leaf(running: Running, x1: Point2, x2: Point2) -> f64 {
    match running {
        Running::Terminal => distance(x1, x2),
        Running::Min(m) => m,
        Running::Capture(_) => f64::INFINITY,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::obstacles::ObstacleTrack;

    fn game(field: &ObstacleField, horizon: f64, level: u32, delta_alpha: f64, payoff: PayoffKind) -> DiscreteGame<'_> {
        DiscreteGame::new(
            AttainabilitySpec::new(1.0).unwrap(),
            AttainabilitySpec::new(0.5).unwrap(),
            field,
            horizon,
            level,
            delta_alpha,
            payoff,
        )
    }

    const X1: Point2 = Point2 { x: 0.0, y: 0.0 };
    const X2: Point2 = Point2 { x: 4.0, y: 0.0 };

    #[test]
    fn single_step_value() {
        let f = ObstacleField::empty();
        let g = game(&f, 1.0, 0, 0.2, PayoffKind::Terminal);
        assert!((g.upper_value(X1, X2).unwrap() - 3.5).abs() < 1e-12);
        assert!(g.lower_value(X1, X2).unwrap() <= g.upper_value(X1, X2).unwrap());
    }

    #[test]
    fn zero_horizon_is_initial_distance() {
        let f = ObstacleField::empty();
        for payoff in [PayoffKind::Terminal, PayoffKind::MinOverTime] {
            for level in 0..3 {
                let g = game(&f, 0.0, level, 0.2, payoff);
                assert_eq!(g.upper_value(X1, X2).unwrap(), 4.0);
                assert_eq!(g.lower_value(X1, X2).unwrap(), 4.0);
                assert_eq!(g.truncated_upper_value(X1, X2).unwrap(), 4.0);
            }
        }
    }

    #[test]
    fn truncated_single_step_freezes_evader() {
        let f = ObstacleField::empty();
        let g = game(&f, 1.0, 0, 0.2, PayoffKind::Terminal);
        let expected = branch_directions(0.2)
            .unwrap()
            .iter()
            .map(|&d| distance(X1 + d, X2))
            .fold(f64::INFINITY, f64::min);
        assert_eq!(g.truncated_upper_value(X1, X2).unwrap(), expected);
    }

    #[test]
    fn capture_time_value() {
        let f = ObstacleField::empty();
        // Already captured.
        let g = game(&f, 1.0, 1, 0.8, PayoffKind::CaptureTime { alpha: 5.0 });
        assert_eq!(g.upper_value(X1, X2).unwrap(), 0.0);
        // Out of reach within the horizon.
        let g = game(&f, 1.0, 1, 0.8, PayoffKind::CaptureTime { alpha: 0.1 });
        assert_eq!(g.upper_value(X1, X2).unwrap(), f64::INFINITY);
    }

    #[test]
    fn node_budget_is_enforced() {
        let f = ObstacleField::empty();
        let g = game(&f, 2.0, 2, 0.8, PayoffKind::MinOverTime).with_node_budget(10);
        assert_eq!(g.upper_value(X1, X2), Err(Error::NodeBudgetExceeded { budget: 10 }));
    }

    #[test]
    fn rejects_bad_parameters() {
        let f = ObstacleField::empty();
        assert!(game(&f, -1.0, 0, 0.2, PayoffKind::Terminal).upper_value(X1, X2).is_err());
        assert!(game(&f, 1.0, 21, 0.2, PayoffKind::Terminal).upper_value(X1, X2).is_err());
        assert!(game(&f, 1.0, 0, 0.0, PayoffKind::Terminal).upper_value(X1, X2).is_err());
        let nan = Point2::new(f64::NAN, 0.0);
        assert!(game(&f, 1.0, 0, 0.2, PayoffKind::Terminal).upper_value(nan, X2).is_err());
    }

    #[test]
    fn trapped_robot_in_recursion() {
        let f = ObstacleField::new(vec![ObstacleTrack::stationary(Point2::new(4.0, 0.0), 2.0).unwrap()]);
        let g = game(&f, 1.0, 0, 0.2, PayoffKind::Terminal);
        assert_eq!(
            g.upper_value(X1, Point2::new(4.5, 0.0)),
            Err(Error::RobotTrapped { robot: Robot::Evader })
        );
    }

    #[test]
    fn report_counts_both_searches() {
        let f = ObstacleField::empty();
        let g = game(&f, 1.0, 1, 0.8, PayoffKind::Terminal);
        let r = g.report(X1, X2).unwrap();
        let (_, nu) = g.value(InformationOrder::Upper, X1, X2).unwrap();
        let (_, nl) = g.value(InformationOrder::Lower, X1, X2).unwrap();
        assert_eq!(r.nodes, nu + nl);
        assert_eq!(r.branch_factor, 8);
        assert_eq!(r.partition_level, 1);
        assert!(r.gap() >= -1e-9);
    }
}
