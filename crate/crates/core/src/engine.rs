//! Scenario orchestration: the receding-horizon loop over a uniform time
//! partition.

use std::f64::consts::TAU;

use crate::dynamics::AttainabilitySpec;
use crate::error::{Error, Result, Robot};
use crate::game::{capture_parameter, capture_time_of, payoff_between, step_minimax, PayoffKind, StepProblem};
use crate::geometry::{distance, Capsule, Point2, SpatialHashGrid};
use crate::obstacles::{FieldSweeper, ObstacleField};

/// Relative tolerance on `horizon / dt` being a whole number of steps.
const STEP_COUNT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub pursuer_start: Point2,
    pub evader_start: Point2,
    pub pursuer_speed: f64,
    pub evader_speed: f64,
    /// Simulated duration `T`, seconds. For capture runs, the time limit.
    pub horizon: f64,
    pub dt: f64,
    pub delta_alpha: f64,
    pub payoff: PayoffKind,
    pub obstacles: ObstacleField,
    pub seed: u64,
    pub use_spatial_hash: bool,
    /// Hash cell size; defaults to `2 (max obstacle radius + max step length)`.
    pub cell_size: Option<f64>,
}

impl Scenario {
    /// Obstacle-free scenario with terminal payoff and the spatial hash on.
    pub fn new(
        pursuer_start: Point2,
        evader_start: Point2,
        pursuer_speed: f64,
        evader_speed: f64,
        horizon: f64,
        dt: f64,
        delta_alpha: f64,
    ) -> Self {
        Self {
            pursuer_start,
            evader_start,
            pursuer_speed,
            evader_speed,
            horizon,
            dt,
            delta_alpha,
            payoff: PayoffKind::Terminal,
            obstacles: ObstacleField::empty(),
            seed: 0,
            use_spatial_hash: true,
            cell_size: None,
        }
    }

    pub fn with_payoff(mut self, payoff: PayoffKind) -> Self {
        self.payoff = payoff;
        self
    }

    pub fn with_obstacles(mut self, obstacles: ObstacleField) -> Self {
        self.obstacles = obstacles;
        self
    }

    pub fn with_spatial_hash(mut self, on: bool) -> Self {
        self.use_spatial_hash = on;
        self
    }

    /// `round(horizon / dt)`.
    pub fn step_count(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }

    pub fn pursuer_spec(&self) -> Result<AttainabilitySpec> {
        AttainabilitySpec::new(self.pursuer_speed)
    }

    pub fn evader_spec(&self) -> Result<AttainabilitySpec> {
        AttainabilitySpec::new(self.evader_speed)
    }

    pub fn default_cell_size(&self) -> f64 {
        let step = self.pursuer_speed.max(self.evader_speed) * self.dt;
        2.0 * (self.obstacles.max_radius() + step)
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if !self.pursuer_start.is_finite() {
            problems.push("pursuer start must be finite".to_string());
        }
        if !self.evader_start.is_finite() {
            problems.push("evader start must be finite".to_string());
        }
        for (name, v) in [("pursuer speed", self.pursuer_speed), ("evader speed", self.evader_speed)] {
            if !(v > 0.0) || !v.is_finite() {
                problems.push(format!("{name} must be finite and > 0, got {v}"));
            }
        }
        let horizon_ok = self.horizon > 0.0 && self.horizon.is_finite();
        if !horizon_ok {
            problems.push(format!("horizon must be finite and > 0, got {}", self.horizon));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            problems.push(format!("dt must be finite and > 0, got {}", self.dt));
        } else if horizon_ok {
            let ratio = self.horizon / self.dt;
            if self.dt > self.horizon {
                problems.push(format!("dt = {} exceeds horizon = {}", self.dt, self.horizon));
            } else if (ratio - ratio.round()).abs() > STEP_COUNT_TOLERANCE * ratio.round() {
                problems.push(format!(
                    "horizon / dt = {ratio} is not a whole number of steps"
                ));
            }
        }
        if !(self.delta_alpha > 0.0) || self.delta_alpha > TAU + 1e-12 {
            problems.push(format!("delta_alpha must lie in (0, 2π], got {}", self.delta_alpha));
        }
        if let Err(e) = self.payoff.validate() {
            problems.push(e.to_string());
        }
        if let Some(c) = self.cell_size {
            if !(c > 0.0) || !c.is_finite() {
                problems.push(format!("cell size must be finite and > 0, got {c}"));
            }
        }
        for (i, track) in self.obstacles.tracks.iter().enumerate() {
            let Ok(center) = track.center(0.0) else { continue };
            for (who, start) in [("pursuer", self.pursuer_start), ("evader", self.evader_start)] {
                if distance(center, start) <= track.radius() {
                    problems.push(format!("{who} starts inside obstacle {i}"));
                }
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidScenario(problems))
        }
    }
}

/// Realized trajectories and per-step diagnostics of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct GameRecord {
    pub times: Vec<f64>,
    pub pursuer_path: Vec<Point2>,
    pub evader_path: Vec<Point2>,
    /// Surrogate value chosen at each step.
    pub step_values: Vec<f64>,
    pub final_payoff: f64,
    pub capture_time: Option<f64>,
    /// Boundary branches removed by obstacles each step, (pursuer, evader).
    pub pruned_branch_counts: Vec<(usize, usize)>,
}

impl GameRecord {
    pub fn steps(&self) -> usize {
        self.step_values.len()
    }

    pub fn separations(&self) -> Vec<f64> {
        self.pursuer_path
            .iter()
            .zip(&self.evader_path)
            .map(|(&p, &e)| distance(p, e))
            .collect()
    }
}

/// Box around every disc, padded for rounding in the candidate positions.
fn reach_box(discs: &[(Point2, f64)]) -> (Point2, Point2) {
    let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &(c, r) in discs {
        let pad = r * (1.0 + 1e-6) + 1e-9 * (1.0 + c.x.abs().max(c.y.abs()));
        lo = Point2::new(lo.x.min(c.x - pad), lo.y.min(c.y - pad));
        hi = Point2::new(hi.x.max(c.x + pad), hi.y.max(c.y + pad));
    }
    (lo, hi)
}

struct Runner<'a> {
    scenario: &'a Scenario,
    pursuer_spec: AttainabilitySpec,
    evader_spec: AttainabilitySpec,
    cell_size: f64,
    record: GameRecord,
}

impl<'a> Runner<'a> {
    fn new(scenario: &'a Scenario) -> Result<Self> {
        scenario.validate()?;
        Ok(Self {
            scenario,
            pursuer_spec: scenario.pursuer_spec()?,
            evader_spec: scenario.evader_spec()?,
            cell_size: scenario.cell_size.unwrap_or_else(|| scenario.default_cell_size()),
            record: GameRecord {
                times: vec![0.0],
                pursuer_path: vec![scenario.pursuer_start],
                evader_path: vec![scenario.evader_start],
                step_values: Vec::new(),
                final_payoff: f64::NAN,
                capture_time: None,
                pruned_branch_counts: Vec::new(),
            },
        })
    }

    fn advance(&mut self, sweeper: &mut FieldSweeper<'_>, step: usize) -> Result<()> {
        let s = self.scenario;
        let t0 = step as f64 * s.dt;
        let t1 = (step + 1) as f64 * s.dt;
        let capsules = sweeper.sweeps(t0, t1)?;
        let pursuer = *self.record.pursuer_path.last().expect("path starts nonempty");
        let evader = *self.record.evader_path.last().expect("path starts nonempty");
        let grid = if s.use_spatial_hash && !capsules.is_empty() {
            let region = reach_box(&[(pursuer, s.pursuer_speed * s.dt), (evader, s.evader_speed * s.dt)]);
            Some(SpatialHashGrid::build_within(&capsules, self.cell_size, region)?)
        } else {
            None
        };
        let problem = StepProblem {
            pursuer,
            evader,
            pursuer_spec: self.pursuer_spec,
            evader_spec: self.evader_spec,
            dt: s.dt,
            delta_alpha: s.delta_alpha,
            payoff: s.payoff,
            obstacles: &capsules,
            grid: grid.as_ref(),
        };
        let decision = step_minimax(&problem).map_err(|e| match e {
            Error::RobotTrapped { robot } => Error::RobotTrappedAtStep { robot, step },
            other => other,
        })?;
        let r = &mut self.record;
        r.times.push(t1);
        r.pursuer_path.push(decision.pursuer_target);
        r.evader_path.push(decision.evader_target);
        r.step_values.push(decision.value);
        r.pruned_branch_counts.push((decision.pursuer_pruned, decision.evader_pruned));
        Ok(())
    }

    fn finish(mut self) -> Result<GameRecord> {
        let r = &mut self.record;
        r.final_payoff = payoff_between(self.scenario.payoff, &r.times, &r.pursuer_path, &r.evader_path)?;
        if let PayoffKind::CaptureTime { alpha } = self.scenario.payoff {
            r.capture_time = capture_time_of(alpha, &r.times, &r.pursuer_path, &r.evader_path);
        }
        Ok(self.record)
    }
}

/// Runs `round(horizon / dt)` receding-horizon steps.
pub fn simulate(scenario: &Scenario) -> Result<GameRecord> {
    let mut runner = Runner::new(scenario)?;
    let mut sweeper = scenario.obstacles.sweeper();
    for step in 0..scenario.step_count() {
        runner.advance(&mut sweeper, step)?;
    }
    runner.finish()
}

/// Runs until the robots first come within `alpha` of each other (checked
/// exactly along every step) or until `max_time` is reached.
pub fn simulate_until_capture(scenario: &Scenario, max_time: f64) -> Result<GameRecord> {
    let PayoffKind::CaptureTime { alpha } = scenario.payoff else {
        return Err(Error::InvalidInput(format!(
            "capture runs need a capture_time payoff, got {}",
            scenario.payoff.name()
        )));
    };
    if !(max_time >= scenario.dt) || !max_time.is_finite() {
        return Err(Error::param(
            "max_time",
            format!("must be finite and >= dt = {}, got {max_time}", scenario.dt),
        ));
    }
    let mut runner = Runner::new(scenario)?;
    let max_steps = (max_time / scenario.dt + 1e-9).floor() as usize;
    let mut sweeper = scenario.obstacles.sweeper();
    if distance(scenario.pursuer_start, scenario.evader_start) > alpha {
        for step in 0..max_steps {
            runner.advance(&mut sweeper, step)?;
            let r = &runner.record;
            let n = r.times.len();
            if capture_parameter(r.pursuer_path[n - 2], r.pursuer_path[n - 1], r.evader_path[n - 2], r.evader_path[n - 1], alpha)
                .is_some()
            {
                break;
            }
        }
    }
    runner.finish()
}

/// Recorded positions that fall inside the sweep of the step that produced
/// them, as `(step, robot, obstacle index)`. Uses the exhaustive test.
pub fn obstacle_violations(scenario: &Scenario, record: &GameRecord) -> Result<Vec<(usize, Robot, usize)>> {
    let mut out = Vec::new();
    for step in 0..record.steps() {
        let capsules: Vec<Capsule> = scenario.obstacles.sweeps(record.times[step], record.times[step + 1])?;
        for (robot, pos) in [
            (Robot::Pursuer, record.pursuer_path[step + 1]),
            (Robot::Evader, record.evader_path[step + 1]),
        ] {
            for (i, c) in capsules.iter().enumerate() {
                // A robot that stays put may sit on a capsule boundary only
                // when that is its sole free option, which the step excludes.
                if c.contains(pos) {
                    out.push((step, robot, i));
                }
            }
        }
    }
    Ok(out)
}
