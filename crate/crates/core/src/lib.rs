//! Two-robot pursuit-evasion among moving circular obstacles.
//!
//! Both robots move with bounded speed in the plane. Each step, every robot's
//! reachable circle is subdivided into angular branches, branches that land
//! in an obstacle's swept capsule are removed, and a min-max selection picks
//! both robots' next positions. The [`game`] module also evaluates the exact
//! upper and lower values of the discretized alternating games on binary time
//! partitions, and [`engine`] runs complete scenarios.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod engine;
pub mod error;
pub mod game;
pub mod geometry;
pub mod obstacles;

pub use dynamics::{AttainabilitySpec, ReachableBoundary};
pub use engine::{simulate, simulate_until_capture, GameRecord, Scenario};
pub use error::{Error, Result, Robot};
pub use game::{
    payoff_between, step_minimax, t_star, Branch, DiscreteGame, GameValueReport, PayoffKind,
    StepDecision, StepProblem,
};
pub use geometry::{Capsule, Point2, Segment, SpatialHashGrid};
pub use obstacles::{FieldSweeper, Motion, ObstacleField, ObstacleTrack, Rect};
