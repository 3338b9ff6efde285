//! Payoffs, the receding-horizon step selection, exact discretized game
//! values, and the guaranteed-capture horizon.

mod payoff;
mod step;
mod values;

pub use payoff::{capture_parameter, payoff_between, PayoffKind};
pub(crate) use payoff::capture_time_of;
pub use step::{robot_options, step_minimax, Branch, Options, StepDecision, StepProblem};
pub use values::{DiscreteGame, GameValueReport, InformationOrder, DEFAULT_NODE_BUDGET};

use crate::dynamics::AttainabilitySpec;
use crate::geometry::{distance, Point2};

/// Least `t` at which the evader's reachable disc lies inside the pursuer's:
/// `|x1 - x2| + s2 t <= s1 t`. Infinite when the pursuer is not faster.
pub fn t_star(pursuer: Point2, evader: Point2, pursuer_spec: &AttainabilitySpec, evader_spec: &AttainabilitySpec) -> f64 {
    let d = distance(pursuer, evader);
    if d == 0.0 {
        return 0.0;
    }
    let closing = pursuer_spec.max_speed() - evader_spec.max_speed();
    if closing > 0.0 {
        d / closing
    } else {
        f64::INFINITY
    }
}
