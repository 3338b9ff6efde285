//! Scenario files: TOML documents mirroring [`Scenario`] plus optional plot
//! settings.
//!
//! ```toml
//! name = "fig_b"
//! pursuer_start = [0.0, 0.0]
//! evader_start = [15.0, 10.0]
//! pursuer_speed = 10.0
//! evader_speed = 8.0
//! horizon = 10.0
//! dt = 0.2
//! delta_alpha = 0.2
//! payoff = "terminal"          # or "min_over_time", "capture_time"
//! # alpha = 0.1                # capture radius, capture_time only
//! seed = 7
//!
//! [[obstacles]]
//! motion = "linear"            # or "static", "random"
//! radius = 1.0
//! start = [5.0, -6.0]
//! velocity = [0.0, 2.0]
//!
//! [output]
//! width = 800
//! ```

use std::f64::consts::TAU;
use std::fmt;
use std::ops::Range;

use pursuit_core::geometry::distance;
use pursuit_core::{Motion, ObstacleField, ObstacleTrack, PayoffKind, Point2, Rect, Scenario};
use serde::{Deserialize, Serialize};
use toml::Spanned;

/// Largest seed a TOML integer can hold.
pub const MAX_SEED: u64 = i64::MAX as u64;

const STEP_COUNT_TOLERANCE: f64 = 1e-6;

/// A parse or validation failure located in the source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

impl ParseError {
    pub(crate) fn at(text: &str, offset: usize, message: impl Into<String>) -> Self {
        let offset = offset.min(text.len());
        let before = &text[..offset];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        Self {
            line,
            column,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PayoffName {
    Terminal,
    MinOverTime,
    CaptureTime,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(tag = "motion", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObstacleSpec {
    Static {
        radius: f64,
        center: [f64; 2],
    },
    Linear {
        radius: f64,
        start: [f64; 2],
        velocity: [f64; 2],
    },
    Random {
        radius: f64,
        bounds_min: [f64; 2],
        bounds_max: [f64; 2],
        speed: f64,
        /// Derived from the scenario seed and the obstacle index when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
}

/// Plot settings; every field is optional.
#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSettings {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pursuer_color: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evader_color: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub obstacle_color: Option<String>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub pursuer_start: Spanned<[f64; 2]>,
    pub evader_start: Spanned<[f64; 2]>,
    pub pursuer_speed: Spanned<f64>,
    pub evader_speed: Spanned<f64>,
    #[serde(alias = "T")]
    pub horizon: Spanned<f64>,
    pub dt: Spanned<f64>,
    pub delta_alpha: Spanned<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payoff: Option<Spanned<PayoffName>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Spanned<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<Spanned<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub use_spatial_hash: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cell_size: Option<Spanned<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub obstacles: Vec<Spanned<ObstacleSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSettings>,
}

/// What the parsed file will be used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    Simulation,
    /// Exact values on binary partitions: `dt` is unused and `horizon = 0` is
    /// allowed.
    ValueTable,
}

/// Seed of the random obstacle at `index` when the file gives none.
pub fn derived_obstacle_seed(scenario_seed: u64, index: usize) -> u64 {
    // splitmix64 finalizer, folded into the TOML integer range.
    let mut z = scenario_seed ^ (index as u64).wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    (z ^ (z >> 31)) >> 1
}

fn point(p: [f64; 2]) -> Point2 {
    Point2::new(p[0], p[1])
}

fn blank<T>(value: T) -> Spanned<T> {
    Spanned::new(0..0, value)
}

impl ScenarioFile {
    pub fn parse(text: &str, purpose: Purpose) -> Result<Self, ParseError> {
        let file: ScenarioFile = toml::from_str(text).map_err(|e| {
            let offset = e.span().map_or(0, |s| s.start);
            ParseError::at(text, offset, e.message().trim_end())
        })?;
        file.check(text, purpose)?;
        Ok(file)
    }

    fn check(&self, text: &str, purpose: Purpose) -> Result<(), ParseError> {
        let fail = |span: Range<usize>, msg: String| Err(ParseError::at(text, span.start, msg));
        let finite_positive = |name: &str, v: &Spanned<f64>| {
            let x = *v.get_ref();
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                fail(v.span(), format!("`{name}` must be finite and > 0, got {x}"))
            }
        };
        for (name, p) in [("pursuer_start", &self.pursuer_start), ("evader_start", &self.evader_start)] {
            if !p.get_ref().iter().all(|c| c.is_finite()) {
                return fail(p.span(), format!("`{name}` must be finite"));
            }
        }
        finite_positive("pursuer_speed", &self.pursuer_speed)?;
        finite_positive("evader_speed", &self.evader_speed)?;
        finite_positive("dt", &self.dt)?;

        let horizon = *self.horizon.get_ref();
        let dt = *self.dt.get_ref();
        match purpose {
            Purpose::Simulation => {
                finite_positive("horizon", &self.horizon)?;
                if dt > horizon {
                    return fail(self.dt.span(), format!("`dt` = {dt} exceeds `horizon` = {horizon}"));
                }
                let steps = horizon / dt;
                if (steps - steps.round()).abs() > STEP_COUNT_TOLERANCE * steps.round() {
                    return fail(
                        self.dt.span(),
                        format!("`horizon` / `dt` = {steps} is not a whole number of steps"),
                    );
                }
            }
            Purpose::ValueTable => {
                if !(horizon >= 0.0) || !horizon.is_finite() {
                    return fail(self.horizon.span(), format!("`horizon` must be finite and >= 0, got {horizon}"));
                }
            }
        }

        let da = *self.delta_alpha.get_ref();
        if !(da > 0.0) || da > TAU + 1e-12 {
            return fail(self.delta_alpha.span(), format!("`delta_alpha` must lie in (0, 2π], got {da}"));
        }

        let capture = matches!(self.payoff.as_ref().map(|p| *p.get_ref()), Some(PayoffName::CaptureTime));
        match (&self.alpha, capture) {
            (None, true) => {
                let span = self.payoff.as_ref().map_or(0..0, |p| p.span());
                return fail(span, "`capture_time` payoff needs `alpha`".into());
            }
            (Some(a), false) => {
                return fail(a.span(), "`alpha` is only used with the `capture_time` payoff".into());
            }
            (Some(a), true) => finite_positive("alpha", a)?,
            (None, false) => {}
        }
        if let Some(seed) = &self.seed {
            if *seed.get_ref() > MAX_SEED {
                return fail(seed.span(), format!("`seed` must be at most {MAX_SEED}"));
            }
        }
        if let Some(c) = &self.cell_size {
            finite_positive("cell_size", c)?;
        }
        if let Some(out) = &self.output {
            if out.width == Some(0) || out.height == Some(0) {
                return fail(0..0, "`output` width and height must be positive".into());
            }
        }

        let tracks = self.tracks(self.seed.as_ref().map_or(0, |s| *s.get_ref()));
        for (i, (spec, track)) in self.obstacles.iter().zip(tracks).enumerate() {
            let track = match track {
                Ok(t) => t,
                Err(e) => return fail(spec.span(), format!("obstacle {i}: {e}")),
            };
            for (who, start) in [("pursuer", &self.pursuer_start), ("evader", &self.evader_start)] {
                let c = track.center(0.0).expect("t = 0 is valid");
                if distance(c, point(*start.get_ref())) <= track.radius() {
                    return fail(spec.span(), format!("obstacle {i} covers the {who} start"));
                }
            }
        }
        Ok(())
    }

    fn tracks(&self, scenario_seed: u64) -> Vec<pursuit_core::Result<ObstacleTrack>> {
        self.obstacles
            .iter()
            .enumerate()
            .map(|(i, spec)| match *spec.get_ref() {
                ObstacleSpec::Static { radius, center } => ObstacleTrack::stationary(point(center), radius),
                ObstacleSpec::Linear { radius, start, velocity } => {
                    ObstacleTrack::linear(point(start), point(velocity), radius)
                }
                ObstacleSpec::Random {
                    radius,
                    bounds_min,
                    bounds_max,
                    speed,
                    seed,
                } => {
                    let bounds = Rect::new(point(bounds_min), point(bounds_max))?;
                    let seed = seed.unwrap_or_else(|| derived_obstacle_seed(scenario_seed, i));
                    ObstacleTrack::random(bounds, speed, seed, radius)
                }
            })
            .collect()
    }

    /// Builds the scenario; `seed` replaces the file's seed and with it every
    /// derived obstacle seed.
    pub fn to_scenario(&self, seed: Option<u64>) -> pursuit_core::Result<Scenario> {
        let seed = seed.unwrap_or_else(|| self.seed.as_ref().map_or(0, |s| *s.get_ref()));
        let payoff = match self.payoff.as_ref().map(|p| *p.get_ref()) {
            None | Some(PayoffName::Terminal) => PayoffKind::Terminal,
            Some(PayoffName::MinOverTime) => PayoffKind::MinOverTime,
            Some(PayoffName::CaptureTime) => {
                PayoffKind::capture_time(self.alpha.as_ref().map_or(f64::NAN, |a| *a.get_ref()))?
            }
        };
        let tracks = self.tracks(seed).into_iter().collect::<pursuit_core::Result<Vec<_>>>()?;
        Ok(Scenario {
            pursuer_start: point(*self.pursuer_start.get_ref()),
            evader_start: point(*self.evader_start.get_ref()),
            pursuer_speed: *self.pursuer_speed.get_ref(),
            evader_speed: *self.evader_speed.get_ref(),
            horizon: *self.horizon.get_ref(),
            dt: *self.dt.get_ref(),
            delta_alpha: *self.delta_alpha.get_ref(),
            payoff,
            obstacles: ObstacleField::new(tracks),
            seed,
            use_spatial_hash: self.use_spatial_hash.unwrap_or(true),
            cell_size: self.cell_size.as_ref().map(|c| *c.get_ref()),
        })
    }

    /// File for an in-memory scenario. Random obstacles get explicit seeds.
    pub fn from_scenario(name: Option<String>, scenario: &Scenario, output: Option<OutputSettings>) -> Self {
        let xy = |p: Point2| [p.x, p.y];
        let (payoff, alpha) = match scenario.payoff {
            PayoffKind::Terminal => (PayoffName::Terminal, None),
            PayoffKind::MinOverTime => (PayoffName::MinOverTime, None),
            PayoffKind::CaptureTime { alpha } => (PayoffName::CaptureTime, Some(blank(alpha))),
        };
        let obstacles = scenario
            .obstacles
            .tracks
            .iter()
            .map(|t| {
                let radius = t.radius();
                blank(match *t.motion() {
                    Motion::Static { center } => ObstacleSpec::Static {
                        radius,
                        center: xy(center),
                    },
                    Motion::Linear { start, velocity } => ObstacleSpec::Linear {
                        radius,
                        start: xy(start),
                        velocity: xy(velocity),
                    },
                    Motion::WaypointRandom { bounds, speed, seed } => ObstacleSpec::Random {
                        radius,
                        bounds_min: xy(bounds.min),
                        bounds_max: xy(bounds.max),
                        speed,
                        seed: Some(seed),
                    },
                })
            })
            .collect();
        Self {
            name,
            pursuer_start: blank(xy(scenario.pursuer_start)),
            evader_start: blank(xy(scenario.evader_start)),
            pursuer_speed: blank(scenario.pursuer_speed),
            evader_speed: blank(scenario.evader_speed),
            horizon: blank(scenario.horizon),
            dt: blank(scenario.dt),
            delta_alpha: blank(scenario.delta_alpha),
            payoff: Some(blank(payoff)),
            alpha,
            seed: Some(blank(scenario.seed)),
            use_spatial_hash: Some(scenario.use_spatial_hash),
            cell_size: scenario.cell_size.map(blank),
            obstacles,
            output,
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario files always serialize")
    }

    pub fn output_settings(&self) -> OutputSettings {
        self.output.clone().unwrap_or_default()
    }
}
