//! Moving circular obstacles and the capsules they sweep over one time step.
//!
//! Random tracks draw waypoints from ChaCha8 seeded with `seed_from_u64`;
//! uniform reals are built from the top 53 bits of `next_u64`, so a seed
//! reproduces the same trajectory bit for bit on every platform.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::geometry::{Capsule, Point2, Segment};

/// Closed axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub min: Point2,
    pub max: Point2,
}

impl Rect {
    pub fn new(min: Point2, max: Point2) -> Result<Self> {
        if !min.is_finite() || !max.is_finite() || min.x > max.x || min.y > max.y {
            return Err(Error::param(
                "bounds",
                format!("need finite min <= max, got {min:?} .. {max:?}"),
            ));
        }
        Ok(Self { min, max })
    }

    pub fn contains(&self, p: Point2) -> bool {
        (self.min.x..=self.max.x).contains(&p.x) && (self.min.y..=self.max.y).contains(&p.y)
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Point2 {
        let u = unit_f64(rng);
        let v = unit_f64(rng);
        Point2::new(
            self.min.x + u * (self.max.x - self.min.x),
            self.min.y + v * (self.max.y - self.min.y),
        )
    }
}

/// Uniform draw from `[0, 1)` using the top 53 bits.
fn unit_f64(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Motion {
    Static { center: Point2 },
    Linear { start: Point2, velocity: Point2 },
    /// Travel at constant speed between waypoints drawn uniformly in `bounds`;
    /// a new waypoint is drawn on arrival. The first draw is the start.
    WaypointRandom { bounds: Rect, speed: f64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObstacleTrack {
    radius: f64,
    motion: Motion,
}

impl ObstacleTrack {
    pub fn new(radius: f64, motion: Motion) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::param("radius", format!("must be finite and > 0, got {radius}")));
        }
        match motion {
            Motion::Static { center } if !center.is_finite() => {
                return Err(Error::param("center", "must be finite"));
            }
            Motion::Linear { start, velocity } if !start.is_finite() || !velocity.is_finite() => {
                return Err(Error::param("velocity", "start and velocity must be finite"));
            }
            Motion::WaypointRandom { speed, .. } if !(speed > 0.0) || !speed.is_finite() => {
                return Err(Error::param("speed", format!("must be finite and > 0, got {speed}")));
            }
            _ => {}
        }
        Ok(Self { radius, motion })
    }

    pub fn stationary(center: Point2, radius: f64) -> Result<Self> {
        Self::new(radius, Motion::Static { center })
    }

    pub fn linear(start: Point2, velocity: Point2, radius: f64) -> Result<Self> {
        Self::new(radius, Motion::Linear { start, velocity })
    }

    pub fn random(bounds: Rect, speed: f64, seed: u64, radius: f64) -> Result<Self> {
        Self::new(radius, Motion::WaypointRandom { bounds, speed, seed })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn motion(&self) -> &Motion {
        &self.motion
    }

    pub fn center(&self, t: f64) -> Result<Point2> {
        obstacle_center(self, t)
    }

    pub fn sweep(&self, t0: f64, t1: f64) -> Result<Capsule> {
        sweep_capsule(self, t0, t1)
    }

    /// Same track with a different random seed; other motions are unchanged.
    pub fn with_seed(mut self, seed: u64) -> Self {
        if let Motion::WaypointRandom { seed: s, .. } = &mut self.motion {
            *s = seed;
        }
        self
    }
}

pub fn obstacle_center(track: &ObstacleTrack, t: f64) -> Result<Point2> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::param("t", format!("must be finite and >= 0, got {t}")));
    }
    Ok(match track.motion {
        Motion::Static { center } => center,
        Motion::Linear { start, velocity } => start + velocity * t,
        Motion::WaypointRandom { bounds, speed, seed } => waypoint_position(bounds, speed, seed, t),
    })
}

fn waypoint_position(bounds: Rect, speed: f64, seed: u64, t: f64) -> Point2 {
    Walker::new(bounds, speed, seed).position(bounds, speed, seed, t)
}

/// Replay state of one random track: the leg that was current at the last
/// query. Moving forward in time only draws the waypoints in between.
#[derive(Debug, Clone)]
struct Walker {
    rng: ChaCha8Rng,
    from: Point2,
    to: Point2,
    elapsed: f64,
    leg: f64,
}

impl Walker {
    fn new(bounds: Rect, speed: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let from = bounds.sample(&mut rng);
        let to = bounds.sample(&mut rng);
        let leg = (to - from).norm() / speed;
        Self { rng, from, to, elapsed: 0.0, leg }
    }

    fn position(&mut self, bounds: Rect, speed: f64, seed: u64, t: f64) -> Point2 {
        if t < self.elapsed {
            *self = Self::new(bounds, speed, seed);
        }
        while self.elapsed + self.leg <= t {
            self.elapsed += self.leg;
            self.from = self.to;
            self.to = bounds.sample(&mut self.rng);
            self.leg = (self.to - self.from).norm() / speed;
        }
        let s = if self.leg > 0.0 { (t - self.elapsed) / self.leg } else { 0.0 };
        self.from.lerp(self.to, s)
    }
}

/// Capsule around the obstacle discs at `t0` and `t1`. For random tracks a
/// waypoint turn inside the interval is approximated by the chord.
pub fn sweep_capsule(track: &ObstacleTrack, t0: f64, t1: f64) -> Result<Capsule> {
    if !(t1 >= t0) {
        return Err(Error::param("t0", format!("need t0 <= t1, got {t0} > {t1}")));
    }
    let a = obstacle_center(track, t0)?;
    let b = obstacle_center(track, t1)?;
    Capsule::new(Segment::new(a, b), track.radius)
}

/// All moving obstacles of a scene; may be empty.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ObstacleField {
    pub tracks: Vec<ObstacleTrack>,
}

impl ObstacleField {
    pub fn new(tracks: Vec<ObstacleTrack>) -> Self {
        Self { tracks }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.tracks.is_empty()
    }

    pub fn len(&self) -> usize {
        self.tracks.len()
    }

    pub fn sweeps(&self, t0: f64, t1: f64) -> Result<Vec<Capsule>> {
        self.tracks.iter().map(|tr| tr.sweep(t0, t1)).collect()
    }

    pub fn max_radius(&self) -> f64 {
        self.tracks.iter().map(ObstacleTrack::radius).fold(0.0, f64::max)
    }

    pub fn sweeper(&self) -> FieldSweeper<'_> {
        FieldSweeper {
            field: self,
            walkers: vec![None; self.tracks.len()],
        }
    }
}

/// Sweeps of a field over successive intervals. Gives the same capsules as
/// [`ObstacleField::sweeps`], but random tracks are not replayed from their
/// seed each time, so a forward pass costs O(1) per track and interval.
#[derive(Debug, Clone)]
pub struct FieldSweeper<'a> {
    field: &'a ObstacleField,
    walkers: Vec<Option<Walker>>,
}

impl FieldSweeper<'_> {
    pub fn sweeps(&mut self, t0: f64, t1: f64) -> Result<Vec<Capsule>> {
        if !(t1 >= t0) {
            return Err(Error::param("t0", format!("need t0 <= t1, got {t0} > {t1}")));
        }
        if !(t0 >= 0.0) || !t1.is_finite() {
            return Err(Error::param("t", format!("must be finite and >= 0, got {t0} .. {t1}")));
        }
        let mut out = Vec::with_capacity(self.field.tracks.len());
        for (track, walker) in self.field.tracks.iter().zip(&mut self.walkers) {
            let (a, b) = match track.motion {
                Motion::WaypointRandom { bounds, speed, seed } => {
                    let w = walker.get_or_insert_with(|| Walker::new(bounds, speed, seed));
                    (w.position(bounds, speed, seed, t0), w.position(bounds, speed, seed, t1))
                }
                _ => (obstacle_center(track, t0)?, obstacle_center(track, t1)?),
            };
            out.push(Capsule::new(Segment::new(a, b), track.radius)?);
        }
        Ok(out)
    }
}
