use std::f64::consts::{PI, TAU};

use pursuit_core::dynamics::branch_directions;
use pursuit_core::game::{InformationOrder, StepProblem};
use pursuit_core::geometry::distance;
use pursuit_core::obstacles::Rect;
use pursuit_core::{
    payoff_between, step_minimax, t_star, AttainabilitySpec, Capsule, DiscreteGame, ObstacleField, ObstacleTrack,
    PayoffKind, Point2,
};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * ((rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64)
}

/// Plain full-width game tree: every branch of every ply, payoff evaluated
/// on the complete recorded trajectories.
struct Naive<'a> {
    s1: f64,
    s2: f64,
    dt: f64,
    steps: usize,
    delta_alpha: f64,
    field: &'a ObstacleField,
    payoff: PayoffKind,
    order: InformationOrder,
}

impl Naive<'_> {
    fn moves(&self, from: Point2, reach: f64, k: usize) -> Vec<Point2> {
        let sweeps: Vec<Capsule> = self.field.sweeps(k as f64 * self.dt, (k + 1) as f64 * self.dt).unwrap();
        let count = (TAU / self.delta_alpha + 1e-9).floor() as usize + 1;
        let free = |q: Point2| sweeps.iter().all(|c| distance_to_axis(q, c) > c.radius);
        let out: Vec<Point2> = (0..count)
            .map(|i| {
                let a = i as f64 * self.delta_alpha;
                Point2::new(from.x + reach * a.cos(), from.y + reach * a.sin())
            })
            .filter(|&q| free(q))
            .collect();
        if out.is_empty() {
            assert!(free(from), "trapped robot in oracle instance");
            vec![from]
        } else {
            out
        }
    }

    fn value(&self, x1: Point2, x2: Point2) -> f64 {
        let mut p = vec![x1];
        let mut e = vec![x2];
        self.step(0, &mut p, &mut e)
    }

    fn leaf(&self, p: &[Point2], e: &[Point2]) -> f64 {
        let times: Vec<f64> = (0..p.len()).map(|i| i as f64 * self.dt).collect();
        payoff_between(self.payoff, &times, p, e).unwrap()
    }

    fn step(&self, k: usize, p: &mut Vec<Point2>, e: &mut Vec<Point2>) -> f64 {
        if k == self.steps {
            return self.leaf(p, e);
        }
        let x1 = *p.last().unwrap();
        let x2 = *e.last().unwrap();
        let pm = self.moves(x1, self.s1 * self.dt, k);
        let frozen = self.order == InformationOrder::TruncatedUpper && k + 1 == self.steps;
        let em = if frozen { vec![x2] } else { self.moves(x2, self.s2 * self.dt, k) };
        let mut play = |a: Point2, b: Point2| {
            p.push(a);
            e.push(b);
            let v = self.step(k + 1, p, e);
            p.pop();
            e.pop();
            v
        };
        match self.order {
            InformationOrder::Upper | InformationOrder::TruncatedUpper => pm
                .iter()
                .map(|&a| em.iter().map(|&b| play(a, b)).fold(f64::NEG_INFINITY, f64::max))
                .fold(f64::INFINITY, f64::min),
            InformationOrder::Lower => em
                .iter()
                .map(|&b| pm.iter().map(|&a| play(a, b)).fold(f64::INFINITY, f64::min))
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

fn distance_to_axis(q: Point2, c: &Capsule) -> f64 {
    let (a, b) = (c.axis.a, c.axis.b);
    let ab = b - a;
    let len2 = ab.dot(ab);
    let s = if len2 == 0.0 { 0.0 } else { ((q - a).dot(ab) / len2).clamp(0.0, 1.0) };
    distance(q, a + ab * s)
}

fn random_field(rng: &mut ChaCha8Rng, count: usize) -> ObstacleField {
    let bounds = Rect::new(Point2::new(-1.0, -2.0), Point2::new(4.0, 2.0)).unwrap();
    let tracks = (0..count)
        .map(|i| match i % 3 {
            0 => ObstacleTrack::stationary(Point2::new(uniform(rng, 0.5, 3.0), uniform(rng, -1.5, 1.5)), uniform(rng, 0.1, 0.4)),
            1 => ObstacleTrack::linear(
                Point2::new(uniform(rng, 0.0, 3.0), uniform(rng, -1.5, 1.5)),
                Point2::new(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)),
                uniform(rng, 0.1, 0.3),
            ),
            _ => ObstacleTrack::random(bounds, uniform(rng, 0.5, 2.0), rng.next_u64(), uniform(rng, 0.1, 0.3)),
        })
        .collect::<Result<Vec<_>, _>>()
        .unwrap();
    ObstacleField::new(tracks)
}

fn spec(v: f64) -> AttainabilitySpec {
    AttainabilitySpec::new(v).unwrap()
}

#[test]
fn pruned_recursion_matches_full_width_tree() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let payoffs = [PayoffKind::Terminal, PayoffKind::MinOverTime, PayoffKind::CaptureTime { alpha: 0.6 }];
    let orders = [InformationOrder::Upper, InformationOrder::Lower, InformationOrder::TruncatedUpper];
    let mut checked = 0;
    while checked < 60 {
        let field = if checked % 2 == 0 { ObstacleField::empty() } else { random_field(&mut rng, 3) };
        let x1 = Point2::new(uniform(&mut rng, -0.5, 0.5), uniform(&mut rng, -0.5, 0.5));
        let x2 = Point2::new(uniform(&mut rng, 1.0, 3.0), uniform(&mut rng, -1.0, 1.0));
        if field.tracks.iter().any(|t| {
            let c = t.center(0.0).unwrap();
            distance(c, x1) <= t.radius() + 0.6 || distance(c, x2) <= t.radius() + 0.6
        }) {
            continue;
        }
        let (s1, s2) = (uniform(&mut rng, 0.5, 1.5), uniform(&mut rng, 0.3, 1.2));
        let horizon = uniform(&mut rng, 0.3, 1.5);
        let level = (checked % 3) as u32 % 2 + u32::from(checked % 5 == 0);
        let delta_alpha = [1.3, 0.9, 2.2][checked % 3];
        let payoff = payoffs[checked % 3];
        for order in orders {
            let game = DiscreteGame::new(spec(s1), spec(s2), &field, horizon, level, delta_alpha, payoff);
            let (fast, _) = game.value(order, x1, x2).unwrap();
            let naive = Naive {
                s1,
                s2,
                dt: horizon / (1usize << level) as f64,
                steps: 1 << level,
                delta_alpha,
                field: &field,
                payoff,
                order,
            }
            .value(x1, x2);
            let tol = 1e-9 * naive.abs().max(1.0);
            assert!(
                fast == naive || (fast - naive).abs() <= tol,
                "instance {checked} {order:?} {payoff:?}: pruned {fast} vs full {naive}"
            );
        }
        checked += 1;
    }
}

/// Continuous-direction upper game in the relative coordinate, reduced by
/// rotation symmetry to a function of the separation and tabulated on a grid.
fn radial_upper_value(d0: f64, s1: f64, s2: f64, horizon: f64, steps: usize) -> f64 {
    const DR: f64 = 0.005;
    const ANGLES: usize = 240;
    let dt = horizon / steps as f64;
    let (a1, a2) = (s1 * dt, s2 * dt);
    let r_max = d0 + (a1 + a2) * steps as f64 + 1.0;
    let cells = (r_max / DR).ceil() as usize + 1;
    let lookup = |w: &[f64], r: f64| {
        let x = (r / DR).min((cells - 1) as f64 - 1e-9);
        let i = x.floor() as usize;
        let f = x - i as f64;
        w[i] * (1.0 - f) + w[i + 1] * f
    };
    let mut w: Vec<f64> = (0..cells).map(|i| i as f64 * DR).collect();
    let pursuer: Vec<Point2> = (0..=ANGLES / 2).map(|i| Point2::polar(a1, PI * i as f64 / (ANGLES / 2) as f64)).collect();
    let evader: Vec<Point2> = (0..ANGLES).map(|i| Point2::polar(a2, TAU * i as f64 / ANGLES as f64)).collect();
    for _ in 0..steps {
        let next: Vec<f64> = (0..cells)
            .map(|i| {
                let z = Point2::new(i as f64 * DR, 0.0);
                pursuer
                    .iter()
                    .map(|&u| evader.iter().map(|&v| lookup(&w, (z - u + v).norm())).fold(f64::NEG_INFINITY, f64::max))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        w = next;
    }
    lookup(&w, d0)
}

#[test]
fn analytic_pursuit_value_confirmed_by_radial_oracle() {
    let oracle = radial_upper_value(4.0, 1.0, 0.5, 2.0, 8);
    assert!((oracle - 3.0).abs() < 0.01 * 3.0, "oracle {oracle}");
    let field = ObstacleField::empty();
    let game = DiscreteGame::new(spec(1.0), spec(0.5), &field, 2.0, 3, 0.05, PayoffKind::Terminal);
    let v = game.upper_value(Point2::ORIGIN, Point2::new(4.0, 0.0)).unwrap();
    assert!((v - 3.0).abs() <= 0.05 * 3.0, "upper value {v}");
    assert!((v - oracle).abs() < 0.05, "upper value {v} vs oracle {oracle}");
}

#[test]
fn one_step_consistency_with_step_minimax() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..40 {
        let x1 = Point2::new(uniform(&mut rng, -2.0, 2.0), uniform(&mut rng, -2.0, 2.0));
        let x2 = Point2::new(uniform(&mut rng, -2.0, 2.0), uniform(&mut rng, -2.0, 2.0));
        let (s1, s2, dt) = (uniform(&mut rng, 0.5, 2.0), uniform(&mut rng, 0.5, 2.0), uniform(&mut rng, 0.1, 1.0));
        let field = ObstacleField::empty();
        let game = DiscreteGame::new(spec(s1), spec(s2), &field, dt, 0, 0.2, PayoffKind::Terminal);
        let step = step_minimax(&StepProblem {
            pursuer: x1,
            evader: x2,
            pursuer_spec: spec(s1),
            evader_spec: spec(s2),
            dt,
            delta_alpha: 0.2,
            payoff: PayoffKind::Terminal,
            obstacles: &[],
            grid: None,
        })
        .unwrap();
        assert_eq!(step.value, game.upper_value(x1, x2).unwrap());
    }
}

#[test]
fn truncated_never_exceeds_upper() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let field = ObstacleField::empty();
    for i in 0..60 {
        let x2 = Point2::polar(uniform(&mut rng, 0.5, 4.0), uniform(&mut rng, 0.0, TAU));
        let game = DiscreteGame::new(
            spec(uniform(&mut rng, 0.5, 1.5)),
            spec(uniform(&mut rng, 0.2, 1.2)),
            &field,
            uniform(&mut rng, 0.2, 2.0),
            (i % 3) as u32,
            0.8,
            PayoffKind::Terminal,
        );
        let upper = game.upper_value(Point2::ORIGIN, x2).unwrap();
        let truncated = game.truncated_upper_value(Point2::ORIGIN, x2).unwrap();
        assert!(truncated <= upper + 1e-9, "instance {i}: truncated {truncated} > upper {upper}");
    }
}

#[test]
fn upper_value_never_below_lower_value() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let field = ObstacleField::empty();
    for i in 0..60 {
        let x2 = Point2::polar(uniform(&mut rng, 0.2, 4.0), uniform(&mut rng, 0.0, TAU));
        let game = DiscreteGame::new(
            spec(uniform(&mut rng, 0.3, 1.5)),
            spec(uniform(&mut rng, 0.3, 1.5)),
            &field,
            uniform(&mut rng, 0.2, 2.0),
            (i % 3) as u32,
            [0.8, 1.0, 1.6][i % 3],
            PayoffKind::Terminal,
        );
        let r = game.report(Point2::ORIGIN, x2).unwrap();
        assert!(r.upper_value >= r.lower_value - 1e-9, "instance {i}: {r:?}");
    }
}

#[test]
fn coarse_lower_game_handicaps_a_fast_pursuer() {
    // Boundary-only moves force a full-length pursuer step, so the coarse
    // lower game leaves the pursuer overshooting a slow evader.
    let field = ObstacleField::empty();
    let x2 = Point2::polar(1.5, 1.0);
    let lower = |level| {
        DiscreteGame::new(spec(1.17), spec(0.28), &field, 1.2, level, 0.8, PayoffKind::Terminal)
            .lower_value(Point2::ORIGIN, x2)
            .unwrap()
    };
    assert!(lower(1) < lower(0));
}

#[test]
fn t_star_matches_containment_bisection() {
    // Oracle: smallest t at which every sampled boundary point of the evader
    // disc lies in the pursuer disc. The angular grid starts on the line of
    // centers.
    let contained = |x1: Point2, x2: Point2, s1: f64, s2: f64, t: f64| {
        let heading = (x2.y - x1.y).atan2(x2.x - x1.x);
        (0..720).all(|k| {
            let q = x2 + Point2::polar(s2 * t, heading + TAU * k as f64 / 720.0);
            distance(q, x1) <= s1 * t
        })
    };
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut cases = vec![(Point2::ORIGIN, Point2::new(3.0, 0.0), 10.0, 8.0)];
    for _ in 0..20 {
        cases.push((
            Point2::new(uniform(&mut rng, -5.0, 5.0), uniform(&mut rng, -5.0, 5.0)),
            Point2::new(uniform(&mut rng, -5.0, 5.0), uniform(&mut rng, -5.0, 5.0)),
            uniform(&mut rng, 2.0, 10.0),
            uniform(&mut rng, 0.5, 1.9),
        ));
    }
    for (x1, x2, s1, s2) in cases {
        let (mut lo, mut hi) = (0.0, 1.0);
        while !contained(x1, x2, s1, s2, hi) {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if contained(x1, x2, s1, s2, mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let closed = t_star(x1, x2, &spec(s1), &spec(s2));
        assert!((closed - hi).abs() <= 1e-9 * closed.max(1.0), "closed {closed} vs bisection {hi}");
    }
    assert_eq!(t_star(Point2::ORIGIN, Point2::new(3.0, 0.0), &spec(10.0), &spec(8.0)), 1.5);
}

#[test]
fn capture_values_respect_alpha_monotonicity() {
    // A larger capture radius can only make capture earlier.
    let field = ObstacleField::empty();
    let x2 = Point2::new(1.2, 0.3);
    let value = |alpha| {
        DiscreteGame::new(spec(1.5), spec(0.5), &field, 1.5, 1, 0.8, PayoffKind::CaptureTime { alpha })
            .upper_value(Point2::ORIGIN, x2)
            .unwrap()
    };
    let (small, large) = (value(0.3), value(0.8));
    assert!(large <= small, "{large} > {small}");
    assert!(large.is_finite());
    assert!(branch_directions(0.8).unwrap().len() == 8);
}
