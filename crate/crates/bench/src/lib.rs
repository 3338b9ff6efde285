//! Scene builders shared by the scaling benchmarks.

use pursuit_core::{ObstacleField, ObstacleTrack, Point2, Scenario};

/// Speed 10 vs 8 chase through `obstacles` drifting discs scattered over a
/// 300 x 300 square, none closer than 25 to the pursuer's start.
pub fn scene(obstacles: usize, horizon: f64, delta_alpha: f64, hash: bool) -> Scenario {
    let mut tracks = Vec::with_capacity(obstacles);
    let mut k = 0u64;
    while tracks.len() < obstacles {
        k += 1;
        let c = Point2::new(
            ((k * 7919) % 300) as f64 - 149.63,
            ((k * 104_729) % 300) as f64 - 149.89,
        );
        if c.norm() > 25.0 {
            let v = Point2::polar(1.0 + (k % 3) as f64, k as f64);
            tracks.push(ObstacleTrack::linear(c, v, 0.5).expect("valid track"));
        }
    }
    Scenario::new(Point2::ORIGIN, Point2::new(15.0, 10.0), 10.0, 8.0, horizon, 0.2, delta_alpha)
        .with_obstacles(ObstacleField::new(tracks))
        .with_spatial_hash(hash)
}
