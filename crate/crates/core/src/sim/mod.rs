//! Deterministic 2D world: wall segments, raycast LiDAR, differential-drive
//! kinematics and ground-truth collisions.

pub mod world;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::sensing::{Observation, PointCloud};
use crate::tasks::wrap_angle;
pub use world::{Bounds, Point, Rigid2, Segment, WorldModel};

pub const FOOTPRINT_RADIUS: f64 = 0.13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobotState {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub footprint_radius: f64,
}

impl RobotState {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self {
            x,
            y,
            theta: wrap_angle(theta),
            footprint_radius: FOOTPRINT_RADIUS,
        }
    }

    pub fn position(&self) -> Point {
        Point::new(self.x, self.y)
    }

    /// Rigid motion taking robot-frame coordinates to the world frame.
    pub fn frame(&self) -> Rigid2 {
        Rigid2 {
            dx: self.x,
            dy: self.y,
            theta: self.theta,
        }
    }
}

/// Actuation and sensing error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseModel {
    /// Bound of the uniform per-step error on straight moves, meters.
    pub epsilon_long: f64,
    /// Standard deviation of Gaussian range jitter, meters.
    pub range_noise: f64,
    /// Heading drift per straight step, radians.
    pub veer: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            epsilon_long: 0.01,
            range_noise: 0.0,
            veer: 0.0,
        }
    }
}

impl NoiseModel {
    pub const NONE: NoiseModel = NoiseModel {
        epsilon_long: 0.0,
        range_noise: 0.0,
        veer: 0.0,
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LidarConfig {
    pub n_beams: usize,
    pub max_range: f64,
}

impl Default for LidarConfig {
    fn default() -> Self {
        Self {
            n_beams: 360,
            max_range: 6.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Straight { v: f64 },
    Rotate { omega: f64 },
    Hold,
}

/// One LiDAR sweep. Beam `k` points at `2*pi*k/n_beams` in the robot frame;
/// beams without a hit within `max_range` are omitted. `rng` is only drawn
/// from when `range_noise > 0`.
pub fn raycast_scan<R: Rng + ?Sized>(
    world: &WorldModel,
    robot: &RobotState,
    lidar: &LidarConfig,
    range_noise: f64,
    rng: &mut R,
) -> PointCloud {
    assert!(lidar.n_beams >= 1, "n_beams must be at least 1");
    let origin = robot.position();
    let jitter = (range_noise > 0.0).then(|| Normal::new(0.0, range_noise).expect("finite std"));
    let mut observations = Vec::with_capacity(lidar.n_beams);
    for k in 0..lidar.n_beams {
        let a = 2.0 * std::f64::consts::PI * k as f64 / lidar.n_beams as f64;
        let (sin, cos) = (robot.theta + a).sin_cos();
        let hit = world
            .segments
            .iter()
            .filter_map(|s| s.ray_hit(origin, cos, sin))
            .fold(f64::INFINITY, f64::min);
        if hit > lidar.max_range {
            continue;
        }
        let range = match &jitter {
            Some(n) => (hit + n.sample(rng)).max(0.0),
            None => hit,
        };
        let (sa, ca) = a.sin_cos();
        observations.push(Observation::new(range * ca, range * sa));
    }
    PointCloud::new(observations)
}

/// Unicycle update. Straight moves advance `v*dt` plus a uniform error in
/// `[-epsilon_long, epsilon_long]` and then drift by `veer`; rotations turn
/// in place by `omega*dt`.
pub fn step_kinematics<R: Rng + ?Sized>(
    robot: &RobotState,
    command: Command,
    dt: f64,
    noise: &NoiseModel,
    rng: &mut R,
) -> RobotState {
    debug_assert!(dt > 0.0);
    let mut next = *robot;
    match command {
        Command::Straight { v } => {
            let err = if noise.epsilon_long > 0.0 {
                rng.gen_range(-noise.epsilon_long..=noise.epsilon_long)
            } else {
                0.0
            };
            let d = v * dt + err;
            let (s, c) = robot.theta.sin_cos();
            next.x += d * c;
            next.y += d * s;
            next.theta = wrap_angle(robot.theta + noise.veer);
        }
        Command::Rotate { omega } => next.theta = wrap_angle(robot.theta + omega * dt),
        Command::Hold => {}
    }
    next
}

/// True iff some wall is strictly closer than the footprint radius.
pub fn check_collision(world: &WorldModel, robot: &RobotState) -> bool {
    let p = robot.position();
    world
        .segments
        .iter()
        .any(|s| s.distance_to(p) < robot.footprint_radius)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(7)
    }

    fn room() -> WorldModel {
        WorldModel::new(WorldModel::rectangle(-2.0, -2.0, 2.0, 2.0)).unwrap()
    }

    #[test]
    fn empty_world_gives_empty_scan() {
        let c = raycast_scan(
            &WorldModel::empty(),
            &RobotState::new(0.0, 0.0, 0.0),
            &LidarConfig::default(),
            0.0,
            &mut rng(),
        );
        assert!(c.is_empty());
    }

    #[test]
    fn beam_zero_hits_the_facing_wall() {
        let lidar = LidarConfig::default();
        for theta in [0.0, PI / 2.0] {
            let c = raycast_scan(
                &room(),
                &RobotState::new(0.0, 0.0, theta),
                &lidar,
                0.0,
                &mut rng(),
            );
            assert_eq!(c.len(), 360);
            let o = c.observations[0];
            assert!((o.x - 2.0).abs() < 1e-12 && o.y.abs() < 1e-12, "{o:?}");
        }
    }

    #[test]
    fn beams_beyond_range_are_dropped() {
        let lidar = LidarConfig {
            n_beams: 4,
            max_range: 1.5,
        };
        let c = raycast_scan(
            &room(),
            &RobotState::new(0.8, 0.0, 0.0),
            &lidar,
            0.0,
            &mut rng(),
        );
        // Only the +x wall at 1.2 m is in range.
        assert_eq!(c.len(), 1);
        assert!((c.observations[0].x - 1.2).abs() < 1e-12);
    }

    #[test]
    fn kinematics_examples() {
        let n = NoiseModel::NONE;
        let r = step_kinematics(
            &RobotState::new(0.0, 0.0, 0.0),
            Command::Straight { v: 0.2 },
            0.2,
            &n,
            &mut rng(),
        );
        assert!((r.x - 0.04).abs() < 1e-15 && r.y == 0.0 && r.theta == 0.0);

        let r = step_kinematics(
            &RobotState::new(0.0, 0.0, 0.0),
            Command::Rotate { omega: PI / 2.0 },
            0.2,
            &n,
            &mut rng(),
        );
        assert!((r.theta - 0.1 * PI).abs() < 1e-15 && r.x == 0.0 && r.y == 0.0);

        let r = step_kinematics(
            &RobotState::new(1.0, 1.0, PI / 2.0),
            Command::Straight { v: 0.2 },
            0.2,
            &n,
            &mut rng(),
        );
        assert!((r.x - 1.0).abs() < 1e-15 && (r.y - 1.04).abs() < 1e-15);
        assert_eq!(r.theta, PI / 2.0);
    }

    #[test]
    fn longitudinal_error_is_bounded() {
        let n = NoiseModel {
            epsilon_long: 0.02,
            ..NoiseModel::NONE
        };
        let mut g = rng();
        for _ in 0..1000 {
            let r = step_kinematics(
                &RobotState::new(0.0, 0.0, 0.0),
                Command::Straight { v: 0.2 },
                0.2,
                &n,
                &mut g,
            );
            assert!((r.x - 0.04).abs() <= 0.02 + 1e-15);
        }
    }

    #[test]
    fn heading_wraps_to_half_open_interval() {
        let r = step_kinematics(
            &RobotState::new(0.0, 0.0, 0.95 * PI),
            Command::Rotate { omega: PI / 2.0 },
            0.2,
            &NoiseModel::NONE,
            &mut rng(),
        );
        assert!((r.theta + 0.95 * PI).abs() < 1e-12);
    }

    #[test]
    fn collision_examples() {
        let world = room();
        assert!(!check_collision(&world, &RobotState::new(0.0, 0.0, 0.0)));
        assert!(check_collision(&world, &RobotState::new(1.9, 0.0, 0.0)));
        let tangent = WorldModel::new(vec![Segment::new(0.13, -1.0, 0.13, 1.0)]).unwrap();
        let mut r = RobotState::new(0.0, 0.0, 0.0);
        r.footprint_radius = 0.13;
        assert!(!check_collision(&tangent, &r));
    }

    #[test]
    fn range_noise_is_seeded() {
        let lidar = LidarConfig::default();
        let r = RobotState::new(0.3, -0.2, 0.4);
        let a = raycast_scan(&room(), &r, &lidar, 0.01, &mut ChaCha8Rng::seed_from_u64(3));
        let b = raycast_scan(&room(), &r, &lidar, 0.01, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(a, b);
        let clean = raycast_scan(&room(), &r, &lidar, 0.0, &mut rng());
        assert_ne!(a, clean);
    }
}
