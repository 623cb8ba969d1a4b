mod common;

use mcplan_core::sim::{
    step_kinematics, Command, LidarConfig, NoiseModel, Point, Rigid2, RobotState,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn scans_are_sound_and_frame_consistent(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (world, robot) = common::random_scene(&mut rng);
        let lidar = LidarConfig { n_beams: 90, max_range: 6.0 };
        let err = common::numerics_error(&world, &robot, &lidar);
        prop_assert!(err <= TOL, "error {err} at {robot:?}");
    }

    #[test]
    fn rigid_round_trip(
        dx in -50.0..50.0f64, dy in -50.0..50.0f64, th in -4.0..4.0f64,
        px in -10.0..10.0f64, py in -10.0..10.0f64,
    ) {
        let m = Rigid2 { dx, dy, theta: th };
        let p = Point::new(px, py);
        let q = m.inverse().apply(m.apply(p));
        prop_assert!((q.x - p.x).abs() <= TOL && (q.y - p.y).abs() <= TOL);
    }

    #[test]
    fn noiseless_steps_are_exact(
        x in -10.0..10.0f64, y in -10.0..10.0f64, th in -std::f64::consts::PI..std::f64::consts::PI,
        v in 0.0..1.0f64, omega in -2.0..2.0f64, dt in 0.01..0.5f64,
    ) {
        let r = RobotState::new(x, y, th);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let s = step_kinematics(&r, Command::Straight { v }, dt, &NoiseModel::NONE, &mut rng);
        prop_assert!(((s.x - x) - v * dt * th.cos()).abs() <= TOL);
        prop_assert!(((s.y - y) - v * dt * th.sin()).abs() <= TOL);
        prop_assert_eq!(s.theta, r.theta);
        let t = step_kinematics(&r, Command::Rotate { omega }, dt, &NoiseModel::NONE, &mut rng);
        prop_assert_eq!((t.x, t.y), (x, y));
        prop_assert!((t.theta - r.theta - omega * dt).sin().abs() <= TOL);
    }

    #[test]
    fn straight_error_is_bounded(eps in 0.0..0.05f64, seed in any::<u64>()) {
        let r = RobotState::new(0.0, 0.0, 0.0);
        let noise = NoiseModel { epsilon_long: eps, ..NoiseModel::NONE };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = step_kinematics(&r, Command::Straight { v: 0.2 }, 0.2, &noise, &mut rng);
        prop_assert!((s.x - 0.04).abs() <= eps + TOL);
        prop_assert!(s.y.abs() <= TOL);
    }
}
