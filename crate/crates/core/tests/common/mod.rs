#![allow(dead_code)]

use std::collections::BTreeSet;

use mcplan_core::model::{Dts, Props, StateId, Valuation};
use mcplan_core::sensing::Observation;
use mcplan_core::sim::{raycast_scan, LidarConfig, Point, RobotState, Segment, WorldModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// States that can be terminals of some planning stage.
pub const TERMINAL_POOL: [StateId; 7] = [
    StateId(3),
    StateId(4),
    StateId(7),
    StateId(8),
    StateId(11),
    StateId(12),
    StateId(14),
];

/// All accepting prefixes of root-to-leaf paths, in depth-first preorder
/// with children in state-index order. A prefix is accepting when every
/// state but the last is labelled exactly `{safe}`, the last exactly
/// `{safe, horizon}`, and the last is a terminal.
pub fn oracle_paths(
    dts: &Dts,
    val: &Valuation,
    terminals: &BTreeSet<StateId>,
) -> Vec<Vec<StateId>> {
    oracle_paths_in(&dts.root_to_leaf_paths(), val, terminals)
}

/// [`oracle_paths`] over precomputed root-to-leaf paths.
pub fn oracle_paths_in(
    paths: &[Vec<StateId>],
    val: &Valuation,
    terminals: &BTreeSet<StateId>,
) -> Vec<Vec<StateId>> {
    let mut out = Vec::new();
    oracle_paths_into(paths, val, terminals, &mut out);
    out.into_iter().map(<[StateId]>::to_vec).collect()
}

/// Accepting prefixes as borrowed slices, in preorder, into `out`.
pub fn oracle_paths_into<'a>(
    paths: &'a [Vec<StateId>],
    val: &Valuation,
    terminals: &BTreeSet<StateId>,
    out: &mut Vec<&'a [StateId]>,
) {
    let both = Props::SAFE.with(Props::HORIZON);
    out.clear();
    for path in paths {
        for k in 1..=path.len() {
            let prefix = &path[..k];
            let last = prefix[k - 1];
            if val.label(last) == both && terminals.contains(&last) && !out.contains(&prefix) {
                out.push(prefix);
            }
            // Longer prefixes share this body, so stop at the first unsafe body state.
            if val.label(last) != Props::SAFE {
                break;
            }
        }
    }
}

/// Labels every state could take under some valuation: the fixed states
/// are always safe; the four longitudinal-offset states are all valued or
/// all unvalued; the rest may be unsafe, safe, or safe and horizon.
pub fn consistent_labellings() -> impl Iterator<Item = [Props; StateId::COUNT]> {
    let both = Props::SAFE.with(Props::HORIZON);
    let free = [
        StateId(3),
        StateId(4),
        StateId(7),
        StateId(8),
        StateId(11),
        StateId(12),
        StateId(14),
    ];
    let choices = [Props::EMPTY, Props::SAFE, both];
    (0..2u32).flat_map(move |longs| {
        (0..3usize.pow(free.len() as u32)).map(move |mut code| {
            let mut labels = [Props::EMPTY; StateId::COUNT];
            for s in [0, 1, 2, 13] {
                labels[s] = Props::SAFE;
            }
            if longs == 1 {
                for s in [5, 6, 9, 10] {
                    labels[s] = Props::SAFE;
                }
            }
            for s in free {
                labels[s.index()] = choices[code % 3];
                code /= 3;
            }
            labels
        })
    })
}

pub fn terminal_subsets() -> impl Iterator<Item = BTreeSet<StateId>> {
    (0..1u32 << TERMINAL_POOL.len()).map(|mask| {
        TERMINAL_POOL
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &s)| s)
            .collect()
    })
}

/// A closed room with a few random walls inside, plus a pose inside it.
pub fn random_scene(rng: &mut ChaCha8Rng) -> (WorldModel, RobotState) {
    let w = rng.gen_range(2.0..8.0);
    let h = rng.gen_range(2.0..8.0);
    let mut segs = WorldModel::rectangle(0.0, 0.0, w, h);
    for _ in 0..rng.gen_range(0..6) {
        let (x1, y1) = (rng.gen_range(0.0..w), rng.gen_range(0.0..h));
        let (x2, y2) = (rng.gen_range(0.0..w), rng.gen_range(0.0..h));
        if (x2 - x1).hypot(y2 - y1) > 1e-3 {
            segs.push(Segment::new(x1, y1, x2, y2));
        }
    }
    let robot = RobotState::new(
        rng.gen_range(0.01..w - 0.01),
        rng.gen_range(0.01..h - 0.01),
        rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
    );
    (WorldModel::new(segs).unwrap(), robot)
}

/// Parameter along `o + t*d` where it crosses `seg`, by Cramer's rule.
fn crossing(o: Point, d: (f64, f64), seg: &Segment) -> Option<f64> {
    let e = (seg.b.x - seg.a.x, seg.b.y - seg.a.y);
    let det = e.0 * d.1 - e.1 * d.0;
    if det.abs() < 1e-15 {
        return None;
    }
    let r = (seg.a.x - o.x, seg.a.y - o.y);
    let t = (e.0 * r.1 - e.1 * r.0) / det;
    let u = (d.0 * r.1 - d.1 * r.0) / det;
    (t >= 0.0 && (-1e-12..=1.0 + 1e-12).contains(&u)).then_some(t)
}

/// Largest error over one pose: robot-to-world-to-robot round trip of each
/// hit, its bearing against its beam angle, its distance from the nearest
/// wall, any wall crossed before it, and its disagreement with a scan of
/// the world moved into the robot frame. Also fails (returns
/// infinity) when a beam with a wall in range is missing from the scan.
pub fn numerics_error(world: &WorldModel, robot: &RobotState, lidar: &LidarConfig) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let scan = raycast_scan(world, robot, lidar, 0.0, &mut rng);
    let frame = robot.frame();
    let inv = frame.inverse();
    let mut err: f64 = 0.0;
    let mut observed = scan.iter();
    for k in 0..lidar.n_beams {
        let a = 2.0 * std::f64::consts::PI * k as f64 / lidar.n_beams as f64;
        let d = ((robot.theta + a).cos(), (robot.theta + a).sin());
        let nearest = world
            .segments
            .iter()
            .filter_map(|seg| crossing(robot.position(), d, seg))
            .fold(f64::INFINITY, f64::min);
        if nearest > lidar.max_range + 1e-9 {
            continue;
        }
        let Some(o) = observed.next() else {
            return f64::INFINITY;
        };
        let p = frame.apply(Point::new(o.x, o.y));
        let back = inv.apply(p);
        err = err.max((back.x - o.x).abs()).max((back.y - o.y).abs());
        let bearing_err = (o.bearing() - a).sin().abs() + ((o.bearing() - a).cos() - 1.0).abs();
        err = err.max(bearing_err * o.range());
        let wall = world
            .segments
            .iter()
            .map(|s| s.distance_to(p))
            .fold(f64::INFINITY, f64::min);
        err = err.max(wall);
        err = err.max((o.range() - nearest).abs());
    }
    if observed.next().is_some() {
        return f64::INFINITY;
    }
    // The same scan seen from the origin of a world moved into the robot
    // frame.
    let local = world.transformed(&inv);
    let origin_scan = raycast_scan(
        &local,
        &RobotState::new(0.0, 0.0, 0.0),
        lidar,
        0.0,
        &mut rng,
    );
    if origin_scan.len() != scan.len() {
        return f64::INFINITY;
    }
    for (a, b) in scan.iter().zip(origin_scan.iter()) {
        err = err.max((a.x - b.x).abs()).max((a.y - b.y).abs());
    }
    err
}

pub fn obs(x: f64, y: f64) -> Observation {
    Observation::new(x, y)
}
