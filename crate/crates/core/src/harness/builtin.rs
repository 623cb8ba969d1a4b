//! Built-in worlds: the cul-de-sac study, the playground, an empty room and
//! seeded random rooms with rectangular obstacles.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::scenario::{Cutoff, NamedPose, Scenario, ScenarioConfig};
use crate::sim::{Point, Segment, WorldModel};

fn pose(name: &str, x: f64, y: f64, theta: f64) -> NamedPose {
    NamedPose {
        name: name.into(),
        pose: [x, y, theta],
    }
}

/// Side length of the square room shared by the cul-de-sac and playground.
pub const ROOM: f64 = 4.0;
/// Pocket mouth width and depth.
pub const POCKET_WIDTH: f64 = 1.1;
pub const POCKET_DEPTH: f64 = 1.2;

/// A 4 m room whose far wall holds a three-walled pocket. Everything beyond
/// the pocket's mouth except the pocket itself is solid, so crossing the
/// cutoff means entering the pocket. Runs end once the robot is back out
/// by 0.2 m, or after 60 s.
pub fn culdesac() -> Scenario {
    let mouth = ROOM - POCKET_DEPTH;
    let y_lo = 0.5 * (ROOM - POCKET_WIDTH);
    let y_hi = y_lo + POCKET_WIDTH;
    let mut segments = WorldModel::rectangle(0.0, 0.0, ROOM, ROOM);
    segments.extend([
        Segment::new(mouth, 0.0, mouth, y_lo),
        Segment::new(mouth, y_lo, ROOM, y_lo),
        Segment::new(mouth, ROOM, mouth, y_hi),
        Segment::new(mouth, y_hi, ROOM, y_hi),
    ]);
    let start_x = mouth - 0.9;
    Scenario {
        name: "culdesac".into(),
        segments,
        start_poses: vec![
            pose("centre", start_x, 0.5 * ROOM, 0.0),
            pose("left", start_x, 0.5 * ROOM + 0.9, -FRAC_PI_4),
            pose("right", start_x, 0.5 * ROOM - 0.9, FRAC_PI_4),
        ],
        cutoff: Some(Cutoff {
            a: [mouth, y_lo],
            b: [mouth, y_hi],
            inside: [mouth + 0.5 * POCKET_DEPTH, 0.5 * ROOM],
        }),
        exit_clearance: Some(0.2),
        duration: 60.0,
        config: ScenarioConfig::default(),
    }
}

/// The 4 m room with a free-standing 0.4 m box and a pocket in the top
/// right corner, opening downwards. The robot starts at the pocket mouth
/// facing in; runs last five minutes.
pub fn playground() -> Scenario {
    let inner = ROOM - POCKET_WIDTH;
    let mouth = ROOM - POCKET_DEPTH;
    let mut segments = WorldModel::rectangle(0.0, 0.0, ROOM, ROOM);
    segments.push(Segment::new(inner, ROOM, inner, mouth));
    segments.extend(WorldModel::rectangle(1.3, 1.5, 1.7, 1.9));
    Scenario {
        name: "playground".into(),
        segments,
        start_poses: vec![pose(
            "pocket",
            inner + 0.5 * POCKET_WIDTH,
            mouth - 0.1,
            FRAC_PI_2,
        )],
        cutoff: Some(Cutoff {
            a: [inner, mouth],
            b: [ROOM, mouth],
            inside: [inner + 0.5 * POCKET_WIDTH, mouth + 0.5 * POCKET_DEPTH],
        }),
        exit_clearance: None,
        duration: 300.0,
        config: ScenarioConfig::default(),
    }
}

/// An 8 m room; from the start pose nothing comes within look range for
/// the first ten seconds.
pub fn empty_room() -> Scenario {
    Scenario {
        name: "empty".into(),
        segments: WorldModel::rectangle(0.0, 0.0, 8.0, 8.0),
        start_poses: vec![pose("west", 1.0, 4.0, 0.0)],
        cutoff: None,
        exit_clearance: None,
        duration: 10.0,
        config: ScenarioConfig::default(),
    }
}

/// Rectangle centred at `(cx, cy)` rotated by `angle`.
fn rotated_rect(cx: f64, cy: f64, w: f64, h: f64, angle: f64) -> [Point; 4] {
    let (s, c) = angle.sin_cos();
    [(-w, -h), (w, -h), (w, h), (-w, h)].map(|(dx, dy)| {
        let (dx, dy) = (0.5 * dx, 0.5 * dy);
        Point::new(cx + c * dx - s * dy, cy + s * dx + c * dy)
    })
}

fn inside_convex(poly: &[Point; 4], p: Point) -> bool {
    (0..4).all(|i| {
        let (a, b) = (poly[i], poly[(i + 1) % 4]);
        (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x) >= 0.0
    })
}

/// Minimum clearance of random start poses from every wall.
pub const RANDOM_START_CLEARANCE: f64 = 0.5;
/// Side range of random rooms.
pub const ROOM_MIN: f64 = 4.0;
pub const ROOM_MAX: f64 = 6.0;

/// A closed room of 4 to 6 m per side holding one to four rectangles of 0.2
/// to 0.8 m per side at random positions and orientations. The start pose
/// has at least 0.5 m clearance and a random heading.
pub fn random_world(seed: u64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = rng.gen_range(ROOM_MIN..=ROOM_MAX);
    let h = rng.gen_range(ROOM_MIN..=ROOM_MAX);
    let mut segments = WorldModel::rectangle(0.0, 0.0, w, h);
    let mut rects = Vec::new();
    for _ in 0..rng.gen_range(1..=4) {
        let (rw, rh): (f64, f64) = (rng.gen_range(0.2..=0.8), rng.gen_range(0.2..=0.8));
        let angle = rng.gen_range(0.0..PI);
        // Keep the whole rectangle inside the room.
        let r = 0.5 * rw.hypot(rh);
        let cx = rng.gen_range(r..w - r);
        let cy = rng.gen_range(r..h - r);
        let poly = rotated_rect(cx, cy, rw, rh, angle);
        for i in 0..4 {
            let (a, b) = (poly[i], poly[(i + 1) % 4]);
            segments.push(Segment::new(a.x, a.y, b.x, b.y));
        }
        rects.push(poly);
    }
    let world = WorldModel::new(segments.clone()).expect("generated segments are valid");
    let mut start = None;
    for _ in 0..10_000 {
        let p = Point::new(rng.gen_range(0.0..w), rng.gen_range(0.0..h));
        if world.clearance(p) >= RANDOM_START_CLEARANCE
            && !rects.iter().any(|r| inside_convex(r, p))
        {
            start = Some(pose("random", p.x, p.y, rng.gen_range(-PI..PI)));
            break;
        }
    }
    let start = start.unwrap_or_else(|| {
        // Dense draw: fall back to an empty copy of the room.
        segments.truncate(4);
        pose("random", 0.5 * w, 0.5 * h, rng.gen_range(-PI..PI))
    });
    Scenario {
        name: format!("random-{seed}"),
        segments,
        start_poses: vec![start],
        cutoff: None,
        exit_clearance: None,
        duration: 300.0,
        config: ScenarioConfig::default(),
    }
}

/// Built-in scenario by name: `culdesac`, `playground`, `empty` or
/// `random-<seed>`.
pub fn by_name(name: &str) -> Option<Scenario> {
    match name {
        "culdesac" => Some(culdesac()),
        "playground" => Some(playground()),
        "empty" => Some(empty_room()),
        _ => name
            .strip_prefix("random-")
            .and_then(|s| s.parse().ok())
            .map(random_world),
    }
}
