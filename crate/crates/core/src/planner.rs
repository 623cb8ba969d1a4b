//! Plan generation: shift the scan to the front disturbance, build the
//! partitions in order of increasing plan length, assemble the terminal set
//! and search the product.

use std::collections::BTreeSet;
use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::abstraction::{
    boxed_in, construct_lateral, construct_longitudinal, lateral_offset, shift_longitudinal,
    BoxedInEvidence, LateralPartition, Side, Sign,
};
use crate::model::dts::{build_dts, StateId, S11, S12, S14, S3, S4, S7, S8};
use crate::model::{
    extract_plan, product_search, valuate, ChildOrder, LongitudinalSet, Nfa, ProductPath,
};
use crate::sensing::{Disturbance, PointCloud, SafetyConfig};
use crate::tasks::Plan;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanRequest {
    pub cloud: PointCloud,
    pub d_plus: Disturbance,
    pub cfg: SafetyConfig,
    pub order: ChildOrder,
}

/// Which branch returned; the value is the plan length it yields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    /// A lateral side is free.
    Lateral,
    /// Boxed in on both sides.
    BoxedIn,
    /// Sideways then forwards or backwards.
    Longitudinal,
}

impl Stage {
    pub fn plan_len(self) -> usize {
        match self {
            Stage::Lateral => 2,
            Stage::BoxedIn => 3,
            Stage::Longitudinal => 4,
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-step", self.plan_len())
    }
}

/// Partitions computed while planning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionSnapshot {
    pub delta_plus: f64,
    pub left: LateralPartition,
    pub right: LateralPartition,
    pub boxed_in: BoxedInEvidence,
    pub longitudinal: Option<LongitudinalSet>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanResult {
    /// `None` when no safe sequence exists; the robot must stop.
    pub plan: Option<Plan>,
    pub stage: Stage,
    pub terminals: BTreeSet<StateId>,
    pub latency_ms: f64,
    pub snapshot: PartitionSnapshot,
    pub path: Option<ProductPath>,
}

/// `D+_x - d_safe` when the disturbance lies beyond the safe zone, else 0.
pub fn delta_plus(d_plus: &Disturbance, d_safe: f64) -> f64 {
    if d_plus.x > d_safe {
        d_plus.x - d_safe
    } else {
        0.0
    }
}

/// How far beyond the safe-zone boundary the shifted front disturbance
/// lands. The shield only ever detects it strictly beyond `d_safe`; the
/// margin keeps a wall perpendicular to the heading out of the lateral band
/// regardless of rounding.
pub const FRONT_MARGIN: f64 = 1e-6;

pub fn plan_generate(req: &PlanRequest) -> PlanResult {
    let start = Instant::now();
    let cfg = &req.cfg;
    let dts = build_dts(cfg);
    let nfa = Nfa::safe_until_horizon();

    let dp = delta_plus(&req.d_plus, cfg.d_safe);
    let shift = if dp > 0.0 { dp - FRONT_MARGIN } else { 0.0 };
    let cloud = shift_longitudinal(&req.cloud, shift);
    let left = construct_lateral(&cloud, cfg.d_safe, cfg.d_max, Side::Left);
    let right = construct_lateral(&cloud, cfg.d_safe, cfg.d_max, Side::Right);
    let boxed = boxed_in(&left, &right, cfg.d_min);

    let mut terminals = BTreeSet::new();
    let mut longitudinal = None;
    let stage = if left.is_empty() || right.is_empty() {
        if left.is_empty() {
            terminals.insert(S3);
        }
        if right.is_empty() {
            terminals.insert(S4);
        }
        Stage::Lateral
    } else if boxed.is_boxed_in() {
        terminals.insert(S14);
        Stage::BoxedIn
    } else {
        let dl = left.nearest().expect("non-empty");
        let dr = right.nearest().expect("non-empty");
        let delta_left = lateral_offset(&dl, cfg.d_safe, Side::Left);
        let delta_right = lateral_offset(&dr, cfg.d_safe, Side::Right);
        let long = |side, delta, sign| {
            construct_longitudinal(&cloud, side, delta, cfg.d_safe, cfg.width, cfg.beta, sign)
        };
        let set = LongitudinalSet {
            delta_left,
            delta_right,
            left_positive: long(Side::Left, delta_left, Sign::Positive),
            left_negative: long(Side::Left, delta_left, Sign::Negative),
            right_positive: long(Side::Right, delta_right, Sign::Positive),
            right_negative: long(Side::Right, delta_right, Sign::Negative),
        };
        for (p, s) in [
            (&set.left_positive, S7),
            (&set.left_negative, S11),
            (&set.right_positive, S8),
            (&set.right_negative, S12),
        ] {
            if p.is_empty() {
                terminals.insert(s);
            }
        }
        longitudinal = Some(set);
        Stage::Longitudinal
    };

    let val = valuate(&dts, &left, &right, &boxed, longitudinal.as_ref(), cfg);
    let path = if terminals.is_empty() {
        None
    } else {
        product_search(&dts, &val, &nfa, &terminals, req.order)
    };
    let plan = path.as_ref().map(extract_plan);
    let latency_ms = start.elapsed().as_secs_f64() * 1e3;
    PlanResult {
        plan,
        stage,
        terminals,
        latency_ms,
        snapshot: PartitionSnapshot {
            delta_plus: dp,
            left,
            right,
            boxed_in: boxed,
            longitudinal,
        },
        path,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sensing::Observation;
    use crate::tasks::TaskKind::*;

    fn request(points: &[(f64, f64)], order: ChildOrder) -> PlanRequest {
        let cloud: PointCloud = points
            .iter()
            .map(|&(x, y)| Observation::new(x, y))
            .collect();
        let cfg = SafetyConfig::default();
        let d_plus = crate::sensing::nearest_front(
            cloud
                .iter()
                .filter(|o| crate::sensing::in_look(o, &cfg, cfg.d_look)),
        )
        .expect("front disturbance");
        PlanRequest {
            cloud,
            d_plus,
            cfg,
            order,
        }
    }

    fn wall_x(x: f64, y0: f64, y1: f64) -> Vec<(f64, f64)> {
        let n = ((y1 - y0) / 0.02).round() as usize;
        (0..=n).map(|i| (x, y0 + 0.02 * i as f64)).collect()
    }

    fn wall_y(y: f64, x0: f64, x1: f64) -> Vec<(f64, f64)> {
        let n = ((x1 - x0) / 0.02).round() as usize;
        (0..=n).map(|i| (x0 + 0.02 * i as f64, y)).collect()
    }

    #[test]
    fn single_front_wall_turns_left() {
        let r = plan_generate(&request(&wall_x(0.9, -0.5, 0.5), ChildOrder::Left));
        assert_eq!(r.stage, Stage::Lateral);
        assert_eq!(r.terminals, BTreeSet::from([S3, S4]));
        assert_eq!(r.plan.unwrap().tasks, vec![Left, Default]);
        assert!((r.snapshot.delta_plus - 0.6).abs() < 1e-12);
    }

    #[test]
    fn narrow_corridor_turns_around() {
        let mut pts = wall_x(0.9, -0.4, 0.4);
        pts.extend(wall_y(0.45, -1.0, 0.9));
        pts.extend(wall_y(-0.45, -1.0, 0.9));
        let r = plan_generate(&request(&pts, ChildOrder::Left));
        assert_eq!(r.stage, Stage::BoxedIn);
        assert_eq!(r.plan.unwrap().tasks, vec![Left, Left, Default]);
        let r = plan_generate(&request(&pts, ChildOrder::Right));
        assert_eq!(r.plan.unwrap().tasks, vec![Right, Right, Default]);
    }

    #[test]
    fn corner_turns_away_from_the_side_wall() {
        let mut pts = wall_x(0.9, -0.8, 1.2);
        pts.extend(wall_y(-0.8, -1.0, 0.9));
        let r = plan_generate(&request(&pts, ChildOrder::Left));
        assert!(!r.snapshot.right.is_empty() && r.snapshot.left.is_empty());
        assert_eq!(r.plan.unwrap().tasks, vec![Left, Default]);
        let mirrored: Vec<_> = pts.iter().map(|&(x, y)| (x, -y)).collect();
        let r = plan_generate(&request(&mirrored, ChildOrder::Left));
        assert_eq!(r.plan.unwrap().tasks, vec![Right, Default]);
    }

    #[test]
    fn walls_on_both_sides_beyond_d_min_give_four_steps() {
        let mut pts = wall_x(0.9, -0.1, 0.1);
        // Lateral walls at 0.8 m, open both ways after the sidestep.
        pts.extend(wall_y(0.8, 0.5, 0.88));
        pts.extend(wall_y(-0.8, 0.5, 0.88));
        let r = plan_generate(&request(&pts, ChildOrder::Left));
        assert_eq!(r.stage, Stage::Longitudinal);
        let plan = r.plan.unwrap();
        assert_eq!(plan.len(), 4);
        assert_eq!(plan.tasks, vec![Left, Straight, Right, Default]);
        assert_eq!(r.terminals, BTreeSet::from([S7, S8, S11, S12]));
    }

    #[test]
    fn fully_enclosed_pocket_has_no_plan() {
        // Laterals beyond d_min but the sidestep lands in front of and
        // behind walls on both sides.
        let mut pts = wall_x(0.9, -1.2, 1.2);
        pts.extend(wall_y(0.8, -0.3, 0.9));
        pts.extend(wall_y(-0.8, -0.3, 0.9));
        pts.extend(wall_x(-0.3, -1.2, 1.2));
        let r = plan_generate(&request(&pts, ChildOrder::Left));
        assert_eq!(r.stage, Stage::Longitudinal);
        assert!(r.terminals.is_empty());
        assert!(r.plan.is_none());
    }

    #[test]
    fn close_front_needs_no_shift() {
        let r = plan_generate(&request(&wall_x(0.8, -0.2, 0.2), ChildOrder::Left));
        assert!((r.snapshot.delta_plus - 0.5).abs() < 1e-12);
        let mut req = request(&wall_x(0.8, -0.2, 0.2), ChildOrder::Left);
        req.d_plus = Disturbance::front(Observation::new(0.25, 0.0));
        assert_eq!(plan_generate(&req).snapshot.delta_plus, 0.0);
    }
}
