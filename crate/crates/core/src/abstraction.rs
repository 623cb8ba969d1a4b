//! Spatial abstraction of future closed-loop task sequences.
//!
//! Instead of simulating the timed evolution of a task, the cloud is shifted
//! to where the robot would be after it and filtered against fixed bounds. A
//! non-empty partition means the corresponding future straight task would
//! meet a disturbance.

use serde::{Deserialize, Serialize};

use crate::sensing::{Observation, PointCloud};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Positive,
    Negative,
}

/// The nearest lateral disturbance on one side, if any.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LateralPartition {
    pub side: Side,
    /// At most one element after nearest-filtering.
    pub members: Vec<Observation>,
}

impl LateralPartition {
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn nearest(&self) -> Option<Observation> {
        self.members.first().copied()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LongitudinalPartition {
    pub lateral_side: Side,
    pub sign: Sign,
    /// Members in the laterally shifted frame.
    pub members: Vec<Observation>,
}

impl LongitudinalPartition {
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Pairs `(D^L, D^R)` that both lie within `d_min` of the robot.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BoxedInEvidence {
    pub pairs: Vec<(Observation, Observation)>,
}

impl BoxedInEvidence {
    pub fn is_boxed_in(&self) -> bool {
        !self.pairs.is_empty()
    }
}

/// `|x| <= d_safe` and `0 < y <= d_max` (left) or `-d_max <= y < 0` (right).
pub fn lateral_predicate(o: &Observation, d_safe: f64, d_max: f64, side: Side) -> bool {
    if o.x.abs() > d_safe {
        return false;
    }
    match side {
        Side::Left => 0.0 < o.y && o.y <= d_max,
        Side::Right => -d_max <= o.y && o.y < 0.0,
    }
}

/// Every observation passing the lateral predicate, in beam order.
pub fn lateral_candidates(
    cloud: &PointCloud,
    d_safe: f64,
    d_max: f64,
    side: Side,
) -> Vec<Observation> {
    cloud
        .iter()
        .copied()
        .filter(|o| lateral_predicate(o, d_safe, d_max, side))
        .collect()
}

/// Keeps the single member with the smallest `|y|`; the first in beam order
/// wins a tie.
pub fn filter_nearest(members: &[Observation]) -> Vec<Observation> {
    let mut best: Option<Observation> = None;
    for o in members {
        if best.is_none_or(|b| o.y.abs() < b.y.abs()) {
            best = Some(*o);
        }
    }
    best.into_iter().collect()
}

/// Lateral partition for the cloud, which the caller has already shifted by
/// the longitudinal offset.
pub fn construct_lateral(
    cloud: &PointCloud,
    d_safe: f64,
    d_max: f64,
    side: Side,
) -> LateralPartition {
    let candidates = lateral_candidates(cloud, d_safe, d_max, side);
    LateralPartition {
        side,
        members: filter_nearest(&candidates),
    }
}

/// Offset that moves the lateral disturbance to `d_safe` from the robot:
/// `D^L_y - d_safe` on the left, `D^R_y + d_safe` on the right.
pub fn lateral_offset(disturbance: &Observation, d_safe: f64, side: Side) -> f64 {
    match side {
        Side::Left => disturbance.y - d_safe,
        Side::Right => disturbance.y + d_safe,
    }
}

/// `d_safe < x <= reach` (positive) or `-reach <= x < -d_safe` (negative),
/// and `|y| <= width / 2`, with `reach = d_safe + beta * d_safe`.
pub fn longitudinal_predicate(
    o: &Observation,
    d_safe: f64,
    width: f64,
    beta: f64,
    sign: Sign,
) -> bool {
    if o.y.abs() > 0.5 * width {
        return false;
    }
    let reach = d_safe + beta * d_safe;
    match sign {
        Sign::Positive => d_safe < o.x && o.x <= reach,
        Sign::Negative => -reach <= o.x && o.x < -d_safe,
    }
}

/// Longitudinal partition after simulating a lateral displacement: each
/// observation is shifted `y <- y - delta` and then filtered. All members are
/// kept.
pub fn construct_longitudinal(
    cloud: &PointCloud,
    lateral_side: Side,
    delta: f64,
    d_safe: f64,
    width: f64,
    beta: f64,
    sign: Sign,
) -> LongitudinalPartition {
    let members = cloud
        .iter()
        .map(|o| Observation::new(o.x, o.y - delta))
        .filter(|o| longitudinal_predicate(o, d_safe, width, beta, sign))
        .collect();
    LongitudinalPartition {
        lateral_side,
        sign,
        members,
    }
}

/// Boxed-in test: every pair of lateral disturbances with `|y| <= d_min` on
/// both sides.
pub fn boxed_in(pl: &LateralPartition, pr: &LateralPartition, d_min: f64) -> BoxedInEvidence {
    debug_assert_eq!(pl.side, Side::Left);
    debug_assert_eq!(pr.side, Side::Right);
    let left = pl.members.iter().filter(|o| 0.0 < o.y && o.y <= d_min);
    let pairs = left
        .flat_map(|l| {
            pr.members
                .iter()
                .filter(|r| -d_min <= r.y && r.y < 0.0)
                .map(move |r| (*l, *r))
        })
        .collect();
    BoxedInEvidence { pairs }
}

/// Shifts every observation `x <- x - delta_plus`, placing the front
/// disturbance at the edge of the safe zone.
pub fn shift_longitudinal(cloud: &PointCloud, delta_plus: f64) -> PointCloud {
    PointCloud {
        observations: cloud
            .iter()
            .map(|o| Observation::new(o.x - delta_plus, o.y))
            .collect(),
        timestamp: cloud.timestamp,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cloud(points: &[(f64, f64)]) -> PointCloud {
        points
            .iter()
            .map(|&(x, y)| Observation::new(x, y))
            .collect()
    }

    fn mirror(c: &PointCloud) -> PointCloud {
        c.iter().map(|o| Observation::new(o.x, -o.y)).collect()
    }

    #[test]
    fn lateral_examples() {
        let p = construct_lateral(&PointCloud::default(), 0.3, 1.0, Side::Left);
        assert!(p.is_empty());
        let p = construct_lateral(&cloud(&[(0.1, 0.5), (0.0, 0.8)]), 0.3, 1.0, Side::Left);
        assert_eq!(p.members, vec![Observation::new(0.1, 0.5)]);
        let p = construct_lateral(&cloud(&[(0.1, -0.4)]), 0.3, 1.0, Side::Left);
        assert!(p.is_empty());
    }

    #[test]
    fn lateral_keeps_point_at_d_max() {
        let p = construct_lateral(&cloud(&[(0.0, 1.0)]), 0.3, 1.0, Side::Left);
        assert_eq!(p.members, vec![Observation::new(0.0, 1.0)]);
    }

    #[test]
    fn nearest_tie_keeps_first() {
        let kept = filter_nearest(&[
            Observation::new(0.2, 0.5),
            Observation::new(-0.1, 0.5),
            Observation::new(0.0, 0.7),
        ]);
        assert_eq!(kept, vec![Observation::new(0.2, 0.5)]);
    }

    #[test]
    fn longitudinal_examples() {
        let p = construct_longitudinal(
            &PointCloud::default(),
            Side::Left,
            0.3,
            0.3,
            0.6,
            2.0,
            Sign::Positive,
        );
        assert!(p.is_empty());

        let p = construct_longitudinal(
            &cloud(&[(0.8, 0.6)]),
            Side::Left,
            0.3,
            0.3,
            0.6,
            2.0,
            Sign::Positive,
        );
        assert_eq!(p.members.len(), 1);
        assert_eq!(p.members[0].x, 0.8);
        assert!((p.members[0].y - 0.3).abs() < 1e-12);

        let p = construct_longitudinal(
            &cloud(&[(-0.95, 0.3)]),
            Side::Left,
            0.3,
            0.3,
            0.6,
            2.0,
            Sign::Negative,
        );
        assert!(p.is_empty());
    }

    #[test]
    fn boxed_in_examples() {
        let pl = |pts: &[(f64, f64)]| LateralPartition {
            side: Side::Left,
            members: pts.iter().map(|&(x, y)| Observation::new(x, y)).collect(),
        };
        let pr = |pts: &[(f64, f64)]| LateralPartition {
            side: Side::Right,
            members: pts.iter().map(|&(x, y)| Observation::new(x, y)).collect(),
        };
        assert!(!boxed_in(&pl(&[]), &pr(&[(0.0, -0.4)]), 0.6).is_boxed_in());
        let e = boxed_in(&pl(&[(0.0, 0.4)]), &pr(&[(0.0, -0.35)]), 0.6);
        assert_eq!(
            e.pairs,
            vec![(Observation::new(0.0, 0.4), Observation::new(0.0, -0.35))]
        );
        assert!(!boxed_in(&pl(&[(0.0, 0.9)]), &pr(&[(0.0, -0.35)]), 0.6).is_boxed_in());
    }

    #[test]
    fn offsets_follow_the_table() {
        let dl = Observation::new(0.0, 0.8);
        let dr = Observation::new(0.0, -0.7);
        assert!((lateral_offset(&dl, 0.3, Side::Left) - 0.5).abs() < 1e-12);
        assert!((lateral_offset(&dr, 0.3, Side::Right) + 0.4).abs() < 1e-12);
    }

    fn arb_cloud() -> impl Strategy<Value = PointCloud> {
        prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 0..50).prop_map(|v| cloud(&v))
    }

    proptest! {
        // The existential first-order conditions hold exactly when the
        // partitions are non-empty.
        #[test]
        fn existential_conditions_match_emptiness(c in arb_cloud()) {
            let (d_safe, d_max, width, beta) = (0.3, 1.0, 0.6, 2.0);
            let exists_left = c.iter().any(|d| d.x.abs() <= d_safe && 0.0 < d.y && d.y <= d_max);
            let exists_right = c.iter().any(|d| d.x.abs() <= d_safe && -d_max <= d.y && d.y < 0.0);
            prop_assert_eq!(exists_left, !construct_lateral(&c, d_safe, d_max, Side::Left).is_empty());
            prop_assert_eq!(exists_right, !construct_lateral(&c, d_safe, d_max, Side::Right).is_empty());

            let reach = d_safe + beta * d_safe;
            let exists_pos = c.iter().any(|d| d_safe < d.x && d.x <= reach && d.y.abs() <= width / 2.0);
            let exists_neg = c.iter().any(|d| -reach <= d.x && d.x < -d_safe && d.y.abs() <= width / 2.0);
            let pos = construct_longitudinal(&c, Side::Left, 0.0, d_safe, width, beta, Sign::Positive);
            let neg = construct_longitudinal(&c, Side::Left, 0.0, d_safe, width, beta, Sign::Negative);
            prop_assert_eq!(exists_pos, !pos.is_empty());
            prop_assert_eq!(exists_neg, !neg.is_empty());
        }

        #[test]
        fn mirroring_swaps_sides(c in arb_cloud(), delta in -1.0f64..1.0) {
            let m = mirror(&c);
            let l = construct_lateral(&c, 0.3, 1.0, Side::Left);
            let r_m = construct_lateral(&m, 0.3, 1.0, Side::Right);
            let negated: Vec<_> = l.members.iter().map(|o| Observation::new(o.x, -o.y)).collect();
            prop_assert_eq!(negated, r_m.members);

            for sign in [Sign::Positive, Sign::Negative] {
                let a = construct_longitudinal(&c, Side::Left, delta, 0.3, 0.6, 2.0, sign);
                let b = construct_longitudinal(&m, Side::Right, -delta, 0.3, 0.6, 2.0, sign);
                prop_assert_eq!(a.members.len(), b.members.len());
                for (p, q) in a.members.iter().zip(b.members.iter()) {
                    prop_assert_eq!(p.x, q.x);
                    prop_assert!((p.y + q.y).abs() < 1e-12);
                }
            }
        }

        #[test]
        fn zero_shift_is_plain_filter(c in arb_cloud()) {
            for sign in [Sign::Positive, Sign::Negative] {
                let p = construct_longitudinal(&c, Side::Right, 0.0, 0.3, 0.6, 2.0, sign);
                let plain: Vec<_> = c.iter().copied()
                    .filter(|o| longitudinal_predicate(o, 0.3, 0.6, 2.0, sign))
                    .collect();
                prop_assert_eq!(p.members, plain);
            }
        }

        #[test]
        fn lateral_partition_is_singleton(c in arb_cloud()) {
            for side in [Side::Left, Side::Right] {
                prop_assert!(construct_lateral(&c, 0.3, 1.0, side).members.len() <= 1);
            }
        }
    }
}
