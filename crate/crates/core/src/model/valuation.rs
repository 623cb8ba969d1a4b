use serde::{Deserialize, Serialize};

use super::dts::*;
use super::nfa::Props;
use crate::abstraction::{BoxedInEvidence, LateralPartition, LongitudinalPartition};
use crate::sensing::SafetyConfig;

/// The four longitudinal partitions of the four-step stage, with the lateral
/// offsets they were built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LongitudinalSet {
    pub delta_left: f64,
    pub delta_right: f64,
    pub left_positive: LongitudinalPartition,
    pub left_negative: LongitudinalPartition,
    pub right_positive: LongitudinalPartition,
    pub right_negative: LongitudinalPartition,
}

/// Runtime labelling of the transition system for one planning cycle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Valuation {
    pub labels: [Props; StateId::COUNT],
    pub coordinates: [(Option<f64>, Option<f64>); StateId::COUNT],
}

impl Valuation {
    pub fn label(&self, s: StateId) -> Props {
        self.labels[s.index()]
    }

    pub fn coordinates(&self, s: StateId) -> (Option<f64>, Option<f64>) {
        self.coordinates[s.index()]
    }

    /// Labels given directly, with the fixed coordinates of `dts`. Used for
    /// exhaustive checks over label assignments.
    pub fn from_labels(dts: &Dts, labels: [Props; StateId::COUNT]) -> Self {
        let mut coordinates = [(None, None); StateId::COUNT];
        for s in &dts.states {
            coordinates[s.id.index()] = (s.x, s.y);
        }
        Self {
            labels,
            coordinates,
        }
    }
}

/// `horizon` holds iff a valued coordinate is infinite.
pub fn horizon_holds(x: Option<f64>, y: Option<f64>) -> bool {
    [x, y].into_iter().flatten().any(f64::is_infinite)
}

/// `safe` holds if (i) one finite coordinate has magnitude `d_safe`, (ii)
/// the lateral coordinate is finite and beyond `d_min` with no longitudinal
/// extent, or (iii) `horizon` holds.
pub fn safe_holds(x: Option<f64>, y: Option<f64>, cfg: &SafetyConfig) -> bool {
    let one_at_d_safe = [x, y]
        .into_iter()
        .flatten()
        .any(|c| c.is_finite() && c.abs() == cfg.d_safe);
    let lateral_room = matches!((x, y), (Some(lon), Some(lat))
        if lon == 0.0 && lat.is_finite() && lat != 0.0 && lat.abs() > cfg.d_min);
    one_at_d_safe || lateral_room || horizon_holds(x, y)
}

/// Values the transition system from the partitions of the current cloud.
/// `longs` is `None` when planning returned before the four-step stage; the
/// longitudinal states then stay unvalued and unlabelled.
pub fn valuate(
    dts: &Dts,
    pl: &LateralPartition,
    pr: &LateralPartition,
    boxed: &BoxedInEvidence,
    longs: Option<&LongitudinalSet>,
    cfg: &SafetyConfig,
) -> Valuation {
    let mut coordinates = [(None, None); StateId::COUNT];
    for s in &dts.states {
        coordinates[s.id.index()] = (s.x, s.y);
    }
    let mut set = |s: StateId, x: Option<f64>, y: Option<f64>| coordinates[s.index()] = (x, y);

    set(
        S3,
        Some(0.0),
        Some(pl.nearest().map_or(f64::INFINITY, |d| d.y)),
    );
    set(
        S4,
        Some(0.0),
        Some(pr.nearest().map_or(f64::NEG_INFINITY, |d| d.y)),
    );

    if let Some(l) = longs {
        let d = cfg.d_safe;
        let reach = cfg.longitudinal_reach();
        let far = |p: &LongitudinalPartition, inf: f64, finite: f64| {
            Some(if p.is_empty() { inf } else { finite })
        };
        set(S5, Some(d), Some(l.delta_left));
        set(S9, Some(-d), Some(l.delta_left));
        set(S6, Some(d), Some(l.delta_right));
        set(S10, Some(-d), Some(l.delta_right));
        set(
            S7,
            far(&l.left_positive, f64::INFINITY, reach),
            Some(l.delta_left),
        );
        set(
            S11,
            far(&l.left_negative, f64::NEG_INFINITY, -reach),
            Some(l.delta_left),
        );
        set(
            S8,
            far(&l.right_positive, f64::INFINITY, reach),
            Some(l.delta_right),
        );
        set(
            S12,
            far(&l.right_negative, f64::NEG_INFINITY, -reach),
            Some(l.delta_right),
        );
    }

    let mut labels = [Props::EMPTY; StateId::COUNT];
    for s in StateId::all() {
        let (x, y) = coordinates[s.index()];
        // Unvalued states keep no labels.
        if x.is_none() || y.is_none() {
            continue;
        }
        let mut p = Props::EMPTY;
        if horizon_holds(x, y) {
            p = p.with(Props::HORIZON);
        }
        if safe_holds(x, y, cfg) {
            p = p.with(Props::SAFE);
        }
        labels[s.index()] = p;
    }
    // s14 has only finite coordinates, so it can never be a horizon state
    // by the coordinate rule; being boxed in is what makes it one.
    labels[S14.index()] = if boxed.is_boxed_in() {
        Props::SAFE.with(Props::HORIZON)
    } else {
        labels[S14.index()]
    };

    Valuation {
        labels,
        coordinates,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abstraction::{Side, Sign};
    use crate::sensing::Observation;

    fn lateral(side: Side, y: Option<f64>) -> LateralPartition {
        LateralPartition {
            side,
            members: y.map(|y| Observation::new(0.0, y)).into_iter().collect(),
        }
    }

    fn long(side: Side, sign: Sign, occupied: bool) -> LongitudinalPartition {
        LongitudinalPartition {
            lateral_side: side,
            sign,
            members: if occupied {
                vec![Observation::new(0.5, 0.0)]
            } else {
                vec![]
            },
        }
    }

    #[test]
    fn empty_laterals_are_safe_horizons() {
        let cfg = SafetyConfig::default();
        let dts = build_dts(&cfg);
        let v = valuate(
            &dts,
            &lateral(Side::Left, None),
            &lateral(Side::Right, None),
            &BoxedInEvidence::default(),
            None,
            &cfg,
        );
        let both = Props::SAFE.with(Props::HORIZON);
        assert_eq!(v.label(S3), both);
        assert_eq!(v.label(S4), both);
        assert_eq!(v.label(S0), Props::SAFE);
        assert_eq!(v.label(S7), Props::EMPTY);
        assert_eq!(v.label(S14), Props::EMPTY);
    }

    #[test]
    fn distant_lateral_is_safe_without_horizon() {
        let cfg = SafetyConfig::default();
        let dts = build_dts(&cfg);
        let v = valuate(
            &dts,
            &lateral(Side::Left, Some(0.8)),
            &lateral(Side::Right, Some(-0.4)),
            &BoxedInEvidence::default(),
            None,
            &cfg,
        );
        assert_eq!(v.label(S3), Props::SAFE);
        assert_eq!(v.coordinates(S3), (Some(0.0), Some(0.8)));
        // 0.4 is within d_min: neither safe nor horizon.
        assert_eq!(v.label(S4), Props::EMPTY);
    }

    #[test]
    fn boxed_in_grants_s14() {
        let cfg = SafetyConfig::default();
        let dts = build_dts(&cfg);
        let pl = lateral(Side::Left, Some(0.4));
        let pr = lateral(Side::Right, Some(-0.35));
        let boxed = crate::abstraction::boxed_in(&pl, &pr, cfg.d_min);
        let v = valuate(&dts, &pl, &pr, &boxed, None, &cfg);
        assert_eq!(v.label(S14), Props::SAFE.with(Props::HORIZON));
        assert_eq!(v.label(S13), Props::SAFE);
    }

    #[test]
    fn four_step_configuration() {
        let cfg = SafetyConfig::default();
        let dts = build_dts(&cfg);
        let pl = lateral(Side::Left, Some(0.8));
        let pr = lateral(Side::Right, Some(-0.9));
        let longs = LongitudinalSet {
            delta_left: 0.5,
            delta_right: -0.6,
            left_positive: long(Side::Left, Sign::Positive, false),
            left_negative: long(Side::Left, Sign::Negative, false),
            right_positive: long(Side::Right, Sign::Positive, true),
            right_negative: long(Side::Right, Sign::Negative, true),
        };
        let v = valuate(
            &dts,
            &pl,
            &pr,
            &BoxedInEvidence::default(),
            Some(&longs),
            &cfg,
        );
        let both = Props::SAFE.with(Props::HORIZON);
        assert_eq!(v.label(S7), both);
        assert_eq!(v.label(S11), both);
        assert_eq!(v.coordinates(S7), (Some(f64::INFINITY), Some(0.5)));
        assert_eq!(v.coordinates(S11).0, Some(f64::NEG_INFINITY));
        assert!(!v.label(S8).contains(Props::HORIZON));
        assert!(!v.label(S12).contains(Props::HORIZON));
        for s in [S0, S1, S2, S3, S4, S5, S6, S9, S10, S13] {
            assert!(v.label(s).contains(Props::SAFE), "{s} should be safe");
        }
    }
}
