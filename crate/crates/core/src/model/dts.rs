use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::sensing::SafetyConfig;
use crate::tasks::TaskKind;

/// Index of a state in the disturbance-focused transition system, `0..15`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StateId(pub u8);

impl StateId {
    pub const COUNT: usize = 15;

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn all() -> impl Iterator<Item = StateId> {
        (0..Self::COUNT as u8).map(StateId)
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.0)
    }
}

pub const S0: StateId = StateId(0);
pub const S1: StateId = StateId(1);
pub const S2: StateId = StateId(2);
pub const S3: StateId = StateId(3);
pub const S4: StateId = StateId(4);
pub const S5: StateId = StateId(5);
pub const S6: StateId = StateId(6);
pub const S7: StateId = StateId(7);
pub const S8: StateId = StateId(8);
pub const S9: StateId = StateId(9);
pub const S10: StateId = StateId(10);
pub const S11: StateId = StateId(11);
pub const S12: StateId = StateId(12);
pub const S13: StateId = StateId(13);
pub const S14: StateId = StateId(14);

/// States that can end a plan.
pub const TERMINAL_CANDIDATES: [StateId; 7] = [S3, S4, S7, S8, S11, S12, S14];

/// A state relative to the robot at planning time. Coordinates are `None`
/// until valued and may be infinite once valued.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DtsState {
    pub id: StateId,
    pub x: Option<f64>,
    pub y: Option<f64>,
    pub heading: f64,
}

/// Task on an edge. The lateral straight edges `s1 -> s3` and `s2 -> s4`
/// carry `T0` when the target is a horizon state and `TS` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeTask {
    Fixed(TaskKind),
    LateralStraight,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub from: StateId,
    pub task: EdgeTask,
    pub to: StateId,
}

/// The fixed tree-shaped transition system. Built once per configuration
/// and shared read-only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dts {
    pub states: Vec<DtsState>,
    pub edges: Vec<Edge>,
    pub initial: StateId,
}

const fn fixed(from: StateId, task: TaskKind, to: StateId) -> Edge {
    Edge {
        from,
        task: EdgeTask::Fixed(task),
        to,
    }
}

const EDGES: [Edge; 15] = [
    fixed(S0, TaskKind::Left, S1),
    fixed(S0, TaskKind::Right, S2),
    Edge {
        from: S1,
        task: EdgeTask::LateralStraight,
        to: S3,
    },
    fixed(S1, TaskKind::Left, S13),
    Edge {
        from: S2,
        task: EdgeTask::LateralStraight,
        to: S4,
    },
    fixed(S2, TaskKind::Right, S13),
    fixed(S13, TaskKind::Default, S14),
    fixed(S3, TaskKind::Right, S5),
    fixed(S3, TaskKind::Left, S9),
    fixed(S4, TaskKind::Left, S6),
    fixed(S4, TaskKind::Right, S10),
    fixed(S5, TaskKind::Default, S7),
    fixed(S9, TaskKind::Default, S11),
    fixed(S6, TaskKind::Default, S8),
    fixed(S10, TaskKind::Default, S12),
];

pub fn build_dts(cfg: &SafetyConfig) -> Dts {
    let d = cfg.d_safe;
    let reach = cfg.longitudinal_reach();
    let state =
        |id: StateId, x: Option<f64>, y: Option<f64>, heading: f64| DtsState { id, x, y, heading };
    // Variable coordinates stay `None` here; the valuation fills them in.
    let states = vec![
        state(S0, Some(d), Some(0.0), 0.0),
        state(S1, Some(0.0), Some(d), FRAC_PI_2),
        state(S2, Some(0.0), Some(-d), -FRAC_PI_2),
        state(S3, Some(0.0), None, FRAC_PI_2),
        state(S4, Some(0.0), None, -FRAC_PI_2),
        state(S5, Some(d), None, 0.0),
        state(S6, Some(d), None, 0.0),
        state(S7, None, None, 0.0),
        state(S8, None, None, 0.0),
        state(S9, Some(-d), None, PI),
        state(S10, Some(-d), None, PI),
        state(S11, None, None, PI),
        state(S12, None, None, PI),
        state(S13, Some(-d), Some(0.0), PI),
        state(S14, Some(-reach), Some(0.0), PI),
    ];
    Dts {
        states,
        edges: EDGES.to_vec(),
        initial: S0,
    }
}

impl Dts {
    pub fn state(&self, id: StateId) -> &DtsState {
        &self.states[id.index()]
    }

    /// Outgoing edges in state-index order of their targets.
    pub fn successors(&self, id: StateId) -> impl Iterator<Item = &Edge> {
        let mut out: Vec<&Edge> = self.edges.iter().filter(|e| e.from == id).collect();
        out.sort_by_key(|e| e.to);
        out.into_iter()
    }

    pub fn edge(&self, from: StateId, to: StateId) -> Option<&Edge> {
        self.edges.iter().find(|e| e.from == from && e.to == to)
    }

    pub fn is_leaf(&self, id: StateId) -> bool {
        !self.edges.iter().any(|e| e.from == id)
    }

    /// Every root-to-leaf path, depth first in state-index order.
    pub fn root_to_leaf_paths(&self) -> Vec<Vec<StateId>> {
        fn walk(dts: &Dts, path: &mut Vec<StateId>, out: &mut Vec<Vec<StateId>>) {
            let last = *path.last().expect("non-empty path");
            if dts.is_leaf(last) {
                out.push(path.clone());
                return;
            }
            for e in dts.successors(last) {
                path.push(e.to);
                walk(dts, path, out);
                path.pop();
            }
        }
        let mut out = Vec::new();
        walk(self, &mut vec![self.initial], &mut out);
        out
    }
}
