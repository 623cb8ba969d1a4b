//! Closed-loop tasks, plans and the dispatch between them.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::sensing::{
    in_look, in_safe_zone, in_shield, nearest_front, Disturbance, Observation, PointCloud,
    SafetyConfig,
};

/// Half-width of the angular window used to re-associate the tracked
/// disturbance between scans.
pub const TRACKING_WINDOW: f64 = 0.35;

/// Slack on the quarter-turn test. Rotations advance in exact multiples of
/// the beam spacing, so the accumulated bearing change lands on `pi/2` up to
/// rounding.
pub const ROTATION_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TaskKind {
    /// Default driving: straight ahead until something enters the look
    /// corridor.
    #[serde(rename = "T0")]
    Default,
    /// Finite straight driving until something enters the shield.
    #[serde(rename = "TS")]
    Straight,
    /// Quarter turn to the left.
    #[serde(rename = "TL")]
    Left,
    /// Quarter turn to the right.
    #[serde(rename = "TR")]
    Right,
}

impl TaskKind {
    pub fn is_rotation(self) -> bool {
        matches!(self, TaskKind::Left | TaskKind::Right)
    }

    pub fn is_straight(self) -> bool {
        !self.is_rotation()
    }

    /// Sign of the commanded heading change: `+1` left, `-1` right, `0`
    /// straight.
    pub fn turn_sign(self) -> f64 {
        match self {
            TaskKind::Left => 1.0,
            TaskKind::Right => -1.0,
            _ => 0.0,
        }
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TaskKind::Default => "T0",
            TaskKind::Straight => "TS",
            TaskKind::Left => "TL",
            TaskKind::Right => "TR",
        })
    }
}

/// True when `a` followed by `b` is a left/right alternation.
pub fn alternates(a: TaskKind, b: TaskKind) -> bool {
    matches!(
        (a, b),
        (TaskKind::Left, TaskKind::Right) | (TaskKind::Right, TaskKind::Left)
    )
}

/// Rotation progress, tracked on the bearing of the disturbance that
/// spawned the task.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationTracker {
    pub initial_angle: f64,
    /// Last associated bearing.
    pub bearing: f64,
    /// Unwrapped bearing change since spawn.
    pub change: f64,
    /// Bearing expected at the next scan.
    pub predicted: f64,
    pub lost: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub kind: TaskKind,
    /// `None` for straight tasks, and for a rotation spawned with nothing
    /// in view; that rotation falls back to the commanded angle.
    pub tracker: Option<RotationTracker>,
    /// Heading change commanded since spawn.
    pub commanded: f64,
}

/// Wraps an angle to `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut w = a.rem_euclid(2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    }
    w
}

impl Task {
    pub fn straight(kind: TaskKind) -> Self {
        debug_assert!(kind.is_straight());
        Self {
            kind,
            tracker: None,
            commanded: 0.0,
        }
    }

    /// Rotation task tracking a disturbance first seen at `initial_angle`.
    pub fn rotation(kind: TaskKind, initial_angle: Option<f64>) -> Self {
        debug_assert!(kind.is_rotation());
        Self {
            kind,
            tracker: initial_angle.map(|a| RotationTracker {
                initial_angle: a,
                bearing: a,
                change: 0.0,
                predicted: a,
                lost: false,
            }),
            commanded: 0.0,
        }
    }

    /// Spawns `kind`. A rotation tracks `trigger` when given, otherwise the
    /// nearest corridor point of `cloud`, otherwise the nearest point ahead.
    pub fn spawn(
        kind: TaskKind,
        trigger: Option<&Disturbance>,
        cloud: &PointCloud,
        cfg: &SafetyConfig,
    ) -> Self {
        if kind.is_straight() {
            return Self::straight(kind);
        }
        let angle = trigger
            .map(|d| d.observation().bearing())
            .or_else(|| {
                nearest_front(
                    cloud
                        .iter()
                        .filter(|o| in_shield(o, cfg) || in_look(o, cfg, cfg.d_look)),
                )
                .map(|d| d.observation().bearing())
            })
            .or_else(|| {
                cloud
                    .iter()
                    .filter(|o| o.x > 0.0)
                    .min_by(|a, b| a.range().total_cmp(&b.range()))
                    .map(Observation::bearing)
            });
        Self::rotation(kind, angle)
    }

    /// Records an executed rotation of `dtheta` radians. A static point's
    /// bearing moves opposite to the robot's heading.
    pub fn advance_rotation(&mut self, dtheta: f64) {
        self.commanded += dtheta;
        if let Some(t) = self.tracker.as_mut() {
            t.predicted = wrap_angle(t.bearing - dtheta);
        }
    }
}

/// The quarter-turn condition on bearings.
pub fn rotation_success(initial_angle: f64, current_angle: f64) -> bool {
    (current_angle - initial_angle).abs() > FRAC_PI_2
}

fn rotation_done(change: f64) -> bool {
    change.abs() > FRAC_PI_2 - ROTATION_SLACK
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskStatus {
    Running,
    Success,
    Failure,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaskOutcome {
    pub status: TaskStatus,
    pub trigger: Option<Disturbance>,
}

impl TaskOutcome {
    pub const RUNNING: TaskOutcome = TaskOutcome {
        status: TaskStatus::Running,
        trigger: None,
    };

    fn failure(trigger: Option<Disturbance>) -> Self {
        Self {
            status: TaskStatus::Failure,
            trigger,
        }
    }
}

/// Evaluates `task` against the current scan and updates its rotation
/// tracker.
///
/// `T0` fails when anything is in the look corridor or the shield; `TS`
/// fails when anything is in the shield; both otherwise keep running. A
/// rotation succeeds once its tracked bearing has turned a quarter turn
/// and reports failure while still turning.
pub fn evaluate_task(task: &mut Task, cloud: &PointCloud, cfg: &SafetyConfig) -> TaskOutcome {
    match task.kind {
        TaskKind::Default => {
            let hit = nearest_front(
                cloud
                    .iter()
                    .filter(|o| in_shield(o, cfg) || in_look(o, cfg, cfg.d_look)),
            );
            hit.map_or(TaskOutcome::RUNNING, |d| TaskOutcome::failure(Some(d)))
        }
        TaskKind::Straight => {
            let hit = nearest_front(cloud.iter().filter(|o| in_shield(o, cfg)));
            hit.map_or(TaskOutcome::RUNNING, |d| TaskOutcome::failure(Some(d)))
        }
        TaskKind::Left | TaskKind::Right => {
            let done = match task.tracker.as_mut() {
                None => rotation_done(task.commanded),
                Some(t) if t.lost => true,
                Some(t) => {
                    let nearest = cloud
                        .iter()
                        .map(|o| (o.bearing(), wrap_angle(o.bearing() - t.predicted).abs()))
                        .filter(|(_, gap)| *gap <= TRACKING_WINDOW)
                        .min_by(|a, b| a.1.total_cmp(&b.1));
                    match nearest {
                        None => {
                            // Out of view.
                            t.lost = true;
                            true
                        }
                        Some((b, _)) => {
                            t.change += wrap_angle(b - t.bearing);
                            t.bearing = b;
                            t.predicted = b;
                            rotation_done(t.change)
                        }
                    }
                }
            };
            if done {
                TaskOutcome {
                    status: TaskStatus::Success,
                    trigger: None,
                }
            } else {
                TaskOutcome::failure(None)
            }
        }
    }
}

/// True when the scan has an observation inside the safe zone.
pub fn safe_zone_violated(cloud: &PointCloud, cfg: &SafetyConfig) -> bool {
    cloud.iter().any(|o| in_safe_zone(o, cfg))
}

/// A task sequence read off an accepting path. The final task is always
/// `T0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Plan {
    pub tasks: Vec<TaskKind>,
    /// Index of the next task to hand out.
    pub cursor: usize,
}

impl Plan {
    pub fn new(tasks: Vec<TaskKind>) -> Self {
        Self { tasks, cursor: 0 }
    }

    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    /// Length in `2..=4`, ends with `T0`, no left/right alternation.
    pub fn is_well_formed(&self) -> bool {
        (2..=4).contains(&self.tasks.len())
            && self.tasks.last() == Some(&TaskKind::Default)
            && !self.tasks.windows(2).any(|w| alternates(w[0], w[1]))
    }

    pub fn next_task(&mut self) -> Option<TaskKind> {
        let t = self.tasks.get(self.cursor).copied();
        if t.is_some() {
            self.cursor += 1;
        }
        t
    }

    pub fn is_exhausted(&self) -> bool {
        self.cursor >= self.tasks.len()
    }
}

impl fmt::Display for Plan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.tasks.iter().map(ToString::to_string).collect();
        write!(f, "[{}]", names.join(", "))
    }
}

/// What the agent does after evaluating its current task.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Dispatch {
    /// Keep executing the current task.
    Continue,
    /// Switch to this task; `trigger` is the disturbance that caused the
    /// switch, if any.
    Next {
        kind: TaskKind,
        trigger: Option<Disturbance>,
    },
    /// Plan around this front disturbance.
    Replan(Disturbance),
    /// Fail-safe halt.
    Stop,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentState {
    pub plan: Option<Plan>,
    pub current: Task,
    pub stopped: bool,
}

impl Default for AgentState {
    fn default() -> Self {
        Self {
            plan: None,
            current: Task::straight(TaskKind::Default),
            stopped: false,
        }
    }
}

/// Pops the next plan task, clearing the plan when its final `T0` is
/// reached or it has run out.
fn advance(state: &mut AgentState) -> TaskKind {
    let next = state.plan.as_mut().and_then(Plan::next_task);
    match next {
        Some(TaskKind::Default) | None => {
            state.plan = None;
            TaskKind::Default
        }
        Some(k) => k,
    }
}

/// Dispatch for the model-checking agent. Advances the plan cursor as a side
/// effect; the caller applies the returned action.
pub fn step_agent(state: &mut AgentState, outcome: &TaskOutcome) -> Dispatch {
    use TaskStatus::*;
    match (state.current.kind, outcome.status) {
        (TaskKind::Default, Failure) => match outcome.trigger {
            Some(d) => Dispatch::Replan(d),
            None => Dispatch::Continue,
        },
        (TaskKind::Straight, Failure) => {
            if state.plan.as_ref().is_none_or(Plan::is_exhausted) {
                state.plan = None;
                Dispatch::Stop
            } else {
                Dispatch::Next {
                    kind: advance(state),
                    trigger: outcome.trigger,
                }
            }
        }
        (k, Success) if k.is_rotation() => Dispatch::Next {
            kind: advance(state),
            trigger: None,
        },
        _ => Dispatch::Continue,
    }
}
