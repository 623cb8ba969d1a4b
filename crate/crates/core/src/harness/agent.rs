//! The two controllers compared in the experiments: a single-task reflex
//! and the model-checking planner.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::ChildOrder;
use crate::planner::{plan_generate, PlanRequest, PlanResult};
use crate::sensing::{in_shield, nearest_front, PointCloud, SafetyConfig};
use crate::sim::Command;
use crate::tasks::{
    evaluate_task, safe_zone_violated, step_agent, AgentState, Dispatch, Task, TaskKind, TaskStatus,
};

/// Bound on task switches within one control step.
const MAX_SWITCHES_PER_STEP: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AgentKind {
    Baseline,
    Mc,
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AgentKind::Baseline => "baseline",
            AgentKind::Mc => "mc",
        })
    }
}

impl FromStr for AgentKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "baseline" => Ok(Self::Baseline),
            "mc" => Ok(Self::Mc),
            _ => Err(format!("unknown agent `{s}` (expected baseline or mc)")),
        }
    }
}

/// Turn preference. For the planner it orders the search; for the reflex
/// it is the turn direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preference {
    Left,
    Right,
    Random,
}

impl fmt::Display for Preference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preference::Left => "left",
            Preference::Right => "right",
            Preference::Random => "random",
        })
    }
}

impl FromStr for Preference {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "left" => Ok(Self::Left),
            "right" => Ok(Self::Right),
            "random" => Ok(Self::Random),
            _ => Err(format!(
                "unknown preference `{s}` (expected left, right or random)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SwitchReason {
    /// Something entered the look corridor during `T0`.
    Look,
    /// Something entered the shield.
    Shield,
    /// A rotation finished.
    Rotated,
    /// A new plan starts with its implicit straight prefix.
    Planned,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Switch {
    pub from: TaskKind,
    pub to: TaskKind,
    pub reason: SwitchReason,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// Shield occupied with no plan to follow.
    ShieldWithoutPlan,
    /// The planner found no safe sequence.
    NoPlan,
    /// An observation inside the safe zone at the start of a straight task.
    DeepIntrusion,
    /// Dispatch did not settle within one step.
    Livelock,
}

/// What the agent decided for one control step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub command: Command,
    pub switches: Vec<Switch>,
    pub plans: Vec<PlanResult>,
    pub stop: Option<StopReason>,
}

#[derive(Debug, Clone)]
pub struct Agent {
    pub kind: AgentKind,
    pub prefer: Preference,
    pub cfg: SafetyConfig,
    pub omega: f64,
    pub state: AgentState,
    stop: Option<StopReason>,
    rng: ChaCha8Rng,
    replans: u64,
}

impl Agent {
    pub fn new(
        kind: AgentKind,
        prefer: Preference,
        cfg: SafetyConfig,
        omega: f64,
        seed: u64,
    ) -> Self {
        Self {
            kind,
            prefer,
            cfg,
            omega,
            state: AgentState::default(),
            stop: None,
            rng: ChaCha8Rng::seed_from_u64(seed),
            replans: 0,
        }
    }

    pub fn current(&self) -> TaskKind {
        self.state.current.kind
    }

    pub fn stopped(&self) -> Option<StopReason> {
        self.stop
    }

    fn command_for(&self, kind: TaskKind) -> Command {
        match kind {
            TaskKind::Default | TaskKind::Straight => Command::Straight { v: self.cfg.v },
            TaskKind::Left => Command::Rotate { omega: self.omega },
            TaskKind::Right => Command::Rotate { omega: -self.omega },
        }
    }

    fn halt(&mut self, reason: StopReason, mut d: Decision) -> Decision {
        self.stop = Some(reason);
        self.state.stopped = true;
        d.command = Command::Hold;
        d.stop = Some(reason);
        d
    }

    /// Evaluates the scan and picks this step's command.
    pub fn decide(&mut self, cloud: &PointCloud) -> Decision {
        let mut d = Decision {
            command: Command::Hold,
            switches: Vec::new(),
            plans: Vec::new(),
            stop: self.stop,
        };
        if self.stop.is_some() {
            return d;
        }
        let r = match self.kind {
            AgentKind::Mc => self.decide_mc(cloud, &mut d),
            AgentKind::Baseline => self.decide_baseline(cloud, &mut d),
        };
        if let Err(reason) = r {
            return self.halt(reason, d);
        }
        if self.current().is_straight() && safe_zone_violated(cloud, &self.cfg) {
            return self.halt(StopReason::DeepIntrusion, d);
        }
        d.command = self.command_for(self.current());
        d
    }

    fn switch(&mut self, d: &mut Decision, task: Task, reason: SwitchReason) {
        d.switches.push(Switch {
            from: self.state.current.kind,
            to: task.kind,
            reason,
        });
        self.state.current = task;
    }

    fn order(&mut self) -> ChildOrder {
        self.replans += 1;
        match self.prefer {
            Preference::Left => ChildOrder::Left,
            Preference::Right => ChildOrder::Right,
            Preference::Random => ChildOrder::Seeded(self.rng.gen()),
        }
    }

    fn decide_mc(&mut self, cloud: &PointCloud, d: &mut Decision) -> Result<(), StopReason> {
        for _ in 0..MAX_SWITCHES_PER_STEP {
            let outcome = evaluate_task(&mut self.state.current, cloud, &self.cfg);
            let from = self.state.current.kind;
            match step_agent(&mut self.state, &outcome) {
                Dispatch::Continue => return Ok(()),
                Dispatch::Stop => return Err(StopReason::ShieldWithoutPlan),
                Dispatch::Replan(dp) => {
                    let req = PlanRequest {
                        cloud: cloud.clone(),
                        d_plus: dp,
                        cfg: self.cfg,
                        order: self.order(),
                    };
                    let result = plan_generate(&req);
                    let plan = result.plan.clone();
                    d.plans.push(result);
                    match plan {
                        None => return Err(StopReason::NoPlan),
                        Some(p) => {
                            self.state.plan = Some(p);
                            self.switch(
                                d,
                                Task::straight(TaskKind::Straight),
                                SwitchReason::Planned,
                            );
                        }
                    }
                }
                Dispatch::Next { kind, trigger } => {
                    let reason = match from {
                        k if k.is_rotation() => SwitchReason::Rotated,
                        _ => SwitchReason::Shield,
                    };
                    let task = Task::spawn(kind, trigger.as_ref(), cloud, &self.cfg);
                    self.switch(d, task, reason);
                }
            }
        }
        Err(StopReason::Livelock)
    }

    /// One avoid task per disturbance, triggered by the shield alone.
    fn decide_baseline(&mut self, cloud: &PointCloud, d: &mut Decision) -> Result<(), StopReason> {
        for _ in 0..MAX_SWITCHES_PER_STEP {
            match self.state.current.kind {
                TaskKind::Default | TaskKind::Straight => {
                    let hit = nearest_front(cloud.iter().filter(|o| in_shield(o, &self.cfg)));
                    let Some(hit) = hit else { return Ok(()) };
                    let kind = match self.prefer {
                        Preference::Left => TaskKind::Left,
                        Preference::Right => TaskKind::Right,
                        Preference::Random => {
                            if self.rng.gen::<bool>() {
                                TaskKind::Left
                            } else {
                                TaskKind::Right
                            }
                        }
                    };
                    let task = Task::spawn(kind, Some(&hit), cloud, &self.cfg);
                    self.switch(d, task, SwitchReason::Shield);
                }
                TaskKind::Left | TaskKind::Right => {
                    let outcome = evaluate_task(&mut self.state.current, cloud, &self.cfg);
                    if outcome.status != TaskStatus::Success {
                        return Ok(());
                    }
                    self.switch(d, Task::straight(TaskKind::Default), SwitchReason::Rotated);
                }
            }
        }
        Err(StopReason::Livelock)
    }

    /// Feeds back the executed command.
    pub fn actuated(&mut self, command: Command, dt: f64) {
        if let Command::Rotate { omega } = command {
            self.state.current.advance_rotation(omega * dt);
        }
    }
}
