//! The closed loop: scan, decide, actuate, check collisions.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::agent::{Agent, AgentKind, Preference, StopReason, SwitchReason};
use super::scenario::{Cutoff, Scenario, ScenarioConfig};
use crate::error::ConfigError;
use crate::planner::PlanResult;
use crate::sensing::{in_safe_zone, in_shield};
use crate::sim::{check_collision, raycast_scan, step_kinematics, Command, RobotState};
use crate::tasks::TaskKind;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub scenario: String,
    pub start: String,
    pub agent: AgentKind,
    pub prefer: Preference,
    pub seed: u64,
    pub duration: f64,
    pub config: ScenarioConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<Cutoff>,
    /// Pose at `t = 0`.
    pub initial: Pose,
}

/// One control step, numbered from 0. `safe` and `shield` count the
/// observations of the step's scan in those partitions; `task` is the task
/// that was actuated; `t` and the pose are those reached after actuation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: u64,
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub task: TaskKind,
    pub command: Command,
    pub safe: usize,
    pub shield: usize,
    pub collision: bool,
}

impl StepRecord {
    pub fn pose(&self) -> Pose {
        Pose {
            t: self.t,
            x: self.x,
            y: self.y,
            theta: self.theta,
        }
    }
}

/// A task switch, stamped with the step whose scan caused it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaskEvent {
    pub step: u64,
    pub t: f64,
    pub from: TaskKind,
    pub to: TaskKind,
    pub reason: SwitchReason,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanEvent {
    pub step: u64,
    pub t: f64,
    pub result: PlanResult,
}

/// Onset of contact with a wall.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollisionEvent {
    pub step: u64,
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "why")]
pub enum EndReason {
    Duration,
    Exit,
    Stopped(StopReason),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndRecord {
    pub reason: EndReason,
    pub steps: u64,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub header: TraceHeader,
    pub steps: Vec<StepRecord>,
    pub task_events: Vec<TaskEvent>,
    pub plan_events: Vec<PlanEvent>,
    pub collisions: Vec<CollisionEvent>,
    pub end: EndRecord,
}

impl RunTrace {
    /// Initial pose followed by one pose per step.
    pub fn poses(&self) -> Vec<Pose> {
        std::iter::once(self.header.initial)
            .chain(self.steps.iter().map(StepRecord::pose))
            .collect()
    }

    /// Every task entered, in order, starting with the initial `T0`.
    pub fn task_stream(&self) -> Vec<TaskKind> {
        std::iter::once(TaskKind::Default)
            .chain(self.task_events.iter().map(|e| e.to))
            .collect()
    }

    /// Tasks that were actuated for at least one step, consecutive steps of
    /// one task instance merged.
    pub fn actuated_stream(&self) -> Vec<TaskKind> {
        let mut out: Vec<TaskKind> = Vec::new();
        let mut events = self.task_events.iter().peekable();
        for s in &self.steps {
            let mut fresh = false;
            while events.peek().is_some_and(|e| e.step == s.step) {
                events.next();
                fresh = true;
            }
            if matches!(s.command, Command::Hold) {
                continue;
            }
            if fresh || out.last() != Some(&s.task) {
                out.push(s.task);
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub scenario: Scenario,
    pub start: String,
    pub agent: AgentKind,
    pub prefer: Preference,
    pub seed: u64,
    /// Overrides the scenario's duration, seconds.
    pub duration: Option<f64>,
}

/// Independent streams per run so both agents see identical scans until
/// their actions diverge.
fn rngs(seed: u64) -> (ChaCha8Rng, ChaCha8Rng, u64) {
    let mut base = ChaCha8Rng::seed_from_u64(seed);
    let scan = ChaCha8Rng::seed_from_u64(rand::Rng::gen(&mut base));
    let motion = ChaCha8Rng::seed_from_u64(rand::Rng::gen(&mut base));
    let agent: u64 = rand::Rng::gen(&mut base);
    (scan, motion, agent)
}

pub fn run_scenario(spec: &RunSpec) -> Result<RunTrace, ConfigError> {
    let sc = &spec.scenario;
    sc.validate()?;
    let world = sc.world()?;
    let cfg = sc.config;
    let [x0, y0, th0] = sc.start(&spec.start).ok_or_else(|| {
        ConfigError::invalid("start", format!("no start pose named `{}`", spec.start))
    })?;
    let duration = spec.duration.unwrap_or(sc.duration);
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(ConfigError::invalid("duration", "must be positive"));
    }
    let dt = cfg.safety.dt;
    let max_steps = (duration / dt).round() as u64;

    let mut robot = RobotState::new(x0, y0, th0);
    robot.footprint_radius = cfg.sim.footprint_radius;
    let (mut scan_rng, mut motion_rng, agent_seed) = rngs(spec.seed);
    let mut agent = Agent::new(
        spec.agent,
        spec.prefer,
        cfg.safety,
        cfg.sim.omega,
        agent_seed,
    );

    let header = TraceHeader {
        scenario: sc.name.clone(),
        start: spec.start.clone(),
        agent: spec.agent,
        prefer: spec.prefer,
        seed: spec.seed,
        duration,
        config: cfg,
        cutoff: sc.cutoff,
        initial: Pose {
            t: 0.0,
            x: robot.x,
            y: robot.y,
            theta: robot.theta,
        },
    };
    let mut steps = Vec::with_capacity(max_steps as usize);
    let mut task_events = Vec::new();
    let mut plan_events = Vec::new();
    let mut collisions = Vec::new();
    let mut in_contact = check_collision(&world, &robot);
    if in_contact {
        collisions.push(CollisionEvent {
            step: 0,
            t: 0.0,
            x: robot.x,
            y: robot.y,
        });
    }
    let exit = sc.cutoff.zip(sc.exit_clearance);
    let mut visited = exit.is_some_and(|(c, _)| c.is_inside(robot.position()));

    let mut reason = EndReason::Duration;
    let mut step = 0u64;
    while step < max_steps {
        let t = step as f64 * dt;
        let scan = raycast_scan(
            &world,
            &robot,
            &cfg.sim.lidar,
            cfg.noise.range_noise,
            &mut scan_rng,
        );
        let safe = scan.iter().filter(|o| in_safe_zone(o, &cfg.safety)).count();
        let shield = scan.iter().filter(|o| in_shield(o, &cfg.safety)).count();
        let decision = agent.decide(&scan);
        for s in &decision.switches {
            task_events.push(TaskEvent {
                step,
                t,
                from: s.from,
                to: s.to,
                reason: s.reason,
            });
        }
        for result in decision.plans {
            plan_events.push(PlanEvent { step, t, result });
        }
        let next = step_kinematics(&robot, decision.command, dt, &cfg.noise, &mut motion_rng);
        agent.actuated(decision.command, dt);
        step += 1;
        let t_next = step as f64 * dt;
        let contact = check_collision(&world, &next);
        if contact && !in_contact {
            collisions.push(CollisionEvent {
                step: step - 1,
                t: t_next,
                x: next.x,
                y: next.y,
            });
        }
        in_contact = contact;
        steps.push(StepRecord {
            step: step - 1,
            t: t_next,
            x: next.x,
            y: next.y,
            theta: next.theta,
            task: agent.current(),
            command: decision.command,
            safe,
            shield,
            collision: contact,
        });
        robot = next;
        if let Some(stop) = decision.stop {
            reason = EndReason::Stopped(stop);
            break;
        }
        if let Some((c, clearance)) = exit {
            let p = robot.position();
            visited |= c.is_inside(p);
            if visited && c.signed_distance(p) <= -clearance {
                reason = EndReason::Exit;
                break;
            }
        }
    }
    Ok(RunTrace {
        header,
        steps,
        task_events,
        plan_events,
        collisions,
        end: EndRecord {
            reason,
            steps: step,
            t: step as f64 * dt,
        },
    })
}

/// Runs independent specs in parallel; results keep the input order.
pub fn run_batch(specs: &[RunSpec]) -> Vec<Result<RunTrace, ConfigError>> {
    specs.par_iter().map(run_scenario).collect()
}
