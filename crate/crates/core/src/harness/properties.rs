//! Trace-level checks of the safety and behaviour guarantees.

use serde::{Deserialize, Serialize};

use super::agent::StopReason;
use super::run::{EndReason, RunTrace};
use crate::planner::Stage;
use crate::sim::Command;
use crate::tasks::{alternates, TaskKind};

/// Counts over one or more traces. Every field except `runs`, `steps`,
/// `actuated_alternations`, `latency_max_ms` and `stops` is a violation
/// count. A deep intrusion ends its run with a hold, so it is counted there
/// rather than in `safe_zone_straight`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PropertyReport {
    pub runs: usize,
    pub steps: u64,
    /// Adjacent left/right pairs in the stream of entered tasks.
    pub alternations: usize,
    /// Adjacent left/right pairs among tasks actuated for at least one step.
    /// Informational: a zero-length `T0` between two turns hides here.
    pub actuated_alternations: usize,
    /// Steps actuating a straight task while the safe zone was occupied.
    pub safe_zone_straight: usize,
    /// A straight step from a clear safe zone and shield that ended with
    /// the safe zone occupied.
    pub straight_step_violations: usize,
    /// Plans that are malformed or whose length disagrees with their stage,
    /// and `NoPlan` results outside the last stage.
    pub plan_shape_violations: usize,
    pub latency_violations: usize,
    pub latency_max_ms: f64,
    pub collisions: usize,
    pub deep_intrusions: usize,
    pub stops: usize,
}

fn count_alternations(stream: &[TaskKind]) -> usize {
    stream.windows(2).filter(|w| alternates(w[0], w[1])).count()
}

/// Checks one trace; `bound_ms` is the per-plan latency bound.
pub fn check_trace(trace: &RunTrace, bound_ms: f64) -> PropertyReport {
    let mut r = PropertyReport {
        runs: 1,
        steps: trace.end.steps,
        alternations: count_alternations(&trace.task_stream()),
        actuated_alternations: count_alternations(&trace.actuated_stream()),
        collisions: trace.collisions.len(),
        ..Default::default()
    };
    for s in &trace.steps {
        if s.task.is_straight() && s.safe > 0 && !matches!(s.command, Command::Hold) {
            r.safe_zone_straight += 1;
        }
    }
    for w in trace.steps.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let drove = matches!(a.command, Command::Straight { .. });
        if drove && a.safe == 0 && a.shield == 0 && b.safe > 0 {
            r.straight_step_violations += 1;
        }
    }
    for e in &trace.plan_events {
        let res = &e.result;
        let ok = match &res.plan {
            Some(p) => p.is_well_formed() && p.len() == res.stage.plan_len(),
            None => res.stage == Stage::Longitudinal,
        };
        if !ok {
            r.plan_shape_violations += 1;
        }
        r.latency_max_ms = r.latency_max_ms.max(res.latency_ms);
        if res.latency_ms >= bound_ms {
            r.latency_violations += 1;
        }
    }
    if let EndReason::Stopped(why) = trace.end.reason {
        r.stops += 1;
        if why == StopReason::DeepIntrusion {
            r.deep_intrusions += 1;
        }
    }
    r
}

impl PropertyReport {
    pub fn merge(&mut self, o: &PropertyReport) {
        self.runs += o.runs;
        self.steps += o.steps;
        self.alternations += o.alternations;
        self.actuated_alternations += o.actuated_alternations;
        self.safe_zone_straight += o.safe_zone_straight;
        self.straight_step_violations += o.straight_step_violations;
        self.plan_shape_violations += o.plan_shape_violations;
        self.latency_violations += o.latency_violations;
        self.latency_max_ms = self.latency_max_ms.max(o.latency_max_ms);
        self.collisions += o.collisions;
        self.deep_intrusions += o.deep_intrusions;
        self.stops += o.stops;
    }

    /// Named violation counts that must be zero for a planner run.
    pub fn violations(&self) -> Vec<(&'static str, usize)> {
        [
            ("alternations", self.alternations),
            ("safe_zone_straight", self.safe_zone_straight),
            ("straight_step_violations", self.straight_step_violations),
            ("plan_shape_violations", self.plan_shape_violations),
            ("latency_violations", self.latency_violations),
            ("collisions", self.collisions),
            ("deep_intrusions", self.deep_intrusions),
        ]
        .into_iter()
        .filter(|&(_, n)| n > 0)
        .collect()
    }

    pub fn is_clean(&self) -> bool {
        self.violations().is_empty()
    }
}

impl FromIterator<PropertyReport> for PropertyReport {
    fn from_iter<I: IntoIterator<Item = PropertyReport>>(iter: I) -> Self {
        let mut acc = PropertyReport::default();
        for r in iter {
            acc.merge(&r);
        }
        acc
    }
}
