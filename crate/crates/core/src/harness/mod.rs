//! Scenario loading, the closed-loop runner, metrics, property checks and
//! artifact export.

pub mod agent;
pub mod builtin;
pub mod export;
pub mod metrics;
pub mod properties;
pub mod run;
pub mod scenario;

pub use agent::{Agent, AgentKind, Decision, Preference, StopReason, Switch, SwitchReason};
pub use export::{export, read_metrics, read_trace, read_trajectory, ExportPaths, TraceRecord};
pub use metrics::{compute_metrics, median, path_stats, LatencyStats, Metrics, PathStats};
pub use properties::{check_trace, PropertyReport};
pub use run::{run_batch, run_scenario, EndReason, Pose, RunSpec, RunTrace, StepRecord};
pub use scenario::{Cutoff, NamedPose, Scenario, ScenarioConfig, SimConfig};
