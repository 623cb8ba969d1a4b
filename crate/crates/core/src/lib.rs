//! Real-time model-checking planner for reactive obstacle avoidance with a
//! 2D LiDAR, plus a deterministic simulator and experiment harness.

// Validation uses `!(x > 0.0)` so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod abstraction;
pub mod error;
pub mod harness;
pub mod model;
pub mod planner;
pub mod sensing;
pub mod sim;
pub mod tasks;

pub use error::{ConfigError, ExportError};
