//! Scenario files: world geometry, start poses, the cul-de-sac cutoff and
//! configuration overrides.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::ConfigError;
use crate::sensing::SafetyConfig;
use crate::sim::{LidarConfig, NoiseModel, Point, Segment, WorldModel, FOOTPRINT_RADIUS};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub lidar: LidarConfig,
    /// In-place rotation rate, rad/s.
    pub omega: f64,
    pub footprint_radius: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            lidar: LidarConfig::default(),
            omega: PI / 2.0,
            footprint_radius: FOOTPRINT_RADIUS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub safety: SafetyConfig,
    pub noise: NoiseModel,
    pub sim: SimConfig,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.safety
            .validate()
            .map_err(|e| prefix("config.safety", e))?;
        let n = &self.noise;
        for (name, v) in [
            ("epsilon_long", n.epsilon_long),
            ("range_noise", n.range_noise),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(ConfigError::invalid(
                    format!("config.noise.{name}"),
                    "must be finite and non-negative",
                ));
            }
        }
        if !n.veer.is_finite() {
            return Err(ConfigError::invalid("config.noise.veer", "must be finite"));
        }
        let s = &self.sim;
        if s.lidar.n_beams == 0 {
            return Err(ConfigError::invalid(
                "config.sim.lidar.n_beams",
                "must be at least 1",
            ));
        }
        if !(s.lidar.max_range > 0.0) {
            return Err(ConfigError::invalid(
                "config.sim.lidar.max_range",
                "must be positive",
            ));
        }
        if !(s.omega > 0.0 && s.omega.is_finite()) {
            return Err(ConfigError::invalid("config.sim.omega", "must be positive"));
        }
        if !(s.footprint_radius > 0.0 && s.footprint_radius < self.safety.d_safe) {
            return Err(ConfigError::invalid(
                "config.sim.footprint_radius",
                "must be positive and smaller than d_safe",
            ));
        }
        Ok(())
    }
}

fn prefix(at: &str, e: ConfigError) -> ConfigError {
    match e {
        ConfigError::Invalid { field, reason } => ConfigError::Invalid {
            field: format!("{at}.{field}"),
            reason,
        },
        other => other,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedPose {
    pub name: String,
    /// `[x, y, theta]`, world frame.
    pub pose: [f64; 3],
}

/// Cutoff across the mouth of a cul-de-sac, from `a` to `b`. A point is
/// inside when it lies on the `inside` side of the line and within the slab
/// swept by the segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cutoff {
    pub a: [f64; 2],
    pub b: [f64; 2],
    /// Any point strictly inside the cul-de-sac.
    pub inside: [f64; 2],
}

impl Cutoff {
    fn raw(&self, p: Point) -> f64 {
        let (dx, dy) = (self.b[0] - self.a[0], self.b[1] - self.a[1]);
        (dx * (p.y - self.a[1]) - dy * (p.x - self.a[0])) / dx.hypot(dy)
    }

    /// Distance from the line, positive on the cul-de-sac side.
    pub fn signed_distance(&self, p: Point) -> f64 {
        let side = self
            .raw(Point::new(self.inside[0], self.inside[1]))
            .signum();
        side * self.raw(p)
    }

    pub fn is_inside(&self, p: Point) -> bool {
        let (dx, dy) = (self.b[0] - self.a[0], self.b[1] - self.a[1]);
        let u = ((p.x - self.a[0]) * dx + (p.y - self.a[1]) * dy) / (dx * dx + dy * dy);
        self.signed_distance(p) > 0.0 && (0.0..=1.0).contains(&u)
    }
}

fn default_duration() -> f64 {
    300.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub segments: Vec<Segment>,
    pub start_poses: Vec<NamedPose>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<Cutoff>,
    /// End the run once the robot has been inside the cutoff and is back
    /// outside by this margin.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exit_clearance: Option<f64>,
    /// Default run length, seconds.
    #[serde(default = "default_duration")]
    pub duration: f64,
    #[serde(default)]
    pub config: ScenarioConfig,
}

fn parse_typed<T: serde::de::DeserializeOwned>(text: &str, source: &str) -> Result<T, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let value: T = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        ConfigError::Parse {
            source_name: source.to_string(),
            path,
            line: inner.line(),
            column: inner.column(),
            message: inner.to_string(),
        }
    })?;
    Ok(value)
}

fn read(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_path_buf(),
        source,
    })
}

fn merge(base: &mut Value, patch: &Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                merge(b.entry(k.clone()).or_insert(Value::Null), v);
            }
        }
        (b, p) => *b = p.clone(),
    }
}

impl Scenario {
    pub fn from_json_str(text: &str, source: &str) -> Result<Self, ConfigError> {
        let s: Scenario = parse_typed(text, source)?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        Self::from_json_str(&read(path)?, &path.display().to_string())
    }

    /// Applies a partial `config` document on top of the scenario's own.
    pub fn apply_overrides(&mut self, text: &str, source: &str) -> Result<(), ConfigError> {
        // Typed parse first, for field and line diagnostics.
        let _: ScenarioConfig = parse_typed(text, source)?;
        let patch: Value = serde_json::from_str(text).expect("parsed above");
        let mut base = serde_json::to_value(self.config).expect("config serializes");
        merge(&mut base, &patch);
        self.config = serde_json::from_value(base).map_err(|e| ConfigError::Parse {
            source_name: source.to_string(),
            path: ".".into(),
            line: 0,
            column: 0,
            message: e.to_string(),
        })?;
        self.validate()
    }

    pub fn apply_override_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        self.apply_overrides(&read(path)?, &path.display().to_string())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.world()?;
        self.config.validate()?;
        if self.start_poses.is_empty() {
            return Err(ConfigError::invalid(
                "start_poses",
                "at least one start pose is required",
            ));
        }
        for (i, p) in self.start_poses.iter().enumerate() {
            if p.pose.iter().any(|c| !c.is_finite()) {
                return Err(ConfigError::invalid(
                    format!("start_poses[{i}].pose"),
                    "coordinates must be finite",
                ));
            }
        }
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(ConfigError::invalid("duration", "must be positive"));
        }
        if let Some(c) = &self.cutoff {
            let len = (c.b[0] - c.a[0]).hypot(c.b[1] - c.a[1]);
            if !(len > 0.0) {
                return Err(ConfigError::invalid("cutoff", "a and b must differ"));
            }
            if c.raw(Point::new(c.inside[0], c.inside[1])) == 0.0 {
                return Err(ConfigError::invalid(
                    "cutoff.inside",
                    "must not lie on the cutoff line",
                ));
            }
        }
        if let Some(e) = self.exit_clearance {
            if self.cutoff.is_none() {
                return Err(ConfigError::invalid("exit_clearance", "requires a cutoff"));
            }
            if !(e >= 0.0) {
                return Err(ConfigError::invalid(
                    "exit_clearance",
                    "must be non-negative",
                ));
            }
        }
        if self.config.noise.epsilon_long > self.config.safety.tol {
            log::warn!(
                "{}: epsilon_long {} exceeds tol {}; the safe-zone guarantee does not apply",
                self.name,
                self.config.noise.epsilon_long,
                self.config.safety.tol
            );
        }
        Ok(())
    }

    pub fn world(&self) -> Result<WorldModel, ConfigError> {
        WorldModel::new(self.segments.clone())
    }

    pub fn start(&self, name: &str) -> Option<[f64; 3]> {
        self.start_poses
            .iter()
            .find(|p| p.name == name)
            .map(|p| p.pose)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }
}
