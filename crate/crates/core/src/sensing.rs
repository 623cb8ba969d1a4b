//! Egocentric point-cloud types and the safety partitions built around the
//! robot: the square safe zone, the shield corridor and the look corridor.
//!
//! Frame convention: the LiDAR sits at the origin, the robot faces +x and
//! +y is to its left.

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

/// A single LiDAR return in the robot frame, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub x: f64,
    pub y: f64,
}

impl Observation {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Bearing in radians, in (-pi, pi].
    pub fn bearing(&self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn range(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

/// One scan. Observations keep the beam order of the scanner.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    pub observations: Vec<Observation>,
    /// Milliseconds since run start.
    pub timestamp: u64,
}

impl PointCloud {
    pub fn new(observations: Vec<Observation>) -> Self {
        Self {
            observations,
            timestamp: 0,
        }
    }

    pub fn with_timestamp(mut self, timestamp: u64) -> Self {
        self.timestamp = timestamp;
        self
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Observation> {
        self.observations.iter()
    }
}

impl FromIterator<Observation> for PointCloud {
    fn from_iter<I: IntoIterator<Item = Observation>>(iter: I) -> Self {
        Self::new(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a PointCloud {
    type Item = &'a Observation;
    type IntoIter = std::slice::Iter<'a, Observation>;

    fn into_iter(self) -> Self::IntoIter {
        self.observations.iter()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DisturbanceKind {
    Front,
    Left,
    Right,
}

/// An observation that interrupts the current task.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disturbance {
    pub x: f64,
    pub y: f64,
    pub kind: DisturbanceKind,
}

impl Disturbance {
    pub fn front(o: Observation) -> Self {
        Self {
            x: o.x,
            y: o.y,
            kind: DisturbanceKind::Front,
        }
    }

    /// Lateral disturbance; the side follows the sign of `y`. Returns `None`
    /// for `y == 0`, which is on neither side.
    pub fn lateral(o: Observation) -> Option<Self> {
        let kind = if o.y > 0.0 {
            DisturbanceKind::Left
        } else if o.y < 0.0 {
            DisturbanceKind::Right
        } else {
            return None;
        };
        Some(Self {
            x: o.x,
            y: o.y,
            kind,
        })
    }

    pub fn observation(&self) -> Observation {
        Observation::new(self.x, self.y)
    }
}

/// Geometry of the abstraction, all lengths in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SafetyConfig {
    /// Safe-zone radius.
    pub d_safe: f64,
    /// Straight-task speed, m/s.
    pub v: f64,
    /// Closed-loop period, s.
    pub dt: f64,
    /// Shield over-approximation margin.
    pub tol: f64,
    /// Robot width.
    #[serde(rename = "L")]
    pub width: f64,
    /// Lateral look-ahead.
    pub d_max: f64,
    /// Boxed-in threshold.
    pub d_min: f64,
    /// Longitudinal look-ahead coefficient.
    pub beta: f64,
    /// Far edge of the look corridor.
    pub d_look: f64,
}

impl Default for SafetyConfig {
    fn default() -> Self {
        Self {
            d_safe: 0.3,
            v: 0.2,
            dt: 0.2,
            tol: 0.06,
            width: 0.54,
            d_max: 1.0,
            d_min: 0.6,
            beta: 2.0,
            d_look: 1.0,
        }
    }
}

/// Slack for the `(L + tol) / 2 = d_safe` equality, which rarely holds
/// bit-exactly in binary floating point.
const EQUALITY_SLACK: f64 = 1e-9;

impl SafetyConfig {
    /// Half-width of the shield, look and longitudinal corridors.
    pub fn half_corridor(&self) -> f64 {
        0.5 * (self.width + self.tol)
    }

    /// Far edge of the shield: `d_safe + v * dt + tol`.
    pub fn shield_reach(&self) -> f64 {
        self.d_safe + self.v * self.dt + self.tol
    }

    /// `d_safe + beta * d_safe`, the reach of the longitudinal partitions.
    pub fn longitudinal_reach(&self) -> f64 {
        self.d_safe + self.beta * self.d_safe
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let fields = [
            ("d_safe", self.d_safe),
            ("v", self.v),
            ("dt", self.dt),
            ("tol", self.tol),
            ("L", self.width),
            ("d_max", self.d_max),
            ("d_min", self.d_min),
            ("beta", self.beta),
            ("d_look", self.d_look),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(ConfigError::invalid(name, "must be finite"));
            }
        }
        if self.d_safe <= 0.0 {
            return Err(ConfigError::invalid("d_safe", "must be positive"));
        }
        if self.v < 0.0 {
            return Err(ConfigError::invalid("v", "must be non-negative"));
        }
        if self.dt <= 0.0 {
            return Err(ConfigError::invalid("dt", "must be positive"));
        }
        if self.tol < 0.0 {
            return Err(ConfigError::invalid("tol", "must be non-negative"));
        }
        if self.beta <= 0.0 {
            return Err(ConfigError::invalid("beta", "must be positive"));
        }
        if self.d_min > self.d_max {
            return Err(ConfigError::invalid("d_min", "must not exceed d_max"));
        }
        if (self.half_corridor() - self.d_safe).abs() > EQUALITY_SLACK {
            return Err(ConfigError::invalid(
                "L",
                format!(
                    "(L + tol) / 2 = {} must equal d_safe = {}",
                    self.half_corridor(),
                    self.d_safe
                ),
            ));
        }
        if self.d_look <= self.shield_reach() {
            return Err(ConfigError::invalid(
                "d_look",
                format!("must exceed the shield reach {}", self.shield_reach()),
            ));
        }
        Ok(())
    }
}

fn filter(cloud: &PointCloud, pred: impl Fn(&Observation) -> bool) -> Vec<Observation> {
    cloud.iter().copied().filter(|o| pred(o)).collect()
}

/// Square over-approximation of the safe zone:
/// `0 < |x| <= d_safe` and `0 < |y| <= d_safe`.
pub fn partition_safe(cloud: &PointCloud, cfg: &SafetyConfig) -> Vec<Observation> {
    filter(cloud, |o| in_safe_zone(o, cfg))
}

pub fn in_safe_zone(o: &Observation, cfg: &SafetyConfig) -> bool {
    let (ax, ay) = (o.x.abs(), o.y.abs());
    0.0 < ax && ax <= cfg.d_safe && 0.0 < ay && ay <= cfg.d_safe
}

/// Corridor just beyond the safe zone:
/// `d_safe < x <= d_safe + v*dt + tol` and `|y| <= (L + tol) / 2`.
///
/// Returns every member; [`nearest_front`] picks the disturbance.
pub fn partition_shield(cloud: &PointCloud, cfg: &SafetyConfig) -> Vec<Observation> {
    filter(cloud, |o| in_shield(o, cfg))
}

pub fn in_shield(o: &Observation, cfg: &SafetyConfig) -> bool {
    cfg.d_safe < o.x && o.x <= cfg.shield_reach() && o.y.abs() <= cfg.half_corridor()
}

/// The longer corridor beyond the shield, `shield_reach < x <= d_look`, with
/// the shield's lateral bound.
pub fn partition_look(
    cloud: &PointCloud,
    cfg: &SafetyConfig,
    d_look: f64,
) -> Result<Vec<Observation>, ConfigError> {
    if !(d_look > cfg.shield_reach()) {
        return Err(ConfigError::invalid(
            "d_look",
            format!(
                "{d_look} must exceed the shield reach {}",
                cfg.shield_reach()
            ),
        ));
    }
    Ok(filter(cloud, |o| in_look(o, cfg, d_look)))
}

pub fn in_look(o: &Observation, cfg: &SafetyConfig, d_look: f64) -> bool {
    cfg.shield_reach() < o.x && o.x <= d_look && o.y.abs() <= cfg.half_corridor()
}

/// Picks the front disturbance: minimum `x`, then minimum `|y|`, then the
/// earliest in beam order.
pub fn nearest_front<'a, I>(candidates: I) -> Option<Disturbance>
where
    I: IntoIterator<Item = &'a Observation>,
{
    let mut best: Option<Observation> = None;
    for o in candidates {
        best = match best {
            None => Some(*o),
            Some(b) if o.x < b.x || (o.x == b.x && o.y.abs() < b.y.abs()) => Some(*o),
            keep => keep,
        };
    }
    best.map(Disturbance::front)
}
