use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// A wall segment in the world frame. Serialized as `[x1, y1, x2, y2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl From<[f64; 4]> for Segment {
    fn from(v: [f64; 4]) -> Self {
        Segment::new(v[0], v[1], v[2], v[3])
    }
}

impl From<Segment> for [f64; 4] {
    fn from(s: Segment) -> Self {
        [s.a.x, s.a.y, s.b.x, s.b.y]
    }
}

impl Segment {
    pub const fn new(x1: f64, y1: f64, x2: f64, y2: f64) -> Self {
        Self {
            a: Point::new(x1, y1),
            b: Point::new(x2, y2),
        }
    }

    pub fn length(&self) -> f64 {
        (self.b.x - self.a.x).hypot(self.b.y - self.a.y)
    }

    /// Euclidean distance from `p` to the closest point of the segment.
    pub fn distance_to(&self, p: Point) -> f64 {
        let (dx, dy) = (self.b.x - self.a.x, self.b.y - self.a.y);
        let len2 = dx * dx + dy * dy;
        let t = if len2 == 0.0 {
            0.0
        } else {
            (((p.x - self.a.x) * dx + (p.y - self.a.y) * dy) / len2).clamp(0.0, 1.0)
        };
        (p.x - (self.a.x + t * dx)).hypot(p.y - (self.a.y + t * dy))
    }

    /// Distance along the ray `origin + t * (cos, sin)` to the segment, if
    /// the ray meets it at `t >= 0`.
    pub fn ray_hit(&self, origin: Point, cos: f64, sin: f64) -> Option<f64> {
        let (ex, ey) = (self.b.x - self.a.x, self.b.y - self.a.y);
        let denom = cos * ey - sin * ex;
        if denom == 0.0 {
            // Parallel or collinear; a grazing ray does not return.
            return None;
        }
        let (wx, wy) = (self.a.x - origin.x, self.a.y - origin.y);
        let t = (wx * ey - wy * ex) / denom;
        let s = (wx * sin - wy * cos) / denom;
        (t >= 0.0 && (0.0..=1.0).contains(&s)).then_some(t)
    }
}

/// Rigid motion `p -> R(theta) p + (dx, dy)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rigid2 {
    pub dx: f64,
    pub dy: f64,
    pub theta: f64,
}

impl Rigid2 {
    pub fn apply(&self, p: Point) -> Point {
        let (s, c) = self.theta.sin_cos();
        Point::new(c * p.x - s * p.y + self.dx, s * p.x + c * p.y + self.dy)
    }

    pub fn inverse(&self) -> Rigid2 {
        let (s, c) = self.theta.sin_cos();
        Rigid2 {
            dx: -(c * self.dx + s * self.dy),
            dy: s * self.dx - c * self.dy,
            theta: -self.theta,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub min: Point,
    pub max: Point,
}

impl Bounds {
    pub fn contains(&self, p: Point) -> bool {
        self.min.x <= p.x && p.x <= self.max.x && self.min.y <= p.y && p.y <= self.max.y
    }
}

/// Static polygonal world.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldModel {
    pub segments: Vec<Segment>,
    pub bounds: Bounds,
}

impl WorldModel {
    /// Validates the segments and computes the bounding box. An empty world
    /// has degenerate bounds at the origin.
    pub fn new(segments: Vec<Segment>) -> Result<Self, ConfigError> {
        for (i, s) in segments.iter().enumerate() {
            let coords = [s.a.x, s.a.y, s.b.x, s.b.y];
            if coords.iter().any(|c| !c.is_finite()) {
                return Err(ConfigError::invalid(
                    format!("segments[{i}]"),
                    "coordinates must be finite",
                ));
            }
            if s.length() == 0.0 {
                return Err(ConfigError::invalid(
                    format!("segments[{i}]"),
                    "segment has zero length",
                ));
            }
        }
        let mut bounds = Bounds {
            min: Point::new(f64::INFINITY, f64::INFINITY),
            max: Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        };
        for p in segments.iter().flat_map(|s| [s.a, s.b]) {
            bounds.min.x = bounds.min.x.min(p.x);
            bounds.min.y = bounds.min.y.min(p.y);
            bounds.max.x = bounds.max.x.max(p.x);
            bounds.max.y = bounds.max.y.max(p.y);
        }
        if segments.is_empty() {
            bounds = Bounds {
                min: Point::new(0.0, 0.0),
                max: Point::new(0.0, 0.0),
            };
        }
        Ok(Self { segments, bounds })
    }

    pub fn empty() -> Self {
        Self::new(Vec::new()).expect("empty world is valid")
    }

    /// Closed rectangular room.
    pub fn rectangle(x0: f64, y0: f64, x1: f64, y1: f64) -> Vec<Segment> {
        vec![
            Segment::new(x0, y0, x1, y0),
            Segment::new(x1, y0, x1, y1),
            Segment::new(x1, y1, x0, y1),
            Segment::new(x0, y1, x0, y0),
        ]
    }

    pub fn transformed(&self, motion: &Rigid2) -> Self {
        let segments = self
            .segments
            .iter()
            .map(|s| Segment {
                a: motion.apply(s.a),
                b: motion.apply(s.b),
            })
            .collect();
        Self::new(segments).expect("rigid motion keeps segments valid")
    }

    /// Distance from `p` to the nearest wall, infinite for an empty world.
    pub fn clearance(&self, p: Point) -> f64 {
        self.segments
            .iter()
            .map(|s| s.distance_to(p))
            .fold(f64::INFINITY, f64::min)
    }
}
