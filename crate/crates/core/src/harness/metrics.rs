use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::run::{EndReason, Pose, RunTrace};
use super::scenario::Cutoff;
use crate::sim::Point;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatencyStats {
    pub count: usize,
    pub min_ms: f64,
    pub max_ms: f64,
    pub mean_ms: f64,
}

impl LatencyStats {
    pub fn from_samples(samples: &[f64]) -> Option<Self> {
        if samples.is_empty() {
            return None;
        }
        let min_ms = samples.iter().copied().fold(f64::INFINITY, f64::min);
        let max_ms = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean_ms = samples.iter().sum::<f64>() / samples.len() as f64;
        Some(Self {
            count: samples.len(),
            min_ms,
            max_ms,
            mean_ms,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub trajectory_length: f64,
    pub in_culdesac_length: f64,
    pub in_culdesac_time: f64,
    pub culdesac_visits: usize,
    pub collisions: usize,
    pub duration: f64,
    pub steps: u64,
    pub replans: usize,
    /// Keyed by plan length; `"none"` collects replans that found no plan.
    pub latency: BTreeMap<String, LatencyStats>,
    pub end: EndReason,
}

/// Path-length and cul-de-sac statistics of a pose sequence.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PathStats {
    pub length: f64,
    pub inside_length: f64,
    pub inside_time: f64,
    pub visits: usize,
}

/// Sums pose-to-pose distances. A leg crossing the cutoff contributes the
/// fraction on the inside, split where the leg meets the line. A visit
/// starts at each pose inside whose predecessor was outside, or at the
/// first pose if it is inside.
pub fn path_stats(poses: &[Pose], cutoff: Option<&Cutoff>) -> PathStats {
    let mut s = PathStats::default();
    let side = |p: &Pose| cutoff.map(|c| c.signed_distance(Point::new(p.x, p.y)));
    let inside_at = |p: &Pose| cutoff.is_some_and(|c| c.is_inside(Point::new(p.x, p.y)));
    let mut prev_inside = false;
    for (i, p) in poses.iter().enumerate() {
        let inside = inside_at(p);
        if inside && (i == 0 || !prev_inside) {
            s.visits += 1;
        }
        prev_inside = inside;
        if i == 0 {
            continue;
        }
        let q = &poses[i - 1];
        let len = (p.x - q.x).hypot(p.y - q.y);
        let dt = p.t - q.t;
        s.length += len;
        if let (Some(a), Some(b)) = (side(q), side(p)) {
            // Legs are a few centimetres, so a leg that changes membership
            // through a side of the slab rather than the line is split by
            // the line distances too, clamped.
            let frac = match (inside_at(q), inside) {
                (true, true) => 1.0,
                (false, false) => 0.0,
                (true, false) => (a / (a - b)).clamp(0.0, 1.0),
                (false, true) => (b / (b - a)).clamp(0.0, 1.0),
            };
            s.inside_length += frac * len;
            s.inside_time += frac * dt;
        }
    }
    s
}

pub fn compute_metrics(trace: &RunTrace, cutoff: Option<&Cutoff>) -> Metrics {
    let ps = path_stats(&trace.poses(), cutoff);
    let mut by_len: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for e in &trace.plan_events {
        let key = e
            .result
            .plan
            .as_ref()
            .map_or_else(|| "none".to_string(), |p| p.len().to_string());
        by_len.entry(key).or_default().push(e.result.latency_ms);
    }
    Metrics {
        trajectory_length: ps.length,
        in_culdesac_length: ps.inside_length,
        in_culdesac_time: ps.inside_time,
        culdesac_visits: ps.visits,
        collisions: trace.collisions.len(),
        duration: trace.end.t,
        steps: trace.end.steps,
        replans: trace.plan_events.len(),
        latency: by_len
            .into_iter()
            .filter_map(|(k, v)| LatencyStats::from_samples(&v).map(|s| (k, s)))
            .collect(),
        end: trace.end.reason,
    }
}

/// Median of a sample; the mean of the two middle values for even sizes.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pose(t: f64, x: f64, y: f64) -> Pose {
        Pose {
            t,
            x,
            y,
            theta: 0.0,
        }
    }

    fn cutoff() -> Cutoff {
        Cutoff {
            a: [2.0, -10.0],
            b: [2.0, 10.0],
            inside: [3.0, 0.0],
        }
    }

    #[test]
    fn straight_metre_outside() {
        let poses: Vec<_> = (0..=10)
            .map(|i| pose(i as f64 * 0.1, 0.1 * i as f64, 0.0))
            .collect();
        let s = path_stats(&poses, Some(&cutoff()));
        assert!((s.length - 1.0).abs() < 1e-9);
        assert_eq!(s.inside_length, 0.0);
        assert_eq!(s.visits, 0);
    }

    #[test]
    fn three_four_five() {
        let s = path_stats(&[pose(0.0, 0.0, 0.0), pose(1.0, 3.0, 4.0)], None);
        assert_eq!(s.length, 5.0);
    }

    #[test]
    fn crossing_in_and_out_is_one_visit() {
        let poses = [
            pose(0.0, 1.0, 0.0),
            pose(1.0, 3.0, 0.0),
            pose(2.0, 3.0, 1.0),
            pose(3.0, 1.5, 1.0),
        ];
        let s = path_stats(&poses, Some(&cutoff()));
        assert_eq!(s.visits, 1);
        // 1 m in on the way in, 1 m along the inside, 1 m out.
        assert!((s.inside_length - 3.0).abs() < 1e-12);
        assert!((s.inside_time - (0.5 + 1.0 + 2.0 / 3.0)).abs() < 1e-12);
        assert!(s.inside_length <= s.length);
    }

    #[test]
    fn starting_inside_counts_a_visit() {
        let s = path_stats(
            &[
                pose(0.0, 3.0, 0.0),
                pose(1.0, 1.0, 0.0),
                pose(2.0, 3.0, 0.0),
            ],
            Some(&cutoff()),
        );
        assert_eq!(s.visits, 2);
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&[]), None);
    }
}
