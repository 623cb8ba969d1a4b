//! Run artifacts: `trace.jsonl`, `metrics.json`, `trajectory.csv` and
//! `latency.csv`. Field names are stable; see the README for the schema.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::metrics::Metrics;
use super::run::{
    CollisionEvent, EndRecord, PlanEvent, RunTrace, StepRecord, TaskEvent, TraceHeader,
};
use crate::error::ExportError;

/// One line of `trace.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TraceRecord {
    Header(TraceHeader),
    Task(TaskEvent),
    Plan(PlanEvent),
    Step(StepRecord),
    Collision(CollisionEvent),
    End(EndRecord),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExportPaths {
    pub trace: PathBuf,
    pub metrics: PathBuf,
    pub trajectory: PathBuf,
    pub latency: PathBuf,
}

impl ExportPaths {
    pub fn in_dir(dir: &Path) -> Self {
        Self {
            trace: dir.join("trace.jsonl"),
            metrics: dir.join("metrics.json"),
            trajectory: dir.join("trajectory.csv"),
            latency: dir.join("latency.csv"),
        }
    }
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> ExportError + '_ {
    move |source| ExportError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> ExportError + '_ {
    move |source| ExportError::Csv {
        path: path.to_path_buf(),
        source,
    }
}

/// Records in time order: per step, task switches and plans caused by its
/// scan, then the step itself, then any collision it ended in.
pub fn trace_records(trace: &RunTrace) -> Vec<TraceRecord> {
    let mut out = vec![TraceRecord::Header(trace.header.clone())];
    let (mut ti, mut pi, mut ci) = (0, 0, 0);
    let initial_contact = trace.collisions.first().filter(|c| c.t == 0.0);
    if let Some(c) = initial_contact {
        out.push(TraceRecord::Collision(*c));
        ci = 1;
    }
    for s in &trace.steps {
        while ti < trace.task_events.len() && trace.task_events[ti].step <= s.step {
            out.push(TraceRecord::Task(trace.task_events[ti]));
            ti += 1;
        }
        while pi < trace.plan_events.len() && trace.plan_events[pi].step <= s.step {
            out.push(TraceRecord::Plan(trace.plan_events[pi].clone()));
            pi += 1;
        }
        out.push(TraceRecord::Step(*s));
        while ci < trace.collisions.len() && trace.collisions[ci].step <= s.step {
            out.push(TraceRecord::Collision(trace.collisions[ci]));
            ci += 1;
        }
    }
    out.extend(
        trace.task_events[ti..]
            .iter()
            .map(|e| TraceRecord::Task(*e)),
    );
    out.extend(
        trace.plan_events[pi..]
            .iter()
            .cloned()
            .map(TraceRecord::Plan),
    );
    out.extend(
        trace.collisions[ci..]
            .iter()
            .map(|e| TraceRecord::Collision(*e)),
    );
    out.push(TraceRecord::End(trace.end));
    out
}

pub fn write_trace(trace: &RunTrace, path: &Path) -> Result<(), ExportError> {
    let mut w = BufWriter::new(File::create(path).map_err(io(path))?);
    for (i, r) in trace_records(trace).iter().enumerate() {
        serde_json::to_writer(&mut w, r).map_err(|source| ExportError::Json {
            path: path.to_path_buf(),
            line: i + 1,
            source,
        })?;
        w.write_all(b"\n").map_err(io(path))?;
    }
    w.flush().map_err(io(path))
}

pub fn read_trace(path: &Path) -> Result<RunTrace, ExportError> {
    let r = BufReader::new(File::open(path).map_err(io(path))?);
    let malformed = |reason: &str| ExportError::Malformed {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    };
    let mut header = None;
    let mut end = None;
    let (mut steps, mut tasks, mut plans, mut collisions) = (vec![], vec![], vec![], vec![]);
    for (i, line) in r.lines().enumerate() {
        let line = line.map_err(io(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: TraceRecord = serde_json::from_str(&line).map_err(|source| ExportError::Json {
            path: path.to_path_buf(),
            line: i + 1,
            source,
        })?;
        match rec {
            TraceRecord::Header(h) if header.is_none() => header = Some(h),
            TraceRecord::Header(_) => return Err(malformed("more than one header record")),
            TraceRecord::Task(e) => tasks.push(e),
            TraceRecord::Plan(e) => plans.push(e),
            TraceRecord::Step(e) => steps.push(e),
            TraceRecord::Collision(e) => collisions.push(e),
            TraceRecord::End(e) => end = Some(e),
        }
    }
    Ok(RunTrace {
        header: header.ok_or_else(|| malformed("missing header record"))?,
        steps,
        task_events: tasks,
        plan_events: plans,
        collisions,
        end: end.ok_or_else(|| malformed("missing end record"))?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatencyRow {
    /// 0 when the planner found no plan.
    pub plan_len: usize,
    pub ms: f64,
}

fn write_csv<T: Serialize>(path: &Path, header: &[&str], rows: &[T]) -> Result<(), ExportError> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(csv_err(path))?;
    // Written by hand so an empty file still carries its header.
    w.write_record(header).map_err(csv_err(path))?;
    for r in rows {
        w.serialize(r).map_err(csv_err(path))?;
    }
    w.flush().map_err(io(path))
}

pub fn write_trajectory(trace: &RunTrace, path: &Path) -> Result<(), ExportError> {
    let rows: Vec<TrajectoryRow> = trace
        .poses()
        .iter()
        .map(|p| TrajectoryRow {
            t: p.t,
            x: p.x,
            y: p.y,
            theta: p.theta,
        })
        .collect();
    write_csv(path, &["t", "x", "y", "theta"], &rows)
}

pub fn read_trajectory(path: &Path) -> Result<Vec<TrajectoryRow>, ExportError> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    r.deserialize()
        .map(|row| row.map_err(csv_err(path)))
        .collect()
}

pub fn write_latency(trace: &RunTrace, path: &Path) -> Result<(), ExportError> {
    let rows: Vec<LatencyRow> = trace
        .plan_events
        .iter()
        .map(|e| LatencyRow {
            plan_len: e.result.plan.as_ref().map_or(0, |p| p.len()),
            ms: e.result.latency_ms,
        })
        .collect();
    write_csv(path, &["plan_len", "ms"], &rows)
}

pub fn write_metrics(metrics: &Metrics, path: &Path) -> Result<(), ExportError> {
    let text = serde_json::to_string_pretty(metrics).map_err(|source| ExportError::Json {
        path: path.to_path_buf(),
        line: 0,
        source,
    })?;
    fs::write(path, text + "\n").map_err(io(path))
}

pub fn read_metrics(path: &Path) -> Result<Metrics, ExportError> {
    let text = fs::read_to_string(path).map_err(io(path))?;
    serde_json::from_str(&text).map_err(|source| ExportError::Json {
        path: path.to_path_buf(),
        line: source.line(),
        source,
    })
}

/// Writes all four artifacts into `dir`, creating it if needed.
pub fn export(trace: &RunTrace, metrics: &Metrics, dir: &Path) -> Result<ExportPaths, ExportError> {
    fs::create_dir_all(dir).map_err(io(dir))?;
    let paths = ExportPaths::in_dir(dir);
    write_trace(trace, &paths.trace)?;
    write_metrics(metrics, &paths.metrics)?;
    write_trajectory(trace, &paths.trajectory)?;
    write_latency(trace, &paths.latency)?;
    Ok(paths)
}
