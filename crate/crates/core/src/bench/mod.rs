//! Benchmarking harness: experiment matrices under limits, persisted run
//! records, performance profiles with virtual best/worst curves, and
//! thread-count calibration.

mod profile;
mod svg;

pub use profile::{performance_profile, write_profile_csv, ProfileCurve, ProfileError, Profiles};
pub use svg::render_profile_svg;

use crate::ip::{solve, NlpProblem, SolveStatus, SolverOptions};
use crate::ldl::{DenseBackend, KktBackend, PivotOptions, SparseBackend};
use std::io::{BufRead, Write};
use std::time::Instant;

/// One timed solve of one problem on one backend configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub problem_id: String,
    pub backend_id: String,
    pub workers: usize,
    pub status: SolveStatus,
    pub wall_seconds: f64,
    pub iterations: usize,
    /// Absent when the solve produced no usable iterate.
    pub objective: Option<f64>,
    pub repetition: usize,
}

impl RunRecord {
    /// The protocol counts optimal and acceptable outcomes as solved.
    pub fn solved(&self) -> bool {
        matches!(self.status, SolveStatus::Optimal | SolveStatus::Acceptable)
    }
}

pub const RECORD_CSV_HEADER: &str =
    "problem_id,backend_id,workers,status,wall_seconds,iterations,objective,repetition";

/// Writes records under the canonical header. Fields never contain commas.
pub fn write_records_csv(records: &[RunRecord], w: &mut dyn Write) -> std::io::Result<()> {
    writeln!(w, "{RECORD_CSV_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            r.problem_id,
            r.backend_id,
            r.workers,
            r.status.as_str(),
            r.wall_seconds,
            r.iterations,
            r.objective.map(|v| v.to_string()).unwrap_or_default(),
            r.repetition
        )?;
    }
    Ok(())
}

pub fn read_records_csv(r: &mut dyn BufRead) -> Result<Vec<RunRecord>, String> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| "empty records file".to_string())
        .and_then(|l| l.map_err(|e| e.to_string()))?;
    if header.trim() != RECORD_CSV_HEADER {
        return Err(format!("unexpected header: {header}"));
    }
    let mut out = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line.map_err(|e| e.to_string())?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 8 {
            return Err(format!("line {}: expected 8 fields", lineno + 2));
        }
        let parse = |s: &str, what: &str| -> Result<f64, String> {
            s.parse().map_err(|_| format!("line {}: bad {what}: {s}", lineno + 2))
        };
        out.push(RunRecord {
            problem_id: f[0].to_string(),
            backend_id: f[1].to_string(),
            workers: parse(f[2], "workers")? as usize,
            status: f[3].parse()?,
            wall_seconds: parse(f[4], "wall_seconds")?,
            iterations: parse(f[5], "iterations")? as usize,
            objective: if f[6].is_empty() { None } else { Some(parse(f[6], "objective")?) },
            repetition: parse(f[7], "repetition")? as usize,
        });
    }
    Ok(out)
}

/// Buildable backend configuration for matrix runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendSpec {
    Sparse,
    /// Dense fallback, refused above the given order.
    Dense { limit: usize },
}

impl BackendSpec {
    pub fn id(&self) -> &'static str {
        match self {
            BackendSpec::Sparse => "sparse",
            BackendSpec::Dense { .. } => "dense",
        }
    }

    pub fn build(&self, pivot: &PivotOptions, workers: usize) -> Box<dyn KktBackend> {
        match *self {
            BackendSpec::Sparse => Box::new(SparseBackend::new(pivot.clone(), workers)),
            BackendSpec::Dense { limit } => Box::new(DenseBackend::new(pivot.clone(), limit)),
        }
    }
}

/// Runs every (problem, backend, repetition) cell sequentially, timing the
/// solve call only. Per-cell failures land in the record's status; the
/// matrix never aborts.
pub fn run_matrix(
    problems: &[(String, &dyn NlpProblem)],
    backends: &[BackendSpec],
    opts: &SolverOptions,
    workers: usize,
    repetitions: usize,
) -> Vec<RunRecord> {
    assert!(!problems.is_empty() && !backends.is_empty(), "empty experiment matrix");
    assert!(repetitions >= 1, "at least one repetition");
    let pivot = opts.pivot;
    let mut out = Vec::with_capacity(problems.len() * backends.len() * repetitions);
    for (id, p) in problems {
        for spec in backends {
            for rep in 0..repetitions {
                let mut backend = spec.build(&pivot, workers);
                let t = Instant::now();
                let r = solve(*p, backend.as_mut(), opts);
                let wall = t.elapsed().as_secs_f64();
                let objective = match r.status {
                    SolveStatus::DegreesOfFreedomError | SolveStatus::LinearSolveError => None,
                    _ => Some(r.objective),
                };
                out.push(RunRecord {
                    problem_id: id.clone(),
                    backend_id: spec.id().to_string(),
                    workers,
                    status: r.status,
                    wall_seconds: wall,
                    iterations: r.iterations,
                    objective,
                    repetition: rep,
                });
            }
        }
    }
    out
}

/// Per-worker-count calibration summary.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationResult {
    /// (worker count, mean seconds); mean absent when any repetition
    /// failed to solve.
    pub means: Vec<(usize, Option<f64>)>,
    /// (mean − min)/(max − min) over valid counts; 0/0 → 0.
    pub normalized: Vec<Option<f64>>,
    pub best_workers: Option<usize>,
    pub min_mean: Option<f64>,
    pub max_mean: Option<f64>,
}

/// Calibrates over an injectable timing source: `run(workers, repetition)`
/// returns the solve seconds, or None when that repetition did not solve.
pub fn calibrate(
    mut run: impl FnMut(usize, usize) -> Option<f64>,
    worker_counts: &[usize],
    repetitions: usize,
) -> CalibrationResult {
    assert!(!worker_counts.is_empty(), "at least one worker count");
    assert!(repetitions >= 1, "at least one repetition");
    let mut means: Vec<(usize, Option<f64>)> = Vec::with_capacity(worker_counts.len());
    for &wc in worker_counts {
        let mut total = 0.0;
        let mut valid = true;
        for rep in 0..repetitions {
            match run(wc, rep) {
                Some(s) => total += s,
                None => valid = false,
            }
        }
        means.push((wc, valid.then(|| total / repetitions as f64)));
    }
    let valid: Vec<f64> = means.iter().filter_map(|&(_, m)| m).collect();
    let (min_mean, max_mean) = if valid.is_empty() {
        (None, None)
    } else {
        (
            Some(valid.iter().cloned().fold(f64::INFINITY, f64::min)),
            Some(valid.iter().cloned().fold(f64::NEG_INFINITY, f64::max)),
        )
    };
    let normalized = means
        .iter()
        .map(|&(_, m)| {
            m.map(|v| {
                let (lo, hi) = (min_mean.unwrap(), max_mean.unwrap());
                if hi > lo {
                    (v - lo) / (hi - lo)
                } else {
                    0.0
                }
            })
        })
        .collect();
    // Argmin over valid counts; ties go to the smallest count, which the
    // ascending scan preserves via strict improvement.
    let mut best_workers = None;
    let mut best = f64::INFINITY;
    for &(wc, m) in &means {
        if let Some(v) = m {
            if v < best {
                best = v;
                best_workers = Some(wc);
            }
        }
    }
    CalibrationResult { means, normalized, best_workers, min_mean, max_mean }
}

/// Runs the calibration protocol against a real problem and backend,
/// returning the summary plus the raw records.
pub fn calibrate_solver(
    problem: &dyn NlpProblem,
    problem_id: &str,
    spec: BackendSpec,
    opts: &SolverOptions,
    worker_counts: &[usize],
    repetitions: usize,
) -> (CalibrationResult, Vec<RunRecord>) {
    let mut records = Vec::new();
    let pivot = opts.pivot;
    let result = calibrate(
        |workers, rep| {
            let mut backend = spec.build(&pivot, workers);
            let t = Instant::now();
            let r = solve(problem, backend.as_mut(), opts);
            let wall = t.elapsed().as_secs_f64();
            let rec = RunRecord {
                problem_id: problem_id.to_string(),
                backend_id: spec.id().to_string(),
                workers,
                status: r.status,
                wall_seconds: wall,
                iterations: r.iterations,
                objective: Some(r.objective),
                repetition: rep,
            };
            let solved = rec.solved();
            records.push(rec);
            solved.then_some(wall)
        },
        worker_counts,
        repetitions,
    );
    (result, records)
}

/// The published calibration sweep: worker counts 2..=72 in steps of two,
/// five repetitions per count.
pub fn paper_sweep_preset() -> (Vec<usize>, usize) {
    ((1..=36).map(|i| 2 * i).collect(), 5)
}
