//! Performance profiles: per-backend cumulative solved counts over time
//! thresholds, plus virtual best/worst envelope curves.

use super::RunRecord;
use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

/// A right-continuous nondecreasing step curve: at each listed threshold
/// t, `count` problems were solved in wall time ≤ t.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileCurve {
    pub backend_id: String,
    /// (time threshold seconds, cumulative solved count), times strictly
    /// increasing.
    pub points: Vec<(f64, usize)>,
    pub total_problems: usize,
}

impl ProfileCurve {
    /// Solved count at threshold t.
    pub fn count_at(&self, t: f64) -> usize {
        self.points.iter().take_while(|&&(pt, _)| pt <= t).last().map_or(0, |&(_, c)| c)
    }

    fn from_times(backend_id: &str, mut times: Vec<f64>, total: usize) -> ProfileCurve {
        times.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut points: Vec<(f64, usize)> = Vec::new();
        for (i, t) in times.iter().enumerate() {
            // Ties collapse onto one threshold carrying the larger count.
            match points.last_mut() {
                Some(last) if last.0 == *t => last.1 = i + 1,
                _ => points.push((*t, i + 1)),
            }
        }
        ProfileCurve { backend_id: backend_id.to_string(), points, total_problems: total }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Profiles {
    pub curves: Vec<ProfileCurve>,
    pub virtual_best: ProfileCurve,
    pub virtual_worst: ProfileCurve,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProfileError {
    #[error("no records")]
    Empty,
    #[error("backends cover different problem sets: {0}")]
    InconsistentProblems(String),
}

/// Builds per-backend curves plus the virtual best/worst envelopes. When a
/// problem was run several times on one backend, its solved time is the
/// fastest solved repetition. The virtual worst counts a problem only if
/// every backend solved it.
pub fn performance_profile(records: &[RunRecord], total: usize) -> Result<Profiles, ProfileError> {
    if records.is_empty() {
        return Err(ProfileError::Empty);
    }
    // backend -> problem -> best solved time; also the per-backend problem
    // coverage (solved or not) for the consistency check.
    let mut solved: BTreeMap<&str, BTreeMap<&str, f64>> = BTreeMap::new();
    let mut covered: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for r in records {
        covered.entry(&r.backend_id).or_default().insert(&r.problem_id);
        if r.solved() {
            let e = solved
                .entry(&r.backend_id)
                .or_default()
                .entry(&r.problem_id)
                .or_insert(f64::INFINITY);
            *e = e.min(r.wall_seconds);
        }
    }
    let first = covered.values().next().unwrap();
    for (b, probs) in &covered {
        if probs != first {
            return Err(ProfileError::InconsistentProblems((*b).to_string()));
        }
    }

    let backends: Vec<&str> = covered.keys().copied().collect();
    let curves: Vec<ProfileCurve> = backends
        .iter()
        .map(|b| {
            let times: Vec<f64> =
                solved.get(b).map_or(Vec::new(), |m| m.values().copied().collect());
            ProfileCurve::from_times(b, times, total)
        })
        .collect();

    let mut best_times = Vec::new();
    let mut worst_times = Vec::new();
    for &p in first.iter() {
        let per: Vec<Option<f64>> =
            backends.iter().map(|b| solved.get(b).and_then(|m| m.get(p)).copied()).collect();
        if let Some(min) = per.iter().flatten().cloned().reduce(f64::min) {
            best_times.push(min);
        }
        if per.iter().all(|t| t.is_some()) {
            worst_times.push(per.iter().flatten().cloned().fold(0.0, f64::max));
        }
    }
    Ok(Profiles {
        curves,
        virtual_best: ProfileCurve::from_times("virtual_best", best_times, total),
        virtual_worst: ProfileCurve::from_times("virtual_worst", worst_times, total),
    })
}

/// Emits one curve as `solve_time,num_problems_solved` rows.
pub fn write_profile_csv(curve: &ProfileCurve, w: &mut dyn Write) -> std::io::Result<()> {
    writeln!(w, "solve_time,num_problems_solved")?;
    for &(t, c) in &curve.points {
        writeln!(w, "{t},{c}")?;
    }
    Ok(())
}
