//! Earliness/tardiness penalties and window feasibility of fixed job
//! sequences.
//!
//! Jobs on a machine are dispatched in their given positions, each starting
//! as early as possible: `start = max(previous completion, window opening)`.
//! Waiting before a window opens is allowed anywhere in the sequence.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Completions beyond the window close by more than this are late.
pub const WINDOW_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum JitError {
    #[error("job {id}: processing time must be non-negative")]
    NegativeProcessingTime { id: String },
    #[error("job {id}: window start must precede window end")]
    EmptyWindow { id: String },
    #[error("machine {machine}: positions must be 1..{count} without gaps or repeats")]
    BadPositions { machine: u32, count: usize },
    #[error("penalty weights must be non-negative")]
    NegativeWeight,
    #[error("no completion time for job {id}")]
    MissingCompletion { id: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowJob {
    pub id: String,
    pub processing_time: f64,
    /// `[opens, closes]`.
    pub window: [f64; 2],
    pub machine: u32,
    pub position: u32,
}

impl WindowJob {
    pub fn opens(&self) -> f64 {
        self.window[0]
    }

    pub fn closes(&self) -> f64 {
        self.window[1]
    }

    fn check(&self) -> Result<(), JitError> {
        if !(self.processing_time >= 0.0) {
            return Err(JitError::NegativeProcessingTime {
                id: self.id.clone(),
            });
        }
        if !(self.opens() < self.closes()) {
            return Err(JitError::EmptyWindow {
                id: self.id.clone(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltyWeights {
    pub earliness: f64,
    pub tardiness: f64,
}

impl Default for PenaltyWeights {
    fn default() -> Self {
        Self {
            earliness: 1.0,
            tardiness: 1.0,
        }
    }
}

impl PenaltyWeights {
    pub fn new(earliness: f64, tardiness: f64) -> Result<Self, JitError> {
        if !(earliness >= 0.0 && tardiness >= 0.0) {
            return Err(JitError::NegativeWeight);
        }
        Ok(Self {
            earliness,
            tardiness,
        })
    }
}

pub fn earliness(job: &WindowJob, completion: f64) -> f64 {
    (job.opens() - completion).max(0.0)
}

pub fn tardiness(job: &WindowJob, completion: f64) -> f64 {
    (completion - job.closes()).max(0.0)
}

fn weighted_terms<'a>(
    jobs: &'a [WindowJob],
    completions: &'a BTreeMap<String, f64>,
    w: PenaltyWeights,
) -> impl Iterator<Item = Result<(f64, f64), JitError>> + 'a {
    jobs.iter().map(move |job| {
        let c = *completions
            .get(&job.id)
            .ok_or_else(|| JitError::MissingCompletion { id: job.id.clone() })?;
        Ok((
            w.earliness * earliness(job, c),
            w.tardiness * tardiness(job, c),
        ))
    })
}

/// Sum over jobs of weighted earliness plus weighted tardiness.
pub fn penalty_sum(
    jobs: &[WindowJob],
    completions: &BTreeMap<String, f64>,
    weights: PenaltyWeights,
) -> Result<f64, JitError> {
    weighted_terms(jobs, completions, weights).try_fold(0.0, |acc, t| {
        let (u, v) = t?;
        Ok(acc + u + v)
    })
}

/// Largest single weighted earliness or tardiness term.
pub fn penalty_max(
    jobs: &[WindowJob],
    completions: &BTreeMap<String, f64>,
    weights: PenaltyWeights,
) -> Result<f64, JitError> {
    weighted_terms(jobs, completions, weights).try_fold(0.0f64, |acc, t| {
        let (u, v) = t?;
        Ok(acc.max(u).max(v))
    })
}

/// Jobs whose per-machine positions have been checked.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowInstance {
    machines: BTreeMap<u32, Vec<WindowJob>>,
}

impl WindowInstance {
    pub fn new(jobs: Vec<WindowJob>) -> Result<Self, JitError> {
        let mut machines: BTreeMap<u32, Vec<WindowJob>> = BTreeMap::new();
        for job in jobs {
            job.check()?;
            machines.entry(job.machine).or_default().push(job);
        }
        for (&machine, seq) in machines.iter_mut() {
            seq.sort_by_key(|j| j.position);
            let ok = seq
                .iter()
                .enumerate()
                .all(|(i, j)| j.position as usize == i + 1);
            if !ok {
                return Err(JitError::BadPositions {
                    machine,
                    count: seq.len(),
                });
            }
        }
        Ok(Self { machines })
    }

    pub fn jobs(&self) -> impl Iterator<Item = &WindowJob> {
        self.machines.values().flatten()
    }

    pub fn machines(&self) -> &BTreeMap<u32, Vec<WindowJob>> {
        &self.machines
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimedJob {
    pub id: String,
    pub machine: u32,
    pub start: f64,
    pub completion: f64,
    pub on_time: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowSchedule {
    /// Machine order, then position order.
    pub jobs: Vec<TimedJob>,
    pub feasible: bool,
}

impl WindowSchedule {
    pub fn completions(&self) -> BTreeMap<String, f64> {
        self.jobs
            .iter()
            .map(|j| (j.id.clone(), j.completion))
            .collect()
    }

    pub fn first_late(&self) -> Option<&TimedJob> {
        self.jobs.iter().find(|j| !j.on_time)
    }
}

/// Earliest-start dispatch of every machine sequence.
pub fn schedule_windows(instance: &WindowInstance) -> WindowSchedule {
    let mut jobs = Vec::new();
    for (&machine, seq) in &instance.machines {
        let mut free_at = 0.0f64;
        for job in seq {
            let start = free_at.max(job.opens());
            let completion = start + job.processing_time;
            free_at = completion;
            jobs.push(TimedJob {
                id: job.id.clone(),
                machine,
                start,
                completion,
                on_time: completion <= job.closes() + WINDOW_TOLERANCE,
            });
        }
    }
    let feasible = jobs.iter().all(|j| j.on_time);
    WindowSchedule { jobs, feasible }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn wj(id: &str, theta: f64, t1: f64, t2: f64, machine: u32, position: u32) -> WindowJob {
        WindowJob {
            id: id.into(),
            processing_time: theta,
            window: [t1, t2],
            machine,
            position,
        }
    }

    fn completions(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn earliness_and_tardiness() {
        let a1 = wj("a1", 0.5, 0.0, 1.1, 1, 1);
        assert_eq!(earliness(&a1, 0.5), 0.0);
        assert_eq!(tardiness(&a1, 0.5), 0.0);
        let j = wj("j", 0.6, 0.6, 1.6, 1, 1);
        assert!((earliness(&j, 0.4) - 0.2).abs() < 1e-12);
        assert_eq!(tardiness(&j, 0.4), 0.0);
        assert_eq!(earliness(&j, 2.0), 0.0);
        assert!((tardiness(&j, 2.0) - 0.4).abs() < 1e-12);
    }

    #[test]
    fn penalty_examples() {
        let j1 = wj("j1", 0.1, 0.6, 1.6, 1, 1);
        let j2 = wj("j2", 0.1, 0.6, 1.6, 1, 2);
        let inside = completions(&[("j1", 1.0), ("j2", 1.5)]);
        let w = PenaltyWeights::default();
        assert_eq!(
            penalty_sum(&[j1.clone(), j2.clone()], &inside, w).unwrap(),
            0.0
        );
        assert_eq!(
            penalty_max(&[j1.clone(), j2.clone()], &inside, w).unwrap(),
            0.0
        );

        let early = completions(&[("j1", 0.4)]);
        let w21 = PenaltyWeights::new(2.0, 1.0).unwrap();
        assert!((penalty_sum(std::slice::from_ref(&j1), &early, w21).unwrap() - 0.4).abs() < 1e-12);

        let mixed = completions(&[("j1", 0.4), ("j2", 2.0)]);
        let both = [j1.clone(), j2.clone()];
        assert!((penalty_sum(&both, &mixed, w).unwrap() - 0.6).abs() < 1e-12);
        assert!((penalty_max(&both, &mixed, w).unwrap() - 0.4).abs() < 1e-12);

        let j3 = wj("j3", 0.1, 0.7, 1.0, 1, 1);
        let w3 = PenaltyWeights::new(3.0, 1.0).unwrap();
        let c = completions(&[("j3", 0.4)]);
        assert!((penalty_max(&[j3], &c, w3).unwrap() - 0.9).abs() < 1e-12);
    }

    #[test]
    fn missing_completion_is_an_error() {
        let j1 = wj("j1", 0.1, 0.6, 1.6, 1, 1);
        assert_eq!(
            penalty_sum(&[j1], &BTreeMap::new(), PenaltyWeights::default()),
            Err(JitError::MissingCompletion { id: "j1".into() })
        );
    }

    #[test]
    fn invalid_jobs_are_rejected() {
        assert!(WindowInstance::new(vec![wj("x", -1.0, 0.0, 1.0, 1, 1)]).is_err());
        assert!(WindowInstance::new(vec![wj("x", 1.0, 1.0, 1.0, 1, 1)]).is_err());
        assert!(matches!(
            WindowInstance::new(vec![
                wj("x", 1.0, 0.0, 2.0, 1, 1),
                wj("y", 1.0, 0.0, 2.0, 1, 3)
            ]),
            Err(JitError::BadPositions { machine: 1, .. })
        ));
        assert!(PenaltyWeights::new(-1.0, 0.0).is_err());
    }

    #[test]
    fn waiting_before_window_opens() {
        let inst = WindowInstance::new(vec![
            wj("a", 0.5, 0.0, 1.0, 1, 1),
            wj("b", 0.5, 2.0, 3.0, 1, 2),
        ])
        .unwrap();
        let s = schedule_windows(&inst);
        assert_eq!(s.jobs[1].start, 2.0);
        assert!(s.feasible);
    }

    fn any_instance() -> impl Strategy<Value = Vec<WindowJob>> {
        proptest::collection::vec((0.0f64..2.0, 0.0f64..5.0, 0.1f64..3.0, 1u32..4), 1..10).prop_map(
            |rows| {
                let mut next_pos = BTreeMap::new();
                rows.into_iter()
                    .enumerate()
                    .map(|(i, (theta, t1, width, machine))| {
                        let pos = next_pos.entry(machine).or_insert(0);
                        *pos += 1;
                        wj(&format!("j{i}"), theta, t1, t1 + width, machine, *pos)
                    })
                    .collect()
            },
        )
    }

    proptest! {
        #[test]
        fn at_most_one_of_earliness_tardiness(t1 in 0.0f64..5.0, w in 0.01f64..3.0, c in 0.0f64..10.0) {
            let j = wj("j", 0.0, t1, t1 + w, 1, 1);
            let (u, v) = (earliness(&j, c), tardiness(&j, c));
            prop_assert!(u >= 0.0 && v >= 0.0);
            prop_assert!(!(u > 0.0 && v > 0.0));
        }

        #[test]
        fn longer_processing_never_restores_feasibility(jobs in any_instance(), which in 0usize..10, extra in 0.0f64..2.0) {
            let base = schedule_windows(&WindowInstance::new(jobs.clone()).unwrap());
            let mut bumped = jobs;
            let k = which % bumped.len();
            bumped[k].processing_time += extra;
            let after = schedule_windows(&WindowInstance::new(bumped).unwrap());
            if !base.feasible {
                prop_assert!(!after.feasible);
            }
        }

        #[test]
        fn penalties_are_homogeneous(jobs in any_instance(), a in 0.0f64..3.0, b in 0.0f64..3.0, lambda in 0.1f64..10.0) {
            let inst = WindowInstance::new(jobs.clone()).unwrap();
            // Completions shifted so that some jobs are early or late.
            let comps: BTreeMap<String, f64> = schedule_windows(&inst)
                .jobs
                .iter()
                .enumerate()
                .map(|(i, j)| (j.id.clone(), (j.completion + i as f64 * 0.7 - 1.5).max(0.0)))
                .collect();
            let w = PenaltyWeights::new(a, b).unwrap();
            let ws = PenaltyWeights::new(a * lambda, b * lambda).unwrap();
            let (s, m) = (penalty_sum(&jobs, &comps, w).unwrap(), penalty_max(&jobs, &comps, w).unwrap());
            prop_assert!((penalty_sum(&jobs, &comps, ws).unwrap() - lambda * s).abs() < 1e-9 * (1.0 + s));
            prop_assert!((penalty_max(&jobs, &comps, ws).unwrap() - lambda * m).abs() < 1e-9 * (1.0 + m));
            prop_assert!(s + 1e-12 >= m);
        }
    }
}
