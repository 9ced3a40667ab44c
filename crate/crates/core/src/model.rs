//! Composite modular jobs on identical processors with slot-based time.
//!
//! A job is an ordered chain of element types; every chain position occupies
//! exactly one slot on the processor that runs it. Time is cut into equal
//! intervals of `interval_len_slots` slots, and each interval collects the
//! elements consumed in it into an [`IntervalBag`]. Unused slots are filled
//! with the universe's idle element so that every bag has the same
//! cardinality (`interval_len_slots * processors`).

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Position of an element type inside an [`ElementUniverse`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementIndex(pub usize);

/// A single rule broken by an input, with the entity that broke it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub entity: String,
    pub rule: String,
}

impl Violation {
    pub fn new(entity: impl Into<String>, rule: impl Into<String>) -> Self {
        Self {
            entity: entity.into(),
            rule: rule.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.entity, self.rule)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("invalid instance: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("grid covers {covered} slots but the schedule needs {needed}")]
    GridTooShort { covered: usize, needed: usize },
}

pub(crate) fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// Ordered element types; the order matters because proximity is measured
/// along it.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementUniverse {
    types: Vec<String>,
    idle: ElementIndex,
}

impl ElementUniverse {
    pub fn new(types: Vec<String>, idle: &str) -> Result<Self, ModelError> {
        let mut violations = Vec::new();
        let mut seen = HashSet::new();
        for t in &types {
            if !seen.insert(t.as_str()) {
                violations.push(Violation::new(format!("element {t}"), "duplicate id"));
            }
        }
        let idle_pos = types.iter().position(|t| t == idle);
        if idle_pos.is_none() {
            violations.push(Violation::new(
                format!("idle element {idle}"),
                "not in the universe",
            ));
        }
        if types.len() < 2 {
            violations.push(Violation::new(
                "universe",
                "needs at least one non-idle element type",
            ));
        }
        if !violations.is_empty() {
            return Err(ModelError::Invalid(violations));
        }
        Ok(Self {
            types,
            idle: ElementIndex(idle_pos.unwrap()),
        })
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    pub fn idle(&self) -> ElementIndex {
        self.idle
    }

    pub fn types(&self) -> &[String] {
        &self.types
    }

    pub fn index_of(&self, id: &str) -> Option<ElementIndex> {
        self.types.iter().position(|t| t == id).map(ElementIndex)
    }

    pub fn name(&self, idx: ElementIndex) -> &str {
        &self.types[idx.0]
    }
}

/// Raw job as written in an instance file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobSpec {
    pub id: String,
    pub chain: Vec<String>,
}

/// A validated job template: its chain is resolved against the universe.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeJob {
    pub id: String,
    pub chain: Vec<ElementIndex>,
}

impl CompositeJob {
    pub fn duration(&self) -> usize {
        self.chain.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub job: String,
    pub start: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessorPlan {
    pub id: String,
    #[serde(default)]
    pub placements: Vec<Placement>,
}

/// Per-processor placements of jobs at integer start slots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotSchedule {
    pub processors: Vec<ProcessorPlan>,
    pub horizon_slots: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub interval_len_slots: usize,
    pub intervals: usize,
}

impl TimeGrid {
    pub fn covered_slots(&self) -> usize {
        self.interval_len_slots * self.intervals
    }
}

/// Elements consumed in one interval, idle-padded and sorted by type index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalBag {
    /// 1-based interval index.
    pub interval: usize,
    pub elements: Vec<ElementIndex>,
}

impl IntervalBag {
    pub fn names<'a>(&self, universe: &'a ElementUniverse) -> Vec<&'a str> {
        self.elements.iter().map(|&e| universe.name(e)).collect()
    }
}

/// A universe, its job templates, a schedule and a grid that passed
/// validation together.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub universe: ElementUniverse,
    pub jobs: Vec<CompositeJob>,
    pub schedule: SlotSchedule,
    pub grid: TimeGrid,
}

impl Instance {
    pub fn job(&self, id: &str) -> Option<&CompositeJob> {
        self.jobs.iter().find(|j| j.id == id)
    }

    pub fn processors(&self) -> usize {
        self.schedule.processors.len()
    }

    /// Slots per interval bag.
    pub fn interval_capacity(&self) -> usize {
        self.grid.interval_len_slots * self.processors()
    }

    /// Largest end slot over all placements (0 for an empty schedule).
    pub fn last_end_slot(&self) -> usize {
        self.schedule
            .processors
            .iter()
            .flat_map(|p| &p.placements)
            .map(|pl| pl.start + self.job(&pl.job).map_or(0, CompositeJob::duration))
            .max()
            .unwrap_or(0)
    }
}

/// Resolves job chains and checks every structural rule of the model,
/// collecting all violations rather than stopping at the first.
///
/// Job ids name templates: a template may be placed any number of times.
pub fn validate_instance(
    universe: ElementUniverse,
    jobs: &[JobSpec],
    schedule: SlotSchedule,
    grid: TimeGrid,
) -> Result<Instance, ModelError> {
    let mut violations = Vec::new();
    let mut resolved = Vec::with_capacity(jobs.len());
    let mut ids = HashSet::new();

    for job in jobs {
        if !ids.insert(job.id.as_str()) {
            violations.push(Violation::new(format!("job {}", job.id), "duplicate id"));
        }
        if job.chain.is_empty() {
            violations.push(Violation::new(format!("job {}", job.id), "empty chain"));
        }
        let mut chain = Vec::with_capacity(job.chain.len());
        for (pos, el) in job.chain.iter().enumerate() {
            match universe.index_of(el) {
                Some(idx) if idx == universe.idle() => violations.push(Violation::new(
                    format!("job {} position {}", job.id, pos + 1),
                    "idle element inside chain",
                )),
                Some(idx) => chain.push(idx),
                None => violations.push(Violation::new(
                    format!("job {} position {}", job.id, pos + 1),
                    format!("unknown element type {el}"),
                )),
            }
        }
        resolved.push(CompositeJob {
            id: job.id.clone(),
            chain,
        });
    }

    if grid.interval_len_slots == 0 {
        violations.push(Violation::new("grid", "interval length must be positive"));
    }

    let mut proc_ids = HashSet::new();
    for proc in &schedule.processors {
        if !proc_ids.insert(proc.id.as_str()) {
            violations.push(Violation::new(
                format!("processor {}", proc.id),
                "duplicate id",
            ));
        }
        let mut spans: Vec<(usize, usize, &str)> = Vec::new();
        for pl in &proc.placements {
            let Some(job) = jobs.iter().find(|j| j.id == pl.job) else {
                violations.push(Violation::new(
                    format!("processor {}", proc.id),
                    format!("unknown job {}", pl.job),
                ));
                continue;
            };
            let end = pl.start + job.chain.len();
            if end > schedule.horizon_slots {
                violations.push(Violation::new(
                    format!("processor {} job {}", proc.id, pl.job),
                    format!(
                        "ends at slot {end} beyond horizon {}",
                        schedule.horizon_slots
                    ),
                ));
            }
            spans.push((pl.start, end, pl.job.as_str()));
        }
        spans.sort();
        for w in spans.windows(2) {
            if w[1].0 < w[0].1 {
                violations.push(Violation::new(
                    format!("processor {}", proc.id),
                    format!("jobs {} and {} overlap", w[0].2, w[1].2),
                ));
            }
        }
    }

    if grid.covered_slots() < schedule.horizon_slots {
        violations.push(Violation::new(
            "grid",
            format!(
                "covers {} slots, fewer than horizon {}",
                grid.covered_slots(),
                schedule.horizon_slots
            ),
        ));
    }

    if !violations.is_empty() {
        return Err(ModelError::Invalid(violations));
    }
    Ok(Instance {
        universe,
        jobs: resolved,
        schedule,
        grid,
    })
}

/// Number of intervals until the last processor finishes: the largest
/// 1-based interval index holding an occupied slot.
pub fn makespan(instance: &Instance) -> usize {
    let len = instance.grid.interval_len_slots;
    instance.last_end_slot().div_ceil(len)
}

/// The clustering of consumed elements by interval.
pub fn interval_bags(instance: &Instance) -> Result<Vec<IntervalBag>, ModelError> {
    let grid = instance.grid;
    let needed = instance
        .last_end_slot()
        .max(instance.schedule.horizon_slots);
    if grid.covered_slots() < needed {
        return Err(ModelError::GridTooShort {
            covered: grid.covered_slots(),
            needed,
        });
    }
    let capacity = instance.interval_capacity();
    let mut bags: Vec<Vec<ElementIndex>> = vec![Vec::with_capacity(capacity); grid.intervals];

    for proc in &instance.schedule.processors {
        for pl in &proc.placements {
            let job = instance
                .job(&pl.job)
                .expect("validated instance references known jobs");
            for (offset, &el) in job.chain.iter().enumerate() {
                bags[(pl.start + offset) / grid.interval_len_slots].push(el);
            }
        }
    }

    Ok(bags
        .into_iter()
        .enumerate()
        .map(|(i, mut elements)| {
            elements.resize(capacity, instance.universe.idle());
            elements.sort();
            IntervalBag {
                interval: i + 1,
                elements,
            }
        })
        .collect())
}
