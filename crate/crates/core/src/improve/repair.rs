use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{
    mckp_greedy, BudgetedMckp, Correction, CorrectionGroup, CorrectionVariant, ImproveError,
    Selection,
};
use crate::balance::CountVector;
use crate::homebuilding::{
    Catalog, HomeError, RequirementTable, TeamSchedule, DAYS_PER_MONTH, TIME_TOLERANCE,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ImproveConfig {
    /// Cost budget per iteration.
    pub budget: f64,
    pub max_iterations: usize,
    pub shift_days: Vec<f64>,
    pub exchanges: bool,
    /// Weight per detail type in the violation measure; all 1 when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail_weights: Option<Vec<f64>>,
    pub cost_per_day: f64,
    pub exchange_cost: f64,
    /// Floor for capacities in the relative excess.
    pub epsilon: f64,
}

impl Default for ImproveConfig {
    fn default() -> Self {
        Self {
            budget: 5.0,
            max_iterations: 20,
            shift_days: vec![3.0, 7.0, 14.0, 21.0],
            exchanges: true,
            detail_weights: None,
            cost_per_day: 0.1,
            exchange_cost: 2.0,
            epsilon: 1e-9,
        }
    }
}

/// Everything the repair loop holds fixed.
#[derive(Debug, Clone, Copy)]
pub struct RepairContext<'a> {
    pub catalog: &'a Catalog,
    pub capacity: &'a CountVector,
    /// Months in the planning horizon.
    pub horizon: usize,
    pub config: &'a ImproveConfig,
}

impl RepairContext<'_> {
    pub fn table(&self, schedule: &TeamSchedule) -> Result<RequirementTable, HomeError> {
        self.catalog
            .horizon_requirement_table(schedule, self.horizon)
    }

    fn weight(&self, detail: usize) -> f64 {
        self.config
            .detail_weights
            .as_ref()
            .and_then(|w| w.get(detail).copied())
            .unwrap_or(1.0)
    }
}

/// Weighted relative excess over capacity summed over all months and details.
pub fn violation_measure(ctx: &RepairContext, table: &RequirementTable) -> f64 {
    let cap = ctx.capacity.as_slice();
    table
        .rows
        .iter()
        .flat_map(|row| row.iter().zip(cap).enumerate())
        .map(|(d, (g, c))| ctx.weight(d) * (g - c).max(0.0) / c.max(ctx.config.epsilon))
        .sum()
}

/// 1-based months where some detail exceeds capacity.
pub fn violated_months(capacity: &CountVector, table: &RequirementTable) -> Vec<usize> {
    table
        .rows
        .iter()
        .enumerate()
        .filter(|(_, row)| row.iter().zip(capacity.as_slice()).any(|(g, c)| g > c))
        .map(|(i, _)| i + 1)
        .collect()
}

fn check_placement(
    catalog: &Catalog,
    schedule: &TeamSchedule,
    building: &str,
    horizon: f64,
) -> Result<(), ImproveError> {
    let (_, start) = schedule
        .locate(building)
        .ok_or_else(|| ImproveError::Unplaced(building.to_string()))?;
    let end = start + catalog.building(building)?.assembly_duration;
    if start < -TIME_TOLERANCE || end > horizon + TIME_TOLERANCE {
        return Err(ImproveError::OutOfHorizon {
            building: building.to_string(),
            horizon,
        });
    }
    Ok(())
}

/// Applies one move, checking horizon bounds and team occupancy.
pub fn apply_correction(
    catalog: &Catalog,
    schedule: &TeamSchedule,
    correction: &Correction,
    horizon: usize,
) -> Result<TeamSchedule, ImproveError> {
    let mut out = schedule.clone();
    let locate = |b: &str| {
        schedule
            .locate(b)
            .ok_or_else(|| ImproveError::Unplaced(b.to_string()))
    };
    match correction {
        Correction::None => return Ok(out),
        Correction::ShiftRight { building, days } | Correction::ShiftLeft { building, days } => {
            if !(*days > 0.0) {
                return Err(ImproveError::BadShift {
                    building: building.clone(),
                    days: *days,
                });
            }
            let sign = if matches!(correction, Correction::ShiftRight { .. }) {
                1.0
            } else {
                -1.0
            };
            let (team, start) = locate(building)?;
            out.set_start(building, team, start + sign * days / DAYS_PER_MONTH);
        }
        Correction::Exchange { first, second } => {
            if first == second {
                return Err(ImproveError::DegenerateExchange(first.clone()));
            }
            let (t1, s1) = locate(first)?;
            let (t2, s2) = locate(second)?;
            out.set_start(first, t2, s2);
            out.set_start(second, t1, s1);
        }
    }
    for b in correction.targets() {
        check_placement(catalog, &out, b, horizon as f64)?;
    }
    if let Some(HomeError::Overlap {
        team,
        first,
        second,
    }) = out.find_overlap(catalog)?
    {
        return Err(ImproveError::Overlap {
            team,
            first,
            second,
        });
    }
    Ok(out)
}

/// Profit (drop in the violation measure) and cost of applying `correction`.
pub fn score_variant(
    ctx: &RepairContext,
    schedule: &TeamSchedule,
    base_measure: f64,
    correction: &Correction,
) -> Result<(f64, f64), ImproveError> {
    let cost = match correction {
        Correction::None => return Ok((0.0, 0.0)),
        Correction::ShiftRight { days, .. } | Correction::ShiftLeft { days, .. } => {
            ctx.config.cost_per_day * days.abs()
        }
        Correction::Exchange { .. } => ctx.config.exchange_cost,
    };
    let next = apply_correction(ctx.catalog, schedule, correction, ctx.horizon)?;
    let v = violation_measure(ctx, &ctx.table(&next)?);
    Ok((base_measure - v, cost))
}

/// One group per building active in a violated month, holding the feasible
/// shifts and exchanges of that building, scored against the current
/// schedule. Groups are numbered from 1 in building-id order.
pub fn generate_correction_groups(
    ctx: &RepairContext,
    schedule: &TeamSchedule,
) -> Result<Vec<CorrectionGroup>, ImproveError> {
    let table = ctx.table(schedule)?;
    let violated = violated_months(ctx.capacity, &table);
    if violated.is_empty() {
        return Ok(Vec::new());
    }
    let base = violation_measure(ctx, &table);

    let placed: BTreeMap<&str, f64> = schedule
        .assignments()
        .map(|a| (a.building.as_str(), a.start))
        .collect();
    let mut groups = Vec::new();
    for (&id, &start) in &placed {
        let end = start + ctx.catalog.building(id)?.assembly_duration;
        let active = violated
            .iter()
            .any(|&m| start < m as f64 && end > m as f64 - 1.0);
        if !active {
            continue;
        }
        let mut moves = Vec::new();
        for &days in &ctx.config.shift_days {
            moves.push(Correction::ShiftRight {
                building: id.to_string(),
                days,
            });
            moves.push(Correction::ShiftLeft {
                building: id.to_string(),
                days,
            });
        }
        if ctx.config.exchanges {
            moves.extend(
                placed
                    .keys()
                    .filter(|&&o| o != id)
                    .map(|o| Correction::Exchange {
                        first: id.to_string(),
                        second: o.to_string(),
                    }),
            );
        }
        let mut variants = vec![CorrectionVariant::none()];
        for m in moves {
            match score_variant(ctx, schedule, base, &m) {
                Ok((profit, cost)) => variants.push(CorrectionVariant {
                    correction: m,
                    profit,
                    cost,
                }),
                Err(ImproveError::Home(e)) => return Err(e.into()),
                Err(_) => {}
            }
        }
        groups.push(CorrectionGroup {
            index: groups.len() + 1,
            targets: vec![id.to_string()],
            variants,
        });
    }
    Ok(groups)
}

/// Applies every taken variant. Targets must be pairwise disjoint and the
/// result must keep teams free of overlaps.
pub fn apply_selection(
    catalog: &Catalog,
    schedule: &TeamSchedule,
    problem: &BudgetedMckp,
    selection: &Selection,
    horizon: usize,
) -> Result<TeamSchedule, ImproveError> {
    let mut touched = BTreeSet::new();
    let mut out = schedule.clone();
    for (g, v) in selection.taken() {
        let variant = problem.variant(g, v).ok_or(ImproveError::UnknownChoice {
            group: g,
            variant: v,
        })?;
        if let Correction::Exchange { first, second } = &variant.correction {
            if first == second {
                return Err(ImproveError::DegenerateExchange(first.clone()));
            }
        }
        for t in variant.correction.targets() {
            if !touched.insert(t.to_string()) {
                return Err(ImproveError::ConflictingTargets(t.to_string()));
            }
        }
        // Intermediate overlaps may vanish once every move is in place, so
        // overlap is checked on the final schedule only.
        out = apply_unchecked(&out, &variant.correction)?;
    }
    for t in &touched {
        check_placement(catalog, &out, t, horizon as f64)?;
    }
    if let Some(HomeError::Overlap {
        team,
        first,
        second,
    }) = out.find_overlap(catalog)?
    {
        return Err(ImproveError::Overlap {
            team,
            first,
            second,
        });
    }
    Ok(out)
}

fn apply_unchecked(
    schedule: &TeamSchedule,
    correction: &Correction,
) -> Result<TeamSchedule, ImproveError> {
    let mut out = schedule.clone();
    let locate = |b: &str| {
        schedule
            .locate(b)
            .ok_or_else(|| ImproveError::Unplaced(b.to_string()))
    };
    match correction {
        Correction::None => {}
        Correction::ShiftRight { building, days } => {
            let (t, s) = locate(building)?;
            out.set_start(building, t, s + days / DAYS_PER_MONTH);
        }
        Correction::ShiftLeft { building, days } => {
            let (t, s) = locate(building)?;
            out.set_start(building, t, s - days / DAYS_PER_MONTH);
        }
        Correction::Exchange { first, second } => {
            let (t1, s1) = locate(first)?;
            let (t2, s2) = locate(second)?;
            out.set_start(first, t2, s2);
            out.set_start(second, t1, s1);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoopOutcome {
    /// Every month within capacity.
    Balanced,
    /// No affordable selection lowered the violation measure.
    NoImprovement,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub measure_before: f64,
    pub measure_after: f64,
    /// Largest absolute excess over capacity before the iteration's moves.
    pub max_violation: f64,
    /// Per-detail monthly peaks before the iteration's moves.
    pub peaks: Vec<f64>,
    pub violated_months: Vec<usize>,
    pub groups: usize,
    pub applied: Vec<Correction>,
    pub profit: f64,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopResult {
    pub schedule: TeamSchedule,
    pub outcome: LoopOutcome,
    pub initial_measure: f64,
    pub final_measure: f64,
    pub trace: Vec<IterationRecord>,
}

fn max_violation(capacity: &CountVector, table: &RequirementTable) -> f64 {
    table
        .rows
        .iter()
        .flat_map(|r| r.iter().zip(capacity.as_slice()).map(|(g, c)| g - c))
        .fold(0.0, f64::max)
}

fn peaks(table: &RequirementTable) -> Vec<f64> {
    (0..table.detail_types.len())
        .map(|d| table.peak(d).1.max(0.0))
        .collect()
}

/// Compute requirements, compare with capacity, stop when balanced;
/// otherwise generate and score corrections, pick them by ratio packing
/// within the budget and apply. A selection whose moves clash is applied
/// move by move, skipping clashes; when the result does not lower the
/// measure, the single most profitable affordable move is tried instead.
pub fn improvement_loop(
    ctx: &RepairContext,
    schedule: &TeamSchedule,
) -> Result<LoopResult, ImproveError> {
    let mut current = schedule.clone();
    let mut table = ctx.table(&current)?;
    let initial = violation_measure(ctx, &table);
    let mut measure = initial;
    let mut trace = Vec::new();

    let outcome = loop {
        let violated = violated_months(ctx.capacity, &table);
        if violated.is_empty() {
            break LoopOutcome::Balanced;
        }
        if trace.len() >= ctx.config.max_iterations {
            break LoopOutcome::IterationLimit;
        }
        let groups = generate_correction_groups(ctx, &current)?;
        let problem = BudgetedMckp::new(groups, ctx.config.budget)?;
        let selection = mckp_greedy(&problem);

        let mut record = IterationRecord {
            iteration: trace.len(),
            measure_before: measure,
            measure_after: measure,
            max_violation: max_violation(ctx.capacity, &table),
            peaks: peaks(&table),
            violated_months: violated,
            groups: problem.groups().len(),
            applied: Vec::new(),
            profit: 0.0,
            cost: 0.0,
        };

        let accepted = attempt(ctx, &current, &problem, &selection, measure)?;
        match accepted {
            Some((next, applied, next_table, next_measure)) => {
                record.measure_after = next_measure;
                record.profit = measure - next_measure;
                record.cost = applied
                    .iter()
                    .map(|&(g, v)| problem.variant(g, v).expect("taken").cost)
                    .sum();
                record.applied = applied
                    .iter()
                    .map(|&(g, v)| problem.variant(g, v).expect("taken").correction.clone())
                    .collect();
                trace.push(record);
                current = next;
                table = next_table;
                measure = next_measure;
            }
            None => {
                trace.push(record);
                break LoopOutcome::NoImprovement;
            }
        }
    };

    Ok(LoopResult {
        schedule: current,
        outcome,
        initial_measure: initial,
        final_measure: measure,
        trace,
    })
}

type Accepted = (TeamSchedule, Vec<(usize, usize)>, RequirementTable, f64);

fn attempt(
    ctx: &RepairContext,
    current: &TeamSchedule,
    problem: &BudgetedMckp,
    selection: &Selection,
    measure: f64,
) -> Result<Option<Accepted>, ImproveError> {
    let evaluate =
        |s: TeamSchedule, taken: Vec<(usize, usize)>| -> Result<Option<Accepted>, ImproveError> {
            if taken.is_empty() {
                return Ok(None);
            }
            let t = ctx.table(&s)?;
            let v = violation_measure(ctx, &t);
            Ok((v < measure - 1e-12).then_some((s, taken, t, v)))
        };

    let taken: Vec<_> = selection.taken().collect();
    let joint = match apply_selection(ctx.catalog, current, problem, selection, ctx.horizon) {
        Ok(s) => evaluate(s, taken.clone())?,
        Err(ImproveError::Home(e)) => return Err(e.into()),
        Err(_) => {
            // Sequential fallback: each move on top of the previous ones.
            let mut s = current.clone();
            let mut kept = Vec::new();
            let mut touched = BTreeSet::new();
            for &(g, v) in &taken {
                let c = &problem.variant(g, v).expect("taken").correction;
                if c.targets().iter().any(|t| touched.contains(*t)) {
                    continue;
                }
                if let Ok(next) = apply_correction(ctx.catalog, &s, c, ctx.horizon) {
                    touched.extend(c.targets().into_iter().map(str::to_string));
                    s = next;
                    kept.push((g, v));
                }
            }
            evaluate(s, kept)?
        }
    };
    if joint.is_some() {
        return Ok(joint);
    }

    let mut best: Option<(usize, usize, f64)> = None;
    for g in problem.groups() {
        for (j, v) in g.variants.iter().enumerate() {
            if v.profit > 0.0
                && v.cost <= problem.budget() + 1e-9
                && best.is_none_or(|b| v.profit > b.2)
            {
                best = Some((g.index, j, v.profit));
            }
        }
    }
    let Some((g, j, _)) = best else {
        return Ok(None);
    };
    if taken == [(g, j)] {
        return Ok(None);
    }
    let c = &problem.variant(g, j).expect("exists").correction;
    match apply_correction(ctx.catalog, current, c, ctx.horizon) {
        Ok(s) => evaluate(s, vec![(g, j)]),
        Err(ImproveError::Home(e)) => Err(e.into()),
        Err(_) => Ok(None),
    }
}
