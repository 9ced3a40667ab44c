//! Schedule repair: correction variants grouped per target, a budgeted
//! multiple-choice knapsack to pick at most one variant per group, and the
//! compute / compare / correct loop over the home-building cascade.

mod mckp;
mod repair;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::homebuilding::HomeError;

pub use mckp::{mckp_exact, mckp_greedy, DEFAULT_COST_SCALE, DEFAULT_STATE_CAP};
pub use repair::{
    apply_correction, apply_selection, generate_correction_groups, improvement_loop, score_variant,
    violated_months, violation_measure, ImproveConfig, IterationRecord, LoopOutcome, LoopResult,
    RepairContext,
};

#[derive(Debug, Error, PartialEq)]
pub enum ImproveError {
    #[error("budget must be a non-negative number, got {0}")]
    NegativeBudget(f64),
    #[error("group {group}: variant {variant} has invalid profit/cost")]
    BadVariant { group: usize, variant: usize },
    #[error("duplicate group index {0}")]
    DuplicateGroup(usize),
    #[error("instance too large for exact oracle: {states} states exceed cap {cap}")]
    TooLarge { states: u128, cap: u128 },
    #[error("group {group}: cost {cost} is not a multiple of 1/{scale}")]
    NonIntegralCost { group: usize, cost: f64, scale: u32 },
    #[error("degenerate exchange of {0} with itself")]
    DegenerateExchange(String),
    #[error("shift of {building} by {days} days is not positive")]
    BadShift { building: String, days: f64 },
    #[error("correction leaves building {building} outside [0, {horizon}] months")]
    OutOfHorizon { building: String, horizon: f64 },
    #[error("overlap on team {team}: {first} and {second}")]
    Overlap {
        team: String,
        first: String,
        second: String,
    },
    #[error("selected corrections both touch building {0}")]
    ConflictingTargets(String),
    #[error("building {0} is not on any team")]
    Unplaced(String),
    #[error("selection refers to group {group} variant {variant}, which does not exist")]
    UnknownChoice { group: usize, variant: usize },
    #[error(transparent)]
    Home(#[from] HomeError),
}

/// One schedule-repair move.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Correction {
    None,
    ShiftRight {
        building: String,
        days: f64,
    },
    ShiftLeft {
        building: String,
        days: f64,
    },
    /// Swap the (team, start) placements of two buildings.
    Exchange {
        first: String,
        second: String,
    },
}

impl Correction {
    /// Buildings whose placement the move changes.
    pub fn targets(&self) -> Vec<&str> {
        match self {
            Correction::None => vec![],
            Correction::ShiftRight { building, .. } | Correction::ShiftLeft { building, .. } => {
                vec![building]
            }
            Correction::Exchange { first, second } => vec![first, second],
        }
    }
}

impl fmt::Display for Correction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Correction::None => write!(f, "none"),
            Correction::ShiftRight { building, days } => write!(f, "{building} +{days}d"),
            Correction::ShiftLeft { building, days } => write!(f, "{building} -{days}d"),
            Correction::Exchange { first, second } => write!(f, "{first} <-> {second}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrectionVariant {
    pub correction: Correction,
    pub profit: f64,
    pub cost: f64,
}

impl CorrectionVariant {
    pub fn none() -> Self {
        Self {
            correction: Correction::None,
            profit: 0.0,
            cost: 0.0,
        }
    }
}

/// Mutually exclusive variants; at most one is selected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrectionGroup {
    pub index: usize,
    pub targets: Vec<String>,
    pub variants: Vec<CorrectionVariant>,
}

/// Variant chosen per group (`None` = nothing taken), keyed by group index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub choices: BTreeMap<usize, Option<usize>>,
    pub profit: f64,
    pub cost: f64,
}

impl Selection {
    /// `(group, variant)` pairs actually taken, in group order.
    pub fn taken(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.choices.iter().filter_map(|(&g, &v)| v.map(|v| (g, v)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BudgetedMckp {
    groups: Vec<CorrectionGroup>,
    budget: f64,
}

impl BudgetedMckp {
    /// Groups are kept in index order, so the solvers do not depend on the
    /// order they were supplied in.
    pub fn new(mut groups: Vec<CorrectionGroup>, budget: f64) -> Result<Self, ImproveError> {
        if !(budget >= 0.0) || !budget.is_finite() {
            return Err(ImproveError::NegativeBudget(budget));
        }
        groups.sort_by_key(|g| g.index);
        for w in groups.windows(2) {
            if w[0].index == w[1].index {
                return Err(ImproveError::DuplicateGroup(w[0].index));
            }
        }
        for g in &groups {
            for (j, v) in g.variants.iter().enumerate() {
                if !(v.cost >= 0.0) || !v.cost.is_finite() || !v.profit.is_finite() {
                    return Err(ImproveError::BadVariant {
                        group: g.index,
                        variant: j,
                    });
                }
            }
        }
        Ok(Self { groups, budget })
    }

    pub fn groups(&self) -> &[CorrectionGroup] {
        &self.groups
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn group(&self, index: usize) -> Option<&CorrectionGroup> {
        self.groups
            .binary_search_by_key(&index, |g| g.index)
            .ok()
            .map(|i| &self.groups[i])
    }

    pub fn variant(&self, group: usize, variant: usize) -> Option<&CorrectionVariant> {
        self.group(group).and_then(|g| g.variants.get(variant))
    }

    /// Builds a selection from explicit choices, totalling profit and cost.
    pub fn selection(
        &self,
        choices: BTreeMap<usize, Option<usize>>,
    ) -> Result<Selection, ImproveError> {
        let (mut profit, mut cost) = (0.0, 0.0);
        for (&g, &v) in &choices {
            if let Some(v) = v {
                let var = self.variant(g, v).ok_or(ImproveError::UnknownChoice {
                    group: g,
                    variant: v,
                })?;
                profit += var.profit;
                cost += var.cost;
            }
        }
        Ok(Selection {
            choices,
            profit,
            cost,
        })
    }
}
