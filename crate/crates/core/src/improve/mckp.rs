use std::cmp::Ordering;
use std::collections::BTreeMap;

use super::{BudgetedMckp, ImproveError, Selection};

pub const DEFAULT_COST_SCALE: u32 = 10;
pub const DEFAULT_STATE_CAP: u128 = 20_000_000;

const EPS: f64 = 1e-9;

/// Ratio packing: variants by profit/cost descending, then group and
/// variant index; a variant is taken when its group is still open and its
/// cost fits the remaining budget. Zero-cost variants with positive profit
/// rank first; non-positive profits are never taken.
pub fn mckp_greedy(problem: &BudgetedMckp) -> Selection {
    let mut items: Vec<(f64, usize, usize, f64)> = Vec::new();
    for g in problem.groups() {
        for (j, v) in g.variants.iter().enumerate() {
            if v.profit <= 0.0 {
                continue;
            }
            let ratio = if v.cost == 0.0 {
                f64::INFINITY
            } else {
                v.profit / v.cost
            };
            items.push((ratio, g.index, j, v.cost));
        }
    }
    items.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap_or(Ordering::Equal)
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });

    let mut choices: BTreeMap<usize, Option<usize>> =
        problem.groups().iter().map(|g| (g.index, None)).collect();
    let mut left = problem.budget();
    for (_, g, j, cost) in items {
        let slot = choices.get_mut(&g).expect("group present");
        if slot.is_none() && cost <= left + EPS {
            *slot = Some(j);
            left -= cost;
        }
    }
    problem
        .selection(choices)
        .expect("choices drawn from problem")
}

/// Exact optimum by dynamic programming over costs scaled to integers.
///
/// Costs must be multiples of `1 / cost_scale`; the budget is rounded down
/// to that grid. Among optimal selections the lexicographically smallest is
/// returned, taking nothing before variant 0 before variant 1 and so on,
/// group by group.
pub fn mckp_exact(
    problem: &BudgetedMckp,
    cost_scale: u32,
    state_cap: u128,
) -> Result<Selection, ImproveError> {
    let scale = f64::from(cost_scale);
    let cap = (problem.budget() * scale + EPS).floor() as usize;
    let groups = problem.groups();
    let states = (groups.len() as u128 + 1) * (cap as u128 + 1);
    if states > state_cap {
        return Err(ImproveError::TooLarge {
            states,
            cap: state_cap,
        });
    }

    let mut weights = Vec::with_capacity(groups.len());
    for g in groups {
        let mut w = Vec::with_capacity(g.variants.len());
        for v in &g.variants {
            let scaled = v.cost * scale;
            if (scaled - scaled.round()).abs() > 1e-6 {
                return Err(ImproveError::NonIntegralCost {
                    group: g.index,
                    cost: v.cost,
                    scale: cost_scale,
                });
            }
            w.push(scaled.round() as usize);
        }
        weights.push(w);
    }

    // best[g][c]: optimal profit of groups g.. within capacity c.
    let width = cap + 1;
    let mut best = vec![0.0f64; (groups.len() + 1) * width];
    for gi in (0..groups.len()).rev() {
        for c in 0..width {
            let mut b = best[(gi + 1) * width + c];
            for (v, &w) in groups[gi].variants.iter().zip(&weights[gi]) {
                if w <= c {
                    b = b.max(v.profit + best[(gi + 1) * width + c - w]);
                }
            }
            best[gi * width + c] = b;
        }
    }

    let mut choices = BTreeMap::new();
    let mut c = cap;
    for (gi, g) in groups.iter().enumerate() {
        let target = best[gi * width + c];
        let rest = |c: usize| best[(gi + 1) * width + c];
        let pick = if rest(c) >= target - EPS {
            None
        } else {
            let j = g
                .variants
                .iter()
                .zip(&weights[gi])
                .position(|(v, &w)| w <= c && v.profit + rest(c - w) >= target - EPS)
                .expect("optimum is attained");
            c -= weights[gi][j];
            Some(j)
        };
        choices.insert(g.index, pick);
    }
    problem.selection(choices)
}
