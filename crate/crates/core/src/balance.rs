//! Count vectors, the interval proximity metric and balance checks.
//!
//! Proximity between two count vectors of equal total is the L1 distance of
//! their prefix sums: the number of unit moves between adjacent positions of
//! the fixed type order needed to turn one vector into the other (a discrete
//! earth-mover distance on a line). It is order sensitive by construction.

use std::ops::Index;

use thiserror::Error;

use crate::model::{interval_bags, ElementIndex, Instance, IntervalBag, ModelError};

/// Totals are considered equal within this tolerance.
pub const TOTAL_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum BalanceError {
    #[error("incomparable cardinalities: totals {left} and {right} differ")]
    IncomparableCardinalities { left: f64, right: f64 },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("unknown element type at index {0}")]
    UnknownElement(usize),
    #[error("negative count {value} at position {position}")]
    NegativeCount { position: usize, value: f64 },
    #[error("reference total {reference} does not match interval capacity {capacity}")]
    CapacityMismatch { reference: f64, capacity: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Per-type counts in universe order. Integer counts in the abstract model,
/// fractional in the home-building cascade.
#[derive(Debug, Clone, PartialEq)]
pub struct CountVector(Vec<f64>);

impl CountVector {
    pub fn new(values: Vec<f64>) -> Result<Self, BalanceError> {
        if let Some((position, &value)) = values.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
            return Err(BalanceError::NegativeCount { position, value });
        }
        Ok(Self(values))
    }

    pub fn from_counts(counts: &[u32]) -> Self {
        Self(counts.iter().map(|&c| f64::from(c)).collect())
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Counts rounded to integers, for display of abstract-model vectors.
    pub fn to_counts(&self) -> Vec<u64> {
        self.0.iter().map(|v| v.round() as u64).collect()
    }

    fn prefix_sums(&self) -> impl Iterator<Item = f64> + '_ {
        self.0.iter().scan(0.0, |acc, v| {
            *acc += v;
            Some(*acc)
        })
    }
}

impl Index<usize> for CountVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Multiplicity of each universe type in `bag`.
pub fn count_vector(bag: &IntervalBag, universe_len: usize) -> Result<CountVector, BalanceError> {
    let mut counts = vec![0.0; universe_len];
    for &ElementIndex(i) in &bag.elements {
        *counts.get_mut(i).ok_or(BalanceError::UnknownElement(i))? += 1.0;
    }
    Ok(CountVector(counts))
}

/// Unit-step earth-mover distance between equal-total vectors.
pub fn proximity(reference: &CountVector, other: &CountVector) -> Result<f64, BalanceError> {
    if reference.len() != other.len() {
        return Err(BalanceError::LengthMismatch {
            left: reference.len(),
            right: other.len(),
        });
    }
    let (lt, rt) = (reference.total(), other.total());
    if (lt - rt).abs() > TOTAL_TOLERANCE {
        return Err(BalanceError::IncomparableCardinalities {
            left: lt,
            right: rt,
        });
    }
    Ok(reference
        .prefix_sums()
        .zip(other.prefix_sums())
        .map(|(a, b)| (a - b).abs())
        .sum())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BalanceVerdict {
    /// Proximity of each interval to the reference, interval order.
    pub deltas: Vec<f64>,
    pub max_delta: f64,
    pub threshold: f64,
    pub satisfied: bool,
    /// 1-based indices of intervals whose proximity exceeds the threshold.
    pub violating: Vec<usize>,
}

impl BalanceVerdict {
    fn from_deltas(deltas: Vec<f64>, threshold: f64) -> Self {
        let max_delta = deltas.iter().copied().fold(0.0, f64::max);
        let violating = deltas
            .iter()
            .enumerate()
            .filter(|(_, &d)| d > threshold)
            .map(|(i, _)| i + 1)
            .collect();
        Self {
            deltas,
            max_delta,
            threshold,
            satisfied: max_delta <= threshold,
            violating,
        }
    }

    /// Worst interval proximity.
    pub fn balance_index(&self) -> f64 {
        self.max_delta
    }
}

/// Interval bags, their count vectors and proximities to `reference`,
/// checked against `threshold`.
pub fn balance_verdict(
    instance: &Instance,
    reference: &CountVector,
    threshold: f64,
) -> Result<BalanceVerdict, BalanceError> {
    let capacity = instance.interval_capacity();
    if (reference.total() - capacity as f64).abs() > TOTAL_TOLERANCE {
        return Err(BalanceError::CapacityMismatch {
            reference: reference.total(),
            capacity,
        });
    }
    let deltas = interval_bags(instance)?
        .iter()
        .map(|bag| proximity(reference, &count_vector(bag, instance.universe.len())?))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(BalanceVerdict::from_deltas(deltas, threshold))
}

/// Component-wise `requirement <= capacity`.
pub fn dominance_leq(
    requirement: &CountVector,
    capacity: &CountVector,
) -> Result<bool, BalanceError> {
    Ok(violation(requirement, capacity)?
        .as_slice()
        .iter()
        .all(|&v| v == 0.0))
}

/// Component-wise excess of `requirement` over `capacity`.
pub fn violation(
    requirement: &CountVector,
    capacity: &CountVector,
) -> Result<CountVector, BalanceError> {
    if requirement.len() != capacity.len() {
        return Err(BalanceError::LengthMismatch {
            left: requirement.len(),
            right: capacity.len(),
        });
    }
    Ok(CountVector(
        requirement
            .0
            .iter()
            .zip(&capacity.0)
            .map(|(r, c)| (r - c).max(0.0))
            .collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cv(v: &[u32]) -> CountVector {
        CountVector::from_counts(v)
    }

    #[test]
    fn proximity_examples() {
        let e0 = cv(&[2, 3, 2, 1, 1, 0]);
        assert_eq!(proximity(&e0, &cv(&[2, 4, 1, 0, 1, 1])).unwrap(), 3.0);
        assert_eq!(proximity(&e0, &cv(&[0, 1, 1, 3, 3, 1])).unwrap(), 15.0);
        assert_eq!(proximity(&e0, &e0).unwrap(), 0.0);
        assert_eq!(proximity(&e0, &cv(&[2, 2, 1, 2, 2, 0])).unwrap(), 4.0);
    }

    #[test]
    fn unequal_totals_are_incomparable() {
        let err = proximity(&cv(&[1, 0]), &cv(&[1, 1])).unwrap_err();
        assert!(err.to_string().contains("incomparable cardinalities"));
    }

    #[test]
    fn order_sensitivity() {
        // Swapping adjacent positions of the universe changes the distance.
        let a = cv(&[1, 0, 0]);
        let b = cv(&[0, 0, 1]);
        let a_swapped = cv(&[0, 1, 0]);
        let b_swapped = cv(&[0, 0, 1]);
        assert_ne!(
            proximity(&a, &b).unwrap(),
            proximity(&a_swapped, &b_swapped).unwrap()
        );
    }

    #[test]
    fn count_vector_of_empty_bag_is_zero() {
        let bag = IntervalBag {
            interval: 1,
            elements: vec![],
        };
        assert_eq!(count_vector(&bag, 4).unwrap(), CountVector::zeros(4));
        let bad = IntervalBag {
            interval: 1,
            elements: vec![ElementIndex(7)],
        };
        assert_eq!(count_vector(&bad, 4), Err(BalanceError::UnknownElement(7)));
    }

    #[test]
    fn dominance_examples() {
        let cap = CountVector::new(vec![1480.0, 400.0, 2600.0]).unwrap();
        let req = CountVector::new(vec![1562.0, 231.0, 2385.0]).unwrap();
        assert!(!dominance_leq(&req, &cap).unwrap());
        assert_eq!(violation(&req, &cap).unwrap().as_slice(), &[82.0, 0.0, 0.0]);
        assert!(dominance_leq(&cap, &cap).unwrap());
        assert!(dominance_leq(&CountVector::zeros(3), &cap).unwrap());
        assert!(violation(&CountVector::zeros(2), &cap).is_err());
    }

    #[test]
    fn negative_entries_are_rejected() {
        assert!(CountVector::new(vec![1.0, -0.5]).is_err());
        assert!(CountVector::new(vec![f64::NAN]).is_err());
    }

    fn equal_sum_pair(len: usize) -> impl Strategy<Value = (Vec<u32>, Vec<u32>)> {
        (
            proptest::collection::vec(0u32..6, len),
            proptest::collection::vec(0u32..6, len),
        )
            .prop_map(|(a, mut b)| {
                // Move mass in `b` until totals agree.
                let ta: u32 = a.iter().sum();
                let mut tb: u32 = b.iter().sum();
                let last = b.len() - 1;
                while tb > ta {
                    let i = b.iter().position(|&x| x > 0).unwrap();
                    b[i] -= 1;
                    tb -= 1;
                }
                b[last] += ta - tb;
                (a, b)
            })
    }

    proptest! {
        #[test]
        fn violation_is_monotone(
            base in proptest::collection::vec(0.0f64..100.0, 5),
            bump in proptest::collection::vec(0.0f64..50.0, 5),
            cap in proptest::collection::vec(0.0f64..100.0, 5),
        ) {
            let cap = CountVector::new(cap).unwrap();
            let lo = violation(&CountVector::new(base.clone()).unwrap(), &cap).unwrap();
            let bigger: Vec<f64> = base.iter().zip(&bump).map(|(a, b)| a + b).collect();
            let hi = violation(&CountVector::new(bigger).unwrap(), &cap).unwrap();
            for i in 0..5 {
                prop_assert!(hi[i] >= lo[i]);
            }
        }

        #[test]
        fn proximity_is_symmetric((a, b) in (2usize..7).prop_flat_map(equal_sum_pair)) {
            let (a, b) = (cv(&a), cv(&b));
            prop_assert_eq!(proximity(&a, &b).unwrap(), proximity(&b, &a).unwrap());
            prop_assert_eq!(proximity(&a, &b).unwrap() == 0.0, a == b);
        }
    }
}
