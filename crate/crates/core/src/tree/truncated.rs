use serde::Serialize;

use super::root_probability_to_depth;
use crate::exact::check_activity;
use crate::graph::RootedTree;
use crate::{Real, Result};

/// `R_x(T(r), o)` for `r = 0..=r_max`, where `T(r)` keeps the first `r`
/// generations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncatedSequence<S = f64> {
    pub activity: S,
    pub root_probabilities: Vec<S>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ParityViolation {
    /// `R(T(r+2)) > R(T(r))` with `r` even.
    EvenIncrease { r: usize },
    /// `R(T(r+2)) < R(T(r))` with `r` odd.
    OddDecrease { r: usize },
    /// An odd entry exceeds an even one.
    OddAboveEven { odd: usize, even: usize },
}

impl<S: Real> TruncatedSequence<S> {
    pub fn len(&self) -> usize {
        self.root_probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.root_probabilities.is_empty()
    }

    /// Exact comparisons, no tolerance.
    pub fn parity_violations(&self) -> Vec<ParityViolation> {
        let v = &self.root_probabilities;
        let mut out = Vec::new();
        for r in 0..v.len().saturating_sub(2) {
            if r % 2 == 0 && v[r + 2] > v[r] {
                out.push(ParityViolation::EvenIncrease { r });
            }
            if r % 2 == 1 && v[r + 2] < v[r] {
                out.push(ParityViolation::OddDecrease { r });
            }
        }
        // the largest odd entry against the smallest even one
        let max_odd = (1..v.len()).step_by(2).reduce(|a, b| if v[b] > v[a] { b } else { a });
        let min_even = (0..v.len()).step_by(2).reduce(|a, b| if v[b] < v[a] { b } else { a });
        if let (Some(odd), Some(even)) = (max_odd, min_even) {
            if v[odd] > v[even] {
                out.push(ParityViolation::OddAboveEven { odd, even });
            }
        }
        out
    }

    pub fn is_monotone(&self) -> bool {
        self.parity_violations().is_empty()
    }
}

pub fn root_probabilities_by_depth<S: Real, T>(t: &RootedTree<T>, x: &S, r_max: usize) -> Vec<S> {
    (0..=r_max).map(|r| root_probability_to_depth(t, x, r)).collect()
}

pub fn truncated_sequence<S: Real, T>(t: &RootedTree<T>, x: S, r_max: usize) -> Result<TruncatedSequence<S>> {
    check_activity(&x)?;
    let root_probabilities = root_probabilities_by_depth(t, &x, r_max);
    Ok(TruncatedSequence { activity: x, root_probabilities })
}

/// Truncations of the rooted tree where every vertex has `k` children:
/// `R_0 = 1`, `R_{r+1} = x^2 / (x^2 + k R_r)`. `k = 1` is the half-infinite
/// path rooted at its end.
pub fn regular_tree_sequence<S: Real>(k: usize, x: S, r_max: usize) -> Result<TruncatedSequence<S>> {
    check_activity(&x)?;
    let x2 = x.clone() * x.clone();
    let k = S::from_usize(k).expect("k fits the scalar type");
    let mut seq = vec![S::one()];
    for _ in 0..r_max {
        let last = seq.last().unwrap().clone();
        seq.push(x2.clone() / (x2.clone() + k.clone() * last));
    }
    Ok(TruncatedSequence { activity: x, root_probabilities: seq })
}

/// Positive root of `k X^2 + x^2 X - x^2 = 0` (1 when `k = 0`).
pub fn regular_tree_fixed_point(k: usize, x: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let x2 = x * x;
    let k = k as f64;
    // rationalized form avoids cancellation for large x
    2.0 * x2 / (x2 + (x2 * x2 + 4.0 * k * x2).sqrt())
}
