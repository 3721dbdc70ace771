//! Restricted isometry constants: exact by subset enumeration, sampled
//! lower bounds, and the coherence upper bound `δ_n <= (n-1) μ`.

use std::collections::HashSet;

use nalgebra::DMatrix;
use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinations;
use crate::dictionary::Dictionary;
use crate::error::{Error, Result};
use crate::rng;
use crate::scalar::Real;

/// Default cap on the number of supports an exact enumeration may visit.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RipKind {
    Exact,
    SampledLowerBound,
    CoherenceUpperBound,
}

impl RipKind {
    /// Whether the value is guaranteed to be at least the true `δ_n`.
    pub fn is_upper_bound(self) -> bool {
        matches!(self, RipKind::Exact | RipKind::CoherenceUpperBound)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real"))]
pub struct RipEstimate<T: Real> {
    pub order: usize,
    pub value: T,
    pub kind: RipKind,
    pub subsets_examined: u64,
    pub witness_support: Option<Vec<usize>>,
}

impl<T: Real> RipEstimate<T> {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("estimate serializes")
    }
}

/// Spectral deviation `max(λ_max - 1, 1 - λ_min)` of a Gram matrix.
pub fn gram_deviation<T: Real>(gram: DMatrix<T>) -> T {
    if gram.nrows() == 1 {
        return (gram[(0, 0)] - T::one()).abs();
    }
    let eig = gram.symmetric_eigenvalues();
    let mut lo = eig[0];
    let mut hi = eig[0];
    for &v in eig.iter().skip(1) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (hi - T::one()).max(T::one() - lo)
}

/// `δ` of a single support, read from the cached Gram matrix.
pub fn support_delta<T: Real>(dict: &Dictionary<T>, support: &[usize]) -> Result<T> {
    for &i in support {
        dict.check_index(i)?;
    }
    if support.is_empty() {
        return Ok(T::zero());
    }
    Ok(gram_deviation(
        dict.gram().select_rows(support).select_columns(support),
    ))
}

fn check_order<T: Real>(dict: &Dictionary<T>, n: usize) -> Result<()> {
    if n == 0 || n > dict.num_atoms() {
        return Err(Error::InvalidParameter(format!(
            "RIP order must lie in [1, {}], got {n}",
            dict.num_atoms()
        )));
    }
    Ok(())
}

#[derive(Clone)]
struct Best<T> {
    value: T,
    support: Vec<usize>,
    count: u64,
}

/// Exact `δ_n` with the default enumeration budget.
pub fn rip_exact<T: Real>(dict: &Dictionary<T>, n: usize) -> Result<RipEstimate<T>> {
    rip_exact_with_budget(dict, n, DEFAULT_ENUMERATION_BUDGET)
}

/// Exact `δ_n`: maximum spectral deviation over every size-`n` support.
///
/// Supports are visited in lexicographic order, partitioned by first index
/// for parallel evaluation; the witness is the lexicographically first
/// support attaining the maximum, independent of the worker count.
pub fn rip_exact_with_budget<T: Real>(
    dict: &Dictionary<T>,
    n: usize,
    budget: u128,
) -> Result<RipEstimate<T>> {
    check_order(dict, n)?;
    let required = combinations::binomial(dict.num_atoms(), n);
    if required > budget {
        return Err(Error::EnumerationBudgetExceeded { required, budget });
    }
    let gram = dict.gram();
    let big_n = dict.num_atoms();
    let partials: Vec<Option<Best<T>>> = combinations::first_indices(big_n, n)
        .into_par_iter()
        .map(|first| {
            let mut best: Option<Best<T>> = None;
            let mut count = 0u64;
            combinations::for_each_with_first(big_n, n, first, |s| {
                count += 1;
                let v = gram_deviation(gram.select_rows(s).select_columns(s));
                if best.as_ref().is_none_or(|b| v > b.value) {
                    best = Some(Best {
                        value: v,
                        support: s.to_vec(),
                        count: 0,
                    });
                }
            });
            best.map(|mut b| {
                b.count = count;
                b
            })
        })
        .collect();

    let mut total = 0u64;
    let mut best: Option<Best<T>> = None;
    for p in partials.into_iter().flatten() {
        total += p.count;
        if best.as_ref().is_none_or(|b| p.value > b.value) {
            best = Some(p);
        }
    }
    let best = best.expect("at least one support exists for 1 <= n <= N");
    Ok(RipEstimate {
        order: n,
        value: best.value,
        kind: RipKind::Exact,
        subsets_examined: total,
        witness_support: Some(best.support),
    })
}

/// Lower bound on `δ_n` from `trials` uniformly drawn supports. Repeated
/// draws are evaluated once; ties go to the lexicographically smaller
/// support so full coverage reproduces [`rip_exact`] including its witness.
pub fn rip_sampled<T: Real>(
    dict: &Dictionary<T>,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<RipEstimate<T>> {
    check_order(dict, n)?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let mut rng = rng::seeded(seed);
    let mut seen = HashSet::new();
    let mut supports = Vec::new();
    for _ in 0..trials {
        let mut s = index::sample(&mut rng, dict.num_atoms(), n).into_vec();
        s.sort_unstable();
        if seen.insert(s.clone()) {
            supports.push(s);
        }
    }
    let gram = dict.gram();
    let values: Vec<T> = supports
        .par_iter()
        .map(|s| gram_deviation(gram.select_rows(s).select_columns(s)))
        .collect();
    let mut best = 0usize;
    for i in 1..supports.len() {
        if values[i] > values[best] || (values[i] == values[best] && supports[i] < supports[best]) {
            best = i;
        }
    }
    Ok(RipEstimate {
        order: n,
        value: values[best],
        kind: RipKind::SampledLowerBound,
        subsets_examined: supports.len() as u64,
        witness_support: Some(supports.swap_remove(best)),
    })
}

/// Upper bound `δ_n <= (n-1) μ`.
pub fn rip_coherence_bound<T: Real>(dict: &Dictionary<T>, n: usize) -> Result<RipEstimate<T>> {
    if n == 0 {
        return Err(Error::InvalidParameter("RIP order must be >= 1".into()));
    }
    let value = if n == 1 {
        T::zero()
    } else {
        T::lit((n - 1) as f64) * dict.coherence()?
    };
    Ok(RipEstimate {
        order: n,
        value,
        kind: RipKind::CoherenceUpperBound,
        subsets_examined: 0,
        witness_support: None,
    })
}
