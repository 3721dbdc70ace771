//! Exact best `n`-term approximation by exhaustive search over supports.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::combinations;
use crate::dictionary::{Dictionary, SparseVector};
use crate::error::{Error, Result};
use crate::rip::DEFAULT_ENUMERATION_BUDGET;
use crate::scalar::Real;

/// Relative pivot size below which a support is treated as rank deficient
/// and solved in the minimum-norm sense.
const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMethod {
    /// Coefficient sorting on orthonormal families, enumeration otherwise.
    Auto,
    /// Always enumerate every support.
    Exhaustive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleOptions {
    pub budget: u128,
    pub method: OracleMethod,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            budget: DEFAULT_ENUMERATION_BUDGET,
            method: OracleMethod::Auto,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OracleResult<T: Real> {
    pub order: usize,
    pub best_support: Vec<usize>,
    pub best_coefficients: SparseVector<T>,
    pub sigma_n: T,
    pub supports_examined: u64,
}

#[derive(Serialize)]
struct OracleRecord<'a> {
    order: usize,
    sigma: f64,
    support: &'a [usize],
    coefficients: Vec<(usize, f64)>,
    supports_examined: u64,
}

impl<T: Real> OracleResult<T> {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&OracleRecord {
            order: self.order,
            sigma: self.sigma_n.as_f64(),
            support: &self.best_support,
            coefficients: self
                .best_coefficients
                .iter()
                .map(|(i, c)| (i, c.as_f64()))
                .collect(),
            supports_examined: self.supports_examined,
        })
        .expect("oracle result serializes")
    }
}

/// Least-squares coefficients of `f` on the columns of `a` and the residual
/// norm. Full-rank supports go through Householder QR; numerically
/// dependent ones through a truncated SVD (minimum-norm solution).
pub fn least_squares<T: Real>(a: DMatrix<T>, f: &DVector<T>) -> (DVector<T>, T) {
    let k = a.ncols();
    if k == 0 {
        return (DVector::zeros(0), f.norm());
    }
    let qr_solution = if a.nrows() >= k {
        let qr = a.clone().qr();
        let r = qr.r();
        let diag: Vec<T> = (0..k).map(|i| r[(i, i)].abs()).collect();
        let hi = diag.iter().copied().fold(T::zero(), |x, y| x.max(y));
        let lo = diag.iter().copied().fold(hi, |x, y| x.min(y));
        if hi > T::zero() && lo > T::tol(RANK_TOLERANCE) * hi {
            r.solve_upper_triangular(&qr.q().tr_mul(f))
        } else {
            None
        }
    } else {
        None
    };
    let c = qr_solution.unwrap_or_else(|| {
        let svd = a.clone().svd(true, true);
        let cutoff = T::tol(RANK_TOLERANCE) * svd.singular_values.max();
        svd.solve(f, cutoff).expect("both factors were computed")
    });
    let residual = f - &a * &c;
    (c, residual.norm())
}

fn validate<T: Real>(dict: &Dictionary<T>, f: &DVector<T>, n: usize) -> Result<()> {
    dict.check_vector(f)?;
    let limit = dict.ambient_dim().min(dict.num_atoms());
    if n > limit {
        return Err(Error::InvalidParameter(format!(
            "order {n} exceeds min(m, N) = {limit}"
        )));
    }
    Ok(())
}

fn finish<T: Real>(
    dict: &Dictionary<T>,
    n: usize,
    support: Vec<usize>,
    coefficients: DVector<T>,
    sigma: T,
    examined: u64,
) -> Result<OracleResult<T>> {
    let best_coefficients = SparseVector::for_dictionary(
        dict,
        support.iter().copied().zip(coefficients.iter().copied()),
    )?;
    Ok(OracleResult {
        order: n,
        best_support: support,
        best_coefficients,
        sigma_n: sigma,
        supports_examined: examined,
    })
}

pub fn best_n_term<T: Real>(
    dict: &Dictionary<T>,
    f: &DVector<T>,
    n: usize,
) -> Result<OracleResult<T>> {
    best_n_term_with(dict, f, n, OracleOptions::default())
}

/// `σ_n(f) = min ‖f - Φc‖` over `c` with at most `n` nonzeros.
///
/// Every size-`n` support is solved by least squares; ties go to the
/// lexicographically smallest support. On orthonormal families
/// ([`OracleMethod::Auto`]) the `n` largest `|<f, φ>|` are kept directly,
/// which is exact by Parseval and needs no enumeration budget.
pub fn best_n_term_with<T: Real>(
    dict: &Dictionary<T>,
    f: &DVector<T>,
    n: usize,
    options: OracleOptions,
) -> Result<OracleResult<T>> {
    validate(dict, f, n)?;
    if n == 0 {
        return finish(dict, 0, Vec::new(), DVector::zeros(0), f.norm(), 1);
    }
    if options.method == OracleMethod::Auto && dict.is_orthonormal() {
        let ip = dict.analyze(f);
        let mut order: Vec<usize> = (0..dict.num_atoms()).collect();
        order.sort_by(|&a, &b| {
            ip[b]
                .abs()
                .partial_cmp(&ip[a].abs())
                .expect("finite inner products")
                .then(a.cmp(&b))
        });
        let mut support: Vec<usize> = order[..n].to_vec();
        support.sort_unstable();
        let c = DVector::from_iterator(n, support.iter().map(|&i| ip[i]));
        let sigma = (f - dict.columns(&support)? * &c).norm();
        return finish(dict, n, support, c, sigma, 1);
    }

    let big_n = dict.num_atoms();
    let required = combinations::binomial(big_n, n);
    if required > options.budget {
        return Err(Error::EnumerationBudgetExceeded {
            required,
            budget: options.budget,
        });
    }
    type Candidate<T> = (T, Vec<usize>, DVector<T>, u64);
    let partials: Vec<Option<Candidate<T>>> = combinations::first_indices(big_n, n)
        .into_par_iter()
        .map(|first| {
            let mut best: Option<Candidate<T>> = None;
            let mut count = 0u64;
            combinations::for_each_with_first(big_n, n, first, |s| {
                count += 1;
                let (c, sigma) = least_squares(dict.atoms().select_columns(s), f);
                if best.as_ref().is_none_or(|b| sigma < b.0) {
                    best = Some((sigma, s.to_vec(), c, 0));
                }
            });
            best.map(|mut b| {
                b.3 = count;
                b
            })
        })
        .collect();
    let mut total = 0u64;
    let mut best: Option<Candidate<T>> = None;
    for p in partials.into_iter().flatten() {
        total += p.3;
        if best.as_ref().is_none_or(|b| p.0 < b.0) {
            best = Some(p);
        }
    }
    let (sigma, support, c, _) = best.expect("1 <= n <= N leaves at least one support");
    finish(dict, n, support, c, sigma, total)
}

/// `σ_0, ..., σ_{n_max}`.
pub fn sigma_profile<T: Real>(
    dict: &Dictionary<T>,
    f: &DVector<T>,
    n_max: usize,
) -> Result<Vec<T>> {
    sigma_profile_with(dict, f, n_max, OracleOptions::default())
}

pub fn sigma_profile_with<T: Real>(
    dict: &Dictionary<T>,
    f: &DVector<T>,
    n_max: usize,
    options: OracleOptions,
) -> Result<Vec<T>> {
    (0..=n_max)
        .map(|n| best_n_term_with(dict, f, n, options).map(|r| r.sigma_n))
        .collect()
}
