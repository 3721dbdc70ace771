//! Pure Greedy, Orthogonal and Weak Orthogonal Matching Pursuit.
//!
//! OMP/WOMP keep an incrementally updated QR factorization of the selected
//! atoms (Gram-Schmidt with one reorthogonalization pass). When the
//! condition estimate of `R` passes [`REFACTOR_CONDITION`] the factorization
//! is rebuilt with Householder QR; past [`MAX_CONDITION`] the run fails.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dictionary::{Dictionary, SparseVector};
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-12;
/// Runs stop once every admissible inner product is below this times `‖f‖`.
pub const INNER_PRODUCT_FLOOR: f64 = 1e-14;
pub const REFACTOR_CONDITION: f64 = 1e8;
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Pga,
    Omp,
    Womp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMode {
    /// Best match of the residual, smallest index on ties.
    Argmax,
    /// Smallest-index atom that still meets the weak threshold
    /// `|<r, φ>| >= κ max`.
    AdversarialWeak,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreedyConfig<T: Real> {
    pub kappa: T,
    pub max_steps: usize,
    pub residual_tol: T,
    pub selection_mode: SelectionMode,
}

impl<T: Real> GreedyConfig<T> {
    pub fn omp(max_steps: usize) -> Self {
        Self {
            kappa: T::one(),
            max_steps,
            residual_tol: T::tol(DEFAULT_RESIDUAL_TOL),
            selection_mode: SelectionMode::Argmax,
        }
    }

    pub fn womp(kappa: T, max_steps: usize, selection_mode: SelectionMode) -> Self {
        Self {
            kappa,
            max_steps,
            residual_tol: T::tol(DEFAULT_RESIDUAL_TOL),
            selection_mode,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > T::zero() && self.kappa <= T::one()) {
            return Err(Error::InvalidKappa(self.kappa.as_f64()));
        }
        if self.residual_tol.as_f64().is_nan() || self.residual_tol < T::zero() {
            return Err(Error::InvalidParameter("residual_tol must be >= 0".into()));
        }
        Ok(())
    }

    fn algorithm(&self) -> Algorithm {
        if self.kappa == T::one() && self.selection_mode == SelectionMode::Argmax {
            Algorithm::Omp
        } else {
            Algorithm::Womp
        }
    }
}

/// Per-step record of a greedy run. Index `k` of `residual_norms` is
/// `‖r_k‖`; index `k` of the selection lists describes the step producing
/// `r_{k+1}` from `r_k`.
#[derive(Debug, Clone)]
pub struct GreedyTrace<T: Real> {
    pub algorithm: Algorithm,
    pub kappa: T,
    pub target: DVector<T>,
    pub selected: Vec<usize>,
    pub residual_norms: Vec<T>,
    pub selection_values: Vec<T>,
    pub max_inner_products: Vec<T>,
    pub final_coefficients: SparseVector<T>,
    pub final_residual: DVector<T>,
}

#[derive(Serialize)]
struct TraceRecord<'a> {
    algorithm: Algorithm,
    kappa: f64,
    selected: &'a [usize],
    residual_norms: Vec<f64>,
    selection_values: Vec<f64>,
    max_inner_products: Vec<f64>,
    coefficients: Vec<(usize, f64)>,
}

fn widen<T: Real>(v: &[T]) -> Vec<f64> {
    v.iter().map(|x| x.as_f64()).collect()
}

impl<T: Real> GreedyTrace<T> {
    pub fn steps(&self) -> usize {
        self.selected.len()
    }

    /// `S_k`, the first `k` selections.
    pub fn support_after(&self, k: usize) -> &[usize] {
        &self.selected[..k.min(self.selected.len())]
    }

    /// `‖r_k‖`; past the end of an early-stopped run the final residual
    /// norm is returned.
    pub fn residual_norm(&self, k: usize) -> T {
        let last = self.residual_norms.len() - 1;
        self.residual_norms[k.min(last)]
    }

    pub fn final_residual_norm(&self) -> T {
        *self.residual_norms.last().expect("trace holds r_0")
    }

    pub fn to_json(&self) -> String {
        let record = TraceRecord {
            algorithm: self.algorithm,
            kappa: self.kappa.as_f64(),
            selected: &self.selected,
            residual_norms: widen(&self.residual_norms),
            selection_values: widen(&self.selection_values),
            max_inner_products: widen(&self.max_inner_products),
            coefficients: self
                .final_coefficients
                .iter()
                .map(|(i, c)| (i, c.as_f64()))
                .collect(),
        };
        serde_json::to_string(&record).expect("trace serializes")
    }
}

/// QR factorization of the selected atoms, grown one column at a time.
struct IncrementalQr<T: Real> {
    q: Vec<DVector<T>>,
    r: DMatrix<T>,
    qtf: Vec<T>,
    support: Vec<usize>,
}

impl<T: Real> IncrementalQr<T> {
    fn new(capacity: usize) -> Self {
        Self {
            q: Vec::with_capacity(capacity),
            r: DMatrix::zeros(capacity, capacity),
            qtf: Vec::with_capacity(capacity),
            support: Vec::with_capacity(capacity),
        }
    }

    fn len(&self) -> usize {
        self.support.len()
    }

    fn condition_estimate(&self) -> T {
        let k = self.len();
        let mut lo = self.r[(0, 0)].abs();
        let mut hi = lo;
        for i in 1..k {
            let d = self.r[(i, i)].abs();
            lo = lo.min(d);
            hi = hi.max(d);
        }
        if lo == T::zero() {
            T::max_value().unwrap_or_else(T::one)
        } else {
            hi / lo
        }
    }

    fn push(
        &mut self,
        dict: &Dictionary<T>,
        index: usize,
        f: &DVector<T>,
        step: usize,
    ) -> Result<()> {
        let k = self.len();
        if k == self.r.nrows() {
            self.r = self.r.clone().resize(k + 1, k + 1, T::zero());
        }
        let mut v: DVector<T> = dict.atom(index).into_owned();
        let mut h = vec![T::zero(); k];
        for _pass in 0..2 {
            for (i, q) in self.q.iter().enumerate() {
                let c = q.dot(&v);
                h[i] += c;
                v.axpy(-c, q, T::one());
            }
        }
        let rkk = v.norm();
        if rkk <= T::tol(1.0 / MAX_CONDITION) {
            return Err(Error::RankDeficientProjection {
                step,
                condition: f64::INFINITY,
            });
        }
        v /= rkk;
        for (i, hi) in h.into_iter().enumerate() {
            self.r[(i, k)] = hi;
        }
        self.r[(k, k)] = rkk;
        self.qtf.push(v.dot(f));
        self.q.push(v);
        self.support.push(index);

        let cond = self.condition_estimate().as_f64();
        if cond > MAX_CONDITION {
            return Err(Error::RankDeficientProjection {
                step,
                condition: cond,
            });
        }
        if cond > REFACTOR_CONDITION {
            self.refactor(dict, f);
            let cond = self.condition_estimate().as_f64();
            if cond > MAX_CONDITION {
                return Err(Error::RankDeficientProjection {
                    step,
                    condition: cond,
                });
            }
        }
        Ok(())
    }

    /// Rebuilds `Q`, `R` and `Q^T f` from scratch with Householder QR.
    fn refactor(&mut self, dict: &Dictionary<T>, f: &DVector<T>) {
        let k = self.len();
        let a = dict.atoms().select_columns(&self.support);
        let qr = a.qr();
        let q = qr.q();
        let r = qr.r();
        self.q = q.column_iter().map(|c| c.into_owned()).collect();
        self.r.fill(T::zero());
        self.r.view_mut((0, 0), (k, k)).copy_from(&r);
        self.qtf = self.q.iter().map(|qi| qi.dot(f)).collect();
    }

    /// Solves `R c = Q^T f` by back substitution.
    fn coefficients(&self) -> Vec<T> {
        let k = self.len();
        let mut c = vec![T::zero(); k];
        for i in (0..k).rev() {
            let mut acc = self.qtf[i];
            for (j, &cj) in c.iter().enumerate().skip(i + 1) {
                acc -= self.r[(i, j)] * cj;
            }
            c[i] = acc / self.r[(i, i)];
        }
        c
    }

    fn residual(&self, dict: &Dictionary<T>, f: &DVector<T>, coefficients: &[T]) -> DVector<T> {
        let mut r = f.clone();
        for (&i, &c) in self.support.iter().zip(coefficients) {
            r.axpy(-c, &dict.atom(i), T::one());
        }
        r
    }
}

/// Least-squares fit of `f` on the atoms in `support`.
#[derive(Debug, Clone)]
pub struct Projection<T: Real> {
    pub coefficients: SparseVector<T>,
    pub residual: DVector<T>,
    pub residual_norm: T,
}

/// Orthogonal projection of `f` onto `span{φ_γ : γ ∈ support}`.
pub fn project_on_support<T: Real>(
    dict: &Dictionary<T>,
    support: &[usize],
    f: &DVector<T>,
) -> Result<Projection<T>> {
    dict.check_vector(f)?;
    let mut seen = vec![false; dict.num_atoms()];
    for &i in support {
        dict.check_index(i)?;
        if std::mem::replace(&mut seen[i], true) {
            return Err(Error::DuplicateIndex { index: i });
        }
    }
    if support.len() > dict.ambient_dim() {
        return Err(Error::RankDeficientProjection {
            step: dict.ambient_dim() + 1,
            condition: f64::INFINITY,
        });
    }
    let mut qr = IncrementalQr::new(support.len());
    for (step, &i) in support.iter().enumerate() {
        qr.push(dict, i, f, step + 1)?;
    }
    let c = qr.coefficients();
    let residual = qr.residual(dict, f, &c);
    let coefficients = SparseVector::for_dictionary(dict, support.iter().copied().zip(c))?;
    Ok(Projection {
        residual_norm: residual.norm(),
        coefficients,
        residual,
    })
}

/// Weak Orthogonal Matching Pursuit (plain OMP for `κ = 1` in argmax mode).
///
/// Stops after `max_steps`, once `‖r_k‖ <= residual_tol ‖f‖`, or when every
/// unselected atom has `|<r_k, φ>| <= 1e-14 ‖f‖`. Selected atoms are
/// excluded from later selections.
pub fn run_womp<T: Real>(
    dict: &Dictionary<T>,
    f: &DVector<T>,
    cfg: &GreedyConfig<T>,
) -> Result<GreedyTrace<T>> {
    cfg.validate()?;
    dict.check_vector(f)?;
    let limit = dict.ambient_dim().min(dict.num_atoms());
    if cfg.max_steps > limit {
        return Err(Error::StepBudgetExceedsDictionary {
            steps: cfg.max_steps,
            limit,
        });
    }
    let f_norm = f.norm();
    let floor = T::tol(INNER_PRODUCT_FLOOR) * f_norm;
    let mut in_support = vec![false; dict.num_atoms()];
    let mut qr = IncrementalQr::new(cfg.max_steps);
    let mut residual = f.clone();
    let mut coefficients = Vec::new();
    let mut trace = GreedyTrace {
        algorithm: cfg.algorithm(),
        kappa: cfg.kappa,
        target: f.clone(),
        selected: Vec::new(),
        residual_norms: vec![f_norm],
        selection_values: Vec::new(),
        max_inner_products: Vec::new(),
        final_coefficients: SparseVector::zero(dict.label()),
        final_residual: f.clone(),
    };

    while trace.steps() < cfg.max_steps {
        if trace.final_residual_norm() <= cfg.residual_tol * f_norm {
            break;
        }
        let ip = dict.analyze(&residual).map(|x| x.abs());
        let max_all = ip.max();
        let mut max_admissible = T::zero();
        let mut argmax = None;
        for (i, &v) in ip.iter().enumerate() {
            if !in_support[i] && (argmax.is_none() || v > max_admissible) {
                max_admissible = v;
                argmax = Some(i);
            }
        }
        let Some(argmax) = argmax else { break };
        if max_admissible <= floor {
            break;
        }
        let chosen = match cfg.selection_mode {
            SelectionMode::Argmax => argmax,
            SelectionMode::AdversarialWeak => {
                let threshold = cfg.kappa * max_admissible;
                (0..dict.num_atoms())
                    .find(|&i| !in_support[i] && ip[i] >= threshold)
                    .unwrap_or(argmax)
            }
        };
        let step = trace.steps() + 1;
        qr.push(dict, chosen, f, step)?;
        in_support[chosen] = true;
        coefficients = qr.coefficients();
        residual = qr.residual(dict, f, &coefficients);
        trace.selected.push(chosen);
        trace.selection_values.push(ip[chosen]);
        trace.max_inner_products.push(max_all);
        trace.residual_norms.push(residual.norm());
    }

    trace.final_coefficients =
        SparseVector::for_dictionary(dict, trace.selected.iter().copied().zip(coefficients))?;
    trace.final_residual = residual;
    Ok(trace)
}

pub fn run_omp<T: Real>(
    dict: &Dictionary<T>,
    f: &DVector<T>,
    steps: usize,
) -> Result<GreedyTrace<T>> {
    run_womp(dict, f, &GreedyConfig::omp(steps))
}

/// Pure Greedy Algorithm: rank-one updates `f_k = f_{k-1} + <r_{k-1}, φ> φ`,
/// atoms may repeat.
pub fn run_pga<T: Real>(
    dict: &Dictionary<T>,
    f: &DVector<T>,
    steps: usize,
) -> Result<GreedyTrace<T>> {
    dict.check_vector(f)?;
    if steps == 0 {
        return Err(Error::InvalidParameter("steps must be >= 1".into()));
    }
    let f_norm = f.norm();
    let tol = T::tol(DEFAULT_RESIDUAL_TOL) * f_norm;
    let floor = T::tol(INNER_PRODUCT_FLOOR) * f_norm;
    let mut dense = vec![T::zero(); dict.num_atoms()];
    let mut residual = f.clone();
    let mut trace = GreedyTrace {
        algorithm: Algorithm::Pga,
        kappa: T::one(),
        target: f.clone(),
        selected: Vec::new(),
        residual_norms: vec![f_norm],
        selection_values: Vec::new(),
        max_inner_products: Vec::new(),
        final_coefficients: SparseVector::zero(dict.label()),
        final_residual: f.clone(),
    };
    while trace.steps() < steps && trace.final_residual_norm() > tol {
        let ip = dict.analyze(&residual);
        let mut best = 0;
        for i in 1..ip.len() {
            if ip[i].abs() > ip[best].abs() {
                best = i;
            }
        }
        let h = ip[best];
        if h.abs() <= floor {
            break;
        }
        residual.axpy(-h, &dict.atom(best), T::one());
        dense[best] += h;
        trace.selected.push(best);
        trace.selection_values.push(h.abs());
        trace.max_inner_products.push(h.abs());
        trace.residual_norms.push(residual.norm());
    }
    trace.final_coefficients = SparseVector::for_dictionary(dict, dense.into_iter().enumerate())?;
    trace.final_residual = residual;
    Ok(trace)
}

/// Keeps the `n` largest-magnitude final coefficients (smaller index wins
/// ties).
pub fn postprocess_top_n<T: Real>(trace: &GreedyTrace<T>, n: usize) -> Result<SparseVector<T>> {
    if n > trace.steps() {
        return Err(Error::NotEnoughSelected {
            requested: n,
            available: trace.steps(),
        });
    }
    let mut entries: Vec<(usize, T)> = trace.final_coefficients.iter().collect();
    entries.sort_by(|a, b| {
        b.1.abs()
            .partial_cmp(&a.1.abs())
            .expect("finite coefficients")
            .then(a.0.cmp(&b.0))
    });
    entries.truncate(n);
    SparseVector::new(
        entries,
        usize::MAX,
        trace.final_coefficients.dictionary_label(),
    )
}
