//! Inequality checks on individual greedy runs.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::constants::TheoremConstants;
use super::report::{CheckReport, SLACK};
use crate::dictionary::{Dictionary, SparseVector};
use crate::error::{Error, Result};
use crate::greedy::{
    postprocess_top_n, run_womp, Algorithm, GreedyConfig, GreedyTrace, SelectionMode,
};
use crate::oracle::{best_n_term_with, sigma_profile_with, OracleOptions, OracleResult};
use crate::rip::RipEstimate;
use crate::scalar::Real;

fn squared<T: Real>(x: T) -> f64 {
    let x = x.as_f64();
    x * x
}

fn abs_tol<T: Real>(scale: f64) -> f64 {
    T::tol(SLACK).as_f64() * scale
}

/// `#(T \ S)` and `#(T ∪ S)` for a sorted `t` and membership mask of `S`.
fn missing_and_union(t: &[usize], in_s: &[bool], s_len: usize) -> (usize, usize) {
    let missing = t.iter().filter(|&&i| !in_s[i]).count();
    (missing, s_len + missing)
}

fn require_projection_trace<T: Real>(trace: &GreedyTrace<T>) -> Result<()> {
    if trace.algorithm == Algorithm::Pga {
        return Err(Error::UnsupportedAlgorithm(
            "residual decay needs orthogonal projections (omp/womp)".into(),
        ));
    }
    Ok(())
}

/// Steps `k` with `T ⊄ S_k` paired with `#(T \ S_k)`, and the largest
/// `#(T ∪ S_k)` among them.
fn lemma_steps<T: Real>(
    dict: &Dictionary<T>,
    trace: &GreedyTrace<T>,
    g: &SparseVector<T>,
) -> (Vec<(usize, usize)>, usize) {
    let t = g.support();
    let mut in_s = vec![false; dict.num_atoms()];
    let mut checked = Vec::new();
    let mut required = 0;
    for k in 0..trace.steps() {
        let (missing, union) = missing_and_union(t, &in_s, k);
        if missing > 0 {
            checked.push((k, missing));
            required = required.max(union);
        }
        in_s[trace.selected[k]] = true;
    }
    (checked, required)
}

/// RIP order a certificate for [`check_lemma_decay`] must reach on this trace.
pub fn lemma_required_order<T: Real>(
    dict: &Dictionary<T>,
    trace: &GreedyTrace<T>,
    g: &SparseVector<T>,
) -> usize {
    lemma_steps(dict, trace, g).1
}

/// Per-step residual decay of a WOMP run against a comparison element
/// `g = Φz`, `supp z = T`:
///
/// `‖r_{k+1}‖² <= ‖r_k‖² - κ²(1-δ)/#(T\S_k) · max(0, ‖r_k‖² - ‖f-g‖²)`
///
/// evaluated at every step with `T ⊄ S_k`. `delta` must bound
/// `δ_{#(T ∪ S_k)}` from above at every checked step.
pub fn check_lemma_decay<T: Real>(
    dict: &Dictionary<T>,
    trace: &GreedyTrace<T>,
    g: &SparseVector<T>,
    delta: &RipEstimate<T>,
) -> Result<CheckReport> {
    require_projection_trace(trace)?;
    if !delta.kind.is_upper_bound() {
        return Err(Error::UnsoundDeltaSource);
    }
    let f = &trace.target;
    dict.check_vector(f)?;
    let (checked, required) = lemma_steps(dict, trace, g);

    let mut report = CheckReport::new("lemma-decay", SLACK);
    report.instances_run = 1;
    if checked.is_empty() {
        return Ok(report);
    }
    if delta.order < required {
        return Err(Error::OrderTooSmall {
            required,
            available: delta.order,
        });
    }
    let d = delta.value.as_f64();
    if d >= 1.0 {
        return Err(Error::DeltaTooLarge { delta: d });
    }
    let f_norm2 = squared(f.norm());
    let fg2 = squared((f - dict.synthesize(g)).norm());
    let kappa2 = squared(trace.kappa);
    let tol = abs_tol::<T>(f_norm2);
    for (k, missing) in checked {
        let rk2 = squared(trace.residual_norms[k]);
        let lhs = squared(trace.residual_norms[k + 1]);
        let rhs = rk2 - kappa2 * (1.0 - d) / missing as f64 * (rk2 - fg2).max(0.0);
        report.evaluate(0, k, lhs, rhs, tol);
    }
    Ok(report)
}

/// Step offset `j`, bound `m` on `#(T \ S_j)` and repetition count `L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecaySchedule {
    pub j: usize,
    pub m: usize,
    pub l: usize,
}

impl DecaySchedule {
    pub fn end(&self) -> usize {
        self.j + self.m * self.l
    }
}

/// Iterated decay `‖r_{j+mL}‖² <= exp(-κ²(1-δ*)L) ‖r_j‖² + ‖f-g‖²`, valid
/// when `δ_{#(T ∪ S_{j+mL})} <= δ*` (certified by `certificate`).
pub fn check_prop_iterate<T: Real>(
    dict: &Dictionary<T>,
    trace: &GreedyTrace<T>,
    g: &SparseVector<T>,
    schedule: DecaySchedule,
    delta_star: f64,
    certificate: &RipEstimate<T>,
) -> Result<CheckReport> {
    require_projection_trace(trace)?;
    let out_of_range = |reason: String| Error::ScheduleOutOfRange {
        j: schedule.j,
        m: schedule.m,
        l: schedule.l,
        reason,
    };
    let end = schedule.end();
    if end > trace.steps() {
        return Err(out_of_range(format!(
            "j + mL = {end} exceeds the {} executed steps",
            trace.steps()
        )));
    }
    let t = g.support();
    let mut in_s = vec![false; dict.num_atoms()];
    for &i in trace.support_after(schedule.j) {
        in_s[i] = true;
    }
    let (missing_j, _) = missing_and_union(t, &in_s, schedule.j);
    if missing_j > schedule.m {
        return Err(out_of_range(format!("#(T \\ S_j) = {missing_j} exceeds m")));
    }
    for &i in &trace.selected[schedule.j..end] {
        in_s[i] = true;
    }
    let (_, needed) = missing_and_union(t, &in_s, end);
    if !certificate.kind.is_upper_bound() {
        return Err(Error::DeltaAssumptionUnverified(
            "sampled estimates only bound δ from below".into(),
        ));
    }
    if certificate.order < needed {
        return Err(Error::DeltaAssumptionUnverified(format!(
            "certificate order {} < #(T ∪ S_(j+mL)) = {needed}",
            certificate.order
        )));
    }
    if certificate.value.as_f64() > delta_star {
        return Err(Error::DeltaAssumptionUnverified(format!(
            "certified δ = {} exceeds δ* = {delta_star}",
            certificate.value
        )));
    }

    let f = &trace.target;
    let f_norm2 = squared(f.norm());
    let fg2 = squared((f - dict.synthesize(g)).norm());
    let decay = (-squared(trace.kappa) * (1.0 - delta_star) * schedule.l as f64).exp();
    let lhs = squared(trace.residual_norms[end]);
    let rhs = decay * squared(trace.residual_norms[schedule.j]) + fg2;
    let mut report = CheckReport::new("prop-iterate", SLACK);
    report.instances_run = 1;
    report.evaluate(0, end, lhs, rhs, abs_tol::<T>(f_norm2));
    Ok(report)
}

/// Why `certificate` does not establish `δ_{(A+1)n} <= δ*`, if it doesn't.
pub fn certificate_gap<T: Real>(
    constants: &TheoremConstants,
    n: usize,
    certificate: &RipEstimate<T>,
) -> Option<String> {
    if !certificate.kind.is_upper_bound() {
        return Some("sampled estimates only bound δ from below".into());
    }
    if n > 0 && certificate.order < constants.rip_order(n) {
        return Some(format!(
            "certificate order {} < (A+1)n = {}",
            certificate.order,
            constants.rip_order(n)
        ));
    }
    if n > 0 && certificate.value.as_f64() > constants.delta_star {
        return Some(format!(
            "certified δ = {} exceeds δ* = {}",
            certificate.value, constants.delta_star
        ));
    }
    None
}

/// One run of WOMP for `A n` steps together with the best `n`-term
/// approximation it is compared against.
#[derive(Debug, Clone)]
pub struct TheoremInstance<T: Real> {
    pub n: usize,
    pub trace: GreedyTrace<T>,
    pub oracle: OracleResult<T>,
    pub postprocessed: SparseVector<T>,
    pub postprocessed_error: T,
}

pub fn evaluate_theorem_instance<T: Real>(
    dict: &Dictionary<T>,
    f: &DVector<T>,
    n: usize,
    constants: &TheoremConstants,
    mode: SelectionMode,
    oracle: OracleOptions,
) -> Result<TheoremInstance<T>> {
    dict.check_vector(f)?;
    let steps = constants.steps(n);
    let limit = dict.ambient_dim().min(dict.num_atoms());
    if steps > limit {
        return Err(Error::StepBudgetExceedsDictionary { steps, limit });
    }
    let cfg = GreedyConfig::womp(T::lit(constants.kappa), steps, mode);
    let trace = run_womp(dict, f, &cfg)?;
    let best = best_n_term_with(dict, f, n, oracle)?;
    let keep = n.min(trace.steps());
    let postprocessed = postprocess_top_n(&trace, keep)?;
    let postprocessed_error = (f - dict.synthesize(&postprocessed)).norm();
    Ok(TheoremInstance {
        n,
        trace,
        oracle: best,
        postprocessed,
        postprocessed_error,
    })
}

fn skipped_report(name: &str) -> CheckReport {
    let mut r = CheckReport::new(name, SLACK);
    r.skipped = 1;
    r
}

/// `‖f - f_{An}‖ <= C σ_n(f)` for one evaluated instance.
pub fn theorem_report<T: Real>(
    instance: &TheoremInstance<T>,
    constants: &TheoremConstants,
) -> CheckReport {
    let mut report = CheckReport::new("instance-optimality", SLACK);
    report.instances_run = 1;
    let f_norm = instance.trace.target.norm().as_f64();
    let residual = instance.trace.final_residual_norm().as_f64();
    let sigma = instance.oracle.sigma_n.as_f64();
    let tol = abs_tol::<T>(f_norm);
    report.evaluate(
        0,
        instance.trace.steps(),
        residual,
        constants.c * sigma,
        tol,
    );
    // ratios of two round-off quantities are not recorded
    if sigma > tol {
        report.note_ratio(residual / sigma);
    }
    report
}

/// `‖f - f*_n‖ <= C* σ_n(f)` for the top-`n` postprocessed output.
pub fn postprocessing_report<T: Real>(
    instance: &TheoremInstance<T>,
    constants: &TheoremConstants,
    delta: f64,
) -> CheckReport {
    let mut report = CheckReport::new("postprocessing", SLACK);
    report.instances_run = 1;
    let f_norm = instance.trace.target.norm().as_f64();
    let err = instance.postprocessed_error.as_f64();
    let sigma = instance.oracle.sigma_n.as_f64();
    let c_star = constants.postprocessing_constant(delta);
    let tol = abs_tol::<T>(f_norm);
    report.evaluate(0, instance.n, err, c_star * sigma, tol);
    if sigma > tol {
        report.note_ratio(err / sigma);
    }
    report
}

/// Runs WOMP for `A n` steps and checks instance optimality. An uncertified
/// hypothesis yields a report with `skipped = 1`, never a pass or a failure.
pub fn check_instance_optimality<T: Real>(
    dict: &Dictionary<T>,
    f: &DVector<T>,
    n: usize,
    constants: &TheoremConstants,
    certificate: &RipEstimate<T>,
    mode: SelectionMode,
) -> Result<CheckReport> {
    if certificate_gap(constants, n, certificate).is_some() {
        return Ok(skipped_report("instance-optimality"));
    }
    let inst = evaluate_theorem_instance(dict, f, n, constants, mode, OracleOptions::default())?;
    Ok(theorem_report(&inst, constants))
}

/// Same as [`check_instance_optimality`] for the postprocessed output, with
/// `δ` read from the certificate (an upper bound only enlarges `C*`).
pub fn check_postprocessing<T: Real>(
    dict: &Dictionary<T>,
    f: &DVector<T>,
    n: usize,
    constants: &TheoremConstants,
    certificate: &RipEstimate<T>,
    mode: SelectionMode,
) -> Result<CheckReport> {
    if certificate_gap(constants, n, certificate).is_some() {
        return Ok(skipped_report("postprocessing"));
    }
    let inst = evaluate_theorem_instance(dict, f, n, constants, mode, OracleOptions::default())?;
    Ok(postprocessing_report(
        &inst,
        constants,
        certificate.value.as_f64(),
    ))
}

/// Observable form of the induction step behind instance optimality: for
/// every `k < n` with `‖r_{Ak}‖ <= 2σ_k` and `σ_n < σ_k / 4` some
/// `k' ∈ (k, n]` has `‖r_{Ak'}‖ <= 2σ_{k'}`. `sigmas` is `σ_0..=σ_n`.
pub fn check_claim_sequence<T: Real>(
    trace: &GreedyTrace<T>,
    sigmas: &[T],
    a: usize,
) -> CheckReport {
    let mut report = CheckReport::new("claim-sequence", SLACK);
    report.instances_run = 1;
    if sigmas.is_empty() {
        return report;
    }
    let n = sigmas.len() - 1;
    let tol = abs_tol::<T>(trace.target.norm().as_f64());
    let r = |k: usize| trace.residual_norm(a * k).as_f64();
    let s = |k: usize| sigmas[k].as_f64();
    for k in 0..n {
        if r(k) <= 2.0 * s(k) && s(n) < s(k) / 4.0 {
            // best k' in (k, n]: smallest excess over the 2σ bound
            let excess = (k + 1..=n)
                .map(|kp| r(kp) - 2.0 * s(kp))
                .fold(f64::INFINITY, f64::min);
            report.evaluate(0, a * k, excess, 0.0, tol);
        }
    }
    report
}

/// σ profile used by [`check_claim_sequence`].
pub fn claim_sigmas<T: Real>(
    dict: &Dictionary<T>,
    f: &DVector<T>,
    n: usize,
    oracle: OracleOptions,
) -> Result<Vec<T>> {
    sigma_profile_with(dict, f, n, oracle)
}
