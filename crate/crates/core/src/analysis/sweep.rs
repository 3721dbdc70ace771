//! Empirical recovery sweeps over random dictionary ensembles.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::targets::{mixture, random_sparse};
use crate::dictionary::{
    gen_gaussian, gen_orthonormal, gen_perturbed_identity, gen_union_of_bases, Dictionary,
};
use crate::error::{Error, Result};
use crate::greedy::run_omp;
use crate::oracle::{best_n_term_with, OracleOptions};
use crate::rng;

/// Tail level of the mixtures used for the instance-optimality ratio.
pub const SWEEP_NOISE_LEVEL: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Ensemble {
    Gaussian { m: usize, n_atoms: usize },
    Orthonormal { m: usize },
    PerturbedIdentity { n_atoms: usize, eps: f64 },
    UnionOfBases { m: usize },
}

impl Ensemble {
    pub fn dims(&self) -> (usize, usize) {
        match *self {
            Ensemble::Gaussian { m, n_atoms } => (m, n_atoms),
            Ensemble::Orthonormal { m } => (m, m),
            Ensemble::PerturbedIdentity { n_atoms, .. } => (n_atoms, n_atoms),
            Ensemble::UnionOfBases { m } => (m, 2 * m),
        }
    }

    pub fn generate(&self, seed: u64) -> Result<Dictionary<f64>> {
        match *self {
            Ensemble::Gaussian { m, n_atoms } => gen_gaussian(m, n_atoms, seed),
            Ensemble::Orthonormal { m } => gen_orthonormal(m, seed),
            Ensemble::PerturbedIdentity { n_atoms, eps } => {
                gen_perturbed_identity(n_atoms, eps, seed)
            }
            Ensemble::UnionOfBases { m } => gen_union_of_bases(m, seed),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub ensemble: Ensemble,
    pub n_values: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    /// OMP runs `ratio_multiple · n` steps for the ratio columns.
    pub ratio_multiple: usize,
    pub oracle: OracleOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub m: usize,
    #[serde(rename = "N")]
    pub n_atoms: usize,
    pub n: usize,
    pub trials: usize,
    pub success_fraction: f64,
    /// `‖f - f_{An}‖ / σ_n`; empty when the oracle budget is exceeded.
    pub mean_ratio: Option<f64>,
    pub max_ratio: Option<f64>,
}

struct Trial {
    success: bool,
    ratio: Option<f64>,
}

fn run_trial(dict: &Dictionary<f64>, spec: &SweepSpec, n: usize, id: u64) -> Result<Trial> {
    let mut rng = rng::instance_stream(spec.seed, id);
    let limit = dict.ambient_dim().min(dict.num_atoms());

    let z = random_sparse(dict, n, &mut rng)?;
    let f = dict.synthesize(&z);
    let trace = run_omp(dict, &f, n)?;
    let mut found = trace.selected.clone();
    found.sort_unstable();
    let success = found == z.support() && trace.final_residual_norm() <= 1e-8 * f.norm();

    let mix = mixture(dict, n, SWEEP_NOISE_LEVEL, &mut rng)?;
    let steps = (spec.ratio_multiple * n).min(limit);
    let ratio = match best_n_term_with(dict, &mix.target, n, spec.oracle) {
        Ok(best) => {
            let r = run_omp(dict, &mix.target, steps)?.final_residual_norm();
            let sigma = best.sigma_n;
            Some(if sigma > 0.0 {
                r / sigma
            } else if r > 0.0 {
                f64::INFINITY
            } else {
                1.0
            })
        }
        Err(Error::EnumerationBudgetExceeded { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(Trial { success, ratio })
}

/// For every `n`, each trial draws a fresh dictionary and measures exact
/// `n`-step recovery of a sparse target and the OMP-to-oracle ratio on a
/// sparse-plus-tail mixture. Rows follow the order of `n_values`.
pub fn recovery_phase_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    let (m, n_atoms) = spec.ensemble.dims();
    if m == 0 || n_atoms == 0 {
        return Err(Error::InvalidParameter("empty ensemble".into()));
    }
    if spec.trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    if spec.ratio_multiple == 0 {
        return Err(Error::InvalidParameter(
            "ratio multiple must be positive".into(),
        ));
    }
    let limit = m.min(n_atoms);
    if let Some(&n) = spec.n_values.iter().find(|&&n| n > limit) {
        return Err(Error::InvalidParameter(format!(
            "n = {n} exceeds min(m, N) = {limit}"
        )));
    }

    let mut rows = Vec::with_capacity(spec.n_values.len());
    for (row, &n) in spec.n_values.iter().enumerate() {
        let trials: Vec<Result<Trial>> = (0..spec.trials as u64)
            .into_par_iter()
            .map(|t| {
                let id = (row as u64) * spec.trials as u64 + t;
                let dict = spec.ensemble.generate(spec.seed.wrapping_add(id))?;
                run_trial(&dict, spec, n, id)
            })
            .collect();
        let trials = trials.into_iter().collect::<Result<Vec<_>>>()?;
        let successes = trials.iter().filter(|t| t.success).count();
        let ratios: Option<Vec<f64>> = trials.iter().map(|t| t.ratio).collect();
        let (mean_ratio, max_ratio) = match ratios {
            Some(r) => (
                Some(r.iter().sum::<f64>() / r.len() as f64),
                Some(r.iter().copied().fold(f64::NEG_INFINITY, f64::max)),
            ),
            None => (None, None),
        };
        rows.push(SweepRow {
            m,
            n_atoms,
            n,
            trials: spec.trials,
            success_fraction: successes as f64 / spec.trials as f64,
            mean_ratio,
            max_ratio,
        });
    }
    Ok(rows)
}

/// Writes rows with the fixed header `m,N,n,trials,success_fraction,mean_ratio,max_ratio`.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record([
            "m",
            "N",
            "n",
            "trials",
            "success_fraction",
            "mean_ratio",
            "max_ratio",
        ])?;
    }
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
