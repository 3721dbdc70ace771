//! Random test targets `f = Φz + ε w`.

use nalgebra::DVector;
use rand::seq::index;
use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::dictionary::{Dictionary, SparseVector};
use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::scalar::Real;

/// Tail levels `ε / ‖Φz‖` cycled through by the batch checks.
pub const NOISE_LEVELS: [f64; 4] = [0.0, 0.01, 0.1, 1.0];

#[derive(Debug, Clone)]
pub struct Mixture<T: Real> {
    pub sparse: SparseVector<T>,
    pub signal: DVector<T>,
    pub target: DVector<T>,
    pub noise_level: f64,
}

/// Uniform random support of size `n`, standard normal coefficients.
pub fn random_sparse<T: Real>(
    dict: &Dictionary<T>,
    n: usize,
    rng: &mut Rng,
) -> Result<SparseVector<T>> {
    if n > dict.num_atoms() {
        return Err(Error::InvalidParameter(format!(
            "sparsity {n} exceeds N = {}",
            dict.num_atoms()
        )));
    }
    let support = index::sample(rng, dict.num_atoms(), n).into_vec();
    let entries: Vec<(usize, T)> = support
        .into_iter()
        .map(|i| (i, T::lit(rng.sample::<f64, _>(StandardNormal))))
        .collect();
    SparseVector::for_dictionary(dict, entries)
}

/// Uniformly distributed unit vector in `R^m`.
pub fn random_unit<T: Real>(m: usize, rng: &mut Rng) -> DVector<T> {
    loop {
        let v = DVector::from_fn(m, |_, _| rng.sample::<f64, _>(StandardNormal));
        let nrm = v.norm();
        if nrm > 0.0 {
            return (v / nrm).map(T::lit);
        }
    }
}

/// `f = Φz + ε w` with `z` random `n`-sparse, `w` a random unit vector and
/// `ε = noise_level ‖Φz‖` (`ε = noise_level` when `Φz = 0`).
pub fn mixture<T: Real>(
    dict: &Dictionary<T>,
    n: usize,
    noise_level: f64,
    rng: &mut Rng,
) -> Result<Mixture<T>> {
    let sparse = random_sparse(dict, n, rng)?;
    let signal = dict.synthesize(&sparse);
    let w = random_unit::<T>(dict.ambient_dim(), rng);
    let scale = signal.norm();
    let scale = if scale > T::zero() { scale } else { T::one() };
    let target = &signal + w * (T::lit(noise_level) * scale);
    Ok(Mixture {
        sparse,
        signal,
        target,
        noise_level,
    })
}
