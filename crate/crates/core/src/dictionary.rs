//! Finite normalized dictionaries in `R^m` and sparse coefficient vectors.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, DVectorView};
use rand::distr::Uniform;
use rand::Rng as _;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng;
use crate::scalar::Real;

/// Columns whose norm falls below this are rejected as zero.
pub const ZERO_COLUMN_NORM: f64 = 1e-300;
/// Relative deviation from unit norm tolerated on every atom.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// A finite family of unit-norm atoms stored as the columns of an `m x N`
/// matrix. Immutable once built; the Gram matrix is computed lazily and
/// cached.
#[derive(Debug, Clone)]
pub struct Dictionary<T: Real> {
    atoms: DMatrix<T>,
    label: String,
    gram: OnceLock<DMatrix<T>>,
}

impl<T: Real> Dictionary<T> {
    /// Normalizes the columns of `raw`. Same as [`normalize_columns`].
    pub fn new(raw: DMatrix<T>, label: impl Into<String>) -> Result<Self> {
        normalize_columns(raw, label)
    }

    /// Keeps columns whose norm is already 1 within [`NORM_TOLERANCE`]
    /// (relative) untouched and rescales the rest. Used when loading stored
    /// atoms so that a write/read cycle is bit exact.
    pub fn from_unit_columns(atoms: DMatrix<T>, label: impl Into<String>) -> Result<Self> {
        let mut scaled = normalize_columns(atoms.clone(), label)?;
        let tol = T::tol(NORM_TOLERANCE);
        for (j, col) in atoms.column_iter().enumerate() {
            if (col.norm() - T::one()).abs() <= tol {
                scaled.atoms.set_column(j, &col);
            }
        }
        Ok(scaled)
    }

    pub fn ambient_dim(&self) -> usize {
        self.atoms.nrows()
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.ncols()
    }

    pub fn atoms(&self) -> &DMatrix<T> {
        &self.atoms
    }

    pub fn atom(&self, index: usize) -> DVectorView<'_, T> {
        self.atoms.column(index)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn check_index(&self, index: usize) -> Result<()> {
        if index < self.num_atoms() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index,
                len: self.num_atoms(),
            })
        }
    }

    pub fn check_vector(&self, f: &DVector<T>) -> Result<()> {
        if f.len() != self.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                found: f.len(),
            });
        }
        if f.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(())
    }

    /// `Φ* v = (<v, φ_γ>)_γ`.
    pub fn analyze(&self, v: &DVector<T>) -> DVector<T> {
        self.atoms.tr_mul(v)
    }

    /// `Φ c = Σ c_γ φ_γ`.
    pub fn synthesize(&self, c: &SparseVector<T>) -> DVector<T> {
        let mut out = DVector::zeros(self.ambient_dim());
        for (index, value) in c.iter() {
            out.axpy(value, &self.atom(index), T::one());
        }
        out
    }

    /// The `m x |S|` matrix of the atoms in `support`, in the given order.
    pub fn columns(&self, support: &[usize]) -> Result<DMatrix<T>> {
        for &i in support {
            self.check_index(i)?;
        }
        Ok(self.atoms.select_columns(support))
    }

    /// Inner product of two atoms, computed the same way everywhere so that
    /// cached and freshly computed Gram entries agree bit for bit.
    pub fn atom_inner(&self, i: usize, j: usize) -> T {
        self.atom(i).dot(&self.atom(j))
    }

    /// Full `N x N` Gram matrix, exactly symmetric.
    pub fn gram(&self) -> &DMatrix<T> {
        self.gram.get_or_init(|| {
            let n = self.num_atoms();
            let rows: Vec<Vec<T>> = (0..n)
                .into_par_iter()
                .map(|i| (i..n).map(|j| self.atom_inner(i, j)).collect())
                .collect();
            let mut g = DMatrix::zeros(n, n);
            for (i, row) in rows.into_iter().enumerate() {
                for (offset, v) in row.into_iter().enumerate() {
                    g[(i, i + offset)] = v;
                    g[(i + offset, i)] = v;
                }
            }
            g
        })
    }

    /// Gram matrix restricted to `support`: entry `(a, b)` is
    /// `<φ_{S_a}, φ_{S_b}>`.
    pub fn gram_submatrix(&self, support: &[usize]) -> Result<DMatrix<T>> {
        if support.is_empty() {
            return Err(Error::InvalidParameter("empty support".into()));
        }
        for &i in support {
            self.check_index(i)?;
        }
        let k = support.len();
        let mut g = DMatrix::zeros(k, k);
        for a in 0..k {
            for b in a..k {
                let v = self.atom_inner(support[a], support[b]);
                g[(a, b)] = v;
                g[(b, a)] = v;
            }
        }
        Ok(g)
    }

    /// Coherence `μ = max_{i≠j} |<φ_i, φ_j>|`.
    pub fn coherence(&self) -> Result<T> {
        let n = self.num_atoms();
        if n < 2 {
            return Err(Error::SingleAtom);
        }
        let g = self.gram();
        let mut mu = T::zero();
        for j in 1..n {
            for i in 0..j {
                let v = g[(i, j)].abs();
                if v > mu {
                    mu = v;
                }
            }
        }
        Ok(mu)
    }

    /// Smallest and largest column norm.
    pub fn norm_range(&self) -> (T, T) {
        let mut lo = T::max_value().unwrap_or_else(T::one);
        let mut hi = T::zero();
        for c in self.atoms.column_iter() {
            let nrm = c.norm();
            lo = lo.min(nrm);
            hi = hi.max(nrm);
        }
        (lo, hi)
    }

    /// Whether the atoms form an orthonormal family (coherence below the
    /// normalization tolerance).
    pub fn is_orthonormal(&self) -> bool {
        if self.num_atoms() > self.ambient_dim() {
            return false;
        }
        if self.num_atoms() == 1 {
            return true;
        }
        self.coherence()
            .map(|mu| mu <= T::tol(NORM_TOLERANCE))
            .unwrap_or(false)
    }

    /// Converts every entry to another scalar type and renormalizes.
    pub fn cast<U: Real>(&self) -> Result<Dictionary<U>> {
        let raw = self.atoms.map(|x| U::lit(x.as_f64()));
        normalize_columns(raw, self.label.clone())
    }
}

/// Scales every column of `raw` to unit Euclidean norm.
pub fn normalize_columns<T: Real>(
    raw: DMatrix<T>,
    label: impl Into<String>,
) -> Result<Dictionary<T>> {
    if raw.nrows() == 0 || raw.ncols() == 0 {
        return Err(Error::InvalidParameter(
            "dictionary needs m >= 1 and N >= 1".into(),
        ));
    }
    if raw.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mut atoms = raw;
    let floor = T::lit(ZERO_COLUMN_NORM);
    for (index, mut col) in atoms.column_iter_mut().enumerate() {
        let nrm = col.norm();
        if nrm < floor || nrm == T::zero() {
            return Err(Error::ZeroColumn { index });
        }
        col /= nrm;
    }
    Ok(Dictionary {
        atoms,
        label: label.into(),
        gram: OnceLock::new(),
    })
}

fn gaussian_matrix(rows: usize, cols: usize, rng: &mut rng::Rng) -> DMatrix<f64> {
    // column-major fill so the stream layout matches the storage layout
    let data: Vec<f64> = (0..rows * cols)
        .map(|_| rng.sample(StandardNormal))
        .collect();
    DMatrix::from_vec(rows, cols, data)
}

fn to_scalar<T: Real>(m: DMatrix<f64>) -> DMatrix<T> {
    m.map(T::lit)
}

/// `m x N` matrix of independent standard normals, columns normalized.
pub fn gen_gaussian<T: Real>(m: usize, n: usize, seed: u64) -> Result<Dictionary<T>> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidParameter(
            "gaussian ensemble needs m, N >= 1".into(),
        ));
    }
    let mut rng = rng::seeded(seed);
    let raw = gaussian_matrix(m, n, &mut rng);
    normalize_columns(to_scalar(raw), format!("gaussian(m={m},N={n},seed={seed})"))
}

/// Identity plus uniform perturbations in `[-eps, eps]`, renormalized.
/// The result has coherence at most `4 eps`; draws violating that are
/// regenerated on a fresh stream (up to 100 attempts).
pub fn gen_perturbed_identity<T: Real>(n: usize, eps: f64, seed: u64) -> Result<Dictionary<T>> {
    if n < 2 {
        return Err(Error::InvalidParameter(
            "perturbed identity needs N >= 2".into(),
        ));
    }
    if !(0.0..1.0 / (2.0 * n as f64)).contains(&eps) {
        return Err(Error::InvalidParameter(format!(
            "eps must lie in [0, 1/(2N)) = [0, {}), got {eps}",
            1.0 / (2.0 * n as f64)
        )));
    }
    let label = format!("perturbed-identity(N={n},eps={eps},seed={seed})");
    if eps == 0.0 {
        return normalize_columns(DMatrix::identity(n, n), label);
    }
    const ATTEMPTS: usize = 100;
    let dist =
        Uniform::new_inclusive(-eps, eps).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    for attempt in 0..ATTEMPTS {
        let mut rng = rng::instance_stream(seed, attempt as u64);
        let data: Vec<f64> = (0..n * n).map(|_| rng.sample(dist)).collect();
        let raw = DMatrix::identity(n, n) + DMatrix::from_vec(n, n, data);
        let dict = normalize_columns(to_scalar::<T>(raw), label.clone())?;
        if dict.coherence()?.as_f64() <= 4.0 * eps {
            return Ok(dict);
        }
    }
    Err(Error::CoherenceTargetUnreachable { attempts: ATTEMPTS })
}

fn random_orthonormal(m: usize, rng: &mut rng::Rng) -> DMatrix<f64> {
    let g = gaussian_matrix(m, m, rng);
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    // fix column signs so the draw is Haar distributed
    let mut q = q;
    for (j, mut col) in q.column_iter_mut().enumerate() {
        if r[(j, j)] < 0.0 {
            col.neg_mut();
        }
    }
    q
}

/// Standard basis of `R^m` followed by a random orthonormal basis, `N = 2m`.
pub fn gen_union_of_bases<T: Real>(m: usize, seed: u64) -> Result<Dictionary<T>> {
    if m < 2 {
        return Err(Error::InvalidParameter(
            "union of bases needs m >= 2".into(),
        ));
    }
    let mut rng = rng::seeded(seed);
    let q = random_orthonormal(m, &mut rng);
    let mut raw = DMatrix::zeros(m, 2 * m);
    raw.view_mut((0, 0), (m, m))
        .copy_from(&DMatrix::<f64>::identity(m, m));
    raw.view_mut((0, m), (m, m)).copy_from(&q);
    normalize_columns(to_scalar(raw), format!("union-of-bases(m={m},seed={seed})"))
}

/// Random orthonormal basis of `R^m` (Haar distributed).
pub fn gen_orthonormal<T: Real>(m: usize, seed: u64) -> Result<Dictionary<T>> {
    if m == 0 {
        return Err(Error::InvalidParameter(
            "orthonormal basis needs m >= 1".into(),
        ));
    }
    let mut rng = rng::seeded(seed);
    let q = random_orthonormal(m, &mut rng);
    normalize_columns(to_scalar(q), format!("orthonormal(m={m},seed={seed})"))
}

/// Coefficients on a sorted support; exact zeros are dropped on
/// construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector<T: Real> {
    support: Vec<usize>,
    coefficients: Vec<T>,
    dictionary_label: String,
}

impl<T: Real> SparseVector<T> {
    pub fn new(
        entries: impl IntoIterator<Item = (usize, T)>,
        num_atoms: usize,
        dictionary_label: impl Into<String>,
    ) -> Result<Self> {
        let mut entries: Vec<(usize, T)> = entries.into_iter().collect();
        entries.sort_by_key(|&(i, _)| i);
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::DuplicateIndex { index: w[0].0 });
            }
        }
        if let Some(&(index, _)) = entries.iter().find(|&&(i, _)| i >= num_atoms) {
            return Err(Error::IndexOutOfRange {
                index,
                len: num_atoms,
            });
        }
        if entries.iter().any(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        entries.retain(|&(_, v)| v != T::zero());
        let (support, coefficients) = entries.into_iter().unzip();
        Ok(Self {
            support,
            coefficients,
            dictionary_label: dictionary_label.into(),
        })
    }

    pub fn zero(dictionary_label: impl Into<String>) -> Self {
        Self {
            support: Vec::new(),
            coefficients: Vec::new(),
            dictionary_label: dictionary_label.into(),
        }
    }

    /// Builds the sparse vector for `dict`, checking indices against it.
    pub fn for_dictionary(
        dict: &Dictionary<T>,
        entries: impl IntoIterator<Item = (usize, T)>,
    ) -> Result<Self> {
        Self::new(entries, dict.num_atoms(), dict.label())
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn coefficients(&self) -> &[T] {
        &self.coefficients
    }

    pub fn dictionary_label(&self) -> &str {
        &self.dictionary_label
    }

    pub fn sparsity(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, T)> + '_ {
        self.support
            .iter()
            .copied()
            .zip(self.coefficients.iter().copied())
    }

    pub fn get(&self, index: usize) -> T {
        match self.support.binary_search(&index) {
            Ok(pos) => self.coefficients[pos],
            Err(_) => T::zero(),
        }
    }

    pub fn norm(&self) -> T {
        self.coefficients
            .iter()
            .fold(T::zero(), |acc, &c| acc + c * c)
            .sqrt()
    }

    /// Keeps only the entries whose index is in `keep`.
    pub fn restrict(&self, keep: &[usize]) -> Self {
        let (support, coefficients) = self.iter().filter(|(i, _)| keep.contains(i)).unzip();
        Self {
            support,
            coefficients,
            dictionary_label: self.dictionary_label.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    #[test]
    fn identity_is_left_alone() {
        let d = normalize_columns(DMatrix::<f64>::identity(3, 3), "id").unwrap();
        assert_eq!(d.atoms(), &DMatrix::identity(3, 3));
    }

    #[test]
    fn three_four_column_scales_to_unit() {
        let d = normalize_columns(dmatrix![3.0f64; 4.0], "c").unwrap();
        assert!((d.atoms()[(0, 0)] - 0.6).abs() < 1e-15);
        assert!((d.atoms()[(1, 0)] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn zero_column_is_rejected() {
        let raw = dmatrix![1.0f64, 0.0; 0.0, 0.0];
        match normalize_columns(raw, "z") {
            Err(Error::ZeroColumn { index }) => assert_eq!(index, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_finite_is_rejected() {
        let raw = dmatrix![f64::NAN, 1.0; 0.0, 1.0];
        assert!(matches!(normalize_columns(raw, "n"), Err(Error::NonFinite)));
    }

    #[test]
    fn gaussian_is_deterministic_and_seed_sensitive() {
        let a = gen_gaussian::<f64>(4, 8, 1).unwrap();
        let b = gen_gaussian::<f64>(4, 8, 1).unwrap();
        let c = gen_gaussian::<f64>(4, 8, 2).unwrap();
        assert_eq!(a.atoms(), b.atoms());
        assert_ne!(a.atoms(), c.atoms());
    }

    #[test]
    fn gaussian_columns_are_unit() {
        let d = gen_gaussian::<f64>(20, 40, 7).unwrap();
        for c in d.atoms().column_iter() {
            assert!((c.norm() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn zero_perturbation_gives_identity() {
        let d = gen_perturbed_identity::<f64>(5, 0.0, 1).unwrap();
        assert_eq!(d.atoms(), &DMatrix::identity(5, 5));
        assert_eq!(d.coherence().unwrap(), 0.0);
    }

    #[test]
    fn perturbed_identity_meets_coherence_target() {
        let d = gen_perturbed_identity::<f64>(300, 1e-4, 3).unwrap();
        assert!(d.coherence().unwrap() <= 4e-4);
        assert_eq!(d.ambient_dim(), 300);
    }

    #[test]
    fn perturbed_identity_validates_eps() {
        assert!(gen_perturbed_identity::<f64>(10, 0.05, 1).is_err());
        assert!(gen_perturbed_identity::<f64>(1, 0.0, 1).is_err());
    }

    #[test]
    fn union_of_bases_has_two_orthonormal_blocks() {
        let d = gen_union_of_bases::<f64>(2, 3).unwrap();
        assert_eq!(d.num_atoms(), 4);
        let g1 = d.gram_submatrix(&[0, 1]).unwrap();
        let g2 = d.gram_submatrix(&[2, 3]).unwrap();
        assert!((g1 - DMatrix::identity(2, 2)).abs().max() < 1e-14);
        assert!((g2 - DMatrix::identity(2, 2)).abs().max() < 1e-14);
    }

    #[test]
    fn union_of_bases_coherence_is_cross_block_max() {
        let d = gen_union_of_bases::<f64>(8, 1).unwrap();
        let mut brute = 0.0f64;
        for i in 0..16 {
            for j in 0..16 {
                if i != j {
                    let v: f64 = (0..8).map(|r| d.atoms()[(r, i)] * d.atoms()[(r, j)]).sum();
                    brute = brute.max(v.abs());
                }
            }
        }
        let mu = d.coherence().unwrap();
        assert!((mu - brute).abs() < 1e-14);
        // within-block pairs are orthogonal, so the max sits in the cross block
        let cross = d.atoms().columns(0, 8).transpose() * d.atoms().columns(8, 8);
        assert!((cross.abs().max() - mu).abs() < 1e-14);
    }

    #[test]
    fn coherence_small_cases() {
        let d = normalize_columns(dmatrix![1.0f64, 0.6; 0.0, 0.8], "two").unwrap();
        assert!((d.coherence().unwrap() - 0.6).abs() < 1e-15);
        let id = normalize_columns(DMatrix::<f64>::identity(4, 4), "id").unwrap();
        assert_eq!(id.coherence().unwrap(), 0.0);
        let single = normalize_columns(dmatrix![1.0f64; 1.0], "one").unwrap();
        assert!(matches!(single.coherence(), Err(Error::SingleAtom)));
    }

    #[test]
    fn coherence_matches_pair_scan() {
        let d = gen_gaussian::<f64>(20, 40, 7).unwrap();
        let mut brute = 0.0f64;
        let mut pairs = 0;
        for i in 0..40 {
            for j in i + 1..40 {
                pairs += 1;
                let v: f64 = (0..20).map(|r| d.atoms()[(r, i)] * d.atoms()[(r, j)]).sum();
                brute = brute.max(v.abs());
            }
        }
        assert_eq!(pairs, 780);
        assert!((d.coherence().unwrap() - brute).abs() < 1e-14);
    }

    #[test]
    fn gram_submatrix_cases() {
        let d = normalize_columns(dmatrix![1.0f64, 0.6; 0.0, 0.8], "two").unwrap();
        let g = d.gram_submatrix(&[1]).unwrap();
        assert!((g[(0, 0)] - 1.0).abs() < 1e-12);
        let g = d.gram_submatrix(&[0, 1]).unwrap();
        assert!((g[(0, 1)] - 0.6).abs() < 1e-15);
        assert_eq!(g[(0, 1)], g[(1, 0)]);
        assert!(matches!(
            d.gram_submatrix(&[0, 2]),
            Err(Error::IndexOutOfRange { index: 2, len: 2 })
        ));
        let id = normalize_columns(DMatrix::<f64>::identity(4, 4), "id").unwrap();
        assert_eq!(
            id.gram_submatrix(&[3, 0, 2]).unwrap(),
            DMatrix::identity(3, 3)
        );
    }

    #[test]
    fn sparse_vector_construction() {
        let v = SparseVector::new([(3, 1.0f64), (1, 0.0), (0, -2.0)], 5, "d").unwrap();
        assert_eq!(v.support(), &[0, 3]);
        assert_eq!(v.coefficients(), &[-2.0, 1.0]);
        assert_eq!(v.sparsity(), 2);
        assert_eq!(v.get(1), 0.0);
        assert!(matches!(
            SparseVector::new([(1, 1.0f64), (1, 2.0)], 5, "d"),
            Err(Error::DuplicateIndex { index: 1 })
        ));
        assert!(matches!(
            SparseVector::new([(5, 1.0f64)], 5, "d"),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn single_precision_dictionaries_work() {
        let d = gen_gaussian::<f32>(6, 9, 4).unwrap();
        for c in d.atoms().column_iter() {
            assert!((c.norm() - 1.0).abs() <= <f32 as Real>::tol(NORM_TOLERANCE));
        }
        assert!(d.coherence().unwrap() < 1.0);
    }
}
