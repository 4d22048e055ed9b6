//! Dictionaries (unit-norm atom matrices), generator families, and
//! conditioning analysis: subset restricted-isometry constants, mutual
//! coherence, worst sub-dictionaries, and spark detection.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::combinatorics::{binomial, for_each_combination};
use crate::error::{Error, Result};
use crate::linalg::{dot, min_sym_eigenvalue, norm2, Mat};
use crate::util::{atomic_write, fmt_full};

/// Columns are normalized to unit length within this tolerance.
pub const NORM_TOL: f64 = 1e-10;

/// Default cap on the number of subsets an exhaustive search may enumerate.
pub const DEFAULT_ENUM_CAP: u128 = 10_000_000;

/// An N x K matrix whose K columns (atoms) all have unit Euclidean norm.
#[derive(Debug, Clone, PartialEq)]
pub struct Dictionary {
    atoms: Mat,
}

/// A nonempty, strictly increasing list of atom indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct SubsetIndex(Vec<usize>);

impl SubsetIndex {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::subset("index set is empty"));
        }
        for w in indices.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::subset(format!(
                    "indices must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(SubsetIndex(indices))
    }

    /// Caller guarantees `indices` is nonempty and strictly increasing.
    pub(crate) fn from_sorted_unchecked(indices: Vec<usize>) -> Self {
        debug_assert!(!indices.is_empty());
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        SubsetIndex(indices)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false // the constructor rejects empty index sets
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }
}

impl TryFrom<Vec<usize>> for SubsetIndex {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        SubsetIndex::new(v)
    }
}

impl From<SubsetIndex> for Vec<usize> {
    fn from(s: SubsetIndex) -> Vec<usize> {
        s.0
    }
}

/// Result of a bounded spark search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SparkBound {
    /// Smallest subset size at which some column subset is linearly dependent.
    Found(usize),
    /// No dependent subset of size up to the given bound.
    NotFoundUpTo(usize),
}

/// Summary of a dictionary's conditioning.
#[derive(Debug, Clone, Serialize)]
pub struct ConditioningReport {
    pub mutual_coherence: f64,
    pub worst_subset: SubsetIndex,
    pub worst_delta: f64,
    pub spark_bound: SparkBound,
}

impl Dictionary {
    /// Normalize every column of `raw` to unit length.
    pub fn normalize_columns(raw: Mat) -> Result<Self> {
        let mut m = raw;
        for j in 0..m.cols() {
            let col = m.col_mut(j);
            if col.iter().any(|v| !v.is_finite()) {
                return Err(Error::numerical(format!(
                    "column {j} contains a non-finite entry"
                )));
            }
            let n = norm2(col);
            if n == 0.0 {
                return Err(Error::ZeroColumn { index: j });
            }
            for v in col.iter_mut() {
                *v /= n;
            }
        }
        if m.rows() == 0 || m.cols() == 0 {
            return Err(Error::param("dictionary must have at least one row and one column"));
        }
        Ok(Dictionary { atoms: m })
    }

    /// Accept `raw` as-is, verifying every column already has unit norm
    /// within [`NORM_TOL`].
    pub fn from_unit_columns(raw: Mat) -> Result<Self> {
        if raw.rows() == 0 || raw.cols() == 0 {
            return Err(Error::param("dictionary must have at least one row and one column"));
        }
        for j in 0..raw.cols() {
            let col = raw.col(j);
            if col.iter().any(|v| !v.is_finite()) {
                return Err(Error::numerical(format!(
                    "column {j} contains a non-finite entry"
                )));
            }
            let n = norm2(col);
            if (n - 1.0).abs() > NORM_TOL {
                return Err(Error::param(format!(
                    "column {j} has norm {n}, expected 1 within {NORM_TOL}; \
                     load with normalization enabled or fix the input"
                )));
            }
        }
        Ok(Dictionary { atoms: raw })
    }

    /// Signal dimension N (number of rows).
    pub fn rows(&self) -> usize {
        self.atoms.rows()
    }

    /// Number of atoms K (columns).
    pub fn cols(&self) -> usize {
        self.atoms.cols()
    }

    pub fn mat(&self) -> &Mat {
        &self.atoms
    }

    pub fn atom(&self, j: usize) -> &[f64] {
        self.atoms.col(j)
    }

    fn validate_subset(&self, subset: &SubsetIndex) -> Result<()> {
        let max = *subset.indices().last().expect("subset is nonempty");
        if max >= self.cols() {
            return Err(Error::subset(format!(
                "index {max} out of range for a dictionary with {} atoms",
                self.cols()
            )));
        }
        Ok(())
    }

    /// Gram matrix of the selected columns, entries in subset order.
    pub fn subset_gram(&self, subset: &SubsetIndex) -> Result<Mat> {
        self.validate_subset(subset)?;
        let idx = subset.indices();
        let s = idx.len();
        let mut g = Mat::zeros(s, s);
        for b in 0..s {
            for a in 0..=b {
                let v = dot(self.atoms.col(idx[a]), self.atoms.col(idx[b]));
                g[(a, b)] = v;
                g[(b, a)] = v;
            }
        }
        Ok(g)
    }

    /// Subset restricted-isometry constant: 1 minus the smallest eigenvalue
    /// of the subset's Gram matrix, clamped to [0, 1] against rounding.
    pub fn restricted_isometry_delta(&self, subset: &SubsetIndex) -> Result<f64> {
        let g = self.subset_gram(subset)?;
        let min_eig = min_sym_eigenvalue(&g)?;
        Ok((1.0 - min_eig).clamp(0.0, 1.0))
    }

    /// Largest absolute inner product between two distinct atoms.
    pub fn mutual_coherence(&self) -> Result<f64> {
        let k = self.cols();
        if k < 2 {
            return Err(Error::param(
                "mutual coherence needs at least two atoms",
            ));
        }
        let mut best = 0.0f64;
        for j in 1..k {
            for i in 0..j {
                let c = dot(self.atoms.col(i), self.atoms.col(j)).abs();
                if c > best {
                    best = c;
                }
            }
        }
        Ok(best)
    }

    /// The size-s column subset whose Gram matrix has the smallest minimum
    /// eigenvalue, together with its delta. Exhaustive search; ties broken
    /// toward the lexicographically smallest subset.
    pub fn worst_subdictionary(&self, s: usize) -> Result<(SubsetIndex, f64)> {
        self.worst_subdictionary_with_cap(s, DEFAULT_ENUM_CAP)
    }

    pub fn worst_subdictionary_with_cap(
        &self,
        s: usize,
        cap: u128,
    ) -> Result<(SubsetIndex, f64)> {
        let (n, k) = (self.rows(), self.cols());
        if s < 2 || s > n.min(k) {
            return Err(Error::param(format!(
                "subset size {s} outside [2, min(N, K)] = [2, {}]",
                n.min(k)
            )));
        }
        let required = binomial(k, s);
        if required > cap {
            return Err(Error::EnumerationCap { required, cap });
        }
        let gram = self.atoms.gram();
        // Partition by first index; each chunk scans its lexicographic range
        // and keeps its strictly-best candidate, so the merged winner is the
        // global lexicographic-first minimum regardless of scheduling.
        let per_first: Vec<Option<(f64, Vec<usize>)>> = (0..=(k - s))
            .into_par_iter()
            .map(|first| {
                let mut best: Option<(f64, Vec<usize>)> = None;
                let mut subset = vec![0usize; s];
                subset[0] = first;
                let mut failed = false;
                for_each_combination(k - first - 1, s - 1, |rest| {
                    if failed {
                        return;
                    }
                    for (t, &r) in rest.iter().enumerate() {
                        subset[t + 1] = first + 1 + r;
                    }
                    let mut sub = Mat::zeros(s, s);
                    for b in 0..s {
                        for a in 0..=b {
                            let v = gram[(subset[a], subset[b])];
                            sub[(a, b)] = v;
                            sub[(b, a)] = v;
                        }
                    }
                    match min_sym_eigenvalue(&sub) {
                        Ok(me) => {
                            if best.as_ref().is_none_or(|(b, _)| me < *b) {
                                best = Some((me, subset.clone()));
                            }
                        }
                        Err(_) => failed = true,
                    }
                });
                if failed {
                    None // surfaced below as a numerical error
                } else {
                    best
                }
            })
            .collect();
        let mut winner: Option<(f64, Vec<usize>)> = None;
        for cand in per_first {
            let (me, subset) = cand.ok_or_else(|| {
                Error::numerical("eigenvalue computation failed during subset search")
            })?;
            if winner.as_ref().is_none_or(|(b, _)| me < *b) {
                winner = Some((me, subset));
            }
        }
        let (min_eig, subset) =
            winner.ok_or_else(|| Error::numerical("subset search produced no candidates"))?;
        Ok((
            SubsetIndex::from_sorted_unchecked(subset),
            (1.0 - min_eig).clamp(0.0, 1.0),
        ))
    }

    /// Smallest subset size `s <= s_max` at which some column subset is
    /// linearly dependent (minimum Gram eigenvalue at most `zero_tol`).
    pub fn spark_bound(&self, s_max: usize, zero_tol: f64) -> Result<SparkBound> {
        self.spark_bound_with_cap(s_max, zero_tol, DEFAULT_ENUM_CAP)
    }

    pub fn spark_bound_with_cap(
        &self,
        s_max: usize,
        zero_tol: f64,
        cap: u128,
    ) -> Result<SparkBound> {
        let (n, k) = (self.rows(), self.cols());
        if s_max < 2 || s_max > n + 1 {
            return Err(Error::param(format!(
                "spark search bound {s_max} outside [2, N + 1] = [2, {}]",
                n + 1
            )));
        }
        if !(zero_tol >= 0.0) {
            return Err(Error::param("zero tolerance must be nonnegative"));
        }
        for s in 2..=s_max.min(k) {
            let required = binomial(k, s);
            if required > cap {
                return Err(Error::EnumerationCap { required, cap });
            }
            let gram = self.atoms.gram();
            let found = (0..=(k - s))
                .into_par_iter()
                .map(|first| {
                    let mut subset = vec![0usize; s];
                    subset[0] = first;
                    let mut hit = false;
                    for_each_combination(k - first - 1, s - 1, |rest| {
                        if hit {
                            return;
                        }
                        for (t, &r) in rest.iter().enumerate() {
                            subset[t + 1] = first + 1 + r;
                        }
                        let mut sub = Mat::zeros(s, s);
                        for b in 0..s {
                            for a in 0..=b {
                                let v = gram[(subset[a], subset[b])];
                                sub[(a, b)] = v;
                                sub[(b, a)] = v;
                            }
                        }
                        if let Ok(me) = min_sym_eigenvalue(&sub) {
                            if me <= zero_tol {
                                hit = true;
                            }
                        }
                    });
                    hit
                })
                .reduce(|| false, |a, b| a || b);
            if found {
                return Ok(SparkBound::Found(s));
            }
        }
        Ok(SparkBound::NotFoundUpTo(s_max))
    }

    /// Bundle coherence, the worst subset at `worst_order`, and a bounded
    /// spark search into one report.
    pub fn conditioning_report(
        &self,
        worst_order: usize,
        spark_max: usize,
        zero_tol: f64,
    ) -> Result<ConditioningReport> {
        let mutual_coherence = self.mutual_coherence()?;
        let (worst_subset, worst_delta) = self.worst_subdictionary(worst_order)?;
        let spark = self.spark_bound(spark_max, zero_tol)?;
        Ok(ConditioningReport {
            mutual_coherence,
            worst_subset,
            worst_delta,
            spark_bound: spark,
        })
    }

    /// Write the text format: a `N K` header line, then N rows of K values
    /// with full double precision. The write is atomic.
    pub fn save(&self, path: &Path) -> Result<()> {
        let (n, k) = (self.rows(), self.cols());
        let mut out = String::with_capacity(n * k * 26 + 16);
        out.push_str(&format!("{n} {k}\n"));
        for i in 0..n {
            for j in 0..k {
                if j > 0 {
                    out.push(' ');
                }
                out.push_str(&fmt_full(self.atoms[(i, j)]));
            }
            out.push('\n');
        }
        atomic_write(path, out.as_bytes())
    }

    /// Read the text format. With `normalize` set, columns are rescaled to
    /// unit norm; otherwise they must already be unit norm within [`NORM_TOL`].
    pub fn load(path: &Path, normalize: bool) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let parse_err = |line: usize, msg: String| Error::ParseFile {
            path: path.to_path_buf(),
            line,
            msg,
        };
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| parse_err(1, "empty file".into()))?;
        let dims: Vec<&str> = header.split_whitespace().collect();
        if dims.len() != 2 {
            return Err(parse_err(1, format!("expected `N K` header, got {header:?}")));
        }
        let n: usize = dims[0]
            .parse()
            .map_err(|e| parse_err(1, format!("bad row count {:?}: {e}", dims[0])))?;
        let k: usize = dims[1]
            .parse()
            .map_err(|e| parse_err(1, format!("bad column count {:?}: {e}", dims[1])))?;
        if n == 0 || k == 0 {
            return Err(parse_err(1, format!("dimensions must be positive, got {n} {k}")));
        }
        let mut m = Mat::zeros(n, k);
        let mut row = 0usize;
        for (lineno, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            if row >= n {
                return Err(parse_err(
                    lineno + 1,
                    format!("expected {n} data rows, found extra content"),
                ));
            }
            let mut count = 0usize;
            for tok in line.split_whitespace() {
                if count >= k {
                    return Err(parse_err(
                        lineno + 1,
                        format!("row has more than {k} values"),
                    ));
                }
                let v: f64 = tok
                    .parse()
                    .map_err(|e| parse_err(lineno + 1, format!("bad value {tok:?}: {e}")))?;
                m[(row, count)] = v;
                count += 1;
            }
            if count != k {
                return Err(parse_err(
                    lineno + 1,
                    format!("row has {count} values, expected {k}"),
                ));
            }
            row += 1;
        }
        if row != n {
            return Err(parse_err(
                text.lines().count(),
                format!("found {row} data rows, expected {n}"),
            ));
        }
        if normalize {
            Dictionary::normalize_columns(m)
        } else {
            Dictionary::from_unit_columns(m)
        }
    }
}

/// Random dictionary: i.i.d. standard normal entries, columns normalized.
/// Deterministic for a fixed seed.
pub fn gen_gaussian(n: usize, k: usize, seed: u64) -> Result<Dictionary> {
    if n == 0 || k == 0 {
        return Err(Error::param(format!(
            "dimensions must be positive, got {n}x{k}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = Mat::zeros(n, k);
    for j in 0..k {
        for v in m.col_mut(j) {
            *v = StandardNormal.sample(&mut rng);
        }
    }
    Dictionary::normalize_columns(m)
}

/// Overcomplete DCT dictionary: atom k has entries cos(pi (2n + 1) k / (2K))
/// for n = 0..N-1, columns normalized. Requires K >= N; K = N gives an
/// orthonormal DCT basis.
pub fn gen_odct(n: usize, k: usize) -> Result<Dictionary> {
    if n == 0 {
        return Err(Error::param("signal dimension must be positive"));
    }
    if k < n {
        return Err(Error::param(format!(
            "overcomplete DCT needs K >= N, got N = {n}, K = {k}"
        )));
    }
    let mut m = Mat::zeros(n, k);
    for kk in 0..k {
        let col = m.col_mut(kk);
        for (nn, v) in col.iter_mut().enumerate() {
            *v = (std::f64::consts::PI * (2.0 * nn as f64 + 1.0) * kk as f64
                / (2.0 * k as f64))
                .cos();
        }
    }
    Dictionary::normalize_columns(m)
}

/// Separable 2D overcomplete DCT: the Kronecker product of two 1D
/// dictionaries. Atom (i, j) is the vectorized outer product of 1D atoms
/// i and j (pixel (p, q) stored at index p * n2 + q). `redundancy` must be
/// a perfect square; each axis gets the square root as its factor.
pub fn gen_odct2d(n1: usize, n2: usize, redundancy: usize) -> Result<Dictionary> {
    let r = (redundancy as f64).sqrt().round() as usize;
    if r == 0 || r * r != redundancy {
        return Err(Error::param(format!(
            "redundancy {redundancy} is not a perfect square; \
             use gen_odct2d_axes for asymmetric factors"
        )));
    }
    gen_odct2d_axes(n1, n1 * r, n2, n2 * r)
}

/// 2D overcomplete DCT with per-axis atom counts k1 and k2.
pub fn gen_odct2d_axes(n1: usize, k1: usize, n2: usize, k2: usize) -> Result<Dictionary> {
    let d1 = gen_odct(n1, k1)?;
    let d2 = gen_odct(n2, k2)?;
    let mut m = Mat::zeros(n1 * n2, k1 * k2);
    for i in 0..k1 {
        let a1 = d1.atom(i);
        for j in 0..k2 {
            let a2 = d2.atom(j);
            let col = m.col_mut(i * k2 + j);
            for p in 0..n1 {
                for q in 0..n2 {
                    col[p * n2 + q] = a1[p] * a2[q];
                }
            }
        }
    }
    Dictionary::normalize_columns(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use itertools::Itertools;
    use rand::Rng;

    fn unit_norms(d: &Dictionary) {
        for j in 0..d.cols() {
            assert_relative_eq!(norm2(d.atom(j)), 1.0, epsilon = NORM_TOL);
        }
    }

    #[test]
    fn normalize_keeps_identity_unchanged() {
        let d = Dictionary::normalize_columns(Mat::identity(2)).unwrap();
        assert_eq!(d.mat().data(), Mat::identity(2).data());
    }

    #[test]
    fn normalize_scales_by_column_norm() {
        let m = Mat::from_col_major(2, 1, vec![3.0, 4.0]);
        let d = Dictionary::normalize_columns(m).unwrap();
        assert_relative_eq!(d.atom(0)[0], 0.6, epsilon = 1e-15);
        assert_relative_eq!(d.atom(0)[1], 0.8, epsilon = 1e-15);
    }

    #[test]
    fn normalize_rejects_zero_column() {
        let m = Mat::from_col_major(2, 2, vec![1.0, 0.0, 0.0, 0.0]);
        match Dictionary::normalize_columns(m) {
            Err(Error::ZeroColumn { index }) => assert_eq!(index, 1),
            other => panic!("expected ZeroColumn error, got {other:?}"),
        }
    }

    #[test]
    fn subset_index_validates() {
        assert!(SubsetIndex::new(vec![]).is_err());
        assert!(SubsetIndex::new(vec![3, 3]).is_err());
        assert!(SubsetIndex::new(vec![5, 2]).is_err());
        let s = SubsetIndex::new(vec![1, 4, 9]).unwrap();
        assert_eq!(s.indices(), &[1, 4, 9]);
        assert!(s.contains(4));
        assert!(!s.contains(3));
    }

    #[test]
    fn subset_index_serde_rejects_bad_input() {
        let ok: SubsetIndex = serde_json::from_str("[0,2,5]").unwrap();
        assert_eq!(ok.indices(), &[0, 2, 5]);
        assert!(serde_json::from_str::<SubsetIndex>("[2,1]").is_err());
        assert!(serde_json::from_str::<SubsetIndex>("[]").is_err());
        assert_eq!(serde_json::to_string(&ok).unwrap(), "[0,2,5]");
    }

    #[test]
    fn gaussian_is_deterministic_and_unit_norm() {
        let a = gen_gaussian(15, 25, 1).unwrap();
        let b = gen_gaussian(15, 25, 1).unwrap();
        assert_eq!(a.mat().data(), b.mat().data());
        assert_eq!((a.rows(), a.cols()), (15, 25));
        unit_norms(&a);
        let c = gen_gaussian(15, 25, 2).unwrap();
        assert_ne!(a.mat().data(), c.mat().data());
    }

    #[test]
    fn odct_square_is_orthonormal() {
        let d = gen_odct(8, 8).unwrap();
        assert!(d.mutual_coherence().unwrap() < 1e-10);
        unit_norms(&d);
    }

    #[test]
    fn odct_gram_matches_direct_cosine_sums() {
        let d = gen_odct(4, 8).unwrap();
        assert_eq!((d.rows(), d.cols()), (4, 8));
        // recompute one Gram entry from the raw cosine columns
        let raw = |k: usize| -> Vec<f64> {
            (0..4)
                .map(|n| {
                    (std::f64::consts::PI * (2.0 * n as f64 + 1.0) * k as f64 / 16.0).cos()
                })
                .collect()
        };
        for i in 0..8 {
            for j in 0..8 {
                let (a, b) = (raw(i), raw(j));
                let expect = dot(&a, &b) / (norm2(&a) * norm2(&b));
                let got = dot(d.atom(i), d.atom(j));
                assert_relative_eq!(got, expect, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn odct_rejects_undercomplete() {
        assert!(gen_odct(8, 4).is_err());
    }

    #[test]
    fn odct2d_dimensions_and_kronecker_structure() {
        let d = gen_odct2d(3, 3, 4).unwrap();
        assert_eq!((d.rows(), d.cols()), (9, 36));
        unit_norms(&d);
        // atom (i, j) must equal the vectorized outer product of 1D atoms
        let d1 = gen_odct(3, 6).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let col = d.atom(i * 6 + j);
                for p in 0..3 {
                    for q in 0..3 {
                        assert_relative_eq!(
                            col[p * 3 + q],
                            d1.atom(i)[p] * d1.atom(j)[q],
                            epsilon = 1e-12
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn odct2d_redundancy_one_is_orthonormal() {
        let d = gen_odct2d(3, 3, 1).unwrap();
        assert_eq!((d.rows(), d.cols()), (9, 9));
        assert!(d.mutual_coherence().unwrap() < 1e-10);
    }

    #[test]
    fn odct2d_rejects_non_square_redundancy() {
        assert!(gen_odct2d(3, 3, 2).is_err());
    }

    #[test]
    fn delta_of_duplicate_pair_is_one() {
        let m = Mat::from_col_major(3, 2, vec![1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let d = Dictionary::normalize_columns(m).unwrap();
        let s = SubsetIndex::new(vec![0, 1]).unwrap();
        assert_relative_eq!(d.restricted_isometry_delta(&s).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn delta_of_orthogonal_pair_is_zero() {
        let d = Dictionary::normalize_columns(Mat::identity(3)).unwrap();
        let s = SubsetIndex::new(vec![0, 2]).unwrap();
        assert_relative_eq!(d.restricted_isometry_delta(&s).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn delta_of_pair_equals_absolute_inner_product() {
        // unit columns with inner product c: Gram eigenvalues are 1 - c, 1 + c
        for &c in &[0.25, 0.7, -0.6] {
            let second = vec![c, (1.0f64 - c * c).sqrt(), 0.0];
            let m = Mat::from_col_major(3, 2, [vec![1.0, 0.0, 0.0], second].concat());
            let d = Dictionary::normalize_columns(m).unwrap();
            let s = SubsetIndex::new(vec![0, 1]).unwrap();
            assert_relative_eq!(
                d.restricted_isometry_delta(&s).unwrap(),
                c.abs(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn delta_rejects_out_of_range_subset() {
        let d = Dictionary::normalize_columns(Mat::identity(3)).unwrap();
        let s = SubsetIndex::new(vec![0, 5]).unwrap();
        assert!(d.restricted_isometry_delta(&s).is_err());
    }

    #[test]
    fn coherence_matches_exhaustive_pair_scan() {
        let d = gen_gaussian(6, 10, 7).unwrap();
        let mut expect = 0.0f64;
        for j in 1..10 {
            for i in 0..j {
                expect = expect.max(dot(d.atom(i), d.atom(j)).abs());
            }
        }
        assert_eq!(d.mutual_coherence().unwrap(), expect);
    }

    #[test]
    fn coherence_degenerate_cases() {
        let d = Dictionary::normalize_columns(Mat::identity(4)).unwrap();
        assert_relative_eq!(d.mutual_coherence().unwrap(), 0.0, epsilon = 1e-15);

        let m = Mat::from_col_major(2, 2, vec![1.0, 0.0, 1.0, 0.0]);
        let dup = Dictionary::normalize_columns(m).unwrap();
        assert_relative_eq!(dup.mutual_coherence().unwrap(), 1.0, epsilon = 1e-12);

        let single = Dictionary::normalize_columns(Mat::from_col_major(2, 1, vec![1.0, 0.0]))
            .unwrap();
        assert!(single.mutual_coherence().is_err());
    }

    #[test]
    fn worst_pair_equals_mutual_coherence() {
        let d = gen_gaussian(8, 12, 3).unwrap();
        let (subset, delta) = d.worst_subdictionary(2).unwrap();
        assert_relative_eq!(delta, d.mutual_coherence().unwrap(), epsilon = 1e-10);
        let idx = subset.indices();
        assert_relative_eq!(
            dot(d.atom(idx[0]), d.atom(idx[1])).abs(),
            delta,
            epsilon = 1e-10
        );
    }

    #[test]
    fn worst_subdictionary_matches_brute_force() {
        let d = gen_gaussian(8, 10, 11).unwrap();
        let (subset, delta) = d.worst_subdictionary(3).unwrap();
        // independent enumeration over all C(10,3) subsets
        let mut best: Option<(f64, Vec<usize>)> = None;
        for combo in (0..10).combinations(3) {
            let s = SubsetIndex::new(combo.clone()).unwrap();
            let del = d.restricted_isometry_delta(&s).unwrap();
            if best.as_ref().is_none_or(|(b, _)| del > *b) {
                best = Some((del, combo));
            }
        }
        let (expect_delta, expect_subset) = best.unwrap();
        assert_eq!(subset.indices(), expect_subset.as_slice());
        assert_eq!(delta, expect_delta);
    }

    #[test]
    fn worst_subdictionary_zero_for_orthonormal() {
        let d = Dictionary::normalize_columns(Mat::identity(5)).unwrap();
        let (_, delta) = d.worst_subdictionary(3).unwrap();
        assert!(delta < 1e-12);
    }

    #[test]
    fn worst_subdictionary_respects_cap() {
        let d = gen_gaussian(10, 15, 5).unwrap();
        match d.worst_subdictionary_with_cap(3, 10) {
            Err(Error::EnumerationCap { required, cap }) => {
                assert_eq!(required, 455);
                assert_eq!(cap, 10);
            }
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn spark_of_duplicated_column_is_two() {
        let m = Mat::from_col_major(3, 3, vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0]);
        let d = Dictionary::normalize_columns(m).unwrap();
        assert_eq!(d.spark_bound(3, 1e-8).unwrap(), SparkBound::Found(2));
    }

    #[test]
    fn spark_of_constructed_dependence_is_three() {
        // d4 = (d1 + d2) normalized: columns {1, 2, 4} are dependent
        let d1 = vec![1.0, 0.0, 0.0];
        let d2 = vec![0.0, 1.0, 0.0];
        let d3 = vec![0.0, 0.0, 1.0];
        let d4 = vec![1.0, 1.0, 0.0];
        let m = Mat::from_col_major(3, 4, [d1, d2, d3, d4].concat());
        let d = Dictionary::normalize_columns(m).unwrap();
        assert_eq!(d.spark_bound(4, 1e-8).unwrap(), SparkBound::Found(3));
    }

    #[test]
    fn spark_not_found_for_orthonormal() {
        let d = Dictionary::normalize_columns(Mat::identity(4)).unwrap();
        assert_eq!(d.spark_bound(4, 1e-8).unwrap(), SparkBound::NotFoundUpTo(4));
    }

    #[test]
    fn delta_monotone_under_subset_nesting() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let d = gen_gaussian(8, 12, 99).unwrap();
        for _ in 0..1000 {
            // sample a size-4 superset, then a size-2 or size-3 subset of it
            let mut all: Vec<usize> = (0..12).collect();
            for i in 0..4 {
                let j = rng.random_range(i..12);
                all.swap(i, j);
            }
            let mut sup: Vec<usize> = all[..4].to_vec();
            sup.sort_unstable();
            let inner_size = rng.random_range(2..=3);
            let mut sub = sup.clone();
            while sub.len() > inner_size {
                let drop = rng.random_range(0..sub.len());
                sub.remove(drop);
            }
            let d_sup = d
                .restricted_isometry_delta(&SubsetIndex::new(sup).unwrap())
                .unwrap();
            let d_sub = d
                .restricted_isometry_delta(&SubsetIndex::new(sub).unwrap())
                .unwrap();
            assert!(
                d_sub <= d_sup + 1e-12,
                "nested subset delta {d_sub} exceeds superset delta {d_sup}"
            );
        }
    }

    #[test]
    fn delta_invariant_under_column_permutation() {
        let d = gen_gaussian(6, 9, 17).unwrap();
        // swap columns 2 and 7, remap the subset accordingly
        let mut m = d.mat().clone();
        for i in 0..6 {
            let t = m[(i, 2)];
            m[(i, 2)] = m[(i, 7)];
            m[(i, 7)] = t;
        }
        let p = Dictionary::normalize_columns(m).unwrap();
        let orig = SubsetIndex::new(vec![1, 2, 5]).unwrap();
        let mapped = SubsetIndex::new(vec![1, 5, 7]).unwrap();
        assert_relative_eq!(
            d.restricted_isometry_delta(&orig).unwrap(),
            p.restricted_isometry_delta(&mapped).unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn save_load_round_trips_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("dict.txt");
        let d = gen_gaussian(5, 8, 123).unwrap();
        d.save(&path).unwrap();
        let loaded = Dictionary::load(&path, false).unwrap();
        assert_eq!(d.mat().data(), loaded.mat().data());
        let renormalized = Dictionary::load(&path, true).unwrap();
        for (a, b) in d.mat().data().iter().zip(renormalized.mat().data()) {
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn load_reports_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.txt");
        std::fs::write(&path, "2 2\n1.0 0.0\n0.0 oops\n").unwrap();
        match Dictionary::load(&path, true) {
            Err(Error::ParseFile { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn load_without_normalize_rejects_scaled_columns() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scaled.txt");
        std::fs::write(&path, "2 2\n2.0 0.0\n0.0 1.0\n").unwrap();
        assert!(Dictionary::load(&path, false).is_err());
        assert!(Dictionary::load(&path, true).is_ok());
    }

    #[test]
    fn conditioning_report_is_self_consistent() {
        let d = gen_gaussian(6, 10, 31).unwrap();
        let r = d.conditioning_report(2, 4, 1e-8).unwrap();
        assert_relative_eq!(r.mutual_coherence, r.worst_delta, epsilon = 1e-10);
        assert_relative_eq!(
            d.restricted_isometry_delta(&r.worst_subset).unwrap(),
            r.worst_delta,
            epsilon = 1e-12
        );
        assert_eq!(r.spark_bound, SparkBound::NotFoundUpTo(4));
    }
}
