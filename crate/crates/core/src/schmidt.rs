//! Schmidt vectors, majorization and dimension embedding.
//!
//! A [`SchmidtVector`] is the LU class of a bipartite pure state: a probability
//! vector stored in non-increasing order. Its length is part of its identity,
//! so `(0.5, 0.5)` and `(0.5, 0.5, 0)` are distinct values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::EPS_NORM;

/// Sorted probability vector `λ↓` of length `d ≥ 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SchmidtVector {
    components: Vec<f64>,
}

impl SchmidtVector {
    /// Normalizes and sorts `raw` into canonical form.
    ///
    /// Entries in `[-ε_norm, 0)` are clamped to zero.
    pub fn canonicalize(raw: &[f64]) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut v = Vec::with_capacity(raw.len());
        for (index, &x) in raw.iter().enumerate() {
            if !x.is_finite() {
                return Err(Error::NonFinite { index });
            }
            if x < -EPS_NORM {
                return Err(Error::NegativeComponent { index, value: x });
            }
            v.push(x.max(0.0));
        }
        let sum: f64 = v.iter().sum();
        if sum <= 0.0 {
            return Err(Error::ZeroSum);
        }
        for x in &mut v {
            *x /= sum;
        }
        v.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { components: v })
    }

    /// `(1, 0, …, 0)` of length `d`.
    pub fn separable(d: usize) -> Self {
        assert!(d >= 1, "dimension must be positive");
        let mut components = vec![0.0; d];
        components[0] = 1.0;
        Self { components }
    }

    /// `(1/d, …, 1/d)`.
    pub fn max_entangled(d: usize) -> Self {
        assert!(d >= 1, "dimension must be positive");
        Self {
            components: vec![1.0 / d as f64; d],
        }
    }

    /// Declared dimension `d`.
    pub fn dim(&self) -> usize {
        self.components.len()
    }

    /// Components in non-increasing order.
    pub fn as_slice(&self) -> &[f64] {
        &self.components
    }

    /// Largest component `λ_1`.
    pub fn largest(&self) -> f64 {
        self.components[0]
    }

    /// `E_k(λ) = Σ_{i ≤ k} λ_i` for `1 ≤ k ≤ d`.
    pub fn partial_sum(&self, k: usize) -> Result<f64> {
        let d = self.dim();
        if k == 0 || k > d {
            return Err(Error::IndexOutOfRange { k, d });
        }
        Ok(self.components[..k].iter().sum())
    }

    /// All partial sums `E_1 … E_d`.
    pub fn partial_sums(&self) -> Vec<f64> {
        self.components
            .iter()
            .scan(0.0, |acc, &x| {
                *acc += x;
                Some(*acc)
            })
            .collect()
    }

    /// Pads with zeros up to dimension `k`.
    pub fn embed(&self, k: usize) -> Result<Self> {
        let d = self.dim();
        if k < d {
            return Err(Error::ShrinkNotAllowed { from: d, to: k });
        }
        let mut components = self.components.clone();
        components.resize(k, 0.0);
        Ok(Self { components })
    }

    /// `true` when some component is repeated (within `ε_norm`).
    pub fn is_degenerate(&self) -> bool {
        self.components.windows(2).any(|w| (w[0] - w[1]).abs() <= EPS_NORM)
    }
}

impl TryFrom<Vec<f64>> for SchmidtVector {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::canonicalize(&v)
    }
}

impl From<SchmidtVector> for Vec<f64> {
    fn from(s: SchmidtVector) -> Self {
        s.components
    }
}

impl std::str::FromStr for SchmidtVector {
    type Err = Error;
    /// Parses a comma-separated list such as `0.4,0.3,0.2,0.1`.
    fn from_str(s: &str) -> Result<Self> {
        let raw = s
            .split(',')
            .map(|t| t.trim())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<f64>().map_err(|_| Error::InvalidArgument(format!("not a number: {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::canonicalize(&raw)
    }
}

/// `true` iff `b ≺ a`, i.e. `E_k(b) ≤ E_k(a)` for all `k < d`.
///
/// By Nielsen's criterion this is exactly when a state with Schmidt vector `b`
/// can be converted to one with Schmidt vector `a` by LOCC.
pub fn majorizes(a: &SchmidtVector, b: &SchmidtVector) -> Result<bool> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let mut ea = 0.0;
    let mut eb = 0.0;
    for k in 0..a.dim().saturating_sub(1) {
        ea += a.components[k];
        eb += b.components[k];
        if eb > ea + EPS_NORM {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Slice version of [`majorizes`] for sorted inputs of equal length.
pub(crate) fn majorizes_sorted(a: &[f64], b: &[f64]) -> bool {
    let mut ea = 0.0;
    let mut eb = 0.0;
    for k in 0..a.len().saturating_sub(1) {
        ea += a[k];
        eb += b[k];
        if eb > ea + EPS_NORM {
            return false;
        }
    }
    true
}

/// LU equivalence: same dimension and equal components within `ε_norm`.
pub fn lu_equivalent(a: &SchmidtVector, b: &SchmidtVector) -> bool {
    a.dim() == b.dim() && a.components.iter().zip(&b.components).all(|(x, y)| (x - y).abs() <= EPS_NORM)
}

/// A permutation of `{0, …, d−1}` stored as its image list `σ(0..d)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    /// Validates that `images` is a bijection on `0..len`.
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let d = images.len();
        let mut seen = vec![false; d];
        for &i in &images {
            if i >= d || seen[i] {
                return Err(Error::InvalidArgument(format!("not a permutation: {images:?}")));
            }
            seen[i] = true;
        }
        Ok(Self { images })
    }

    /// Identity on `d` points.
    pub fn identity(d: usize) -> Self {
        Self { images: (0..d).collect() }
    }

    /// Images `σ(0), …, σ(d−1)`.
    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// `(P_σ x)_{σ(i)} = x_i`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.images.len(), "length mismatch");
        let mut out = vec![0.0; x.len()];
        for (i, &s) in self.images.iter().enumerate() {
            out[s] = x[i];
        }
        out
    }

    /// `σ⁻¹`.
    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.images.len()];
        for (i, &s) in self.images.iter().enumerate() {
            inv[s] = i;
        }
        Self { images: inv }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(x: &[f64]) -> SchmidtVector {
        SchmidtVector::canonicalize(x).unwrap()
    }

    #[test]
    fn canonicalize_examples() {
        assert_eq!(sv(&[0.4, 0.6]).as_slice(), &[0.6, 0.4]);
        assert_eq!(sv(&[1.0, 0.0, 0.0]).as_slice(), &[1.0, 0.0, 0.0]);
        assert_eq!(sv(&[2.0, 1.0, 1.0]).as_slice(), &[0.5, 0.25, 0.25]);
        assert_eq!(sv(&[0.5, -1e-13, 0.5]).as_slice(), &[0.5, 0.5, 0.0]);
    }

    #[test]
    fn canonicalize_errors() {
        assert_eq!(SchmidtVector::canonicalize(&[]), Err(Error::EmptyInput));
        assert!(matches!(
            SchmidtVector::canonicalize(&[0.5, -0.1]),
            Err(Error::NegativeComponent { index: 1, .. })
        ));
        assert_eq!(SchmidtVector::canonicalize(&[0.0, 0.0]), Err(Error::ZeroSum));
    }

    #[test]
    fn partial_sums() {
        assert_eq!(sv(&[0.6, 0.4]).partial_sum(1).unwrap(), 0.6);
        assert_eq!(sv(&[0.5, 0.25, 0.25]).partial_sum(2).unwrap(), 0.75);
        assert!((sv(&[0.3, 0.2, 0.5]).partial_sum(3).unwrap() - 1.0).abs() < EPS_NORM);
        assert_eq!(sv(&[1.0]).partial_sum(2), Err(Error::IndexOutOfRange { k: 2, d: 1 }));
    }

    #[test]
    fn majorization_examples() {
        assert!(majorizes(&sv(&[0.6, 0.4]), &sv(&[0.5, 0.5])).unwrap());
        assert!(!majorizes(&sv(&[0.5, 0.5]), &sv(&[0.6, 0.4])).unwrap());
        assert!(majorizes(&sv(&[0.5, 0.4, 0.1]), &sv(&[0.45, 0.45, 0.1])).unwrap());
        assert!(matches!(
            majorizes(&sv(&[1.0]), &sv(&[0.5, 0.5])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn lu_equivalence_respects_dimension() {
        assert!(lu_equivalent(&sv(&[0.6, 0.4]), &sv(&[0.4, 0.6])));
        assert!(!lu_equivalent(&sv(&[0.6, 0.4]), &sv(&[0.7, 0.3])));
        assert!(!lu_equivalent(&sv(&[0.5, 0.5, 0.0]), &sv(&[0.5, 0.5])));
    }

    #[test]
    fn embed_examples() {
        assert_eq!(sv(&[0.6, 0.4]).embed(3).unwrap().as_slice(), &[0.6, 0.4, 0.0]);
        assert_eq!(sv(&[1.0]).embed(2).unwrap().as_slice(), &[1.0, 0.0]);
        assert_eq!(sv(&[0.5, 0.5]).embed(2).unwrap(), sv(&[0.5, 0.5]));
        assert_eq!(sv(&[0.5, 0.5]).embed(1), Err(Error::ShrinkNotAllowed { from: 2, to: 1 }));
    }

    #[test]
    fn parse_and_serde() {
        let s: SchmidtVector = "0.1, 0.4,0.3,0.2".parse().unwrap();
        assert_eq!(s.as_slice(), &[0.4, 0.3, 0.2, 0.1]);
        assert!("0.1,x".parse::<SchmidtVector>().is_err());
    }

    #[test]
    fn permutation_roundtrip() {
        let p = Permutation::new(vec![2, 0, 1]).unwrap();
        let x = [1.0, 2.0, 3.0];
        assert_eq!(p.inverse().apply(&p.apply(&x)), x.to_vec());
        assert!(Permutation::new(vec![0, 0]).is_err());
    }
}
