//! Convex-polytope engine.
//!
//! Polytopes are given either as a [`HalfspaceSystem`] `{x : A·x + b ≥ 0}` or as
//! a [`VertexSet`]. Vertices are enumerated by exhaustive k-subset
//! intersection, volumes come from a recursive fan triangulation or, for simple
//! polytopes, from Brion's vertex formula. All geometric comparisons use
//! [`crate::EPS_GEOM`].

mod brion;
mod enumerate;
mod volume;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::EPS_GEOM;

pub use brion::{brion_data, brion_volume, brion_volume_with_xi, BrionVertexData};
pub(crate) use enumerate::dedup_points;
pub use enumerate::{enumerate_vertices, is_simple, vertex_adjacency, Adjacency};
pub use volume::{hull_hrep, triangulate, volume_triangulation, VolumeReport};

/// Singular values above this count toward the affine-hull dimension.
pub const RANK_TOL: f64 = 1e-9;

/// H-representation `{x ∈ R^k : A·x + b ≥ 0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HalfspaceRepr", into = "HalfspaceRepr")]
pub struct HalfspaceSystem {
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    k: usize,
}

#[derive(Serialize, Deserialize)]
struct HalfspaceRepr {
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
}

impl TryFrom<HalfspaceRepr> for HalfspaceSystem {
    type Error = Error;
    fn try_from(r: HalfspaceRepr) -> Result<Self> {
        Self::new(r.a, r.b)
    }
}

impl From<HalfspaceSystem> for HalfspaceRepr {
    fn from(h: HalfspaceSystem) -> Self {
        Self { a: h.a, b: h.b }
    }
}

impl HalfspaceSystem {
    /// Builds a system from its rows; every row of `a` must have the same length.
    pub fn new(a: Vec<Vec<f64>>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::InconsistentInput(format!(
                "{} rows in A but {} entries in b",
                a.len(),
                b.len()
            )));
        }
        let k = a.first().map_or(0, Vec::len);
        if a.iter().any(|r| r.len() != k) {
            return Err(Error::InconsistentInput("rows of A have different lengths".into()));
        }
        if a.iter().flatten().chain(&b).any(|x| !x.is_finite()) {
            return Err(Error::InconsistentInput("non-finite coefficient".into()));
        }
        Ok(Self { a, b, k })
    }

    /// Builds a system with `k` variables, allowing zero rows.
    pub(crate) fn with_dim(a: Vec<Vec<f64>>, b: Vec<f64>, k: usize) -> Self {
        debug_assert!(a.iter().all(|r| r.len() == k));
        Self { a, b, k }
    }

    /// Number of variables `k`.
    pub fn dim(&self) -> usize {
        self.k
    }

    /// Number of inequalities `m`.
    pub fn rows(&self) -> usize {
        self.b.len()
    }

    /// Coefficient rows of `A`.
    pub fn a(&self) -> &[Vec<f64>] {
        &self.a
    }

    /// Offsets `b`.
    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// Value `A_i·x + b_i` of row `i`, divided by `|A_i|` (a signed distance).
    pub fn slack(&self, i: usize, x: &[f64]) -> f64 {
        let row = &self.a[i];
        let norm = norm(row);
        let v = dot(row, x) + self.b[i];
        if norm > 0.0 {
            v / norm
        } else {
            v
        }
    }

    /// `true` when `x` satisfies every row within `ε_geom`.
    pub fn contains(&self, x: &[f64]) -> bool {
        (0..self.rows()).all(|i| self.slack(i, x) >= -EPS_GEOM)
    }

    /// Indices of rows satisfied with equality (within `ε_geom`) at `x`.
    pub fn tight_set(&self, x: &[f64]) -> Vec<usize> {
        (0..self.rows()).filter(|&i| self.slack(i, x).abs() <= EPS_GEOM).collect()
    }
}

/// V-representation with the tight rows of the generating H-representation.
///
/// `tight_sets` may be empty for a bare point cloud; volume routines then
/// compute the hull facets themselves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexSet {
    pub vertices: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tight_sets: Vec<Vec<usize>>,
}

impl VertexSet {
    /// Point cloud without facet information.
    pub fn from_points(vertices: Vec<Vec<f64>>) -> Self {
        Self {
            vertices,
            tight_sets: Vec::new(),
        }
    }

    /// Number of vertices.
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    /// `true` when there are no vertices.
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Ambient dimension (0 when empty).
    pub fn ambient_dim(&self) -> usize {
        self.vertices.first().map_or(0, Vec::len)
    }

    /// Dimension of the affine hull.
    pub fn affine_dim(&self) -> usize {
        AffineFrame::of(&self.vertices).dim()
    }

    /// Index of the vertex within `ε_geom` of `x`, if any.
    pub fn find(&self, x: &[f64]) -> Option<usize> {
        self.vertices.iter().position(|v| dist(v, x) <= EPS_GEOM)
    }
}

/// Volume convention: measured inside the hyperplane `Σx = 1` of R^d, or after
/// dropping the last coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    Intrinsic,
    Projected,
}

/// Frame of a volume living in the probability hyperplane of R^d.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingFrame {
    pub ambient_dim: usize,
    pub convention: Convention,
}

impl EmbeddingFrame {
    /// Jacobian `√d` between intrinsic and projected volumes.
    pub fn scale(&self) -> f64 {
        (self.ambient_dim as f64).sqrt()
    }
}

/// Converts a volume between conventions: intrinsic = √d × projected.
pub fn convert_frame(volume: f64, frame: EmbeddingFrame, target: Convention) -> f64 {
    match (frame.convention, target) {
        (Convention::Projected, Convention::Intrinsic) => volume * frame.scale(),
        (Convention::Intrinsic, Convention::Projected) => volume / frame.scale(),
        _ => volume,
    }
}

/// Orthonormal frame of the affine hull of a point set.
#[derive(Debug, Clone)]
pub(crate) struct AffineFrame {
    pub origin: Vec<f64>,
    /// Orthonormal basis vectors of the direction space.
    pub basis: Vec<Vec<f64>>,
}

impl AffineFrame {
    /// Frame through the centroid, spanned by singular directions above [`RANK_TOL`].
    pub fn of(points: &[Vec<f64>]) -> Self {
        let n = points.first().map_or(0, Vec::len);
        let origin = centroid(points);
        if points.len() < 2 || n == 0 {
            return Self { origin, basis: Vec::new() };
        }
        let m = DMatrix::from_fn(points.len(), n, |i, j| points[i][j] - origin[j]);
        let svd = m.svd(false, true);
        let v_t = svd.v_t.expect("requested V^T");
        let basis = svd
            .singular_values
            .iter()
            .enumerate()
            .filter(|(_, &s)| s > RANK_TOL)
            .map(|(i, _)| v_t.row(i).iter().copied().collect())
            .collect();
        Self { origin, basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of `x` in the frame.
    pub fn coords(&self, x: &[f64]) -> Vec<f64> {
        let shifted: Vec<f64> = x.iter().zip(&self.origin).map(|(a, b)| a - b).collect();
        self.basis.iter().map(|u| dot(u, &shifted)).collect()
    }

    /// Maps an ambient direction into frame coordinates.
    pub fn project_direction(&self, v: &[f64]) -> Vec<f64> {
        self.basis.iter().map(|u| dot(u, v)).collect()
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn centroid(points: &[Vec<f64>]) -> Vec<f64> {
    let n = points.first().map_or(0, Vec::len);
    let mut c = vec![0.0; n];
    for p in points {
        for (ci, pi) in c.iter_mut().zip(p) {
            *ci += pi;
        }
    }
    let inv = 1.0 / points.len().max(1) as f64;
    c.iter_mut().for_each(|x| *x *= inv);
    c
}

/// Numerical rank of a set of row vectors.
pub(crate) fn rank(rows: &[&[f64]]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let n = rows[0].len();
    if n == 0 {
        return 0;
    }
    let m = DMatrix::from_fn(rows.len(), n, |i, j| rows[i][j]);
    m.singular_values().iter().filter(|&&s| s > RANK_TOL).count()
}

/// Unit vector spanning the null space of `rows` when their rank is `n − 1`.
pub(crate) fn null_vector(rows: &[&[f64]], n: usize) -> Option<Vec<f64>> {
    if n == 0 {
        return None;
    }
    // Pad to at least n rows so the SVD returns a full right basis.
    let m = rows.len().max(n);
    let a = DMatrix::from_fn(m, n, |i, j| rows.get(i).map_or(0.0, |r| r[j]));
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let s = &svd.singular_values;
    if s.iter().filter(|&&x| x > RANK_TOL).count() != n - 1 {
        return None;
    }
    let idx = (0..s.len()).min_by(|&i, &j| s[i].total_cmp(&s[j])).expect("n > 0");
    Some(v_t.row(idx).iter().copied().collect())
}

/// `|det|` of the square matrix whose columns are `cols`.
pub(crate) fn abs_det(cols: &[Vec<f64>]) -> f64 {
    let k = cols.len();
    DMatrix::from_fn(k, k, |i, j| cols[j][i]).determinant().abs()
}

/// Neumaier-compensated sum.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: CompensatedSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}
