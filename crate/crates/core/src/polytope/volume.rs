//! Triangulation volume and convex-hull facets.

use std::collections::HashSet;

use itertools::Itertools;
use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use super::{centroid, dist, dot, null_vector, AffineFrame, HalfspaceSystem, VertexSet};
use crate::error::{Error, Result};
use crate::EPS_GEOM;

/// Volume of a polytope in the dimension of its own affine hull.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VolumeReport {
    pub volume: f64,
    /// Affine-hull dimension; 0 flags a single point (volume 0).
    pub dimension: usize,
}

/// Lebesgue volume of `conv(V)` in its affine hull.
///
/// Facets come from the tight sets (computed with [`hull_hrep`] when absent);
/// the boundary is fan-triangulated recursively from face centroids and the
/// simplex volumes `√det(Gram)/j!` are summed.
pub fn volume_triangulation(vs: &VertexSet) -> Result<VolumeReport> {
    let simplices = triangulate(vs)?;
    let dimension = vs.affine_dim();
    if dimension == 0 {
        return Ok(VolumeReport { volume: 0.0, dimension });
    }
    let volume = simplices.iter().map(|s| simplex_volume(s)).sum();
    Ok(VolumeReport { volume, dimension })
}

/// Triangulates `conv(V)` into simplices with disjoint interiors.
///
/// Each simplex is returned as its `j + 1` corner points in ambient
/// coordinates, `j` being the affine-hull dimension.
pub fn triangulate(vs: &VertexSet) -> Result<Vec<Vec<Vec<f64>>>> {
    if vs.is_empty() {
        return Err(Error::InconsistentInput("empty vertex set".into()));
    }
    let owned;
    let tight = if vs.tight_sets.len() == vs.len() {
        &vs.tight_sets
    } else {
        let h = hull_hrep(&vs.vertices)?;
        owned = vs.vertices.iter().map(|v| h.tight_set(v)).collect::<Vec<_>>();
        &owned
    };
    let all: Vec<usize> = (0..vs.len()).collect();
    let dim = AffineFrame::of(&vs.vertices).dim();
    let mut out = Vec::new();
    fan(&vs.vertices, tight, &all, dim, &mut Vec::new(), &mut out);
    Ok(out)
}

/// Appends the simplices of face `face` (dimension `dim`) coned with `apexes`.
fn fan(points: &[Vec<f64>], tight: &[Vec<usize>], face: &[usize], dim: usize, apexes: &mut Vec<Vec<f64>>, out: &mut Vec<Vec<Vec<f64>>>) {
    match dim {
        0 => {
            let mut s = vec![points[face[0]].clone()];
            s.extend(apexes.iter().cloned());
            out.push(s);
        }
        1 => {
            let (a, b) = extreme_pair(points, face);
            let mut s = vec![points[a].clone(), points[b].clone()];
            s.extend(apexes.iter().cloned());
            out.push(s);
        }
        _ => {
            let face_points: Vec<Vec<f64>> = face.iter().map(|&i| points[i].clone()).collect();
            apexes.push(centroid(&face_points));
            for facet in facets_of(points, tight, face, dim) {
                fan(points, tight, &facet, dim - 1, apexes, out);
            }
            apexes.pop();
        }
    }
}

/// Sub-faces of `face` of dimension `dim − 1`, read off the tight rows.
fn facets_of(points: &[Vec<f64>], tight: &[Vec<usize>], face: &[usize], dim: usize) -> Vec<Vec<usize>> {
    let rows: Vec<usize> = face.iter().flat_map(|&v| tight[v].iter().copied()).sorted().dedup().collect();
    let mut seen = HashSet::new();
    let mut facets = Vec::new();
    for r in rows {
        let sub: Vec<usize> = face.iter().copied().filter(|&v| tight[v].binary_search(&r).is_ok()).collect();
        if sub.len() < dim || sub.len() == face.len() || !seen.insert(sub.clone()) {
            continue;
        }
        let sub_points: Vec<Vec<f64>> = sub.iter().map(|&i| points[i].clone()).collect();
        if AffineFrame::of(&sub_points).dim() == dim - 1 {
            facets.push(sub);
        }
    }
    facets
}

fn extreme_pair(points: &[Vec<f64>], face: &[usize]) -> (usize, usize) {
    let far = |from: usize| {
        *face
            .iter()
            .max_by(|&&i, &&j| dist(&points[from], &points[i]).total_cmp(&dist(&points[from], &points[j])))
            .expect("non-empty face")
    };
    let a = far(face[0]);
    (a, far(a))
}

/// `j`-volume of a simplex with `j + 1` corners in any ambient dimension.
fn simplex_volume(corners: &[Vec<f64>]) -> f64 {
    let j = corners.len() - 1;
    let edges: Vec<Vec<f64>> = corners[1..].iter().map(|c| super::sub(c, &corners[0])).collect();
    let gram = DMatrix::from_fn(j, j, |a, b| dot(&edges[a], &edges[b]));
    let factorial: f64 = (1..=j).map(|x| x as f64).product();
    gram.determinant().max(0.0).sqrt() / factorial
}

/// Facet H-representation of `conv(points)` in ambient coordinates.
///
/// If the hull is lower-dimensional, each missing direction `q` contributes the
/// pair `±q·(x − c) ≥ 0`. Facets are found by testing every j-subset of points,
/// so cost grows as `C(n, j)`; intended for modest point clouds.
pub fn hull_hrep(points: &[Vec<f64>]) -> Result<HalfspaceSystem> {
    let n = points.first().map_or(0, Vec::len);
    if points.is_empty() || points.iter().any(|p| p.len() != n) {
        return Err(Error::InconsistentInput("points must be non-empty and equal-length".into()));
    }
    let frame = AffineFrame::of(points);
    let j = frame.dim();
    let mut a: Vec<Vec<f64>> = Vec::new();
    let mut b: Vec<f64> = Vec::new();
    for q in complement_basis(&frame.basis, n) {
        let off = dot(&q, &frame.origin);
        a.push(q.clone());
        b.push(-off);
        a.push(q.iter().map(|x| -x).collect());
        b.push(off);
    }
    if j == 0 {
        return Ok(HalfspaceSystem::with_dim(a, b, n));
    }
    let y: Vec<Vec<f64>> = points.iter().map(|p| frame.coords(p)).collect();
    let mut facets: Vec<(Vec<f64>, f64)> = Vec::new();
    for subset in (0..y.len()).combinations(j) {
        let diffs: Vec<Vec<f64>> = subset[1..].iter().map(|&i| super::sub(&y[i], &y[subset[0]])).collect();
        let rows: Vec<&[f64]> = diffs.iter().map(Vec::as_slice).collect();
        let normal = if j == 1 { Some(vec![1.0]) } else { null_vector(&rows, j) };
        let Some(mut normal) = normal else { continue };
        let mut off = dot(&normal, &y[subset[0]]);
        let side: Vec<f64> = y.iter().map(|p| dot(&normal, p) - off).collect();
        if side.iter().all(|&s| s <= EPS_GEOM) {
            normal.iter_mut().for_each(|x| *x = -*x);
            off = -off;
        } else if !side.iter().all(|&s| s >= -EPS_GEOM) {
            continue;
        }
        if facets
            .iter()
            .any(|(m, o)| dist(m, &normal) <= EPS_GEOM && (o - off).abs() <= EPS_GEOM)
        {
            continue;
        }
        facets.push((normal, off));
    }
    for (normal, off) in facets {
        // n·(Uᵀ(x − c)) − off ≥ 0 in ambient coordinates.
        let row: Vec<f64> = (0..n)
            .map(|i| frame.basis.iter().zip(&normal).map(|(u, w)| u[i] * w).sum())
            .collect();
        b.push(-dot(&row, &frame.origin) - off);
        a.push(row);
    }
    Ok(HalfspaceSystem::with_dim(a, b, n))
}

/// Orthonormal basis of the orthogonal complement of `basis` in R^n.
fn complement_basis(basis: &[Vec<f64>], n: usize) -> Vec<Vec<f64>> {
    if basis.len() == n {
        return Vec::new();
    }
    let p = DMatrix::from_fn(n, n, |i, k| {
        let id = if i == k { 1.0 } else { 0.0 };
        id - basis.iter().map(|u| u[i] * u[k]).sum::<f64>()
    });
    let eig = SymmetricEigen::new(p);
    (0..n)
        .filter(|&i| eig.eigenvalues[i] > 0.5)
        .map(|i| eig.eigenvectors.column(i).iter().copied().collect())
        .collect()
}
