//! Vertex enumeration and vertex adjacency.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::{dist, null_vector, rank, AffineFrame, HalfspaceSystem, VertexSet};
use crate::error::{Error, Result};
use crate::EPS_GEOM;

/// Neighbor lists, indexed like the vertex set.
pub type Adjacency = Vec<Vec<usize>>;

/// Pivot threshold for treating a normalized k×k subsystem as singular.
const SINGULAR_DET: f64 = 1e-12;

/// Half-width of the box used to tell unbounded from infeasible systems.
const PROBE_RADIUS: f64 = 1e6;

/// Enumerates all vertices of `{x : A·x + b ≥ 0}`.
///
/// Every k-subset of rows with a non-singular system is solved; feasible
/// solutions are merged within `ε_geom` and annotated with their full tight
/// sets. Cost is `O(C(m, k)·k³)`.
pub fn enumerate_vertices(h: &HalfspaceSystem) -> Result<VertexSet> {
    let k = h.dim();
    if k == 0 {
        return if h.b().iter().all(|&b| b >= -EPS_GEOM) {
            Ok(VertexSet {
                vertices: vec![vec![]],
                tight_sets: vec![h.tight_set(&[])],
            })
        } else {
            Err(Error::Infeasible)
        };
    }
    let vertices = candidate_vertices(h);
    if vertices.is_empty() {
        return Err(if feasible_in_box(h) { Error::Unbounded } else { Error::Infeasible });
    }
    if has_recession_ray(h) {
        return Err(Error::Unbounded);
    }
    let tight_sets = vertices.iter().map(|v| h.tight_set(v)).collect();
    Ok(VertexSet { vertices, tight_sets })
}

fn candidate_vertices(h: &HalfspaceSystem) -> Vec<Vec<f64>> {
    let k = h.dim();
    let m = h.rows();
    if m < k {
        return Vec::new();
    }
    let rows: Vec<(Vec<f64>, f64)> = (0..m)
        .map(|i| {
            let n = super::norm(&h.a()[i]);
            if n > 0.0 {
                (h.a()[i].iter().map(|x| x / n).collect(), h.b()[i] / n)
            } else {
                (h.a()[i].clone(), h.b()[i])
            }
        })
        .collect();
    let mut found: Vec<Vec<f64>> = (0..m)
        .into_par_iter()
        .flat_map_iter(|first| {
            let rows = &rows;
            (first + 1..m).combinations(k - 1).filter_map(move |rest| {
                let subset: Vec<usize> = std::iter::once(first).chain(rest).collect();
                let a = DMatrix::from_fn(k, k, |i, j| rows[subset[i]].0[j]);
                let b = DVector::from_fn(k, |i, _| -rows[subset[i]].1);
                let lu = a.lu();
                if lu.determinant().abs() <= SINGULAR_DET {
                    return None;
                }
                let x: Vec<f64> = lu.solve(&b)?.iter().copied().collect();
                h.contains(&x).then_some(x)
            })
        })
        .collect();
    dedup_points(&mut found);
    found
}

/// Removes points within `ε_geom` of an earlier one; output is sorted.
pub(crate) fn dedup_points(points: &mut Vec<Vec<f64>>) {
    points.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut kept: Vec<Vec<f64>> = Vec::with_capacity(points.len());
    for p in points.drain(..) {
        // Sorted by the first coordinate, so only a trailing window can match.
        let dup = kept
            .iter()
            .rev()
            .take_while(|q| p.first().zip(q.first()).is_none_or(|(a, b)| a - b <= EPS_GEOM))
            .any(|q| dist(q, &p) <= EPS_GEOM);
        if !dup {
            kept.push(p);
        }
    }
    *points = kept;
}

fn feasible_in_box(h: &HalfspaceSystem) -> bool {
    let k = h.dim();
    let mut a = h.a().to_vec();
    let mut b = h.b().to_vec();
    for i in 0..k {
        for s in [1.0, -1.0] {
            let mut row = vec![0.0; k];
            row[i] = s;
            a.push(row);
            b.push(PROBE_RADIUS);
        }
    }
    !candidate_vertices(&HalfspaceSystem::with_dim(a, b, k)).is_empty()
}

/// A pointed polyhedron is unbounded iff an extreme ray `r ≠ 0` with
/// `A·r ≥ 0` exists; extreme rays are cut out by k−1 independent rows.
fn has_recession_ray(h: &HalfspaceSystem) -> bool {
    let k = h.dim();
    let a = h.a();
    let is_ray = |r: &[f64]| a.iter().all(|row| super::dot(row, r) >= -EPS_GEOM * super::norm(row));
    if k == 1 {
        return is_ray(&[1.0]) || is_ray(&[-1.0]);
    }
    (0..h.rows()).combinations(k - 1).par_bridge().any(|subset| {
        let rows: Vec<&[f64]> = subset.iter().map(|&i| a[i].as_slice()).collect();
        match null_vector(&rows, k) {
            Some(r) => {
                let neg: Vec<f64> = r.iter().map(|x| -x).collect();
                is_ray(&r) || is_ray(&neg)
            }
            None => false,
        }
    })
}

/// Vertices `u, v` are adjacent iff their common tight rows have rank `k − 1`,
/// where `k` is the dimension of the polytope.
pub fn vertex_adjacency(h: &HalfspaceSystem, vs: &VertexSet) -> Result<Adjacency> {
    if vs.tight_sets.len() != vs.len() {
        return Err(Error::InconsistentInput("vertex set carries no tight sets".into()));
    }
    for (i, v) in vs.vertices.iter().enumerate() {
        if v.len() != h.dim() || !h.contains(v) || h.tight_set(v) != vs.tight_sets[i] {
            return Err(Error::InconsistentInput(format!("vertex {i} does not match the halfspace system")));
        }
    }
    let n = vs.len();
    let dim = AffineFrame::of(&vs.vertices).dim();
    if dim == 0 {
        return Ok(vec![Vec::new(); n]);
    }
    // Implicit equalities contribute rank k − dim, the edge itself dim − 1.
    let target = h.dim() - 1;
    let pairs: Vec<(usize, usize)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            (i + 1..n).filter_map(move |j| {
                let shared: Vec<&[f64]> = vs.tight_sets[i]
                    .iter()
                    .filter(|r| vs.tight_sets[j].binary_search(r).is_ok())
                    .map(|&r| h.a()[r].as_slice())
                    .collect();
                (shared.len() >= target && rank(&shared) == target).then_some((i, j))
            })
        })
        .collect();
    let mut adj = vec![Vec::new(); n];
    for (i, j) in pairs {
        adj[i].push(j);
        adj[j].push(i);
    }
    Ok(adj)
}

/// A polytope of dimension `k` is simple iff every vertex has exactly `k` neighbors.
pub fn is_simple(vs: &VertexSet, adjacency: &Adjacency) -> bool {
    let k = vs.affine_dim();
    adjacency.iter().all(|n| n.len() == k)
}
