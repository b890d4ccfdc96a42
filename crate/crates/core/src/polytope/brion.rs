//! Brion's vertex formula for the volume of a simple polytope.
//!
//! With edge vectors `e_i(v) = v − v_i` pointing from each neighbor to the
//! vertex, the volume of a simple k-polytope is
//! `(1/k!) Σ_v |det m_v| ⟨v, ξ⟩^k / Π_i ⟨e_i(v), ξ⟩` for any `ξ` with no
//! `⟨e_i(v), ξ⟩` vanishing. Polytopes living in a proper affine subspace (such
//! as the hyperplane `Σx = 1`) are first expressed in an orthonormal frame of
//! that subspace, which is equivalent to bordering the edge matrix with the
//! unit normals.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::{abs_det, dot, norm, sub, AffineFrame, CompensatedSum, VertexSet};
use crate::error::{Error, Result};
use crate::polytope::Adjacency;
use crate::EPS_GEOM;

/// Seed of the direction sequence, fixed so runs are reproducible.
const XI_SEED: u64 = 0x5eed_b710;

/// Directions tried before giving up.
const XI_ATTEMPTS: usize = 64;

/// One vertex with the data entering Brion's formula, in frame coordinates.
#[derive(Debug, Clone)]
pub struct BrionVertexData {
    pub vertex: Vec<f64>,
    pub edge_vectors: Vec<Vec<f64>>,
    pub neighbors: Vec<usize>,
    pub xi: Vec<f64>,
}

/// Volume of a simple polytope from its vertices and adjacency, in the
/// intrinsic dimension of its affine hull.
pub fn brion_volume(vs: &VertexSet, adjacency: &Adjacency) -> Result<f64> {
    let data = brion_data(vs, adjacency)?;
    Ok(evaluate(&data))
}

/// As [`brion_volume`] with a caller-chosen ambient direction `xi`.
pub fn brion_volume_with_xi(vs: &VertexSet, adjacency: &Adjacency, xi: &[f64]) -> Result<f64> {
    let (frame, vertices, edges) = frame_edges(vs, adjacency)?;
    let xi = frame.project_direction(xi);
    if !generic(&xi, &edges) {
        return Err(Error::XiDegenerate { attempts: 1 });
    }
    Ok(evaluate(&assemble(vertices, edges, adjacency, xi)))
}

/// Per-vertex data with a direction drawn from the fixed sequence.
pub fn brion_data(vs: &VertexSet, adjacency: &Adjacency) -> Result<Vec<BrionVertexData>> {
    let (frame, vertices, edges) = frame_edges(vs, adjacency)?;
    let k = frame.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(XI_SEED);
    for _ in 0..XI_ATTEMPTS {
        let mut xi: Vec<f64> = (0..k).map(|_| StandardNormal.sample(&mut rng)).collect();
        let n = norm(&xi);
        xi.iter_mut().for_each(|x| *x /= n);
        if generic(&xi, &edges) {
            return Ok(assemble(vertices, edges, adjacency, xi));
        }
    }
    Err(Error::XiDegenerate { attempts: XI_ATTEMPTS })
}

type FrameEdges = (AffineFrame, Vec<Vec<f64>>, Vec<Vec<Vec<f64>>>);

fn frame_edges(vs: &VertexSet, adjacency: &Adjacency) -> Result<FrameEdges> {
    if adjacency.len() != vs.len() {
        return Err(Error::InconsistentInput("adjacency does not match vertex count".into()));
    }
    let frame = AffineFrame::of(&vs.vertices);
    let k = frame.dim();
    if k == 0 {
        return Err(Error::DegeneratePolytope);
    }
    let vertices: Vec<Vec<f64>> = vs.vertices.iter().map(|v| frame.coords(v)).collect();
    let mut edges = Vec::with_capacity(vs.len());
    for (i, nbrs) in adjacency.iter().enumerate() {
        if nbrs.len() != k {
            return Err(Error::NotSimple {
                vertex: i,
                neighbors: nbrs.len(),
                expected: k,
            });
        }
        let e: Vec<Vec<f64>> = nbrs.iter().map(|&j| sub(&vertices[i], &vertices[j])).collect();
        let scale: f64 = e.iter().map(|x| norm(x)).product();
        if abs_det(&e) <= EPS_GEOM * scale {
            return Err(Error::NotSimple {
                vertex: i,
                neighbors: nbrs.len(),
                expected: k,
            });
        }
        edges.push(e);
    }
    Ok((frame, vertices, edges))
}

fn generic(xi: &[f64], edges: &[Vec<Vec<f64>>]) -> bool {
    edges.iter().flatten().all(|e| dot(xi, e).abs() > EPS_GEOM * norm(e).max(1.0))
}

fn assemble(vertices: Vec<Vec<f64>>, edges: Vec<Vec<Vec<f64>>>, adjacency: &Adjacency, xi: Vec<f64>) -> Vec<BrionVertexData> {
    vertices
        .into_iter()
        .zip(edges)
        .zip(adjacency)
        .map(|((vertex, edge_vectors), nbrs)| BrionVertexData {
            vertex,
            edge_vectors,
            neighbors: nbrs.clone(),
            xi: xi.clone(),
        })
        .collect()
}

fn evaluate(data: &[BrionVertexData]) -> f64 {
    let k = data.first().map_or(0, |d| d.vertex.len());
    let terms: Vec<f64> = data
        .par_iter()
        .map(|d| {
            let num = abs_det(&d.edge_vectors) * dot(&d.vertex, &d.xi).powi(k as i32);
            let den: f64 = d.edge_vectors.iter().map(|e| dot(e, &d.xi)).product();
            num / den
        })
        .collect();
    let mut sum = CompensatedSum::default();
    terms.into_iter().for_each(|t| sum.add(t));
    let factorial: f64 = (1..=k).map(|x| x as f64).product();
    sum.value() / factorial
}

#[cfg(test)]
mod tests {
    use super::super::{enumerate_vertices, vertex_adjacency, HalfspaceSystem};
    use super::*;

    fn square() -> (VertexSet, Adjacency) {
        let h = HalfspaceSystem::new(
            vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0], vec![0.0, -1.0]],
            vec![0.0, 0.0, 1.0, 1.0],
        )
        .unwrap();
        let vs = enumerate_vertices(&h).unwrap();
        let adj = vertex_adjacency(&h, &vs).unwrap();
        (vs, adj)
    }

    #[test]
    fn unit_square_with_fixed_xi() {
        let (vs, adj) = square();
        assert!((brion_volume_with_xi(&vs, &adj, &[1.0, 2.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!((brion_volume(&vs, &adj).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_xi_is_rejected() {
        let (vs, adj) = square();
        assert!(matches!(
            brion_volume_with_xi(&vs, &adj, &[1.0, 0.0]),
            Err(Error::XiDegenerate { .. })
        ));
    }

    #[test]
    fn segment_in_probability_plane() {
        let vs = VertexSet::from_points(vec![vec![0.6, 0.4], vec![0.4, 0.6]]);
        let adj = vec![vec![1], vec![0]];
        assert!((brion_volume(&vs, &adj).unwrap() - 2f64.sqrt() * 0.2).abs() < 1e-12);
    }

    #[test]
    fn wrong_neighbor_count_is_not_simple() {
        let (vs, mut adj) = square();
        adj[0].pop();
        assert!(matches!(brion_volume(&vs, &adj), Err(Error::NotSimple { vertex: 0, .. })));
    }
}
