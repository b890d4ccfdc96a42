//! Source and accessible volumes of bipartite pure states.
//!
//! Volumes are measured on the sorted region of the probability simplex in
//! R^d and reported intrinsically (inside `Σx = 1`). The source volume has a
//! closed form summing over all `d!` permutations; the accessible volume is
//! computed from its H-representation with the polytope engine.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::polytope::{self, CompensatedSum, Convention, EmbeddingFrame, HalfspaceSystem, VertexSet, VolumeReport};
use crate::schmidt::{Permutation, SchmidtVector};
use crate::EPS_NORM;

/// Largest dimension for which the exact `d!` permutation sum is evaluated.
pub const DIM_CAP: usize = 11;

/// Which of the two volume measures a report describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    Source,
    Accessible,
}

/// A volume together with the measure derived from it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureReport {
    pub quantity: Quantity,
    /// Intrinsic volume in `dimension` dimensions.
    pub volume: f64,
    pub dimension: usize,
    /// Normalization `V^sup` used for `value`.
    pub v_sup: f64,
    /// `E_s = 1 − V/V^sup` or `E_a = V/V^sup`.
    pub value: f64,
    /// Family index `k` of `E^k`.
    pub k: usize,
    pub frame: EmbeddingFrame,
    /// Vertex count of the polytope, when one was built.
    pub vertex_count: Option<usize>,
    /// Observed simplicity of the polytope, when checked.
    pub simple: Option<bool>,
}

/// Intrinsic volume `√d/(d!(d−1)!)` of the sorted region of the d-simplex.
pub fn sorted_region_volume(d: usize) -> f64 {
    (d as f64).sqrt() / (factorial(d) * factorial(d - 1))
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|x| x as f64).product()
}

fn intrinsic(d: usize) -> EmbeddingFrame {
    EmbeddingFrame {
        ambient_dim: d,
        convention: Convention::Intrinsic,
    }
}

/// `Σ_σ (Σ_k σ(k)λ_k − (d+1)/2)^{d−1} / Π_{k<d}(σ(k) − σ(k+1))`, equal to
/// `V_s / V_s^sup`.
///
/// Chunks are keyed by `σ(1)` and reduced in order with compensated sums, so
/// the result does not depend on the thread count.
pub fn source_ratio(lambda: &SchmidtVector) -> Result<f64> {
    let d = lambda.dim();
    if d < 2 {
        return Err(Error::InvalidArgument("source volume needs d ≥ 2".into()));
    }
    if d > DIM_CAP {
        return Err(Error::DimensionTooLarge { d, cap: DIM_CAP });
    }
    let l = lambda.as_slice();
    let shift = (d as f64 + 1.0) / 2.0;
    let chunks: Vec<CompensatedSum> = (1..=d)
        .into_par_iter()
        .map(|first| {
            let mut acc = CompensatedSum::default();
            let rest: Vec<usize> = (1..=d).filter(|&x| x != first).collect();
            let mut sigma = vec![first; d];
            for tail in rest.iter().copied().permutations(d - 1) {
                sigma[1..].copy_from_slice(&tail);
                let s: f64 = sigma.iter().zip(l).map(|(&si, &li)| si as f64 * li).sum::<f64>() - shift;
                let den: f64 = sigma.windows(2).map(|w| w[0] as f64 - w[1] as f64).product();
                acc.add(s.powi(d as i32 - 1) / den);
            }
            acc
        })
        .collect();
    let mut total = CompensatedSum::default();
    chunks.into_iter().for_each(|c| total.merge(c));
    Ok(total.value())
}

/// Intrinsic (d−1)-volume of the source set `M_s(ψ)`.
pub fn source_volume(lambda: &SchmidtVector) -> Result<f64> {
    Ok(source_ratio(lambda)? * sorted_region_volume(lambda.dim()))
}

/// Source entanglement `E_s = 1 − V_s/V_s^sup` with `V_s^sup = √d/(d!(d−1)!)`.
pub fn source_entanglement(lambda: &SchmidtVector) -> Result<MeasureReport> {
    let d = lambda.dim();
    let ratio = source_ratio(lambda)?;
    let v_sup = sorted_region_volume(d);
    Ok(MeasureReport {
        quantity: Quantity::Source,
        volume: ratio * v_sup,
        dimension: d - 1,
        v_sup,
        value: 1.0 - ratio,
        k: d,
        frame: intrinsic(d),
        vertex_count: None,
        simple: None,
    })
}

/// Generalized source entanglement `E_s^k`: `E_s` of the state embedded in
/// dimension `k`, divided by its supremum over d-dimensional states.
pub fn source_entanglement_k(lambda: &SchmidtVector, k: usize) -> Result<MeasureReport> {
    let d = lambda.dim();
    let embedded = lambda.embed(k)?;
    let mut report = source_entanglement(&embedded)?;
    let sup = source_supremum(d, k)?;
    report.value /= sup;
    report.k = k;
    Ok(report)
}

/// `sup_φ E_s(embed(φ, k))` over sorted d-dimensional φ, cached per `(d, k)`.
///
/// The sorted region is `conv{w_1, …, w_d}` with `w_j = (1/j, …, 1/j, 0, …)`.
/// A barycentric grid over these corners (which contains `φ⁺_d = w_d`) is
/// scanned, then the best point is refined by a shrinking pattern search.
pub fn source_supremum(d: usize, k: usize) -> Result<f64> {
    if k < d {
        return Err(Error::ShrinkNotAllowed { from: d, to: k });
    }
    if k > DIM_CAP {
        return Err(Error::DimensionTooLarge { d: k, cap: DIM_CAP });
    }
    if d < 2 && k < 2 {
        return Err(Error::InvalidArgument("source volume needs k ≥ 2".into()));
    }
    if k == d {
        // E_s(φ⁺_d) = 1 is the maximum possible value.
        return Ok(1.0);
    }
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(&v) = cache.lock().expect("cache lock").get(&(d, k)) {
        return Ok(v);
    }
    let value = search_supremum(d, k)?;
    cache.lock().expect("cache lock").insert((d, k), value);
    Ok(value)
}

fn search_supremum(d: usize, k: usize) -> Result<f64> {
    let corners: Vec<Vec<f64>> = (1..=d)
        .map(|j| (0..d).map(|i| if i < j { 1.0 / j as f64 } else { 0.0 }).collect())
        .collect();
    let eval = |t: &[f64]| -> f64 {
        let mut phi = vec![0.0; k];
        for (tj, w) in t.iter().zip(&corners) {
            for (p, x) in phi.iter_mut().zip(w) {
                *p += tj * x;
            }
        }
        SchmidtVector::canonicalize(&phi)
            .and_then(|s| source_ratio(&s))
            .map_or(f64::NEG_INFINITY, |r| 1.0 - r)
    };
    let n = match d {
        2 => 64,
        3 => 24,
        4 => 12,
        _ => 6,
    };
    let grid: Vec<Vec<f64>> = compositions(n, d)
        .into_iter()
        .map(|c| c.iter().map(|&x| x as f64 / n as f64).collect())
        .collect();
    let (mut best_t, mut best) = grid
        .par_iter()
        .map(|t| (t.clone(), eval(t)))
        .reduce_with(|a, b| if b.1 > a.1 { b } else { a })
        .expect("non-empty grid");
    let mut step = 1.0 / n as f64;
    while step > 1e-10 {
        let mut improved = false;
        for (i, j) in (0..d).tuple_combinations() {
            for (from, to) in [(i, j), (j, i)] {
                let delta = step.min(best_t[from]);
                if delta <= 0.0 {
                    continue;
                }
                let mut t = best_t.clone();
                t[from] -= delta;
                t[to] += delta;
                let v = eval(&t);
                if v > best + 1e-15 {
                    best = v;
                    best_t = t;
                    improved = true;
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    Ok(best)
}

/// All vectors of `parts` non-negative integers summing to `n`.
fn compositions(n: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![n]];
    }
    (0..=n)
        .flat_map(|first| {
            compositions(n - first, parts - 1).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

/// Source polytope `M_s^LU(ψ) = conv{P_σ λ}` in projected coordinates
/// (last component dropped), with its facet H-representation
/// `Σ_{i∈S} x_i ≤ E_{|S|}(λ)` over all proper non-empty subsets `S`.
pub fn source_polytope(lambda: &SchmidtVector) -> Result<(HalfspaceSystem, VertexSet)> {
    let d = lambda.dim();
    if !(2..=DIM_CAP).contains(&d) {
        return Err(Error::DimensionTooLarge { d, cap: DIM_CAP });
    }
    let e = lambda.partial_sums();
    let k = d - 1;
    let mut a = Vec::new();
    let mut b = Vec::new();
    for mask in 1u32..(1 << d) - 1 {
        let size = mask.count_ones() as usize;
        let row: Vec<f64> = if mask & (1 << (d - 1)) == 0 {
            (0..k).map(|i| if mask & (1 << i) != 0 { -1.0 } else { 0.0 }).collect()
        } else {
            // x_d = 1 − Σ_{i<d} x_i turns the row into Σ_{i∉S} x_i ≥ 1 − E_|S|.
            (0..k).map(|i| if mask & (1 << i) == 0 { 1.0 } else { 0.0 }).collect()
        };
        let offset = if mask & (1 << (d - 1)) == 0 {
            e[size - 1]
        } else {
            e[size - 1] - 1.0
        };
        a.push(row);
        b.push(offset);
    }
    let h = HalfspaceSystem::new(a, b)?;
    let mut vertices: Vec<Vec<f64>> = (0..d)
        .permutations(d)
        .map(|images| {
            let p = Permutation::new(images).expect("valid permutation");
            let mut v = p.apply(lambda.as_slice());
            v.truncate(k);
            v
        })
        .collect();
    polytope::dedup_points(&mut vertices);
    let tight_sets = vertices.iter().map(|v| h.tight_set(v)).collect();
    Ok((h, VertexSet { vertices, tight_sets }))
}

/// Appends `1 − Σx` to projected coordinates.
pub fn lift(x: &[f64]) -> Vec<f64> {
    let mut v = x.to_vec();
    v.push(1.0 - x.iter().sum::<f64>());
    v
}

/// H-representation of the accessible set in `d − 1` projected variables:
/// `E_j(x) ≥ E_j(λ)` for `j < d`, `x_1 ≥ … ≥ x_{d−1} ≥ 1 − Σx ≥ 0`.
pub fn accessible_hrep(lambda: &SchmidtVector) -> HalfspaceSystem {
    accessible_hrep_k(lambda, lambda.dim())
}

/// As [`accessible_hrep`] restricted to states of Schmidt rank ≤ `k`.
fn accessible_hrep_k(lambda: &SchmidtVector, k: usize) -> HalfspaceSystem {
    let n = k - 1;
    let e = lambda.partial_sums();
    let mut a = Vec::with_capacity(2 * k - 1);
    let mut b = Vec::with_capacity(2 * k - 1);
    for j in 1..k {
        a.push((0..n).map(|i| if i < j { 1.0 } else { 0.0 }).collect());
        b.push(-e[j - 1]);
    }
    for i in 0..n.saturating_sub(1) {
        let mut row = vec![0.0; n];
        row[i] = 1.0;
        row[i + 1] = -1.0;
        a.push(row);
        b.push(0.0);
    }
    if n > 0 {
        let mut row = vec![1.0; n];
        row[n - 1] = 2.0;
        a.push(row);
        b.push(-1.0);
    }
    a.push(vec![-1.0; n]);
    b.push(1.0);
    HalfspaceSystem::with_dim(a, b, n)
}

/// Accessible polytope of rank-≤k targets: H-rep, vertices, and intrinsic volume.
#[derive(Debug, Clone)]
pub struct AccessiblePolytope {
    pub hrep: HalfspaceSystem,
    pub vertices: VertexSet,
    pub volume: VolumeReport,
    pub simple: bool,
}

/// Builds the accessible polytope for targets of dimension `k ≤ d`.
pub fn accessible_polytope(lambda: &SchmidtVector, k: usize) -> Result<AccessiblePolytope> {
    let d = lambda.dim();
    if k < 1 || k > d {
        return Err(Error::InvalidArgument(format!("need 1 ≤ k ≤ d, got k={k}, d={d}")));
    }
    let hrep = accessible_hrep_k(lambda, k);
    let vertices = polytope::enumerate_vertices(&hrep)?;
    let dim = vertices.affine_dim();
    let volume = if dim == 0 {
        VolumeReport { volume: 0.0, dimension: 0 }
    } else if dim == k - 1 {
        let projected = polytope::volume_triangulation(&vertices)?;
        let frame = EmbeddingFrame {
            ambient_dim: k,
            convention: Convention::Projected,
        };
        VolumeReport {
            volume: polytope::convert_frame(projected.volume, frame, Convention::Intrinsic),
            dimension: dim,
        }
    } else {
        // Collapsed set: measure the lifted vertices in their own hull.
        let lifted = VertexSet {
            vertices: vertices.vertices.iter().map(|v| lift(v)).collect(),
            tight_sets: vertices.tight_sets.clone(),
        };
        polytope::volume_triangulation(&lifted)?
    };
    let simple = dim > 0 && polytope::is_simple(&vertices, &polytope::vertex_adjacency(&hrep, &vertices)?);
    Ok(AccessiblePolytope {
        hrep,
        vertices,
        volume,
        simple,
    })
}

/// Intrinsic volume of the accessible set `M_a(ψ)` with its dimension.
pub fn accessible_volume(lambda: &SchmidtVector) -> Result<VolumeReport> {
    Ok(accessible_polytope(lambda, lambda.dim())?.volume)
}

/// Accessible entanglement `E_a = V_a/V_a^sup`, `V_a^sup = √d/(d!(d−1)!)`.
pub fn accessible_entanglement(lambda: &SchmidtVector) -> Result<MeasureReport> {
    accessible_entanglement_k(lambda, lambda.dim())
}

/// `E_a^k`: accessible volume restricted to targets of Schmidt rank ≤ `k`,
/// normalized by the sorted-region volume in dimension `k`.
///
/// A set of lower dimension than `k − 1` has zero (k−1)-volume, so its value
/// is 0 while the report keeps its own-dimension volume.
pub fn accessible_entanglement_k(lambda: &SchmidtVector, k: usize) -> Result<MeasureReport> {
    if k < 2 {
        return Err(Error::InvalidArgument("accessible measure needs k ≥ 2".into()));
    }
    let p = accessible_polytope(lambda, k)?;
    let v_sup = sorted_region_volume(k);
    let value = if p.volume.dimension == k - 1 {
        p.volume.volume / v_sup
    } else {
        0.0
    };
    Ok(MeasureReport {
        quantity: Quantity::Accessible,
        volume: p.volume.volume,
        dimension: p.volume.dimension,
        v_sup,
        value,
        k,
        frame: intrinsic(k),
        vertex_count: Some(p.vertices.len()),
        simple: Some(p.simple),
    })
}

/// The always-present accessible vertices `v_1 … v_{d−2}` in R^d:
/// `v_i = (λ_1, …, λ_i, λ_i, …, λ_i, λ_norm, 0, …, 0)`.
///
/// Each is checked against the enumerated vertex set.
pub fn guaranteed_vertices(lambda: &SchmidtVector) -> Result<Vec<Vec<f64>>> {
    let d = lambda.dim();
    if d < 3 {
        return Err(Error::InvalidArgument("guaranteed vertices need d ≥ 3".into()));
    }
    let l = lambda.as_slice();
    let poly = accessible_polytope(lambda, d)?;
    let mut out = Vec::with_capacity(d - 2);
    for i in 1..=d - 2 {
        let head: f64 = l[..i].iter().sum();
        let li = l[i - 1];
        let mut v = l[..i].to_vec();
        let mut rest = 1.0 - head;
        if li > 0.0 {
            while v.len() < d && rest >= li - EPS_NORM {
                v.push(li);
                rest -= li;
            }
        }
        if v.len() < d {
            v.push(rest.max(0.0));
        }
        v.resize(d, 0.0);
        if poly.vertices.find(&v[..d - 1]).is_none() {
            return Err(Error::InconsistentInput(format!("v_{i} = {v:?} is not an enumerated vertex")));
        }
        out.push(v);
    }
    Ok(out)
}

/// Whether `φ⁺_k` (embedded in dimension d) is accessible: `λ_1 ≤ 1/k`.
///
/// When it is, `φ⁺_k` is also checked to be a vertex of the accessible polytope.
pub fn max_entangled_accessible(lambda: &SchmidtVector, k: usize) -> Result<bool> {
    let d = lambda.dim();
    if k < 1 || k > d {
        return Err(Error::InvalidArgument(format!("need 1 ≤ k ≤ d, got k={k}, d={d}")));
    }
    let accessible = lambda.largest() <= 1.0 / k as f64 + EPS_NORM;
    if accessible && d >= 2 {
        let target = SchmidtVector::max_entangled(k).embed(d)?;
        let poly = accessible_polytope(lambda, d)?;
        if poly.vertices.find(&target.as_slice()[..d - 1]).is_none() {
            return Err(Error::InconsistentInput(format!("φ⁺_{k} is accessible but not a vertex")));
        }
    }
    Ok(accessible)
}

/// `true` when `λ'` lies in `M_a(λ)` up to `ε_geom`, via the H-representation.
pub fn in_accessible_set(lambda: &SchmidtVector, target: &SchmidtVector) -> Result<bool> {
    if lambda.dim() != target.dim() {
        return Err(Error::DimensionMismatch {
            left: lambda.dim(),
            right: target.dim(),
        });
    }
    let d = lambda.dim();
    Ok(accessible_hrep(lambda).contains(&target.as_slice()[..d - 1]) || d == 1)
}
