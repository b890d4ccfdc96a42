//! Single-copy LOCC convertibility and volume-based entanglement measures.
//!
//! * [`schmidt`]: Schmidt vectors, majorization, embedding.
//! * [`polytope`]: vertex enumeration, adjacency, triangulation and Brion volumes.
//! * [`bipartite`]: source/accessible volumes and measures of bipartite states.
//! * [`fourqubit`]: generic four-qubit states, conversion rows, POVM witnesses.
//! * [`oracle`]: Monte-Carlo cross-checks for every closed form.

pub mod bipartite;
pub mod error;
pub mod fourqubit;
pub mod oracle;
pub mod polytope;
pub mod schmidt;

pub use error::{Error, Result};
pub use polytope::{EmbeddingFrame, HalfspaceSystem, VertexSet};
pub use schmidt::{lu_equivalent, majorizes, SchmidtVector};

/// Tolerance for normalization, sorting and majorization comparisons.
pub const EPS_NORM: f64 = 1e-12;

/// Tolerance for feasibility, tightness and vertex deduplication.
pub const EPS_GEOM: f64 = 1e-9;
