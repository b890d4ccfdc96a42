//! Error type shared by every module.
//!
//! Each variant maps to a stable, module-qualified code via [`Error::code`],
//! which the CLI prints on domain errors.

use thiserror::Error;

/// Which seed-parameter invariant a [`crate::fourqubit::SeedParams`] violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedViolation {
    /// `a² + |b|² + |c|² + |d|² ≠ 1`.
    Normalization,
    /// Two of `a², b², c², d²` coincide.
    RepeatedSquare,
    /// The multiset of squares is invariant under a non-trivial rescaling.
    ScaleSymmetric,
    /// A component is NaN or infinite.
    NonFinite,
}

impl std::fmt::Display for SeedViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SeedViolation::Normalization => "a² + |b|² + |c|² + |d|² must equal 1",
            SeedViolation::RepeatedSquare => "a², b², c², d² must be pairwise distinct",
            SeedViolation::ScaleSymmetric => "{a²,b²,c²,d²} must not be invariant under a rescaling q ≠ 1",
            SeedViolation::NonFinite => "parameters must be finite",
        };
        f.write_str(s)
    }
}

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,
    #[error("component {index} is negative ({value})")]
    NegativeComponent { index: usize, value: f64 },
    #[error("components sum to zero")]
    ZeroSum,
    #[error("component {index} is not finite")]
    NonFinite { index: usize },
    #[error("index {k} out of range 1..={d}")]
    IndexOutOfRange { k: usize, d: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("cannot embed dimension {from} into smaller dimension {to}")]
    ShrinkNotAllowed { from: usize, to: usize },
    #[error("dimension {d} exceeds the exact-sum cap {cap}")]
    DimensionTooLarge { d: usize, cap: usize },
    #[error("polyhedron is unbounded")]
    Unbounded,
    #[error("polyhedron is infeasible")]
    Infeasible,
    #[error("inconsistent polytope input: {0}")]
    InconsistentInput(String),
    #[error("polytope has affine dimension 0")]
    DegeneratePolytope,
    #[error("vertex {vertex} has {neighbors} neighbors, expected {expected}")]
    NotSimple { vertex: usize, neighbors: usize, expected: usize },
    #[error("no generic direction found after {attempts} attempts")]
    XiDegenerate { attempts: usize },
    #[error("invalid seed parameters: {0}")]
    InvalidSeedParams(SeedViolation),
    #[error("party {party} parameter vector has norm {norm}, must be below 1/2")]
    InvalidParamVector { party: usize, norm: f64 },
    #[error("seed parameters differ: states belong to different SLOCC classes")]
    DifferentSloccClass,
    #[error("form is isolated; no case formula applies")]
    UnclassifiedForm,
    #[error("initial state cannot be converted to the final state")]
    NotConvertible,
    #[error("POVM completeness residual {residual:e}")]
    CompletenessViolation { residual: f64 },
    #[error("outcome {outcome} deviates from the target class by {deviation:e}")]
    OutcomeMismatch { outcome: usize, deviation: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Stable machine-readable code, prefixed with the owning module.
    pub fn code(&self) -> &'static str {
        match self {
            Error::EmptyInput => "schmidt.empty_input",
            Error::NegativeComponent { .. } => "schmidt.negative_component",
            Error::ZeroSum => "schmidt.zero_sum",
            Error::NonFinite { .. } => "schmidt.non_finite",
            Error::IndexOutOfRange { .. } => "schmidt.index_out_of_range",
            Error::DimensionMismatch { .. } => "schmidt.dimension_mismatch",
            Error::ShrinkNotAllowed { .. } => "schmidt.shrink_not_allowed",
            Error::DimensionTooLarge { .. } => "bipartite.dimension_too_large",
            Error::Unbounded => "polytope.unbounded",
            Error::Infeasible => "polytope.infeasible",
            Error::InconsistentInput(_) => "polytope.inconsistent_input",
            Error::DegeneratePolytope => "polytope.degenerate",
            Error::NotSimple { .. } => "polytope.not_simple",
            Error::XiDegenerate { .. } => "polytope.xi_degenerate",
            Error::InvalidSeedParams(_) => "fourqubit.invalid_seed_params",
            Error::InvalidParamVector { .. } => "fourqubit.invalid_param_vector",
            Error::DifferentSloccClass => "fourqubit.different_slocc_class",
            Error::UnclassifiedForm => "fourqubit.unclassified_form",
            Error::NotConvertible => "fourqubit.not_convertible",
            Error::CompletenessViolation { .. } => "fourqubit.completeness_violation",
            Error::OutcomeMismatch { .. } => "fourqubit.outcome_mismatch",
            Error::InvalidArgument(_) => "input.invalid_argument",
        }
    }
}

/// Library result alias.
pub type Result<T> = std::result::Result<T, Error>;
