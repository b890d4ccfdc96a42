//! Explicit POVMs realizing a conversion, checked against the state vectors.
//!
//! A step on party `i` with weights `p_k` uses the outcomes
//! `√p_k h^i σ_k (g^i)⁻¹ ⊗ σ_k^{⊗3}`; a plan is the symmetry `σ_f^⊗4`
//! followed by its steps, so the outcomes are products along every branch.

use nalgebra::{DMatrix, Matrix2};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use super::convert::{can_convert, Row, Step};
use super::{seed_vector, standard_gammas, FourQubitForm, ParamVector, C64};
use crate::error::{Error, Result};
use crate::EPS_NORM;

/// Completeness tolerance.
const COMPLETENESS_TOL: f64 = 1e-12;
/// Tolerance on `η ⊙ ζ = γ`.
const ETA_TOL: f64 = 1e-10;
/// Tolerance on the standard form of each outcome state.
const CLASS_TOL: f64 = 1e-9;

/// Pauli matrix `σ_k`, `k = 0..3` with `σ_0 = 1`.
pub(crate) fn pauli(k: usize) -> Matrix2<C64> {
    let (o, z, i) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 1.0));
    match k {
        0 => Matrix2::new(o, z, z, o),
        1 => Matrix2::new(z, o, o, z),
        2 => Matrix2::new(z, -i, i, z),
        _ => Matrix2::new(o, z, z, -o),
    }
}

/// `f(G)` for `G = ½ + γ·σ` and a scalar map `f` of its eigenvalues `½ ± |γ|`.
fn spectral(g: &ParamVector, f: impl Fn(f64) -> f64) -> Matrix2<C64> {
    let r = g.iter().map(|x| x * x).sum::<f64>().sqrt();
    let (hi, lo) = (f(0.5 + r), f(0.5 - r));
    let mut m = pauli(0) * C64::new((hi + lo) / 2.0, 0.0);
    if r > 0.0 {
        let c = (hi - lo) / 2.0 / r;
        for (k, gk) in g.iter().enumerate() {
            m += pauli(k + 1) * C64::new(c * gk, 0.0);
        }
    }
    m
}

/// The positive square root `g = √G`.
pub(crate) fn sqrt_g(g: &ParamVector) -> Matrix2<C64> {
    spectral(g, f64::sqrt)
}

/// `g⁻¹ = 1/√G`.
pub(crate) fn inv_sqrt_g(g: &ParamVector) -> Matrix2<C64> {
    spectral(g, |x| 1.0 / x.sqrt())
}

/// `A_1 ⊗ A_2 ⊗ A_3 ⊗ A_4`, party 1 most significant.
pub(crate) fn kron4(ops: &[Matrix2<C64>; 4]) -> DMatrix<C64> {
    let d = |m: &Matrix2<C64>| DMatrix::from_column_slice(2, 2, m.as_slice());
    d(&ops[0]).kronecker(&d(&ops[1])).kronecker(&d(&ops[2])).kronecker(&d(&ops[3]))
}

/// Parameters `γ_c = tr(σ_c G)/2` of a positive operator normalized to unit trace.
fn params_of(a: &Matrix2<C64>) -> ParamVector {
    let g = a.adjoint() * a;
    let t = g.trace().re;
    [1, 2, 3].map(|k| (pauli(k) * g).trace().re / (2.0 * t))
}

/// One measurement round of the witness.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepReport {
    /// 1-based measuring party.
    pub party: usize,
    pub eta: [f64; 3],
    pub p: [f64; 4],
}

/// A branch of the protocol: its probability weight and local operators.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome {
    pub weight: f64,
    #[serde(serialize_with = "ser_ops")]
    pub operators: [Matrix2<C64>; 4],
}

fn ser_ops<S: Serializer>(ops: &[Matrix2<C64>; 4], s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(4))?;
    for m in ops {
        let rows: Vec<Vec<[f64; 2]>> = (0..2).map(|r| (0..2).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect()).collect();
        seq.serialize_element(&rows)?;
    }
    seq.end()
}

/// A verified protocol for one conversion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PovmWitness {
    pub row: Row,
    /// Symmetry `σ_flip^⊗4` applied first.
    pub flip: usize,
    pub steps: Vec<StepReport>,
    pub outcomes: Vec<Outcome>,
    /// `max |Σ M†M − 1|` over the 16×16 entries.
    pub completeness_residual: f64,
    /// `max |η ⊙ ζ − γ|` over all steps.
    pub eta_residual: f64,
    /// Largest standard-form distance between an outcome state and the target.
    pub class_residual: f64,
    /// Smallest overlap `|⟨Φ|M_k Ψ⟩| / (‖Φ‖‖M_k Ψ‖)` over the outcomes.
    pub min_fidelity: f64,
}

/// Outcomes of one step as `(weight, operators)`.
fn step_outcomes(step: &Step) -> Vec<(f64, [Matrix2<C64>; 4])> {
    let local = sqrt_g(&step.to);
    let undo = inv_sqrt_g(&step.from);
    (0..4)
        .filter(|&k| step.p[k] > 0.0)
        .map(|k| {
            let mut ops = [pauli(k); 4];
            ops[step.party] = local * pauli(k) * undo * C64::new(step.p[k].sqrt(), 0.0);
            (step.p[k], ops)
        })
        .collect()
}

/// Builds and checks the POVM converting `initial` into `final_`.
///
/// Fails with [`Error::NotConvertible`] when no protocol exists, and with
/// [`Error::CompletenessViolation`] or [`Error::OutcomeMismatch`] when the
/// constructed operators do not pass the checks.
pub fn povm_witness(initial: &FourQubitForm, final_: &FourQubitForm) -> Result<PovmWitness> {
    let conv = can_convert(initial, final_)?;
    let (Some(row), Some(plan)) = (conv.row, conv.plan) else {
        return Err(Error::NotConvertible);
    };
    let mut branches = vec![(1.0, [pauli(plan.flip); 4])];
    for step in &plan.steps {
        let outs = step_outcomes(step);
        branches = branches
            .iter()
            .flat_map(|(w, ops)| outs.iter().map(move |(p, m)| (w * p, [0, 1, 2, 3].map(|j| m[j] * ops[j]))))
            .collect();
    }

    let mut sum = DMatrix::<C64>::zeros(16, 16);
    for (_, ops) in &branches {
        let k = kron4(ops);
        sum += k.adjoint() * k;
    }
    sum -= DMatrix::<C64>::identity(16, 16);
    let completeness_residual = sum.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if completeness_residual > COMPLETENESS_TOL {
        return Err(Error::CompletenessViolation {
            residual: completeness_residual,
        });
    }

    let eta_residual = plan
        .steps
        .iter()
        .flat_map(|s| (0..3).map(move |l| (s.eta[l] * s.to[l] - s.from[l]).abs()))
        .fold(0.0, f64::max);
    if eta_residual > ETA_TOL {
        return Err(Error::OutcomeMismatch {
            outcome: 0,
            deviation: eta_residual,
        });
    }

    let g = initial.gammas();
    let target = standard_gammas(final_.gammas());
    let seed = seed_vector(initial.seed());
    let phi = final_.state_vector();
    let psi = initial.state_vector();
    let mut class_residual: f64 = 0.0;
    let mut min_fidelity: f64 = 1.0;
    for (idx, (_, ops)) in branches.iter().enumerate() {
        let a = [0, 1, 2, 3].map(|j| ops[j] * sqrt_g(&g[j]));
        let got = standard_gammas(&a.map(|m| params_of(&m)));
        let dev = super::max_diff(&got, &target);
        let out = kron4(ops) * &psi;
        let fid = (phi.dotc(&out)).norm() / (phi.norm() * out.norm()).max(EPS_NORM);
        class_residual = class_residual.max(dev);
        min_fidelity = min_fidelity.min(fid);
        if dev > CLASS_TOL || fid < 1.0 - CLASS_TOL {
            return Err(Error::OutcomeMismatch {
                outcome: idx,
                deviation: dev.max(1.0 - fid),
            });
        }
    }
    debug_assert!((kron4(&g.map(|x| sqrt_g(&x))) * &seed - &psi).norm() < EPS_NORM);

    Ok(PovmWitness {
        row,
        flip: plan.flip,
        steps: plan
            .steps
            .iter()
            .map(|s| StepReport {
                party: s.party + 1,
                eta: s.eta,
                p: s.p,
            })
            .collect(),
        outcomes: branches
            .into_iter()
            .map(|(weight, operators)| Outcome { weight, operators })
            .collect(),
        completeness_residual,
        eta_residual,
        class_residual,
        min_fidelity,
    })
}
