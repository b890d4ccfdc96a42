//! LOCC convertibility between non-isolated four-qubit states.
//!
//! A protocol step lets one party `i` measure `M_k = √p_k h σ_k g⁻¹` while the
//! others apply `σ_k`. It maps `γ^i` to `ζ^i` iff `η ⊙ ζ^i = γ^i` with
//! `η_l = p_0 + p_l − p_m − p_n` and `p ≥ 0`, and it leaves the other parties
//! unchanged iff every used `σ_k` commutes with their operators. Every row of
//! the conversion table is realized by one such step or by two steps on
//! different parties; the row label is read off the initial structure.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{aligned, classify, flip_all, max_diff, standard_gammas, Axis, FourQubitForm, ParamVector, Structure, AXIS_TOL};
use crate::error::{Error, Result};

/// Slack on `p_k ≥ 0` and `|η_l| ≤ 1`.
const FEAS_TOL: f64 = 1e-10;

/// Tolerance for treating two parameter vectors as equal.
const SAME_TOL: f64 = 1e-9;

/// Row of the conversion table realizing a conversion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Row {
    /// Initial and final states are LU-equivalent.
    Trivial,
    Ia,
    Ib,
    II,
    IIIa,
    IIIb,
    IIIc,
}

/// One measurement round on a single party.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Step {
    /// 0-based party index.
    pub party: usize,
    pub eta: [f64; 3],
    /// Weights `p_0 … p_3` of `σ_0 … σ_3`.
    pub p: [f64; 4],
    /// Parameters of the measuring party before the step.
    pub from: ParamVector,
    /// Parameters after the step.
    pub to: ParamVector,
}

/// A protocol: the symmetry `σ_flip^⊗4` applied to the initial state, then the steps.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Plan {
    pub flip: usize,
    pub steps: Vec<Step>,
    /// Initial parameters after the flip.
    pub start: [ParamVector; 4],
}

/// Verdict of [`can_convert`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Conversion {
    pub convertible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub row: Option<Row>,
    #[serde(skip)]
    pub plan: Option<Plan>,
}

const SIGNS: [[f64; 3]; 4] = [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]];

/// `p_0 = (1+η_1+η_2+η_3)/4`, `p_l = (1+η_l−η_m−η_n)/4`.
pub fn probabilities_from_eta(eta: &[f64; 3]) -> [f64; 4] {
    SIGNS.map(|s| (1.0 + s[0] * eta[0] + s[1] * eta[1] + s[2] * eta[2]) / 4.0)
}

/// `η_l = p_0 + p_l − p_m − p_n`.
pub fn eta_from_probabilities(p: &[f64; 4]) -> [f64; 3] {
    [0, 1, 2].map(|l| (0..4).map(|k| SIGNS[k][l] * p[k]).sum())
}

/// Finds `η` with `η ⊙ ζ = γ` whose weights vanish outside `allowed`.
///
/// Components with `ζ_l = 0` require `γ_l = 0` and leave `η_l` free; the
/// returned point is the centroid of the vertices of the feasible set.
pub fn solve_eta(gamma: &ParamVector, zeta: &ParamVector, allowed: [bool; 4]) -> Option<([f64; 3], [f64; 4])> {
    let mut eta = [0.0; 3];
    let mut free = Vec::new();
    for l in 0..3 {
        if zeta[l].abs() >= AXIS_TOL {
            eta[l] = gamma[l] / zeta[l];
            if eta[l].abs() > 1.0 + FEAS_TOL {
                return None;
            }
        } else if gamma[l].abs() >= AXIS_TOL {
            return None;
        } else {
            free.push(l);
        }
    }
    let feasible = |e: &[f64; 3]| {
        probabilities_from_eta(e)
            .iter()
            .zip(allowed)
            .all(|(&p, ok)| if ok { p >= -FEAS_TOL } else { p.abs() <= FEAS_TOL })
    };
    let m = free.len();
    let mut points: Vec<[f64; 3]> = Vec::new();
    if m == 0 {
        if feasible(&eta) {
            points.push(eta);
        }
    } else {
        // p_k = c_k + Σ_f s_kf η_f; vertices make m of them vanish.
        let constant = probabilities_from_eta(&eta).map(|p| 4.0 * p);
        for subset in itertools::Itertools::combinations(0..4usize, m) {
            let a = DMatrix::from_fn(m, m, |r, c| SIGNS[subset[r]][free[c]]);
            let b = DVector::from_fn(m, |r, _| -constant[subset[r]]);
            let lu = a.lu();
            if lu.determinant().abs() < 1e-12 {
                continue;
            }
            let Some(x) = lu.solve(&b) else { continue };
            let mut e = eta;
            for (c, &f) in free.iter().enumerate() {
                e[f] = x[c];
            }
            if feasible(&e) {
                points.push(e);
            }
        }
    }
    if points.is_empty() {
        return None;
    }
    let n = points.len() as f64;
    let eta = [0, 1, 2].map(|l| points.iter().map(|p| p[l]).sum::<f64>() / n);
    let p = probabilities_from_eta(&eta).map(|x| if x.abs() <= FEAS_TOL { 0.0 } else { x });
    Some((eta, p))
}

/// One step on party `i` from `cur` to `target`, if the other parties agree
/// and the needed `σ_k` commute with them.
fn single_step(cur: &[ParamVector; 4], target: &[ParamVector; 4], i: usize) -> Option<Step> {
    let others_equal = (0..4)
        .filter(|&j| j != i)
        .all(|j| max_diff(&[cur[j]; 4], &[target[j]; 4]) <= SAME_TOL);
    if !others_equal {
        return None;
    }
    let mut allowed = [true; 4];
    for w in Axis::ALL {
        allowed[w.index() + 1] = (0..4).filter(|&j| j != i).all(|j| aligned(&cur[j], w));
    }
    let (eta, p) = solve_eta(&cur[i], &target[i], allowed)?;
    Some(Step {
        party: i,
        eta,
        p,
        from: cur[i],
        to: target[i],
    })
}

fn differing(a: &[ParamVector; 4], b: &[ParamVector; 4]) -> Vec<usize> {
    (0..4)
        .filter(|&j| a[j].iter().zip(&b[j]).any(|(x, y)| (x - y).abs() > SAME_TOL))
        .collect()
}

fn find_plan(initial: &[ParamVector; 4], target: &[ParamVector; 4]) -> Option<Plan> {
    if let Some(f) = (0..4).find(|&f| differing(&flip_all(initial, f), target).is_empty()) {
        return Some(Plan {
            flip: f,
            steps: vec![],
            start: flip_all(initial, f),
        });
    }
    for f in 0..4 {
        let start = flip_all(initial, f);
        let diff = differing(&start, target);
        let plan = |steps| Some(Plan { flip: f, steps, start });
        match *diff.as_slice() {
            [i] => {
                if let Some(s) = single_step(&start, target, i) {
                    return plan(vec![s]);
                }
            }
            [i, j] => {
                for (a, b) in [(i, j), (j, i)] {
                    let mut mid = start;
                    mid[a] = target[a];
                    if let (Some(s1), Some(s2)) = (single_step(&start, &mid, a), single_step(&mid, target, b)) {
                        return plan(vec![s1, s2]);
                    }
                }
            }
            _ => {}
        }
    }
    None
}

fn zero_count(g: &ParamVector) -> usize {
    g.iter().filter(|x| x.abs() < AXIS_TOL).count()
}

fn label(plan: &Plan, initial: &[ParamVector; 4], target: &[ParamVector; 4]) -> Row {
    let Some(last) = plan.steps.last() else { return Row::Trivial };
    let case_iii = || match zero_count(&last.to) {
        0 => Row::IIIa,
        1 => Row::IIIb,
        _ => Row::IIIc,
    };
    match classify(initial).structure {
        Structure::CaseII { .. } => Row::II,
        Structure::CaseIII { .. } => case_iii(),
        Structure::Seed | Structure::GxOnly { .. } => match classify(target).structure {
            Structure::AxisPlusTransverse { .. } => Row::Ib,
            _ => case_iii(),
        },
        _ if plan.steps.len() == 2 => Row::II,
        _ => Row::Ia,
    }
}

/// Decides whether `initial` can be converted into `final_` by LOCC and, if
/// so, which table row applies and which protocol realizes it.
///
/// Seed parameters are only compared for class membership; the verdict
/// depends on the parameter vectors alone.
pub fn can_convert(initial: &FourQubitForm, final_: &FourQubitForm) -> Result<Conversion> {
    if !initial.seed().same_class(final_.seed()) {
        return Err(Error::DifferentSloccClass);
    }
    let g = initial.gammas();
    let h = final_.gammas();
    if max_diff(&standard_gammas(g), &standard_gammas(h)) <= SAME_TOL {
        let plan = find_plan(g, h).expect("LU-equivalent forms differ by a flip");
        return Ok(Conversion {
            convertible: true,
            row: Some(Row::Trivial),
            plan: Some(plan),
        });
    }
    Ok(match find_plan(g, h) {
        Some(plan) => Conversion {
            convertible: true,
            row: Some(label(&plan, g, h)),
            plan: Some(plan),
        },
        None => Conversion {
            convertible: false,
            row: None,
            plan: None,
        },
    })
}
