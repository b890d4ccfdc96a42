//! Source and accessible volumes of non-isolated four-qubit states.
//!
//! Volumes live in the space of standard-form parameters of the parties that
//! change, so their dimension depends on the structure; measures are only
//! comparable between states whose volumes share a dimension.

use std::f64::consts::PI;

use serde::Serialize;

use super::convert::solve_eta;
use super::{classify, flip, FourQubitForm, ParamVector, Structure, AXIS_TOL};
use crate::error::{Error, Result};
use crate::oracle::{mc_region_volume, McConfig};

/// A four-qubit volume with its intrinsic dimension.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FourQubitVolume {
    pub dimension: usize,
    pub value: f64,
    /// Present for Monte-Carlo estimates.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
    /// Exact symbolic value where one is known.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symbolic: Option<String>,
}

impl FourQubitVolume {
    fn exact(dimension: usize, value: f64) -> Self {
        Self {
            dimension,
            value,
            std_error: None,
            symbolic: None,
        }
    }

    fn symbolic(dimension: usize, value: f64, s: &str) -> Self {
        Self {
            dimension,
            value,
            std_error: None,
            symbolic: Some(s.into()),
        }
    }
}

/// One measure together with the normalization it used.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FourQubitMeasure {
    pub volume: FourQubitVolume,
    /// Supremum of the volume over states of the same structure; absent for
    /// zero-dimensional volumes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v_sup: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v_sup_symbolic: Option<&'static str>,
    pub value: f64,
}

/// Source and accessible measures of one state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasurePair {
    pub structure: Structure,
    pub source: FourQubitMeasure,
    pub accessible: FourQubitMeasure,
}

fn norm2(x: f64, y: f64) -> f64 {
    x.hypot(y)
}

fn transverse(g: &ParamVector, w: usize) -> f64 {
    let (u, v) = ((w + 1) % 3, (w + 2) % 3);
    norm2(g[u], g[v])
}

/// Nonzero components of a one-zero vector, in absolute value.
fn pair_without_zero(g: &ParamVector) -> Option<(f64, f64)> {
    let nz: Vec<f64> = g.iter().filter(|x| x.abs() >= AXIS_TOL).map(|x| x.abs()).collect();
    (nz.len() == 2).then(|| (nz[0], nz[1]))
}

/// Whether `{ζ : |ζ| < ½, |a|/|ζ_a| + |b|/|ζ_b| ≤ 1}` has interior, i.e. the
/// astroid `|a|^{2/3} + |b|^{2/3} = r^{2/3}` lies inside radius ½.
fn one_zero_is_3d(a: f64, b: f64) -> bool {
    (a.powf(2.0 / 3.0) + b.powf(2.0 / 3.0)).powi(3) < 0.25
}

/// Area of `{x ≥ a, y ≥ b, x² + y² < ¼}`.
fn corner_disc_area(a: f64, b: f64) -> f64 {
    let r2: f64 = 0.25;
    let top = (r2 - b * b).max(0.0).sqrt();
    if a >= top {
        return 0.0;
    }
    // ∫ √(r² − x²) dx = ½(x√(r²−x²) + r² asin(x/r)).
    let prim = |x: f64| 0.5 * (x * (r2 - x * x).max(0.0).sqrt() + r2 * (x / 0.5).clamp(-1.0, 1.0).asin());
    prim(top) - prim(a) - b * (top - a)
}

/// Monte-Carlo volume of the standard-form targets reachable from one general party.
fn case_iii_mc(g: &ParamVector, cfg: &McConfig) -> Result<FourQubitVolume> {
    let flips: Vec<ParamVector> = (0..4).map(|f| flip(g, f)).collect();
    let inside = |z: &[f64]| {
        let zeta = [z[0], z[1], z[2]];
        zeta.iter().map(|x| x * x).sum::<f64>() < 0.25 && flips.iter().any(|gf| solve_eta(gf, &zeta, [true; 4]).is_some())
    };
    let e = mc_region_volume(inside, &[0.0, 0.0, -0.5], &[0.5, 0.5, 0.5], cfg)?;
    Ok(FourQubitVolume {
        dimension: 3,
        value: e.estimate,
        std_error: Some(e.std_error),
        symbolic: None,
    })
}

fn param(form: &FourQubitForm, party: usize) -> ParamVector {
    form.gammas()[party - 1]
}

/// Source volume of a non-isolated state; isolated states give `(0, 0)`.
pub fn source_volume_4q(form: &FourQubitForm) -> FourQubitVolume {
    source_with_sup(form).0
}

fn source_with_sup(form: &FourQubitForm) -> (FourQubitVolume, Option<(f64, &'static str)>) {
    let gs = form.gammas();
    match classify(gs).structure {
        Structure::Seed => (FourQubitVolume::symbolic(0, 0.0, "0"), None),
        Structure::MesAligned { .. } => (FourQubitVolume::symbolic(0, 0.0, "0"), None),
        Structure::Isolated => (FourQubitVolume::exact(0, 0.0), None),
        Structure::GenericIa { party, w } => (
            FourQubitVolume::exact(1, transverse(&param(form, party), w.index())),
            Some((0.5, "1/2")),
        ),
        Structure::GxOnly { party, axis } => (
            FourQubitVolume::exact(1, param(form, party)[axis.index()].abs()),
            Some((0.5, "1/2")),
        ),
        Structure::CaseII { v_party, v, w_party, w } => {
            let value = 4.0 * (param(form, v_party)[v.index()] * param(form, w_party)[w.index()]).abs();
            (FourQubitVolume::exact(2, value), Some((1.0, "1")))
        }
        Structure::AxisPlusTransverse {
            axis_party,
            transverse_party,
            w,
        } => {
            let value = param(form, axis_party)[w.index()].abs() + transverse(&param(form, transverse_party), w.index());
            (FourQubitVolume::exact(1, value), Some((1.0, "1")))
        }
        Structure::CaseIII { party } => {
            let g = param(form, party);
            match pair_without_zero(&g) {
                Some((a, b)) => (FourQubitVolume::exact(2, a * b), Some((0.25, "1/4"))),
                None => {
                    let value = 2.0 / 3.0 * (g[0] * g[1] * g[2]).abs();
                    (FourQubitVolume::exact(3, value), Some((1.0 / (36.0 * 3f64.sqrt()), "1/(36√3)")))
                }
            }
        }
    }
}

/// Accessible volume of a non-isolated state; isolated states give `(0, 0)`.
///
/// A party in a general direction has no closed form and is integrated by
/// Monte Carlo with `cfg`; all other structures are exact.
pub fn accessible_volume_4q(form: &FourQubitForm, cfg: &McConfig) -> Result<FourQubitVolume> {
    Ok(accessible_with_sup(form, cfg)?.0)
}

fn accessible_with_sup(form: &FourQubitForm, cfg: &McConfig) -> Result<(FourQubitVolume, Option<(f64, &'static str)>)> {
    let gs = form.gammas();
    Ok(match classify(gs).structure {
        Structure::Seed => (
            FourQubitVolume::symbolic(3, 29.0 * PI / 12.0, "29π/12"),
            Some((29.0 * PI / 12.0, "29π/12")),
        ),
        Structure::Isolated => (FourQubitVolume::exact(0, 0.0), None),
        Structure::MesAligned { w } => {
            let value = PI * gs.iter().map(|g| 0.25 - g[w.index()] * g[w.index()]).sum::<f64>();
            (FourQubitVolume::exact(2, value), Some((PI, "π")))
        }
        Structure::GenericIa { party, w } => {
            let g = param(form, party);
            let value = (0.25 - g[w.index()] * g[w.index()]).sqrt() - transverse(&g, w.index());
            (FourQubitVolume::exact(1, value), Some((0.5, "1/2")))
        }
        Structure::AxisPlusTransverse { transverse_party, w, .. } => {
            let value = 0.5 - transverse(&param(form, transverse_party), w.index());
            (FourQubitVolume::exact(1, value), Some((0.5, "1/2")))
        }
        Structure::CaseII { v_party, v, w_party, w } => {
            let value = (0.5 - param(form, v_party)[v.index()].abs()) * (0.5 - param(form, w_party)[w.index()].abs());
            (FourQubitVolume::exact(2, value), Some((0.25, "1/4")))
        }
        Structure::GxOnly { party, axis } => {
            let x = param(form, party)[axis.index()].abs();
            let value = PI / 48.0 * (11.0 + 8.0 * x * (x * x - 3.0));
            (FourQubitVolume::exact(3, value), Some((11.0 * PI / 48.0, "11π/48")))
        }
        Structure::CaseIII { party } => {
            let g = param(form, party);
            match pair_without_zero(&g) {
                Some((a, b)) if !one_zero_is_3d(a, b) => (FourQubitVolume::exact(2, corner_disc_area(a, b)), Some((PI / 16.0, "π/16"))),
                _ => (case_iii_mc(&g, cfg)?, Some((PI / 24.0, "π/24"))),
            }
        }
    })
}

/// Source and accessible entanglement `E_s = 1 − V_s/V_s^sup`, `E_a = V_a/V_a^sup`.
///
/// A zero-dimensional source set gives `E_s = 1`. Isolated states have no
/// applicable normalization and fail with [`Error::UnclassifiedForm`].
pub fn entanglement_4q(form: &FourQubitForm, cfg: &McConfig) -> Result<MeasurePair> {
    let structure = classify(form.gammas()).structure;
    if structure == Structure::Isolated {
        return Err(Error::UnclassifiedForm);
    }
    let (vs, s_sup) = source_with_sup(form);
    let (va, a_sup) = accessible_with_sup(form, cfg)?;
    let source = FourQubitMeasure {
        value: s_sup.map_or(1.0, |(s, _)| 1.0 - vs.value / s),
        v_sup: s_sup.map(|x| x.0),
        v_sup_symbolic: s_sup.map(|x| x.1),
        volume: vs,
    };
    let accessible = FourQubitMeasure {
        value: a_sup.map_or(0.0, |(s, _)| va.value / s),
        v_sup: a_sup.map(|x| x.0),
        v_sup_symbolic: a_sup.map(|x| x.1),
        volume: va,
    };
    Ok(MeasurePair {
        structure,
        source,
        accessible,
    })
}
