//! Generic four-qubit states `g¹⊗g²⊗g³⊗g⁴|Ψ_seed⟩` of the `G_abcd` class.
//!
//! A state is described by its seed parameters and one parameter vector `γ^i`
//! per party, with `G^i = (g^i)†g^i = ½·1 + Σ_k γ^i_k σ_k` and `g^i = √G^i`.
//! Parties are numbered 1–4 in public data; components `γ_1, γ_2, γ_3` belong
//! to `σ_x, σ_y, σ_z`.

mod convert;
mod measures;
mod witness;

use std::fmt;

use nalgebra::{Complex, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, SeedViolation};
use crate::EPS_NORM;

pub use convert::{can_convert, eta_from_probabilities, probabilities_from_eta, solve_eta, Conversion, Plan, Row, Step};
pub use measures::{accessible_volume_4q, entanglement_4q, source_volume_4q, FourQubitMeasure, FourQubitVolume, MeasurePair};
pub use witness::{povm_witness, Outcome, PovmWitness, StepReport};

/// Complex amplitude type.
pub type C64 = Complex<f64>;

/// Parameter vector `(γ_1, γ_2, γ_3)` of one party.
pub type ParamVector = [f64; 3];

/// Off-axis components below this are treated as zero.
pub const AXIS_TOL: f64 = 1e-10;

/// Largest accepted `|γ|`, keeping `G` numerically invertible.
pub const GAMMA_MAX: f64 = 0.5 - 1e-12;

/// Tolerance of the scale-symmetry test on the seed squares.
const SCALE_TOL: f64 = 1e-9;

/// Pauli axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    /// Component index 0, 1, 2.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Self {
        Self::ALL[i]
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["x", "y", "z"][self.index()])
    }
}

/// Seed parameters `a ∈ R`, `b, c, d ∈ C`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SeedRepr", into = "SeedRepr")]
pub struct SeedParams {
    a: f64,
    b: C64,
    c: C64,
    d: C64,
}

#[derive(Serialize, Deserialize)]
struct SeedRepr {
    a: f64,
    b: [f64; 2],
    c: [f64; 2],
    d: [f64; 2],
}

impl TryFrom<SeedRepr> for SeedParams {
    type Error = Error;

    fn try_from(r: SeedRepr) -> Result<Self> {
        let z = |x: [f64; 2]| C64::new(x[0], x[1]);
        SeedParams::new(r.a, z(r.b), z(r.c), z(r.d))
    }
}

impl From<SeedParams> for SeedRepr {
    fn from(p: SeedParams) -> Self {
        let z = |x: C64| [x.re, x.im];
        SeedRepr {
            a: p.a,
            b: z(p.b),
            c: z(p.c),
            d: z(p.d),
        }
    }
}

impl SeedParams {
    /// Validated seed parameters.
    pub fn new(a: f64, b: C64, c: C64, d: C64) -> Result<Self> {
        let p = Self { a, b, c, d };
        p.validate()?;
        Ok(p)
    }

    /// Parameters without the genericity checks, for non-generic examples.
    pub fn new_unchecked(a: f64, b: C64, c: C64, d: C64) -> Self {
        Self { a, b, c, d }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> C64 {
        self.b
    }

    pub fn c(&self) -> C64 {
        self.c
    }

    pub fn d(&self) -> C64 {
        self.d
    }

    /// `[a², b², c², d²]` (complex squares, not moduli).
    pub fn squares(&self) -> [C64; 4] {
        [C64::new(self.a * self.a, 0.0), self.b * self.b, self.c * self.c, self.d * self.d]
    }

    /// Checks normalization, distinct squares and absence of a scale symmetry.
    pub fn validate(&self) -> Result<()> {
        let all = [self.a, self.b.re, self.b.im, self.c.re, self.c.im, self.d.re, self.d.im];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidSeedParams(SeedViolation::NonFinite));
        }
        let n = self.a * self.a + self.b.norm_sqr() + self.c.norm_sqr() + self.d.norm_sqr();
        if (n - 1.0).abs() > EPS_NORM {
            return Err(Error::InvalidSeedParams(SeedViolation::Normalization));
        }
        let s = self.squares();
        for i in 0..4 {
            for j in i + 1..4 {
                if (s[i] - s[j]).norm() <= EPS_NORM {
                    return Err(Error::InvalidSeedParams(SeedViolation::RepeatedSquare));
                }
            }
        }
        // A symmetry q maps some nonzero square s_i onto some s_j, so q = s_j/s_i.
        for i in (0..4).filter(|&i| s[i].norm() > EPS_NORM) {
            for j in (0..4).filter(|&j| j != i) {
                let q = s[j] / s[i];
                if (q - 1.0).norm() > SCALE_TOL && same_multiset(&s.map(|x| q * x), &s, SCALE_TOL) {
                    return Err(Error::InvalidSeedParams(SeedViolation::ScaleSymmetric));
                }
            }
        }
        Ok(())
    }

    /// Whether two parameter sets label the same `G_abcd` class: equal
    /// multisets `{a², b², c², d²}`.
    pub fn same_class(&self, other: &SeedParams) -> bool {
        same_multiset(&self.squares(), &other.squares(), SCALE_TOL)
    }
}

fn same_multiset(x: &[C64; 4], y: &[C64; 4], tol: f64) -> bool {
    let mut used = [false; 4];
    x.iter().all(|a| match (0..4).find(|&j| !used[j] && (a - y[j]).norm() <= tol) {
        Some(j) => {
            used[j] = true;
            true
        }
        None => false,
    })
}

/// Index of the basis state `|q1 q2 q3 q4⟩`.
fn basis(bits: [usize; 4]) -> usize {
    bits[0] * 8 + bits[1] * 4 + bits[2] * 2 + bits[3]
}

/// The seed state vector; fails when the parameters are not generic.
pub fn build_seed(p: &SeedParams) -> Result<DVector<C64>> {
    p.validate()?;
    Ok(seed_vector(p))
}

/// The seed state vector for any parameters, without validation.
///
/// Amplitude index is `q1·8 + q2·4 + q3·2 + q4`.
pub fn seed_vector(p: &SeedParams) -> DVector<C64> {
    let a = C64::new(p.a, 0.0);
    let mut v = DVector::from_element(16, C64::new(0.0, 0.0));
    let groups = [
        ((a + p.d) / 2.0, [[0, 0, 0, 0], [1, 1, 1, 1]]),
        ((a - p.d) / 2.0, [[0, 0, 1, 1], [1, 1, 0, 0]]),
        ((p.b + p.c) / 2.0, [[0, 1, 0, 1], [1, 0, 1, 0]]),
        ((p.b - p.c) / 2.0, [[0, 1, 1, 0], [1, 0, 0, 1]]),
    ];
    for (amp, states) in groups {
        for s in states {
            v[basis(s)] = amp;
        }
    }
    v
}

/// Seed parameters and one parameter vector per party.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FormRepr", into = "FormRepr")]
pub struct FourQubitForm {
    seed: SeedParams,
    gammas: [ParamVector; 4],
}

#[derive(Serialize, Deserialize)]
struct FormRepr {
    seed: SeedParams,
    gammas: [ParamVector; 4],
}

impl TryFrom<FormRepr> for FourQubitForm {
    type Error = Error;

    fn try_from(r: FormRepr) -> Result<Self> {
        FourQubitForm::new(r.seed, r.gammas)
    }
}

impl From<FourQubitForm> for FormRepr {
    fn from(f: FourQubitForm) -> Self {
        FormRepr {
            seed: f.seed,
            gammas: f.gammas,
        }
    }
}

impl FourQubitForm {
    /// Validates `|γ^i| ≤ 1/2 − 1e-12` for every party.
    pub fn new(seed: SeedParams, gammas: [ParamVector; 4]) -> Result<Self> {
        for (i, g) in gammas.iter().enumerate() {
            let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm.is_nan() || norm > GAMMA_MAX {
                return Err(Error::InvalidParamVector { party: i + 1, norm });
            }
        }
        Ok(Self { seed, gammas })
    }

    pub fn seed(&self) -> &SeedParams {
        &self.seed
    }

    pub fn gammas(&self) -> &[ParamVector; 4] {
        &self.gammas
    }

    /// The unnormalized state `g|Ψ_seed⟩`.
    pub fn state_vector(&self) -> DVector<C64> {
        let ops = self.gammas.map(|g| witness::sqrt_g(&g));
        witness::kron4(&ops) * seed_vector(&self.seed)
    }
}

/// Applies the symmetry `σ_k^⊗4` (k = 1, 2, 3) to a parameter vector: keeps
/// component k and negates the other two. `k = 0` is the identity.
pub fn flip(g: &ParamVector, k: usize) -> ParamVector {
    if k == 0 {
        return *g;
    }
    let mut out = g.map(|x| -x);
    out[k - 1] = g[k - 1];
    out
}

pub(crate) fn flip_all(gs: &[ParamVector; 4], k: usize) -> [ParamVector; 4] {
    gs.map(|g| flip(&g, k))
}

/// Canonical representative of the LU class: the lexicographically largest
/// of the four sign patterns reachable through `σ_k^⊗4`.
///
/// With `γ^1_1, γ^1_2 ≠ 0` this makes both nonnegative and leaves `γ^1_3` free.
pub fn standard_form(form: &FourQubitForm) -> FourQubitForm {
    FourQubitForm {
        seed: form.seed,
        gammas: standard_gammas(&form.gammas),
    }
}

pub(crate) fn standard_gammas(gs: &[ParamVector; 4]) -> [ParamVector; 4] {
    let mut best = *gs;
    for k in 1..4 {
        let cand = flip_all(gs, k);
        if lex_greater(&cand, &best) {
            best = cand;
        }
    }
    best.map(|g| g.map(|x| x + 0.0))
}

fn lex_greater(a: &[ParamVector; 4], b: &[ParamVector; 4]) -> bool {
    for (x, y) in a.iter().flatten().zip(b.iter().flatten()) {
        if (x - y).abs() > EPS_NORM {
            return x > y;
        }
    }
    false
}

/// Largest componentwise distance between two sets of parameter vectors.
pub(crate) fn max_diff(a: &[ParamVector; 4], b: &[ParamVector; 4]) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn is_zero(g: &ParamVector) -> bool {
    g.iter().all(|x| x.abs() < AXIS_TOL)
}

/// `true` when all components off axis `w` vanish (zero vectors included).
pub(crate) fn aligned(g: &ParamVector, w: Axis) -> bool {
    (0..3).filter(|&c| c != w.index()).all(|c| g[c].abs() < AXIS_TOL)
}

/// The unique axis of a nonzero axis-aligned vector.
fn axis_of(g: &ParamVector) -> Option<Axis> {
    if is_zero(g) {
        return None;
    }
    Axis::ALL.into_iter().find(|&w| aligned(g, w))
}

/// Structure of a state up to party permutation. Party labels are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum Structure {
    /// All parameter vectors vanish.
    Seed,
    /// One nonzero party, aligned with an axis.
    GxOnly { party: usize, axis: Axis },
    /// One nonzero party in a general direction.
    #[serde(rename = "case_iii")]
    CaseIII { party: usize },
    /// Two nonzero parties aligned with different axes `v ≠ w`.
    #[serde(rename = "case_ii")]
    CaseII { v_party: usize, v: Axis, w_party: usize, w: Axis },
    /// One party aligned with `w`, one purely transverse to it, the rest zero.
    AxisPlusTransverse {
        axis_party: usize,
        transverse_party: usize,
        w: Axis,
    },
    /// All parties aligned with `w`, at least two nonzero.
    MesAligned { w: Axis },
    /// Parties other than `party` aligned with `w`, `party` general, at least
    /// two nonzero `w` components.
    GenericIa { party: usize, w: Axis },
    /// Neither reaches nor is reached by any LU-inequivalent state.
    Isolated,
}

/// Result of [`classify`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub structure: Structure,
    /// Original party label of each slot: the distinguished parties of the
    /// structure first, the rest ascending.
    pub slots: [usize; 4],
    /// Set when an isolated verdict hinges on a component barely above the axis tolerance.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub near_miss: Option<String>,
}

/// Detects the structure tag of a parameter set (sign conventions do not matter).
pub fn classify(gs: &[ParamVector; 4]) -> Classification {
    let structure = detect(gs);
    let lead: Vec<usize> = match structure {
        Structure::Seed | Structure::MesAligned { .. } | Structure::Isolated => vec![],
        Structure::GxOnly { party, .. } | Structure::CaseIII { party } | Structure::GenericIa { party, .. } => vec![party],
        Structure::CaseII { v_party, w_party, .. } => vec![v_party, w_party],
        Structure::AxisPlusTransverse {
            axis_party,
            transverse_party,
            ..
        } => vec![axis_party, transverse_party],
    };
    let mut slots = [0; 4];
    for (s, p) in lead.iter().copied().chain((1..=4).filter(|p| !lead.contains(p))).enumerate() {
        slots[s] = p;
    }
    let near_miss = (structure == Structure::Isolated)
        .then(|| {
            gs.iter().enumerate().find_map(|(i, g)| {
                g.iter()
                    .position(|x| x.abs() >= AXIS_TOL && x.abs() < 1e-6)
                    .map(|c| format!("party {} component {} = {:e} is just above the axis tolerance", i + 1, c + 1, g[c]))
            })
        })
        .flatten();
    Classification {
        structure,
        slots,
        near_miss,
    }
}

fn detect(gs: &[ParamVector; 4]) -> Structure {
    let nz: Vec<usize> = (0..4).filter(|&i| !is_zero(&gs[i])).collect();
    match nz.as_slice() {
        [] => return Structure::Seed,
        &[i] => {
            return match axis_of(&gs[i]) {
                Some(axis) => Structure::GxOnly { party: i + 1, axis },
                None => Structure::CaseIII { party: i + 1 },
            }
        }
        &[i, j] => {
            if let (Some(v), Some(w)) = (axis_of(&gs[i]), axis_of(&gs[j])) {
                if v != w {
                    return Structure::CaseII {
                        v_party: i + 1,
                        v,
                        w_party: j + 1,
                        w,
                    };
                }
            }
            for (a, t) in [(i, j), (j, i)] {
                if let Some(w) = axis_of(&gs[a]) {
                    if gs[t][w.index()].abs() < AXIS_TOL && axis_of(&gs[t]).is_none() {
                        return Structure::AxisPlusTransverse {
                            axis_party: a + 1,
                            transverse_party: t + 1,
                            w,
                        };
                    }
                }
            }
        }
        _ => {}
    }
    for w in Axis::ALL {
        if gs.iter().all(|g| aligned(g, w)) {
            return Structure::MesAligned { w };
        }
    }
    for i in 0..4 {
        for w in Axis::ALL {
            let others = (0..4).filter(|&j| j != i).all(|j| aligned(&gs[j], w));
            let w_count = gs.iter().filter(|g| g[w.index()].abs() >= AXIS_TOL).count();
            if others && !aligned(&gs[i], w) && w_count >= 2 {
                return Structure::GenericIa { party: i + 1, w };
            }
        }
    }
    Structure::Isolated
}
