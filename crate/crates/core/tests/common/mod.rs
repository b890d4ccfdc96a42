//! Random generators shared by the integration tests.
#![allow(dead_code)]

use locc_core::fourqubit::{eta_from_probabilities, FourQubitForm, ParamVector, SeedParams, C64};
use locc_core::SchmidtVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

pub const Z: ParamVector = [0.0; 3];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point of the probability simplex.
pub fn simplex_point(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    let x: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let s: f64 = x.iter().sum();
    x.into_iter().map(|v| v / s).collect()
}

pub fn random_schmidt(rng: &mut ChaCha8Rng, d: usize) -> SchmidtVector {
    SchmidtVector::canonicalize(&simplex_point(rng, d)).unwrap()
}

/// A Schmidt vector with at least one repeated component, possibly zero.
pub fn random_degenerate(rng: &mut ChaCha8Rng, d: usize) -> SchmidtVector {
    let mut x = simplex_point(rng, d);
    let i = rng.random_range(0..d - 1);
    if rng.random_bool(0.3) {
        x[d - 1] = 0.0;
    } else {
        x[i + 1] = x[i];
    }
    SchmidtVector::canonicalize(&x).unwrap()
}

/// Fixed generic seed parameters.
pub fn seed() -> SeedParams {
    SeedParams::new(0.6, C64::new(0.5, 0.0), C64::new(0.0, 0.4), C64::from_polar(0.23f64.sqrt(), 0.3)).unwrap()
}

/// Random generic seed parameters.
pub fn random_seed(rng: &mut ChaCha8Rng) -> SeedParams {
    loop {
        let v: Vec<f64> = (0..7).map(|_| rng.random_range(-1.0..1.0)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let v: Vec<f64> = v.iter().map(|x| x / n).collect();
        if let Ok(p) = SeedParams::new(v[0], C64::new(v[1], v[2]), C64::new(v[3], v[4]), C64::new(v[5], v[6])) {
            return p;
        }
    }
}

pub fn form(gs: [ParamVector; 4]) -> FourQubitForm {
    FourQubitForm::new(seed(), gs).unwrap()
}

/// Nonzero value in `±[lo, hi)`.
fn signed(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let x = rng.random_range(lo..hi);
    if rng.random_bool(0.5) {
        x
    } else {
        -x
    }
}

/// Random vector of norm in `[lo, hi)`.
pub fn ball_point(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> ParamVector {
    loop {
        let v: ParamVector = [0; 3].map(|_| rng.random_range(-1.0..1.0));
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.1 && n <= 1.0 {
            let r = rng.random_range(lo..hi);
            return v.map(|x| x * r / n);
        }
    }
}

fn axis_vec(w: usize, x: f64) -> ParamVector {
    let mut g = [0.0; 3];
    g[w] = x;
    g
}

fn shuffle_parties(rng: &mut ChaCha8Rng, a: [ParamVector; 4], b: [ParamVector; 4]) -> ([ParamVector; 4], [ParamVector; 4]) {
    let mut idx = [0, 1, 2, 3];
    for i in (1..4).rev() {
        idx.swap(i, rng.random_range(0..=i));
    }
    (idx.map(|i| a[i]), idx.map(|i| b[i]))
}

/// Row (ia): one general party, the others along `w`; the transverse part grows.
pub fn pair_ia(rng: &mut ChaCha8Rng) -> (FourQubitForm, FourQubitForm) {
    let w = rng.random_range(0..3);
    let (u, v) = ((w + 1) % 3, (w + 2) % 3);
    let gw = signed(rng, 0.02, 0.3);
    let rmax = (0.49f64 * 0.49 - gw * gw).sqrt();
    let theta = rng.random_range(0.0..std::f64::consts::TAU);
    let t = rng.random_range(0.02..rmax);
    let t2 = rng.random_range(t..rmax);
    let mut g1 = axis_vec(w, gw);
    let mut z1 = g1;
    g1[u] = t * theta.cos();
    g1[v] = t * theta.sin();
    z1[u] = t2 * theta.cos();
    z1[v] = t2 * theta.sin();
    let rest = [
        signed(rng, 0.02, 0.45),
        if rng.random_bool(0.5) { signed(rng, 0.02, 0.45) } else { 0.0 },
        0.0,
    ]
    .map(|x| axis_vec(w, x));
    let (a, b) = shuffle_parties(rng, [g1, rest[0], rest[1], rest[2]], [z1, rest[0], rest[1], rest[2]]);
    (form(a), form(b))
}

/// Row (ii): two parties along different axes; both magnitudes grow.
pub fn pair_ii(rng: &mut ChaCha8Rng) -> (FourQubitForm, FourQubitForm) {
    let v = rng.random_range(0..3);
    let w = (v + rng.random_range(1..3)) % 3;
    let (a, b) = (rng.random_range(0.02..0.45), rng.random_range(0.02..0.45));
    let (a2, b2) = (rng.random_range(a..0.49), rng.random_range(b..0.49));
    let (sa, sb) = (
        if rng.random_bool(0.5) { 1.0 } else { -1.0 },
        if rng.random_bool(0.5) { 1.0 } else { -1.0 },
    );
    let i = [axis_vec(v, sa * a), axis_vec(w, sb * b), Z, Z];
    let f = [axis_vec(v, sa * a2), axis_vec(w, sb * b2), Z, Z];
    let (i, f) = shuffle_parties(rng, i, f);
    (form(i), form(f))
}

/// Row (iiia): one general party; `γ = η ⊙ ζ` for `η` from random weights.
pub fn pair_iii(rng: &mut ChaCha8Rng) -> (FourQubitForm, FourQubitForm) {
    loop {
        let p: Vec<f64> = simplex_point(rng, 4);
        let eta = eta_from_probabilities(&[p[0], p[1], p[2], p[3]]);
        let zeta = ball_point(rng, 0.05, 0.49);
        let gamma = [0, 1, 2].map(|l| eta[l] * zeta[l]);
        if gamma.iter().chain(&zeta).all(|x| x.abs() > 1e-3) {
            let (i, f) = shuffle_parties(rng, [gamma, Z, Z, Z], [zeta, Z, Z, Z]);
            return (form(i), form(f));
        }
    }
}

/// Row (ib): one party along `w` grows, another becomes transverse to `w`.
pub fn pair_ib(rng: &mut ChaCha8Rng) -> (FourQubitForm, FourQubitForm) {
    let w = rng.random_range(0..3);
    let (u, v) = ((w + 1) % 3, (w + 2) % 3);
    let g = rng.random_range(0.0..0.45);
    let z = rng.random_range(g..0.49);
    let mut t = [0.0; 3];
    let r = rng.random_range(0.02..0.49);
    let th = rng.random_range(0.0..std::f64::consts::TAU);
    t[u] = r * th.cos();
    t[v] = r * th.sin();
    let (i, f) = shuffle_parties(rng, [axis_vec(w, g), Z, Z, Z], [axis_vec(w, z), t, Z, Z]);
    (form(i), form(f))
}
