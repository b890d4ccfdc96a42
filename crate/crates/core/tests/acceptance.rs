//! Acceptance suite: runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

mod common;

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use locc_core::bipartite::{
    accessible_entanglement, accessible_entanglement_k, accessible_polytope, accessible_volume, source_entanglement, source_entanglement_k,
    source_polytope, source_ratio, source_volume,
};
use locc_core::fourqubit::{
    accessible_volume_4q, can_convert, entanglement_4q, povm_witness, seed_vector, source_volume_4q, FourQubitForm, MeasurePair, Row, C64,
};
use locc_core::oracle::{mc_accessible_volume, mc_source_volume, McConfig};
use locc_core::polytope::{brion_volume, convert_frame, vertex_adjacency, volume_triangulation, Convention, EmbeddingFrame};
use locc_core::SchmidtVector;
use nalgebra::DVector;

use common::*;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn sv(x: &[f64]) -> SchmidtVector {
    SchmidtVector::canonicalize(x).unwrap()
}

fn timed(limit: Duration, start: Instant) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:?}, limit {limit:?}"))
}

fn c1() -> Outcome {
    let t = Instant::now();
    let l = sv(&[0.4, 0.3, 0.2, 0.1]);
    let es = source_entanglement(&l).map_err(|e| e.to_string())?.value;
    let ea = accessible_entanglement(&l).map_err(|e| e.to_string())?.value;
    ensure((es - 0.904).abs() <= 5e-4, || format!("E_s = {es}"))?;
    ensure((ea - 87.0 / 125.0).abs() <= 1e-9, || format!("E_a = {ea}"))?;
    timed(Duration::from_secs(1), t)?;
    Ok(format!("E_s = {es:.6}, E_a = {ea:.12}"))
}

fn c2() -> Outcome {
    let t = Instant::now();
    let a = accessible_polytope(&sv(&[0.30, 0.27, 0.24, 0.19]), 4).unwrap().vertices.len();
    let b = accessible_polytope(&sv(&[0.4, 0.3, 0.2, 0.1]), 4).unwrap().vertices.len();
    ensure(a == 10 && b == 8, || format!("vertex counts {a}, {b}"))?;
    timed(Duration::from_secs(1), t)?;
    Ok(format!("{a} and {b} vertices"))
}

fn c3() -> Outcome {
    let mut r = rng(3);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let l = random_schmidt(&mut r, 2);
        let es = source_entanglement(&l).unwrap().value;
        let ea = accessible_entanglement(&l).unwrap().value;
        let want = 2.0 * (1.0 - l.as_slice()[0]);
        worst = worst.max((es - want).abs()).max((ea - es).abs());
    }
    ensure(worst < 1e-12, || format!("max deviation {worst:e}"))?;
    Ok(format!("max deviation {worst:.1e}"))
}

fn c4() -> Outcome {
    let mut r = rng(4);
    let (mut d_es, mut d_va, mut d_ea2, mut d_es4): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for _ in 0..200 {
        let l = random_schmidt(&mut r, 3);
        let [l1, l2, l3] = [l.as_slice()[0], l.as_slice()[1], l.as_slice()[2]];
        let es = source_entanglement(&l).unwrap().value;
        d_es = d_es.max((es - (3.0 * l2 * l2 - 6.0 * l2 * l3 - 6.0 * (l3 - 1.0) * l3)).abs());
        let va = accessible_volume(&l).unwrap().volume;
        let va_want = if l1 > 0.5 {
            3f64.sqrt() * l2 * l3
        } else {
            3f64.sqrt() * (l2 * l3 - 0.25 * (1.0 - 2.0 * l1).powi(2))
        };
        d_va = d_va.max((va - va_want).abs());
        let ea2 = accessible_entanglement_k(&l, 2).unwrap().value;
        let ea2_want = if l1 > 0.5 { 2.0 * (1.0 - l1) } else { 1.0 };
        d_ea2 = d_ea2.max((ea2 - ea2_want).abs());
        let es4 = source_entanglement_k(&l, 4).unwrap().value;
        let poly = 2.0 * l2.powi(3) + 6.0 * l2 * l2 * l3 + 3.0 * (3.0 - 4.0 * l2) * l3 * l3 - 10.0 * l3.powi(3);
        d_es4 = d_es4.max((es4 - 27.0 / 13.0 * poly).abs());
    }
    ensure(d_es < 1e-12, || format!("E_s deviation {d_es:e}"))?;
    ensure(d_va < 1e-9, || format!("V_a deviation {d_va:e}"))?;
    ensure(d_ea2 < 1e-9, || format!("E_a^2 deviation {d_ea2:e}"))?;
    ensure(d_es4 < 1e-6, || format!("E_s^4 deviation {d_es4:e}"))?;
    Ok(format!(
        "deviations E_s {d_es:.1e}, V_a {d_va:.1e}, E_a^2 {d_ea2:.1e}, E_s^4 {d_es4:.1e}"
    ))
}

fn c5() -> Outcome {
    for d in 2..=7 {
        let sep = source_volume(&SchmidtVector::separable(d)).unwrap();
        let want = (d as f64).sqrt() / ((1..=d).product::<usize>() as f64 * (1..d).product::<usize>() as f64);
        ensure((sep - want).abs() < 1e-12, || format!("d={d}: V_s(sep) = {sep}, want {want}"))?;
        let me = source_volume(&SchmidtVector::max_entangled(d)).unwrap();
        ensure(me.abs() < 1e-10, || format!("d={d}: V_s(φ+) = {me:e}"))?;
    }
    Ok("d = 2..7".into())
}

fn c6() -> Outcome {
    let mut r = rng(6);
    for n in 0..20 {
        let d = 2 + n % 4;
        let l = random_degenerate(&mut r, d);
        let direct = source_ratio(&l).unwrap();
        let mut prev = f64::INFINITY;
        for eps in [1e-3, 1e-5, 1e-7] {
            let x: Vec<f64> = l
                .as_slice()
                .iter()
                .enumerate()
                .map(|(k, v)| v + eps * (d - k) as f64 / d as f64)
                .collect();
            let err = (source_ratio(&sv(&x)).unwrap() - direct).abs();
            ensure(err <= 10.0 * eps, || format!("{:?} ε={eps}: error {err:e}", l.as_slice()))?;
            ensure(err <= prev, || {
                format!("{:?} ε={eps}: error {err:e} not below {prev:e}", l.as_slice())
            })?;
            prev = err;
        }
    }
    Ok("20 degenerate states".into())
}

fn c7() -> Outcome {
    let mut r = rng(7);
    let (mut worst_cross, mut worst_closed): (f64, f64) = (0.0, 0.0);
    for n in 0..50 {
        let d = 3 + n % 3;
        let l = random_schmidt(&mut r, d);
        let (h, vs) = source_polytope(&l).unwrap();
        let adj = vertex_adjacency(&h, &vs).unwrap();
        let brion = brion_volume(&vs, &adj).map_err(|e| e.to_string())?;
        let tri = volume_triangulation(&vs).unwrap().volume;
        worst_cross = worst_cross.max((brion - tri).abs());
        let frame = EmbeddingFrame {
            ambient_dim: d,
            convention: Convention::Projected,
        };
        let geometric = convert_frame(tri, frame, Convention::Intrinsic) / (1..=d).product::<usize>() as f64;
        worst_closed = worst_closed.max((source_volume(&l).unwrap() - geometric).abs());
    }
    ensure(worst_cross < 1e-9, || format!("Brion vs triangulation {worst_cross:e}"))?;
    ensure(worst_closed < 1e-9, || format!("closed form vs geometry {worst_closed:e}"))?;
    Ok(format!("Brion/triangulation {worst_cross:.1e}, closed form {worst_closed:.1e}"))
}

fn c8() -> Outcome {
    let t = Instant::now();
    let mut r = rng(8);
    let mut worst: f64 = 0.0;
    for d in 2..=5 {
        for n in 0..20 {
            let l = random_schmidt(&mut r, d);
            let cfg = McConfig::new(1_000_000, 1000 * d as u64 + n).unwrap();
            let s = mc_source_volume(&l, &cfg).unwrap();
            let a = mc_accessible_volume(&l, &cfg).unwrap();
            for (e, exact, what) in [
                (s, source_volume(&l).unwrap(), "source"),
                (a, accessible_volume(&l).unwrap().volume, "accessible"),
            ] {
                let z = (e.estimate - exact).abs() / e.std_error.max(1e-300);
                worst = worst.max(if e.std_error == 0.0 && e.estimate == exact { 0.0 } else { z });
                ensure(z <= 3.0 || (e.estimate - exact).abs() < 1e-15, || {
                    format!(
                        "d={d} {what} {:?}: estimate {} ± {}, exact {exact}",
                        l.as_slice(),
                        e.estimate,
                        e.std_error
                    )
                })?;
            }
        }
    }
    timed(Duration::from_secs(60), t)?;
    Ok(format!("160 estimates, worst {worst:.2}σ, {:.1?}", t.elapsed()))
}

fn c9() -> Outcome {
    let cfg = McConfig::new(1_000, 0).unwrap();
    let seed_va = accessible_volume_4q(&form([Z; 4]), &cfg).unwrap();
    ensure(seed_va.value == 29.0 * PI / 12.0 && seed_va.dimension == 3, || {
        format!("Seed V_a {seed_va:?}")
    })?;
    let gx = accessible_volume_4q(&form([[0.2, 0.0, 0.0], Z, Z, Z]), &cfg).unwrap().value;
    let gx_want = PI / 48.0 * (11.0 + 1.6 * (0.04 - 3.0));
    ensure((gx - gx_want).abs() < 1e-12, || format!("GxOnly V_a {gx}"))?;
    let ia = form([[0.15, 0.2, 0.1], [0.3, 0.0, 0.0], [0.1, 0.0, 0.0], Z]);
    let va = accessible_volume_4q(&ia, &cfg).unwrap().value;
    let vs = source_volume_4q(&ia).value;
    ensure(
        (va - (0.2275f64.sqrt() - 0.05f64.sqrt())).abs() < 1e-9 && (va - 0.25337).abs() < 1e-5,
        || format!("ia V_a {va}"),
    )?;
    ensure((vs - 0.05f64.sqrt()).abs() < 1e-9 && (vs - 0.22360).abs() < 1e-5, || {
        format!("ia V_s {vs}")
    })?;
    let iii = source_volume_4q(&form([[0.23, 0.13, 0.15], Z, Z, Z])).value;
    ensure((iii - 2.0 / 3.0 * 0.23 * 0.13 * 0.15).abs() < 1e-12, || {
        format!("CaseIII V_s {iii}")
    })?;
    Ok(format!(
        "Seed {:.6}, GxOnly {gx:.6}, ia ({va:.6}, {vs:.6}), iii {iii:.6}",
        seed_va.value
    ))
}

fn measures(f: &FourQubitForm, cfg: &McConfig) -> MeasurePair {
    entanglement_4q(f, cfg).unwrap()
}

/// Generator of a convertible `(initial, final)` pair.
type PairGen = fn(&mut rand_chacha::ChaCha8Rng) -> (FourQubitForm, FourQubitForm);

fn c10() -> Outcome {
    let cfg = McConfig::new(20_000, 10).unwrap();
    let mut r = rng(10);
    let gens: [(&str, PairGen, &[Row]); 3] = [
        ("ia", pair_ia, &[Row::Ia]),
        ("ii", pair_ii, &[Row::II]),
        ("iii", pair_iii, &[Row::IIIa]),
    ];
    let mut summary = Vec::new();
    for (name, gen, rows) in gens {
        let mut checked = 0;
        while checked < 500 {
            let (i, f) = gen(&mut r);
            let c = can_convert(&i, &f).unwrap();
            ensure(c.convertible && rows.contains(&c.row.unwrap()), || {
                format!("row {name}: generated pair not classified: {c:?}")
            })?;
            let (mi, mf) = (measures(&i, &cfg), measures(&f, &cfg));
            if mi.source.volume.dimension != mf.source.volume.dimension || mi.accessible.volume.dimension != mf.accessible.volume.dimension
            {
                continue;
            }
            ensure(mf.source.value <= mi.source.value + 1e-12, || {
                format!("row {name}: E_s {} → {}", mi.source.value, mf.source.value)
            })?;
            ensure(mf.accessible.value <= mi.accessible.value + 1e-12, || {
                format!(
                    "row {name}: E_a {} → {} for {:?} → {:?}",
                    mi.accessible.value,
                    mf.accessible.value,
                    i.gammas(),
                    f.gammas()
                )
            })?;
            checked += 1;
        }
        summary.push(format!("{name}: 500"));
    }
    Ok(summary.join(", "))
}

fn c11() -> Outcome {
    let mut r = rng(11);
    let (mut comp, mut eta, mut class): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for n in 0..100 {
        let (i, f) = if n % 2 == 0 { pair_ii(&mut r) } else { pair_iii(&mut r) };
        let w = povm_witness(&i, &f).map_err(|e| format!("{:?} → {:?}: {e}", i.gammas(), f.gammas()))?;
        comp = comp.max(w.completeness_residual);
        eta = eta.max(w.eta_residual);
        class = class.max(w.class_residual);
    }
    ensure(comp <= 1e-12 && eta <= 1e-10 && class <= 1e-9, || {
        format!("residuals {comp:e}, {eta:e}, {class:e}")
    })?;
    Ok(format!("completeness {comp:.1e}, η {eta:.1e}, class {class:.1e}"))
}

/// Applies `op` to qubit `q` (1-based, qubit 1 most significant).
fn apply_local(v: &DVector<C64>, q: usize, op: [[C64; 2]; 2]) -> DVector<C64> {
    let bit = 1 << (4 - q);
    DVector::from_fn(16, |idx, _| {
        let b = usize::from(idx & bit != 0);
        let (i0, i1) = (idx & !bit, idx | bit);
        op[b][0] * v[i0] + op[b][1] * v[i1]
    })
}

fn swap_qubits(v: &DVector<C64>, i: usize, j: usize) -> DVector<C64> {
    let (bi, bj) = (1 << (4 - i), 1 << (4 - j));
    DVector::from_fn(16, |idx, _| {
        let (x, y) = (idx & bi != 0, idx & bj != 0);
        let mut src = idx & !bi & !bj;
        if x {
            src |= bj;
        }
        if y {
            src |= bi;
        }
        v[src]
    })
}

fn c12() -> Outcome {
    let (o, z, im) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 1.0));
    let paulis = [[[o, z], [z, o]], [[z, o], [o, z]], [[z, -im], [im, z]], [[o, z], [z, -o]]];
    let mut r = rng(12);
    let (mut sym, mut perm): (f64, f64) = (0.0, 0.0);
    let mut first_perm_failure = None;
    for _ in 0..50 {
        let p = random_seed(&mut r);
        let v = seed_vector(&p);
        for s in paulis {
            let w = (1..=4).fold(v.clone(), |acc, q| apply_local(&acc, q, s));
            sym = sym.max((w - &v).norm());
        }
        for i in 1..=4 {
            for j in i + 1..=4 {
                let lhs = swap_qubits(&v, i, j);
                let rhs = apply_local(&apply_local(&v, i, paulis[1]), j, paulis[1]);
                let dev = (lhs - rhs).norm();
                if dev > 1e-12 && first_perm_failure.is_none() {
                    first_perm_failure = Some(format!("P_{i}{j} deviates by {dev:.3} for a={:.3}", p.a()));
                }
                perm = perm.max(dev);
            }
        }
    }
    ensure(sym <= 1e-12, || format!("σ^⊗4 symmetry deviation {sym:e}"))?;
    ensure(perm <= 1e-12, || {
        format!("σ^⊗4 holds ({sym:.1e}); P_ij = σ_x^iσ_x^j fails: {}", first_perm_failure.unwrap())
    })?;
    Ok(format!("symmetry {sym:.1e}, permutation {perm:.1e}"))
}

fn c13() -> Outcome {
    let cfg = McConfig::new(10_000_000, 13).unwrap();
    let f = form([[1e-6, 1e-6, 1e-6], Z, Z, Z]);
    let v = accessible_volume_4q(&f, &cfg).unwrap();
    let se = v.std_error.unwrap();
    // One quarter of the radius-½ ball: the ζ_1, ζ_2 ≥ 0 part of |ζ| < ½.
    let quadrant = PI / 24.0;
    ensure((v.value - quadrant).abs() <= 3.0 * se, || {
        format!("estimate {} ± {se}, quadrant π/24 = {quadrant}", v.value)
    })?;
    Ok(format!(
        "{:.6} ± {se:.1e} vs π/24 = {quadrant:.6} (π/12 would be {:.6})",
        v.value,
        PI / 12.0
    ))
}

type Criterion = fn() -> Outcome;

fn main() {
    let criteria: [(&str, Criterion); 13] = [
        ("d=4 worked example", c1),
        ("vertex counts", c2),
        ("d=2 identity", c3),
        ("d=3 closed forms", c4),
        ("boundary values", c5),
        ("degenerate continuity", c6),
        ("cross-engine volumes", c7),
        ("oracle agreement", c8),
        ("four-qubit closed forms", c9),
        ("four-qubit monotonicity", c10),
        ("POVM witnesses", c11),
        ("seed construction", c12),
        ("CaseIII Monte-Carlo limit", c13),
    ];
    let mut failed = Vec::new();
    for (n, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        match res {
            Ok(msg) => println!("criterion {:>2} PASS  {name}: {msg} [{:.2?}]", n + 1, t.elapsed()),
            Err(msg) => {
                println!("criterion {:>2} FAIL  {name}: {msg} [{:.2?}]", n + 1, t.elapsed());
                failed.push(n + 1);
            }
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
