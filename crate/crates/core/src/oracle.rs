//! Monte-Carlo estimates used to cross-check the closed-form volumes.
//!
//! Samples are drawn in fixed-size chunks; chunk `c` uses a ChaCha8 stream
//! keyed by `(seed, c)`, and hit counts are summed as integers, so estimates
//! are bit-identical for any thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bipartite::sorted_region_volume;
use crate::error::{Error, Result};
use crate::polytope::{convert_frame, Convention, EmbeddingFrame};
use crate::schmidt::{majorizes_sorted, SchmidtVector};

/// Samples per random stream.
const CHUNK: u64 = 1 << 16;

/// Smallest accepted sample count.
pub const MIN_SAMPLES: u64 = 1_000;

/// Sample count, seed and volume convention of a Monte-Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    samples: u64,
    seed: u64,
    convention: Convention,
}

impl McConfig {
    /// Intrinsic-convention configuration; fails below [`MIN_SAMPLES`].
    pub fn new(samples: u64, seed: u64) -> Result<Self> {
        if samples < MIN_SAMPLES {
            return Err(Error::InvalidArgument(format!("sample count {samples} is below {MIN_SAMPLES}")));
        }
        Ok(Self {
            samples,
            seed,
            convention: Convention::Intrinsic,
        })
    }

    /// Same run reported in another convention.
    pub fn with_convention(self, convention: Convention) -> Self {
        Self { convention, ..self }
    }

    pub fn samples(&self) -> u64 {
        self.samples
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }
}

/// A Monte-Carlo volume with its standard error and the run parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub hits: u64,
    pub samples: u64,
    pub seed: u64,
}

impl McEstimate {
    fn from_hits(hits: u64, cfg: &McConfig, volume: f64) -> Self {
        let n = cfg.samples as f64;
        let p = hits as f64 / n;
        McEstimate {
            estimate: volume * p,
            std_error: volume * (p * (1.0 - p) / n).sqrt(),
            hits,
            samples: cfg.samples,
            seed: cfg.seed,
        }
    }
}

/// Counts samples for which `trial` returns true, chunk by chunk in parallel.
fn count_hits<F>(cfg: &McConfig, trial: F) -> u64
where
    F: Fn(&mut ChaCha8Rng, &mut Vec<f64>) -> bool + Sync,
{
    let chunks = cfg.samples.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(c);
            let n = CHUNK.min(cfg.samples - c * CHUNK);
            let mut buf = Vec::new();
            (0..n).filter(|_| trial(&mut rng, &mut buf)).count() as u64
        })
        .sum()
}

/// Fills `buf` with a uniform point of the sorted region of the d-simplex.
fn sorted_simplex_point(rng: &mut ChaCha8Rng, d: usize, buf: &mut Vec<f64>) {
    buf.clear();
    buf.extend((0..d).map(|_| rng.sample::<f64, _>(Exp1)));
    let s: f64 = buf.iter().sum();
    buf.iter_mut().for_each(|x| *x /= s);
    buf.sort_by(|a, b| b.total_cmp(a));
}

fn simplex_estimate(lambda: &SchmidtVector, cfg: &McConfig, source: bool) -> Result<McEstimate> {
    let d = lambda.dim();
    if d < 2 {
        return Err(Error::InvalidArgument("Monte-Carlo volumes need d ≥ 2".into()));
    }
    let l = lambda.as_slice();
    let hits = count_hits(cfg, |rng, buf| {
        sorted_simplex_point(rng, d, buf);
        if source {
            majorizes_sorted(l, buf)
        } else {
            majorizes_sorted(buf, l)
        }
    });
    let frame = EmbeddingFrame {
        ambient_dim: d,
        convention: Convention::Intrinsic,
    };
    let region = convert_frame(sorted_region_volume(d), frame, cfg.convention);
    Ok(McEstimate::from_hits(hits, cfg, region))
}

/// Volume of `M_s(ψ)`: the fraction of sorted Schmidt vectors majorized by λ.
pub fn mc_source_volume(lambda: &SchmidtVector, cfg: &McConfig) -> Result<McEstimate> {
    simplex_estimate(lambda, cfg, true)
}

/// Volume of `M_a(ψ)`: the fraction of sorted Schmidt vectors majorizing λ.
pub fn mc_accessible_volume(lambda: &SchmidtVector, cfg: &McConfig) -> Result<McEstimate> {
    simplex_estimate(lambda, cfg, false)
}

/// Volume of `{x ∈ box : inside(x)}` for the box `[lo, hi]`.
///
/// The configured convention is ignored: the region lives in plain R^n.
pub fn mc_region_volume<F>(inside: F, lo: &[f64], hi: &[f64], cfg: &McConfig) -> Result<McEstimate>
where
    F: Fn(&[f64]) -> bool + Sync,
{
    if lo.is_empty() || lo.len() != hi.len() {
        return Err(Error::InvalidArgument("box bounds must be non-empty and of equal length".into()));
    }
    if lo.iter().zip(hi).any(|(a, b)| !(a.is_finite() && b.is_finite() && a <= b)) {
        return Err(Error::InvalidArgument("box bounds must be finite with lo ≤ hi".into()));
    }
    let volume: f64 = lo.iter().zip(hi).map(|(a, b)| b - a).product();
    let hits = count_hits(cfg, |rng, buf| {
        buf.clear();
        buf.extend(lo.iter().zip(hi).map(|(&a, &b)| a + (b - a) * rng.random::<f64>()));
        inside(buf)
    });
    Ok(McEstimate::from_hits(hits, cfg, volume))
}
