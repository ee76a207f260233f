//! Seeded sampling of interior points, cell points and directions.
//!
//! Every sample draws from its own ChaCha stream keyed by
//! `(seed, stream, index)`, so results do not depend on evaluation order and
//! a run with `N` samples is a prefix of a run with `2N`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::polytope::{Polytope, Vector, EPS_INT};

/// Attempts in the pilot run that estimates the acceptance rate.
const PILOT_ATTEMPTS: usize = 100_000;
/// Acceptance rates below this abort sampling.
pub const MIN_ACCEPTANCE: f64 = 1e-4;
/// Hard cap on rejection attempts for a single sample.
const MAX_ATTEMPTS: usize = 10_000_000;
const PILOT_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleConfig {
    pub seed: u64,
    pub count: usize,
    /// Minimum facet slack of uniformly sampled points.
    pub interior_margin: f64,
    /// Facet slacks used for the boundary-stress quota; empty disables it.
    pub stress_margins: Vec<f64>,
}

impl SampleConfig {
    pub fn new(seed: u64, count: usize, interior_margin: f64) -> Self {
        Self { seed, count, interior_margin, stress_margins: vec![interior_margin] }
    }

    pub fn with_stress_margins(mut self, margins: Vec<f64>) -> Self {
        self.stress_margins = margins;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.count < 1 {
            return Err(Error::DegenerateInput("sample count must be at least 1".into()));
        }
        if !(self.interior_margin >= EPS_INT) {
            return Err(Error::DegenerateInput(format!("interior margin must be at least {EPS_INT:e}")));
        }
        if self.stress_margins.iter().any(|&m| !(m >= EPS_INT)) {
            return Err(Error::DegenerateInput(format!("stress margins must be at least {EPS_INT:e}")));
        }
        Ok(())
    }

    /// Every fifth sample (20% of the budget) is a boundary-stress sample.
    pub fn stress_margin_for(&self, index: usize) -> Option<f64> {
        if self.stress_margins.is_empty() || index % 5 != 4 {
            return None;
        }
        Some(self.stress_margins[(index / 5) % self.stress_margins.len()])
    }
}

/// Independent generator for sample `index` of `stream`.
pub fn stream_rng(seed: u64, stream: u64, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&stream.to_le_bytes());
    key[16..24].copy_from_slice(&index.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Uniform direction on the unit sphere.
pub fn random_unit<R: Rng>(dim: usize, rng: &mut R) -> Vector {
    loop {
        let v = Vector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
        let norm = v.norm();
        if norm > 1e-12 {
            return v / norm;
        }
    }
}

/// Uniform point of the simplex with the given vertices (flat Dirichlet weights).
pub fn uniform_in_simplex<R: Rng>(vertices: &[Vector], rng: &mut R) -> Vector {
    let weights: Vec<f64> = vertices.iter().map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = weights.iter().sum();
    vertices
        .iter()
        .zip(&weights)
        .fold(Vector::zeros(vertices[0].len()), |acc, (v, w)| acc + v * (w / total))
}

/// Moves `from` (on the boundary) toward `anchor` until the smallest facet
/// slack of `poly` equals `margin`.
///
/// The minimum slack is concave along the segment, so bisection between a
/// point below and a point above the target converges to a crossing.
pub fn push_to_slack(poly: &Polytope, from: &Vector, anchor: &Vector, margin: f64) -> Result<Vector> {
    let at = |t: f64| from + (anchor - from) * t;
    if poly.min_slack(anchor) < margin {
        return Err(Error::SamplingExhausted(0.0));
    }
    if poly.min_slack(from) >= margin {
        return Ok(from.clone());
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if poly.min_slack(&at(mid)) < margin {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(at(hi))
}

/// Rejection sampler on the bounding box, accepting points with slack ≥ margin.
#[derive(Debug, Clone)]
pub struct InteriorSampler<'a> {
    poly: &'a Polytope,
    lo: Vector,
    hi: Vector,
    margin: f64,
}

impl<'a> InteriorSampler<'a> {
    /// Fails with `SamplingExhausted` when a pilot run accepts less than
    /// [`MIN_ACCEPTANCE`] of its proposals.
    pub fn new(poly: &'a Polytope, margin: f64, seed: u64) -> Result<Self> {
        let (lo, hi) = poly.bounding_box();
        let sampler = Self { poly, lo, hi, margin };
        let mut rng = stream_rng(seed, PILOT_STREAM, 0);
        let accepted = (0..PILOT_ATTEMPTS).filter(|_| sampler.accepts(&sampler.propose(&mut rng))).count();
        let rate = accepted as f64 / PILOT_ATTEMPTS as f64;
        if rate < MIN_ACCEPTANCE {
            return Err(Error::SamplingExhausted(rate));
        }
        Ok(sampler)
    }

    fn propose<R: Rng>(&self, rng: &mut R) -> Vector {
        Vector::from_fn(self.lo.len(), |i, _| self.lo[i] + (self.hi[i] - self.lo[i]) * rng.random::<f64>())
    }

    fn accepts(&self, x: &Vector) -> bool {
        self.poly.min_slack(x) >= self.margin
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Result<Vector> {
        for _ in 0..MAX_ATTEMPTS {
            let x = self.propose(rng);
            if self.accepts(&x) {
                return Ok(x);
            }
        }
        Err(Error::SamplingExhausted(1.0 / MAX_ATTEMPTS as f64))
    }
}

/// `cfg.count` uniform points with facet slack at least `cfg.interior_margin`.
pub fn sample_interior(poly: &Polytope, cfg: &SampleConfig) -> Result<Vec<Vector>> {
    cfg.validate()?;
    let sampler = InteriorSampler::new(poly, cfg.interior_margin, cfg.seed)?;
    (0..cfg.count)
        .map(|i| sampler.sample(&mut stream_rng(cfg.seed, 0, i as u64)))
        .collect()
}

/// Order-preserving map over sample indices, parallel when enabled.
pub(crate) fn map_indices<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..count).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..count).map(f).collect()
    }
}
