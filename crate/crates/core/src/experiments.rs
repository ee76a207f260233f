//! Seeded estimators for the distortion constants of the flattening map.
//!
//! None of these constants has a closed form. Each estimator reports the
//! sampled extremes of a ratio together with the same extremes over the first
//! half of the sample, so a caller can judge whether the supremum has settled.

use serde::Serialize;

use crate::atlas::FlatteningAtlas;
use crate::error::{Error, Result};
use crate::hilbert::HilbertStructure;
use crate::lattice::FaceLattice;
use crate::polytope::{Location, Polytope, Vector, EPS_GEOM};
use crate::sampling::{
    map_indices, push_to_slack, random_unit, stream_rng, uniform_in_simplex, InteriorSampler, SampleConfig,
};
use crate::simplex::{chart, dlh_norm, phi, SimplexPoint, StandardSimplex};

/// Pairs closer than this in Hilbert distance are skipped.
pub const MIN_PAIR_DISTANCE: f64 = 1e-9;
const HISTOGRAM_BINS: usize = 20;
/// Relative slack allowed in the inclusion monotonicity check.
const MONOTONE_TOL: f64 = 1e-9;

const STREAM_PAIRS: u64 = 1;
const STREAM_NESTED: u64 = 2;
const STREAM_ISOMETRY: u64 = 3;
const STREAM_CELLS: u64 = 1 << 32;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioReport {
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub histogram: Histogram,
    pub sample_count: usize,
    pub skipped: usize,
    /// Extremes over the first half of the requested samples.
    pub half_min_ratio: f64,
    pub half_max_ratio: f64,
}

impl RatioReport {
    /// Builds a report from per-sample ratios in sample order; `None` marks a skipped sample.
    pub fn from_ratios(ratios: &[Option<f64>]) -> Self {
        let extremes = |rs: &[Option<f64>]| {
            rs.iter()
                .flatten()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| (lo.min(r), hi.max(r)))
        };
        let (min_ratio, max_ratio) = extremes(ratios);
        let (half_min_ratio, half_max_ratio) = extremes(&ratios[..ratios.len().div_ceil(2)]);
        let values: Vec<f64> = ratios.iter().flatten().copied().collect();
        Self {
            min_ratio,
            max_ratio,
            histogram: histogram(&values, min_ratio, max_ratio),
            sample_count: values.len(),
            skipped: ratios.len() - values.len(),
            half_min_ratio,
            half_max_ratio,
        }
    }

    /// Ratios `num / den` for each pair, skipping pairs with a nonpositive denominator.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Self {
        let ratios: Vec<Option<f64>> = pairs.iter().map(|&(n, d)| (d > 0.0).then(|| n / d)).collect();
        Self::from_ratios(&ratios)
    }

    /// Two-sided distortion `max(max_ratio, 1 / min_ratio)`.
    pub fn constant(&self) -> f64 {
        self.max_ratio.max(1.0 / self.min_ratio)
    }

    pub fn half_constant(&self) -> f64 {
        self.half_max_ratio.max(1.0 / self.half_min_ratio)
    }

    /// Growth of [`constant`](Self::constant) from the half sample to the full sample.
    pub fn constant_stability(&self) -> f64 {
        self.constant() / self.half_constant()
    }

    /// Growth of `max_ratio` from the half sample to the full sample.
    pub fn max_stability(&self) -> f64 {
        self.max_ratio / self.half_max_ratio
    }
}

fn histogram(values: &[f64], lo: f64, hi: f64) -> Histogram {
    if values.is_empty() {
        return Histogram { edges: vec![], counts: vec![] };
    }
    let width = hi - lo;
    if !(width > 0.0) {
        return Histogram { edges: vec![lo, hi], counts: vec![values.len()] };
    }
    let edges = (0..=HISTOGRAM_BINS).map(|b| lo + width * b as f64 / HISTOGRAM_BINS as f64).collect();
    let mut counts = vec![0; HISTOGRAM_BINS];
    for &v in values {
        let bin = (((v - lo) / width) * HISTOGRAM_BINS as f64) as usize;
        counts[bin.min(HISTOGRAM_BINS - 1)] += 1;
    }
    Histogram { edges, counts }
}

/// `d_P(x, y) / |F(x) - F(y)|`, or `None` when the points are within
/// [`MIN_PAIR_DISTANCE`] of each other.
pub fn pair_ratio(atlas: &FlatteningAtlas, x: &Vector, y: &Vector) -> Result<Option<f64>> {
    let d = HilbertStructure::new(atlas.polytope()).distance(x, y)?;
    if d <= MIN_PAIR_DISTANCE {
        return Ok(None);
    }
    let e = (atlas.flatten(x)? - atlas.flatten(y)?).norm();
    Ok(Some(d / e))
}

/// A point at facet slack `margin`, reached from a random point of a random
/// cell's boundary face by moving toward the polytope barycenter.
fn stress_point<R: rand::Rng>(atlas: &FlatteningAtlas, cell: Option<usize>, margin: f64, rng: &mut R) -> Result<Vector> {
    let n = atlas.dimension();
    let i = cell.unwrap_or_else(|| rng.random_range(0..atlas.cells().len()));
    let face = &atlas.cells()[i].vertices[..n];
    let on_boundary = uniform_in_simplex(face, rng);
    push_to_slack(atlas.polytope(), &on_boundary, atlas.center(), margin)
}

/// Sampled two-sided ratio between Hilbert distance and the Euclidean
/// distance of flattened images.
///
/// Sample `i` pairs a uniform point with either a uniform point or, for the
/// stress quota, a point at one of `cfg.stress_margins`.
pub fn estimate_bilipschitz(atlas: &FlatteningAtlas, cfg: &SampleConfig) -> Result<RatioReport> {
    cfg.validate()?;
    let sampler = InteriorSampler::new(atlas.polytope(), cfg.interior_margin, cfg.seed)?;
    let ratios = map_indices(cfg.count, |i| {
        let mut rng = stream_rng(cfg.seed, STREAM_PAIRS, i as u64);
        let x = match cfg.stress_margin_for(i) {
            Some(m) => stress_point(atlas, None, m, &mut rng)?,
            None => sampler.sample(&mut rng)?,
        };
        let y = sampler.sample(&mut rng)?;
        pair_ratio(atlas, &x, &y)
    });
    let ratios = ratios.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(RatioReport::from_ratios(&ratios))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellReport {
    pub cell: usize,
    /// `max(max_ratio, 1 / min_ratio)` of the Finsler ratio on this cell.
    pub k_hat: f64,
    /// Whether the standard simplex lies inside the chart image of the polytope.
    pub contains_simplex: bool,
    /// Samples with `F_{P_i} > F_H` beyond `1e-9` relative, counted only when
    /// `contains_simplex` holds (inclusion forces `F_{P_i} ≤ F_H`).
    pub monotonicity_violations: usize,
    pub report: RatioReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellConstants {
    pub cells: Vec<CellReport>,
    pub sup_k_hat: f64,
    pub half_sup_k_hat: f64,
}

impl CellConstants {
    pub fn stability(&self) -> f64 {
        self.sup_k_hat / self.half_sup_k_hat
    }
}

/// Per-cell ratio `F_H(L_i x, L_i v) / F_{P_i}(L_i x, L_i v)` with `P_i = L_i(P)`,
/// for `x` in cell `i` and unit `v`.
pub fn estimate_cell_constants(atlas: &FlatteningAtlas, cfg: &SampleConfig) -> Result<CellConstants> {
    cfg.validate()?;
    let n = atlas.dimension();
    let simplex = StandardSimplex::new(n);
    let simplex_h = HilbertStructure::new(simplex.chart_polytope());
    let mut cells = Vec::with_capacity(atlas.cells().len());

    for (i, cell) in atlas.cells().iter().enumerate() {
        let image = atlas.chart_polytope(i)?;
        let image_h = HilbertStructure::new(&image);
        let contains_simplex = simplex
            .chart_polytope()
            .vertices()
            .iter()
            .all(|v| image.contains(v, 1e-9) != Location::Outside);
        let chart_map = atlas.chart(i);

        let samples = map_indices(cfg.count, |j| -> Result<(f64, f64)> {
            let mut rng = stream_rng(cfg.seed, STREAM_CELLS + i as u64, j as u64);
            let x = match cfg.stress_margin_for(j) {
                Some(m) => stress_point(atlas, Some(i), m, &mut rng)?,
                None => uniform_cell_point(atlas.polytope(), &cell.vertices, cfg.interior_margin, &mut rng)?,
            };
            let v = random_unit(n, &mut rng);
            let y = chart(chart_map.apply(&x).as_slice());
            let w = chart(chart_map.apply_linear(&v).as_slice());
            Ok((simplex_h.finsler_norm(&y, &w)?, image_h.finsler_norm(&y, &w)?))
        });
        let samples = samples.into_iter().collect::<Result<Vec<_>>>()?;
        let monotonicity_violations = if contains_simplex {
            samples.iter().filter(|(fh, fp)| *fp > *fh * (1.0 + MONOTONE_TOL)).count()
        } else {
            0
        };
        let report = RatioReport::from_pairs(&samples);
        cells.push(CellReport { cell: i, k_hat: report.constant(), contains_simplex, monotonicity_violations, report });
    }

    let sup_k_hat = cells.iter().map(|c| c.k_hat).fold(0.0, f64::max);
    let half_sup_k_hat = cells.iter().map(|c| c.report.half_constant()).fold(0.0, f64::max);
    Ok(CellConstants { cells, sup_k_hat, half_sup_k_hat })
}

fn uniform_cell_point<R: rand::Rng>(poly: &Polytope, vertices: &[Vector], margin: f64, rng: &mut R) -> Result<Vector> {
    for _ in 0..1_000_000 {
        let x = uniform_in_simplex(vertices, rng);
        if poly.min_slack(&x) >= margin {
            return Ok(x);
        }
    }
    Err(Error::SamplingExhausted(1e-6))
}

/// Validated nested triple `S ⊆ C1 ⊆ C2` of simplices.
#[derive(Debug, Clone)]
pub struct NestedTriple {
    pub inner: Polytope,
    pub middle: Polytope,
    pub outer: Polytope,
    /// Vertex ids (in `inner`) of the shared `k`-face, for `k = 0..n`.
    pub shared_flag: Vec<Vec<usize>>,
}

impl NestedTriple {
    /// Checks simplicity, inclusion by vertex containment, a unique shared
    /// `k`-face for every `k < n` (affine hulls compared through the active
    /// facet hyperplanes) forming a flag, and that `S` and `C1` meet the
    /// boundary of the next simplex only on the shared hyperplane (unless
    /// `C1 = C2`).
    pub fn new(inner: Polytope, middle: Polytope, outer: Polytope) -> Result<Self> {
        let n = inner.dimension();
        let violated = |msg: &str| Err(Error::HypothesisViolated(msg.into()));
        if middle.dimension() != n || outer.dimension() != n {
            return violated("dimensions differ");
        }
        if [&inner, &middle, &outer].iter().any(|p| p.vertices().len() != n + 1) {
            return violated("all three polytopes must be simplices");
        }
        let inside = |a: &Polytope, b: &Polytope| a.vertices().iter().all(|v| b.contains(v, EPS_GEOM) != Location::Outside);
        if !inside(&inner, &middle) || !inside(&middle, &outer) {
            return violated("simplices are not nested");
        }

        let inner_lat = FaceLattice::new(&inner);
        let middle_lat = FaceLattice::new(&middle);
        let outer_lat = FaceLattice::new(&outer);
        let mut shared_flag: Vec<Vec<usize>> = Vec::with_capacity(n);
        for k in 0..n {
            let matches: Vec<&Vec<usize>> = inner_lat
                .range(k)
                .map(|f| &inner_lat.faces()[f].vertex_ids)
                .filter(|ids| {
                    let pts: Vec<&Vector> = ids.iter().map(|&i| &inner.vertices()[i]).collect();
                    in_hull_of_some_face(&pts, &middle, &middle_lat, k) && in_hull_of_some_face(&pts, &outer, &outer_lat, k)
                })
                .collect();
            if matches.len() != 1 {
                return Err(Error::HypothesisViolated(format!(
                    "expected one shared {k}-face, found {}",
                    matches.len()
                )));
            }
            if let Some(prev) = shared_flag.last() {
                if !prev.iter().all(|i| matches[0].contains(i)) {
                    return violated("shared faces do not form a flag");
                }
            }
            shared_flag.push(matches[0].clone());
        }

        let facet = &shared_flag[n - 1];
        let plane_pts: Vec<&Vector> = facet.iter().map(|&i| &inner.vertices()[i]).collect();
        let off_plane_interior = |a: &Polytope, b: &Polytope| {
            let on_plane = |v: &Vector| {
                b.facets().iter().any(|h| {
                    h.slack(v).abs() <= EPS_GEOM && plane_pts.iter().all(|p| h.slack(p).abs() <= EPS_GEOM)
                })
            };
            a.vertices().iter().filter(|v| !on_plane(v)).all(|v| b.min_slack(v) > EPS_GEOM)
        };
        // C1 = C2 is allowed and gives Q ≡ 1.
        let same = |a: &Polytope, b: &Polytope| {
            a.vertices().iter().all(|v| b.vertices().iter().any(|w| (v - w).norm() <= EPS_GEOM * (1.0 + v.norm())))
        };
        if !off_plane_interior(&inner, &middle) || (!same(&middle, &outer) && !off_plane_interior(&middle, &outer)) {
            return violated("boundaries meet outside the shared facet");
        }
        Ok(Self { inner, middle, outer, shared_flag })
    }
}

fn in_hull_of_some_face(pts: &[&Vector], poly: &Polytope, lat: &FaceLattice, k: usize) -> bool {
    lat.range(k).any(|f| {
        lat.faces()[f]
            .active_facets
            .iter()
            .all(|&h| pts.iter().all(|p| poly.facets()[h].slack(p).abs() <= EPS_GEOM * (1.0 + p.norm())))
    })
}

/// Sampled `Q(x, v) = F_{C1}(x, v) / F_{C2}(x, v)` over `x ∈ S`, unit `v`.
///
/// The stress quota places `x` at the configured slacks from a random facet
/// of `S`; the shared facet is where `C1` and `C2` both touch `S`.
pub fn nested_ratio_experiment(triple: &NestedTriple, cfg: &SampleConfig) -> Result<RatioReport> {
    cfg.validate()?;
    let n = triple.inner.dimension();
    let middle_h = HilbertStructure::new(&triple.middle);
    let outer_h = HilbertStructure::new(&triple.outer);
    let inner_center = triple.inner.barycenter();

    let samples = map_indices(cfg.count, |j| -> Result<(f64, f64)> {
        let mut rng = stream_rng(cfg.seed, STREAM_NESTED, j as u64);
        let x = match cfg.stress_margin_for(j) {
            Some(m) => {
                // A facet of S (the shared one included), pushed inward to slack `m`.
                let skip = rand::Rng::random_range(&mut rng, 0..=n);
                let facet: Vec<Vector> = (0..=n).filter(|&k| k != skip).map(|k| triple.inner.vertices()[k].clone()).collect();
                push_to_slack(&triple.inner, &uniform_in_simplex(&facet, &mut rng), &inner_center, m)?
            }
            None => uniform_cell_point(&triple.middle, triple.inner.vertices(), cfg.interior_margin, &mut rng)?,
        };
        let v = random_unit(n, &mut rng);
        Ok((middle_h.finsler_norm(&x, &v)?, outer_h.finsler_norm(&x, &v)?))
    });
    let samples = samples.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(RatioReport::from_pairs(&samples))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsometryReport {
    pub dimension: usize,
    pub pairs: usize,
    pub max_deviation: f64,
}

/// Largest `|d_H(x, y) - ½ (max - min)(phi(x) - phi(y))|` over sampled pairs
/// of the open standard simplex.
pub fn isometry_check(n: usize, cfg: &SampleConfig) -> Result<IsometryReport> {
    cfg.validate()?;
    if !(1..=4).contains(&n) {
        return Err(Error::DegenerateInput(format!("isometry check supports dimensions 1..=4, got {n}")));
    }
    let simplex = StandardSimplex::new(n);
    let corners: Vec<Vector> = (0..=n)
        .map(|k| Vector::from_fn(n + 1, |r, _| if r == k { 1.0 } else { 0.0 }))
        .collect();
    let draw = |rng: &mut rand_chacha::ChaCha8Rng| -> Result<SimplexPoint> {
        for _ in 0..1_000_000 {
            let p = uniform_in_simplex(&corners, rng);
            if simplex.chart_polytope().min_slack(&chart(p.as_slice())) >= cfg.interior_margin {
                return SimplexPoint::normalized(p.iter().copied().collect());
            }
        }
        Err(Error::SamplingExhausted(1e-6))
    };
    let deviations = map_indices(cfg.count, |i| -> Result<f64> {
        let mut rng = stream_rng(cfg.seed, STREAM_ISOMETRY, i as u64);
        let x = draw(&mut rng)?;
        let y = draw(&mut rng)?;
        pair_deviation(&simplex, &x, &y)
    });
    let max_deviation = deviations.into_iter().collect::<Result<Vec<_>>>()?.into_iter().fold(0.0, f64::max);
    Ok(IsometryReport { dimension: n, pairs: cfg.count, max_deviation })
}

/// `|d_H(x, y) - ‖phi(x) - phi(y)‖|` for one pair.
pub fn pair_deviation(simplex: &StandardSimplex, x: &SimplexPoint, y: &SimplexPoint) -> Result<f64> {
    let d = simplex.distance(x, y)?;
    Ok((d - dlh_norm(&phi(x).sub(&phi(y)))).abs())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridRow {
    pub x: Vec<f64>,
    pub image: Vec<f64>,
}

/// Flattened images of a `resolution × resolution` lattice over the bounding
/// box of a planar polytope, at points `lo + (j+1)/(resolution+1)·(hi - lo)`.
/// Points outside the open polytope are left out.
pub fn emit_grid(atlas: &FlatteningAtlas, resolution: usize) -> Result<Vec<GridRow>> {
    let poly = atlas.polytope();
    if poly.dimension() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: poly.dimension() });
    }
    let (lo, hi) = poly.bounding_box();
    let step = |axis: usize, j: usize| lo[axis] + (hi[axis] - lo[axis]) * (j + 1) as f64 / (resolution + 1) as f64;
    let mut rows = Vec::new();
    for a in 0..resolution {
        for b in 0..resolution {
            let x = Vector::from_vec(vec![step(0, a), step(1, b)]);
            if poly.require_interior(&x).is_err() {
                continue;
            }
            let y = atlas.flatten(&x)?;
            rows.push(GridRow { x: x.iter().copied().collect(), image: y.iter().copied().collect() });
        }
    }
    Ok(rows)
}
