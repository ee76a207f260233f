#![allow(dead_code)]

use std::path::PathBuf;

use hilbert_core::sampling::{random_unit, stream_rng, InteriorSampler};
use hilbert_core::{Polytope, Vector};
use proptest::prelude::*;
use rand_chacha::ChaCha8Rng;

pub const PLANAR: [&str; 3] = ["triangle", "square", "pentagon"];
pub const ALL: [&str; 6] = ["interval", "triangle", "square", "pentagon", "tetrahedron", "cube"];

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(format!("{name}.json"))
}

pub fn fixture(name: &str) -> Polytope {
    let text = std::fs::read_to_string(fixture_path(name)).unwrap();
    Polytope::from_json(&text, hilbert_core::EPS_GEOM).unwrap()
}

pub fn v(c: &[f64]) -> Vector {
    Vector::from_column_slice(c)
}

pub fn rng(seed: u64, index: u64) -> ChaCha8Rng {
    stream_rng(seed, 0xfeed, index)
}

/// `count` interior points with slack at least `margin`, drawn from `seed`.
pub fn interior_points(poly: &Polytope, margin: f64, seed: u64, count: usize) -> Vec<Vector> {
    let sampler = InteriorSampler::new(poly, margin, seed).unwrap();
    (0..count).map(|i| sampler.sample(&mut rng(seed, i as u64)).unwrap()).collect()
}

pub fn unit_directions(dim: usize, seed: u64, count: usize) -> Vec<Vector> {
    (0..count).map(|i| random_unit(dim, &mut rng(seed ^ 0xd1ec, i as u64))).collect()
}

/// Convex combination of the vertices with weights bounded below, hence
/// well inside the polytope.
pub fn interior_point(poly: &Polytope) -> impl Strategy<Value = Vector> {
    let verts = poly.vertices().to_vec();
    prop::collection::vec(0.05f64..1.0, verts.len()).prop_map(move |w| {
        let total: f64 = w.iter().sum();
        verts.iter().zip(&w).fold(Vector::zeros(verts[0].len()), |acc, (p, wi)| acc + p * (wi / total))
    })
}

pub fn direction(dim: usize) -> impl Strategy<Value = Vector> {
    prop::collection::vec(-1.0f64..1.0, dim)
        .prop_filter("nonzero", |c| c.iter().map(|x| x * x).sum::<f64>() > 1e-4)
        .prop_map(Vector::from_vec)
}

/// Three planar projective maps that keep the unit disc in the affine chart.
pub fn planar_projective_maps() -> Vec<hilbert_core::ProjectiveMap> {
    let rows: [[f64; 9]; 3] = [
        [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.2, 0.1, 1.0],
        [2.0, 0.5, 0.3, -0.4, 1.5, -0.2, 0.3, -0.25, 1.2],
        [0.0, 1.0, 1.0, 1.0, 0.0, -1.0, -0.3, 0.3, 2.0],
    ];
    rows.iter()
        .map(|r| hilbert_core::ProjectiveMap::new(nalgebra::DMatrix::from_row_slice(3, 3, r)).unwrap())
        .collect()
}
