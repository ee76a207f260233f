mod common;

use common::*;
use hilbert_core::experiments::{
    emit_grid, estimate_bilipschitz, nested_ratio_experiment, NestedTriple, RatioReport,
};
use hilbert_core::{Error, FlatteningAtlas, HilbertStructure, Polytope, SampleConfig};

fn triple(dim: &str) -> NestedTriple {
    NestedTriple::new(
        fixture(&format!("nested{dim}_inner")),
        fixture(&format!("nested{dim}_middle")),
        fixture(&format!("nested{dim}_outer")),
    )
    .unwrap()
}

fn stressed(seed: u64, count: usize) -> SampleConfig {
    SampleConfig::new(seed, count, 1e-3).with_stress_margins(vec![1e-2, 1e-3, 1e-4])
}

#[test]
fn bilipschitz_accounting_and_prefix() {
    let atlas = FlatteningAtlas::new(&fixture("pentagon")).unwrap();
    let full = estimate_bilipschitz(&atlas, &stressed(8, 2000)).unwrap();
    let half = estimate_bilipschitz(&atlas, &stressed(8, 1000)).unwrap();
    assert_eq!(full.sample_count + full.skipped, 2000);
    assert_eq!(full.histogram.counts.iter().sum::<usize>(), full.sample_count);
    assert_eq!(half.max_ratio, full.half_max_ratio);
    assert_eq!(half.min_ratio, full.half_min_ratio);
    assert!(full.min_ratio > 0.0 && full.max_ratio.is_finite());
    assert!(full.constant() >= full.half_constant());
}

#[test]
fn interval_flattening_is_an_isometry() {
    let atlas = FlatteningAtlas::new(&fixture("interval")).unwrap();
    let report = estimate_bilipschitz(&atlas, &stressed(1, 5000)).unwrap();
    assert!((report.constant() - 1.0).abs() <= 1e-9, "{}", report.constant());
}

#[test]
fn identical_outer_simplices_give_unit_ratio() {
    let t = NestedTriple::new(fixture("nested2d_inner"), fixture("nested2d_middle"), fixture("nested2d_middle")).unwrap();
    let report = nested_ratio_experiment(&t, &stressed(4, 2000)).unwrap();
    assert_eq!(report.min_ratio, 1.0);
    assert_eq!(report.max_ratio, 1.0);
}

#[test]
fn nested_ratio_is_at_least_one() {
    for dim in ["2d", "3d"] {
        let t = triple(dim);
        assert_eq!(t.shared_flag.len(), if dim == "2d" { 2 } else { 3 });
        let report = nested_ratio_experiment(&t, &stressed(5, 5000)).unwrap();
        assert!(report.min_ratio >= 1.0 - 1e-12, "{dim}: {}", report.min_ratio);
        assert_eq!(report.sample_count, 5000);
    }
}

#[test]
fn nested_hypotheses_are_checked() {
    let (s, c1, c2) = (fixture("nested2d_inner"), fixture("nested2d_middle"), fixture("nested2d_outer"));
    let bad = |r: Result<NestedTriple, Error>| matches!(r, Err(Error::HypothesisViolated(_)));
    assert!(bad(NestedTriple::new(c1.clone(), s.clone(), c2.clone())));
    assert!(bad(NestedTriple::new(s.clone(), c1.clone(), fixture("square"))));
    // A middle simplex that shares no vertex with S.
    let shifted = Polytope::from_points(&[v(&[-1.0, -1.0]), v(&[3.0, -1.0]), v(&[-1.0, 3.0])]).unwrap();
    assert!(bad(NestedTriple::new(s.clone(), shifted, c2.clone())));
    assert!(bad(NestedTriple::new(s, c1, fixture("nested3d_outer"))));
}

#[test]
fn swapped_ratios_are_reciprocal() {
    let (inner, outer) = (fixture("triangle"), fixture("square"));
    let (hi, ho) = (HilbertStructure::new(&inner), HilbertStructure::new(&outer));
    let dirs = unit_directions(2, 12, 500);
    let pairs: Vec<(f64, f64)> = interior_points(&inner, 1e-3, 12, 500)
        .iter()
        .zip(&dirs)
        .map(|(p, d)| (hi.finsler_norm(p, d).unwrap(), ho.finsler_norm(p, d).unwrap()))
        .collect();
    let swapped: Vec<(f64, f64)> = pairs.iter().map(|&(a, b)| (b, a)).collect();
    let (a, b) = (RatioReport::from_pairs(&pairs), RatioReport::from_pairs(&swapped));
    assert!((a.max_ratio * b.min_ratio - 1.0).abs() <= 1e-9);
    assert!((a.min_ratio * b.max_ratio - 1.0).abs() <= 1e-9);
    assert!((a.constant() - b.constant()).abs() <= 1e-9 * a.constant());
}

#[test]
fn grid_rows() {
    let atlas = FlatteningAtlas::new(&fixture("square")).unwrap();
    assert!(emit_grid(&atlas, 0).unwrap().is_empty());
    let rows = emit_grid(&atlas, 50).unwrap();
    assert!(!rows.is_empty() && rows.len() <= 2500);
    assert!(rows.iter().all(|r| r.image.iter().all(|c| c.is_finite())));
    let center = emit_grid(&atlas, 3).unwrap().into_iter().find(|r| r.x == vec![0.5, 0.5]).unwrap();
    assert!(center.image.iter().all(|c| c.abs() <= 1e-12));
    let pentagon = FlatteningAtlas::new(&fixture("pentagon")).unwrap();
    let rows = emit_grid(&pentagon, 20).unwrap();
    assert!(rows.len() < 400 && rows.iter().all(|r| pentagon.polytope().min_slack(&v(&r.x)) > 0.0));
    let cube = FlatteningAtlas::new(&fixture("cube")).unwrap();
    assert!(emit_grid(&cube, 5).is_err());
}
