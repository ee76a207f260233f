//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::process::Command;
use std::time::Instant;

use common::*;
use hilbert_core::atlas::decompose;
use hilbert_core::experiments::{estimate_bilipschitz, isometry_check, nested_ratio_experiment, NestedTriple};
use hilbert_core::sampling::{random_unit, uniform_in_simplex};
use hilbert_core::{FlatteningAtlas, HilbertStructure, Polytope, SampleConfig, Vector, EPS_GEOM, EPS_INT};
use rand::Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn stressed(seed: u64, count: usize) -> SampleConfig {
    SampleConfig::new(seed, count, 1e-3).with_stress_margins(vec![1e-2, 1e-3, 1e-4])
}

fn simplex_isometry() -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    for n in 1..=4 {
        let start = Instant::now();
        let report = isometry_check(n, &SampleConfig::new(1, 10_000, 1e-3)).map_err(|e| e.to_string())?;
        let secs = start.elapsed().as_secs_f64();
        ok &= report.max_deviation <= 1e-9 && secs < 30.0;
        details.push(format!("n={n}: {:.1e} in {secs:.2}s", report.max_deviation));
    }
    check(ok, details.join(", "))
}

fn analytic_distance() -> Outcome {
    let half_ln3 = 0.5 * 3f64.ln();
    let (interval, square) = (fixture("interval"), fixture("square"));
    let d1 = HilbertStructure::new(&interval).distance(&v(&[0.0]), &v(&[0.5])).map_err(|e| e.to_string())?;
    let d2 = HilbertStructure::new(&square).distance(&v(&[0.5, 0.5]), &v(&[0.75, 0.5])).map_err(|e| e.to_string())?;
    let (e1, e2) = ((d1 - half_ln3).abs(), (d2 - half_ln3).abs());
    check(e1 <= 1e-12 && e2 <= 1e-12, format!("interval error {e1:.1e}, square error {e2:.1e}"))
}

fn projective_invariance() -> Outcome {
    let pentagon = fixture("pentagon");
    let h = HilbertStructure::new(&pentagon);
    let pts = interior_points(&pentagon, 1e-3, 3, 2000);
    let mut worst = 0.0f64;
    for map in planar_projective_maps() {
        let image: Vec<Vector> = pentagon.vertices().iter().map(|x| map.apply(x).unwrap()).collect();
        let image = Polytope::from_points(&image).map_err(|e| e.to_string())?;
        let hi = HilbertStructure::new(&image);
        for pair in pts.chunks(2) {
            let d = h.distance(&pair[0], &pair[1]).unwrap();
            let di = hi.distance(&map.apply(&pair[0]).unwrap(), &map.apply(&pair[1]).unwrap()).unwrap();
            worst = worst.max((d - di).abs());
        }
    }
    check(worst <= 1e-9, format!("3 maps x 1000 pairs, max deviation {worst:.1e}"))
}

/// The secant `d(p, p + t u) / t` exceeds `F(p, u)` by about `t / (2 s)` at
/// facet slack `s`, so the 1e-4 bound at `t = 1e-6` needs `s` well above 5e-3.
fn finsler_consistency() -> Outcome {
    const MARGIN: f64 = 1e-2;
    let mut worst = 0.0f64;
    for name in ALL {
        let poly = fixture(name);
        let h = HilbertStructure::new(&poly);
        let dirs = unit_directions(poly.dimension(), 4, 100);
        for (p, u) in interior_points(&poly, MARGIN, 4, 100).iter().zip(&dirs) {
            let t = 1e-6;
            let f = h.finsler_norm(p, u).unwrap();
            let slope = h.distance(p, &(p + u * t)).unwrap() / t;
            worst = worst.max((slope - f).abs() / f);
        }
    }
    check(worst <= 1e-4, format!("6 polytopes x 100 samples at slack >= {MARGIN:e}, max relative gap {worst:.1e}"))
}

fn decomposition_counts() -> Outcome {
    let expected = [("interval", 2), ("triangle", 6), ("square", 8), ("cube", 48), ("tetrahedron", 24)];
    let got: Vec<(String, usize)> = expected
        .iter()
        .map(|(name, _)| (name.to_string(), decompose(&fixture(name)).map(|c| c.len()).unwrap_or(0)))
        .collect();
    let ok = expected.iter().zip(&got).all(|((_, e), (_, g))| e == g);
    check(ok, got.iter().map(|(n, c)| format!("{n} {c}")).collect::<Vec<_>>().join(", "))
}

fn chart_agreement() -> Outcome {
    let (mut agree, mut forward, mut backward) = (0.0f64, 0.0f64, 0.0f64);
    let mut ball_points = (0, 0);
    for name in ALL {
        let a = FlatteningAtlas::new(&fixture(name)).map_err(|e| e.to_string())?;
        let n = a.dimension();
        for (i, j, shared) in a.adjacent_pairs() {
            let face: Vec<Vector> = shared.iter().map(|&k| a.cells()[i].vertices[k].clone()).collect();
            let mut r = rng(i as u64 * 1000 + j as u64, 1);
            let mut done = 0;
            while done < 1000 {
                let x = uniform_in_simplex(&face, &mut r);
                if a.polytope().min_slack(&x) <= EPS_INT {
                    continue;
                }
                agree = agree.max((a.flatten_in_cell(i, &x).unwrap() - a.flatten_in_cell(j, &x).unwrap()).norm());
                done += 1;
            }
        }
        for x in interior_points(a.polytope(), 1e-6, 6, 10_000) {
            forward = forward.max((a.unflatten(&a.flatten(&x).unwrap()).unwrap() - &x).norm());
        }
        for k in 0..10_000u64 {
            let mut r = rng(6, k);
            let y = random_unit(n, &mut r) * (20.0 * r.random::<f64>());
            let x = a.unflatten(&y).unwrap();
            ball_points.1 += 1;
            if a.polytope().min_slack(&x) > EPS_INT {
                ball_points.0 += 1;
                backward = backward.max((a.flatten(&x).unwrap() - &y).norm());
            }
        }
    }
    check(
        agree <= 1e-7 && forward <= 1e-8 && backward <= 1e-8,
        format!(
            "shared faces {agree:.1e}, unflatten(flatten) {forward:.1e}, flatten(unflatten) {backward:.1e} \
             on {}/{} radius-20 points with representable preimage",
            ball_points.0, ball_points.1
        ),
    )
}

fn bilipschitz() -> Outcome {
    let mut ok = true;
    let mut details = Vec::new();
    for name in ["square", "pentagon", "cube"] {
        let a = FlatteningAtlas::new(&fixture(name)).map_err(|e| e.to_string())?;
        let r = estimate_bilipschitz(&a, &stressed(1, 100_000)).map_err(|e| e.to_string())?;
        let stability = r.constant_stability();
        ok &= r.constant().is_finite() && r.min_ratio > 0.0 && stability <= 1.05;
        details.push(format!("{name} L={:.4} (x{stability:.4})", r.constant()));
    }
    let a = FlatteningAtlas::new(&fixture("interval")).map_err(|e| e.to_string())?;
    let r = estimate_bilipschitz(&a, &stressed(1, 100_000)).map_err(|e| e.to_string())?;
    ok &= (r.constant() - 1.0).abs() <= 1e-9;
    details.push(format!("interval L-1={:.1e}", r.constant() - 1.0));
    check(ok, details.join(", "))
}

fn nested_ratio() -> Outcome {
    let mut ok = true;
    let mut details = Vec::new();
    for dim in ["2d", "3d"] {
        let t = NestedTriple::new(
            fixture(&format!("nested{dim}_inner")),
            fixture(&format!("nested{dim}_middle")),
            fixture(&format!("nested{dim}_outer")),
        )
        .map_err(|e| e.to_string())?;
        let r = nested_ratio_experiment(&t, &stressed(1, 100_000)).map_err(|e| e.to_string())?;
        ok &= r.min_ratio >= 1.0 - 1e-12 && r.max_stability() <= 1.05;
        details.push(format!("{dim} min Q={:.6}, Q={:.4} (x{:.4})", r.min_ratio, r.max_ratio, r.max_stability()));
    }
    check(ok, details.join(", "))
}

fn metric_axioms() -> Outcome {
    let (mut asym, mut triangle, mut identity) = (0usize, 0.0f64, 0usize);
    for name in ALL {
        let poly = fixture(name);
        let h = HilbertStructure::new(&poly);
        let pts = interior_points(&poly, 1e-4, 9, 30_000);
        for t in pts.chunks(3) {
            let (p, q, r) = (&t[0], &t[1], &t[2]);
            let dpq = h.distance(p, q).unwrap();
            asym += usize::from(dpq != h.distance(q, p).unwrap());
            triangle = triangle.min(dpq + h.distance(q, r).unwrap() - h.distance(p, r).unwrap());
            identity += usize::from(h.distance(p, p).unwrap() != 0.0 || (dpq == 0.0) != ((p - q).norm() <= EPS_GEOM));
            let near = p + Vector::from_element(p.len(), 0.5 * EPS_GEOM / (p.len() as f64).sqrt());
            identity += usize::from(h.distance(p, &near).unwrap() != 0.0);
        }
    }
    check(
        asym == 0 && triangle >= -1e-9 && identity == 0,
        format!("asymmetric {asym}, min triangle slack {triangle:.1e}, identity failures {identity}"),
    )
}

fn cli_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_hilbert");
    let dir = std::env::temp_dir().join(format!("hilbert-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let (square, cube) = (fixture_path("square"), fixture_path("cube"));
    let runs: Vec<Vec<String>> = vec![
        vec!["estimate-lipschitz".into(), "--polytope".into(), square.display().to_string(), "--samples".into(), "5000".into(), "--seed".into(), "42".into()],
        vec!["estimate-cells".into(), "--polytope".into(), cube.display().to_string(), "--samples".into(), "500".into(), "--seed".into(), "42".into()],
        vec!["check-isometry".into(), "--dim".into(), "3".into(), "--samples".into(), "2000".into(), "--seed".into(), "42".into()],
    ];
    let mut identical = 0;
    for (k, args) in runs.iter().enumerate() {
        let outputs: Vec<(Vec<u8>, Vec<u8>)> = (0..2)
            .map(|rep| {
                let csv = dir.join(format!("{k}-{rep}.csv"));
                let json = Command::new(bin).args(args).output().unwrap().stdout;
                Command::new(bin).args(args).arg("--out").arg(&csv).status().unwrap();
                (json, std::fs::read(&csv).unwrap_or_default())
            })
            .collect();
        if outputs[0] == outputs[1] && !outputs[0].0.is_empty() && !outputs[0].1.is_empty() {
            identical += 1;
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    check(identical == runs.len(), format!("{identical}/{} commands byte-identical (JSON and CSV)", runs.len()))
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 10] = [
        ("simplex isometry", simplex_isometry),
        ("analytic distance oracle", analytic_distance),
        ("projective invariance", projective_invariance),
        ("Finsler/distance consistency", finsler_consistency),
        ("decomposition combinatorics", decomposition_counts),
        ("chart agreement and round trips", chart_agreement),
        ("empirical bi-Lipschitz constant", bilipschitz),
        ("nested simplex ratio", nested_ratio),
        ("metric axioms", metric_axioms),
        ("CLI determinism", cli_determinism),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
