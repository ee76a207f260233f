//! Command-line driver.
//!
//! Results go to standard output as JSON (keys sorted), or to a CSV file with
//! `--out`. Exit status is 0 on success, 1 on usage or validation errors and
//! 2 on numeric failures.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::atlas::FlatteningAtlas;
use crate::error::Error;
use crate::experiments::{
    emit_grid, estimate_bilipschitz, estimate_cell_constants, isometry_check, nested_ratio_experiment, NestedTriple,
    RatioReport,
};
use crate::hilbert::HilbertStructure;
use crate::polytope::{Polytope, Vector, EPS_GEOM};
use crate::sampling::SampleConfig;

/// Environment variable overriding the geometric tolerance.
pub const EPS_ENV: &str = "HILBERT_EPS";

#[derive(Debug, Parser)]
#[command(name = "hilbert", version, about = "Hilbert geometry of convex polytopes and their flattening")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Hilbert distance between two interior points
    Distance {
        #[command(flatten)]
        io: PolytopeIo,
        /// First point, comma-separated
        #[arg(long, value_parser = parse_vector, allow_hyphen_values = true)]
        p: Coords,
        /// Second point
        #[arg(long, value_parser = parse_vector, allow_hyphen_values = true)]
        q: Coords,
    },
    /// Finsler norm of a tangent vector at an interior point
    Finsler {
        #[command(flatten)]
        io: PolytopeIo,
        /// Base point
        #[arg(long, value_parser = parse_vector, allow_hyphen_values = true)]
        p: Coords,
        /// Tangent vector
        #[arg(long, value_parser = parse_vector, allow_hyphen_values = true)]
        v: Coords,
    },
    /// Barycentric cell decomposition
    Subdivide {
        #[command(flatten)]
        io: PolytopeIo,
    },
    /// Image of an interior point under the flattening map
    Flatten {
        #[command(flatten)]
        io: PolytopeIo,
        /// Interior point
        #[arg(long, value_parser = parse_vector, allow_hyphen_values = true)]
        x: Coords,
    },
    /// Preimage of a point of R^n under the flattening map
    Unflatten {
        #[command(flatten)]
        io: PolytopeIo,
        /// Point of R^n
        #[arg(long, value_parser = parse_vector, allow_hyphen_values = true)]
        y: Coords,
    },
    /// Sampled bi-Lipschitz ratio of the flattening map
    EstimateLipschitz {
        #[command(flatten)]
        io: PolytopeIo,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Sampled per-cell Finsler comparison constants
    EstimateCells {
        #[command(flatten)]
        io: PolytopeIo,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Sampled Finsler ratio of a nested simplex triple S ⊆ C1 ⊆ C2
    NestedRatio {
        /// Simplex S
        #[arg(long)]
        inner: PathBuf,
        /// Simplex C1 containing S
        #[arg(long)]
        middle: PathBuf,
        /// Simplex C2 containing C1
        #[arg(long)]
        outer: PathBuf,
        /// Write CSV here instead of JSON to standard output
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Compare simplex distance with the log-coordinate norm
    CheckIsometry {
        /// Simplex dimension (1 to 4)
        #[arg(long)]
        dim: usize,
        /// Write CSV here instead of JSON to standard output
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Flattened images of a grid over a planar polytope
    EmitGrid {
        #[command(flatten)]
        io: PolytopeIo,
        #[arg(long, default_value_t = 50)]
        resolution: usize,
    },
}

#[derive(Debug, Args)]
struct PolytopeIo {
    /// Polytope JSON file
    #[arg(long)]
    polytope: PathBuf,
    /// Write CSV here instead of JSON to standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Sampling {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    /// Minimum facet slack of uniform samples
    #[arg(long, default_value_t = 1e-3)]
    margin: f64,
    /// Facet slacks for the boundary-stress quota
    #[arg(long, value_parser = parse_vector, default_value = "1e-2,1e-3,1e-4")]
    stress_margins: Coords,
}

impl Sampling {
    fn config(&self) -> SampleConfig {
        SampleConfig::new(self.seed, self.samples, self.margin).with_stress_margins(self.stress_margins.0.clone())
    }
}

/// Comma-separated coordinates, e.g. `0.5,0.25`.
#[derive(Debug, Clone)]
struct Coords(Vec<f64>);

fn parse_vector(s: &str) -> Result<Coords, String> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("bad number {t:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()
        .map(Coords)
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Geometry(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Geometry(e)
    }
}

/// Tabular output for `--out`.
struct Table {
    header: Vec<String>,
    rows: Vec<Vec<Field>>,
}

/// CSV cell: counts and indices print as integers, reals with 17 significant digits.
#[derive(Debug, Clone, Copy)]
enum Field {
    Count(usize),
    Real(f64),
}

impl From<usize> for Field {
    fn from(v: usize) -> Self {
        Field::Count(v)
    }
}

impl From<f64> for Field {
    fn from(v: f64) -> Self {
        Field::Real(v)
    }
}

impl std::fmt::Display for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Field::Count(v) => write!(f, "{v}"),
            Field::Real(v) => write!(f, "{v:.16e}"),
        }
    }
}

fn reals(values: &[f64]) -> Vec<Field> {
    values.iter().map(|&v| Field::Real(v)).collect()
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: vec![] }
    }

    fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Field::to_string).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

struct Output {
    json: Value,
    table: Table,
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(stdout, "{text}") } else { write!(stderr, "{text}") };
            return code;
        }
    };
    let eps = match std::env::var(EPS_ENV) {
        Ok(s) => match s.parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => v,
            _ => {
                let _ = writeln!(stderr, "error: {EPS_ENV} must be a positive number, got {s:?}");
                return 1;
            }
        },
        Err(_) => EPS_GEOM,
    };

    let (out_path, result) = execute(cli.command, eps);
    match result.and_then(|o| emit(o, out_path.as_deref(), stdout)) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) | Err(Failure::Io(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            1
        }
        Err(Failure::Geometry(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_numeric() {
                2
            } else {
                1
            }
        }
    }
}

fn emit(output: Output, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, output.table.render()).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => {
            let text = serde_json::to_string_pretty(&output.json).map_err(|e| Failure::Io(e.to_string()))?;
            writeln!(stdout, "{text}").map_err(|e| Failure::Io(e.to_string()))
        }
    }
}

fn load(path: &Path, eps: f64) -> Result<Polytope, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    Ok(Polytope::from_json(&text, eps)?)
}

fn point(coords: &Coords, poly: &Polytope, name: &str) -> Result<Vector, Failure> {
    let coords = &coords.0;
    if coords.len() != poly.dimension() {
        return Err(Failure::Usage(format!(
            "--{name} has {} coordinates, polytope dimension is {}",
            coords.len(),
            poly.dimension()
        )));
    }
    Ok(Vector::from_column_slice(coords))
}

fn to_vec(v: &Vector) -> Vec<f64> {
    v.iter().copied().collect()
}

fn report_json(report: &RatioReport) -> Value {
    serde_json::to_value(report).expect("reports serialize")
}

fn histogram_table(report: &RatioReport) -> Table {
    let mut table = Table::new(&["lower", "upper", "count"]);
    let h = &report.histogram;
    for (b, &count) in h.counts.iter().enumerate() {
        table.rows.push(vec![h.edges[b].into(), h.edges[b + 1].into(), count.into()]);
    }
    table
}

fn execute(command: Command, eps: f64) -> (Option<PathBuf>, Result<Output, Failure>) {
    match command {
        Command::Distance { io, p, q } => {
            let out = io.out.clone();
            (out, (|| {
                let poly = load(&io.polytope, eps)?;
                let d = HilbertStructure::new(&poly).distance(&point(&p, &poly, "p")?, &point(&q, &poly, "q")?)?;
                let mut table = Table::new(&["distance"]);
                table.rows.push(reals(&[d]));
                Ok(Output { json: json!(d), table })
            })())
        }
        Command::Finsler { io, p, v } => {
            let out = io.out.clone();
            (out, (|| {
                let poly = load(&io.polytope, eps)?;
                let f = HilbertStructure::new(&poly).finsler_norm(&point(&p, &poly, "p")?, &point(&v, &poly, "v")?)?;
                let mut table = Table::new(&["finsler_norm"]);
                table.rows.push(reals(&[f]));
                Ok(Output { json: json!(f), table })
            })())
        }
        Command::Subdivide { io } => {
            let out = io.out.clone();
            (out, (|| {
                let poly = load(&io.polytope, eps)?;
                let atlas = FlatteningAtlas::new(&poly)?;
                let n = poly.dimension();
                let mut header = vec!["cell".to_string(), "k".to_string()];
                header.extend((1..=n).map(|i| format!("x{i}")));
                let mut table = Table { header, rows: vec![] };
                let cells: Vec<Value> = atlas
                    .cells()
                    .iter()
                    .map(|c| {
                        for (k, v) in c.vertices.iter().enumerate() {
                            let mut row = vec![c.id.into(), k.into()];
                            row.extend(reals(v.as_slice()));
                            table.rows.push(row);
                        }
                        json!({
                            "id": c.id,
                            "flag": c.flag.chain,
                            "vertices": c.vertices.iter().map(to_vec).collect::<Vec<_>>(),
                        })
                    })
                    .collect();
                Ok(Output { json: json!({ "count": cells.len(), "cells": cells }), table })
            })())
        }
        Command::Flatten { io, x } => {
            let out = io.out.clone();
            (out, (|| {
                let poly = load(&io.polytope, eps)?;
                let atlas = FlatteningAtlas::new(&poly)?;
                let x = point(&x, &poly, "x")?;
                let image = atlas.flatten(&x)?;
                let cell = atlas.locate(&x)?;
                let header: Vec<String> = (1..=poly.dimension()).map(|i| format!("y{i}")).collect();
                let table = Table { header, rows: vec![reals(image.as_slice())] };
                Ok(Output { json: json!({ "cell": cell, "image": to_vec(&image) }), table })
            })())
        }
        Command::Unflatten { io, y } => {
            let out = io.out.clone();
            (out, (|| {
                let poly = load(&io.polytope, eps)?;
                let atlas = FlatteningAtlas::new(&poly)?;
                let y = point(&y, &poly, "y")?;
                let x = atlas.unflatten(&y)?;
                let cell = atlas.locate_cone(&y)?;
                let header: Vec<String> = (1..=poly.dimension()).map(|i| format!("x{i}")).collect();
                let table = Table { header, rows: vec![reals(x.as_slice())] };
                Ok(Output { json: json!({ "cell": cell, "point": to_vec(&x) }), table })
            })())
        }
        Command::EstimateLipschitz { io, sampling } => {
            let out = io.out.clone();
            (out, (|| {
                let poly = load(&io.polytope, eps)?;
                let atlas = FlatteningAtlas::new(&poly)?;
                let report = estimate_bilipschitz(&atlas, &sampling.config())?;
                let json = json!({
                    "l_hat": report.constant(),
                    "half_l_hat": report.half_constant(),
                    "stability": report.constant_stability(),
                    "report": report_json(&report),
                });
                Ok(Output { json, table: histogram_table(&report) })
            })())
        }
        Command::EstimateCells { io, sampling } => {
            let out = io.out.clone();
            (out, (|| {
                let poly = load(&io.polytope, eps)?;
                let atlas = FlatteningAtlas::new(&poly)?;
                let constants = estimate_cell_constants(&atlas, &sampling.config())?;
                let mut table = Table::new(&["cell", "k_hat", "min_ratio", "max_ratio", "samples"]);
                for c in &constants.cells {
                    table.rows.push(vec![
                        c.cell.into(),
                        c.k_hat.into(),
                        c.report.min_ratio.into(),
                        c.report.max_ratio.into(),
                        c.report.sample_count.into(),
                    ]);
                }
                let mut json = serde_json::to_value(&constants).expect("reports serialize");
                json["stability"] = json!(constants.stability());
                Ok(Output { json, table })
            })())
        }
        Command::NestedRatio { inner, middle, outer, out, sampling } => (out, (|| {
            let triple = NestedTriple::new(load(&inner, eps)?, load(&middle, eps)?, load(&outer, eps)?)?;
            let report = nested_ratio_experiment(&triple, &sampling.config())?;
            let json = json!({
                "q_hat": report.max_ratio,
                "stability": report.max_stability(),
                "report": report_json(&report),
            });
            Ok(Output { json, table: histogram_table(&report) })
        })()),
        Command::CheckIsometry { dim, out, sampling } => (out, (|| {
            let report = isometry_check(dim, &sampling.config())?;
            let mut table = Table::new(&["dimension", "pairs", "max_deviation"]);
            table.rows.push(vec![dim.into(), report.pairs.into(), report.max_deviation.into()]);
            Ok(Output { json: serde_json::to_value(&report).expect("reports serialize"), table })
        })()),
        Command::EmitGrid { io, resolution } => {
            let out = io.out.clone();
            (out, (|| {
                let poly = load(&io.polytope, eps)?;
                let atlas = FlatteningAtlas::new(&poly)?;
                let rows = emit_grid(&atlas, resolution)?;
                let mut table = Table::new(&["x1", "x2", "f1", "f2"]);
                table.rows = rows.iter().map(|r| reals(&[r.x[0], r.x[1], r.image[0], r.image[1]])).collect();
                Ok(Output { json: json!({ "rows": rows }), table })
            })())
        }
    }
}
