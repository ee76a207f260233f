//! Barycentric cell decomposition and the flattening map.
//!
//! Every flag `f_0 ⊂ … ⊂ f_{n-1}` of the polytope gives one cell: the simplex
//! on the barycenters of its faces plus the polytope barycenter `p_n`. Cell
//! `i` carries two affine maps:
//!
//! - the chart `L_i : R^n → {Σ = 1} ⊂ R^{n+1}`, sending the `k`-th cell
//!   vertex to the standard cell vertex `v̂_k`;
//! - the cone map `M_i : W_n → R^n`, sending the standard cone generator
//!   `ṽ_k` to `ϖ_{i,k} = v_{i,k} - p_n`.
//!
//! On cell `i` the flattening is `F = M_i ∘ phi ∘ L_i`. Images are reported
//! relative to `p_n`, so `F(p_n) = 0`.

use nalgebra::DMatrix;

use crate::affine::AffineMap;
use crate::error::{Error, Result};
use crate::lattice::{barycenter, FaceLattice, Flag};
use crate::polytope::{Polytope, Vector, EPS_GEOM};
use crate::simplex::{phi, phi_inv, standard_cell, standard_cone, SimplexPoint, StandardCone, WPoint};

/// Tolerance on barycentric / cone coordinates when locating points.
pub const EPS_LOC: f64 = 1e-9;
/// Allowed residual of the vertex correspondences defining each chart.
const CHART_RESIDUAL: f64 = 1e-10;
/// Minimum parameter step of [`FlatteningAtlas::split_segment`].
const MIN_SEGMENT_STEP: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct CellSimplex {
    pub id: usize,
    pub flag: Flag,
    /// `v_{i,0}, …, v_{i,n}`; the last one is the polytope barycenter.
    pub vertices: Vec<Vector>,
}

/// The cone at `p_n` spanned by a cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellCone {
    pub apex: Vector,
    pub generators: Vec<Vector>,
}

/// One cell per flag, in flag order.
pub fn decompose(poly: &Polytope) -> Result<Vec<CellSimplex>> {
    let lattice = FaceLattice::new(poly);
    let center = poly.barycenter();
    let n = poly.dimension();
    lattice
        .flags()
        .into_iter()
        .enumerate()
        .map(|(id, flag)| {
            let mut vertices: Vec<Vector> =
                flag.chain.iter().map(|&f| barycenter(&lattice.faces()[f], poly)).collect();
            vertices.push(center.clone());
            let edges = DMatrix::from_fn(n, n, |r, c| vertices[c][r] - center[r]);
            let scale: f64 = (0..n).map(|c| edges.column(c).norm()).product();
            if edges.determinant().abs() <= EPS_GEOM * scale.max(EPS_GEOM) {
                return Err(Error::DegenerateCell(id));
            }
            Ok(CellSimplex { id, flag, vertices })
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct FlatteningAtlas {
    polytope: Polytope,
    center: Vector,
    cells: Vec<CellSimplex>,
    cones: Vec<CellCone>,
    charts: Vec<AffineMap>,
    chart_inverses: Vec<AffineMap>,
    cone_maps: Vec<AffineMap>,
    cone_inverses: Vec<AffineMap>,
    /// Inverse of `[v_0 … v_n; 1 … 1]`: maps `(x, 1)` to barycentric coordinates.
    barycentric: Vec<DMatrix<f64>>,
    /// Inverse of `[ϖ_0 … ϖ_{n-1}]`: maps `y` to cone coefficients.
    cone_coords: Vec<DMatrix<f64>>,
    standard: StandardCone,
}

impl FlatteningAtlas {
    pub fn new(poly: &Polytope) -> Result<Self> {
        let n = poly.dimension();
        let cells = decompose(poly)?;
        let center = poly.barycenter();
        let std_cell = standard_cell(n);
        let standard = standard_cone(n);

        // columns v̂_k, (n+1) x (n+1), lower triangular and invertible
        let hat = DMatrix::from_fn(n + 1, n + 1, |r, c| std_cell.vertices[c][r]);
        let hat_inv = hat.clone().try_inverse().expect("standard cell matrix is invertible");
        // rows k: (e_k - e_{k+1}) / (n+1), extracts cone coefficients from W_n
        let gaps = DMatrix::from_fn(n, n + 1, |r, c| {
            let s = 1.0 / (n + 1) as f64;
            if c == r {
                s
            } else if c == r + 1 {
                -s
            } else {
                0.0
            }
        });
        let tilde = DMatrix::from_fn(n + 1, n, |r, c| standard.generators[c].coords()[r]);

        let mut atlas = Self {
            polytope: poly.clone(),
            center: center.clone(),
            cells: Vec::with_capacity(cells.len()),
            cones: Vec::with_capacity(cells.len()),
            charts: Vec::with_capacity(cells.len()),
            chart_inverses: Vec::with_capacity(cells.len()),
            cone_maps: Vec::with_capacity(cells.len()),
            cone_inverses: Vec::with_capacity(cells.len()),
            barycentric: Vec::with_capacity(cells.len()),
            cone_coords: Vec::with_capacity(cells.len()),
            standard,
        };

        for cell in cells {
            let id = cell.id;
            let homog = DMatrix::from_fn(n + 1, n + 1, |r, c| if r < n { cell.vertices[c][r] } else { 1.0 });
            let bary = homog.try_inverse().ok_or(Error::SingularChart(id))?;
            let lin = &hat * &bary;
            let chart = AffineMap::new(lin.columns(0, n).into_owned(), lin.column(n).into_owned());
            let verts = DMatrix::from_fn(n, n + 1, |r, c| cell.vertices[c][r]);
            let chart_inv = AffineMap::linear(&verts * &hat_inv);

            let generators: Vec<Vector> = cell.vertices[..n].iter().map(|v| v - &center).collect();
            let frame = DMatrix::from_fn(n, n, |r, c| generators[c][r]);
            let frame_inv = frame.clone().try_inverse().ok_or(Error::SingularChart(id))?;
            let cone_map = AffineMap::linear(&frame * &gaps);
            let cone_inv = AffineMap::linear(&tilde * &frame_inv);

            for (k, v) in cell.vertices.iter().enumerate() {
                let hat_k = Vector::from_column_slice(&std_cell.vertices[k]);
                if (chart.apply(v) - &hat_k).norm() > CHART_RESIDUAL
                    || (chart_inv.apply(&hat_k) - v).norm() > CHART_RESIDUAL * (1.0 + v.norm())
                {
                    return Err(Error::SingularChart(id));
                }
            }
            for (k, g) in generators.iter().enumerate() {
                let tilde_k = Vector::from_column_slice(atlas.standard.generators[k].coords());
                if (cone_map.apply(&tilde_k) - g).norm() > CHART_RESIDUAL * (1.0 + g.norm()) {
                    return Err(Error::SingularChart(id));
                }
            }

            atlas.cones.push(CellCone { apex: center.clone(), generators });
            atlas.cells.push(cell);
            atlas.charts.push(chart);
            atlas.chart_inverses.push(chart_inv);
            atlas.cone_maps.push(cone_map);
            atlas.cone_inverses.push(cone_inv);
            atlas.barycentric.push(bary);
            atlas.cone_coords.push(frame_inv);
        }
        Ok(atlas)
    }

    pub fn polytope(&self) -> &Polytope {
        &self.polytope
    }

    pub fn dimension(&self) -> usize {
        self.polytope.dimension()
    }

    /// The polytope barycenter `p_n`, which flattens to the origin.
    pub fn center(&self) -> &Vector {
        &self.center
    }

    pub fn cells(&self) -> &[CellSimplex] {
        &self.cells
    }

    pub fn cones(&self) -> &[CellCone] {
        &self.cones
    }

    /// `L_i`.
    pub fn chart(&self, i: usize) -> &AffineMap {
        &self.charts[i]
    }

    /// `L_i^{-1}`, valid on the hyperplane `{Σ = 1}`.
    pub fn chart_inverse(&self, i: usize) -> &AffineMap {
        &self.chart_inverses[i]
    }

    /// `M_i`, taking `W_n` (as a subspace of `R^{n+1}`) to `R^n`.
    pub fn cone_map(&self, i: usize) -> &AffineMap {
        &self.cone_maps[i]
    }

    pub fn cone_map_inverse(&self, i: usize) -> &AffineMap {
        &self.cone_inverses[i]
    }

    pub fn barycentric_coords(&self, i: usize, x: &Vector) -> Vector {
        let b = &self.barycentric[i];
        let n = self.dimension();
        b.columns(0, n) * x + b.column(n)
    }

    pub fn cone_coefficients(&self, i: usize, y: &Vector) -> Vector {
        &self.cone_coords[i] * y
    }

    /// Lowest-id cell whose barycentric coordinates of `x` are all `≥ -EPS_LOC`.
    pub fn locate(&self, x: &Vector) -> Result<usize> {
        self.polytope.check_dim(x)?;
        (0..self.cells.len())
            .find(|&i| self.barycentric_coords(i, x).iter().all(|&b| b >= -EPS_LOC))
            .ok_or(Error::LocationFailure)
    }

    /// Lowest-id cell cone containing `y` (coefficients `≥ -EPS_LOC`).
    pub fn locate_cone(&self, y: &Vector) -> Result<usize> {
        self.polytope.check_dim(y)?;
        (0..self.cells.len())
            .find(|&i| self.cone_coefficients(i, y).iter().all(|&a| a >= -EPS_LOC))
            .ok_or(Error::ConeLocationFailure)
    }

    pub fn flatten(&self, x: &Vector) -> Result<Vector> {
        self.polytope.require_interior(x)?;
        let i = self.locate(x)?;
        self.flatten_in_cell(i, x)
    }

    /// `M_i(phi(L_i(x)))` through a specific cell's chart; `x` should lie in
    /// the closure of that cell and in the open polytope.
    pub fn flatten_in_cell(&self, i: usize, x: &Vector) -> Result<Vector> {
        let lifted = self.charts[i].apply(x);
        let point = SimplexPoint::normalized(lifted.iter().copied().collect())
            .map_err(|_| Error::PointNotInterior { slack: self.polytope.min_slack(x) })?;
        let z = phi(&point);
        Ok(self.cone_maps[i].apply(&Vector::from_column_slice(z.coords())))
    }

    pub fn unflatten(&self, y: &Vector) -> Result<Vector> {
        let i = self.locate_cone(y)?;
        self.unflatten_in_cell(i, y)
    }

    /// `L_i^{-1}(phi^{-1}(M_i^{-1}(y)))`.
    pub fn unflatten_in_cell(&self, i: usize, y: &Vector) -> Result<Vector> {
        let z = self.cone_inverses[i].apply(y);
        let w = WPoint::project(z.iter().copied().collect());
        let s = phi_inv(&w)?;
        Ok(self.chart_inverses[i].apply(&s.to_vector()))
    }

    /// Pairs of cells sharing an `(n-1)`-face, with the shared vertex positions.
    ///
    /// Shared vertices of two cells are barycenters of the same faces, so they
    /// sit at the same index `k` in both vertex lists.
    pub fn adjacent_pairs(&self) -> Vec<(usize, usize, Vec<usize>)> {
        let n = self.dimension();
        let mut out = Vec::new();
        for i in 0..self.cells.len() {
            for j in i + 1..self.cells.len() {
                let a = &self.cells[i].flag.chain;
                let b = &self.cells[j].flag.chain;
                let differ: Vec<usize> = (0..n).filter(|&k| a[k] != b[k]).collect();
                if differ.len() == 1 {
                    let shared = (0..=n).filter(|&k| k != differ[0]).collect();
                    out.push((i, j, shared));
                }
            }
        }
        out
    }

    /// Image `L_i(P)` of the polytope in the coordinates of the standard simplex
    /// chart (last coordinate dropped).
    pub fn chart_polytope(&self, i: usize) -> Result<Polytope> {
        let pts: Vec<Vector> = self
            .polytope
            .vertices()
            .iter()
            .map(|v| {
                let lifted = self.charts[i].apply(v);
                lifted.rows(0, lifted.len() - 1).into_owned()
            })
            .collect();
        Polytope::from_points_with_eps(&pts, self.polytope.eps())
    }

    /// Breakpoints `p = p_1, …, p_M = q` such that each open piece
    /// `(p_j, p_{j+1})` lies in the cell tagged on `p_j`. The last point
    /// repeats the final cell.
    pub fn split_segment(&self, p: &Vector, q: &Vector) -> Result<Vec<(Vector, usize)>> {
        self.polytope.require_interior(p)?;
        self.polytope.require_interior(q)?;
        let d = q - p;
        if d.norm() <= EPS_GEOM {
            return Ok(vec![(p.clone(), self.locate(p)?)]);
        }
        let n = self.dimension();
        let mut out: Vec<(Vector, usize)> = Vec::new();
        let mut s = 0.0;
        loop {
            let x = p + &d * s;
            let cell = self.cell_ahead(&x, &d, 1.0 - s)?;
            let rates = self.barycentric[cell].columns(0, n) * &d;
            let coords = self.barycentric_coords(cell, &x);
            let exit = coords
                .iter()
                .zip(rates.iter())
                .filter(|(_, &r)| r < 0.0)
                .map(|(&b, &r)| (-b / r).max(0.0))
                .fold(f64::INFINITY, f64::min);
            if out.last().is_none_or(|(_, c)| *c != cell) {
                out.push((x, cell));
            }
            s += exit.max(MIN_SEGMENT_STEP);
            if s >= 1.0 {
                out.push((q.clone(), cell));
                return Ok(out);
            }
        }
    }

    /// Cell containing the segment just after `x` in direction `d`.
    fn cell_ahead(&self, x: &Vector, d: &Vector, remaining: f64) -> Result<usize> {
        let n = self.dimension();
        let scale = d.norm();
        let entering = (0..self.cells.len()).find(|&i| {
            let coords = self.barycentric_coords(i, x);
            let rates = self.barycentric[i].columns(0, n) * d;
            coords
                .iter()
                .zip(rates.iter())
                .all(|(&b, &r)| b > EPS_LOC || (b >= -EPS_LOC && r >= -1e-12 * scale))
        });
        match entering {
            Some(i) => Ok(i),
            None => self.locate(&(x + d * (1e-9f64).min(0.5 * remaining))),
        }
    }
}
