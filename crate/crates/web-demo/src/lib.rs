//! WebAssembly bindings for the planar flattening demo.
//!
//! Coordinates cross the boundary as flat `[x0, y0, x1, y1, …]` arrays.
//! Points outside the open polygon come back as `NaN` so the page can break
//! polylines there.

use hilbert_core::{FlatteningAtlas, HilbertStructure, Polytope, Vector};
use wasm_bindgen::prelude::*;

/// A planar polygon with its flattening atlas.
#[wasm_bindgen]
pub struct Demo {
    atlas: FlatteningAtlas,
}

fn pairs(flat: &[f64]) -> Result<Vec<Vector>, String> {
    if !flat.len().is_multiple_of(2) {
        return Err("coordinate array must have even length".into());
    }
    Ok(flat.chunks(2).map(Vector::from_column_slice).collect())
}

fn point(x: f64, y: f64) -> Vector {
    Vector::from_column_slice(&[x, y])
}

impl Demo {
    pub fn try_new(vertices: &[f64]) -> Result<Self, String> {
        let pts = pairs(vertices)?;
        let poly = Polytope::from_points(&pts).map_err(|e| e.to_string())?;
        if poly.dimension() != 2 {
            return Err("the demo works with planar polygons".into());
        }
        let atlas = FlatteningAtlas::new(&poly).map_err(|e| e.to_string())?;
        Ok(Self { atlas })
    }

    fn hilbert(&self) -> HilbertStructure<'_> {
        HilbertStructure::new(self.atlas.polytope())
    }

    /// Hull vertices in counter-clockwise order.
    pub fn outline(&self) -> Vec<f64> {
        let c = self.atlas.center();
        let mut verts: Vec<&Vector> = self.atlas.polytope().vertices().iter().collect();
        verts.sort_by(|a, b| {
            let angle = |v: &Vector| (v[1] - c[1]).atan2(v[0] - c[0]);
            angle(a).total_cmp(&angle(b))
        });
        verts.iter().flat_map(|v| [v[0], v[1]]).collect()
    }

    /// Cell triangles, three points each.
    pub fn cells(&self) -> Vec<f64> {
        self.atlas.cells().iter().flat_map(|c| c.vertices.iter().flat_map(|v| [v[0], v[1]])).collect()
    }

    /// Cone generators in the flat picture, two directions per cell.
    pub fn cone_generators(&self) -> Vec<f64> {
        self.atlas.cones().iter().flat_map(|c| c.generators.iter().flat_map(|g| [g[0], g[1]])).collect()
    }

    pub fn try_flatten_points(&self, coords: &[f64]) -> Result<Vec<f64>, String> {
        Ok(pairs(coords)?
            .iter()
            .flat_map(|x| match self.atlas.flatten(x) {
                Ok(y) => [y[0], y[1]],
                Err(_) => [f64::NAN, f64::NAN],
            })
            .collect())
    }

    pub fn try_unflatten_points(&self, coords: &[f64]) -> Result<Vec<f64>, String> {
        Ok(pairs(coords)?
            .iter()
            .flat_map(|y| match self.atlas.unflatten(y) {
                Ok(x) => [x[0], x[1]],
                Err(_) => [f64::NAN, f64::NAN],
            })
            .collect())
    }

    /// Boundary of the Hilbert ball of radius `r` around `(x, y)`, sampled in
    /// `samples` directions.
    ///
    /// Along a unit direction with exit distances `s+` ahead and `s-` behind,
    /// the point at Hilbert distance `r` is at
    /// `t = s- s+ (e^{2r} - 1) / (s+ + e^{2r} s-)`.
    pub fn try_hilbert_ball(&self, x: f64, y: f64, r: f64, samples: usize) -> Result<Vec<f64>, String> {
        if !(r >= 0.0 && r.is_finite()) {
            return Err("radius must be a non-negative number".into());
        }
        let poly = self.atlas.polytope();
        let p = point(x, y);
        poly.require_interior(&p).map_err(|e| e.to_string())?;
        let k = (2.0 * r).exp();
        let mut out = Vec::with_capacity(2 * samples);
        for j in 0..samples {
            let angle = std::f64::consts::TAU * j as f64 / samples as f64;
            let u = point(angle.cos(), angle.sin());
            let ahead = poly.ray_exit(&p, &u).map_err(|e| e.to_string())?.t;
            let behind = poly.ray_exit(&p, &-&u).map_err(|e| e.to_string())?.t;
            let t = behind * ahead * (k - 1.0) / (ahead + k * behind);
            out.extend([x + t * u[0], y + t * u[1]]);
        }
        Ok(out)
    }

    /// `[hilbert distance, euclidean distance of images, ratio]`.
    pub fn try_compare(&self, px: f64, py: f64, qx: f64, qy: f64) -> Result<Vec<f64>, String> {
        let (p, q) = (point(px, py), point(qx, qy));
        let d = self.hilbert().distance(&p, &q).map_err(|e| e.to_string())?;
        let fp = self.atlas.flatten(&p).map_err(|e| e.to_string())?;
        let fq = self.atlas.flatten(&q).map_err(|e| e.to_string())?;
        let flat = (fp - fq).norm();
        Ok(vec![d, flat, if flat > 0.0 { d / flat } else { f64::NAN }])
    }

    /// Index of the cell containing `(x, y)`, or -1 outside the open polygon.
    pub fn cell_at(&self, x: f64, y: f64) -> i32 {
        let p = point(x, y);
        if self.atlas.polytope().require_interior(&p).is_err() {
            return -1;
        }
        self.atlas.locate(&p).map(|i| i as i32).unwrap_or(-1)
    }
}

fn js(e: String) -> JsError {
    JsError::new(&e)
}

#[wasm_bindgen]
impl Demo {
    #[wasm_bindgen(constructor)]
    pub fn new(vertices: &[f64]) -> Result<Demo, JsError> {
        Self::try_new(vertices).map_err(js)
    }

    #[wasm_bindgen(js_name = outline)]
    pub fn js_outline(&self) -> Vec<f64> {
        self.outline()
    }

    #[wasm_bindgen(js_name = cells)]
    pub fn js_cells(&self) -> Vec<f64> {
        self.cells()
    }

    #[wasm_bindgen(js_name = coneGenerators)]
    pub fn js_cone_generators(&self) -> Vec<f64> {
        self.cone_generators()
    }

    #[wasm_bindgen(js_name = flattenPoints)]
    pub fn flatten_points(&self, coords: &[f64]) -> Result<Vec<f64>, JsError> {
        self.try_flatten_points(coords).map_err(js)
    }

    #[wasm_bindgen(js_name = unflattenPoints)]
    pub fn unflatten_points(&self, coords: &[f64]) -> Result<Vec<f64>, JsError> {
        self.try_unflatten_points(coords).map_err(js)
    }

    #[wasm_bindgen(js_name = hilbertBall)]
    pub fn hilbert_ball(&self, x: f64, y: f64, r: f64, samples: usize) -> Result<Vec<f64>, JsError> {
        self.try_hilbert_ball(x, y, r, samples).map_err(js)
    }

    #[wasm_bindgen(js_name = compare)]
    pub fn compare(&self, px: f64, py: f64, qx: f64, qy: f64) -> Result<Vec<f64>, JsError> {
        self.try_compare(px, py, qx, qy).map_err(js)
    }

    #[wasm_bindgen(js_name = cellAt)]
    pub fn js_cell_at(&self, x: f64, y: f64) -> i32 {
        self.cell_at(x, y)
    }
}
