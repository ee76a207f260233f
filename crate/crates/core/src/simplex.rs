//! The standard simplex `{x ∈ R^{n+1} : x_i ≥ 0, Σ x_i = 1}`, its log-coordinate
//! isometry onto the sum-zero hyperplane `W_n`, and the standard cell / cone.
//!
//! Under `phi(x)_i = ln x_i - mean_j ln x_j` the Hilbert distance of the open
//! simplex becomes the variation norm `½ (max_i Z_i - min_i Z_i)` on `W_n`.
//! Metric computations on the simplex itself go through a chart that drops
//! the last coordinate, which turns it into the full-dimensional corner
//! simplex `{u ∈ R^n : u_i ≥ 0, Σ u_i ≤ 1}`.

use crate::error::{Error, Result};
use crate::hilbert::HilbertStructure;
use crate::polytope::{Polytope, Vector};

/// Spread of log-coordinates beyond which `exp` would under- or overflow.
pub const MAX_LOG_SPREAD: f64 = 700.0;

/// A point of the open standard simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexPoint(Vec<f64>);

impl SimplexPoint {
    /// Strictly positive coordinates summing to 1 within `1e-12`.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::NotSimplexPoint("need at least two coordinates".into()));
        }
        if coords.iter().any(|&c| !(c > 0.0 && c.is_finite())) {
            return Err(Error::NotSimplexPoint("coordinates must be strictly positive".into()));
        }
        let sum: f64 = coords.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::NotSimplexPoint(format!("coordinates sum to {sum}")));
        }
        Ok(Self(coords))
    }

    /// Rescales strictly positive weights onto the simplex.
    pub fn normalized(mut coords: Vec<f64>) -> Result<Self> {
        if coords.iter().any(|&c| !(c > 0.0 && c.is_finite())) {
            return Err(Error::NotSimplexPoint("coordinates must be strictly positive".into()));
        }
        let sum: f64 = coords.iter().sum();
        coords.iter_mut().for_each(|c| *c /= sum);
        Self::new(coords)
    }

    pub fn barycenter(n: usize) -> Self {
        Self(vec![1.0 / (n + 1) as f64; n + 1])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    /// Simplex dimension `n` (one less than the coordinate count).
    pub fn dimension(&self) -> usize {
        self.0.len() - 1
    }

    pub fn to_vector(&self) -> Vector {
        Vector::from_column_slice(&self.0)
    }
}

/// A vector of the sum-zero hyperplane `W_n ⊂ R^{n+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct WPoint(Vec<f64>);

impl WPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        let sum: f64 = coords.iter().sum();
        let scale = coords.iter().fold(1.0f64, |m, c| m.max(c.abs()));
        if !sum.is_finite() || sum.abs() > 1e-10 * scale {
            return Err(Error::NotInW(sum));
        }
        Ok(Self(coords))
    }

    /// Orthogonal projection onto `W_n` (subtracts the mean).
    pub fn project(mut coords: Vec<f64>) -> Self {
        let mean = coords.iter().sum::<f64>() / coords.len() as f64;
        coords.iter_mut().for_each(|c| *c -= mean);
        Self(coords)
    }

    pub fn zero(n: usize) -> Self {
        Self(vec![0.0; n + 1])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dimension(&self) -> usize {
        self.0.len() - 1
    }

    pub fn sub(&self, other: &WPoint) -> WPoint {
        WPoint(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, s: f64) -> WPoint {
        WPoint(self.0.iter().map(|a| a * s).collect())
    }

    pub fn add(&self, other: &WPoint) -> WPoint {
        WPoint(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

/// Log-coordinates centred by the geometric mean.
pub fn phi(x: &SimplexPoint) -> WPoint {
    let logs: Vec<f64> = x.0.iter().map(|c| c.ln()).collect();
    WPoint::project(logs)
}

/// Inverse of [`phi`]: a max-shifted softmax.
pub fn phi_inv(z: &WPoint) -> Result<SimplexPoint> {
    let max = z.0.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = z.0.iter().copied().fold(f64::INFINITY, f64::min);
    if !(max - min <= MAX_LOG_SPREAD) {
        return Err(Error::Overflow(max - min));
    }
    let exps: Vec<f64> = z.0.iter().map(|c| (c - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    SimplexPoint::new(exps.into_iter().map(|e| e / sum).collect())
}

/// `½ (max_i Z_i - min_i Z_i)`.
pub fn dlh_norm(z: &WPoint) -> f64 {
    let max = z.0.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = z.0.iter().copied().fold(f64::INFINITY, f64::min);
    0.5 * (max - min)
}

/// Drops the last coordinate.
pub fn chart(x: &[f64]) -> Vector {
    Vector::from_column_slice(&x[..x.len() - 1])
}

/// Tangent vectors of the simplex map through the same coordinate drop.
pub fn chart_tangent(w: &[f64]) -> Vector {
    chart(w)
}

/// Inverse of [`chart`] on `{Σ = 1}`.
pub fn chart_inv(u: &Vector) -> Vec<f64> {
    let last = 1.0 - u.sum();
    u.iter().copied().chain(std::iter::once(last)).collect()
}

/// The standard simplex realized in chart coordinates, for metric queries.
#[derive(Debug, Clone)]
pub struct StandardSimplex {
    n: usize,
    chart_polytope: Polytope,
}

impl StandardSimplex {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "simplex dimension must be positive");
        let mut pts = vec![Vector::zeros(n)];
        for i in 0..n {
            let mut e = Vector::zeros(n);
            e[i] = 1.0;
            pts.push(e);
        }
        let chart_polytope = Polytope::from_points(&pts).expect("corner simplex is full-dimensional");
        Self { n, chart_polytope }
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn chart_polytope(&self) -> &Polytope {
        &self.chart_polytope
    }

    pub fn distance(&self, x: &SimplexPoint, y: &SimplexPoint) -> Result<f64> {
        self.check(x)?;
        self.check(y)?;
        HilbertStructure::new(&self.chart_polytope).distance(&chart(&x.0), &chart(&y.0))
    }

    /// Finsler norm at `x` of a tangent vector `w ∈ W_n`.
    pub fn finsler_norm(&self, x: &SimplexPoint, w: &WPoint) -> Result<f64> {
        self.check(x)?;
        HilbertStructure::new(&self.chart_polytope).finsler_norm(&chart(&x.0), &chart_tangent(&w.0))
    }

    fn check(&self, x: &SimplexPoint) -> Result<()> {
        if x.dimension() == self.n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.n, got: x.dimension() })
        }
    }
}

/// Hilbert distance of the standard simplex, computed through the chart.
pub fn simplex_distance(x: &SimplexPoint, y: &SimplexPoint) -> Result<f64> {
    StandardSimplex::new(x.dimension()).distance(x, y)
}

/// Vertices `v̂_k = (1/(k+1), …, 1/(k+1), 0, …, 0)` for `k = 0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardCell {
    pub n: usize,
    pub vertices: Vec<Vec<f64>>,
}

pub fn standard_cell(n: usize) -> StandardCell {
    let vertices = (0..=n)
        .map(|k| (0..=n).map(|j| if j <= k { 1.0 / (k + 1) as f64 } else { 0.0 }).collect())
        .collect();
    StandardCell { n, vertices }
}

/// Generators `ṽ_k = (n-k, …, n-k, -(k+1), …, -(k+1))` (first `k+1` entries
/// positive) for `k = 0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardCone {
    pub n: usize,
    pub generators: Vec<WPoint>,
}

pub fn standard_cone(n: usize) -> StandardCone {
    let generators = (0..n)
        .map(|k| {
            WPoint(
                (0..=n)
                    .map(|j| if j <= k { (n - k) as f64 } else { -((k + 1) as f64) })
                    .collect(),
            )
        })
        .collect();
    StandardCone { n, generators }
}

impl StandardCone {
    /// Coefficients `a` with `X = Σ a_k ṽ_k`.
    ///
    /// `ṽ_k = (n+1)·1_{[0..=k]} - (k+1)·1`, so consecutive coordinate gaps
    /// isolate one coefficient each: `X_k - X_{k+1} = (n+1) a_k`.
    pub fn coefficients(&self, x: &WPoint) -> Vec<f64> {
        let scale = (self.n + 1) as f64;
        x.0.windows(2).map(|w| (w[0] - w[1]) / scale).collect()
    }

    /// `Σ a_k ṽ_k`.
    pub fn combine(&self, coeffs: &[f64]) -> WPoint {
        let mut out = vec![0.0; self.n + 1];
        for (a, g) in coeffs.iter().zip(&self.generators) {
            for (o, c) in out.iter_mut().zip(&g.0) {
                *o += a * c;
            }
        }
        WPoint(out)
    }
}

/// Membership of `x` in the cone spanned by the standard generators.
pub fn cone_membership(cone: &StandardCone, x: &WPoint, tol: f64) -> (bool, Vec<f64>) {
    let coeffs = cone.coefficients(x);
    (coeffs.iter().all(|&a| a >= -tol), coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn phi_examples() {
        for n in 1..=4 {
            assert!(phi(&SimplexPoint::barycenter(n)).coords().iter().all(|c| c.abs() < 1e-15));
        }
        let x = SimplexPoint::new(vec![0.75, 0.25]).unwrap();
        let h = 0.5 * 3f64.ln();
        assert!(close(phi(&x).coords(), &[h, -h], 1e-15));
        let back = phi_inv(&WPoint::new(vec![h, -h]).unwrap()).unwrap();
        assert!(close(back.coords(), &[0.75, 0.25], 1e-15));
    }

    #[test]
    fn phi_inv_along_cone_generator_approaches_vertex() {
        let cone = standard_cone(3);
        let far = phi_inv(&cone.generators[0].scale(20.0)).unwrap();
        assert!(far.coords()[0] > 1.0 - 1e-12);
    }

    #[test]
    fn phi_inv_overflow_guard() {
        let z = WPoint::new(vec![400.0, -400.0]).unwrap();
        assert!(matches!(phi_inv(&z), Err(Error::Overflow(_))));
        assert!(phi_inv(&WPoint::new(vec![300.0, -300.0]).unwrap()).is_ok());
    }

    #[test]
    fn dlh_norm_examples() {
        assert_eq!(dlh_norm(&WPoint::zero(3)), 0.0);
        for n in 1..=4 {
            let v0 = &standard_cone(n).generators[0];
            assert_eq!(dlh_norm(v0), (n + 1) as f64 / 2.0);
            assert_eq!(dlh_norm(&v0.scale(-2.5)), 2.5 * dlh_norm(v0));
        }
    }

    #[test]
    fn simplex_distance_examples() {
        let x = SimplexPoint::new(vec![0.75, 0.25]).unwrap();
        let y = SimplexPoint::new(vec![0.25, 0.75]).unwrap();
        assert_eq!(simplex_distance(&x, &x).unwrap(), 0.0);
        assert!((simplex_distance(&x, &y).unwrap() - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn standard_cell_and_cone_shapes() {
        let cell = standard_cell(2);
        assert_eq!(cell.vertices[0], vec![1.0, 0.0, 0.0]);
        assert_eq!(cell.vertices[1], vec![0.5, 0.5, 0.0]);
        assert!(close(&cell.vertices[2], &[1.0 / 3.0; 3], 0.0));
        for n in 1..=5 {
            let cell = standard_cell(n);
            assert!(close(&cell.vertices[n], SimplexPoint::barycenter(n).coords(), 0.0));
            assert!(cell.vertices.iter().all(|v| (v.iter().sum::<f64>() - 1.0).abs() < 1e-15));
        }
        let cone = standard_cone(2);
        assert_eq!(cone.generators[0].coords(), &[2.0, -1.0, -1.0]);
        assert_eq!(cone.generators[1].coords(), &[1.0, 1.0, -2.0]);
        for n in 1..=5 {
            assert!(standard_cone(n).generators.iter().all(|g| g.coords().iter().sum::<f64>() == 0.0));
        }
    }

    #[test]
    fn cone_direction_near_face() {
        // phi((1-t) v̂_k + t v̂_n) / |.| tends to ṽ_k / |ṽ_k| as t -> 0
        let n = 3;
        let cell = standard_cell(n);
        let cone = standard_cone(n);
        for k in 0..n {
            let t = 1e-9;
            let x: Vec<f64> = (0..=n).map(|j| (1.0 - t) * cell.vertices[k][j] + t * cell.vertices[n][j]).collect();
            let img = phi(&SimplexPoint::normalized(x).unwrap());
            let norm = img.coords().iter().map(|c| c * c).sum::<f64>().sqrt();
            let g = &cone.generators[k];
            let gnorm = g.coords().iter().map(|c| c * c).sum::<f64>().sqrt();
            let err = img.coords().iter().zip(g.coords()).map(|(a, b)| (a / norm - b / gnorm).abs()).fold(0.0, f64::max);
            assert!(err < 1e-9, "k = {k}: {err}");
        }
    }

    #[test]
    fn cone_membership_examples() {
        let cone = standard_cone(3);
        let (inside, a) = cone_membership(&cone, &WPoint::zero(3), 1e-12);
        assert!(inside && a.iter().all(|&c| c == 0.0));
        let sum = cone.generators[0].add(&cone.generators[1]);
        let (inside, a) = cone_membership(&cone, &sum, 1e-12);
        assert!(inside && close(&a, &[1.0, 1.0, 0.0], 1e-15));
        let (inside, a) = cone_membership(&cone, &cone.generators[0].scale(-1.0), 1e-12);
        assert!(!inside && close(&a, &[-1.0, 0.0, 0.0], 1e-15));
    }

    #[test]
    fn point_validation() {
        assert!(SimplexPoint::new(vec![0.5, 0.5 + 1e-9]).is_err());
        assert!(SimplexPoint::new(vec![1.0, 0.0]).is_err());
        assert!(WPoint::new(vec![1.0, -0.5]).is_err());
    }
}
