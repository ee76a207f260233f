//! Hilbert distance and Finsler norm of a polytope, plus projective maps.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::polytope::{Polytope, Vector, EPS_GEOM};

/// Cross ratio `[a, p, q, b] = (|q - a| / |p - a|) * (|p - b| / |q - b|)`.
///
/// The four points must be collinear and strictly ordered along their line.
pub fn cross_ratio(a: &Vector, p: &Vector, q: &Vector, b: &Vector) -> Result<f64> {
    let axis = b - a;
    let len = axis.norm();
    if len <= EPS_GEOM {
        return Err(Error::BadOrdering);
    }
    let dir = &axis / len;
    let offset = |x: &Vector| -> Result<f64> {
        let rel = x - a;
        let t = rel.dot(&dir);
        if (rel - &dir * t).norm() > EPS_GEOM * (1.0 + len) {
            return Err(Error::NotCollinear);
        }
        Ok(t)
    };
    let (tp, tq) = (offset(p)?, offset(q)?);
    if !(tp > EPS_GEOM && tq - tp > EPS_GEOM && len - tq > EPS_GEOM) {
        return Err(Error::BadOrdering);
    }
    Ok(((q - a).norm() / (p - a).norm()) * ((p - b).norm() / (q - b).norm()))
}

/// Metric evaluator for the interior of a polytope.
#[derive(Debug, Clone, Copy)]
pub struct HilbertStructure<'a> {
    polytope: &'a Polytope,
}

impl<'a> HilbertStructure<'a> {
    pub fn new(polytope: &'a Polytope) -> Self {
        Self { polytope }
    }

    pub fn polytope(&self) -> &'a Polytope {
        self.polytope
    }

    /// Hilbert distance `½ ln [a, p, q, b]`.
    ///
    /// With `D = |q - p|` and the chord overhangs `s_a = |p - a|`, `s_b = |q - b|`
    /// the cross ratio is `(1 + D/s_a)(1 + D/s_b)`, which is evaluated with
    /// `ln_1p` so that nearby points keep full relative precision. The pair is
    /// put in lexicographic order first, so `distance(p, q)` and
    /// `distance(q, p)` are bitwise equal.
    pub fn distance(&self, p: &Vector, q: &Vector) -> Result<f64> {
        self.polytope.require_interior(p)?;
        self.polytope.require_interior(q)?;
        let (p, q) = if lex_less(q, p) { (q, p) } else { (p, q) };
        let delta = q - p;
        let gap = delta.norm();
        if gap <= EPS_GEOM {
            return Ok(0.0);
        }
        let u = delta / gap;
        let (s_a, _) = self.polytope.exit_time(p, &-&u).ok_or(Error::ZeroDirection)?;
        let (s_b, _) = self.polytope.exit_time(q, &u).ok_or(Error::ZeroDirection)?;
        Ok(0.5 * ((gap / s_a).ln_1p() + (gap / s_b).ln_1p()))
    }

    /// `½ |v| (1/|p - p⁻| + 1/|p - p⁺|)`; the `|v|` factors cancel against the
    /// exit times measured in units of `v`.
    pub fn finsler_norm(&self, p: &Vector, v: &Vector) -> Result<f64> {
        self.polytope.require_interior(p)?;
        self.polytope.check_dim(v)?;
        if v.iter().all(|&c| c == 0.0) {
            return Ok(0.0);
        }
        let (t_plus, _) = self.polytope.exit_time(p, v).ok_or(Error::ZeroDirection)?;
        let (t_minus, _) = self.polytope.exit_time(p, &-v).ok_or(Error::ZeroDirection)?;
        Ok(0.5 * (1.0 / t_plus + 1.0 / t_minus))
    }
}

fn lex_less(a: &Vector, b: &Vector) -> bool {
    a.iter().partial_cmp(b.iter()) == Some(std::cmp::Ordering::Less)
}

/// A projective transformation acting on homogeneous coordinates `(x, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveMap {
    matrix: DMatrix<f64>,
}

impl ProjectiveMap {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() < 2 {
            return Err(Error::DegenerateInput("projective map needs a square (n+1)x(n+1) matrix".into()));
        }
        if matrix.determinant().abs() <= EPS_GEOM {
            return Err(Error::SingularMap);
        }
        Ok(Self { matrix })
    }

    pub fn identity(n: usize) -> Self {
        Self { matrix: DMatrix::identity(n + 1, n + 1) }
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows() - 1
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        let n = self.dimension();
        if x.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: x.len() });
        }
        let homog = Vector::from_iterator(n + 1, x.iter().copied().chain(std::iter::once(1.0)));
        let image = &self.matrix * homog;
        let w = image[n];
        if w.abs() <= EPS_GEOM {
            return Err(Error::PointAtInfinity);
        }
        Ok(image.rows(0, n) / w)
    }
}
