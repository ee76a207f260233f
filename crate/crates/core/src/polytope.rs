//! Full-dimensional convex polytopes in dual (vertex + halfspace) form.
//!
//! Facets are recovered from the vertex list by brute force over all
//! `n`-subsets of points: every subset that spans a hyperplane with all
//! points on one side is a supporting hyperplane, and those are deduplicated.
//! This is exponential in `n` but the polytopes handled here are small
//! (a few dozen vertices, `n <= 6`).

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point or direction in the ambient space.
pub type Vector = DVector<f64>;

/// Global geometric tolerance.
pub const EPS_GEOM: f64 = 1e-9;
/// Minimum facet slack for a point to count as strictly interior.
pub const EPS_INT: f64 = 1e-7;

/// `{x : normal . x <= offset}` with a unit normal.
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace {
    pub normal: Vector,
    pub offset: f64,
}

impl Halfspace {
    /// Normalizes `normal` to unit length, scaling `offset` accordingly.
    pub fn new(normal: Vector, offset: f64) -> Result<Self> {
        let norm = normal.norm();
        if !(norm.is_finite() && norm > 0.0) || !offset.is_finite() {
            return Err(Error::DegenerateInput("halfspace normal must be finite and nonzero".into()));
        }
        Ok(Self { normal: normal / norm, offset: offset / norm })
    }

    /// `offset - normal . x`; nonnegative inside.
    pub fn slack(&self, x: &Vector) -> f64 {
        self.offset - self.normal.dot(x)
    }
}

/// Where a point sits relative to a polytope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Location {
    Interior,
    Boundary,
    Outside,
}

/// Result of shooting a ray from an interior point.
#[derive(Debug, Clone, PartialEq)]
pub struct RayExit {
    pub t: f64,
    pub point: Vector,
    pub facet: usize,
}

#[derive(Debug, Clone)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Vector>,
    facets: Vec<Halfspace>,
    incidence: Vec<Vec<usize>>,
    eps: f64,
}

impl Polytope {
    /// Convex hull of `points` with the default tolerance.
    pub fn from_points(points: &[Vector]) -> Result<Self> {
        Self::from_points_with_eps(points, EPS_GEOM)
    }

    pub fn from_points_with_eps(points: &[Vector], eps: f64) -> Result<Self> {
        let dim = points
            .first()
            .map(|p| p.len())
            .ok_or_else(|| Error::DegenerateInput("empty vertex list".into()))?;
        if dim == 0 {
            return Err(Error::DegenerateInput("zero-dimensional points".into()));
        }
        for p in points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::DegenerateInput("non-finite coordinate".into()));
            }
        }
        let tol = scaled_tol(points, eps);

        let mut unique: Vec<Vector> = Vec::with_capacity(points.len());
        for p in points {
            if unique.iter().all(|q| (q - p).norm() > tol) {
                unique.push(p.clone());
            }
        }
        let rank = affine_rank(&unique, tol);
        if rank < dim {
            return Err(Error::NotFullDimensional { rank, dim });
        }

        let hyperplanes = supporting_hyperplanes(&unique, dim, tol);

        // A point is a vertex iff the normals of the facets through it span R^n.
        let vertices: Vec<Vector> = unique
            .iter()
            .filter(|p| {
                let normals: Vec<&Vector> = hyperplanes
                    .iter()
                    .filter(|h| h.slack(p).abs() <= tol)
                    .map(|h| &h.normal)
                    .collect();
                normal_rank(&normals, dim, tol) == dim
            })
            .cloned()
            .collect();

        let mut facets: Vec<(Vec<usize>, Halfspace)> = hyperplanes
            .into_iter()
            .map(|h| {
                let inc: Vec<usize> = (0..vertices.len()).filter(|&i| h.slack(&vertices[i]).abs() <= tol).collect();
                (inc, h)
            })
            .filter(|(inc, _)| {
                let pts: Vec<Vector> = inc.iter().map(|&i| vertices[i].clone()).collect();
                affine_rank(&pts, tol) == dim - 1
            })
            .collect();
        facets.sort_by(|a, b| a.0.cmp(&b.0));

        let (incidence, facets) = facets.into_iter().unzip();
        Ok(Self { dim, vertices, facets, incidence, eps })
    }

    /// Builds the hull and checks it against a declared halfspace list
    /// (set equality within tolerance).
    pub fn with_halfspaces(points: &[Vector], declared: &[Halfspace], eps: f64) -> Result<Self> {
        let poly = Self::from_points_with_eps(points, eps)?;
        let tol = scaled_tol(&poly.vertices, eps);
        let matches = |a: &Halfspace, b: &Halfspace| {
            (&a.normal - &b.normal).norm() <= tol && (a.offset - b.offset).abs() <= tol
        };
        let same = declared.len() == poly.facets.len()
            && declared.iter().all(|d| poly.facets.iter().any(|f| matches(d, f)))
            && poly.facets.iter().all(|f| declared.iter().any(|d| matches(d, f)));
        if same {
            Ok(poly)
        } else {
            Err(Error::HalfspaceMismatch)
        }
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Halfspace] {
        &self.facets
    }

    /// Vertex indices lying on each facet.
    pub fn incidence(&self) -> &[Vec<usize>] {
        &self.incidence
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Mean of the vertices.
    pub fn barycenter(&self) -> Vector {
        mean(self.vertices.iter())
    }

    /// Smallest facet slack of `x`.
    pub fn min_slack(&self, x: &Vector) -> f64 {
        self.facets.iter().map(|h| h.slack(x)).fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> Location {
        let s = self.min_slack(x);
        if s > tol {
            Location::Interior
        } else if s >= -tol {
            Location::Boundary
        } else {
            Location::Outside
        }
    }

    pub fn check_dim(&self, x: &Vector) -> Result<()> {
        if x.len() == self.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.dim, got: x.len() })
        }
    }

    /// Errors unless `x` has slack above [`EPS_INT`] on every facet.
    pub fn require_interior(&self, x: &Vector) -> Result<()> {
        self.check_dim(x)?;
        let slack = self.min_slack(x);
        if slack > EPS_INT {
            Ok(())
        } else {
            Err(Error::PointNotInterior { slack })
        }
    }

    /// Exit time and facet without the interiority check.
    ///
    /// Lowest facet index wins ties. Returns `None` only if no facet faces
    /// the direction, which cannot happen for a bounded polytope and nonzero `v`.
    pub(crate) fn exit_time(&self, p: &Vector, v: &Vector) -> Option<(f64, usize)> {
        let mut best: Option<(f64, usize)> = None;
        for (i, h) in self.facets.iter().enumerate() {
            let rate = h.normal.dot(v);
            if rate > 0.0 {
                let t = h.slack(p) / rate;
                if best.is_none_or(|(bt, _)| t < bt) {
                    best = Some((t, i));
                }
            }
        }
        best
    }

    /// First boundary hit of the ray `p + t v`, `t > 0`.
    pub fn ray_exit(&self, p: &Vector, v: &Vector) -> Result<RayExit> {
        self.require_interior(p)?;
        self.check_dim(v)?;
        if v.norm() == 0.0 {
            return Err(Error::ZeroDirection);
        }
        let (t, facet) = self.exit_time(p, v).ok_or(Error::ZeroDirection)?;
        Ok(RayExit { t, point: p + v * t, facet })
    }

    /// Axis-aligned bounding box `(lo, hi)` of the vertices.
    pub fn bounding_box(&self) -> (Vector, Vector) {
        let mut lo = self.vertices[0].clone();
        let mut hi = self.vertices[0].clone();
        for v in &self.vertices[1..] {
            lo = lo.inf(v);
            hi = hi.sup(v);
        }
        (lo, hi)
    }

    /// Parses the polytope JSON format and validates declared halfspaces if present.
    pub fn from_json(text: &str, eps: f64) -> Result<Self> {
        let doc: PolytopeDoc = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        doc.build(eps)
    }

    pub fn to_doc(&self) -> PolytopeDoc {
        PolytopeDoc {
            dimension: self.dim,
            vertices: self.vertices.iter().map(|v| v.iter().copied().collect()).collect(),
            halfspaces: Some(
                self.facets
                    .iter()
                    .map(|h| HalfspaceDoc { normal: h.normal.iter().copied().collect(), offset: h.offset })
                    .collect(),
            ),
        }
    }
}

/// On-disk polytope description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolytopeDoc {
    pub dimension: usize,
    pub vertices: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub halfspaces: Option<Vec<HalfspaceDoc>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HalfspaceDoc {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl PolytopeDoc {
    pub fn build(&self, eps: f64) -> Result<Polytope> {
        let points: Vec<Vector> = self.vertices.iter().map(|v| Vector::from_column_slice(v)).collect();
        if let Some(bad) = points.iter().find(|p| p.len() != self.dimension) {
            return Err(Error::DimensionMismatch { expected: self.dimension, got: bad.len() });
        }
        match &self.halfspaces {
            None => Polytope::from_points_with_eps(&points, eps),
            Some(hs) => {
                let declared = hs
                    .iter()
                    .map(|h| {
                        if h.normal.len() != self.dimension {
                            return Err(Error::DimensionMismatch { expected: self.dimension, got: h.normal.len() });
                        }
                        Halfspace::new(Vector::from_column_slice(&h.normal), h.offset)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Polytope::with_halfspaces(&points, &declared, eps)
            }
        }
    }
}

pub(crate) fn mean<'a>(points: impl Iterator<Item = &'a Vector>) -> Vector {
    let mut count = 0usize;
    let mut acc: Option<Vector> = None;
    for p in points {
        count += 1;
        acc = Some(match acc {
            None => p.clone(),
            Some(a) => a + p,
        });
    }
    acc.expect("mean of an empty point set") / count as f64
}

/// Tolerance scaled by the coordinate magnitude of the input.
pub(crate) fn scaled_tol(points: &[Vector], eps: f64) -> f64 {
    let scale = points.iter().flat_map(|p| p.iter()).fold(0.0f64, |m, c| m.max(c.abs()));
    eps * (1.0 + scale)
}

/// Affine rank of a point set (dimension of its affine hull).
pub fn affine_rank(points: &[Vector], tol: f64) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let dim = points[0].len();
    let diffs = DMatrix::from_fn(points.len() - 1, dim, |i, j| points[i + 1][j] - points[0][j]);
    diffs.svd(false, false).singular_values.iter().filter(|&&s| s > tol).count()
}

fn normal_rank(normals: &[&Vector], dim: usize, tol: f64) -> usize {
    if normals.is_empty() {
        return 0;
    }
    let m = DMatrix::from_fn(normals.len(), dim, |i, j| normals[i][j]);
    m.svd(false, false).singular_values.iter().filter(|&&s| s > tol).count()
}

/// Unit normal of the hyperplane through `dim` points, via the generalized cross product.
fn hyperplane_normal(points: &[&Vector], dim: usize, tol: f64) -> Option<Vector> {
    if dim == 1 {
        return Some(Vector::from_element(1, 1.0));
    }
    let base = points[0];
    let diffs: Vec<Vector> = points[1..].iter().map(|p| *p - base).collect();
    let lengths: f64 = diffs.iter().map(|d| d.norm()).product();
    if lengths <= tol {
        return None;
    }
    let mut normal = Vector::zeros(dim);
    for col in 0..dim {
        let minor = DMatrix::from_fn(dim - 1, dim - 1, |i, j| diffs[i][if j < col { j } else { j + 1 }]);
        let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
        normal[col] = sign * minor.determinant();
    }
    let norm = normal.norm();
    // norm / lengths is the volume-sine of the spanning vectors
    if norm <= 1e-9 * lengths {
        return None;
    }
    Some(normal / norm)
}

fn supporting_hyperplanes(points: &[Vector], dim: usize, tol: f64) -> Vec<Halfspace> {
    let mut found: Vec<Halfspace> = Vec::new();
    for subset in (0..points.len()).combinations(dim) {
        let pts: Vec<&Vector> = subset.iter().map(|&i| &points[i]).collect();
        let Some(normal) = hyperplane_normal(&pts, dim, tol) else { continue };
        let offset = normal.dot(pts[0]);
        let slacks: Vec<f64> = points.iter().map(|p| offset - normal.dot(p)).collect();
        let h = if slacks.iter().all(|&s| s >= -tol) {
            Halfspace { normal, offset }
        } else if slacks.iter().all(|&s| s <= tol) {
            Halfspace { normal: -normal, offset: -offset }
        } else {
            continue;
        };
        let duplicate = found
            .iter()
            .any(|f| (&f.normal - &h.normal).norm() <= tol && (f.offset - h.offset).abs() <= tol);
        if !duplicate {
            found.push(h);
        }
    }
    found
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[f64]) -> Vector {
        Vector::from_column_slice(c)
    }

    fn square() -> Polytope {
        Polytope::from_points(&[v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[1.0, 1.0]), v(&[0.0, 1.0])]).unwrap()
    }

    #[test]
    fn square_facets_are_axis_normals() {
        let sq = square();
        assert_eq!(sq.facets().len(), 4);
        let mut normals: Vec<(i64, i64)> = sq
            .facets()
            .iter()
            .map(|h| (h.normal[0].round() as i64, h.normal[1].round() as i64))
            .collect();
        normals.sort();
        assert_eq!(normals, vec![(-1, 0), (0, -1), (0, 1), (1, 0)]);
        for h in sq.facets() {
            assert!((h.normal.norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn cube_incidence() {
        let pts: Vec<Vector> = (0..8)
            .map(|m| v(&[(m & 1) as f64, ((m >> 1) & 1) as f64, ((m >> 2) & 1) as f64]))
            .collect();
        let cube = Polytope::from_points(&pts).unwrap();
        assert_eq!(cube.facets().len(), 6);
        assert!(cube.incidence().iter().all(|inc| inc.len() == 4));
    }

    #[test]
    fn interior_and_duplicate_points_are_dropped() {
        let pts = [
            v(&[0.0, 0.0]),
            v(&[1.0, 0.0]),
            v(&[0.5, 0.0]),
            v(&[1.0, 1.0]),
            v(&[0.0, 1.0]),
            v(&[0.3, 0.6]),
            v(&[1.0, 1.0 + 1e-12]),
        ];
        let p = Polytope::from_points(&pts).unwrap();
        assert_eq!(p.vertices().len(), 4);
        assert_eq!(p.facets().len(), 4);
    }

    #[test]
    fn rejects_degenerate_input() {
        let collinear = [v(&[0.0, 0.0]), v(&[1.0, 1.0]), v(&[2.0, 2.0])];
        assert_eq!(
            Polytope::from_points(&collinear).unwrap_err(),
            Error::NotFullDimensional { rank: 1, dim: 2 }
        );
        let nan = [v(&[0.0, f64::NAN]), v(&[1.0, 0.0]), v(&[0.0, 1.0])];
        assert!(matches!(Polytope::from_points(&nan), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn interval_is_supported() {
        let p = Polytope::from_points(&[v(&[-1.0]), v(&[1.0])]).unwrap();
        assert_eq!(p.facets().len(), 2);
        let exit = p.ray_exit(&v(&[0.5]), &v(&[-1.0])).unwrap();
        assert!((exit.t - 1.5).abs() < 1e-15);
        assert!((exit.point[0] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn ray_exit_examples() {
        let sq = square();
        let e = sq.ray_exit(&v(&[0.5, 0.5]), &v(&[1.0, 0.0])).unwrap();
        assert_eq!(e.t, 0.5);
        assert_eq!(e.point, v(&[1.0, 0.5]));
        let corner = sq.ray_exit(&v(&[0.5, 0.5]), &v(&[1.0, 1.0])).unwrap();
        assert_eq!(corner.t, 0.5);
        assert_eq!(corner.point, v(&[1.0, 1.0]));
        // both facets through the corner tie; the lower index is reported
        let tied: Vec<usize> = sq
            .facets()
            .iter()
            .enumerate()
            .filter(|(_, h)| h.slack(&corner.point).abs() < 1e-12)
            .map(|(i, _)| i)
            .collect();
        assert_eq!(corner.facet, tied[0]);
    }

    #[test]
    fn ray_exit_errors() {
        let sq = square();
        assert_eq!(sq.ray_exit(&v(&[0.5, 0.5]), &v(&[0.0, 0.0])).unwrap_err(), Error::ZeroDirection);
        assert!(matches!(
            sq.ray_exit(&v(&[1.0, 0.5]), &v(&[1.0, 0.0])),
            Err(Error::PointNotInterior { .. })
        ));
    }

    #[test]
    fn contains_examples() {
        let sq = square();
        assert_eq!(sq.contains(&v(&[0.5, 0.5]), 1e-9), Location::Interior);
        assert_eq!(sq.contains(&v(&[1.0, 0.5]), 1e-9), Location::Boundary);
        assert_eq!(sq.contains(&v(&[2.0, 0.0]), 1e-9), Location::Outside);
    }

    #[test]
    fn json_roundtrip_and_validation() {
        let text = r#"{"dimension": 2, "vertices": [[0,0],[1,0],[1,1],[0,1]],
            "halfspaces": [{"normal":[2,0],"offset":2},{"normal":[-1,0],"offset":0},
                           {"normal":[0,1],"offset":1},{"normal":[0,-3],"offset":0}]}"#;
        let p = Polytope::from_json(text, EPS_GEOM).unwrap();
        assert_eq!(p.facets().len(), 4);

        let wrong = r#"{"dimension": 2, "vertices": [[0,0],[1,0],[1,1],[0,1]],
            "halfspaces": [{"normal":[1,0],"offset":2}]}"#;
        assert_eq!(Polytope::from_json(wrong, EPS_GEOM).unwrap_err(), Error::HalfspaceMismatch);

        let again = serde_json::to_string(&p.to_doc()).unwrap();
        assert_eq!(Polytope::from_json(&again, EPS_GEOM).unwrap().vertices(), p.vertices());

        let bad_dim = r#"{"dimension": 3, "vertices": [[0,0],[1,0],[0,1]]}"#;
        assert!(matches!(Polytope::from_json(bad_dim, EPS_GEOM), Err(Error::DimensionMismatch { .. })));
    }
}
