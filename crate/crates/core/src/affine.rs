use nalgebra::DMatrix;

use crate::polytope::{Vector, EPS_GEOM};

/// `x ↦ matrix · x + translation`, possibly between spaces of different dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    matrix: DMatrix<f64>,
    translation: Vector,
    inverse: Option<Box<AffineMap>>,
}

impl AffineMap {
    pub fn new(matrix: DMatrix<f64>, translation: Vector) -> Self {
        assert_eq!(matrix.nrows(), translation.len(), "translation length must match output dimension");
        Self { matrix, translation, inverse: None }
    }

    pub fn linear(matrix: DMatrix<f64>) -> Self {
        let rows = matrix.nrows();
        Self::new(matrix, Vector::zeros(rows))
    }

    /// Attaches a cached inverse when the map is square with `|det| > EPS_GEOM`.
    pub fn with_inverse(mut self) -> Option<Self> {
        if !self.matrix.is_square() || self.matrix.determinant().abs() <= EPS_GEOM {
            return None;
        }
        let inv = self.matrix.clone().try_inverse()?;
        let shift = -(&inv * &self.translation);
        self.inverse = Some(Box::new(AffineMap::new(inv, shift)));
        Some(self)
    }

    pub fn domain_dim(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn codomain_dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn translation(&self) -> &Vector {
        &self.translation
    }

    pub fn is_invertible(&self) -> bool {
        self.inverse.is_some()
    }

    pub fn inverse(&self) -> Option<&AffineMap> {
        self.inverse.as_deref()
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        &self.matrix * x + &self.translation
    }

    /// Applies only the linear part, i.e. the differential.
    pub fn apply_linear(&self, v: &Vector) -> Vector {
        &self.matrix * v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_roundtrip() {
        let m = AffineMap::new(DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.5, 3.0]), Vector::from_vec(vec![1.0, -2.0]))
            .with_inverse()
            .unwrap();
        let inv = m.inverse().unwrap();
        for e in [Vector::from_vec(vec![1.0, 0.0]), Vector::from_vec(vec![0.0, 1.0]), Vector::zeros(2)] {
            assert!((inv.apply(&m.apply(&e)) - &e).norm() <= 1e-10);
        }
    }

    #[test]
    fn singular_and_rectangular_maps_have_no_inverse() {
        let singular = AffineMap::linear(DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]));
        assert!(singular.with_inverse().is_none());
        let rect = AffineMap::linear(DMatrix::zeros(3, 2));
        assert_eq!((rect.domain_dim(), rect.codomain_dim()), (2, 3));
        assert!(rect.with_inverse().is_none());
    }
}
