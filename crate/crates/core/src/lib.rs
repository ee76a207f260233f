//! Hilbert geometries of convex polytopes and an explicit bi-Lipschitz
//! flattening of a polytopal Hilbert geometry onto Euclidean space.
//!
//! The pieces, bottom-up:
//!
//! - [`polytope`]: dual vertex/halfspace polytopes, containment and ray exits.
//! - [`lattice`]: face lattice, flags and face barycenters.
//! - [`hilbert`]: Hilbert distance, Finsler norm and projective maps.
//! - [`simplex`]: the standard simplex, its log-coordinate isometry onto the
//!   sum-zero hyperplane, and the standard cell and cone.
//! - [`atlas`]: barycentric cell decomposition and the flattening map built
//!   from per-cell charts.
//! - [`experiments`]: seeded estimators for the distortion constants.
//!
//! ```
//! use hilbert_core::{FlatteningAtlas, HilbertStructure, Polytope, Vector};
//!
//! let square = Polytope::from_points(&[
//!     Vector::from_vec(vec![0.0, 0.0]),
//!     Vector::from_vec(vec![1.0, 0.0]),
//!     Vector::from_vec(vec![1.0, 1.0]),
//!     Vector::from_vec(vec![0.0, 1.0]),
//! ])
//! .unwrap();
//! let p = Vector::from_vec(vec![0.5, 0.5]);
//! let q = Vector::from_vec(vec![0.75, 0.5]);
//! let d = HilbertStructure::new(&square).distance(&p, &q).unwrap();
//! assert!((d - 0.5 * 3f64.ln()).abs() < 1e-12);
//!
//! let atlas = FlatteningAtlas::new(&square).unwrap();
//! assert_eq!(atlas.cells().len(), 8);
//! let y = atlas.flatten(&q).unwrap();
//! assert!((atlas.unflatten(&y).unwrap() - q).norm() < 1e-12);
//! ```

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod affine;
pub mod atlas;
#[cfg(feature = "cli")]
pub mod cli;
pub mod error;
pub mod experiments;
pub mod hilbert;
pub mod lattice;
pub mod polytope;
pub mod sampling;
pub mod simplex;

pub use affine::AffineMap;
pub use atlas::{CellCone, CellSimplex, FlatteningAtlas};
pub use error::{Error, Result};
pub use hilbert::{cross_ratio, HilbertStructure, ProjectiveMap};
pub use lattice::{barycenter, Face, FaceLattice, Flag};
pub use polytope::{Halfspace, Location, Polytope, RayExit, Vector, EPS_GEOM, EPS_INT};
pub use sampling::SampleConfig;
