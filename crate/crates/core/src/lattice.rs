//! Face lattice, flags and face barycenters.

use std::collections::BTreeSet;

use crate::polytope::{affine_rank, mean, scaled_tol, Polytope, Vector};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    pub dim: usize,
    pub vertex_ids: Vec<usize>,
    pub active_facets: Vec<usize>,
}

/// All faces of a polytope, sorted by `(dim, vertex_ids)`.
#[derive(Debug, Clone)]
pub struct FaceLattice {
    faces: Vec<Face>,
    /// Start index of each dimension in `faces`; `offsets[n + 1] == faces.len()`.
    offsets: Vec<usize>,
    /// For each face, the indices of the faces one dimension up that contain it.
    up: Vec<Vec<usize>>,
}

/// A maximal chain `f_0 ⊂ f_1 ⊂ … ⊂ f_{n-1}` of face indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Flag {
    pub chain: Vec<usize>,
}

impl FaceLattice {
    /// Every face is the common vertex set of the facets containing it, so
    /// closing the facet vertex sets under intersection yields all proper faces.
    pub fn new(poly: &Polytope) -> Self {
        let n = poly.dimension();
        let tol = scaled_tol(poly.vertices(), poly.eps());

        let mut sets: BTreeSet<Vec<usize>> = poly.incidence().iter().cloned().collect();
        let mut frontier: Vec<Vec<usize>> = sets.iter().cloned().collect();
        let facet_sets: Vec<Vec<usize>> = poly.incidence().to_vec();
        while let Some(set) = frontier.pop() {
            for facet in &facet_sets {
                let common: Vec<usize> = set.iter().copied().filter(|i| facet.binary_search(i).is_ok()).collect();
                if !common.is_empty() && !sets.contains(&common) {
                    sets.insert(common.clone());
                    frontier.push(common);
                }
            }
        }

        let mut faces: Vec<Face> = sets
            .into_iter()
            .map(|ids| {
                let pts: Vec<Vector> = ids.iter().map(|&i| poly.vertices()[i].clone()).collect();
                let active = poly
                    .incidence()
                    .iter()
                    .enumerate()
                    .filter(|(_, inc)| ids.iter().all(|i| inc.binary_search(i).is_ok()))
                    .map(|(f, _)| f)
                    .collect();
                Face { dim: affine_rank(&pts, tol), vertex_ids: ids, active_facets: active }
            })
            .collect();
        faces.push(Face { dim: n, vertex_ids: (0..poly.vertices().len()).collect(), active_facets: vec![] });
        faces.sort_by(|a, b| (a.dim, &a.vertex_ids).cmp(&(b.dim, &b.vertex_ids)));

        let offsets: Vec<usize> =
            (0..=n + 1).map(|d| faces.iter().position(|f| f.dim >= d).unwrap_or(faces.len())).collect();

        let up = faces
            .iter()
            .map(|f| {
                if f.dim == n {
                    return vec![];
                }
                (offsets[f.dim + 1]..offsets[f.dim + 2])
                    .filter(|&g| is_subset(&f.vertex_ids, &faces[g].vertex_ids))
                    .collect()
            })
            .collect();

        Self { faces, offsets, up }
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn dimension(&self) -> usize {
        self.offsets.len() - 2
    }

    /// Index range of the faces of dimension `k`.
    pub fn range(&self, k: usize) -> std::ops::Range<usize> {
        self.offsets[k]..self.offsets[k + 1]
    }

    /// Number of faces of each dimension `0..=n`.
    pub fn f_vector(&self) -> Vec<usize> {
        (0..=self.dimension()).map(|k| self.range(k).len()).collect()
    }

    /// Faces one dimension up that contain face `i`.
    pub fn covers(&self, i: usize) -> &[usize] {
        &self.up[i]
    }

    /// All `(k-face, (k+1)-face)` inclusion pairs.
    pub fn cover_pairs(&self) -> Vec<(usize, usize)> {
        self.up.iter().enumerate().flat_map(|(i, ups)| ups.iter().map(move |&j| (i, j))).collect()
    }

    /// Index of the face with exactly this vertex set, if any.
    pub fn find(&self, vertex_ids: &[usize]) -> Option<usize> {
        self.faces.iter().position(|f| f.vertex_ids == vertex_ids)
    }

    /// Maximal chains in lexicographic order of face indices.
    pub fn flags(&self) -> Vec<Flag> {
        let n = self.dimension();
        let mut out = Vec::new();
        let mut chain = Vec::with_capacity(n);
        for v in self.range(0) {
            chain.push(v);
            self.extend_flags(&mut chain, n, &mut out);
            chain.pop();
        }
        out
    }

    fn extend_flags(&self, chain: &mut Vec<usize>, n: usize, out: &mut Vec<Flag>) {
        if chain.len() == n {
            out.push(Flag { chain: chain.clone() });
            return;
        }
        let last = *chain.last().expect("chain starts at a vertex");
        for &next in &self.up[last] {
            chain.push(next);
            self.extend_flags(chain, n, out);
            chain.pop();
        }
    }
}

/// Vertex mean of a face.
pub fn barycenter(face: &Face, poly: &Polytope) -> Vector {
    mean(face.vertex_ids.iter().map(|&i| &poly.vertices()[i]))
}

fn is_subset(small: &[usize], big: &[usize]) -> bool {
    small.iter().all(|i| big.binary_search(i).is_ok())
}
