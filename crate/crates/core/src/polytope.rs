//! Full-dimensional polytopes given by rational vertices.

use std::collections::BTreeSet;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::lattice::FaceLattice;
use crate::linalg::{self, dot, integer_vector_to_rational, primitive_integer, QMatrix, Rational};

pub type Point = Vec<Rational>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolytopeError {
    #[error("no vertices given")]
    Empty,
    #[error("point {index} has {found} coordinates, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("point {index} duplicates point {first}")]
    Duplicate { index: usize, first: usize },
    #[error("hull is not full-dimensional: affine dimension {affine_dim} in R^{ambient}")]
    NotFullDimensional { affine_dim: usize, ambient: usize },
    #[error("point {index} is not extreme")]
    NotExtreme { index: usize },
}

/// A supporting hyperplane `⟨normal, x⟩ ≤ offset` meeting the polytope in a facet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Facet {
    /// Primitive integer outer normal.
    pub normal: Vec<BigInt>,
    pub offset: Rational,
    /// Sorted indices of the vertices on the hyperplane.
    pub vertices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Point>,
    name: Option<String>,
}

impl Polytope {
    /// Validates a V-representation: points must be distinct, affinely span
    /// `R^dim`, and each must be a vertex of the hull.
    pub fn new(dim: usize, vertices: Vec<Point>) -> Result<Self, PolytopeError> {
        check_shape(dim, &vertices)?;
        check_distinct(&vertices)?;
        check_full_dimensional(dim, &vertices)?;
        let facets = supporting_facets(dim, &vertices);
        if let Some(index) = (0..vertices.len()).find(|&i| !is_extreme(dim, &facets, i)) {
            return Err(PolytopeError::NotExtreme { index });
        }
        Ok(Polytope {
            dim,
            vertices,
            name: None,
        })
    }

    /// Convex hull of a point cloud: duplicates and non-extreme points are dropped.
    /// The surviving vertices keep their relative input order.
    pub fn hull(dim: usize, points: Vec<Point>) -> Result<Self, PolytopeError> {
        check_shape(dim, &points)?;
        let mut seen = BTreeSet::new();
        let points: Vec<Point> = points
            .into_iter()
            .filter(|p| seen.insert(p.clone()))
            .collect();
        check_full_dimensional(dim, &points)?;
        let facets = supporting_facets(dim, &points);
        let vertices = (0..points.len())
            .filter(|&i| is_extreme(dim, &facets, i))
            .map(|i| points[i].clone())
            .collect();
        Polytope::new(dim, vertices)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// Complete, duplicate-free facet list, sorted by vertex set.
    pub fn facets(&self) -> Vec<Facet> {
        supporting_facets(self.dim, &self.vertices)
    }

    pub fn face_lattice(&self) -> FaceLattice {
        FaceLattice::of_polytope(self)
    }

    /// Affine dimension of a subset of the vertices; −1 for the empty set.
    pub fn affine_dim(&self, subset: &[usize]) -> i32 {
        let pts: Vec<Point> = subset.iter().map(|&i| self.vertices[i].clone()).collect();
        affine_dimension(self.dim, &pts)
    }

    /// Vertices in a new order: vertex `i` of the result is vertex `order[i]` of `self`.
    pub fn permuted(&self, order: &[usize]) -> Polytope {
        assert_eq!(order.len(), self.vertices.len());
        Polytope {
            dim: self.dim,
            vertices: order.iter().map(|&i| self.vertices[i].clone()).collect(),
            name: self.name.clone(),
        }
    }

    /// Image under `x ↦ M x + t` for an invertible rational matrix `M`.
    pub fn affine_image(&self, m: &QMatrix, t: &[Rational]) -> Result<Polytope, PolytopeError> {
        assert_eq!(m.shape(), (self.dim, self.dim));
        let vertices = self
            .vertices
            .iter()
            .map(|v| {
                (0..self.dim)
                    .map(|i| dot(m.row(i), v) + &t[i])
                    .collect::<Point>()
            })
            .collect();
        let p = Polytope::new(self.dim, vertices)?;
        Ok(match &self.name {
            Some(n) => p.with_name(n.clone()),
            None => p,
        })
    }
}

fn check_shape(dim: usize, points: &[Point]) -> Result<(), PolytopeError> {
    if points.is_empty() {
        return Err(PolytopeError::Empty);
    }
    match points.iter().position(|p| p.len() != dim) {
        Some(index) => Err(PolytopeError::DimensionMismatch {
            index,
            expected: dim,
            found: points[index].len(),
        }),
        None => Ok(()),
    }
}

fn check_distinct(points: &[Point]) -> Result<(), PolytopeError> {
    for (index, p) in points.iter().enumerate() {
        if let Some(first) = points[..index].iter().position(|q| q == p) {
            return Err(PolytopeError::Duplicate { index, first });
        }
    }
    Ok(())
}

fn check_full_dimensional(dim: usize, points: &[Point]) -> Result<(), PolytopeError> {
    let affine_dim = affine_dimension(dim, points);
    if affine_dim != dim as i32 {
        return Err(PolytopeError::NotFullDimensional {
            affine_dim: affine_dim.max(0) as usize,
            ambient: dim,
        });
    }
    Ok(())
}

pub(crate) fn affine_dimension(dim: usize, points: &[Point]) -> i32 {
    let Some((first, rest)) = points.split_first() else {
        return -1;
    };
    let diffs: Vec<Vec<Rational>> = rest
        .iter()
        .map(|p| p.iter().zip(first).map(|(a, b)| a - b).collect())
        .collect();
    linalg::rank(&QMatrix::from_columns(dim, &diffs)) as i32
}

// A point is a vertex iff the facet normals through it span R^dim.
fn is_extreme(dim: usize, facets: &[Facet], index: usize) -> bool {
    if dim == 0 {
        return true;
    }
    let normals: Vec<Vec<Rational>> = facets
        .iter()
        .filter(|f| f.vertices.binary_search(&index).is_ok())
        .map(|f| integer_vector_to_rational(&f.normal))
        .collect();
    !normals.is_empty() && linalg::rank(&QMatrix::from_columns(dim, &normals)) == dim
}

/// Brute-force facet enumeration: every affine hyperplane spanned by `dim`
/// points that supports the whole point set.
fn supporting_facets(dim: usize, points: &[Point]) -> Vec<Facet> {
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut facets = Vec::new();
    for subset in (0..points.len()).combinations(dim) {
        let Some(normal) = hyperplane_normal(dim, points, &subset) else {
            continue;
        };
        let offset = dot(&normal, &points[subset[0]]);
        let values: Vec<Rational> = points.iter().map(|p| dot(&normal, p) - &offset).collect();
        let sign = if values.iter().all(|v| !v.is_positive()) {
            1
        } else if values.iter().all(|v| !v.is_negative()) {
            -1
        } else {
            continue;
        };
        let on: Vec<usize> = (0..points.len()).filter(|&i| values[i].is_zero()).collect();
        if !seen.insert(on.clone()) {
            continue;
        }
        let oriented: Vec<Rational> = normal
            .iter()
            .map(|x| x * Rational::from(BigInt::from(sign)))
            .collect();
        let normal = primitive_integer(&oriented);
        let offset = dot(&integer_vector_to_rational(&normal), &points[subset[0]]);
        facets.push(Facet {
            normal,
            offset,
            vertices: on,
        });
    }
    facets.sort_by(|a, b| a.vertices.cmp(&b.vertices));
    facets
}

fn hyperplane_normal(dim: usize, points: &[Point], subset: &[usize]) -> Option<Vec<Rational>> {
    let base = &points[*subset.first()?];
    let rows: Vec<Vec<Rational>> = subset[1..]
        .iter()
        .map(|&i| points[i].iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    let m = if rows.is_empty() {
        QMatrix::zeros(0, dim)
    } else {
        QMatrix::from_rows(&rows)
    };
    let kernel = linalg::kernel_basis(&m);
    (kernel.cols() == 1).then(|| kernel.column(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{int, ratio};

    fn pts(rows: &[&[i64]]) -> Vec<Point> {
        rows.iter()
            .map(|r| r.iter().map(|&x| int(x)).collect())
            .collect()
    }

    #[test]
    fn validate_examples() {
        let seg = Polytope::new(1, pts(&[&[0], &[1]])).unwrap();
        assert_eq!(seg.vertices().len(), 2);

        let mut tri = pts(&[&[0, 0], &[1, 0], &[0, 1]]);
        tri.push(vec![ratio(1, 2), ratio(1, 4)]);
        assert_eq!(
            Polytope::new(2, tri),
            Err(PolytopeError::NotExtreme { index: 3 })
        );

        assert_eq!(
            Polytope::new(2, pts(&[&[0, 0], &[1, 1], &[2, 2]])),
            Err(PolytopeError::NotFullDimensional {
                affine_dim: 1,
                ambient: 2
            })
        );
    }

    #[test]
    fn validate_errors() {
        assert_eq!(Polytope::new(2, vec![]), Err(PolytopeError::Empty));
        assert_eq!(
            Polytope::new(1, pts(&[&[0], &[1], &[0]])),
            Err(PolytopeError::Duplicate { index: 2, first: 0 })
        );
        assert_eq!(
            Polytope::new(2, pts(&[&[0, 0], &[1]])),
            Err(PolytopeError::DimensionMismatch {
                index: 1,
                expected: 2,
                found: 1
            })
        );
        // midpoint of an edge lies on a facet but is not a vertex
        assert_eq!(
            Polytope::new(2, pts(&[&[0, 0], &[2, 0], &[0, 2], &[1, 0]])),
            Err(PolytopeError::NotExtreme { index: 3 })
        );
    }

    #[test]
    fn point_polytope() {
        let p = Polytope::new(0, vec![vec![]]).unwrap();
        assert!(p.facets().is_empty());
    }

    #[test]
    fn segment_facets() {
        let seg = Polytope::new(1, pts(&[&[0], &[1]])).unwrap();
        let f = seg.facets();
        assert_eq!(f.len(), 2);
        assert_eq!(f[0].normal, vec![BigInt::from(-1)]);
        assert_eq!(f[0].offset, int(0));
        assert_eq!(f[1].normal, vec![BigInt::from(1)]);
        assert_eq!(f[1].offset, int(1));
    }

    #[test]
    fn facets_support_and_have_codim_one() {
        let cube = Polytope::new(
            3,
            pts(&[
                &[0, 0, 0],
                &[1, 0, 0],
                &[0, 1, 0],
                &[1, 1, 0],
                &[0, 0, 1],
                &[1, 0, 1],
                &[0, 1, 1],
                &[1, 1, 1],
            ]),
        )
        .unwrap();
        let facets = cube.facets();
        assert_eq!(facets.len(), 6);
        for f in &facets {
            let n = integer_vector_to_rational(&f.normal);
            assert!(cube.vertices().iter().all(|v| dot(&n, v) <= f.offset));
            assert_eq!(cube.affine_dim(&f.vertices), 2);
        }
        for v in 0..8 {
            assert!(facets.iter().filter(|f| f.vertices.contains(&v)).count() >= 3);
        }
    }

    #[test]
    fn hull_drops_interior_points() {
        let p = Polytope::hull(
            2,
            pts(&[&[0, 0], &[4, 0], &[1, 1], &[0, 4], &[2, 0], &[0, 0]]),
        )
        .unwrap();
        assert_eq!(p.vertices(), &pts(&[&[0, 0], &[4, 0], &[0, 4]])[..]);
    }
}
