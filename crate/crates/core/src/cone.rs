//! The lifted cone Ω = ℝ₊·(1×P) and its duality data.
//!
//! For a face F of P, `Ω_F` is the face of Ω spanned by the lifted vertices
//! of F, the dual face is `Ω̌_F = Ω_F^⊥ ∩ Ω*`, and `Ω_F^⊛` is the dual of
//! `Ω̌_F` taken inside the linear span of `Ω̌_F`. For a covering pair (E, F)
//! the edge ray `Ω̌_F^⊥ ∩ Ω_E^⊛` points from E into F. Ray generators are
//! kept as primitive integer vectors instead of unit vectors; only their
//! direction matters downstream.

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::lattice::{Face, FaceId, FaceLattice};
use crate::linalg::{
    self, dot, greedy_independent, integer_vector_to_rational, primitive_integer, LinalgError,
    QMatrix, Rational,
};
use crate::polytope::Polytope;

pub type IntVector = Vec<BigInt>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConeError {
    #[error("generators span a {rank}-dimensional space, expected {expected}")]
    NotSolid { rank: usize, expected: usize },
    #[error("generator {0} lies outside the declared span")]
    OutsideSpan(usize),
    #[error("faces {0:?} and {1:?} do not form a covering pair")]
    NotCoveringPair(Vec<usize>, Vec<usize>),
    #[error("edge ray set for {0:?} ⊂ {1:?} has dimension {2}, expected 1")]
    EdgeRayDimension(Vec<usize>, Vec<usize>, usize),
    #[error("edge ray for {0:?} ⊂ {1:?} is not a ray of the dual-face cone")]
    EdgeRaySign(Vec<usize>, Vec<usize>),
    #[error("barycenter projection vanishes for {0:?} ⊂ {1:?}")]
    ZeroProjection(Vec<usize>, Vec<usize>),
    #[error("dual face of {face:?} spans dimension {found}, expected {expected}")]
    DualFaceDimension {
        face: Vec<usize>,
        found: usize,
        expected: usize,
    },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub fn to_rational(v: &[BigInt]) -> Vec<Rational> {
    integer_vector_to_rational(v)
}

/// Generators of `{x ∈ W : ⟨x, g⟩ ≥ 0 for all g}` where W is the column span
/// of `span`, computed by enumerating the facets of `cone(gens)` inside W.
/// The generators must lie in W and span it. Output is sorted and primitive.
pub fn dual_cone(gens: &[Vec<Rational>], span: &QMatrix) -> Result<Vec<IntVector>, ConeError> {
    let (n, k) = span.shape();
    if k == 0 {
        return Ok(Vec::new());
    }
    let targets = QMatrix::from_columns(n, gens);
    let coords = linalg::coords_in_basis(span, &targets).map_err(|e| match e {
        LinalgError::OutsideSpan(i) => ConeError::OutsideSpan(i),
        other => ConeError::Linalg(other),
    })?;
    let rank = linalg::rank(&coords);
    if rank != k {
        return Err(ConeError::NotSolid { rank, expected: k });
    }
    // ⟨B c, g⟩ = c · (Bᵀ g)
    let pulled: Vec<Vec<Rational>> = gens
        .iter()
        .map(|g| (0..k).map(|j| dot(&span.column(j), g)).collect())
        .collect();

    let mut rays: Vec<IntVector> = Vec::new();
    for subset in (0..gens.len()).combinations(k - 1) {
        let rows: Vec<Vec<Rational>> = subset.iter().map(|&i| pulled[i].clone()).collect();
        let m = if rows.is_empty() {
            QMatrix::zeros(0, k)
        } else {
            QMatrix::from_rows(&rows)
        };
        let kernel = linalg::kernel_basis(&m);
        if kernel.cols() != 1 {
            continue;
        }
        let c = kernel.column(0);
        let values: Vec<Rational> = pulled.iter().map(|h| dot(&c, h)).collect();
        let sign: i64 = if values.iter().all(|v| !v.is_negative()) {
            1
        } else if values.iter().all(|v| !v.is_positive()) {
            -1
        } else {
            continue;
        };
        let x: Vec<Rational> = (0..n)
            .map(|i| dot(span.row(i), &c) * Rational::from(BigInt::from(sign)))
            .collect();
        let ray = primitive_integer(&x);
        if !rays.contains(&ray) {
            rays.push(ray);
        }
    }
    rays.sort();
    Ok(rays)
}

/// Ω = ℝ₊·(1×P) ⊂ ℝ^{d+1}.
#[derive(Debug, Clone)]
pub struct LiftedCone {
    ambient_dim: usize,
    generators: Vec<Vec<Rational>>,
    facet_normals: Vec<IntVector>,
}

impl LiftedCone {
    pub fn lift(p: &Polytope) -> Self {
        let n = p.dim() + 1;
        let generators: Vec<Vec<Rational>> = p
            .vertices()
            .iter()
            .map(|v| {
                std::iter::once(linalg::int(1))
                    .chain(v.iter().cloned())
                    .collect()
            })
            .collect();
        // A valid polytope lifts to a solid cone, so this cannot fail.
        let facet_normals = dual_cone(&generators, &QMatrix::identity(n))
            .expect("lifted vertices of a full-dimensional polytope span R^n");
        LiftedCone {
            ambient_dim: n,
            generators,
            facet_normals,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Lifted vertices (1, v), in vertex order.
    pub fn generators(&self) -> &[Vec<Rational>] {
        &self.generators
    }

    /// Primitive inner facet normals of Ω; they generate Ω*.
    pub fn facet_normals(&self) -> &[IntVector] {
        &self.facet_normals
    }

    pub fn is_pointed(&self) -> bool {
        // (1, 0, …, 0) is strictly positive on every generator.
        self.generators.iter().all(|g| g[0].is_positive())
    }

    pub fn is_solid(&self) -> bool {
        linalg::rank(&QMatrix::from_columns(self.ambient_dim, &self.generators)) == self.ambient_dim
    }

    /// Deterministic basis of Span(Ω_F): greedy independent lifted vertices of F
    /// in increasing vertex order.
    pub fn span_basis(&self, face: &Face) -> QMatrix {
        let lifted: Vec<Vec<Rational>> = face
            .vertices
            .iter()
            .map(|&v| self.generators[v].clone())
            .collect();
        let chosen = greedy_independent(&lifted, self.ambient_dim);
        let cols: Vec<Vec<Rational>> = chosen.into_iter().map(|i| lifted[i].clone()).collect();
        QMatrix::from_columns(self.ambient_dim, &cols)
    }

    pub fn face_data(&self, face: &Face) -> Result<FaceConeData, ConeError> {
        let n = self.ambient_dim;
        let span_basis = self.span_basis(face);
        let dual_face_gens: Vec<IntVector> = self
            .facet_normals
            .iter()
            .filter(|g| {
                let g = to_rational(g);
                face.vertices
                    .iter()
                    .all(|&v| dot(&g, &self.generators[v]).is_zero())
            })
            .cloned()
            .collect();
        let dual_rational: Vec<Vec<Rational>> =
            dual_face_gens.iter().map(|g| to_rational(g)).collect();
        let chosen = greedy_independent(&dual_rational, n);
        let expected = n - span_basis.cols();
        if chosen.len() != expected {
            return Err(ConeError::DualFaceDimension {
                face: face.vertices.clone(),
                found: chosen.len(),
                expected,
            });
        }
        let dual_span_basis = QMatrix::from_columns(
            n,
            &chosen
                .iter()
                .map(|&i| dual_rational[i].clone())
                .collect::<Vec<_>>(),
        );
        // For ∅ the dual face is all of Ω*, whose dual is Ω again; skip the
        // subset enumeration over every facet normal.
        let circledast_gens = if face.dim < 0 {
            let mut rays: Vec<IntVector> = self
                .generators
                .iter()
                .map(|g| primitive_integer(g))
                .collect();
            rays.sort();
            rays
        } else {
            dual_cone(&dual_rational, &dual_span_basis)?
        };
        Ok(FaceConeData {
            face: face.clone(),
            span_basis,
            dual_face_gens,
            dual_span_basis,
            circledast_gens,
        })
    }
}

#[derive(Debug, Clone)]
pub struct FaceConeData {
    pub face: Face,
    /// Columns: a basis of Span(Ω_F) made of lifted vertices of F.
    pub span_basis: QMatrix,
    /// Generators of the dual face Ω̌_F.
    pub dual_face_gens: Vec<IntVector>,
    /// Columns: a basis of Span(Ω̌_F) made of dual face generators.
    pub dual_span_basis: QMatrix,
    /// Generators of Ω_F^⊛.
    pub circledast_gens: Vec<IntVector>,
}

/// Cone data for every face of a lattice, indexed like the lattice.
#[derive(Debug, Clone)]
pub struct FaceCones {
    cone: LiftedCone,
    data: Vec<Vec<FaceConeData>>,
}

impl FaceCones {
    pub fn new(cone: LiftedCone, lattice: &FaceLattice) -> Result<Self, ConeError> {
        let data = (-1..=lattice.dim() as i32)
            .map(|d| lattice.faces(d).iter().map(|f| cone.face_data(f)).collect())
            .collect::<Result<_, _>>()?;
        Ok(FaceCones { cone, data })
    }

    pub fn cone(&self) -> &LiftedCone {
        &self.cone
    }

    pub fn get(&self, id: FaceId) -> &FaceConeData {
        &self.data[(id.dim + 1) as usize][id.index]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeRay {
    pub lower: Vec<usize>,
    pub upper: Vec<usize>,
    pub direction: IntVector,
}

fn check_covering(lower: &FaceConeData, upper: &FaceConeData) -> Result<(), ConeError> {
    let (e, f) = (&lower.face, &upper.face);
    if e.dim + 1 != f.dim || !e.vertices.iter().all(|v| f.vertices.contains(v)) {
        return Err(ConeError::NotCoveringPair(
            e.vertices.clone(),
            f.vertices.clone(),
        ));
    }
    Ok(())
}

/// The generator of `Ω̌_F^⊥ ∩ Ω_E^⊛` for a covering pair E ⊂ F, computed from
/// dual-side data only: the line inside Span(Ω̌_E) orthogonal to Ω̌_F, oriented
/// to be nonnegative on Ω̌_E.
pub fn edge_ray(lower: &FaceConeData, upper: &FaceConeData) -> Result<EdgeRay, ConeError> {
    check_covering(lower, upper)?;
    let names = || (lower.face.vertices.clone(), upper.face.vertices.clone());
    let basis = &lower.dual_span_basis;
    let (n, k) = basis.shape();
    let rows: Vec<Vec<Rational>> = upper
        .dual_face_gens
        .iter()
        .map(|g| {
            let g = to_rational(g);
            (0..k).map(|j| dot(&basis.column(j), &g)).collect()
        })
        .collect();
    let m = if rows.is_empty() {
        QMatrix::zeros(0, k)
    } else {
        QMatrix::from_rows(&rows)
    };
    let kernel = linalg::kernel_basis(&m);
    if kernel.cols() != 1 {
        let (e, f) = names();
        return Err(ConeError::EdgeRayDimension(e, f, kernel.cols()));
    }
    let c = kernel.column(0);
    let x: Vec<Rational> = (0..n).map(|i| dot(basis.row(i), &c)).collect();
    let values: Vec<Rational> = lower
        .dual_face_gens
        .iter()
        .map(|g| dot(&to_rational(g), &x))
        .collect();
    let flip = if values.iter().all(|v| !v.is_negative()) && values.iter().any(|v| v.is_positive())
    {
        false
    } else if values.iter().all(|v| !v.is_positive()) && values.iter().any(|v| v.is_negative()) {
        true
    } else {
        let (e, f) = names();
        return Err(ConeError::EdgeRaySign(e, f));
    };
    let x: Vec<Rational> = if flip {
        x.into_iter().map(|v| -v).collect()
    } else {
        x
    };
    let (e, f) = names();
    Ok(EdgeRay {
        lower: e,
        upper: f,
        direction: primitive_integer(&x),
    })
}

/// Independent construction: the component of the barycenter of the lifted
/// vertices of F orthogonal to Span(Ω_E). Uses primal data only.
pub fn edge_ray_crosscheck(
    cone: &LiftedCone,
    lower: &FaceConeData,
    upper: &FaceConeData,
) -> Result<Vec<Rational>, ConeError> {
    check_covering(lower, upper)?;
    let n = cone.ambient_dim();
    let count = Rational::from(BigInt::from(upper.face.vertices.len()));
    let mut bary = vec![Rational::zero(); n];
    for &v in &upper.face.vertices {
        for (b, x) in bary.iter_mut().zip(&cone.generators()[v]) {
            *b += x;
        }
    }
    let bary: Vec<Rational> = bary.into_iter().map(|b| b / &count).collect();

    let a = &lower.span_basis;
    let projected = if a.cols() == 0 {
        bary.clone()
    } else {
        let gram = &a.transpose() * a;
        let rhs = QMatrix::from_columns(
            a.cols(),
            &[(0..a.cols()).map(|j| dot(&a.column(j), &bary)).collect()],
        );
        let coeffs = linalg::coords_in_basis(&gram, &rhs)?.column(0);
        (0..n).map(|i| &bary[i] - dot(a.row(i), &coeffs)).collect()
    };
    if projected.iter().all(Zero::is_zero) {
        return Err(ConeError::ZeroProjection(
            lower.face.vertices.clone(),
            upper.face.vertices.clone(),
        ));
    }
    Ok(projected)
}

/// Whether `a = λ·b` for some rational λ > 0.
pub fn is_positive_multiple(a: &[Rational], b: &[BigInt]) -> bool {
    let b = to_rational(b);
    let Some(pivot) = b.iter().position(|x| !x.is_zero()) else {
        return false;
    };
    let lambda = &a[pivot] / &b[pivot];
    lambda.is_positive() && a.iter().zip(&b).all(|(x, y)| *x == &lambda * y)
}

/// Checks the membership conditions of an edge ray against both faces' data.
pub fn check_edge_ray(
    ray: &EdgeRay,
    lower: &FaceConeData,
    upper: &FaceConeData,
) -> Result<(), String> {
    let dir = to_rational(&ray.direction);
    let in_span = linalg::rank(&upper.span_basis.hstack(&QMatrix::from_columns(
        dir.len(),
        std::slice::from_ref(&dir),
    ))) == upper.span_basis.cols();
    if !in_span {
        return Err("direction not in Span(Ω_F)".into());
    }
    if !lower
        .span_basis
        .columns()
        .iter()
        .all(|c| dot(c, &dir).is_zero())
    {
        return Err("direction not orthogonal to Span(Ω_E)".into());
    }
    if lower
        .dual_face_gens
        .iter()
        .any(|g| dot(&to_rational(g), &dir).is_negative())
    {
        return Err("direction not in Ω_E^⊛".into());
    }
    if !upper
        .dual_face_gens
        .iter()
        .all(|g| dot(&to_rational(g), &dir).is_zero())
    {
        return Err("direction not orthogonal to Ω̌_F".into());
    }
    Ok(())
}
