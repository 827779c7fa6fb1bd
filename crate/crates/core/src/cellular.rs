//! The augmented cellular chain complex of a polytope with faces as cells.
//!
//! Each face F carries a basis `A_F` of Span(Ω_F). For a covering pair E ⊂ F
//! with edge ray e, the incidence number is `[E:F] = sign det((e, A_E)⁻¹ A_F)`,
//! and the boundary of F is `Σ [E:F]·E` over the codimension-one faces E.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cone::{self, ConeError, FaceCones};
use crate::lattice::{Face, FaceId, FaceLattice, LatticeError};
use crate::linalg::{self, smith_normal_form, LinalgError, QMatrix, ZMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CellularError {
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("zero determinant for incidence {lower:?} ⊂ {upper:?}")]
    DegenerateSign {
        lower: Vec<usize>,
        upper: Vec<usize>,
    },
    #[error("edge ray cross-check failed for {lower:?} ⊂ {upper:?}: {reason}")]
    CrossCheck {
        lower: Vec<usize>,
        upper: Vec<usize>,
        reason: String,
    },
    #[error("boundary of boundary is nonzero: D_{} · D_{j} has entry {value} at ({lower:?}, {upper:?})", j - 1)]
    BoundarySquared {
        j: usize,
        lower: Vec<usize>,
        upper: Vec<usize>,
        value: BigInt,
    },
    #[error("boundary matrix D_{j} has shape {found:?}, expected {expected:?}")]
    Shape {
        j: usize,
        found: (usize, usize),
        expected: (usize, usize),
    },
}

/// Per-face bases `A_F`, with optional orientation flips.
#[derive(Debug, Clone)]
pub struct Trivialization {
    bases: Vec<Vec<QMatrix>>,
    flips: Vec<Vec<bool>>,
}

impl Trivialization {
    /// Greedy lifted-vertex bases in increasing vertex order.
    pub fn new(lattice: &FaceLattice, cones: &FaceCones) -> Self {
        let mut bases = Vec::new();
        let mut flips = Vec::new();
        for d in -1..=lattice.dim() as i32 {
            let count = lattice.faces(d).len();
            bases.push(
                (0..count)
                    .map(|i| cones.get(FaceId::new(d, i)).span_basis.clone())
                    .collect(),
            );
            flips.push(vec![false; count]);
        }
        Trivialization { bases, flips }
    }

    /// Reverses the orientation of one face. For faces of dimension ≥ 0 this
    /// negates the first basis column; the empty face carries the flip as a sign.
    pub fn flip(&mut self, id: FaceId) {
        let slot = &mut self.flips[(id.dim + 1) as usize][id.index];
        *slot = !*slot;
    }

    pub fn is_flipped(&self, id: FaceId) -> bool {
        self.flips[(id.dim + 1) as usize][id.index]
    }

    pub fn basis(&self, id: FaceId) -> QMatrix {
        let mut a = self.bases[(id.dim + 1) as usize][id.index].clone();
        if self.is_flipped(id) && a.cols() > 0 {
            for i in 0..a.rows() {
                a[(i, 0)] = -a[(i, 0)].clone();
            }
        }
        a
    }

    fn empty_sign(&self, id: FaceId) -> i8 {
        if id.dim == -1 && self.is_flipped(id) {
            -1
        } else {
            1
        }
    }

    /// `sign det((e, A_E)⁻¹ A_F)` for the covering pair E ⊂ F with edge ray `direction`.
    pub fn incidence_sign(
        &self,
        direction: &[BigInt],
        lower: FaceId,
        upper: FaceId,
    ) -> Result<i8, CellularError> {
        let a_e = self.basis(lower);
        let a_f = self.basis(upper);
        let e = QMatrix::from_columns(a_f.rows(), &[cone::to_rational(direction)]);
        let coords = linalg::coords_in_basis(&e.hstack(&a_e), &a_f)?;
        let sign = linalg::det_sign(&coords)? * self.empty_sign(lower);
        Ok(sign)
    }
}

/// Computes D_0, …, D_d without verifying ∂∘∂ = 0. Every edge ray is checked
/// against its barycentric cross-check and membership conditions.
pub fn boundary_matrices(
    lattice: &FaceLattice,
    cones: &FaceCones,
    triv: &Trivialization,
) -> Result<Vec<ZMatrix>, CellularError> {
    (0..=lattice.dim())
        .map(|j| boundary_matrix(lattice, cones, triv, j as i32))
        .collect()
}

/// D_j with rows indexed by F_{j−1} and columns by F_j.
pub fn boundary_matrix(
    lattice: &FaceLattice,
    cones: &FaceCones,
    triv: &Trivialization,
    j: i32,
) -> Result<ZMatrix, CellularError> {
    let pairs = lattice.covering_pairs(j)?;
    let mut d = ZMatrix::zeros(lattice.faces(j - 1).len(), lattice.faces(j).len());
    for (e, f) in pairs {
        let (lower_id, upper_id) = (FaceId::new(j - 1, e), FaceId::new(j, f));
        let (lower, upper) = (cones.get(lower_id), cones.get(upper_id));
        let ray = cone::edge_ray(lower, upper)?;
        let cross_error = |reason: String| CellularError::CrossCheck {
            lower: lower.face.vertices.clone(),
            upper: upper.face.vertices.clone(),
            reason,
        };
        cone::check_edge_ray(&ray, lower, upper).map_err(cross_error)?;
        let projection = cone::edge_ray_crosscheck(cones.cone(), lower, upper)?;
        if !cone::is_positive_multiple(&projection, &ray.direction) {
            return Err(cross_error(
                "barycenter projection is not a positive multiple".into(),
            ));
        }
        let sign = triv.incidence_sign(&ray.direction, lower_id, upper_id)?;
        if sign == 0 {
            return Err(CellularError::DegenerateSign {
                lower: lower.face.vertices.clone(),
                upper: upper.face.vertices.clone(),
            });
        }
        d[(e, f)] = BigInt::from(sign);
    }
    Ok(d)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainComplex {
    dim: usize,
    boundary: Vec<ZMatrix>,
    faces: Vec<Vec<Face>>,
}

impl ChainComplex {
    /// Assembles and verifies the complex: shapes match the face counts and
    /// every product D_{j−1}·D_j vanishes.
    pub fn new(lattice: &FaceLattice, boundary: Vec<ZMatrix>) -> Result<Self, CellularError> {
        let dim = lattice.dim();
        let faces: Vec<Vec<Face>> = (-1..=dim as i32)
            .map(|d| lattice.faces(d).to_vec())
            .collect();
        for (j, m) in boundary.iter().enumerate() {
            let expected = (faces[j].len(), faces[j + 1].len());
            if m.shape() != expected || boundary.len() != dim + 1 {
                return Err(CellularError::Shape {
                    j,
                    found: m.shape(),
                    expected,
                });
            }
        }
        let complex = ChainComplex {
            dim,
            boundary,
            faces,
        };
        complex.verify()?;
        Ok(complex)
    }

    pub fn verify(&self) -> Result<(), CellularError> {
        for j in 1..=self.dim {
            let product = &self.boundary[j - 1] * &self.boundary[j];
            for r in 0..product.rows() {
                for c in 0..product.cols() {
                    if !product[(r, c)].is_zero() {
                        return Err(CellularError::BoundarySquared {
                            j,
                            lower: self.faces[j - 1][r].vertices.clone(),
                            upper: self.faces[j + 1][c].vertices.clone(),
                            value: product[(r, c)].clone(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// D_j for 0 ≤ j ≤ d.
    pub fn boundary(&self, j: usize) -> &ZMatrix {
        &self.boundary[j]
    }

    pub fn boundaries(&self) -> &[ZMatrix] {
        &self.boundary
    }

    /// Faces of dimension `dim` in matrix order.
    pub fn faces(&self, dim: i32) -> &[Face] {
        &self.faces[(dim + 1) as usize]
    }

    /// Replaces one boundary matrix without re-verifying; used to build
    /// deliberately broken complexes.
    pub fn with_boundary_unchecked(mut self, j: usize, m: ZMatrix) -> Self {
        self.boundary[j] = m;
        self
    }
}

/// Builds the trivialization-dependent complex of a lattice in one call.
pub fn build_complex(
    lattice: &FaceLattice,
    cones: &FaceCones,
    triv: &Trivialization,
) -> Result<ChainComplex, CellularError> {
    let boundary = boundary_matrices(lattice, cones, triv)?;
    ChainComplex::new(lattice, boundary)
}

/// A finitely generated abelian group ℤ^rank ⊕ ⨁ ℤ/t_i.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AbelianGroup {
    pub rank: usize,
    #[serde(with = "decimal_list")]
    pub torsion: Vec<BigInt>,
}

impl AbelianGroup {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn free(rank: usize) -> Self {
        AbelianGroup {
            rank,
            torsion: Vec::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    pub fn is_integers(&self) -> bool {
        self.rank == 1 && self.torsion.is_empty()
    }

    /// Direct sum; torsion is kept as a sorted list of cyclic orders.
    pub fn sum(&self, other: &Self) -> Self {
        let mut torsion: Vec<BigInt> = self.torsion.iter().chain(&other.torsion).cloned().collect();
        torsion.sort();
        AbelianGroup {
            rank: self.rank + other.rank,
            torsion,
        }
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

mod decimal_list {
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| s.parse().map_err(D::Error::custom))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyGroup {
    pub degree: i32,
    pub group: AbelianGroup,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyResult {
    pub augmented: bool,
    pub groups: Vec<HomologyGroup>,
}

impl HomologyResult {
    pub fn group(&self, degree: i32) -> Option<&AbelianGroup> {
        self.groups
            .iter()
            .find(|g| g.degree == degree)
            .map(|g| &g.group)
    }

    pub fn vanishes(&self) -> bool {
        self.groups.iter().all(|g| g.group.is_zero())
    }

    /// The single degree carrying ℤ when every other group vanishes.
    pub fn concentrated_integers(&self) -> Option<i32> {
        let nonzero: Vec<&HomologyGroup> =
            self.groups.iter().filter(|g| !g.group.is_zero()).collect();
        match nonzero.as_slice() {
            [g] if g.group.is_integers() => Some(g.degree),
            _ => None,
        }
    }

    pub fn nonzero(&self) -> impl Iterator<Item = &HomologyGroup> {
        self.groups.iter().filter(|g| !g.group.is_zero())
    }
}

/// Homology via Smith normal forms. The augmented complex has degrees
/// −1..=d; the plain complex drops the augmentation row and has degrees 0..=d.
///
/// Degree j is computed as `ker D_j / (ker D_j ∩ im D_{j+1})`, which is the
/// usual homology when D_j · D_{j+1} = 0 and stays meaningful for broken
/// input.
pub fn homology(complex: &ChainComplex, augmented: bool) -> HomologyResult {
    let d = complex.dim as i32;
    let size = |j: i32| -> usize {
        if j < -1 || j > d {
            0
        } else {
            complex.faces(j).len()
        }
    };
    // D_j : C_j → C_{j−1}, zero outside the stored range.
    let map = |j: i32| -> ZMatrix {
        if j < 0 || j > d || (j == 0 && !augmented) {
            ZMatrix::zeros(if j == 0 { 0 } else { size(j - 1) }, size(j))
        } else {
            complex.boundary[j as usize].clone()
        }
    };
    let lowest = if augmented { -1 } else { 0 };
    let groups = (lowest..=d)
        .map(|j| HomologyGroup {
            degree: j,
            group: subquotient(&map(j), &map(j + 1)),
        })
        .collect();
    HomologyResult { augmented, groups }
}

/// `ker outgoing / (ker outgoing ∩ im incoming)` as an abelian group,
/// computed as `(ker + im) / im`.
fn subquotient(outgoing: &ZMatrix, incoming: &ZMatrix) -> AbelianGroup {
    let n = outgoing.cols();
    let snf = smith_normal_form(outgoing);
    let r = snf.rank();
    let kernel: Vec<Vec<BigInt>> = (r..n).map(|c| snf.v.column(c)).collect();
    let mut gens = kernel;
    gens.extend(incoming.columns());
    if gens.is_empty() {
        return AbelianGroup::zero();
    }
    let span = ZMatrix::from_columns(n, &gens);
    let snf_span = smith_normal_form(&span);
    let s = snf_span.rank();
    if s == 0 {
        return AbelianGroup::zero();
    }
    // Z-basis of the span: columns of U⁻¹ scaled by the invariant factors.
    let u_inv = linalg::coords_in_basis(&linalg::to_rational(&snf_span.u), &QMatrix::identity(n))
        .expect("unimodular matrices are invertible");
    let basis_cols: Vec<Vec<linalg::Rational>> = (0..s)
        .map(|i| {
            let factor = linalg::Rational::from_integer(snf_span.diagonal[i].clone());
            u_inv.column(i).into_iter().map(|x| x * &factor).collect()
        })
        .collect();
    let basis = QMatrix::from_columns(n, &basis_cols);
    let image = linalg::to_rational(incoming);
    let coords = linalg::coords_in_basis(&basis, &image).expect("image lies in the span");
    let coords: ZMatrix = coords.map(|x| {
        debug_assert!(x.is_integer());
        x.to_integer()
    });
    let snf_coords = smith_normal_form(&coords);
    AbelianGroup {
        rank: s - snf_coords.rank(),
        torsion: snf_coords.torsion().into_iter().map(|t| t.abs()).collect(),
    }
}
