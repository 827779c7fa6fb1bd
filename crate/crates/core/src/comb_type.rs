//! Combinatorial type: recovering the face lattice from unsigned incidence
//! numbers and deciding lattice isomorphism.
//!
//! The absolute values |[E:F]| are 1 exactly on covering pairs, so the
//! unsigned boundary matrices are the Hasse diagram of the face lattice.

use std::collections::VecDeque;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::cellular::ChainComplex;
use crate::lattice::{FaceId, FaceLattice, LatticeError};
use crate::linalg::Matrix;

/// Entrywise |D_j| for j = 0..=d.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnsignedIncidence {
    pub matrices: Vec<Matrix<u8>>,
}

pub fn strip_signs(complex: &ChainComplex) -> UnsignedIncidence {
    let matrices = complex
        .boundaries()
        .iter()
        .map(|m| {
            m.map(|x| {
                let a = x.abs();
                if a.is_zero() {
                    0
                } else if a.is_one() {
                    1
                } else {
                    u8::MAX
                }
            })
        })
        .collect();
    UnsignedIncidence { matrices }
}

/// Rebuilds the abstract face lattice whose Hasse diagram is the support of
/// the unsigned matrices, and checks the lattice axioms on it.
pub fn lattice_from_incidence(u: &UnsignedIncidence) -> Result<FaceLattice, LatticeError> {
    let Some(top_index) = u.matrices.len().checked_sub(1) else {
        return Err(LatticeError::Inconsistent("no boundary matrices".into()));
    };
    let mut down: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new()]];
    for (j, m) in u.matrices.iter().enumerate() {
        let expected_rows = if j == 0 { 1 } else { u.matrices[j - 1].cols() };
        if m.rows() != expected_rows {
            return Err(LatticeError::Inconsistent(format!(
                "|D_{j}| has {} rows, expected {expected_rows}",
                m.rows()
            )));
        }
        if let Some(bad) = m.entries().iter().find(|&&x| x > 1) {
            return Err(LatticeError::Inconsistent(format!(
                "|D_{j}| has entry {bad}"
            )));
        }
        down.push(
            (0..m.cols())
                .map(|f| (0..m.rows()).filter(|&e| m[(e, f)] == 1).collect())
                .collect(),
        );
    }
    FaceLattice::from_covers(top_index, down)
}

/// Why two lattices are not isomorphic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NonIsomorphism {
    DimensionMismatch(usize, usize),
    FVectorMismatch(Vec<usize>, Vec<usize>),
    DegreeProfileMismatch { dim: i32 },
    SearchExhausted,
}

fn inner(f: &[usize]) -> String {
    let core = &f[1..f.len() - 1];
    format!(
        "({})",
        core.iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(",")
    )
}

impl fmt::Display for NonIsomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NonIsomorphism::DimensionMismatch(a, b) => write!(f, "dimension mismatch {a} ≠ {b}"),
            NonIsomorphism::FVectorMismatch(a, b) => {
                write!(f, "f-vector mismatch {} ≠ {}", inner(a), inner(b))
            }
            NonIsomorphism::DegreeProfileMismatch { dim } => {
                write!(f, "cover-degree profile mismatch among {dim}-faces")
            }
            NonIsomorphism::SearchExhausted => write!(f, "no cover-preserving bijection exists"),
        }
    }
}

/// A rank-preserving bijection: `map[r][i]` is the image of face `i` of
/// dimension `r − 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bijection {
    pub map: Vec<Vec<usize>>,
}

impl Bijection {
    pub fn image(&self, id: FaceId) -> FaceId {
        FaceId::new(id.dim, self.map[(id.dim + 1) as usize][id.index])
    }

    pub fn is_identity(&self) -> bool {
        self.map
            .iter()
            .all(|r| r.iter().enumerate().all(|(i, &j)| i == j))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LatticeIso {
    Isomorphic(Bijection),
    NotIsomorphic(NonIsomorphism),
}

impl LatticeIso {
    pub fn is_isomorphic(&self) -> bool {
        matches!(self, LatticeIso::Isomorphic(_))
    }
}

fn signature(l: &FaceLattice, id: FaceId) -> (usize, usize) {
    (l.facets_of(id).len(), l.cofacets_of(id).len())
}

fn degree_profile(l: &FaceLattice, dim: i32) -> Vec<(usize, usize)> {
    let mut v: Vec<_> = (0..l.faces(dim).len())
        .map(|i| signature(l, FaceId::new(dim, i)))
        .collect();
    v.sort_unstable();
    v
}

/// Neighbours of a proper face among proper faces (dimensions 0..d−1).
fn neighbours(l: &FaceLattice, id: FaceId) -> Vec<FaceId> {
    let d = l.dim() as i32;
    let mut out = Vec::new();
    if id.dim > 0 {
        out.extend(l.facets_of(id).iter().map(|&i| FaceId::new(id.dim - 1, i)));
    }
    if id.dim + 1 < d {
        out.extend(
            l.cofacets_of(id)
                .iter()
                .map(|&i| FaceId::new(id.dim + 1, i)),
        );
    }
    out
}

fn related(l: &FaceLattice, a: FaceId, b: FaceId) -> bool {
    if b.dim == a.dim - 1 {
        l.facets_of(a).contains(&b.index)
    } else if b.dim == a.dim + 1 {
        l.cofacets_of(a).contains(&b.index)
    } else {
        false
    }
}

struct Search<'a> {
    a: &'a FaceLattice,
    b: &'a FaceLattice,
    order: Vec<FaceId>,
    map: Vec<Vec<Option<usize>>>,
    used: Vec<Vec<bool>>,
}

impl Search<'_> {
    fn fits(&self, x: FaceId, y: FaceId) -> bool {
        let r = (x.dim + 1) as usize;
        if self.used[r][y.index] || signature(self.a, x) != signature(self.b, y) {
            return false;
        }
        neighbours(self.a, x)
            .into_iter()
            .all(|n| match self.map[(n.dim + 1) as usize][n.index] {
                Some(img) => related(self.b, y, FaceId::new(n.dim, img)),
                None => true,
            })
    }

    fn run(&mut self, depth: usize) -> bool {
        let Some(&x) = self.order.get(depth) else {
            return true;
        };
        let r = (x.dim + 1) as usize;
        for cand in 0..self.b.faces(x.dim).len() {
            let y = FaceId::new(x.dim, cand);
            if !self.fits(x, y) {
                continue;
            }
            self.map[r][x.index] = Some(cand);
            self.used[r][cand] = true;
            if self.run(depth + 1) {
                return true;
            }
            self.map[r][x.index] = None;
            self.used[r][cand] = false;
        }
        false
    }
}

/// Backtracking search for a cover-preserving, rank-preserving bijection.
pub fn is_isomorphic(a: &FaceLattice, b: &FaceLattice) -> LatticeIso {
    if a.dim() != b.dim() {
        return LatticeIso::NotIsomorphic(NonIsomorphism::DimensionMismatch(a.dim(), b.dim()));
    }
    if a.f_vector() != b.f_vector() {
        return LatticeIso::NotIsomorphic(NonIsomorphism::FVectorMismatch(
            a.f_vector(),
            b.f_vector(),
        ));
    }
    let d = a.dim() as i32;
    if let Some(dim) = (-1..=d).find(|&j| degree_profile(a, j) != degree_profile(b, j)) {
        return LatticeIso::NotIsomorphic(NonIsomorphism::DegreeProfileMismatch { dim });
    }

    // Visit proper faces breadth-first through the Hasse diagram so each new
    // face is constrained by already-placed neighbours.
    let mut order = Vec::new();
    let mut seen: Vec<Vec<bool>> = a.f_vector().iter().map(|&n| vec![false; n]).collect();
    for start in (0..d).flat_map(|j| (0..a.faces(j).len()).map(move |i| FaceId::new(j, i))) {
        if seen[(start.dim + 1) as usize][start.index] {
            continue;
        }
        seen[(start.dim + 1) as usize][start.index] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            order.push(x);
            for n in neighbours(a, x) {
                let slot = &mut seen[(n.dim + 1) as usize][n.index];
                if !*slot {
                    *slot = true;
                    queue.push_back(n);
                }
            }
        }
    }

    let mut map: Vec<Vec<Option<usize>>> = a.f_vector().iter().map(|&n| vec![None; n]).collect();
    let mut used: Vec<Vec<bool>> = a.f_vector().iter().map(|&n| vec![false; n]).collect();
    for r in [0, (d + 1) as usize] {
        map[r][0] = Some(0);
        used[r][0] = true;
    }
    let mut search = Search {
        a,
        b,
        order,
        map,
        used,
    };
    if !search.run(0) {
        return LatticeIso::NotIsomorphic(NonIsomorphism::SearchExhausted);
    }
    let bijection = Bijection {
        map: search
            .map
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|x| x.expect("every face placed"))
                    .collect()
            })
            .collect(),
    };
    assert!(
        verify_bijection(a, b, &bijection),
        "search produced an invalid bijection"
    );
    LatticeIso::Isomorphic(bijection)
}

/// Checks that `bij` is a rank-preserving bijection mapping covering pairs
/// onto covering pairs in both directions.
pub fn verify_bijection(a: &FaceLattice, b: &FaceLattice, bij: &Bijection) -> bool {
    if a.f_vector() != b.f_vector() || bij.map.len() != a.f_vector().len() {
        return false;
    }
    for (r, images) in bij.map.iter().enumerate() {
        let mut sorted = images.clone();
        sorted.sort_unstable();
        if sorted != (0..a.f_vector()[r]).collect::<Vec<_>>() {
            return false;
        }
    }
    let d = a.dim() as i32;
    for j in 0..=d {
        let pa: Vec<(usize, usize)> = a.covering_pairs(j).expect("in range");
        let pb: Vec<(usize, usize)> = b.covering_pairs(j).expect("in range");
        if pa.len() != pb.len() {
            return false;
        }
        for (e, f) in pa {
            let ie = bij.image(FaceId::new(j - 1, e)).index;
            let iff = bij.image(FaceId::new(j, f)).index;
            if !pb.contains(&(ie, iff)) {
                return false;
            }
        }
    }
    true
}

/// For isomorphic complexes, finds signs s with D'_j(φE, φF) = s_E·s_F·D_j(E, F)
/// when they exist. Returns the signs indexed like the lattice, or the number
/// of entries that cannot be matched.
pub fn orientation_match(
    a: &ChainComplex,
    b: &ChainComplex,
    bij: &Bijection,
) -> Result<Vec<Vec<i8>>, usize> {
    let mut signs: Vec<Vec<i8>> = (-1..=a.dim() as i32)
        .map(|j| vec![0; a.faces(j).len()])
        .collect();
    signs[0][0] = 1;
    let mut mismatches = 0;
    for j in 0..=a.dim() {
        let (da, db) = (a.boundary(j), b.boundary(j));
        let row_map = &bij.map[j];
        let col_map = &bij.map[j + 1];
        for f in 0..da.cols() {
            let mut sf = 0i8;
            for e in 0..da.rows() {
                let x = &da[(e, f)];
                let y = &db[(row_map[e], col_map[f])];
                if x.is_zero() != y.is_zero() {
                    mismatches += 1;
                    continue;
                }
                if x.is_zero() {
                    continue;
                }
                let ratio: i8 = if x == y { 1 } else { -1 };
                let implied = ratio * signs[j][e];
                if sf == 0 {
                    sf = implied;
                } else if sf != implied {
                    mismatches += 1;
                }
            }
            signs[j + 1][f] = if sf == 0 { 1 } else { sf };
        }
    }
    if mismatches == 0 {
        Ok(signs)
    } else {
        Err(mismatches)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cellular::{build_complex, Trivialization};
    use crate::cone::{FaceCones, LiftedCone};
    use crate::families;
    use crate::linalg::int;
    use crate::polytope::Polytope;

    fn complex_of(p: &Polytope) -> (FaceLattice, ChainComplex) {
        let l = p.face_lattice();
        let fc = FaceCones::new(LiftedCone::lift(p), &l).unwrap();
        let t = Trivialization::new(&l, &fc);
        let c = build_complex(&l, &fc, &t).unwrap();
        (l, c)
    }

    fn quad() -> Polytope {
        let v = [[0, 0], [3, 1], [4, 5], [1, 3]];
        Polytope::new(
            2,
            v.iter()
                .map(|r| r.iter().map(|&x| int(x)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn strip_segment() {
        let (_, c) = complex_of(&families::hypercube(1));
        let u = strip_signs(&c);
        assert_eq!(u.matrices[1], Matrix::from_rows(&[vec![1u8], vec![1]]));
        assert_eq!(u.matrices[0], Matrix::from_rows(&[vec![1u8, 1]]));
    }

    #[test]
    fn strip_triangle() {
        let (_, c) = complex_of(&families::simplex(2));
        let u = strip_signs(&c);
        for col in u.matrices[1].columns() {
            assert_eq!(col.iter().filter(|&&x| x == 1).count(), 2);
        }
    }

    #[test]
    fn round_trips() {
        for p in [
            families::point(),
            families::simplex(2),
            families::hypercube(2),
            families::cross_polytope(3),
        ] {
            let (l, c) = complex_of(&p);
            let rebuilt = lattice_from_incidence(&strip_signs(&c)).unwrap();
            assert_eq!(rebuilt.f_vector(), l.f_vector());
            let iso = is_isomorphic(&rebuilt, &l);
            assert!(iso.is_isomorphic(), "{:?}", p.name());
        }
    }

    #[test]
    fn point_is_a_chain() {
        let (_, c) = complex_of(&families::point());
        let l = lattice_from_incidence(&strip_signs(&c)).unwrap();
        assert_eq!(l.f_vector(), vec![1, 1]);
    }

    #[test]
    fn square_vs_quadrilateral() {
        let a = families::hypercube(2).face_lattice();
        let b = quad().face_lattice();
        match is_isomorphic(&a, &b) {
            LatticeIso::Isomorphic(bij) => {
                assert!(verify_bijection(&a, &b, &bij));
                assert_eq!(bij.map.iter().map(Vec::len).sum::<usize>(), 10);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cube_vs_octahedron() {
        let a = families::hypercube(3).face_lattice();
        let b = families::cross_polytope(3).face_lattice();
        let iso = is_isomorphic(&a, &b);
        assert_eq!(
            iso,
            LatticeIso::NotIsomorphic(NonIsomorphism::FVectorMismatch(
                vec![1, 8, 12, 6, 1],
                vec![1, 6, 12, 8, 1]
            ))
        );
        if let LatticeIso::NotIsomorphic(cert) = iso {
            assert_eq!(cert.to_string(), "f-vector mismatch (8,12,6) ≠ (6,12,8)");
        }
    }

    #[test]
    fn self_isomorphism_is_identity() {
        let l = families::hypercube(3).face_lattice();
        match is_isomorphic(&l, &l) {
            LatticeIso::Isomorphic(bij) => assert!(bij.is_identity()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn pyramid_vs_bipyramid() {
        let pyramid = Polytope::new(
            3,
            [[0, 0, 0], [2, 0, 0], [0, 2, 0], [2, 2, 0], [1, 1, 2]]
                .iter()
                .map(|r| r.iter().map(|&x| int(x)).collect())
                .collect(),
        )
        .unwrap();
        let bipyramid = Polytope::new(
            3,
            [[0, 0, 0], [3, 0, 0], [0, 3, 0], [1, 1, 2], [1, 1, -2]]
                .iter()
                .map(|r| r.iter().map(|&x| int(x)).collect())
                .collect(),
        )
        .unwrap();
        let a = pyramid.face_lattice();
        let b = bipyramid.face_lattice();
        assert_eq!(a.f_vector(), vec![1, 5, 8, 5, 1]);
        assert_eq!(b.f_vector(), vec![1, 5, 9, 6, 1]);
        assert!(!is_isomorphic(&a, &b).is_isomorphic());
    }

    #[test]
    fn orientation_match_on_relabeling() {
        let p = families::hypercube(2);
        let q = p.permuted(&[3, 1, 0, 2]);
        let (la, ca) = complex_of(&p);
        let (lb, cb) = complex_of(&q);
        let LatticeIso::Isomorphic(bij) = is_isomorphic(&la, &lb) else {
            panic!("relabeling must be isomorphic");
        };
        assert!(orientation_match(&ca, &cb, &bij).is_ok());
    }
}
