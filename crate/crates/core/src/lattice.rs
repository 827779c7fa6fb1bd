//! Face lattices, with the empty face materialized at dimension −1.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::polytope::Polytope;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("dimension {j} out of range 0..={d}")]
    DimensionOutOfRange { j: i32, d: usize },
    #[error("expected exactly one face of dimension {dim}, found {count}")]
    NotBounded { dim: i32, count: usize },
    #[error("face {index} of dimension {dim} is not on a maximal chain")]
    NotGraded { dim: i32, index: usize },
    #[error("interval [{lower_dim}:{lower}, {upper_dim}:{upper}] has {count} intermediate faces, expected 2")]
    Diamond {
        lower_dim: i32,
        lower: usize,
        upper_dim: i32,
        upper: usize,
        count: usize,
    },
    #[error("cover data is inconsistent: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Face {
    /// Sorted vertex indices lying on the face.
    pub vertices: Vec<usize>,
    pub dim: i32,
}

#[derive(Debug, Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FaceId {
    pub dim: i32,
    pub index: usize,
}

impl FaceId {
    pub fn new(dim: i32, index: usize) -> Self {
        FaceId { dim, index }
    }

    fn rank(self) -> usize {
        (self.dim + 1) as usize
    }
}

/// Graded lattice of faces. Faces of each dimension are stored in a fixed
/// order; for lattices built from a polytope that order is lexicographic by
/// vertex set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceLattice {
    dim: usize,
    // ranks[r] holds the faces of dimension r - 1
    ranks: Vec<Vec<Face>>,
    down: Vec<Vec<Vec<usize>>>,
    up: Vec<Vec<Vec<usize>>>,
}

impl FaceLattice {
    pub fn of_polytope(p: &Polytope) -> Self {
        let n = p.vertices().len();
        let mut sets: BTreeSet<Vec<usize>> = p.facets().into_iter().map(|f| f.vertices).collect();
        loop {
            let current: Vec<Vec<usize>> = sets.iter().cloned().collect();
            let mut grew = false;
            for (i, a) in current.iter().enumerate() {
                for b in &current[i + 1..] {
                    let meet: Vec<usize> = a
                        .iter()
                        .filter(|x| b.binary_search(x).is_ok())
                        .copied()
                        .collect();
                    grew |= sets.insert(meet);
                }
            }
            if !grew {
                break;
            }
        }
        sets.insert(Vec::new());
        sets.insert((0..n).collect());

        let mut ranks = vec![Vec::new(); p.dim() + 2];
        for vertices in sets {
            let dim = p.affine_dim(&vertices);
            ranks[(dim + 1) as usize].push(Face { vertices, dim });
        }
        for rank in &mut ranks {
            rank.sort();
        }
        let down = (0..ranks.len())
            .map(|r| {
                ranks[r]
                    .iter()
                    .map(|f| {
                        if r == 0 {
                            return Vec::new();
                        }
                        ranks[r - 1]
                            .iter()
                            .enumerate()
                            .filter(|(_, e)| is_subset(&e.vertices, &f.vertices))
                            .map(|(i, _)| i)
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Self::assemble(p.dim(), ranks, down)
    }

    /// Builds an abstract lattice from cover lists: `down[r][i]` lists the
    /// indices at rank `r - 1` covered by element `i` of rank `r` (rank = dim + 1).
    /// Rank 1 elements are the vertices; each face's vertex set is the set of
    /// rank 1 elements below it.
    pub fn from_covers(dim: usize, down: Vec<Vec<Vec<usize>>>) -> Result<Self, LatticeError> {
        if down.len() != dim + 2 {
            return Err(LatticeError::Inconsistent(format!(
                "expected {} ranks, got {}",
                dim + 2,
                down.len()
            )));
        }
        let mut ranks: Vec<Vec<Face>> = Vec::with_capacity(dim + 2);
        for (r, row) in down.iter().enumerate() {
            let mut faces = Vec::with_capacity(row.len());
            for (i, children) in row.iter().enumerate() {
                if r == 0 && !children.is_empty() {
                    return Err(LatticeError::Inconsistent(
                        "bottom element has covers".into(),
                    ));
                }
                let vertices: Vec<usize> = match r {
                    0 => Vec::new(),
                    1 => vec![i],
                    _ => {
                        let mut acc = BTreeSet::new();
                        for &c in children {
                            let child = ranks[r - 1].get(c).ok_or_else(|| {
                                LatticeError::Inconsistent(format!(
                                    "rank {r} element {i} covers missing {c}"
                                ))
                            })?;
                            acc.extend(child.vertices.iter().copied());
                        }
                        acc.into_iter().collect()
                    }
                };
                faces.push(Face {
                    vertices,
                    dim: r as i32 - 1,
                });
            }
            ranks.push(faces);
        }
        for (r, row) in down.iter().enumerate().skip(1) {
            if row.iter().flatten().any(|&c| c >= ranks[r - 1].len()) {
                return Err(LatticeError::Inconsistent(format!(
                    "rank {r} covers a missing element"
                )));
            }
        }
        let lattice = Self::assemble(dim, ranks, down);
        lattice.check_axioms()?;
        Ok(lattice)
    }

    fn assemble(dim: usize, ranks: Vec<Vec<Face>>, mut down: Vec<Vec<Vec<usize>>>) -> Self {
        let mut up: Vec<Vec<Vec<usize>>> =
            ranks.iter().map(|r| vec![Vec::new(); r.len()]).collect();
        for (r, row) in down.iter_mut().enumerate() {
            for (i, children) in row.iter_mut().enumerate() {
                children.sort_unstable();
                children.dedup();
                for &c in children.iter() {
                    up[r - 1][c].push(i);
                }
            }
        }
        FaceLattice {
            dim,
            ranks,
            down,
            up,
        }
    }

    /// Dimension of the top face.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn faces(&self, dim: i32) -> &[Face] {
        &self.ranks[(dim + 1) as usize]
    }

    pub fn face(&self, id: FaceId) -> &Face {
        &self.ranks[id.rank()][id.index]
    }

    pub fn ids(&self) -> impl Iterator<Item = FaceId> + '_ {
        self.ranks
            .iter()
            .enumerate()
            .flat_map(|(r, faces)| (0..faces.len()).map(move |i| FaceId::new(r as i32 - 1, i)))
    }

    pub fn len(&self) -> usize {
        self.ranks.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn empty_face(&self) -> FaceId {
        FaceId::new(-1, 0)
    }

    pub fn top(&self) -> FaceId {
        FaceId::new(self.dim as i32, 0)
    }

    pub fn index_of(&self, vertices: &[usize]) -> Option<FaceId> {
        self.ranks.iter().enumerate().find_map(|(r, faces)| {
            faces
                .iter()
                .position(|f| f.vertices == vertices)
                .map(|i| FaceId::new(r as i32 - 1, i))
        })
    }

    /// Faces of dimension `dim - 1` covered by `id`.
    pub fn facets_of(&self, id: FaceId) -> &[usize] {
        &self.down[id.rank()][id.index]
    }

    /// Faces of dimension `dim + 1` covering `id`.
    pub fn cofacets_of(&self, id: FaceId) -> &[usize] {
        &self.up[id.rank()][id.index]
    }

    /// (f_{−1}, f_0, …, f_d).
    pub fn f_vector(&self) -> Vec<usize> {
        self.ranks.iter().map(Vec::len).collect()
    }

    /// Σ_{j=−1}^{d} (−1)^j f_j; zero for every polytope.
    pub fn euler_sum(&self) -> i64 {
        self.f_vector()
            .iter()
            .enumerate()
            .map(|(r, &f)| if r % 2 == 0 { -(f as i64) } else { f as i64 })
            .sum()
    }

    /// Covering pairs (E, F) with dim F = j, as (index in F_{j−1}, index in F_j).
    pub fn covering_pairs(&self, j: i32) -> Result<Vec<(usize, usize)>, LatticeError> {
        if j < 0 || j > self.dim as i32 {
            return Err(LatticeError::DimensionOutOfRange { j, d: self.dim });
        }
        let r = (j + 1) as usize;
        Ok(self.down[r]
            .iter()
            .enumerate()
            .flat_map(|(f, children)| children.iter().map(move |&e| (e, f)))
            .collect())
    }

    /// Boundedness, gradedness and the diamond property.
    pub fn check_axioms(&self) -> Result<(), LatticeError> {
        let last = self.ranks.len() - 1;
        for (r, dim) in [(0, -1), (last, self.dim as i32)] {
            if self.ranks[r].len() != 1 {
                return Err(LatticeError::NotBounded {
                    dim,
                    count: self.ranks[r].len(),
                });
            }
        }
        for id in self.ids() {
            let r = id.rank();
            if (r > 0 && self.facets_of(id).is_empty())
                || (r < last && self.cofacets_of(id).is_empty())
            {
                return Err(LatticeError::NotGraded {
                    dim: id.dim,
                    index: id.index,
                });
            }
        }
        for r in 2..=last {
            for (upper, children) in self.down[r].iter().enumerate() {
                let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
                for &c in children {
                    for &g in &self.down[r - 1][c] {
                        *counts.entry(g).or_default() += 1;
                    }
                }
                if let Some((&lower, &count)) = counts.iter().find(|(_, &n)| n != 2) {
                    return Err(LatticeError::Diamond {
                        lower_dim: r as i32 - 3,
                        lower,
                        upper_dim: r as i32 - 1,
                        upper,
                        count,
                    });
                }
            }
        }
        Ok(())
    }
}

fn is_subset(small: &[usize], big: &[usize]) -> bool {
    small.iter().all(|x| big.binary_search(x).is_ok())
}
