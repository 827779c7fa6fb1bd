//! K-theory bookkeeping for the Wiener–Hopf algebra A_Ω of the lifted cone.
//!
//! The ideal filtration of A_Ω gives a spectral sequence whose E¹ page has
//! E¹_{p,q} = ℤ^{f_{p−2}} for odd q and 0 for even q (p = 1, …, d + 2), with
//! d¹ equal to the augmented cellular differential shifted by two. Even rows
//! vanish, so the sequence collapses at E², which is the homology of the
//! augmented complex. An E² entry at (p, q) with q odd contributes to
//! K_{(p+q) mod 2} = K_{(p+1) mod 2}.
//!
//! The quotient A_Ω/𝒦 drops the bottom ideal 𝒦 = I_1, i.e. the column p = 1,
//! which removes the augmentation. Its E² page is the homology of the plain
//! complex; H_0 sits at p = 2 and therefore lands in K_1.

use serde::{Deserialize, Serialize};

use crate::cellular::{homology, AbelianGroup, ChainComplex, HomologyResult};
use crate::lattice::FaceLattice;
use crate::linalg::ZMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct E1Column {
    pub p: usize,
    /// E¹_{p,q} for q odd.
    pub odd: AbelianGroup,
    /// E¹_{p,q} for q even; always zero.
    pub even: AbelianGroup,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct E1Page {
    pub columns: Vec<E1Column>,
    // differentials[p - 1] is d¹ : E¹_{p,1} → E¹_{p−1,1}
    differentials: Vec<ZMatrix>,
}

impl E1Page {
    pub fn column(&self, p: usize) -> Option<&E1Column> {
        self.columns.iter().find(|c| c.p == p)
    }

    /// d¹ out of column p. For p = 1 this is the zero map to nothing.
    pub fn differential(&self, p: usize) -> Option<&ZMatrix> {
        p.checked_sub(1).and_then(|i| self.differentials.get(i))
    }
}

pub fn e1_page(lattice: &FaceLattice, complex: &ChainComplex) -> E1Page {
    let f = lattice.f_vector();
    let d = lattice.dim();
    let columns = (1..=d + 2)
        .map(|p| E1Column {
            p,
            odd: AbelianGroup::free(f[p - 1]),
            even: AbelianGroup::zero(),
        })
        .collect();
    let mut differentials = vec![ZMatrix::zeros(0, f[0])];
    differentials.extend(complex.boundaries().iter().cloned());
    E1Page {
        columns,
        differentials,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct E2Entry {
    pub p: usize,
    /// Representative odd row; the page is 2-periodic in q.
    pub q: i32,
    pub group: AbelianGroup,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct KGroups {
    pub k0: AbelianGroup,
    pub k1: AbelianGroup,
}

impl KGroups {
    pub fn vanish(&self) -> bool {
        self.k0.is_zero() && self.k1.is_zero()
    }

    fn from_page(entries: &[E2Entry]) -> Self {
        let mut k = KGroups::default();
        for e in entries {
            let slot = if (e.p as i32 + e.q).rem_euclid(2) == 0 {
                &mut k.k0
            } else {
                &mut k.k1
            };
            *slot = slot.sum(&e.group);
        }
        k
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KReport {
    pub name: String,
    pub f_vector: Vec<usize>,
    pub augmented_homology: HomologyResult,
    pub reduced_homology: HomologyResult,
    /// Nonzero E² entries of the page for A_Ω.
    pub e2_algebra: Vec<E2Entry>,
    /// Nonzero E² entries of the page for A_Ω/𝒦.
    pub e2_quotient: Vec<E2Entry>,
    pub k_algebra: KGroups,
    pub k_quotient: KGroups,
    pub conclusions: Vec<String>,
    /// Findings that contradict the expected vanishing; empty for valid complexes.
    pub falsifications: Vec<String>,
}

impl KReport {
    pub fn is_consistent(&self) -> bool {
        self.falsifications.is_empty()
    }
}

fn page_from(h: &HomologyResult) -> Vec<E2Entry> {
    h.nonzero()
        .map(|g| E2Entry {
            p: (g.degree + 2) as usize,
            q: 1,
            group: g.group.clone(),
        })
        .collect()
}

pub fn k_report(name: &str, lattice: &FaceLattice, complex: &ChainComplex) -> KReport {
    let augmented = homology(complex, true);
    let reduced = homology(complex, false);
    let e2_algebra = page_from(&augmented);
    let e2_quotient = page_from(&reduced);
    let k_algebra = KGroups::from_page(&e2_algebra);
    let k_quotient = KGroups::from_page(&e2_quotient);

    let mut conclusions = Vec::new();
    let mut falsifications = Vec::new();
    if e2_algebra.is_empty() {
        conclusions.push("E2 page of A_Omega vanishes: K_0(A_Omega) = K_1(A_Omega) = 0, the K-theoretic shadow of KK-contractibility".into());
    } else {
        for e in &e2_algebra {
            falsifications.push(format!(
                "E2_{{{},odd}} = {} (augmented homology in degree {}) is nonzero",
                e.p,
                e.group,
                e.p as i32 - 2
            ));
        }
    }
    match reduced.concentrated_integers() {
        Some(0) => {
            conclusions.push("E2 page of A_Omega/K is Z at (p, q) = (2, odd): K_1(A_Omega/K) = Z, K_0(A_Omega/K) = 0; the generator is detected by the Fredholm index of Wiener-Hopf operators".into());
            conclusions.push("degree placement: total degree p + q = 3 is odd, so the Z sits in K_1; a reading as K_*(C) would put it in K_0".into());
        }
        _ => {
            for e in &e2_quotient {
                if !(e.p == 2 && e.group.is_integers()) {
                    falsifications.push(format!(
                        "E2_{{{},odd}} of the quotient = {} (homology in degree {}) is unexpected",
                        e.p,
                        e.group,
                        e.p as i32 - 2
                    ));
                }
            }
            if e2_quotient.is_empty() {
                falsifications
                    .push("E2 page of the quotient vanishes, expected Z in degree 0".into());
            }
        }
    }
    if let Err(e) = complex.verify() {
        falsifications.push(format!("complex is not a chain complex: {e}"));
    }
    if lattice.euler_sum() != 0 {
        falsifications.push(format!("Euler sum of f-vector is {}", lattice.euler_sum()));
    }

    KReport {
        name: name.to_string(),
        f_vector: lattice.f_vector(),
        augmented_homology: augmented,
        reduced_homology: reduced,
        e2_algebra,
        e2_quotient,
        k_algebra,
        k_quotient,
        conclusions,
        falsifications,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cellular::{build_complex, Trivialization};
    use crate::cone::{FaceCones, LiftedCone};
    use crate::families;
    use crate::polytope::Polytope;
    use num_bigint::BigInt;

    fn complex_of(p: &Polytope) -> (FaceLattice, ChainComplex) {
        let l = p.face_lattice();
        let fc = FaceCones::new(LiftedCone::lift(p), &l).unwrap();
        let t = Trivialization::new(&l, &fc);
        let c = build_complex(&l, &fc, &t).unwrap();
        (l, c)
    }

    #[test]
    fn segment_e1_page() {
        let (l, c) = complex_of(&families::hypercube(1));
        let page = e1_page(&l, &c);
        let ranks: Vec<usize> = page.columns.iter().map(|c| c.odd.rank).collect();
        assert_eq!(ranks, vec![1, 2, 1]);
        assert!(page.columns.iter().all(|c| c.even.is_zero()));
        assert_eq!(page.differential(2), Some(c.boundary(0)));
        assert_eq!(page.differential(3), Some(c.boundary(1)));
        assert_eq!(page.differential(1).unwrap().shape(), (0, 1));
    }

    #[test]
    fn point_e1_page() {
        let (l, c) = complex_of(&families::point());
        let page = e1_page(&l, &c);
        assert_eq!(page.columns.len(), 2);
        assert!(page.columns.iter().all(|c| c.odd.is_integers()));
    }

    #[test]
    fn cube_report() {
        let (l, c) = complex_of(&families::hypercube(3));
        let r = k_report("cube", &l, &c);
        assert!(r.k_algebra.vanish());
        assert!(r.k_quotient.k1.is_integers());
        assert!(r.k_quotient.k0.is_zero());
        assert!(r.is_consistent());
        assert_eq!(r.e2_quotient.len(), 1);
    }

    #[test]
    fn point_report() {
        let (l, c) = complex_of(&families::point());
        let r = k_report("point", &l, &c);
        assert!(r.k_algebra.vanish());
        assert!(r.k_quotient.k1.is_integers());
    }

    #[test]
    fn corrupted_segment_reports_nonzero_e2() {
        // D_1 = (−1, 1)ᵀ with its first sign flipped becomes (1, 1)ᵀ. Then
        // ker D_0 = ⟨(1, −1)⟩ meets im D_1 = ⟨(1, 1)⟩ trivially, so degree 0
        // (p = 2) carries Z.
        let (l, c) = complex_of(&families::hypercube(1));
        let mut d1 = c.boundary(1).clone();
        d1[(0, 0)] = -d1[(0, 0)].clone();
        let broken = c.with_boundary_unchecked(1, d1);
        let r = k_report("broken", &l, &broken);
        assert!(!r.is_consistent());
        assert_eq!(
            r.e2_algebra,
            vec![E2Entry {
                p: 2,
                q: 1,
                group: AbelianGroup::free(1)
            }]
        );
        assert!(r.k_algebra.k1.is_integers());
        assert!(r.falsifications.iter().any(|f| f.contains("boundary")));
    }

    #[test]
    fn corrupted_triangle_is_flagged() {
        // flipping one sign keeps E2 = 0 here (the image of D_1 contains
        // ker D_0), but the report still flags the broken complex
        let (l, c) = complex_of(&families::simplex(2));
        let mut d1 = c.boundary(1).clone();
        d1[(0, 0)] = -d1[(0, 0)].clone();
        let r = k_report("broken", &l, &c.with_boundary_unchecked(1, d1));
        assert!(r.e2_algebra.is_empty());
        assert!(!r.is_consistent());
        let plain = &r.reduced_homology;
        // plain H_0 = Z³ / im D_1 with |det D_1| = 2
        assert_eq!(plain.group(0).unwrap().torsion, vec![BigInt::from(2)]);
    }
}
