//! Exact face lattices, lifted cones and cellular chain complexes of rational
//! polytopes, with the K-theory bookkeeping for the Wiener–Hopf algebra of the
//! cone over the polytope.
//!
//! The pipeline is
//! [`Polytope`] → [`FaceLattice`] → [`LiftedCone`]/[`FaceCones`] →
//! [`Trivialization`] → [`ChainComplex`] → [`KReport`]; [`Pipeline`] runs it
//! in one call.

pub mod cellular;
pub mod comb_type;
pub mod cone;
pub mod families;
pub mod ktheory;
pub mod lattice;
pub mod linalg;
pub mod polytope;

pub use cellular::{
    build_complex, homology, AbelianGroup, CellularError, ChainComplex, HomologyResult,
    Trivialization,
};
pub use comb_type::{is_isomorphic, lattice_from_incidence, strip_signs, LatticeIso};
pub use cone::{FaceCones, LiftedCone};
pub use ktheory::{e1_page, k_report, KReport};
pub use lattice::{Face, FaceId, FaceLattice};
pub use linalg::Rational;
pub use polytope::{Polytope, PolytopeError};

/// All stages computed for one polytope.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub polytope: Polytope,
    pub lattice: FaceLattice,
    pub cones: FaceCones,
    pub trivialization: Trivialization,
    pub complex: ChainComplex,
}

impl Pipeline {
    pub fn run(polytope: Polytope) -> Result<Self, CellularError> {
        let lattice = polytope.face_lattice();
        let cones = FaceCones::new(LiftedCone::lift(&polytope), &lattice)?;
        let trivialization = Trivialization::new(&lattice, &cones);
        let complex = build_complex(&lattice, &cones, &trivialization)?;
        Ok(Pipeline {
            polytope,
            lattice,
            cones,
            trivialization,
            complex,
        })
    }

    pub fn report(&self) -> KReport {
        k_report(
            self.polytope.name().unwrap_or("unnamed"),
            &self.lattice,
            &self.complex,
        )
    }
}
