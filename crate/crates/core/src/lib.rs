//! Exact integer computation with finitely generated abelian groups.
//!
//! Everything here runs on arbitrary-precision integers; there is no floating
//! point anywhere in the crate. The kernel (matrices, normal forms, lattices)
//! is generic over [`scalar::ExactInt`]; the domain layer works with the
//! concrete aliases below.

pub mod error;
pub mod matrix;
pub mod normal;
pub mod scalar;

pub mod complex;
pub mod cpxfilt;
pub mod filtration;
pub mod group;
pub mod hill;
pub mod homotopy;
pub mod lattice;
pub mod relength;

pub use complex::{
    boundaries, cone, cycles, generator_disks, homology, is_acyclic, ChainComplex, ChainMap,
    ShortExactSequence,
};
pub use cpxfilt::{cpx_filtration, tilde_filtration, ComplexFiltration};
pub use error::{Error, Result};
pub use filtration::{coproduct_filtration, FactorList, Filtration, ValidationReport};
pub use group::{
    quotient_type, AmbientObject, Homomorphism, InvariantFactors, Subobject,
    SubquotientPresentation,
};
pub use hill::{
    intersection_filtration, CheckResult, HillContext, HillReport, IndexSet,
    InducedFiltration, IntersectionFiltration, KaplanskyWitness, SummandFiltration,
};
pub use homotopy::{ext1_cs, is_cs_split, is_split_as_complexes, null_homotopy, Homotopy};
pub use relength::{levels, rebound, LevelAssignment, RelengthCertificate};

/// The production scalar. All domain types are concrete over this.
pub type Int = num_bigint::BigInt;
pub type IntMatrix = matrix::Matrix<Int>;
pub type IntLattice = lattice::Lattice<Int>;
