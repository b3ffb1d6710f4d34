//! Graded and dg algebras, dg modules and bimodules, Hom and End complexes,
//! cohomology and quasi-isomorphism reports, extension of scalars.

mod algebra;
mod bimodule;
mod complex;
mod grading;
mod hom;
mod module;
mod morphism;
mod tensor;

pub use algebra::{AlgebraBuilder, DgAlgebra, Idempotent};
pub use bimodule::{BimoduleBuilder, DgBimodule};
pub use complex::{Cohomology, Complex, DegreeCohomology, GradedBasis, QisoReport, QisoRow};
pub use grading::{Bideg, Grading};
pub use hom::{end_dg_algebra, hom_complex, HomComplex};
pub use module::{DgModule, ModuleBuilder, ModuleMap};
pub use morphism::DgaMorphism;
pub use tensor::{bimodule_tensor_equivalence_witness, extend_scalars, BimoduleSetup, BimoduleWitness};

use crate::exactla::{Field, Q};

/// Sparse coordinate vector: `(basis index, coefficient)` pairs, no zero coefficients.
pub type SparseVec = Vec<(usize, Q)>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GrdError {
    #[error("{0}")]
    Validation(String),
    #[error("associativity fails on basis triple ({0}, {1}, {2})")]
    Associativity(String, String, String),
    #[error("Leibniz rule fails on basis pair ({0}, {1})")]
    Leibniz(String, String),
    #[error("d^2 != 0 on basis element {0}")]
    DSquared(String),
    #[error("degree violation: {0}")]
    Degree(String),
    #[error("unit axiom fails on {0}")]
    Unit(String),
    #[error("idempotent condition fails: {0}")]
    Idempotent(String),
    #[error("owner mismatch")]
    OwnerMismatch,
    #[error("not closed: {0}")]
    NotClosed(String),
    #[error("{0} is not a degree-0 cocycle")]
    NotCocycle(String),
}

pub(crate) fn to_dense(v: &SparseVec, dim: usize) -> Vec<Q> {
    let mut out = vec![Q::zero(); dim];
    for (i, c) in v {
        out[*i] = &out[*i] + c;
    }
    out
}

pub(crate) fn to_sparse(v: &[Q]) -> SparseVec {
    v.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i, c.clone())).collect()
}

pub(crate) fn add_scaled(acc: &mut [Q], s: &Q, v: &SparseVec) {
    if s.is_zero() {
        return;
    }
    for (i, c) in v {
        acc[*i] = &acc[*i] + &(s * c);
    }
}

pub(crate) fn is_zero_vec(v: &[Q]) -> bool {
    v.iter().all(Q::is_zero)
}

pub(crate) fn sign(exp: i32) -> Q {
    if exp.rem_euclid(2) == 0 {
        Q::one()
    } else {
        -Q::one()
    }
}
