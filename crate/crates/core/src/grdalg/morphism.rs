use std::sync::Arc;

use super::algebra::DgAlgebra;
use super::complex::QisoReport;
use super::{GrdError, Grading};
use crate::exactla::{Field, Matrix, Q};

/// Morphism of dg algebras, stored as a (target dim x source dim) matrix.
#[derive(Clone, Debug)]
pub struct DgaMorphism<G> {
    pub source: Arc<DgAlgebra<G>>,
    pub target: Arc<DgAlgebra<G>>,
    pub matrix: Matrix<Q>,
}

impl<G: Grading> DgaMorphism<G> {
    /// Validates degree preservation, unitality, multiplicativity and
    /// compatibility with `d` on basis elements inside both windows.
    pub fn new(source: Arc<DgAlgebra<G>>, target: Arc<DgAlgebra<G>>, matrix: Matrix<Q>) -> Result<Self, GrdError> {
        let f = DgaMorphism { source, target, matrix };
        f.validate()?;
        Ok(f)
    }

    pub fn identity(a: Arc<DgAlgebra<G>>) -> Self {
        let n = a.dim();
        DgaMorphism { source: a.clone(), target: a, matrix: Matrix::identity(n) }
    }

    fn validate(&self) -> Result<(), GrdError> {
        let (s, t) = (&self.source, &self.target);
        if self.matrix.rows() != t.dim() || self.matrix.cols() != s.dim() {
            return Err(GrdError::Validation("morphism matrix has wrong shape".into()));
        }
        let in_target = |g: G| {
            t.truncation().is_none_or(|d| g.cohom() <= d) && s.truncation().is_none_or(|d| g.cohom() <= d)
        };
        for i in 0..s.dim() {
            let img = self.apply(&s.basis_vec(i));
            if let Some(g) = t.basis().homogeneous_degree(&img) {
                if g != s.basis().deg(i) {
                    return Err(GrdError::Degree(format!("image of {} changes degree", s.basis().label(i))));
                }
            } else if !img.iter().all(Q::is_zero) {
                return Err(GrdError::Degree(format!("image of {} is not homogeneous", s.basis().label(i))));
            }
        }
        if self.apply(s.unit_vec()) != t.unit_vec() {
            return Err(GrdError::Unit("morphism is not unital".into()));
        }
        for i in 0..s.dim() {
            let gi = s.basis().deg(i);
            let ei = s.basis_vec(i);
            if in_target(gi.add(G::step())) && self.apply(&s.d_of(&ei)) != t.d_of(&self.apply(&ei)) {
                return Err(GrdError::Validation(format!(
                    "morphism does not commute with d on {}",
                    s.basis().label(i)
                )));
            }
            for j in 0..s.dim() {
                if !in_target(gi.add(s.basis().deg(j))) {
                    continue;
                }
                let ej = s.basis_vec(j);
                if self.apply(&s.mul(&ei, &ej)) != t.mul(&self.apply(&ei), &self.apply(&ej)) {
                    return Err(GrdError::Validation(format!(
                        "morphism is not multiplicative on ({}, {})",
                        s.basis().label(i),
                        s.basis().label(j)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn apply(&self, v: &[Q]) -> Vec<Q> {
        self.matrix.mul_vec(v)
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &DgaMorphism<G>) -> Result<DgaMorphism<G>, GrdError> {
        let m = other.matrix.mul(&self.matrix).map_err(|e| GrdError::Validation(e.to_string()))?;
        DgaMorphism::new(self.source.clone(), other.target.clone(), m)
    }

    /// Matrix of the degree-`g` component.
    pub fn component(&self, g: G) -> Matrix<Q> {
        self.matrix.submatrix(self.target.basis().indices(g), self.source.basis().indices(g))
    }

    pub fn quasi_iso_report(&self) -> QisoReport<G> {
        let hs = self.source.cohomology();
        let ht = self.target.cohomology();
        hs.map_report(self.source.basis(), &ht, self.target.basis(), &self.matrix, G::zero())
    }

    pub fn is_quasi_iso(&self) -> bool {
        self.quasi_iso_report().is_qiso()
    }
}
