//! Perfect derived categories of positively graded algebras with zero
//! differential, through matrix-encoded filtered dg modules.
//!
//! A module is `⊕ {l_i} e_{v_i} A` with generators `g_i` in degree `-l_i`
//! and differential `d(g_j) = Σ_i g_i x_ij`, so `{l} L̂_x` sits at
//! t-position `[-l, -l]`.

mod filt;
mod hom;
mod tstructure;

use std::collections::BTreeMap;
use std::sync::Arc;

pub use filt::{DgFiltModule, Summand};
pub use hom::{cone, filt_hom_complex, EntryMatrix, FiltHomComplex, FiltMorphism, HomCell};
pub use tstructure::{flag_analysis, minimal_model, t_structure_position, TStructurePosition};

use crate::exactla::{Field, Span, Q};
use crate::grdalg::{DgAlgebra, GrdError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PerfError {
    #[error("owner does not qualify: {0}")]
    Owner(String),
    #[error("unknown label {0}")]
    UnknownLabel(String),
    #[error("shifts are not non-increasing at summand {0}")]
    Unsorted(usize),
    #[error("entry ({i},{j}) is not in e_{left} A^{degree} e_{right}")]
    EntryDegree { i: usize, j: usize, degree: i32, left: String, right: String },
    #[error("x^2 != 0 at entry ({0},{1})")]
    NotSquareZero(usize, usize),
    #[error("not a chain map at entry ({0},{1})")]
    NotChainMap(usize, usize),
    #[error("homotopy identity fails at entry ({0},{1})")]
    NotHomotopy(usize, usize),
    #[error("matrix has wrong shape")]
    Shape,
    #[error("owner mismatch")]
    OwnerMismatch,
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error(transparent)]
    Grd(#[from] GrdError),
}

/// A slice `e_v A^k e_w` with a basis and coordinate extraction.
#[derive(Clone, Debug)]
pub struct Slice {
    pub basis: Vec<Vec<Q>>,
    span: Span<Q>,
}

impl Slice {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn coords(&self, v: &[Q]) -> Option<Vec<Q>> {
        self.span.coords(v)
    }
}

/// Owner of dgFilt modules: zero differential, positively graded, degree 0
/// spanned by the idempotents. Labels are the idempotents in order.
#[derive(Clone, Debug)]
pub struct PerfAlgebra {
    alg: Arc<DgAlgebra<i32>>,
    slices: BTreeMap<(usize, i32, usize), Slice>,
    empty: Slice,
}

impl PartialEq for PerfAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.alg == other.alg
    }
}

impl PerfAlgebra {
    pub fn new(alg: Arc<DgAlgebra<i32>>) -> Result<Self, PerfError> {
        alg.check_positive().map_err(|e| PerfError::Owner(e.to_string()))?;
        if !alg.d_is_zero() {
            return Err(PerfError::Owner("differential must vanish".into()));
        }
        let mut slices = BTreeMap::new();
        let idem = alg.idempotents();
        for (v, ev) in idem.iter().enumerate() {
            for g in alg.basis().degrees() {
                for (w, ew) in idem.iter().enumerate() {
                    let basis = alg.slice_basis(&ev.coords, g, &ew.coords);
                    if basis.is_empty() {
                        continue;
                    }
                    let span = Span::new(alg.dim(), &basis);
                    slices.insert((v, g, w), Slice { basis, span });
                }
            }
        }
        let empty = Slice { basis: Vec::new(), span: Span::empty(alg.dim()) };
        Ok(PerfAlgebra { alg, slices, empty })
    }

    pub fn algebra(&self) -> &Arc<DgAlgebra<i32>> {
        &self.alg
    }

    pub fn labels(&self) -> Vec<String> {
        self.alg.idempotents().iter().map(|e| e.label.clone()).collect()
    }

    pub fn label_count(&self) -> usize {
        self.alg.idempotents().len()
    }

    pub fn label_index(&self, label: &str) -> Result<usize, PerfError> {
        self.alg
            .idempotents()
            .iter()
            .position(|e| e.label == label)
            .ok_or_else(|| PerfError::UnknownLabel(label.into()))
    }

    pub fn label(&self, v: usize) -> &str {
        &self.alg.idempotents()[v].label
    }

    pub fn idempotent(&self, v: usize) -> &[Q] {
        &self.alg.idempotents()[v].coords
    }

    pub fn dim(&self) -> usize {
        self.alg.dim()
    }

    /// `e_v A^k e_w`.
    pub fn slice(&self, v: usize, k: i32, w: usize) -> &Slice {
        self.slices.get(&(v, k, w)).unwrap_or(&self.empty)
    }

    /// Highest degree of a basis element.
    pub fn top_degree(&self) -> i32 {
        self.alg.basis().degrees().max().unwrap_or(0)
    }

    /// Degrees above this bound are unknown (truncated owner).
    pub fn truncation(&self) -> Option<i32> {
        self.alg.truncation()
    }

    pub fn zero(&self) -> Vec<Q> {
        vec![Q::zero(); self.dim()]
    }

    pub fn mul(&self, x: &[Q], y: &[Q]) -> Vec<Q> {
        self.alg.mul(x, y)
    }

    /// Scalar `λ` with `x = λ e_v`, for `x ∈ e_v A^0 e_v`.
    pub fn scalar_of(&self, x: &[Q], v: usize) -> Q {
        let e = self.idempotent(v);
        match e.iter().position(|c| !c.is_zero()) {
            Some(k) => x[k].div(&e[k]).expect("nonzero"),
            None => Q::zero(),
        }
    }
}

pub(crate) fn is_zero(v: &[Q]) -> bool {
    v.iter().all(Q::is_zero)
}
