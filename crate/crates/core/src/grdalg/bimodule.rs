use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use super::algebra::{basis_vec, combine, DgAlgebra};
use super::complex::{Complex, GradedBasis};
use super::module::{DgModule, ModuleMap};
use super::morphism::DgaMorphism;
use super::{add_scaled, sign, to_dense, to_sparse, GrdError, Grading, SparseVec};
use crate::exactla::{Field, Matrix, Span, Q};

/// Dg `A`-`B`-bimodule: left action of `left`, right action of `right`.
#[derive(Clone, Debug)]
pub struct DgBimodule<G> {
    left: Arc<DgAlgebra<G>>,
    right: Arc<DgAlgebra<G>>,
    complex: Complex<G>,
    lact: Vec<Vec<SparseVec>>,
    ract: Vec<Vec<SparseVec>>,
}

pub struct BimoduleBuilder<G> {
    left: Arc<DgAlgebra<G>>,
    right: Arc<DgAlgebra<G>>,
    basis: GradedBasis<G>,
    lact: HashMap<(usize, usize), SparseVec>,
    ract: HashMap<(usize, usize), SparseVec>,
    d: HashMap<usize, SparseVec>,
}

fn unit_index<G: Grading>(a: &DgAlgebra<G>) -> Option<usize> {
    let nz: Vec<usize> = (0..a.dim()).filter(|&i| !a.unit_vec()[i].is_zero()).collect();
    (nz.len() == 1 && a.unit_vec()[nz[0]].is_one()).then(|| nz[0])
}

impl<G: Grading> BimoduleBuilder<G> {
    pub fn new(left: Arc<DgAlgebra<G>>, right: Arc<DgAlgebra<G>>) -> Self {
        BimoduleBuilder {
            left,
            right,
            basis: GradedBasis::new(Vec::new()),
            lact: HashMap::new(),
            ract: HashMap::new(),
            d: HashMap::new(),
        }
    }

    pub fn basis(&mut self, label: impl Into<String>, deg: G) -> usize {
        self.basis.push(label.into(), deg)
    }

    /// Sets `a · m`.
    pub fn left_action(&mut self, a: usize, m: usize, value: SparseVec) -> &mut Self {
        self.lact.insert((a, m), value);
        self
    }

    /// Sets `m · b`.
    pub fn right_action(&mut self, m: usize, b: usize, value: SparseVec) -> &mut Self {
        self.ract.insert((m, b), value);
        self
    }

    pub fn differential(&mut self, m: usize, value: SparseVec) -> &mut Self {
        self.d.insert(m, value);
        self
    }

    pub fn build(&self) -> Result<DgBimodule<G>, GrdError> {
        let n = self.basis.dim();
        let (lu, ru) = (unit_index(&self.left), unit_index(&self.right));
        let mut lact = vec![vec![Vec::new(); n]; self.left.dim()];
        for (a, row) in lact.iter_mut().enumerate() {
            for (m, slot) in row.iter_mut().enumerate() {
                if let Some(v) = self.lact.get(&(a, m)) {
                    *slot = to_sparse(&to_dense(v, n));
                } else if Some(a) == lu {
                    *slot = vec![(m, Q::one())];
                }
            }
        }
        let mut ract = vec![vec![Vec::new(); self.right.dim()]; n];
        for (m, row) in ract.iter_mut().enumerate() {
            for (b, slot) in row.iter_mut().enumerate() {
                if let Some(v) = self.ract.get(&(m, b)) {
                    *slot = to_sparse(&to_dense(v, n));
                } else if Some(b) == ru {
                    *slot = vec![(m, Q::one())];
                }
            }
        }
        let mut d = vec![Vec::new(); n];
        for (&m, v) in &self.d {
            d[m] = to_sparse(&to_dense(v, n));
        }
        DgBimodule::from_parts(self.left.clone(), self.right.clone(), self.basis.clone(), lact, ract, d)
    }
}

impl<G: Grading> DgBimodule<G> {
    pub fn from_parts(
        left: Arc<DgAlgebra<G>>,
        right: Arc<DgAlgebra<G>>,
        basis: GradedBasis<G>,
        lact: Vec<Vec<SparseVec>>,
        ract: Vec<Vec<SparseVec>>,
        d: Vec<SparseVec>,
    ) -> Result<Self, GrdError> {
        let window = match (left.window(), right.window()) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let m = DgBimodule { left, right, complex: Complex::new(basis, d, window), lact, ract };
        m.validate()?;
        Ok(m)
    }

    /// `A` as an `A`-`A`-bimodule.
    pub fn regular(a: Arc<DgAlgebra<G>>) -> Self {
        let n = a.dim();
        let lact = (0..n).map(|x| (0..n).map(|m| a.mul_basis(x, m).clone()).collect()).collect();
        let ract = (0..n).map(|m| (0..n).map(|x| a.mul_basis(m, x).clone()).collect()).collect();
        DgBimodule::from_parts(a.clone(), a.clone(), a.basis().clone(), lact, ract, a.complex().d.clone())
            .expect("regular bimodule is valid")
    }

    fn validate(&self) -> Result<(), GrdError> {
        self.as_right_module()?;
        let n = self.dim();
        let l = &self.left;
        let lb = l.basis();
        let b = &self.complex.basis;
        let d = &self.complex.d;
        if self.lact.len() != l.dim() || self.lact.iter().any(|r| r.len() != n) {
            return Err(GrdError::Validation("left action table has wrong shape".into()));
        }
        let l_in = |g: G| l.truncation().is_none_or(|t| g.cohom() <= t);
        for m in 0..n {
            let em = basis_vec(n, m);
            if self.left_act_vec(l.unit_vec(), &em) != em {
                return Err(GrdError::Unit(b.label(m).to_string()));
            }
            for x in 0..l.dim() {
                let g = lb.deg(x).add(b.deg(m));
                if self.lact[x][m].iter().any(|(k, _)| b.deg(*k) != g) {
                    return Err(GrdError::Degree(format!("{}·{} has wrong degree", lb.label(x), b.label(m))));
                }
                for y in 0..l.dim() {
                    if !l_in(lb.deg(x).add(lb.deg(y))) {
                        continue;
                    }
                    let left = combine(l.mul_basis(x, y).iter().map(|(k, c)| (c.clone(), &self.lact[*k][m])));
                    let right = combine(self.lact[y][m].iter().map(|(k, c)| (c.clone(), &self.lact[x][*k])));
                    if left != right {
                        return Err(GrdError::Associativity(lb.label(x).into(), lb.label(y).into(), b.label(m).into()));
                    }
                }
                for z in 0..self.right.dim() {
                    let left = combine(self.lact[x][m].iter().map(|(k, c)| (c.clone(), &self.ract[*k][z])));
                    let right = combine(self.ract[m][z].iter().map(|(k, c)| (c.clone(), &self.lact[x][*k])));
                    if left != right {
                        return Err(GrdError::Validation(format!(
                            "actions do not commute on ({}, {}, {})",
                            lb.label(x),
                            b.label(m),
                            self.right.basis().label(z)
                        )));
                    }
                }
                if !l_in(lb.deg(x).add(G::step())) {
                    continue;
                }
                let s = sign(lb.deg(x).cohom());
                let lhs = combine(self.lact[x][m].iter().map(|(k, c)| (c.clone(), &d[*k])));
                let rhs = combine(
                    l.complex().d[x]
                        .iter()
                        .map(|(k, c)| (c.clone(), &self.lact[*k][m]))
                        .chain(d[m].iter().map(|(k, c)| (&s * c, &self.lact[x][*k]))),
                );
                if lhs != rhs {
                    return Err(GrdError::Leibniz(lb.label(x).into(), b.label(m).into()));
                }
            }
        }
        Ok(())
    }

    pub fn left(&self) -> &Arc<DgAlgebra<G>> {
        &self.left
    }

    pub fn right(&self) -> &Arc<DgAlgebra<G>> {
        &self.right
    }

    pub fn dim(&self) -> usize {
        self.complex.dim()
    }

    pub fn basis(&self) -> &GradedBasis<G> {
        &self.complex.basis
    }

    pub fn complex(&self) -> &Complex<G> {
        &self.complex
    }

    pub fn basis_vec(&self, i: usize) -> Vec<Q> {
        basis_vec(self.dim(), i)
    }

    pub fn left_act_vec(&self, a: &[Q], v: &[Q]) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.dim()];
        for (x, e) in a.iter().enumerate() {
            if e.is_zero() {
                continue;
            }
            for (m, c) in v.iter().enumerate() {
                if !c.is_zero() {
                    add_scaled(&mut out, &(e * c), &self.lact[x][m]);
                }
            }
        }
        out
    }

    pub fn right_act_vec(&self, v: &[Q], b: &[Q]) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.dim()];
        for (m, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (x, e) in b.iter().enumerate() {
                if !e.is_zero() {
                    add_scaled(&mut out, &(c * e), &self.ract[m][x]);
                }
            }
        }
        out
    }

    pub fn d_of(&self, v: &[Q]) -> Vec<Q> {
        self.complex.apply_d(v)
    }

    pub fn as_right_module(&self) -> Result<DgModule<G>, GrdError> {
        DgModule::from_parts(
            self.right.clone(),
            self.basis().clone(),
            self.ract.clone(),
            self.complex.d.clone(),
            self.complex.window,
        )
    }

    /// Restriction of scalars along `phi: A' -> A` on the left and `psi: B' -> B` on the right.
    pub fn restrict(&self, phi: &DgaMorphism<G>, psi: &DgaMorphism<G>) -> Result<Self, GrdError> {
        if *phi.target != *self.left || *psi.target != *self.right {
            return Err(GrdError::OwnerMismatch);
        }
        let n = self.dim();
        let lact = (0..phi.source.dim())
            .map(|x| {
                let a = phi.apply(&phi.source.basis_vec(x));
                (0..n).map(|m| to_sparse(&self.left_act_vec(&a, &self.basis_vec(m)))).collect()
            })
            .collect();
        let ract = (0..n)
            .map(|m| {
                (0..psi.source.dim())
                    .map(|x| to_sparse(&self.right_act_vec(&self.basis_vec(m), &psi.apply(&psi.source.basis_vec(x)))))
                    .collect()
            })
            .collect();
        DgBimodule::from_parts(
            phi.source.clone(),
            psi.source.clone(),
            self.basis().clone(),
            lact,
            ract,
            self.complex.d.clone(),
        )
    }

    /// Sub-bimodule spanned by per-degree subspaces, with its inclusion.
    pub fn sub_bimodule(&self, spaces: &BTreeMap<G, Vec<Vec<Q>>>) -> Result<(Self, ModuleMap<G>), GrdError> {
        let n = self.dim();
        let mut basis = GradedBasis::new(Vec::new());
        let mut vecs = Vec::new();
        let mut spans: BTreeMap<G, (Span<Q>, Vec<usize>)> = BTreeMap::new();
        for (g, vs) in spaces {
            let span = Span::new(n, vs);
            let mut idx = Vec::new();
            for (k, v) in span.basis().iter().enumerate() {
                idx.push(basis.push(format!("m{g}:{k}"), *g));
                vecs.push(v.clone());
            }
            spans.insert(*g, (span, idx));
        }
        let coords = |v: &[Q], what: &str| -> Result<SparseVec, GrdError> {
            if v.iter().all(Q::is_zero) {
                return Ok(Vec::new());
            }
            let g = self
                .basis()
                .homogeneous_degree(v)
                .ok_or_else(|| GrdError::NotClosed(format!("{what} is not homogeneous")))?;
            let (span, idx) = spans.get(&g).ok_or_else(|| GrdError::NotClosed(format!("{what} in degree {g}")))?;
            let c = span.coords(v).ok_or_else(|| GrdError::NotClosed(format!("{what} in degree {g}")))?;
            Ok(c.into_iter().zip(idx).filter(|(c, _)| !c.is_zero()).map(|(c, &i)| (i, c)).collect())
        };
        let lact = (0..self.left.dim())
            .map(|x| {
                let a = self.left.basis_vec(x);
                vecs.iter().map(|v| coords(&self.left_act_vec(&a, v), "left action")).collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let ract = vecs
            .iter()
            .map(|v| {
                (0..self.right.dim())
                    .map(|x| coords(&self.right_act_vec(v, &self.right.basis_vec(x)), "right action"))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let d = vecs.iter().map(|v| coords(&self.d_of(v), "differential")).collect::<Result<Vec<_>, _>>()?;
        let sub = DgBimodule::from_parts(self.left.clone(), self.right.clone(), basis, lact, ract, d)?;
        Ok((sub, ModuleMap { degree: G::zero(), matrix: Matrix::from_columns(n, &vecs) }))
    }
}
