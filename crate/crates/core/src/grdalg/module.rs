use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use super::algebra::{basis_vec, combine, DgAlgebra};
use super::complex::{Cohomology, Complex, GradedBasis, QisoReport};
use super::morphism::DgaMorphism;
use super::{add_scaled, sign, to_dense, to_sparse, GrdError, Grading, SparseVec};
use crate::exactla::{Field, Matrix, Span, Q};

/// Right dg module over a dg algebra, finite-dimensional.
#[derive(Clone, Debug)]
pub struct DgModule<G> {
    owner: Arc<DgAlgebra<G>>,
    complex: Complex<G>,
    act: Vec<Vec<SparseVec>>,
}

pub struct ModuleBuilder<G> {
    owner: Arc<DgAlgebra<G>>,
    basis: GradedBasis<G>,
    act: HashMap<(usize, usize), SparseVec>,
    d: HashMap<usize, SparseVec>,
}

impl<G: Grading> ModuleBuilder<G> {
    /// Starts a module; the unit of the owner acts as the identity automatically.
    pub fn new(owner: Arc<DgAlgebra<G>>) -> Self {
        ModuleBuilder { owner, basis: GradedBasis::new(Vec::new()), act: HashMap::new(), d: HashMap::new() }
    }

    pub fn basis(&mut self, label: impl Into<String>, deg: G) -> usize {
        self.basis.push(label.into(), deg)
    }

    /// Sets `m · a` for basis elements `m` of the module and `a` of the owner.
    pub fn action(&mut self, m: usize, a: usize, value: SparseVec) -> &mut Self {
        self.act.insert((m, a), value);
        self
    }

    pub fn differential(&mut self, m: usize, value: SparseVec) -> &mut Self {
        self.d.insert(m, value);
        self
    }

    pub fn build(&self) -> Result<DgModule<G>, GrdError> {
        let n = self.basis.dim();
        let na = self.owner.dim();
        let mut act = vec![vec![Vec::new(); na]; n];
        let unit = self.owner.unit_vec();
        for (m, row) in act.iter_mut().enumerate() {
            for (a, slot) in row.iter_mut().enumerate() {
                if let Some(v) = self.act.get(&(m, a)) {
                    *slot = to_sparse(&to_dense(v, n));
                } else if unit[a].is_one() && unit.iter().filter(|c| !c.is_zero()).count() == 1 {
                    *slot = vec![(m, Q::one())];
                }
            }
        }
        let mut d = vec![Vec::new(); n];
        for (&m, v) in &self.d {
            d[m] = to_sparse(&to_dense(v, n));
        }
        DgModule::from_parts(self.owner.clone(), self.basis.clone(), act, d, None)
    }
}

impl<G: Grading> DgModule<G> {
    pub fn from_parts(
        owner: Arc<DgAlgebra<G>>,
        basis: GradedBasis<G>,
        act: Vec<Vec<SparseVec>>,
        d: Vec<SparseVec>,
        window: Option<i32>,
    ) -> Result<Self, GrdError> {
        let window = window.or(owner.window());
        let m = DgModule { owner, complex: Complex::new(basis, d, window), act };
        m.validate()?;
        Ok(m)
    }

    fn owner_in_range(&self, g: G) -> bool {
        self.owner.truncation().is_none_or(|t| g.cohom() <= t)
    }

    fn validate(&self) -> Result<(), GrdError> {
        let n = self.dim();
        let a = &self.owner;
        let b = &self.complex.basis;
        let ab = a.basis();
        let d = &self.complex.d;
        if self.act.len() != n || self.act.iter().any(|r| r.len() != a.dim()) {
            return Err(GrdError::Validation("action table has wrong shape".into()));
        }
        for m in 0..n {
            for x in 0..a.dim() {
                let g = b.deg(m).add(ab.deg(x));
                if self.act[m][x].iter().any(|(k, _)| b.deg(*k) != g) {
                    return Err(GrdError::Degree(format!("{}·{} has wrong degree", b.label(m), ab.label(x))));
                }
            }
            if d[m].iter().any(|(k, _)| b.deg(*k) != b.deg(m).add(G::step())) {
                return Err(GrdError::Degree(format!("d({}) has wrong degree", b.label(m))));
            }
        }
        for m in 0..n {
            if self.act_vec(&basis_vec(n, m), a.unit_vec()) != basis_vec(n, m) {
                return Err(GrdError::Unit(b.label(m).to_string()));
            }
            let ddm = combine(d[m].iter().map(|(k, c)| (c.clone(), &d[*k])));
            if !ddm.is_empty() {
                return Err(GrdError::DSquared(b.label(m).into()));
            }
            let s = sign(b.deg(m).cohom());
            for x in 0..a.dim() {
                for y in 0..a.dim() {
                    if !self.owner_in_range(ab.deg(x).add(ab.deg(y))) {
                        continue;
                    }
                    let left = combine(self.act[m][x].iter().map(|(k, c)| (c.clone(), &self.act[*k][y])));
                    let right = combine(a.mul_basis(x, y).iter().map(|(k, c)| (c.clone(), &self.act[m][*k])));
                    if left != right {
                        return Err(GrdError::Associativity(
                            b.label(m).into(),
                            ab.label(x).into(),
                            ab.label(y).into(),
                        ));
                    }
                }
                if !self.owner_in_range(ab.deg(x).add(G::step())) {
                    continue;
                }
                let lhs = combine(self.act[m][x].iter().map(|(k, c)| (c.clone(), &d[*k])));
                let da = a.complex().d[x].clone();
                let rhs = combine(
                    d[m].iter()
                        .map(|(k, c)| (c.clone(), &self.act[*k][x]))
                        .chain(da.iter().map(|(k, c)| (&s * c, &self.act[m][*k]))),
                );
                if lhs != rhs {
                    return Err(GrdError::Leibniz(b.label(m).into(), ab.label(x).into()));
                }
            }
        }
        Ok(())
    }

    /// The owner as a right module over itself.
    pub fn free(owner: Arc<DgAlgebra<G>>) -> Self {
        let n = owner.dim();
        let act = (0..n).map(|m| (0..n).map(|x| owner.mul_basis(m, x).clone()).collect()).collect();
        let basis = owner.basis().clone();
        let d = owner.complex().d.clone();
        DgModule::from_parts(owner, basis, act, d, None).expect("free module is valid")
    }

    /// The right ideal `e·A` for an idempotent (or any degree-0 cocycle) `e`.
    pub fn right_ideal(owner: Arc<DgAlgebra<G>>, e: &[Q]) -> Result<Self, GrdError> {
        let free = DgModule::free(owner.clone());
        let mut spaces: BTreeMap<G, Vec<Vec<Q>>> = BTreeMap::new();
        for i in 0..owner.dim() {
            let v = owner.mul(e, &owner.basis_vec(i));
            match owner.basis().homogeneous_degree(&v) {
                Some(g) => spaces.entry(g).or_default().push(v),
                None if v.iter().all(Q::is_zero) => {}
                None => return Err(GrdError::Degree("generator is not homogeneous".into())),
            }
        }
        Ok(free.submodule(&spaces)?.0)
    }

    pub fn owner(&self) -> &Arc<DgAlgebra<G>> {
        &self.owner
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

    /// `v · a`.
    pub fn act_vec(&self, v: &[Q], a: &[Q]) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.dim()];
        for (m, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (x, e) in a.iter().enumerate() {
                if !e.is_zero() {
                    add_scaled(&mut out, &(c * e), &self.act[m][x]);
                }
            }
        }
        out
    }

    pub fn act_basis(&self, m: usize, a: usize) -> &SparseVec {
        &self.act[m][a]
    }

    pub fn d_of(&self, v: &[Q]) -> Vec<Q> {
        self.complex.apply_d(v)
    }

    pub fn cohomology(&self) -> Cohomology<G> {
        self.complex.cohomology()
    }

    /// Submodule spanned by per-degree subspaces, with its inclusion.
    pub fn submodule(&self, spaces: &BTreeMap<G, Vec<Vec<Q>>>) -> Result<(DgModule<G>, ModuleMap<G>), GrdError> {
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
        let m = vecs.len();
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
        let mut act = vec![vec![Vec::new(); self.owner.dim()]; m];
        for (k, v) in vecs.iter().enumerate() {
            for x in 0..self.owner.dim() {
                act[k][x] = coords(&self.act_vec(v, &self.owner.basis_vec(x)), "action")?;
            }
        }
        let d = vecs.iter().map(|v| coords(&self.d_of(v), "differential")).collect::<Result<Vec<_>, _>>()?;
        let sub = DgModule::from_parts(self.owner.clone(), basis, act, d, self.complex.window)?;
        let incl = ModuleMap { degree: G::zero(), matrix: Matrix::from_columns(n, &vecs) };
        Ok((sub, incl))
    }

    /// `{n}M`: degrees lowered by `n` (first component), differential times `(-1)^n`.
    pub fn shift(&self, n: i32) -> Self {
        let basis = GradedBasis::new(
            (0..self.dim()).map(|i| (self.basis().label(i).to_string(), self.basis().deg(i).shifted(n))).collect(),
        );
        let s = sign(n);
        let d = self.complex.d.iter().map(|v| v.iter().map(|(k, c)| (*k, &s * c)).collect()).collect();
        let window = self.complex.window.map(|w| w - n);
        DgModule { owner: self.owner.clone(), complex: Complex::new(basis, d, window), act: self.act.clone() }
    }

    pub fn direct_sum(parts: &[&DgModule<G>]) -> Result<Self, GrdError> {
        let owner = parts.first().ok_or_else(|| GrdError::Validation("empty direct sum".into()))?.owner.clone();
        let mut basis = GradedBasis::new(Vec::new());
        let mut act = Vec::new();
        let mut d = Vec::new();
        let mut window: Option<i32> = None;
        for (p, m) in parts.iter().enumerate() {
            if !Arc::ptr_eq(&m.owner, &owner) && *m.owner != *owner {
                return Err(GrdError::OwnerMismatch);
            }
            let off = basis.dim();
            for i in 0..m.dim() {
                basis.push(format!("{p}.{}", m.basis().label(i)), m.basis().deg(i));
                act.push(m.act[i].iter().map(|v| v.iter().map(|(k, c)| (k + off, c.clone())).collect()).collect());
                d.push(m.complex.d[i].iter().map(|(k, c)| (k + off, c.clone())).collect());
            }
            if let Some(w) = m.complex.window {
                window = Some(window.map_or(w, |x: i32| x.min(w)));
            }
        }
        DgModule::from_parts(owner, basis, act, d, window)
    }

    /// Restriction of scalars along `phi: B -> A` (this module lives over `A`).
    pub fn restrict(&self, phi: &DgaMorphism<G>) -> Result<Self, GrdError> {
        if *phi.target != *self.owner {
            return Err(GrdError::OwnerMismatch);
        }
        let b = &phi.source;
        let act = (0..self.dim())
            .map(|m| (0..b.dim()).map(|x| to_sparse(&self.act_vec(&self.basis_vec(m), &phi.apply(&b.basis_vec(x))))).collect())
            .collect();
        DgModule::from_parts(b.clone(), self.basis().clone(), act, self.complex.d.clone(), self.complex.window)
    }

    /// Cohomology as a module over the cohomology algebra `h_owner`, whose
    /// basis corresponds to `owner_coh`'s representatives in order.
    pub fn cohomology_module(
        &self,
        h_owner: Arc<DgAlgebra<G>>,
        owner_coh: &Cohomology<G>,
    ) -> (DgModule<G>, Cohomology<G>) {
        let h = self.cohomology();
        let reps = h.representatives(self.basis());
        let a_reps = owner_coh.representatives(self.owner.basis());
        let mut basis = GradedBasis::new(Vec::new());
        for (g, _) in &reps {
            basis.push(format!("[{g}:{}]", basis.dim_in(*g)), *g);
        }
        let m = reps.len();
        let class = |v: &[Q]| -> SparseVec {
            let mut out = vec![Q::zero(); m];
            if let Some(g) = self.basis().homogeneous_degree(v) {
                let c = h.class_in(self.basis(), v, g).expect("product of cycles is a cycle");
                for (coef, &i) in c.into_iter().zip(basis.indices(g)) {
                    out[i] = coef;
                }
            }
            to_sparse(&out)
        };
        let act = reps
            .iter()
            .map(|(_, r)| a_reps.iter().map(|(_, a)| class(&self.act_vec(r, a))).collect())
            .collect();
        let module = DgModule::from_parts(h_owner, basis, act, vec![Vec::new(); m], self.complex.window)
            .expect("cohomology module is valid");
        (module, h)
    }
}

/// Homogeneous linear map between modules; `matrix` is (target dim x source dim).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleMap<G> {
    pub degree: G,
    pub matrix: Matrix<Q>,
}

impl<G: Grading> ModuleMap<G> {
    pub fn identity(m: &DgModule<G>) -> Self {
        ModuleMap { degree: G::zero(), matrix: Matrix::identity(m.dim()) }
    }

    pub fn zero(src: &DgModule<G>, tgt: &DgModule<G>, degree: G) -> Self {
        ModuleMap { degree, matrix: Matrix::zeros(tgt.dim(), src.dim()) }
    }

    pub fn apply(&self, v: &[Q]) -> Vec<Q> {
        self.matrix.mul_vec(v)
    }

    /// Checks homogeneity and `f(m a) = f(m) a` on basis pairs.
    pub fn check_linear(&self, src: &DgModule<G>, tgt: &DgModule<G>) -> Result<(), GrdError> {
        if self.matrix.rows() != tgt.dim() || self.matrix.cols() != src.dim() {
            return Err(GrdError::Validation("map matrix has wrong shape".into()));
        }
        for m in 0..src.dim() {
            let img = self.apply(&src.basis_vec(m));
            if let Some(g) = tgt.basis().homogeneous_degree(&img) {
                if g != src.basis().deg(m).add(self.degree) {
                    return Err(GrdError::Degree(format!("image of {} has wrong degree", src.basis().label(m))));
                }
            } else if !img.iter().all(Q::is_zero) {
                return Err(GrdError::Degree(format!("image of {} is not homogeneous", src.basis().label(m))));
            }
            for x in 0..src.owner.dim() {
                let ex = src.owner.basis_vec(x);
                let lhs = self.apply(&src.act_vec(&src.basis_vec(m), &ex));
                let rhs = tgt.act_vec(&img, &ex);
                if lhs != rhs {
                    return Err(GrdError::Validation(format!(
                        "map is not linear on ({}, {})",
                        src.basis().label(m),
                        src.owner.basis().label(x)
                    )));
                }
            }
        }
        Ok(())
    }

    /// Checks `d f = (-1)^n f d`.
    pub fn check_chain(&self, src: &DgModule<G>, tgt: &DgModule<G>) -> Result<(), GrdError> {
        let s = sign(self.degree.cohom());
        for m in 0..src.dim() {
            let e = src.basis_vec(m);
            let lhs = tgt.d_of(&self.apply(&e));
            let rhs: Vec<Q> = self.apply(&src.d_of(&e)).iter().map(|c| &s * c).collect();
            if lhs != rhs {
                return Err(GrdError::Validation(format!("map does not commute with d on {}", src.basis().label(m))));
            }
        }
        Ok(())
    }

    pub fn quasi_iso_report(&self, src: &DgModule<G>, tgt: &DgModule<G>) -> QisoReport<G> {
        src.cohomology().map_report(src.basis(), &tgt.cohomology(), tgt.basis(), &self.matrix, self.degree)
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &ModuleMap<G>) -> ModuleMap<G> {
        ModuleMap { degree: self.degree.add(other.degree), matrix: other.matrix.mul(&self.matrix).expect("shapes agree") }
    }
}
