use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use super::complex::{Cohomology, Complex, GradedBasis};
use super::morphism::DgaMorphism;
use super::{add_scaled, is_zero_vec, sign, to_dense, to_sparse, GrdError, Grading, SparseVec};
use crate::exactla::{Field, Matrix, Span, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Idempotent {
    pub label: String,
    pub coords: Vec<Q>,
}

/// Finite-dimensional (or window-truncated) graded algebra with differential.
///
/// With a truncation `D`, the algebra is `A / A^{>D}`: products landing above
/// `D` vanish and identities are only required in degrees `<= D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DgAlgebra<G> {
    complex: Complex<G>,
    mult: Vec<Vec<SparseVec>>,
    unit: Vec<Q>,
    idempotents: Vec<Idempotent>,
    truncation: Option<i32>,
}

pub struct AlgebraBuilder<G> {
    basis: GradedBasis<G>,
    mult: HashMap<(usize, usize), SparseVec>,
    d: HashMap<usize, SparseVec>,
    unit: Option<SparseVec>,
    idempotents: Vec<(String, SparseVec)>,
    truncation: Option<i32>,
}

impl<G: Grading> Default for AlgebraBuilder<G> {
    fn default() -> Self {
        Self::new()
    }
}

impl<G: Grading> AlgebraBuilder<G> {
    pub fn new() -> Self {
        AlgebraBuilder {
            basis: GradedBasis::new(Vec::new()),
            mult: HashMap::new(),
            d: HashMap::new(),
            unit: None,
            idempotents: Vec::new(),
            truncation: None,
        }
    }

    pub fn basis(&mut self, label: impl Into<String>, deg: G) -> usize {
        self.basis.push(label.into(), deg)
    }

    pub fn product(&mut self, a: usize, b: usize, value: SparseVec) -> &mut Self {
        self.mult.insert((a, b), value);
        self
    }

    pub fn product_basis(&mut self, a: usize, b: usize, c: usize) -> &mut Self {
        self.product(a, b, vec![(c, Q::one())])
    }

    pub fn differential(&mut self, a: usize, value: SparseVec) -> &mut Self {
        self.d.insert(a, value);
        self
    }

    /// Declares basis element `u` to be the unit and fills in its products.
    pub fn unit_basis(&mut self, u: usize) -> &mut Self {
        for x in 0..self.basis.dim() {
            self.mult.insert((u, x), vec![(x, Q::one())]);
            self.mult.insert((x, u), vec![(x, Q::one())]);
        }
        self.unit = Some(vec![(u, Q::one())]);
        self
    }

    pub fn unit(&mut self, value: SparseVec) -> &mut Self {
        self.unit = Some(value);
        self
    }

    pub fn idempotent(&mut self, label: impl Into<String>, value: SparseVec) -> &mut Self {
        self.idempotents.push((label.into(), value));
        self
    }

    pub fn truncation(&mut self, d: i32) -> &mut Self {
        self.truncation = Some(d);
        self
    }

    pub fn build(&self) -> Result<DgAlgebra<G>, GrdError> {
        let n = self.basis.dim();
        let mut mult = vec![vec![Vec::new(); n]; n];
        for (&(a, b), v) in &self.mult {
            if a >= n || b >= n {
                return Err(GrdError::Validation(format!("product index ({a},{b}) out of range")));
            }
            mult[a][b] = to_sparse(&to_dense(v, n));
        }
        let mut d = vec![Vec::new(); n];
        for (&a, v) in &self.d {
            if a >= n {
                return Err(GrdError::Validation(format!("differential index {a} out of range")));
            }
            d[a] = to_sparse(&to_dense(v, n));
        }
        let unit = match &self.unit {
            Some(u) => to_dense(u, n),
            None => return Err(GrdError::Unit("no unit supplied".into())),
        };
        let mut idempotents: Vec<Idempotent> = self
            .idempotents
            .iter()
            .map(|(l, v)| Idempotent { label: l.clone(), coords: to_dense(v, n) })
            .collect();
        if idempotents.is_empty() {
            idempotents.push(Idempotent { label: "*".into(), coords: unit.clone() });
        }
        DgAlgebra::from_parts(self.basis.clone(), mult, d, unit, idempotents, self.truncation)
    }
}

impl<G: Grading> DgAlgebra<G> {
    /// Assembles and validates an algebra from raw tables.
    pub fn from_parts(
        basis: GradedBasis<G>,
        mult: Vec<Vec<SparseVec>>,
        d: Vec<SparseVec>,
        unit: Vec<Q>,
        idempotents: Vec<Idempotent>,
        truncation: Option<i32>,
    ) -> Result<Self, GrdError> {
        let has_d = d.iter().any(|v| !v.is_empty());
        let window = truncation.map(|t| if has_d { t - 1 } else { t });
        let alg = DgAlgebra { complex: Complex::new(basis, d, window), mult, unit, idempotents, truncation };
        alg.validate()?;
        Ok(alg)
    }

    pub fn field() -> Self {
        let mut b = AlgebraBuilder::new();
        let one = b.basis("1", G::zero());
        b.unit_basis(one);
        b.build().expect("base field is valid")
    }

    fn in_range(&self, g: G) -> bool {
        self.truncation.is_none_or(|t| g.cohom() <= t)
    }

    fn validate(&self) -> Result<(), GrdError> {
        let n = self.dim();
        let b = &self.complex.basis;
        if self.mult.len() != n || self.mult.iter().any(|r| r.len() != n) || self.unit.len() != n {
            return Err(GrdError::Validation("table sizes do not match basis".into()));
        }
        if let Some(t) = self.truncation {
            if let Some(i) = (0..n).find(|&i| b.deg(i).cohom() > t) {
                return Err(GrdError::Degree(format!("{} lies above truncation {t}", b.label(i))));
            }
        }
        for x in 0..n {
            for y in 0..n {
                let g = b.deg(x).add(b.deg(y));
                for (z, _) in &self.mult[x][y] {
                    if b.deg(*z) != g {
                        return Err(GrdError::Degree(format!(
                            "{}*{} has a component {} of degree {}",
                            b.label(x),
                            b.label(y),
                            b.label(*z),
                            b.deg(*z)
                        )));
                    }
                }
            }
            for (z, _) in &self.complex.d[x] {
                if b.deg(*z) != b.deg(x).add(G::step()) {
                    return Err(GrdError::Degree(format!("d({}) has wrong degree", b.label(x))));
                }
            }
        }
        if b.homogeneous_degree(&self.unit) != Some(G::zero()) {
            return Err(GrdError::Unit("unit must be nonzero of degree 0".into()));
        }
        for x in 0..n {
            let e = basis_vec(n, x);
            if self.mul(&self.unit, &e) != e || self.mul(&e, &self.unit) != e {
                return Err(GrdError::Unit(b.label(x).to_string()));
            }
        }
        let b_d = &self.complex.d;
        for x in 0..n {
            for y in 0..n {
                let xy = &self.mult[x][y];
                for z in 0..n {
                    let g = b.deg(x).add(b.deg(y)).add(b.deg(z));
                    if !self.in_range(g) {
                        continue;
                    }
                    let left = combine(xy.iter().map(|(k, c)| (c.clone(), &self.mult[*k][z])));
                    let right = combine(self.mult[y][z].iter().map(|(k, c)| (c.clone(), &self.mult[x][*k])));
                    if left != right {
                        return Err(GrdError::Associativity(
                            b.label(x).into(),
                            b.label(y).into(),
                            b.label(z).into(),
                        ));
                    }
                }
            }
        }
        for x in 0..n {
            if !self.in_range(b.deg(x).add(G::step()).add(G::step())) {
                continue;
            }
            let ddx = combine(b_d[x].iter().map(|(k, c)| (c.clone(), &b_d[*k])));
            if !ddx.is_empty() {
                return Err(GrdError::DSquared(b.label(x).into()));
            }
        }
        for x in 0..n {
            let s = sign(b.deg(x).cohom());
            for y in 0..n {
                let g = b.deg(x).add(b.deg(y)).add(G::step());
                if !self.in_range(g) {
                    continue;
                }
                let lhs = combine(self.mult[x][y].iter().map(|(k, c)| (c.clone(), &b_d[*k])));
                let rhs = combine(
                    b_d[x]
                        .iter()
                        .map(|(k, c)| (c.clone(), &self.mult[*k][y]))
                        .chain(b_d[y].iter().map(|(k, c)| (&s * c, &self.mult[x][*k]))),
                );
                if lhs != rhs {
                    return Err(GrdError::Leibniz(b.label(x).into(), b.label(y).into()));
                }
            }
        }
        let mut total = vec![Q::zero(); n];
        for (k, e) in self.idempotents.iter().enumerate() {
            if e.coords.len() != n {
                return Err(GrdError::Idempotent(format!("{} has wrong length", e.label)));
            }
            if b.homogeneous_degree(&e.coords) != Some(G::zero()) {
                return Err(GrdError::Idempotent(format!("{} is not nonzero of degree 0", e.label)));
            }
            if self.mul(&e.coords, &e.coords) != e.coords {
                return Err(GrdError::Idempotent(format!("{} squared is not itself", e.label)));
            }
            if !is_zero_vec(&self.d_of(&e.coords)) {
                return Err(GrdError::Idempotent(format!("d({}) != 0", e.label)));
            }
            for f in &self.idempotents[k + 1..] {
                if !is_zero_vec(&self.mul(&e.coords, &f.coords)) || !is_zero_vec(&self.mul(&f.coords, &e.coords)) {
                    return Err(GrdError::Idempotent(format!("{} and {} are not orthogonal", e.label, f.label)));
                }
            }
            for (t, c) in total.iter_mut().zip(&e.coords) {
                *t = &*t + c;
            }
        }
        if total != self.unit {
            return Err(GrdError::Idempotent("idempotents do not sum to the unit".into()));
        }
        Ok(())
    }

    /// Positively graded, degree 0 spanned by the idempotents (so it is a
    /// product of copies of the field), and `d` vanishing on degree 0.
    pub fn check_positive(&self) -> Result<(), GrdError> {
        let b = self.basis();
        if let Some(i) = (0..self.dim()).find(|&i| b.deg(i).cohom() < 0) {
            return Err(GrdError::Validation(format!("not positively graded: {}", b.label(i))));
        }
        let zero_deg: Vec<usize> = (0..self.dim()).filter(|&i| b.deg(i).cohom() == 0).collect();
        let locals: Vec<Vec<Q>> = self.idempotents.iter().map(|e| e.coords.clone()).collect();
        let rank = crate::exactla::rank_of(self.dim(), &locals);
        if rank != zero_deg.len() || rank != self.idempotents.len() {
            return Err(GrdError::Validation(format!(
                "degree-0 part has dimension {} but {} idempotents",
                zero_deg.len(),
                self.idempotents.len()
            )));
        }
        if let Some(&i) = zero_deg.iter().find(|&&i| !self.complex.d[i].is_empty()) {
            return Err(GrdError::Validation(format!("d does not vanish on {}", b.label(i))));
        }
        Ok(())
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

    pub fn truncation(&self) -> Option<i32> {
        self.truncation
    }

    /// Largest cohomological degree in which cohomology is certified.
    pub fn window(&self) -> Option<i32> {
        self.complex.window
    }

    pub fn unit_vec(&self) -> &[Q] {
        &self.unit
    }

    pub fn idempotents(&self) -> &[Idempotent] {
        &self.idempotents
    }

    pub fn idempotent(&self, label: &str) -> Option<&Idempotent> {
        self.idempotents.iter().find(|e| e.label == label)
    }

    pub fn mul_basis(&self, a: usize, b: usize) -> &SparseVec {
        &self.mult[a][b]
    }

    pub fn mul(&self, x: &[Q], y: &[Q]) -> Vec<Q> {
        let n = self.dim();
        let mut out = vec![Q::zero(); n];
        for (i, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, c) in y.iter().enumerate() {
                if c.is_zero() || self.mult[i][j].is_empty() {
                    continue;
                }
                add_scaled(&mut out, &(a * c), &self.mult[i][j]);
            }
        }
        out
    }

    pub fn d_of(&self, x: &[Q]) -> Vec<Q> {
        self.complex.apply_d(x)
    }

    pub fn d_is_zero(&self) -> bool {
        self.complex.d_is_zero()
    }

    pub fn basis_vec(&self, i: usize) -> Vec<Q> {
        basis_vec(self.dim(), i)
    }

    /// Dimension of `e_l A^g e_r`.
    pub fn slice_dim(&self, left: &[Q], g: G, right: &[Q]) -> usize {
        let vecs: Vec<Vec<Q>> = self
            .basis()
            .indices(g)
            .iter()
            .map(|&i| self.mul(&self.mul(left, &self.basis_vec(i)), right))
            .collect();
        crate::exactla::rank_of(self.dim(), &vecs)
    }

    /// Basis of `e_l A^g e_r` as full coordinate vectors, extracted from the
    /// images of the basis of `A^g`.
    pub fn slice_basis(&self, left: &[Q], g: G, right: &[Q]) -> Vec<Vec<Q>> {
        let vecs: Vec<Vec<Q>> = self
            .basis()
            .indices(g)
            .iter()
            .map(|&i| self.mul(&self.mul(left, &self.basis_vec(i)), right))
            .collect();
        Span::new(self.dim(), &vecs).basis().to_vec()
    }

    pub fn cohomology(&self) -> Cohomology<G> {
        self.complex.cohomology()
    }

    /// The cohomology algebra with zero differential, basis = chosen representatives.
    pub fn cohomology_algebra(&self) -> (DgAlgebra<G>, Cohomology<G>) {
        let h = self.cohomology();
        let mut basis = GradedBasis::new(Vec::new());
        let mut reps = Vec::new();
        for (g, dh) in &h.degrees {
            for (k, r) in dh.reps.iter().enumerate() {
                basis.push(format!("[{g}:{k}]"), *g);
                reps.push((*g, self.basis().embed(r, *g)));
            }
        }
        let m = reps.len();
        let class = |v: &[Q]| -> Vec<Q> {
            let mut out = vec![Q::zero(); m];
            for g in basis_degrees(&basis) {
                let Some(dh) = h.get(g) else { continue };
                let local = self.basis().local(v, g);
                if is_zero_vec(&local) {
                    continue;
                }
                let c = dh.class_of(&local).expect("product of cycles is a cycle");
                for (coef, &idx) in c.iter().zip(basis.indices(g)) {
                    out[idx] = coef.clone();
                }
            }
            out
        };
        let mut mult = vec![vec![Vec::new(); m]; m];
        for (a, (_, ra)) in reps.iter().enumerate() {
            for (b, (_, rb)) in reps.iter().enumerate() {
                mult[a][b] = to_sparse(&class(&self.mul(ra, rb)));
            }
        }
        let unit = class(&self.unit);
        let idempotents = self
            .idempotents
            .iter()
            .map(|e| Idempotent { label: e.label.clone(), coords: class(&e.coords) })
            .collect();
        let window = self.complex.window;
        let alg = DgAlgebra::from_parts(basis, mult, vec![Vec::new(); m], unit, idempotents, window)
            .expect("cohomology of a valid dg algebra is valid");
        (alg, h)
    }

    /// Sub-dg-algebra spanned by the given per-degree subspaces (full
    /// coordinates), with its inclusion. Checks closure under products and `d`.
    pub fn subalgebra(
        self: &Arc<Self>,
        spaces: &BTreeMap<G, Vec<Vec<Q>>>,
    ) -> Result<(Arc<DgAlgebra<G>>, DgaMorphism<G>), GrdError> {
        let n = self.dim();
        let mut basis = GradedBasis::new(Vec::new());
        let mut vecs: Vec<Vec<Q>> = Vec::new();
        let mut spans: BTreeMap<G, (Span<Q>, Vec<usize>)> = BTreeMap::new();
        for (g, vs) in spaces {
            let span = Span::new(n, vs);
            let mut idx = Vec::new();
            for (k, v) in span.basis().iter().enumerate() {
                idx.push(basis.push(format!("s{g}:{k}"), *g));
                vecs.push(v.clone());
            }
            spans.insert(*g, (span, idx));
        }
        let m = vecs.len();
        let coords = |v: &[Q], what: &str| -> Result<Vec<Q>, GrdError> {
            let mut out = vec![Q::zero(); m];
            if is_zero_vec(v) {
                return Ok(out);
            }
            let g = self
                .basis()
                .homogeneous_degree(v)
                .ok_or_else(|| GrdError::NotClosed(format!("{what} is not homogeneous")))?;
            let (span, idx) = spans.get(&g).ok_or_else(|| GrdError::NotClosed(format!("{what} in degree {g}")))?;
            let c = span.coords(v).ok_or_else(|| GrdError::NotClosed(format!("{what} in degree {g}")))?;
            for (coef, &i) in c.into_iter().zip(idx) {
                out[i] = coef;
            }
            Ok(out)
        };
        let mut mult = vec![vec![Vec::new(); m]; m];
        for a in 0..m {
            for b in 0..m {
                let p = self.mul(&vecs[a], &vecs[b]);
                mult[a][b] = to_sparse(&coords(&p, &format!("product s{a}*s{b}"))?);
            }
        }
        let mut d = Vec::with_capacity(m);
        for (a, v) in vecs.iter().enumerate() {
            d.push(to_sparse(&coords(&self.d_of(v), &format!("d(s{a})"))?));
        }
        let unit = coords(&self.unit, "unit")?;
        let idempotents = self
            .idempotents
            .iter()
            .map(|e| Ok(Idempotent { label: e.label.clone(), coords: coords(&e.coords, &e.label)? }))
            .collect::<Result<Vec<_>, GrdError>>()?;
        let sub = Arc::new(DgAlgebra::from_parts(basis, mult, d, unit, idempotents, self.truncation)?);
        let incl = Matrix::from_columns(n, &vecs);
        let f = DgaMorphism::new(sub.clone(), self.clone(), incl)?;
        Ok((sub, f))
    }

    /// Same algebra with every degree mapped through `f` (which must be
    /// compatible with addition and send the differential step to the new step).
    pub fn regrade<H: Grading>(&self, f: impl Fn(G) -> H) -> Result<DgAlgebra<H>, GrdError> {
        let basis = GradedBasis::new(
            (0..self.dim()).map(|i| (self.basis().label(i).to_string(), f(self.basis().deg(i)))).collect(),
        );
        DgAlgebra::from_parts(
            basis,
            self.mult.clone(),
            self.complex.d.clone(),
            self.unit.clone(),
            self.idempotents.clone(),
            self.truncation,
        )
    }

    /// Same algebra expressed in a new basis: column `k` of `change` gives the
    /// old coordinates of new basis vector `k`, which must be homogeneous.
    pub fn rebase(&self, change: &Matrix<Q>, labels: Vec<String>) -> Result<(DgAlgebra<G>, Matrix<Q>), GrdError> {
        let n = self.dim();
        let inv = change.inverse().ok_or_else(|| GrdError::Validation("basis change is singular".into()))?;
        let cols = change.columns();
        let mut basis = GradedBasis::new(Vec::new());
        for (k, c) in cols.iter().enumerate() {
            let g = self
                .basis()
                .homogeneous_degree(c)
                .ok_or_else(|| GrdError::Degree(format!("new basis vector {k} is not homogeneous")))?;
            basis.push(labels[k].clone(), g);
        }
        let to_new = |v: &[Q]| inv.mul_vec(v);
        let mut mult = vec![vec![Vec::new(); n]; n];
        for a in 0..n {
            for b in 0..n {
                mult[a][b] = to_sparse(&to_new(&self.mul(&cols[a], &cols[b])));
            }
        }
        let d = cols.iter().map(|c| to_sparse(&to_new(&self.d_of(c)))).collect();
        let unit = to_new(&self.unit);
        let idempotents = self
            .idempotents
            .iter()
            .map(|e| Idempotent { label: e.label.clone(), coords: to_new(&e.coords) })
            .collect();
        let alg = DgAlgebra::from_parts(basis, mult, d, unit, idempotents, self.truncation)?;
        Ok((alg, inv))
    }
}

fn basis_degrees<G: Grading>(b: &GradedBasis<G>) -> Vec<G> {
    b.degrees().collect()
}

/// Normalized sum of scaled sparse vectors.
pub(crate) fn combine<'a>(terms: impl Iterator<Item = (Q, &'a SparseVec)>) -> SparseVec {
    let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
    for (s, v) in terms {
        if s.is_zero() {
            continue;
        }
        for (i, c) in v {
            let e = acc.entry(*i).or_insert_with(Q::zero);
            *e = &*e + &(&s * c);
        }
    }
    acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

pub(crate) fn basis_vec(n: usize, i: usize) -> Vec<Q> {
    let mut v = vec![Q::zero(); n];
    v[i] = Q::one();
    v
}
