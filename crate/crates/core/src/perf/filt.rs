use std::sync::Arc;

use super::{is_zero, PerfAlgebra, PerfError};
use crate::exactla::{Field, Span, Q};
use crate::grdalg::{DgAlgebra, DgModule, DgaMorphism, GradedBasis, SparseVec};

/// One summand `{shift} e_label A`, generated in degree `-shift`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Summand {
    pub shift: i32,
    pub label: usize,
}

/// `⊕ {l_i} e_{v_i} A` with `d(g_j) = Σ_i g_i x_ij`, shifts non-increasing,
/// `x_ij ∈ e_{v_i} A^{l_i + 1 - l_j} e_{v_j}` and `x² = 0`.
#[derive(Clone, Debug)]
pub struct DgFiltModule {
    owner: Arc<PerfAlgebra>,
    summands: Vec<Summand>,
    x: Vec<Vec<Vec<Q>>>,
}

impl PartialEq for DgFiltModule {
    fn eq(&self, other: &Self) -> bool {
        self.summands == other.summands && self.x == other.x && *self.owner == *other.owner
    }
}

impl DgFiltModule {
    pub fn new(owner: Arc<PerfAlgebra>, summands: Vec<Summand>, x: Vec<Vec<Vec<Q>>>) -> Result<Self, PerfError> {
        let n = summands.len();
        if x.len() != n || x.iter().any(|r| r.len() != n || r.iter().any(|e| e.len() != owner.dim())) {
            return Err(PerfError::Shape);
        }
        if let Some(s) = summands.iter().find(|s| s.label >= owner.label_count()) {
            return Err(PerfError::UnknownLabel(s.label.to_string()));
        }
        if let Some(i) = (1..n).find(|&i| summands[i].shift > summands[i - 1].shift) {
            return Err(PerfError::Unsorted(i));
        }
        let m = DgFiltModule { owner, summands, x };
        for i in 0..n {
            for j in 0..n {
                let e = &m.x[i][j];
                if is_zero(e) {
                    continue;
                }
                let k = m.entry_degree(i, j);
                let (v, w) = (m.summands[i].label, m.summands[j].label);
                if m.owner.slice(v, k, w).coords(e).is_none() {
                    return Err(PerfError::EntryDegree {
                        i,
                        j,
                        degree: k,
                        left: m.owner.label(v).into(),
                        right: m.owner.label(w).into(),
                    });
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let mut acc = m.owner.zero();
                for p in 0..n {
                    add_into(&mut acc, &m.owner.mul(&m.x[i][p], &m.x[p][j]));
                }
                if !is_zero(&acc) {
                    return Err(PerfError::NotSquareZero(i, j));
                }
            }
        }
        Ok(m)
    }

    /// Builds from `(shift, label)` pairs and sparse nonzero entries.
    pub fn from_entries(
        owner: Arc<PerfAlgebra>,
        summands: &[(i32, &str)],
        entries: &[((usize, usize), Vec<Q>)],
    ) -> Result<Self, PerfError> {
        let s = summands
            .iter()
            .map(|&(shift, l)| Ok(Summand { shift, label: owner.label_index(l)? }))
            .collect::<Result<Vec<_>, PerfError>>()?;
        let mut x = vec![vec![owner.zero(); s.len()]; s.len()];
        for ((i, j), v) in entries {
            if *i >= s.len() || *j >= s.len() {
                return Err(PerfError::Shape);
            }
            x[*i][*j] = v.clone();
        }
        DgFiltModule::new(owner, s, x)
    }

    /// `L̂_v = e_v A` in position `[0, 0]`.
    pub fn induced_simple(owner: Arc<PerfAlgebra>, label: usize) -> Result<Self, PerfError> {
        let x = vec![vec![owner.zero()]];
        DgFiltModule::new(owner, vec![Summand { shift: 0, label }], x)
    }

    pub fn zero(owner: Arc<PerfAlgebra>) -> Self {
        DgFiltModule { owner, summands: Vec::new(), x: Vec::new() }
    }

    pub fn owner(&self) -> &Arc<PerfAlgebra> {
        &self.owner
    }

    pub fn summands(&self) -> &[Summand] {
        &self.summands
    }

    pub fn len(&self) -> usize {
        self.summands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn entry(&self, i: usize, j: usize) -> &[Q] {
        &self.x[i][j]
    }

    pub fn entries(&self) -> &[Vec<Vec<Q>>] {
        &self.x
    }

    /// Degree required of `x_ij`.
    pub fn entry_degree(&self, i: usize, j: usize) -> i32 {
        self.summands[i].shift + 1 - self.summands[j].shift
    }

    /// Subquotients `{l_i} L̂_{v_i}` of the induced filtration, as
    /// `(shift, label)` pairs in filtration order.
    pub fn filtration(&self) -> Vec<(i32, String)> {
        self.summands.iter().map(|s| (s.shift, self.owner.label(s.label).to_string())).collect()
    }

    /// `{n}M`: every shift increases by `n`, `x` is multiplied by `(-1)^n`.
    pub fn shift(&self, n: i32) -> Self {
        let s = if n.rem_euclid(2) == 0 { Q::one() } else { Q::one().neg() };
        let summands = self.summands.iter().map(|t| Summand { shift: t.shift + n, label: t.label }).collect();
        let x = self.x.iter().map(|r| r.iter().map(|e| e.iter().map(|c| c.mul(&s)).collect()).collect()).collect();
        DgFiltModule { owner: self.owner.clone(), summands, x }
    }

    /// Block-diagonal sum, re-sorted stably by decreasing shift.
    pub fn direct_sum(parts: &[&DgFiltModule]) -> Result<Self, PerfError> {
        let owner = parts.first().ok_or(PerfError::Shape)?.owner.clone();
        let n: usize = parts.iter().map(|p| p.len()).sum();
        let mut summands = Vec::with_capacity(n);
        let mut x = vec![vec![owner.zero(); n]; n];
        let mut off = 0;
        for p in parts {
            if *p.owner != *owner {
                return Err(PerfError::OwnerMismatch);
            }
            summands.extend_from_slice(&p.summands);
            for i in 0..p.len() {
                for j in 0..p.len() {
                    x[off + i][off + j] = p.x[i][j].clone();
                }
            }
            off += p.len();
        }
        let (summands, x, _) = sort_by_shift(summands, x);
        DgFiltModule::new(owner, summands, x)
    }

    /// Applies `φ: A -> B` entrywise, giving the extension of scalars `M ⊗_A B`.
    pub fn extend_scalars(&self, target: Arc<PerfAlgebra>, phi: &DgaMorphism<i32>) -> Result<Self, PerfError> {
        if **target.algebra() != *phi.target || **self.owner.algebra() != *phi.source {
            return Err(PerfError::OwnerMismatch);
        }
        let labels = self
            .summands
            .iter()
            .map(|s| {
                let img = phi.apply(self.owner.idempotent(s.label));
                (0..target.label_count())
                    .find(|&w| target.idempotent(w) == img.as_slice())
                    .map(|label| Summand { shift: s.shift, label })
                    .ok_or_else(|| PerfError::UnknownLabel(self.owner.label(s.label).into()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let x = self.x.iter().map(|r| r.iter().map(|e| phi.apply(e)).collect()).collect();
        DgFiltModule::new(target, labels, x)
    }

    /// Basis of `e_v A`: union of slice bases, tagged with degree.
    fn summand_basis(&self, v: usize) -> Vec<(i32, Vec<Q>)> {
        let mut out = Vec::new();
        let degrees: std::collections::BTreeSet<i32> = self.owner.algebra().basis().degrees().collect();
        for k in degrees {
            for w in 0..self.owner.label_count() {
                for b in &self.owner.slice(v, k, w).basis {
                    out.push((k, b.clone()));
                }
            }
        }
        out
    }

    /// The underlying dg module over the owner algebra.
    pub fn to_dg_module(&self) -> Result<DgModule<i32>, PerfError> {
        let a: &Arc<DgAlgebra<i32>> = self.owner.algebra();
        let parts: Vec<Vec<(i32, Vec<Q>)>> = self.summands.iter().map(|s| self.summand_basis(s.label)).collect();
        let spans: Vec<Span<Q>> = parts
            .iter()
            .map(|p| Span::new(a.dim(), &p.iter().map(|(_, v)| v.clone()).collect::<Vec<_>>()))
            .collect();
        let offsets: Vec<usize> = parts
            .iter()
            .scan(0, |acc, p| {
                let o = *acc;
                *acc += p.len();
                Some(o)
            })
            .collect();
        let total: usize = parts.iter().map(Vec::len).sum();
        let mut basis = GradedBasis::new(Vec::new());
        for (i, p) in parts.iter().enumerate() {
            for (k, (deg, _)) in p.iter().enumerate() {
                basis.push(format!("g{i}.{k}"), deg - self.summands[i].shift);
            }
        }
        let locate = |i: usize, v: &[Q]| -> Result<SparseVec, PerfError> {
            let c = spans[i]
                .coords(v)
                .ok_or_else(|| PerfError::Internal("product left the summand".into()))?;
            Ok(c.into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| (offsets[i] + k, c))
                .collect())
        };
        let mut act = Vec::with_capacity(total);
        let mut d = Vec::with_capacity(total);
        for (j, p) in parts.iter().enumerate() {
            for (_, s) in p {
                let mut row = Vec::with_capacity(a.dim());
                for b in 0..a.dim() {
                    row.push(locate(j, &a.mul(s, &a.basis_vec(b)))?);
                }
                act.push(row);
                let mut dv: Vec<(usize, Q)> = Vec::new();
                for i in 0..self.len() {
                    let y = a.mul(&self.x[i][j], s);
                    if !is_zero(&y) {
                        dv.extend(locate(i, &y)?);
                    }
                }
                d.push(dv);
            }
        }
        let window = a.truncation().map(|t| t - self.summands.iter().map(|s| s.shift).max().unwrap_or(0) - 1);
        Ok(DgModule::from_parts(a.clone(), basis, act, d, window)?)
    }
}

pub(crate) fn add_into(acc: &mut [Q], v: &[Q]) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a = a.add(b);
    }
}

/// Stable sort by decreasing shift; returns the permutation `new -> old`.
pub(crate) fn sort_by_shift(
    summands: Vec<Summand>,
    x: Vec<Vec<Vec<Q>>>,
) -> (Vec<Summand>, Vec<Vec<Vec<Q>>>, Vec<usize>) {
    let mut order: Vec<usize> = (0..summands.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(summands[i].shift));
    let s = order.iter().map(|&i| summands[i]).collect();
    let y = order.iter().map(|&i| order.iter().map(|&j| x[i][j].clone()).collect()).collect();
    (s, y, order)
}
