use std::collections::BTreeMap;
use std::sync::Arc;

use super::filt::{add_into, sort_by_shift};
use super::{is_zero, DgFiltModule, PerfAlgebra, PerfError, Summand};
use crate::exactla::{Field, Q};
use crate::grdalg::{Cohomology, Complex, GradedBasis, SparseVec};

pub type EntryMatrix = Vec<Vec<Vec<Q>>>;

/// Product of entry matrices over the owner.
pub(crate) fn mat_mul(owner: &PerfAlgebra, a: &EntryMatrix, b: &EntryMatrix) -> EntryMatrix {
    let rows = a.len();
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    let mut out = vec![vec![owner.zero(); cols]; rows];
    for i in 0..rows {
        for p in 0..inner {
            if is_zero(&a[i][p]) {
                continue;
            }
            for j in 0..cols {
                if !is_zero(&b[p][j]) {
                    add_into(&mut out[i][j], &owner.mul(&a[i][p], &b[p][j]));
                }
            }
        }
    }
    out
}

pub(crate) fn mat_combine(a: &EntryMatrix, s: &Q, b: &EntryMatrix) -> EntryMatrix {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p.add(&s.mul(q))).collect()).collect())
        .collect()
}

fn parity_sign(k: i32) -> Q {
    if k.rem_euclid(2) == 0 {
        Q::one()
    } else {
        Q::one().neg()
    }
}

/// One basis map of `Hom^k`: a single slice basis element at entry `(i, j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomCell {
    pub degree: i32,
    pub row: usize,
    pub col: usize,
    pub slice_index: usize,
}

/// Matrix Hom complex `Hom(M, N)`: degree-`k` maps are matrices with
/// `f_ij ∈ e_{w_i} A^{m_i + k - l_j} e_{v_j}`, and `D f = y f - (-1)^k f x`.
#[derive(Clone, Debug)]
pub struct FiltHomComplex {
    pub complex: Complex<i32>,
    pub cells: Vec<HomCell>,
    source: DgFiltModule,
    target: DgFiltModule,
    cohomology: Cohomology<i32>,
}

impl FiltHomComplex {
    fn entry_degree(&self, k: i32, i: usize, j: usize) -> i32 {
        self.target.summands()[i].shift + k - self.source.summands()[j].shift
    }

    pub fn cohomology(&self) -> &Cohomology<i32> {
        &self.cohomology
    }

    /// `dim H^k`, or `None` when `k` lies beyond what the truncation certifies.
    pub fn hom_dim(&self, k: i32) -> Option<usize> {
        self.cohomology.certified(k).then(|| self.cohomology.dim(k))
    }

    pub fn chain_dim(&self, k: i32) -> usize {
        self.complex.basis.dim_in(k)
    }

    /// Degrees where some `Hom^k` is nonzero.
    pub fn degree_range(&self) -> Option<(i32, i32)> {
        let mut ds = self.complex.basis.degrees();
        let first = ds.next()?;
        Some(ds.fold((first, first), |(lo, hi), d| (lo.min(d), hi.max(d))))
    }

    /// Matrix of a degree-`k` map from local coordinates of `Hom^k`.
    pub fn to_matrix(&self, local: &[Q], k: i32) -> EntryMatrix {
        let owner = self.source.owner();
        let mut f = vec![vec![owner.zero(); self.source.len()]; self.target.len()];
        for (c, &idx) in local.iter().zip(self.complex.basis.indices(k)) {
            if c.is_zero() {
                continue;
            }
            let cell = &self.cells[idx];
            let (w, v) = (self.target.summands()[cell.row].label, self.source.summands()[cell.col].label);
            let b = &owner.slice(w, cell.degree, v).basis[cell.slice_index];
            let scaled: Vec<Q> = b.iter().map(|x| x.mul(c)).collect();
            add_into(&mut f[cell.row][cell.col], &scaled);
        }
        f
    }

    /// Local coordinates of a degree-`k` matrix, `None` if an entry has the
    /// wrong degree or idempotent type.
    pub fn coords(&self, f: &EntryMatrix, k: i32) -> Option<Vec<Q>> {
        let owner = self.source.owner();
        let idx = self.complex.basis.indices(k);
        let mut out = vec![Q::zero(); idx.len()];
        for (i, row) in f.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                if is_zero(e) {
                    continue;
                }
                let deg = self.entry_degree(k, i, j);
                let (w, v) = (self.target.summands()[i].label, self.source.summands()[j].label);
                let c = owner.slice(w, deg, v).coords(e)?;
                for (pos, &id) in idx.iter().enumerate() {
                    let cell = &self.cells[id];
                    if cell.row == i && cell.col == j {
                        out[pos] = c[cell.slice_index].clone();
                    }
                }
            }
        }
        Some(out)
    }

    /// Representatives of a basis of `H^k`, as matrices.
    pub fn cohomology_basis(&self, k: i32) -> Vec<EntryMatrix> {
        self.cohomology.get(k).map_or_else(Vec::new, |h| h.reps.iter().map(|r| self.to_matrix(r, k)).collect())
    }

    /// Whether a degree-`k` cocycle is a coboundary.
    pub fn is_coboundary(&self, f: &EntryMatrix, k: i32) -> Option<bool> {
        let c = self.coords(f, k)?;
        Some(self.cohomology.get(k).is_none_or(|h| h.is_boundary(&c)))
    }
}

pub fn filt_hom_complex(m: &DgFiltModule, n: &DgFiltModule) -> Result<FiltHomComplex, PerfError> {
    if **m.owner() != **n.owner() {
        return Err(PerfError::OwnerMismatch);
    }
    let owner = m.owner().clone();
    let a = owner.algebra();
    let adegrees: std::collections::BTreeSet<i32> = a.basis().degrees().collect();
    let mut by_degree: BTreeMap<i32, Vec<HomCell>> = BTreeMap::new();
    for (i, t) in n.summands().iter().enumerate() {
        for (j, s) in m.summands().iter().enumerate() {
            for &deg in &adegrees {
                let k = deg - t.shift + s.shift;
                for slice_index in 0..owner.slice(t.label, deg, s.label).dim() {
                    by_degree.entry(k).or_default().push(HomCell { degree: deg, row: i, col: j, slice_index });
                }
            }
        }
    }
    let mut basis = GradedBasis::new(Vec::new());
    let mut cells = Vec::new();
    for (k, cs) in by_degree {
        for c in cs {
            basis.push(format!("f{}.{}.{}", c.row, c.col, c.slice_index), k);
            cells.push(c);
        }
    }
    let window = a.truncation().map(|t| {
        let spread = n.summands().iter().map(|s| s.shift).max().unwrap_or(0)
            - m.summands().iter().map(|s| s.shift).min().unwrap_or(0);
        t - spread - 1
    });
    let ncells = cells.len();
    let mut h = FiltHomComplex {
        complex: Complex::new(basis, vec![Vec::new(); ncells], window),
        cells,
        source: m.clone(),
        target: n.clone(),
        cohomology: Cohomology { degrees: BTreeMap::new(), window },
    };
    let mut d: Vec<SparseVec> = Vec::with_capacity(h.cells.len());
    for idx in 0..h.cells.len() {
        let k = h.complex.basis.deg(idx);
        let mut local = vec![Q::zero(); h.complex.basis.dim_in(k)];
        local[h.complex.basis.local_index(idx)] = Q::one();
        let f = h.to_matrix(&local, k);
        let df = mat_combine(&mat_mul(&owner, &n.entries().to_vec(), &f), &parity_sign(k + 1), &mat_mul(&owner, &f, &m.entries().to_vec()));
        let c = h.coords(&df, k + 1).ok_or_else(|| PerfError::Internal("D f left Hom^{k+1}".into()))?;
        let full = h.complex.basis.embed(&c, k + 1);
        d.push(full.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect());
    }
    h.complex.d = d;
    h.cohomology = h.complex.cohomology();
    Ok(h)
}

/// Degree-0 chain map `f: M -> N`, `y f = f x`.
#[derive(Clone, Debug)]
pub struct FiltMorphism {
    pub source: DgFiltModule,
    pub target: DgFiltModule,
    pub f: EntryMatrix,
}

impl FiltMorphism {
    pub fn new(source: DgFiltModule, target: DgFiltModule, f: EntryMatrix) -> Result<Self, PerfError> {
        if **source.owner() != **target.owner() {
            return Err(PerfError::OwnerMismatch);
        }
        let owner = source.owner().clone();
        if f.len() != target.len() || f.iter().any(|r| r.len() != source.len() || r.iter().any(|e| e.len() != owner.dim())) {
            return Err(PerfError::Shape);
        }
        for (i, t) in target.summands().iter().enumerate() {
            for (j, s) in source.summands().iter().enumerate() {
                if !is_zero(&f[i][j]) && owner.slice(t.label, t.shift - s.shift, s.label).coords(&f[i][j]).is_none() {
                    return Err(PerfError::EntryDegree {
                        i,
                        j,
                        degree: t.shift - s.shift,
                        left: owner.label(t.label).into(),
                        right: owner.label(s.label).into(),
                    });
                }
            }
        }
        let yf = mat_mul(&owner, &target.entries().to_vec(), &f);
        let fx = mat_mul(&owner, &f, &source.entries().to_vec());
        for i in 0..target.len() {
            for j in 0..source.len() {
                if yf[i][j] != fx[i][j] {
                    return Err(PerfError::NotChainMap(i, j));
                }
            }
        }
        Ok(FiltMorphism { source, target, f })
    }

    pub fn identity(m: &DgFiltModule) -> Self {
        let owner = m.owner();
        let f = (0..m.len())
            .map(|i| (0..m.len()).map(|j| if i == j { owner.idempotent(m.summands()[i].label).to_vec() } else { owner.zero() }).collect())
            .collect();
        FiltMorphism { source: m.clone(), target: m.clone(), f }
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &FiltMorphism) -> Result<FiltMorphism, PerfError> {
        if self.target != other.source {
            return Err(PerfError::OwnerMismatch);
        }
        let f = mat_mul(self.source.owner(), &other.f, &self.f);
        Ok(FiltMorphism { source: self.source.clone(), target: other.target.clone(), f })
    }

    /// Checks `self - other = y h + h x` for a degree `-1` matrix `h`.
    pub fn check_homotopy(&self, other: &FiltMorphism, h: &EntryMatrix) -> Result<(), PerfError> {
        let owner = self.source.owner();
        let lhs = mat_combine(&self.f, &Q::one().neg(), &other.f);
        let rhs = mat_combine(
            &mat_mul(owner, &self.target.entries().to_vec(), h),
            &Q::one(),
            &mat_mul(owner, h, &self.source.entries().to_vec()),
        );
        for i in 0..lhs.len() {
            for j in 0..lhs[i].len() {
                if lhs[i][j] != rhs[i][j] {
                    return Err(PerfError::NotHomotopy(i, j));
                }
            }
        }
        Ok(())
    }

    pub fn is_null_homotopic(&self) -> Result<bool, PerfError> {
        let h = filt_hom_complex(&self.source, &self.target)?;
        h.is_coboundary(&self.f, 0).ok_or_else(|| PerfError::Internal("morphism not in Hom^0".into()))
    }
}

/// `cone(f) = N ⊕ {1}M` with `x' = [[y, f], [0, -x]]`, stably re-sorted.
pub fn cone(f: &FiltMorphism) -> Result<DgFiltModule, PerfError> {
    let owner: Arc<PerfAlgebra> = f.source.owner().clone();
    let (n, m) = (&f.target, &f.source);
    let size = n.len() + m.len();
    let mut summands: Vec<Summand> = n.summands().to_vec();
    summands.extend(m.summands().iter().map(|s| Summand { shift: s.shift + 1, label: s.label }));
    let mut x = vec![vec![owner.zero(); size]; size];
    for i in 0..n.len() {
        for j in 0..n.len() {
            x[i][j] = n.entry(i, j).to_vec();
        }
        for j in 0..m.len() {
            x[i][n.len() + j] = f.f[i][j].clone();
        }
    }
    for i in 0..m.len() {
        for j in 0..m.len() {
            x[n.len() + i][n.len() + j] = m.entry(i, j).iter().map(Q::neg).collect();
        }
    }
    let (summands, x, _) = sort_by_shift(summands, x);
    DgFiltModule::new(owner, summands, x)
}
