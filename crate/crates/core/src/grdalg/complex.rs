use std::collections::BTreeMap;

use super::{to_dense, Grading, SparseVec};
use crate::exactla::{Field, Matrix, Span, Q};

/// A finite basis with a degree attached to every element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedBasis<G> {
    labels: Vec<String>,
    degs: Vec<G>,
    by_degree: BTreeMap<G, Vec<usize>>,
    local: Vec<usize>,
}

impl<G: Grading> GradedBasis<G> {
    pub fn new(entries: Vec<(String, G)>) -> Self {
        let mut b = GradedBasis {
            labels: Vec::new(),
            degs: Vec::new(),
            by_degree: BTreeMap::new(),
            local: Vec::new(),
        };
        for (l, g) in entries {
            b.push(l, g);
        }
        b
    }

    pub fn push(&mut self, label: String, deg: G) -> usize {
        let idx = self.labels.len();
        let slot = self.by_degree.entry(deg).or_default();
        self.local.push(slot.len());
        slot.push(idx);
        self.labels.push(label);
        self.degs.push(deg);
        idx
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn deg(&self, i: usize) -> G {
        self.degs[i]
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Basis indices of degree `g`, in basis order.
    pub fn indices(&self, g: G) -> &[usize] {
        self.by_degree.get(&g).map_or(&[], Vec::as_slice)
    }

    pub fn dim_in(&self, g: G) -> usize {
        self.indices(g).len()
    }

    pub fn degrees(&self) -> impl Iterator<Item = G> + '_ {
        self.by_degree.keys().copied()
    }

    /// Position of basis element `i` inside its degree.
    pub fn local_index(&self, i: usize) -> usize {
        self.local[i]
    }

    /// Restriction of a full coordinate vector to degree `g`.
    pub fn local(&self, v: &[Q], g: G) -> Vec<Q> {
        self.indices(g).iter().map(|&i| v[i].clone()).collect()
    }

    pub fn embed(&self, local: &[Q], g: G) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.dim()];
        for (c, &i) in local.iter().zip(self.indices(g)) {
            out[i] = c.clone();
        }
        out
    }

    /// Degree of a nonzero vector if it is homogeneous.
    pub fn homogeneous_degree(&self, v: &[Q]) -> Option<G> {
        let mut deg = None;
        for (i, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            match deg {
                None => deg = Some(self.degs[i]),
                Some(g) if g != self.degs[i] => return None,
                _ => {}
            }
        }
        deg
    }
}

/// Graded vector space with a differential of degree [`Grading::step`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complex<G> {
    pub basis: GradedBasis<G>,
    pub d: Vec<SparseVec>,
    /// Cohomology is certified only in cohomological degrees `<=` this bound.
    pub window: Option<i32>,
}

impl<G: Grading> Complex<G> {
    pub fn new(basis: GradedBasis<G>, d: Vec<SparseVec>, window: Option<i32>) -> Self {
        assert_eq!(basis.dim(), d.len(), "differential length mismatch");
        Complex { basis, d, window }
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Matrix of `d: C^g -> C^{g+step}` in local coordinates.
    pub fn d_matrix(&self, g: G) -> Matrix<Q> {
        let src = self.basis.indices(g);
        let tgt_deg = g.add(G::step());
        let mut m = Matrix::zeros(self.basis.dim_in(tgt_deg), src.len());
        for (col, &i) in src.iter().enumerate() {
            for (j, c) in &self.d[i] {
                debug_assert_eq!(self.basis.deg(*j), tgt_deg);
                m[(self.basis.local_index(*j), col)] = c.clone();
            }
        }
        m
    }

    pub fn apply_d(&self, v: &[Q]) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.dim()];
        for (i, c) in v.iter().enumerate() {
            super::add_scaled(&mut out, c, &self.d[i]);
        }
        out
    }

    pub fn d_is_zero(&self) -> bool {
        self.d.iter().all(Vec::is_empty)
    }

    pub fn cohomology(&self) -> Cohomology<G> {
        let mut degrees = BTreeMap::new();
        for g in self.basis.degrees() {
            let n = self.basis.dim_in(g);
            let cycles = self.d_matrix(g).kernel_basis().columns();
            let prev = g.sub(G::step());
            let incoming = self.d_matrix(prev);
            let boundary_span = Span::new(n, &incoming.columns());
            let boundaries = boundary_span.basis().to_vec();
            let mut span = boundary_span;
            let mut reps = Vec::new();
            for z in &cycles {
                if span.try_push(z.clone()) {
                    reps.push(z.clone());
                }
            }
            degrees.insert(g, DegreeCohomology { degree: g, cycles, boundaries, reps, span });
        }
        Cohomology { degrees, window: self.window }
    }
}

/// Cohomology of a complex in one degree, with chosen representatives.
#[derive(Clone, Debug)]
pub struct DegreeCohomology<G> {
    pub degree: G,
    /// Basis of the cycles, local coordinates.
    pub cycles: Vec<Vec<Q>>,
    /// Basis of the boundaries, local coordinates.
    pub boundaries: Vec<Vec<Q>>,
    /// Cycles whose classes form a basis of H, local coordinates.
    pub reps: Vec<Vec<Q>>,
    span: Span<Q>,
}

impl<G: Grading> DegreeCohomology<G> {
    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    /// Coordinates of the class of a local cycle in the representative basis;
    /// `None` if the vector is not a cycle.
    pub fn class_of(&self, local: &[Q]) -> Option<Vec<Q>> {
        let c = self.span.coords(local)?;
        Some(c[self.boundaries.len()..].to_vec())
    }

    pub fn is_boundary(&self, local: &[Q]) -> bool {
        self.class_of(local).is_some_and(|c| c.iter().all(Q::is_zero))
    }
}

#[derive(Clone, Debug)]
pub struct Cohomology<G> {
    pub degrees: BTreeMap<G, DegreeCohomology<G>>,
    pub window: Option<i32>,
}

impl<G: Grading> Cohomology<G> {
    pub fn dim(&self, g: G) -> usize {
        self.degrees.get(&g).map_or(0, DegreeCohomology::dim)
    }

    pub fn get(&self, g: G) -> Option<&DegreeCohomology<G>> {
        self.degrees.get(&g)
    }

    /// Nonzero dimensions by degree.
    pub fn dims(&self) -> BTreeMap<G, usize> {
        self.degrees.iter().filter(|(_, h)| h.dim() > 0).map(|(g, h)| (*g, h.dim())).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.degrees.values().map(DegreeCohomology::dim).sum()
    }

    /// Full-coordinate representatives in degree order, matching the basis
    /// of [`super::DgAlgebra::cohomology_algebra`].
    pub fn representatives(&self, basis: &GradedBasis<G>) -> Vec<(G, Vec<Q>)> {
        let mut out = Vec::new();
        for (g, dh) in &self.degrees {
            for r in &dh.reps {
                out.push((*g, basis.embed(r, *g)));
            }
        }
        out
    }

    /// Class of a homogeneous cycle of degree `g` (full coordinates) in the
    /// representative basis of that degree.
    pub fn class_in(&self, basis: &GradedBasis<G>, v: &[Q], g: G) -> Option<Vec<Q>> {
        match self.degrees.get(&g) {
            Some(dh) => dh.class_of(&basis.local(v, g)),
            None => v.iter().all(Q::is_zero).then(Vec::new),
        }
    }

    pub fn certified(&self, g: G) -> bool {
        self.window.is_none_or(|w| g.cohom() <= w)
    }

    /// Report on the map induced in cohomology by a chain map of degree `shift`
    /// given as a full matrix (target dim x source dim).
    pub fn map_report(
        &self,
        src: &GradedBasis<G>,
        target: &Cohomology<G>,
        tgt: &GradedBasis<G>,
        matrix: &Matrix<Q>,
        shift: G,
    ) -> QisoReport<G> {
        let mut rows = Vec::new();
        let mut degrees: Vec<G> = self.degrees.keys().copied().collect();
        for g in target.degrees.keys() {
            degrees.push(g.sub(shift));
        }
        degrees.sort();
        degrees.dedup();
        for g in degrees {
            let ds = self.dim(g);
            let tg = g.add(shift);
            let dt = target.dim(tg);
            if ds == 0 && dt == 0 {
                continue;
            }
            let rank = if ds == 0 || dt == 0 {
                0
            } else {
                let h_src = &self.degrees[&g];
                let h_tgt = &target.degrees[&tg];
                let images: Vec<Vec<Q>> = h_src
                    .reps
                    .iter()
                    .map(|r| {
                        let full = src.embed(r, g);
                        let img = matrix.mul_vec(&full);
                        h_tgt
                            .class_of(&tgt.local(&img, tg))
                            .expect("chain map sends cycles to cycles")
                    })
                    .collect();
                Matrix::from_columns(dt, &images).rank()
            };
            rows.push(QisoRow { degree: g, dim_source: ds, dim_target: dt, rank });
        }
        let window = match (self.window, target.window) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        QisoReport { rows, inconclusive_beyond: window }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QisoRow<G> {
    pub degree: G,
    pub dim_source: usize,
    pub dim_target: usize,
    pub rank: usize,
}

impl<G> QisoRow<G> {
    pub fn is_iso(&self) -> bool {
        self.dim_source == self.rank && self.dim_target == self.rank
    }
}

/// Per-degree comparison of cohomology along a map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QisoReport<G> {
    pub rows: Vec<QisoRow<G>>,
    /// Degrees above this bound are outside the certified window and excluded
    /// from the verdict.
    pub inconclusive_beyond: Option<i32>,
}

impl<G: Grading> QisoReport<G> {
    pub fn in_window(&self, g: G) -> bool {
        self.inconclusive_beyond.is_none_or(|w| g.cohom() <= w)
    }

    pub fn is_qiso(&self) -> bool {
        self.first_failure().is_none()
    }

    pub fn first_failure(&self) -> Option<&QisoRow<G>> {
        self.rows.iter().find(|r| self.in_window(r.degree) && !r.is_iso())
    }
}

/// Full matrix (target dim x source dim) of a linear map given by sparse images.
pub(crate) fn sparse_columns_matrix(rows: usize, cols: &[SparseVec]) -> Matrix<Q> {
    let dense: Vec<Vec<Q>> = cols.iter().map(|c| to_dense(c, rows)).collect();
    Matrix::from_columns(rows, &dense)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn acyclic_pair_has_no_cohomology() {
        let basis = GradedBasis::new(vec![("x".into(), 0), ("y".into(), 1), ("z".into(), 1)]);
        let c = Complex::new(basis, vec![vec![(1, Q::one())], vec![], vec![]], None);
        let h = c.cohomology();
        assert_eq!(h.dim(0), 0);
        assert_eq!(h.dim(1), 1);
        assert!(h.get(1).unwrap().is_boundary(&[Q::one(), Q::zero()]));
    }
}
