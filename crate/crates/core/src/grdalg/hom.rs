use std::collections::BTreeMap;

use super::algebra::{DgAlgebra, Idempotent};
use super::complex::{Complex, GradedBasis};
use super::module::DgModule;
use super::{sign, to_sparse, GrdError, Grading, SparseVec};
use crate::exactla::{Field, Matrix, Span, Q};

/// The complex `Hom_A(M, N)` with an explicit basis of homogeneous maps.
#[derive(Clone, Debug)]
pub struct HomComplex<G> {
    pub complex: Complex<G>,
    /// Map (target dim x source dim) for each basis element.
    pub maps: Vec<Matrix<Q>>,
    spans: BTreeMap<G, Span<Q>>,
}

fn flatten(m: &Matrix<Q>) -> Vec<Q> {
    (0..m.rows()).flat_map(|i| m.row(i).to_vec()).collect()
}

impl<G: Grading> HomComplex<G> {
    pub fn dim_in(&self, g: G) -> usize {
        self.complex.basis.dim_in(g)
    }

    /// Coordinates of a homogeneous degree-`g` map in the basis of `Hom^g`.
    pub fn coords(&self, f: &Matrix<Q>, g: G) -> Option<Vec<Q>> {
        match self.spans.get(&g) {
            Some(span) => span.coords(&flatten(f)),
            None => f.is_zero().then(Vec::new),
        }
    }

    /// Full coordinate vector of a homogeneous map.
    pub fn full_coords(&self, f: &Matrix<Q>, g: G) -> Option<Vec<Q>> {
        let local = self.coords(f, g)?;
        Some(self.complex.basis.embed(&local, g))
    }
}

/// Graded `A`-linear maps `f` with `f(m a) = f(m) a`, differential
/// `D f = d∘f - (-1)^n f∘d`.
pub fn hom_complex<G: Grading>(m: &DgModule<G>, n: &DgModule<G>) -> Result<HomComplex<G>, GrdError> {
    if *m.owner() != *n.owner() {
        return Err(GrdError::OwnerMismatch);
    }
    let a = m.owner();
    let mut degrees: Vec<G> = Vec::new();
    for gm in m.basis().degrees() {
        for gn in n.basis().degrees() {
            degrees.push(gn.sub(gm));
        }
    }
    degrees.sort();
    degrees.dedup();

    let mut basis = GradedBasis::new(Vec::new());
    let mut maps = Vec::new();
    let mut spans = BTreeMap::new();
    for &g in &degrees {
        let unknowns: Vec<(usize, usize)> = (0..m.dim())
            .flat_map(|s| n.basis().indices(m.basis().deg(s).add(g)).iter().map(move |&t| (t, s)))
            .collect();
        if unknowns.is_empty() {
            continue;
        }
        let k = unknowns.len();
        let mut constraints = Span::empty(k);
        for s in 0..m.dim() {
            for x in 0..a.dim() {
                // f(s·x) - f(s)·x, coefficient of each target basis vector
                let mut rows = vec![vec![Q::zero(); k]; n.dim()];
                for (u, &(t, src)) in unknowns.iter().enumerate() {
                    for (sx, c) in m.act_basis(s, x) {
                        if *sx == src {
                            rows[t][u] = &rows[t][u] + c;
                        }
                    }
                    if src == s {
                        for (tx, c) in n.act_basis(t, x) {
                            rows[*tx][u] = &rows[*tx][u] - c;
                        }
                    }
                }
                for r in rows {
                    if r.iter().any(|c| !c.is_zero()) {
                        constraints.try_push(r);
                    }
                }
            }
        }
        let cmat = if constraints.dim() == 0 {
            Matrix::zeros(0, k)
        } else {
            Matrix::from_rows(constraints.basis().to_vec()).expect("equal row lengths")
        };
        let kernel = cmat.kernel_basis().columns();
        let mut span = Span::empty(n.dim() * m.dim());
        for (j, v) in kernel.iter().enumerate() {
            let mut f = Matrix::zeros(n.dim(), m.dim());
            for (u, &(t, s)) in unknowns.iter().enumerate() {
                f[(t, s)] = v[u].clone();
            }
            span.try_push(flatten(&f));
            basis.push(format!("f{g}:{j}"), g);
            maps.push(f);
        }
        if !kernel.is_empty() {
            spans.insert(g, span);
        }
    }

    let dm = crate::grdalg::complex::sparse_columns_matrix(m.dim(), &m.complex().d);
    let dn = crate::grdalg::complex::sparse_columns_matrix(n.dim(), &n.complex().d);
    let mut hc = HomComplex { complex: Complex::new(basis.clone(), vec![Vec::new(); maps.len()], None), maps, spans };
    let mut d: Vec<SparseVec> = Vec::with_capacity(hc.maps.len());
    for (i, f) in hc.maps.iter().enumerate() {
        let g = basis.deg(i);
        let s = sign(g.cohom());
        let df = dn.mul(f).expect("shapes").sub(&f.mul(&dm).expect("shapes").scale(&s)).expect("shapes");
        let c = hc.full_coords(&df, g.add(G::step())).ok_or_else(|| {
            GrdError::Validation(format!("differential of Hom basis element {i} leaves the Hom complex"))
        })?;
        d.push(to_sparse(&c));
    }
    hc.complex = Complex::new(basis, d, None);
    Ok(hc)
}

/// `End_A(M)` as a dg algebra under composition (`f · g = f ∘ g`), with the
/// given projectors as idempotents (identity alone if none are supplied).
pub fn end_dg_algebra<G: Grading>(
    m: &DgModule<G>,
    projectors: &[(String, Matrix<Q>)],
) -> Result<(DgAlgebra<G>, HomComplex<G>), GrdError> {
    let hc = hom_complex(m, m)?;
    let b = &hc.complex.basis;
    let nb = b.dim();
    let mut mult = vec![vec![Vec::new(); nb]; nb];
    for i in 0..nb {
        for j in 0..nb {
            let comp = hc.maps[i].mul(&hc.maps[j]).expect("square maps");
            if comp.is_zero() {
                continue;
            }
            let g = b.deg(i).add(b.deg(j));
            let c = hc.full_coords(&comp, g).ok_or_else(|| GrdError::NotClosed("composition".into()))?;
            mult[i][j] = to_sparse(&c);
        }
    }
    let unit = hc
        .full_coords(&Matrix::identity(m.dim()), G::zero())
        .ok_or_else(|| GrdError::Unit("identity is not A-linear".into()))?;
    let idempotents = if projectors.is_empty() {
        vec![Idempotent { label: "id".into(), coords: unit.clone() }]
    } else {
        projectors
            .iter()
            .map(|(l, p)| {
                hc.full_coords(p, G::zero())
                    .map(|coords| Idempotent { label: l.clone(), coords })
                    .ok_or_else(|| GrdError::Idempotent(format!("projector {l} is not a degree-0 endomorphism")))
            })
            .collect::<Result<Vec<_>, _>>()?
    };
    let alg = DgAlgebra::from_parts(b.clone(), mult, hc.complex.d.clone(), unit, idempotents, None)?;
    Ok((alg, hc))
}
