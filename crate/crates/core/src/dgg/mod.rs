//! Bigraded dg algebras: purity, Γ-truncation and the weighted sub-algebra,
//! with machine-checked formality quasi-isomorphisms.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::exactla::{Field, Matrix, Span, Q};
use crate::grdalg::{
    Bideg, Complex, DgAlgebra, DgBimodule, DgModule, DgaMorphism, GrdError, Grading, ModuleMap, QisoReport,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DggError {
    #[error("cohomology is not pure of weight {weight}: nonzero at {at}")]
    Impure { weight: i32, at: Bideg },
    #[error("block ({alpha}, {beta}) is not pure of weight {weight}: nonzero at {at}")]
    ImpureBlock { alpha: String, beta: String, weight: i32, at: Bideg },
    #[error("projection to cohomology is not a dga morphism: {0}")]
    Projection(String),
    #[error("not a quasi-isomorphism: {0}")]
    NotQuasiIso(String),
    #[error("weights: {0}")]
    Weights(String),
    #[error(transparent)]
    Grd(#[from] GrdError),
}

/// Evidence that an object is supported on the line `j = i + weight`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PurityCertificate {
    pub weight: i32,
    pub table: BTreeMap<Bideg, usize>,
}

/// Purity of a dimension table; the error carries the first offending bidegree.
pub fn check_pure(table: &BTreeMap<Bideg, usize>, weight: i32) -> Result<PurityCertificate, Bideg> {
    match table.iter().find(|(g, &n)| n > 0 && g.j != g.i + weight) {
        Some((g, _)) => Err(*g),
        None => Ok(PurityCertificate { weight, table: table.clone() }),
    }
}

/// Dimension table of a graded object itself.
pub fn dims_table(c: &Complex<Bideg>) -> BTreeMap<Bideg, usize> {
    c.basis.degrees().map(|g| (g, c.basis.dim_in(g))).filter(|(_, n)| *n > 0).collect()
}

/// Per-bidegree subspaces of Γ: everything above the diagonal, cycles on it.
pub fn gamma_spaces(c: &Complex<Bideg>) -> BTreeMap<Bideg, Vec<Vec<Q>>> {
    let mut out = BTreeMap::new();
    for g in c.basis.degrees() {
        let vs: Vec<Vec<Q>> = if g.i < g.j {
            c.basis.indices(g).iter().map(|&k| unit_vec(c.dim(), k)).collect()
        } else if g.i == g.j {
            c.d_matrix(g).kernel_basis().columns().iter().map(|z| c.basis.embed(z, g)).collect()
        } else {
            Vec::new()
        };
        if !vs.is_empty() {
            out.insert(g, vs);
        }
    }
    out
}

fn unit_vec(n: usize, k: usize) -> Vec<Q> {
    let mut v = vec![Q::zero(); n];
    v[k] = Q::one();
    v
}

/// `Γ(R)` with its inclusion into `R`.
pub fn gamma(r: &Arc<DgAlgebra<Bideg>>) -> Result<(Arc<DgAlgebra<Bideg>>, DgaMorphism<Bideg>), DggError> {
    Ok(r.subalgebra(&gamma_spaces(r.complex()))?)
}

/// `Γ(M)` as a module over `Γ(R)`; `incl` is the inclusion `Γ(R) -> R`.
pub fn gamma_module(
    m: &DgModule<Bideg>,
    incl: &DgaMorphism<Bideg>,
) -> Result<(DgModule<Bideg>, ModuleMap<Bideg>), DggError> {
    let restricted = m.restrict(incl)?;
    Ok(restricted.submodule(&gamma_spaces(m.complex()))?)
}

/// `Γ(M)` as a `Γ(A)`-`Γ(B)`-bimodule, given the inclusions of `Γ(A)` and `Γ(B)`.
pub fn gamma_bimodule(
    m: &DgBimodule<Bideg>,
    left_incl: &DgaMorphism<Bideg>,
    right_incl: &DgaMorphism<Bideg>,
) -> Result<(DgBimodule<Bideg>, ModuleMap<Bideg>), DggError> {
    let restricted = m.restrict(left_incl, right_incl)?;
    Ok(restricted.sub_bimodule(&gamma_spaces(m.complex()))?)
}

/// Output of [`formality_witness`] and [`weighted_sub_witness`]:
/// `R ↩ S ↠ H(R)` with both maps verified.
#[derive(Clone, Debug)]
pub struct FormalityWitness {
    pub sub: Arc<DgAlgebra<Bideg>>,
    pub inclusion: DgaMorphism<Bideg>,
    pub cohomology: Arc<DgAlgebra<Bideg>>,
    pub projection: DgaMorphism<Bideg>,
    pub inclusion_report: QisoReport<Bideg>,
    pub projection_report: QisoReport<Bideg>,
    /// Dimensions of `H(R)` per bidegree.
    pub cohomology_table: BTreeMap<Bideg, usize>,
}

impl FormalityWitness {
    pub fn passed(&self) -> bool {
        self.inclusion_report.is_qiso() && self.projection_report.is_qiso()
    }
}

/// `Γ(R) ↪ R` and `Γ(R) ↠ H(R)` for `R` with cohomology pure of weight 0.
pub fn formality_witness(r: &Arc<DgAlgebra<Bideg>>) -> Result<FormalityWitness, DggError> {
    let (h_alg, h) = r.cohomology_algebra();
    let table = h.dims();
    if let Err(at) = check_pure(&table, 0) {
        return Err(DggError::Impure { weight: 0, at });
    }
    let (sub, inclusion) = gamma(r)?;
    finish_witness(r, sub, inclusion, Arc::new(h_alg), &h, table, |v, g| (g.i == g.j).then(|| v.to_vec()))
}

/// Weighted version: idempotents `e_α` of `r` with weights `n_α`; every block
/// `H(e_α R e_β)` must be pure of weight `n_α - n_β`.
pub fn weighted_sub_witness(r: &Arc<DgAlgebra<Bideg>>, weights: &[i32]) -> Result<FormalityWitness, DggError> {
    let idem = r.idempotents();
    if idem.len() != weights.len() {
        return Err(DggError::Weights(format!("{} idempotents but {} weights", idem.len(), weights.len())));
    }
    let (h_alg, h) = r.cohomology_algebra();
    let table = h.dims();
    let h_idem = h_alg.idempotents();
    for (a, ea) in h_idem.iter().enumerate() {
        for (b, eb) in h_idem.iter().enumerate() {
            let w = weights[a] - weights[b];
            let block: BTreeMap<Bideg, usize> = h_alg
                .basis()
                .degrees()
                .map(|g| (g, h_alg.slice_dim(&ea.coords, g, &eb.coords)))
                .filter(|(_, n)| *n > 0)
                .collect();
            if let Err(at) = check_pure(&block, w) {
                return Err(DggError::ImpureBlock { alpha: ea.label.clone(), beta: eb.label.clone(), weight: w, at });
            }
        }
    }
    let mut spaces: BTreeMap<Bideg, Vec<Vec<Q>>> = BTreeMap::new();
    let mut cycle_blocks: Vec<(Bideg, Vec<Q>)> = Vec::new();
    for g in r.basis().degrees() {
        for (a, ea) in idem.iter().enumerate() {
            for (b, eb) in idem.iter().enumerate() {
                let threshold = g.i + weights[a] - weights[b];
                if threshold > g.j {
                    continue;
                }
                let slice = r.slice_basis(&ea.coords, g, &eb.coords);
                if slice.is_empty() {
                    continue;
                }
                let vs = if threshold < g.j {
                    slice
                } else {
                    let images: Vec<Vec<Q>> = slice.iter().map(|v| r.d_of(v)).collect();
                    let ker = Matrix::from_columns(r.dim(), &images).kernel_basis().columns();
                    let cycles: Vec<Vec<Q>> = ker
                        .iter()
                        .map(|c| {
                            let mut v = vec![Q::zero(); r.dim()];
                            for (coef, s) in c.iter().zip(&slice) {
                                crate::exactla::axpy(&mut v, coef, s);
                            }
                            v
                        })
                        .collect();
                    cycle_blocks.extend(cycles.iter().map(|v| (g, v.clone())));
                    cycles
                };
                spaces.entry(g).or_default().extend(vs);
            }
        }
    }
    let (sub, inclusion) = r.subalgebra(&spaces)?;
    let mut on_threshold: BTreeMap<Bideg, Span<Q>> = BTreeMap::new();
    for (g, v) in cycle_blocks {
        on_threshold.entry(g).or_insert_with(|| Span::empty(r.dim())).try_push(v);
    }
    // a vector of S projects through its threshold-block component
    finish_witness(r, sub, inclusion, Arc::new(h_alg), &h, table, |v, g| threshold_part(r, v, g, &on_threshold))
}

fn finish_witness(
    r: &Arc<DgAlgebra<Bideg>>,
    sub: Arc<DgAlgebra<Bideg>>,
    inclusion: DgaMorphism<Bideg>,
    h_alg: Arc<DgAlgebra<Bideg>>,
    h: &crate::grdalg::Cohomology<Bideg>,
    table: BTreeMap<Bideg, usize>,
    part: impl Fn(&[Q], Bideg) -> Option<Vec<Q>>,
) -> Result<FormalityWitness, DggError> {
    let mut cols = Vec::with_capacity(sub.dim());
    for k in 0..sub.dim() {
        let g = sub.basis().deg(k);
        let v = inclusion.apply(&sub.basis_vec(k));
        let mut out = vec![Q::zero(); h_alg.dim()];
        if let Some(p) = part(&v, g) {
            let c = h.class_in(r.basis(), &p, g).ok_or_else(|| DggError::Projection("non-cycle".into()))?;
            for (coef, &i) in c.into_iter().zip(h_alg.basis().indices(g)) {
                out[i] = coef;
            }
        }
        cols.push(out);
    }
    let projection = DgaMorphism::new(sub.clone(), h_alg.clone(), Matrix::from_columns(h_alg.dim(), &cols))
        .map_err(|e| DggError::Projection(e.to_string()))?;
    let inclusion_report = inclusion.quasi_iso_report();
    let projection_report = projection.quasi_iso_report();
    Ok(FormalityWitness {
        sub,
        inclusion,
        cohomology: h_alg,
        projection,
        inclusion_report,
        projection_report,
        cohomology_table: table,
    })
}

/// Component of `v` in the threshold cycles, using the block decomposition
/// `v = Σ e_α v e_β`.
fn threshold_part(
    r: &DgAlgebra<Bideg>,
    v: &[Q],
    g: Bideg,
    on_threshold: &BTreeMap<Bideg, Span<Q>>,
) -> Option<Vec<Q>> {
    let span = on_threshold.get(&g)?;
    let mut acc = vec![Q::zero(); r.dim()];
    let idem = r.idempotents();
    for ea in idem {
        for eb in idem {
            let block = r.mul(&r.mul(&ea.coords, v), &eb.coords);
            if span.contains(&block) {
                for (x, y) in acc.iter_mut().zip(&block) {
                    *x = &*x + y;
                }
            }
        }
    }
    Some(acc)
}

/// Output of [`multiplication_quasi_isos`].
#[derive(Clone, Debug)]
pub struct MultiplicationWitness {
    /// `w = f(1)`, full coordinates in `M`.
    pub w: Vec<Q>,
    pub plain: QisoReport<Bideg>,
    pub gamma: QisoReport<Bideg>,
    pub cohomology: QisoReport<Bideg>,
}

impl MultiplicationWitness {
    pub fn passed(&self) -> bool {
        self.plain.is_qiso() && self.gamma.is_qiso() && self.cohomology.is_qiso()
    }
}

/// For a quasi-isomorphism `f: B -> M` of right dgg modules, checks that left
/// multiplication by `w = f(1)` is a quasi-isomorphism `B -> M`,
/// `Γ(B) -> Γ(M)` and (by `[w]`) `H(B) -> H(M)`.
pub fn multiplication_quasi_isos(
    b: &Arc<DgAlgebra<Bideg>>,
    m: &DgModule<Bideg>,
    f: &ModuleMap<Bideg>,
) -> Result<MultiplicationWitness, DggError> {
    let free = DgModule::free(b.clone());
    f.check_linear(&free, m)?;
    f.check_chain(&free, m)?;
    if f.degree != Bideg::zero() {
        return Err(DggError::NotQuasiIso("f must have bidegree (0,0)".into()));
    }
    let report = f.quasi_iso_report(&free, m);
    if let Some(row) = report.first_failure() {
        return Err(DggError::NotQuasiIso(format!("f fails in bidegree {}", row.degree)));
    }
    let w = f.apply(b.unit_vec());
    if w.iter().any(|c| !c.is_zero()) && m.basis().homogeneous_degree(&w) != Some(Bideg::zero()) {
        return Err(GrdError::NotCocycle("f(1)".into()).into());
    }

    let times_w = |src: &DgModule<Bideg>, tgt: &DgModule<Bideg>, w: &[Q], embed: &dyn Fn(usize) -> Vec<Q>| {
        let cols: Vec<Vec<Q>> = (0..src.dim()).map(|x| tgt.act_vec(w, &embed(x))).collect();
        ModuleMap { degree: Bideg::zero(), matrix: Matrix::from_columns(tgt.dim(), &cols) }
    };

    let plain_map = times_w(&free, m, &w, &|x| b.basis_vec(x));
    let plain = plain_map.quasi_iso_report(&free, m);

    let (gb, incl) = gamma(b)?;
    let gfree = DgModule::free(gb.clone());
    let (gm, gm_incl) = gamma_module(m, &incl)?;
    let w_in_gm = gm_incl
        .matrix
        .solve(&Matrix::from_columns(m.dim(), std::slice::from_ref(&w)))
        .map_err(|e| DggError::Grd(GrdError::Validation(e.to_string())))?
        .ok_or_else(|| DggError::Grd(GrdError::NotClosed("f(1) lies outside Γ(M)".into())))?
        .column(0);
    let gamma_map = times_w(&gfree, &gm, &w_in_gm, &|x| gb.basis_vec(x));
    let gamma_report = gamma_map.quasi_iso_report(&gfree, &gm);

    let (hb, hb_coh) = b.cohomology_algebra();
    let hb = Arc::new(hb);
    let (hm, hm_coh) = m.cohomology_module(hb.clone(), &hb_coh);
    let class_w = hm_coh
        .class_in(m.basis(), &w, Bideg::zero())
        .ok_or_else(|| DggError::Grd(GrdError::NotCocycle("f(1)".into())))?;
    let mut w_h = vec![Q::zero(); hm.dim()];
    for (c, &i) in class_w.into_iter().zip(hm.basis().indices(Bideg::zero())) {
        w_h[i] = c;
    }
    let hfree = DgModule::free(hb.clone());
    let h_map = times_w(&hfree, &hm, &w_h, &|x| hb.basis_vec(x));
    let cohomology = h_map.quasi_iso_report(&hfree, &hm);

    Ok(MultiplicationWitness { w, plain, gamma: gamma_report, cohomology })
}
