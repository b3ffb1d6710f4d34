use std::collections::BTreeMap;

use super::bimodule::DgBimodule;
use super::complex::{GradedBasis, QisoReport};
use super::module::{DgModule, ModuleMap};
use super::morphism::DgaMorphism;
use super::{sign, GrdError, Grading, SparseVec};
use crate::exactla::{Field, Matrix, Span, Q};

/// `M ⊗_A B` along `phi: A -> B`, computed as the quotient of `M ⊗_k B` by
/// the relations `m x ⊗ b - m ⊗ phi(x) b`.
pub fn extend_scalars<G: Grading>(m: &DgModule<G>, phi: &DgaMorphism<G>) -> Result<DgModule<G>, GrdError> {
    if *phi.source != **m.owner() {
        return Err(GrdError::OwnerMismatch);
    }
    let a = &phi.source;
    let b = phi.target.clone();
    let (nm, nb) = (m.dim(), b.dim());
    let idx = |i: usize, j: usize| i * nb + j;
    let mut tensor = GradedBasis::new(Vec::new());
    for i in 0..nm {
        for j in 0..nb {
            tensor.push(format!("{}⊗{}", m.basis().label(i), b.basis().label(j)), m.basis().deg(i).add(b.basis().deg(j)));
        }
    }
    let total = nm * nb;

    let mut relations: BTreeMap<G, Span<Q>> = BTreeMap::new();
    for g in tensor.degrees() {
        relations.insert(g, Span::empty(tensor.dim_in(g)));
    }
    for i in 0..nm {
        for x in 0..a.dim() {
            let phix = phi.apply(&a.basis_vec(x));
            for j in 0..nb {
                let g = m.basis().deg(i).add(a.basis().deg(x)).add(b.basis().deg(j));
                let Some(span) = relations.get_mut(&g) else { continue };
                let mut rel = vec![Q::zero(); total];
                for (k, c) in m.act_basis(i, x) {
                    rel[idx(*k, j)] = &rel[idx(*k, j)] + c;
                }
                let pb = b.mul(&phix, &b.basis_vec(j));
                for (l, c) in pb.iter().enumerate() {
                    if !c.is_zero() {
                        rel[idx(i, l)] = &rel[idx(i, l)] - c;
                    }
                }
                let local = tensor.local(&rel, g);
                if local.iter().any(|c| !c.is_zero()) {
                    span.try_push(local);
                }
            }
        }
    }

    // complement of the relations, chosen among tensor basis vectors
    let mut out_basis = GradedBasis::new(Vec::new());
    let mut reps: Vec<(usize, usize)> = Vec::new();
    let mut quot: BTreeMap<G, (usize, Span<Q>, Vec<usize>)> = BTreeMap::new();
    for (g, rel) in relations {
        let nrel = rel.dim();
        let mut span = rel;
        let mut kept = Vec::new();
        for (loc, &t) in tensor.indices(g).iter().enumerate() {
            let mut e = vec![Q::zero(); tensor.dim_in(g)];
            e[loc] = Q::one();
            if span.try_push(e) {
                kept.push(out_basis.push(tensor.label(t).to_string(), g));
                reps.push((t / nb, t % nb));
            }
        }
        quot.insert(g, (nrel, span, kept));
    }
    let n_out = out_basis.dim();
    let reduce = |v: &[Q]| -> SparseVec {
        let mut out = Vec::new();
        for (g, (nrel, span, kept)) in &quot {
            let local = tensor.local(v, *g);
            if local.iter().all(Q::is_zero) {
                continue;
            }
            let c = span.coords(&local).expect("complement spans");
            for (coef, &k) in c[*nrel..].iter().zip(kept) {
                if !coef.is_zero() {
                    out.push((k, coef.clone()));
                }
            }
        }
        out.sort_by_key(|(k, _)| *k);
        out
    };

    let mut act = vec![vec![Vec::new(); nb]; n_out];
    let mut d = vec![Vec::new(); n_out];
    for (k, &(i, j)) in reps.iter().enumerate() {
        for (y, slot) in act[k].iter_mut().enumerate() {
            let mut v = vec![Q::zero(); total];
            for (l, c) in b.mul_basis(j, y) {
                v[idx(i, *l)] = c.clone();
            }
            *slot = reduce(&v);
        }
        let mut v = vec![Q::zero(); total];
        for (l, c) in &m.complex().d[i] {
            v[idx(*l, j)] = &v[idx(*l, j)] + c;
        }
        let s = sign(m.basis().deg(i).cohom());
        for (l, c) in &b.complex().d[j] {
            v[idx(i, *l)] = &v[idx(i, *l)] + &(&s * c);
        }
        d[k] = reduce(&v);
    }
    DgModule::from_parts(b, out_basis, act, d, None)
}

/// Input of [`bimodule_tensor_equivalence_witness`]: `N` is a `B`-`S`-bimodule,
/// `M` an `A`-`R`-bimodule, `chi: N -> M` a bimodule map over `(phi, psi)`.
pub struct BimoduleSetup<'a, G> {
    pub phi: &'a DgaMorphism<G>,
    pub psi: &'a DgaMorphism<G>,
    pub n_mod: &'a DgBimodule<G>,
    pub m_mod: &'a DgBimodule<G>,
    pub chi: &'a ModuleMap<G>,
    pub n: Vec<Q>,
}

#[derive(Clone, Debug)]
pub struct BimoduleWitness<G> {
    /// `S -> N`, `s ↦ n s`.
    pub f_report: QisoReport<G>,
    /// `R -> M`, `r ↦ chi(n) r`.
    pub g_report: QisoReport<G>,
    pub passed: bool,
    pub first_failure: Option<String>,
}

/// Checks that right multiplication by `n` and by `chi(n)` are quasi-isomorphisms.
pub fn bimodule_tensor_equivalence_witness<G: Grading>(
    setup: &BimoduleSetup<'_, G>,
) -> Result<BimoduleWitness<G>, GrdError> {
    let BimoduleSetup { phi, psi, n_mod, m_mod, chi, n } = setup;
    if *phi.source != **n_mod.left()
        || *phi.target != **m_mod.left()
        || *psi.source != **n_mod.right()
        || *psi.target != **m_mod.right()
    {
        return Err(GrdError::OwnerMismatch);
    }
    if n.len() != n_mod.dim() {
        return Err(GrdError::Validation("element has wrong length".into()));
    }
    let nz = n.iter().any(|c| !c.is_zero());
    if nz && n_mod.basis().homogeneous_degree(n) != Some(G::zero()) {
        return Err(GrdError::NotCocycle("n".into()));
    }
    if n_mod.d_of(n).iter().any(|c| !c.is_zero()) {
        return Err(GrdError::NotCocycle("n".into()));
    }
    check_bimodule_map(setup)?;

    let s_mod = DgModule::free(psi.source.clone());
    let r_mod = DgModule::free(psi.target.clone());
    let n_right = n_mod.as_right_module()?;
    let m_right = m_mod.as_right_module()?;
    let f = right_multiplication(&s_mod, &n_right, n, |v, s| n_mod.right_act_vec(v, s));
    let chin = chi.apply(n);
    let g = right_multiplication(&r_mod, &m_right, &chin, |v, r| m_mod.right_act_vec(v, r));
    let f_report = f.quasi_iso_report(&s_mod, &n_right);
    let g_report = g.quasi_iso_report(&r_mod, &m_right);
    let first_failure = f_report
        .first_failure()
        .map(|r| format!("s ↦ n s fails in degree {}", r.degree))
        .or_else(|| g_report.first_failure().map(|r| format!("r ↦ chi(n) r fails in degree {}", r.degree)));
    Ok(BimoduleWitness { passed: first_failure.is_none(), f_report, g_report, first_failure })
}

/// The module map `A -> M`, `a ↦ w a`.
pub(crate) fn right_multiplication<G: Grading>(
    free: &DgModule<G>,
    target: &DgModule<G>,
    w: &[Q],
    act: impl Fn(&[Q], &[Q]) -> Vec<Q>,
) -> ModuleMap<G> {
    let cols: Vec<Vec<Q>> = (0..free.dim()).map(|x| act(w, &free.basis_vec(x))).collect();
    ModuleMap { degree: G::zero(), matrix: Matrix::from_columns(target.dim(), &cols) }
}

fn check_bimodule_map<G: Grading>(setup: &BimoduleSetup<'_, G>) -> Result<(), GrdError> {
    let BimoduleSetup { phi, psi, n_mod, m_mod, chi, .. } = setup;
    if chi.matrix.rows() != m_mod.dim() || chi.matrix.cols() != n_mod.dim() || chi.degree != G::zero() {
        return Err(GrdError::Validation("chi has wrong shape or degree".into()));
    }
    for x in 0..n_mod.dim() {
        let ex = n_mod.basis_vec(x);
        let cx = chi.apply(&ex);
        if chi.apply(&n_mod.d_of(&ex)) != m_mod.d_of(&cx) {
            return Err(GrdError::Validation(format!("chi does not commute with d on {}", n_mod.basis().label(x))));
        }
        for b in 0..phi.source.dim() {
            let eb = phi.source.basis_vec(b);
            if chi.apply(&n_mod.left_act_vec(&eb, &ex)) != m_mod.left_act_vec(&phi.apply(&eb), &cx) {
                return Err(GrdError::Validation("chi is not left linear over phi".into()));
            }
        }
        for s in 0..psi.source.dim() {
            let es = psi.source.basis_vec(s);
            if chi.apply(&n_mod.right_act_vec(&ex, &es)) != m_mod.right_act_vec(&cx, &psi.apply(&es)) {
                return Err(GrdError::Validation("chi is not right linear over psi".into()));
            }
        }
    }
    Ok(())
}
