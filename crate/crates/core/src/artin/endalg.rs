use std::collections::HashMap;

use super::hull::{cover_map, top_generators, Resolution};
use super::module::{unit, QuiverMap, QuiverModule};
use super::ArtinError;
use crate::exactla::{Field, Q};
use crate::grdalg::{sign, to_sparse, Bideg, Cohomology, DgAlgebra, GradedBasis, Grading, Idempotent};

/// One indecomposable projective summand `P_x` of a resolution term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Summand {
    pub member: usize,
    /// Cohomological position: `-k` for a summand of `Q_k`.
    pub position: i32,
    pub vertex: usize,
    pub label: String,
}

/// `End(⊕_α P(α))` for projective resolutions `P(α)` of a family of modules,
/// with basis `(S, T, q)`: the map `P_{x_S} -> P_{y_T}`, `e ↦ g_T q`.
#[derive(Clone, Debug)]
pub struct ResolutionEnd {
    pub algebra: DgAlgebra<i32>,
    pub members: Vec<String>,
    pub summands: Vec<Summand>,
    /// `(source summand, target summand, path basis index)` per basis element.
    pub elements: Vec<(usize, usize, usize)>,
    /// Path length of each basis element.
    pub path_lengths: Vec<usize>,
}

/// Splits a projective module into `⊕ P_x`, returning the vertices and the
/// isomorphism from the sum.
fn decompose_projective(q: &QuiverModule) -> Result<(Vec<usize>, QuiverMap), ArtinError> {
    let gens = top_generators(q);
    let phi = cover_map(q, &gens)?;
    if !phi.is_iso() {
        return Err(ArtinError::NotProjective(format!("dimension vector {:?}", q.dims())));
    }
    Ok((gens.into_iter().map(|(x, _)| x).collect(), phi))
}

pub fn resolution_end_dg_algebra(family: &[(String, Resolution)]) -> Result<ResolutionEnd, ArtinError> {
    let Some((_, first)) = family.first() else {
        return Err(ArtinError::Module("empty family".into()));
    };
    let alg = first.source.algebra().clone();
    let mut summands = Vec::new();
    // (summand, target summand, coefficient vector in A) for each differential component
    let mut delta: Vec<(usize, usize, Vec<Q>)> = Vec::new();
    for (member, (label, res)) in family.iter().enumerate() {
        if res.source.algebra() != &alg {
            return Err(ArtinError::AlgebraMismatch);
        }
        let mut layers: Vec<(Vec<usize>, QuiverMap, usize)> = Vec::new();
        for (k, q) in res.modules.iter().enumerate() {
            let (verts, phi) = decompose_projective(q)?;
            let start = summands.len();
            for (j, &x) in verts.iter().enumerate() {
                summands.push(Summand { member, position: -(k as i32), vertex: x, label: format!("{label}{k}.{j}") });
            }
            layers.push((verts, phi, start));
        }
        for k in 1..layers.len() {
            let (verts, phi, start) = &layers[k];
            let (tverts, tphi, tstart) = &layers[k - 1];
            let d = &res.differentials[k - 1];
            for (j, &x) in verts.iter().enumerate() {
                // generator of this summand inside Q_k, then its image in Q_{k-1}
                let g = phi.comps[x].mul_vec(&generator_coords(&alg, verts, j, x));
                let img = d.comps[x].mul_vec(&g);
                let coords = tphi.comps[x]
                    .solve(&crate::exactla::Matrix::from_columns(img.len(), &[img]))
                    .map_err(|e| ArtinError::Map(e.to_string()))?
                    .ok_or_else(|| ArtinError::Map("differential leaves the resolution".into()))?
                    .column(0);
                let mut at = 0;
                for (t, &y) in tverts.iter().enumerate() {
                    let paths = alg.paths_between(y, x);
                    let mut elem = vec![Q::zero(); alg.dim()];
                    for &p in &paths {
                        elem[p] = coords[at].clone();
                        at += 1;
                    }
                    if elem.iter().any(|c| !c.is_zero()) {
                        delta.push((start + j, tstart + t, elem));
                    }
                }
            }
        }
    }

    let mut basis = GradedBasis::new(Vec::new());
    let mut elements = Vec::new();
    let mut path_lengths = Vec::new();
    let mut index: HashMap<(usize, usize, usize), usize> = HashMap::new();
    for (s, ss) in summands.iter().enumerate() {
        for (t, ts) in summands.iter().enumerate() {
            for p in alg.paths_between(ts.vertex, ss.vertex) {
                let i = basis.push(format!("{}>{}:{}", ss.label, ts.label, alg.label(p)), ts.position - ss.position);
                index.insert((s, t, p), i);
                elements.push((s, t, p));
                path_lengths.push(alg.basis()[p].len());
            }
        }
    }
    let n = elements.len();
    let mut mult = vec![vec![Vec::new(); n]; n];
    for (a, &(t1, u, q1)) in elements.iter().enumerate() {
        for (b, &(s, t2, q2)) in elements.iter().enumerate() {
            if t1 != t2 {
                continue;
            }
            let mut out = vec![Q::zero(); n];
            for (p, c) in alg.mul_basis(q1, q2) {
                out[index[&(s, u, *p)]] = c.clone();
            }
            mult[a][b] = to_sparse(&out);
        }
    }
    let embed = |s: usize, t: usize, elem: &[Q], out: &mut Vec<Q>| {
        for (p, c) in elem.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            out[index[&(s, t, p)]] = c.clone();
        }
    };
    let mut delta_vec = vec![Q::zero(); n];
    for (s, t, elem) in &delta {
        embed(*s, *t, elem, &mut delta_vec);
    }
    let mul = |x: &[Q], y: &[Q]| -> Vec<Q> {
        let mut out = vec![Q::zero(); n];
        for (a, ca) in x.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            for (b, cb) in y.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                let s = ca.mul(cb);
                for (k, c) in &mult[a][b] {
                    out[*k] = out[*k].add(&s.mul(c));
                }
            }
        }
        out
    };
    let d: Vec<_> = (0..n)
        .map(|i| {
            let e = unit(n, i);
            let left = mul(&delta_vec, &e);
            let right = mul(&e, &delta_vec);
            let s = sign(basis.deg(i).cohom());
            to_sparse(&left.iter().zip(&right).map(|(l, r)| l.sub(&s.mul(r))).collect::<Vec<_>>())
        })
        .collect();
    let ids = |pred: &dyn Fn(&Summand) -> bool| -> Vec<Q> {
        let mut out = vec![Q::zero(); n];
        for (s, ss) in summands.iter().enumerate().filter(|(_, ss)| pred(ss)) {
            out[index[&(s, s, alg.vertex_element(ss.vertex))]] = Q::one();
        }
        out
    };
    let unit_vec = ids(&|_| true);
    let idempotents = family
        .iter()
        .enumerate()
        .map(|(m, (l, _))| Idempotent { label: l.clone(), coords: ids(&|s: &Summand| s.member == m) })
        .collect();
    let algebra = DgAlgebra::from_parts(basis, mult, d, unit_vec, idempotents, None)?;
    Ok(ResolutionEnd {
        algebra,
        members: family.iter().map(|(l, _)| l.clone()).collect(),
        summands,
        elements,
        path_lengths,
    })
}

/// Coordinates in `⊕_j P_{x_j}` at vertex `x` of the generator of summand `j`.
fn generator_coords(alg: &super::QuiverAlgebra, verts: &[usize], j: usize, x: usize) -> Vec<Q> {
    let mut out = Vec::new();
    for (t, &y) in verts.iter().enumerate() {
        for p in alg.paths_between(y, x) {
            out.push(if t == j && p == alg.vertex_element(x) { Q::one() } else { Q::zero() });
        }
    }
    out
}

/// The cohomology algebra of the endomorphism algebra, i.e. the Ext algebra
/// of the family, with one idempotent per member.
pub fn ext_algebra(end: &ResolutionEnd) -> (DgAlgebra<i32>, Cohomology<i32>) {
    end.algebra.cohomology_algebra()
}

/// Second degrees for the basis of `End`: `j = i - len(q) + n_T - n_S`.
pub fn end_bigrading(end: &ResolutionEnd, weights: &[i32]) -> Vec<i32> {
    end.elements
        .iter()
        .zip(&end.path_lengths)
        .enumerate()
        .map(|(k, (&(s, t, _), &len))| {
            let i = end.algebra.basis().deg(k);
            i - len as i32 + weights[end.summands[t].member] - weights[end.summands[s].member]
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BigradingRule {
    /// One second degree per basis element.
    Explicit(Vec<i32>),
    /// `j = i`.
    Diagonal,
    /// `j = i + n_l - n_r` for a basis element in `e_l A e_r`; requires every
    /// basis element to lie in a single idempotent block.
    Weights(Vec<i32>),
}

/// Attaches a second grading; fails unless products, `d`, unit and
/// idempotents are homogeneous for it.
pub fn attach_bigrading(alg: &DgAlgebra<i32>, rule: &BigradingRule) -> Result<DgAlgebra<Bideg>, ArtinError> {
    let n = alg.dim();
    let js: Vec<i32> = match rule {
        BigradingRule::Explicit(js) => {
            if js.len() != n {
                return Err(ArtinError::Bigrading(format!("{} degrees for {n} basis elements", js.len())));
            }
            js.clone()
        }
        BigradingRule::Diagonal => (0..n).map(|k| alg.basis().deg(k)).collect(),
        BigradingRule::Weights(w) => {
            let idem = alg.idempotents();
            if idem.len() != w.len() {
                return Err(ArtinError::Bigrading(format!("{} idempotents but {} weights", idem.len(), w.len())));
            }
            (0..n)
                .map(|k| {
                    let b = alg.basis_vec(k);
                    for (l, el) in idem.iter().enumerate() {
                        for (r, er) in idem.iter().enumerate() {
                            if alg.mul(&alg.mul(&el.coords, &b), &er.coords) == b {
                                return Ok(alg.basis().deg(k) + w[l] - w[r]);
                            }
                        }
                    }
                    Err(ArtinError::Bigrading(format!("{} is not in a single block", alg.basis().label(k))))
                })
                .collect::<Result<_, _>>()?
        }
    };
    let basis = GradedBasis::new(
        (0..n).map(|k| (alg.basis().label(k).to_string(), Bideg::new(alg.basis().deg(k), js[k]))).collect(),
    );
    let mult = (0..n).map(|a| (0..n).map(|b| alg.mul_basis(a, b).clone()).collect()).collect();
    let out = DgAlgebra::from_parts(
        basis,
        mult,
        alg.complex().d.clone(),
        alg.unit_vec().to_vec(),
        alg.idempotents().to_vec(),
        alg.truncation(),
    )?;
    Ok(out)
}
