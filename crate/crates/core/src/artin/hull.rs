use super::ext::{ext1_dim, lift_through, universal_extension};
use super::module::{unit, QuiverMap, QuiverModule};
use super::ArtinError;
use crate::exactla::{Matrix, Q};

/// Bound on universal-extension steps; reaching it indicates a bug, since each
/// step strictly shrinks a finite invariant.
pub const HULL_ITERATION_CAP: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HullStep {
    pub step: usize,
    pub vertex: String,
    pub ext_dim: usize,
    /// Dimension vector of the module after the step.
    pub dims: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct Hull {
    pub module: QuiverModule,
    /// Surjection onto the input module.
    pub epi: QuiverMap,
    pub trace: Vec<HullStep>,
}

/// Generators of the top, one vector per summand `P_x` of the projective cover.
pub(crate) fn top_generators(m: &QuiverModule) -> Vec<(usize, Vec<Q>)> {
    let mut out = Vec::new();
    for x in 0..m.dims().len() {
        let mut span = m.radical_at(x);
        for i in 0..m.dim_at(x) {
            let v = unit(m.dim_at(x), i);
            if span.try_push(v.clone()) {
                out.push((x, v));
            }
        }
    }
    out
}

/// The map `⊕ P_x -> M` sending the generators to the given vectors.
pub(crate) fn cover_map(m: &QuiverModule, gens: &[(usize, Vec<Q>)]) -> Result<QuiverMap, ArtinError> {
    let parts: Vec<QuiverMap> = gens.iter().map(|(x, g)| QuiverMap::from_projective(*x, m, g)).collect();
    if parts.is_empty() {
        return Ok(QuiverMap::zero(&QuiverModule::zero(m.algebra().clone()), m));
    }
    let sum = QuiverModule::direct_sum(&parts.iter().map(|p| &p.source).collect::<Vec<_>>())?;
    let comps = (0..m.dims().len())
        .map(|y| {
            let cols: Vec<Vec<Q>> = parts.iter().flat_map(|p| p.comps[y].columns()).collect();
            Matrix::from_columns(m.dim_at(y), &cols)
        })
        .collect();
    QuiverMap::new(sum, m.clone(), comps)
}

/// Projective cover `⊕ P_x ↠ M` built from lifts of a basis of the top.
pub fn projective_cover(m: &QuiverModule) -> Result<QuiverMap, ArtinError> {
    let f = cover_map(m, &top_generators(m))?;
    if !f.is_surjective() {
        return Err(ArtinError::Map("top generators do not generate".into()));
    }
    Ok(f)
}

/// Iterated universal extensions by simples until `Ext^1(-, L_x)` vanishes
/// for every vertex; the result is projective and surjects onto `a`.
pub fn projective_hull(a: &QuiverModule) -> Result<Hull, ArtinError> {
    let alg = a.algebra().clone();
    let nv = alg.vertices().len();
    let cover = projective_cover(a)?;
    let mut lifted = cover.clone();
    let mut epi = QuiverMap::identity(a);
    let mut trace = Vec::new();
    for step in 0..HULL_ITERATION_CAP {
        let current = epi.source.clone();
        let mut next = None;
        for x in 0..nv {
            if ext1_dim(&current, &QuiverModule::simple(alg.clone(), x))? > 0 {
                next = Some(x);
                break;
            }
        }
        let Some(x) = next else {
            if !epi.is_surjective() {
                return Err(ArtinError::Extension("hull map is not surjective".into()));
            }
            return Ok(Hull { module: current, epi, trace });
        };
        let ue = universal_extension(&current, x)?;
        let c = ue.class.surjection.clone();
        lifted = lift_through(&lifted, &c)?
            .ok_or_else(|| ArtinError::Extension("projective cover does not lift".into()))?;
        if !lifted.is_surjective() {
            return Err(ArtinError::Extension(format!("lift of the cover is not surjective at step {step}")));
        }
        epi = c.then(&epi)?;
        trace.push(HullStep { step, vertex: alg.vertices()[x].clone(), ext_dim: ue.e, dims: epi.source.dims().to_vec() });
    }
    Err(ArtinError::HullCap(HULL_ITERATION_CAP))
}

/// `0 <- a <- Q_0 <- Q_1 <- ... <- Q_n <- 0`, `differentials[k]: Q_{k+1} -> Q_k`.
#[derive(Clone, Debug)]
pub struct Resolution {
    pub source: QuiverModule,
    pub modules: Vec<QuiverModule>,
    pub differentials: Vec<QuiverMap>,
    pub augmentation: QuiverMap,
    pub hulls: Vec<Vec<HullStep>>,
}

impl Resolution {
    pub fn length(&self) -> usize {
        self.modules.len() - 1
    }

    /// Exactness by ranks at every spot.
    pub fn is_exact(&self) -> bool {
        if !self.augmentation.is_surjective() {
            return false;
        }
        let ranks: Vec<usize> = std::iter::once(&self.augmentation).chain(&self.differentials).map(QuiverMap::rank).collect();
        (0..self.modules.len()).all(|k| {
            let incoming = ranks.get(k + 1).copied().unwrap_or(0);
            incoming + ranks[k] == self.modules[k].total_dim()
        }) && std::iter::once(&self.augmentation)
            .chain(&self.differentials)
            .zip(&self.differentials)
            .all(|(d, e)| e.then(d).is_ok_and(|c| c.is_zero()))
    }
}

/// Projective resolution by hulls of successive kernels; errors past `cap` terms.
pub fn projective_resolution(a: &QuiverModule, cap: usize) -> Result<Resolution, ArtinError> {
    let h0 = projective_hull(a)?;
    let mut modules = vec![h0.module.clone()];
    let mut hulls = vec![h0.trace.clone()];
    let mut differentials = Vec::new();
    let (mut kernel, mut inc) = h0.epi.kernel();
    while !kernel.is_zero() {
        if modules.len() > cap {
            return Err(ArtinError::ResolutionCap(cap));
        }
        let h = projective_hull(&kernel)?;
        let d = h.epi.then(&inc)?;
        (kernel, inc) = h.epi.kernel();
        modules.push(h.module);
        hulls.push(h.trace);
        differentials.push(d);
    }
    let res = Resolution { source: a.clone(), modules, differentials, augmentation: h0.epi, hulls };
    if !res.is_exact() {
        return Err(ArtinError::Map("resolution is not exact".into()));
    }
    Ok(res)
}
