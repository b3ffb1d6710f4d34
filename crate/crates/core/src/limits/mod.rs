//! Towers `A_0 <- A_1 <- ...` of positively graded algebras with zero
//! differential, their inverse limit through a window, and Hom in the limit
//! of the perfect derived categories.

use std::sync::{Arc, OnceLock};

use crate::exactla::{Field, Matrix, Q};
use crate::exec::Exec;
use crate::grdalg::{AlgebraBuilder, DgAlgebra, DgaMorphism, GrdError};
use crate::lift::{agreement_degree, Agreement, LiftError, Segment};
use crate::perf::{filt_hom_complex, DgFiltModule, FiltMorphism, PerfAlgebra, PerfError};
use crate::samples;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LimitError {
    #[error("stage {stage} is not a positively graded algebra with zero differential: {reason}")]
    Stage { stage: usize, reason: String },
    #[error("base stage: {0}")]
    Base(String),
    #[error("connecting map {map}: {reason}")]
    Connecting { map: usize, reason: String },
    #[error("tower shape: {0}")]
    Shape(String),
    #[error("supplied stages cannot certify agreement degree {needed}")]
    Uncertifiable { needed: i32 },
    #[error("stage {0} does not exist")]
    NoStage(usize),
    #[error("object is not generated inside the segment at stage {0}")]
    OutsideSegment(usize),
    #[error("window {window} is too small, need {needed}")]
    Window { window: i32, needed: i32 },
    #[error("stage {stage} and {other} disagree: {what}")]
    Inconsistent { stage: usize, other: usize, what: String },
    #[error("witness at stage {0} is not an isomorphism")]
    Witness(usize),
    #[error(transparent)]
    Perf(#[from] PerfError),
    #[error(transparent)]
    Lift(#[from] LiftError),
    #[error(transparent)]
    Grd(#[from] GrdError),
}

/// Stages `A_n` and maps `φ_n: A_{n+1} -> A_n`.
#[derive(Debug)]
pub struct AlgebraTower {
    stages: Vec<Arc<DgAlgebra<i32>>>,
    maps: Vec<DgaMorphism<i32>>,
    agreements: Vec<Agreement>,
    perf: Vec<OnceLock<Result<Arc<PerfAlgebra>, PerfError>>>,
}

impl AlgebraTower {
    pub fn new(stages: Vec<Arc<DgAlgebra<i32>>>, maps: Vec<DgaMorphism<i32>>) -> Result<Self, LimitError> {
        if stages.is_empty() || maps.len() + 1 != stages.len() {
            return Err(LimitError::Shape(format!("{} stages but {} maps", stages.len(), maps.len())));
        }
        for (n, phi) in maps.iter().enumerate() {
            if *phi.source != *stages[n + 1] || *phi.target != *stages[n] {
                return Err(LimitError::Shape(format!("map {n} does not go from stage {} to stage {n}", n + 1)));
            }
        }
        let agreements = maps.iter().map(agreement_degree).collect();
        let perf = stages.iter().map(|_| OnceLock::new()).collect();
        Ok(AlgebraTower { stages, maps, agreements, perf })
    }

    /// `A_n = Q[c]/(c^{n+1})`, `deg c = 2`, for `n = 0..=top`; `r_n = 2n + 1`.
    pub fn eqpt(top: usize) -> Self {
        let stages: Vec<Arc<DgAlgebra<i32>>> = (0..=top).map(|n| Arc::new(samples::poly_trunc(n as i32))).collect();
        let maps = (0..top).map(|n| samples::poly_projection(stages[n + 1].clone(), stages[n].clone())).collect();
        AlgebraTower::new(stages, maps).expect("eqpt tower is well formed")
    }

    /// `top + 1` copies of `a` joined by identities.
    pub fn constant(a: Arc<DgAlgebra<i32>>, top: usize) -> Self {
        let stages = vec![a.clone(); top + 1];
        let maps = (0..top).map(|_| DgaMorphism::identity(a.clone())).collect();
        AlgebraTower::new(stages, maps).expect("constant tower is well formed")
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    pub fn stage(&self, n: usize) -> &Arc<DgAlgebra<i32>> {
        &self.stages[n]
    }

    pub fn map(&self, n: usize) -> &DgaMorphism<i32> {
        &self.maps[n]
    }

    pub fn agreements(&self) -> &[Agreement] {
        &self.agreements
    }

    pub fn perf_stage(&self, n: usize) -> Result<Arc<PerfAlgebra>, LimitError> {
        let cell = self.perf.get(n).ok_or(LimitError::NoStage(n))?;
        Ok(cell.get_or_init(|| PerfAlgebra::new(self.stages[n].clone()).map(Arc::new)).clone()?)
    }

    /// The composite `A_from -> A_to` for `to <= from`.
    pub fn composite(&self, from: usize, to: usize) -> Result<DgaMorphism<i32>, LimitError> {
        if from >= self.len() || to > from {
            return Err(LimitError::NoStage(from));
        }
        let mut f = DgaMorphism::identity(self.stages[from].clone());
        for n in (to..from).rev() {
            f = f.then(&self.maps[n])?;
        }
        Ok(f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerReport {
    pub agreements: Vec<Agreement>,
    /// Highest agreement degree certified by the supplied maps.
    pub window: i32,
}

pub fn validate_tower(t: &AlgebraTower) -> Result<TowerReport, LimitError> {
    for (n, a) in t.stages.iter().enumerate() {
        if let Some(i) = (0..a.dim()).find(|&i| a.basis().deg(i) < 0) {
            return Err(LimitError::Stage { stage: n, reason: format!("{} has negative degree", a.basis().label(i)) });
        }
        if !a.d_is_zero() {
            return Err(LimitError::Stage { stage: n, reason: "nonzero differential".into() });
        }
    }
    t.stages[0].check_positive().map_err(|e| LimitError::Base(e.to_string()))?;
    let mut prev = 0;
    for (n, ag) in t.agreements.iter().enumerate() {
        if ag.refused {
            return Err(LimitError::Connecting { map: n, reason: "not an isomorphism in degree 0".into() });
        }
        if ag.r < prev {
            return Err(LimitError::Connecting { map: n, reason: format!("r_{n} = {} decreases", ag.r) });
        }
        prev = ag.r;
    }
    Ok(TowerReport { agreements: t.agreements.clone(), window: t.agreements.last().map_or(0, |a| a.r) })
}

/// Least `n` such that every supplied `r_m` with `m >= n` is at least `needed`.
fn least_stage(t: &AlgebraTower, needed: i32) -> Result<usize, LimitError> {
    let mut n = t.agreements.len();
    while n > 0 && t.agreements[n - 1].r >= needed {
        n -= 1;
    }
    if n == t.agreements.len() {
        return Err(LimitError::Uncertifiable { needed });
    }
    Ok(n)
}

/// `N_I`: from this stage on, `pr_N` is an equivalence on `dgPer^I`.
pub fn stabilization_stage(t: &AlgebraTower, seg: Segment) -> Result<usize, LimitError> {
    validate_tower(t)?;
    least_stage(t, seg.len() + 2)
}

/// The algebra `A` cut to degrees `<= d`, with truncation `d`.
pub fn truncate(a: &DgAlgebra<i32>, d: i32) -> Result<(DgAlgebra<i32>, Vec<usize>), GrdError> {
    let keep: Vec<usize> = (0..a.dim()).filter(|&i| a.basis().deg(i) <= d).collect();
    let mut index = vec![usize::MAX; a.dim()];
    let mut bl = AlgebraBuilder::new();
    for &i in &keep {
        index[i] = bl.basis(a.basis().label(i), a.basis().deg(i));
    }
    let restrict = |v: &[(usize, Q)]| -> Vec<(usize, Q)> {
        v.iter().filter(|(k, _)| index[*k] != usize::MAX).map(|(k, c)| (index[*k], c.clone())).collect()
    };
    let sparse = |v: &[Q]| -> Vec<(usize, Q)> {
        v.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(k, c)| (k, c.clone())).collect()
    };
    for &i in &keep {
        for &j in &keep {
            if a.basis().deg(i) + a.basis().deg(j) <= d {
                bl.product(index[i], index[j], restrict(a.mul_basis(i, j)));
            }
        }
        bl.differential(index[i], restrict(&a.complex().d[i]));
    }
    bl.unit(restrict(&sparse(a.unit_vec())));
    for e in a.idempotents() {
        bl.idempotent(e.label.clone(), restrict(&sparse(&e.coords)));
    }
    bl.truncation(d);
    Ok((bl.build()?, keep))
}

/// `A_∞` through degree `window`, with projections `ν_n` to every stage.
#[derive(Clone, Debug)]
pub struct LimitAlgebra {
    pub algebra: Arc<DgAlgebra<i32>>,
    pub window: i32,
    /// Stage the components were read from.
    pub stage: usize,
    pub projections: Vec<DgaMorphism<i32>>,
    /// Agreement degree of each `ν_n`.
    pub agreements: Vec<Agreement>,
    perf: Arc<PerfAlgebra>,
}

impl LimitAlgebra {
    pub fn perf(&self) -> &Arc<PerfAlgebra> {
        &self.perf
    }
}

pub fn limit_algebra(t: &AlgebraTower, window: i32) -> Result<LimitAlgebra, LimitError> {
    validate_tower(t)?;
    let n0 = least_stage(t, window)?;
    let (alg, keep) = truncate(&t.stages[n0], window)?;
    let alg = Arc::new(alg);
    // ν_{n0} is the inclusion of the kept basis
    let embed = |target: &DgAlgebra<i32>| {
        let mut m = Matrix::zeros(target.dim(), keep.len());
        for (c, &i) in keep.iter().enumerate() {
            m[(i, c)] = Q::one();
        }
        m
    };
    let nu0 = DgaMorphism::new(alg.clone(), t.stages[n0].clone(), embed(&t.stages[n0]))?;
    let mut projections = Vec::with_capacity(t.len());
    for n in 0..t.len() {
        let nu = if n <= n0 {
            nu0.then(&t.composite(n0, n)?)?
        } else {
            // invert A_n -> A_{n0} through the window
            let down = t.composite(n, n0)?;
            let mut m = Matrix::zeros(t.stages[n].dim(), alg.dim());
            for g in 0..=window {
                let comp = down.component(g);
                let inv = comp.inverse().ok_or_else(|| LimitError::Inconsistent {
                    stage: n,
                    other: n0,
                    what: format!("degree {g} is not isomorphic"),
                })?;
                let rows = t.stages[n].basis().indices(g);
                let cols: Vec<usize> = t.stages[n0].basis().indices(g).iter().map(|&i| keep.iter().position(|&k| k == i).expect("kept")).collect();
                for (r, &ri) in rows.iter().enumerate() {
                    for (c, &ci) in cols.iter().enumerate() {
                        m[(ri, ci)] = inv[(r, c)].clone();
                    }
                }
            }
            DgaMorphism::new(alg.clone(), t.stages[n].clone(), m).map_err(|e| LimitError::Inconsistent {
                stage: n,
                other: n0,
                what: e.to_string(),
            })?
        };
        projections.push(nu);
    }
    for n in 0..t.len().saturating_sub(1) {
        let via = projections[n + 1].then(&t.maps[n])?;
        if via.matrix != projections[n].matrix {
            return Err(LimitError::Inconsistent { stage: n, other: n + 1, what: "ν_n != φ_n ∘ ν_{n+1}".into() });
        }
    }
    let agreements = projections.iter().map(agreement_degree).collect();
    let perf = Arc::new(PerfAlgebra::new(alg.clone())?);
    Ok(LimitAlgebra { algebra: alg, window, stage: n0, projections, agreements, perf })
}

/// Extension of scalars from stage `from` down to stage `to`, one map at a time.
pub fn transport_object(m: &DgFiltModule, t: &AlgebraTower, from: usize, to: usize) -> Result<DgFiltModule, LimitError> {
    if to > from || from >= t.len() {
        return Err(LimitError::NoStage(to));
    }
    if **m.owner() != *t.perf_stage(from)? {
        return Err(PerfError::OwnerMismatch.into());
    }
    let mut cur = m.clone();
    for n in (to..from).rev() {
        cur = cur.extend_scalars(t.perf_stage(n)?, &t.maps[n])?;
    }
    Ok(cur)
}

/// Stagewise modules with isomorphisms `w_n: φ_n^*(M_{n+1}) -> M_n`.
#[derive(Clone, Debug)]
pub struct LimitObject {
    pub modules: Vec<DgFiltModule>,
    pub witnesses: Vec<(FiltMorphism, FiltMorphism)>,
}

impl LimitObject {
    pub fn new(
        t: &AlgebraTower,
        modules: Vec<DgFiltModule>,
        witnesses: Vec<(FiltMorphism, FiltMorphism)>,
    ) -> Result<Self, LimitError> {
        if modules.len() != t.len() || witnesses.len() + 1 != modules.len() {
            return Err(LimitError::Shape("one module per stage, one witness per map".into()));
        }
        for (n, (w, inv)) in witnesses.iter().enumerate() {
            let pushed = modules[n + 1].extend_scalars(t.perf_stage(n)?, &t.maps[n])?;
            if w.source != pushed || w.target != modules[n] || inv.source != modules[n] || inv.target != pushed {
                return Err(LimitError::Witness(n));
            }
            let there = w.then(inv)?;
            let back = inv.then(w)?;
            if there.f != FiltMorphism::identity(&pushed).f || back.f != FiltMorphism::identity(&modules[n]).f {
                return Err(LimitError::Witness(n));
            }
        }
        Ok(LimitObject { modules, witnesses })
    }

    fn with_identities(t: &AlgebraTower, modules: Vec<DgFiltModule>) -> Result<Self, LimitError> {
        let witnesses = (0..modules.len().saturating_sub(1))
            .map(|n| (FiltMorphism::identity(&modules[n]), FiltMorphism::identity(&modules[n])))
            .collect();
        LimitObject::new(t, modules, witnesses)
    }

    /// Pulls a module over `A_∞` to every stage along `ν_n`.
    pub fn from_limit(m: &DgFiltModule, t: &AlgebraTower, lim: &LimitAlgebra) -> Result<Self, LimitError> {
        let needed = m.summands().iter().flat_map(|a| m.summands().iter().map(move |b| a.shift + 2 - b.shift)).max().unwrap_or(0);
        if needed > lim.window {
            return Err(LimitError::Window { window: lim.window, needed });
        }
        let modules = (0..t.len())
            .map(|n| Ok(m.extend_scalars(t.perf_stage(n)?, &lim.projections[n])?))
            .collect::<Result<Vec<_>, LimitError>>()?;
        LimitObject::with_identities(t, modules)
    }

    /// Cone taken stagewise, for stagewise morphisms compatible with the
    /// identity witnesses.
    pub fn cone(t: &AlgebraTower, maps: &[FiltMorphism]) -> Result<Self, LimitError> {
        let modules = maps.iter().map(|f| Ok(crate::perf::cone(f)?)).collect::<Result<Vec<_>, LimitError>>()?;
        LimitObject::with_identities(t, modules)
    }

    pub fn shift(&self, t: &AlgebraTower, n: i32) -> Result<Self, LimitError> {
        LimitObject::with_identities(t, self.modules.iter().map(|m| m.shift(n)).collect())
    }
}

/// One shift of a limit Hom table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimHomRow {
    pub shift: i32,
    /// Stage `N` of the segment spanned by `x` and `{k} y`, when supplied.
    pub stage: Option<usize>,
    pub dim: Option<usize>,
    pub cross_checked: bool,
}

fn generation_range(m: &DgFiltModule) -> Option<(i32, i32)> {
    let degs: Vec<i32> = m.summands().iter().map(|s| -s.shift).collect();
    Some((*degs.iter().min()?, *degs.iter().max()?))
}

/// `dim Hom(x, {k} y)` in the limit category: computed at the stabilization
/// stage of the segment spanned by `x` and `{k} y`, and recomputed one stage
/// higher when available.
pub fn lim_hom(
    x: &LimitObject,
    y: &LimitObject,
    t: &AlgebraTower,
    seg: Segment,
    shifts: std::ops::RangeInclusive<i32>,
) -> Result<Vec<LimHomRow>, LimitError> {
    validate_tower(t)?;
    for (n, (a, b)) in x.modules.iter().zip(&y.modules).enumerate() {
        for m in [a, b] {
            if m.summands().iter().any(|s| !seg.contains(-s.shift)) {
                return Err(LimitError::OutsideSegment(n));
            }
        }
    }
    let mut rows = Vec::new();
    for k in shifts {
        let hull = [generation_range(&x.modules[0]), generation_range(&y.modules[0]).map(|(a, b)| (a - k, b - k))];
        let present: Vec<(i32, i32)> = hull.iter().flatten().copied().collect();
        if present.len() < 2 {
            rows.push(LimHomRow { shift: k, stage: None, dim: Some(0), cross_checked: true });
            continue;
        }
        let lo = present.iter().map(|p| p.0).min().expect("nonempty");
        let hi = present.iter().map(|p| p.1).max().expect("nonempty");
        let Ok(n) = least_stage(t, hi - lo + 2) else {
            rows.push(LimHomRow { shift: k, stage: None, dim: None, cross_checked: false });
            continue;
        };
        let at = |s: usize| -> Result<Option<usize>, LimitError> {
            Ok(filt_hom_complex(&x.modules[s], &y.modules[s])?.hom_dim(k))
        };
        let dim = at(n)?;
        let mut cross_checked = false;
        if n + 1 < t.len() {
            let again = at(n + 1)?;
            if again != dim {
                return Err(LimitError::Inconsistent {
                    stage: n,
                    other: n + 1,
                    what: format!("Hom in shift {k}: {dim:?} vs {again:?}"),
                });
            }
            cross_checked = true;
        }
        rows.push(LimHomRow { shift: k, stage: Some(n), dim, cross_checked });
    }
    Ok(rows)
}

/// Hom over `A_∞` against the limit Hom of the stagewise images.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitRow {
    pub source: usize,
    pub target: usize,
    pub shift: i32,
    pub dim_limit_algebra: usize,
    pub dim_limit_category: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitReport {
    pub window: i32,
    pub rows: Vec<LimitRow>,
}

impl LimitReport {
    pub fn passed(&self) -> bool {
        self.first_failure().is_none()
    }

    pub fn first_failure(&self) -> Option<&LimitRow> {
        self.rows.iter().find(|r| r.dim_limit_algebra != r.dim_limit_category)
    }
}

pub fn limit_equivalence_report(
    t: &AlgebraTower,
    seg: Segment,
    lim: &LimitAlgebra,
    probes: &[DgFiltModule],
    exec: Exec,
) -> Result<LimitReport, LimitError> {
    if lim.window < seg.len() + 2 {
        return Err(LimitError::Window { window: lim.window, needed: seg.len() + 2 });
    }
    for p in probes {
        if p.summands().iter().any(|s| !seg.contains(-s.shift)) {
            return Err(LimitError::OutsideSegment(lim.stage));
        }
    }
    let objects = probes.iter().map(|p| LimitObject::from_limit(p, t, lim)).collect::<Result<Vec<_>, _>>()?;
    let pairs: Vec<(usize, usize)> = (0..probes.len()).flat_map(|p| (0..probes.len()).map(move |q| (p, q))).collect();
    let results = exec.map(&pairs, |&(p, q)| -> Result<Vec<LimitRow>, LimitError> {
        let h = filt_hom_complex(&probes[p], &probes[q])?;
        let Some((lo, hi)) = h.degree_range() else {
            return Ok(Vec::new());
        };
        let table = lim_hom(&objects[p], &objects[q], t, seg, lo - 1..=hi + 1)?;
        let mut rows = Vec::new();
        for row in table {
            if let (Some(a), Some(b)) = (h.hom_dim(row.shift), row.dim) {
                rows.push(LimitRow { source: p, target: q, shift: row.shift, dim_limit_algebra: a, dim_limit_category: b });
            }
        }
        Ok(rows)
    });
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    Ok(LimitReport { window: lim.window, rows })
}

