//! Segment equivalences `dgPer^I(A) ≃ dgPer^I(B)` along morphisms that are
//! isomorphisms through degree `|I| + 2`, by degreewise inversion.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::exactla::{Field, Matrix, Q};
use crate::exec::Exec;
use crate::grdalg::DgaMorphism;
use crate::perf::{filt_hom_complex, DgFiltModule, EntryMatrix, FiltMorphism, PerfAlgebra, PerfError, Summand};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LiftError {
    #[error("empty segment [{0}, {1}]")]
    EmptySegment(i32, i32),
    #[error("agreement degree {r} is below the required {needed}")]
    Refused { r: i32, needed: i32 },
    #[error("summand {0} is generated outside the segment")]
    OutsideSegment(usize),
    #[error("idempotent {0} is not sent to an idempotent")]
    Labels(String),
    #[error("internal consistency failure: no preimage for entry ({0},{1})")]
    NoPreimage(usize, usize),
    #[error("lift does not map back to the input")]
    RoundTrip,
    #[error(transparent)]
    Perf(#[from] PerfError),
}

/// A bounded nonempty interval `[a, b]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Segment {
    pub a: i32,
    pub b: i32,
}

impl Segment {
    pub fn new(a: i32, b: i32) -> Result<Self, LiftError> {
        if a > b {
            return Err(LiftError::EmptySegment(a, b));
        }
        Ok(Segment { a, b })
    }

    /// `|I| = b - a`.
    pub fn len(&self) -> i32 {
        self.b - self.a
    }

    pub fn contains(&self, i: i32) -> bool {
        self.a <= i && i <= self.b
    }
}

/// Largest `r` with `φ^i` invertible for all `i <= r`. `r = i32::MAX` when
/// both algebras are finite and `φ` is an isomorphism; `capped` when the
/// search stopped at a truncation window.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Agreement {
    pub r: i32,
    pub capped: bool,
    pub refused: bool,
}

pub fn agreement_degree(phi: &DgaMorphism<i32>) -> Agreement {
    let (s, t) = (&phi.source, &phi.target);
    let cap = match (s.truncation(), t.truncation()) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, y) => x.or(y),
    };
    let top = s.basis().degrees().chain(t.basis().degrees()).max().unwrap_or(0);
    let limit = cap.unwrap_or(top);
    for i in 0..=limit {
        let c = phi.component(i);
        if c.rows() != c.cols() || c.rank() != c.rows() {
            return Agreement { r: i - 1, capped: false, refused: i == 0 };
        }
    }
    match cap {
        Some(c) => Agreement { r: c, capped: true, refused: false },
        None => Agreement { r: i32::MAX, capped: false, refused: false },
    }
}

/// `φ: A -> B` with its agreement degree, inverse components and the
/// induced bijection of idempotent labels.
#[derive(Clone, Debug)]
pub struct TruncatedIso {
    pub phi: DgaMorphism<i32>,
    pub source: Arc<PerfAlgebra>,
    pub target: Arc<PerfAlgebra>,
    pub agreement: Agreement,
    inverses: BTreeMap<i32, Matrix<Q>>,
    /// Source label of each target label.
    back: Vec<usize>,
    forward: Vec<usize>,
}

impl TruncatedIso {
    pub fn new(phi: DgaMorphism<i32>) -> Result<Self, LiftError> {
        let source = Arc::new(PerfAlgebra::new(phi.source.clone())?);
        let target = Arc::new(PerfAlgebra::new(phi.target.clone())?);
        TruncatedIso::with_owners(phi, source, target)
    }

    pub fn with_owners(phi: DgaMorphism<i32>, source: Arc<PerfAlgebra>, target: Arc<PerfAlgebra>) -> Result<Self, LiftError> {
        if *phi.source != **source.algebra() || *phi.target != **target.algebra() {
            return Err(PerfError::OwnerMismatch.into());
        }
        let agreement = agreement_degree(&phi);
        let mut forward = Vec::with_capacity(source.label_count());
        for v in 0..source.label_count() {
            let img = phi.apply(source.idempotent(v));
            let w = (0..target.label_count())
                .find(|&w| target.idempotent(w) == img.as_slice())
                .ok_or_else(|| LiftError::Labels(source.label(v).into()))?;
            forward.push(w);
        }
        let mut back = vec![usize::MAX; target.label_count()];
        for (v, &w) in forward.iter().enumerate() {
            back[w] = v;
        }
        if back.contains(&usize::MAX) {
            return Err(LiftError::Labels("target labels not all hit".into()));
        }
        let mut inverses = BTreeMap::new();
        let top = source.top_degree().max(target.top_degree());
        for i in 0..=agreement.r.min(top) {
            let c = phi.component(i);
            if let Some(inv) = c.inverse() {
                inverses.insert(i, inv);
            }
        }
        Ok(TruncatedIso { phi, source, target, agreement, inverses, back, forward })
    }

    /// Refuses unless `r >= |I| + 2`.
    pub fn require(&self, seg: Segment) -> Result<(), LiftError> {
        let needed = seg.len() + 2;
        if self.agreement.refused || self.agreement.r < needed {
            return Err(LiftError::Refused { r: self.agreement.r, needed });
        }
        Ok(())
    }

    /// Unique preimage of a homogeneous degree-`deg` element, for `deg <= r`.
    pub fn preimage(&self, y: &[Q], deg: i32) -> Option<Vec<Q>> {
        if y.iter().all(Q::is_zero) {
            return Some(self.source.zero());
        }
        let tb = self.target.algebra().basis();
        let local = tb.local(y, deg);
        if tb.embed(&local, deg) != y {
            return None;
        }
        if deg < 0 {
            return None;
        }
        let inv = self.inverses.get(&deg)?;
        Some(self.source.algebra().basis().embed(&inv.mul_vec(&local), deg))
    }

    /// Extension of scalars `M ⊗_A B`, entrywise.
    pub fn push(&self, m: &DgFiltModule) -> Result<DgFiltModule, LiftError> {
        Ok(m.extend_scalars(self.target.clone(), &self.phi)?)
    }

    pub fn push_morphism(&self, f: &FiltMorphism) -> Result<FiltMorphism, LiftError> {
        let entries = f.f.iter().map(|r| r.iter().map(|e| self.phi.apply(e)).collect()).collect();
        Ok(FiltMorphism::new(self.push(&f.source)?, self.push(&f.target)?, entries)?)
    }

    pub fn source_label(&self, w: usize) -> usize {
        self.back[w]
    }

    pub fn target_label(&self, v: usize) -> usize {
        self.forward[v]
    }

    fn lift_entries(&self, m: &EntryMatrix, degree: impl Fn(usize, usize) -> i32) -> Result<EntryMatrix, LiftError> {
        m.iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, e)| self.preimage(e, degree(i, j)).ok_or(LiftError::NoPreimage(i, j)))
                    .collect()
            })
            .collect()
    }
}

fn check_in_segment(m: &DgFiltModule, seg: Segment) -> Result<(), LiftError> {
    match m.summands().iter().position(|s| !seg.contains(-s.shift)) {
        Some(i) => Err(LiftError::OutsideSegment(i)),
        None => Ok(()),
    }
}

/// The unique module over `A` whose image under `φ` is `x`.
pub fn lift_object(x: &DgFiltModule, iso: &TruncatedIso, seg: Segment) -> Result<DgFiltModule, LiftError> {
    iso.require(seg)?;
    if **x.owner() != *iso.target {
        return Err(PerfError::OwnerMismatch.into());
    }
    check_in_segment(x, seg)?;
    let summands: Vec<Summand> =
        x.summands().iter().map(|s| Summand { shift: s.shift, label: iso.source_label(s.label) }).collect();
    let entries = iso.lift_entries(&x.entries().to_vec(), |i, j| x.entry_degree(i, j))?;
    let lifted = DgFiltModule::new(iso.source.clone(), summands, entries)?;
    if iso.push(&lifted)? != *x {
        return Err(LiftError::RoundTrip);
    }
    Ok(lifted)
}

/// The unique morphism over `A` between the lifts with image `f`.
pub fn lift_morphism(f: &FiltMorphism, iso: &TruncatedIso, seg: Segment) -> Result<FiltMorphism, LiftError> {
    let source = lift_object(&f.source, iso, seg)?;
    let target = lift_object(&f.target, iso, seg)?;
    let (ts, ss) = (target.summands().to_vec(), source.summands().to_vec());
    let entries = iso.lift_entries(&f.f, |i, j| ts[i].shift - ss[j].shift)?;
    let lifted = FiltMorphism::new(source, target, entries)?;
    if iso.push_morphism(&lifted)?.f != f.f {
        return Err(LiftError::RoundTrip);
    }
    Ok(lifted)
}

/// Lifts a null-homotopy `h̃` of `φ(f)` to `h` with `f = y h + h x`.
pub fn lift_homotopy(f: &FiltMorphism, h: &EntryMatrix, iso: &TruncatedIso, seg: Segment) -> Result<EntryMatrix, LiftError> {
    iso.require(seg)?;
    check_in_segment(&f.source, seg)?;
    check_in_segment(&f.target, seg)?;
    let (ts, ss) = (f.target.summands(), f.source.summands());
    let lifted = iso.lift_entries(h, |i, j| ts[i].shift - 1 - ss[j].shift)?;
    let zero = FiltMorphism::new(f.source.clone(), f.target.clone(), vec![vec![iso.source.zero(); ss.len()]; ts.len()])?;
    f.check_homotopy(&zero, &lifted)?;
    Ok(lifted)
}

/// `dim Hom(m, {k} n)` over `A` and over `B` for one probe pair and shift.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SegmentRow {
    pub source: usize,
    pub target: usize,
    pub shift: i32,
    pub dim_source: usize,
    pub dim_target: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SegmentReport {
    pub segment: Segment,
    pub agreement: Agreement,
    pub rows: Vec<SegmentRow>,
}

impl SegmentReport {
    pub fn passed(&self) -> bool {
        self.first_failure().is_none()
    }

    pub fn first_failure(&self) -> Option<&SegmentRow> {
        self.rows.iter().find(|r| r.dim_source != r.dim_target)
    }
}

/// Compares Hom dimensions before and after extension of scalars for every
/// ordered probe pair and every shift certified on both sides.
pub fn verify_segment_equivalence(
    iso: &TruncatedIso,
    seg: Segment,
    probes: &[DgFiltModule],
    exec: Exec,
) -> Result<SegmentReport, LiftError> {
    iso.require(seg)?;
    for p in probes {
        check_in_segment(p, seg)?;
    }
    let pushed = probes.iter().map(|p| iso.push(p)).collect::<Result<Vec<_>, _>>()?;
    let pairs: Vec<(usize, usize)> = (0..probes.len()).flat_map(|p| (0..probes.len()).map(move |q| (p, q))).collect();
    let r = iso.agreement.r;
    let results = exec.map(&pairs, |&(p, q)| -> Result<Vec<SegmentRow>, LiftError> {
        let ha = filt_hom_complex(&probes[p], &probes[q])?;
        let hb = filt_hom_complex(&pushed[p], &pushed[q])?;
        let spread = probes[q].summands().iter().map(|s| s.shift).max().unwrap_or(0)
            - probes[p].summands().iter().map(|s| s.shift).min().unwrap_or(0);
        let ranges: Vec<(i32, i32)> = ha.degree_range().into_iter().chain(hb.degree_range()).collect();
        let Some(lo) = ranges.iter().map(|x| x.0).min() else {
            return Ok(Vec::new());
        };
        let hi_data = ranges.iter().map(|x| x.1).max().unwrap_or(lo) + 1;
        let hi = hi_data.min(r.saturating_sub(spread + 1));
        let mut rows = Vec::new();
        for k in lo - 1..=hi {
            if let (Some(da), Some(db)) = (ha.hom_dim(k), hb.hom_dim(k)) {
                rows.push(SegmentRow { source: p, target: q, shift: k, dim_source: da, dim_target: db });
            }
        }
        Ok(rows)
    });
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    Ok(SegmentReport { segment: seg, agreement: iso.agreement, rows })
}

/// All `{l} L̂_v` with `-l ∈ I`, plus every two-summand module with a single
/// basis connecting entry and generators in `I`.
pub fn default_probes(owner: &Arc<PerfAlgebra>, seg: Segment) -> Vec<DgFiltModule> {
    let mut out = Vec::new();
    let shifts: Vec<i32> = (seg.a..=seg.b).map(|g| -g).collect();
    for &l in &shifts {
        for v in 0..owner.label_count() {
            out.push(DgFiltModule::induced_simple(owner.clone(), v).expect("label in range").shift(l));
        }
    }
    for &l1 in &shifts {
        for &l2 in shifts.iter().filter(|&&l2| l2 <= l1) {
            for v1 in 0..owner.label_count() {
                for v2 in 0..owner.label_count() {
                    for b in &owner.slice(v1, l1 + 1 - l2, v2).basis {
                        let summands = vec![Summand { shift: l1, label: v1 }, Summand { shift: l2, label: v2 }];
                        let mut x = vec![vec![owner.zero(); 2]; 2];
                        x[0][1] = b.clone();
                        if let Ok(m) = DgFiltModule::new(owner.clone(), summands, x) {
                            out.push(m);
                        }
                    }
                }
            }
        }
    }
    out
}
