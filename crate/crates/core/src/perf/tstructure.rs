use std::collections::BTreeMap;

use super::{is_zero, DgFiltModule, PerfError};
use crate::exactla::{Field, Q};
use crate::grdalg::{Complex, GradedBasis};

/// Position of a module in the t-structure, computed two ways.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TStructurePosition {
    /// `dim H^n(M ⊗_A A^0)`, nonzero degrees only.
    pub reduced_cohomology: BTreeMap<i32, usize>,
    /// Support segment of `H(M ⊗_A A^0)`.
    pub by_reduction: Option<(i32, i32)>,
    /// Generators of the minimal model per degree.
    pub generation_degrees: BTreeMap<i32, usize>,
    /// Support segment of the generation degrees.
    pub by_generation: Option<(i32, i32)>,
}

impl TStructurePosition {
    pub fn agree(&self) -> bool {
        self.by_reduction == self.by_generation && self.reduced_cohomology == self.generation_degrees
    }

    /// `Some([a, b])`, or `None` for a contractible module.
    pub fn segment(&self) -> Option<(i32, i32)> {
        self.by_reduction
    }
}

fn segment(support: &BTreeMap<i32, usize>) -> Option<(i32, i32)> {
    Some((*support.keys().next()?, *support.keys().next_back()?))
}

/// Scalar of a degree-0 entry, zero elsewhere.
fn reduced(m: &DgFiltModule, i: usize, j: usize) -> Q {
    if m.entry_degree(i, j) != 0 || is_zero(m.entry(i, j)) {
        return Q::zero();
    }
    m.owner().scalar_of(m.entry(i, j), m.summands()[i].label)
}

/// Cancels invertible degree-0 entries until none remain. The result is
/// homotopy equivalent to `m` and every entry has positive degree.
pub fn minimal_model(m: &DgFiltModule) -> Result<DgFiltModule, PerfError> {
    let owner = m.owner().clone();
    let mut cur = m.clone();
    loop {
        let n = cur.len();
        let pivot = (0..n).flat_map(|p| (0..n).map(move |q| (p, q))).find(|&(p, q)| !reduced(&cur, p, q).is_zero());
        let Some((p, q)) = pivot else {
            return Ok(cur);
        };
        let inv = reduced(&cur, p, q).inv().expect("nonzero");
        let keep: Vec<usize> = (0..n).filter(|&i| i != p && i != q).collect();
        let mut x = Vec::with_capacity(keep.len());
        for &i in &keep {
            let mut row = Vec::with_capacity(keep.len());
            for &j in &keep {
                let corr = owner.mul(cur.entry(i, q), cur.entry(p, j));
                row.push(cur.entry(i, j).iter().zip(&corr).map(|(a, c)| a.sub(&c.mul(&inv))).collect());
            }
            x.push(row);
        }
        let summands = keep.iter().map(|&i| cur.summands()[i]).collect();
        cur = DgFiltModule::new(owner.clone(), summands, x)?;
    }
}

/// Criterion A: support of `H(M ⊗_A A^0)`, where the differential is `x`
/// reduced modulo positive degrees. Criterion B: generation degrees of the
/// minimal model.
pub fn t_structure_position(m: &DgFiltModule) -> Result<TStructurePosition, PerfError> {
    let n = m.len();
    let basis = GradedBasis::new((0..n).map(|i| (format!("g{i}"), -m.summands()[i].shift)).collect());
    let d = (0..n)
        .map(|j| (0..n).filter_map(|i| Some((i, reduced(m, i, j))).filter(|(_, c)| !c.is_zero())).collect())
        .collect();
    let h = Complex::new(basis, d, None).cohomology();
    let reduced_cohomology = h.dims();
    let min = minimal_model(m)?;
    let mut generation_degrees = BTreeMap::new();
    for s in min.summands() {
        *generation_degrees.entry(-s.shift).or_insert(0) += 1;
    }
    let pos = TStructurePosition {
        by_reduction: segment(&reduced_cohomology),
        by_generation: segment(&generation_degrees),
        reduced_cohomology,
        generation_degrees,
    };
    if !pos.agree() {
        return Err(PerfError::Internal(format!(
            "t-structure criteria disagree: {:?} vs {:?}",
            pos.by_reduction, pos.by_generation
        )));
    }
    Ok(pos)
}

/// The multiplicities of the labels when every shift is zero (a module
/// with a flag of simple subquotients), `None` otherwise.
pub fn flag_analysis(m: &DgFiltModule) -> Option<BTreeMap<String, usize>> {
    if m.summands().iter().any(|s| s.shift != 0) {
        return None;
    }
    let mut out = BTreeMap::new();
    for s in m.summands() {
        *out.entry(m.owner().label(s.label).to_string()).or_insert(0) += 1;
    }
    Some(out)
}
