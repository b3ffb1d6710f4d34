use std::sync::Arc;

use super::quiver::QuiverAlgebra;
use super::ArtinError;
use crate::exactla::{Field, Matrix, Span, Q};

/// A finite-dimensional right module: a vector space per vertex and, for each
/// arrow `a: x -> y`, a matrix `V_x -> V_y` (shape `dim V_y x dim V_x`).
#[derive(Clone, Debug, PartialEq)]
pub struct QuiverModule {
    alg: Arc<QuiverAlgebra>,
    dims: Vec<usize>,
    maps: Vec<Matrix<Q>>,
}

impl QuiverModule {
    pub fn new(alg: Arc<QuiverAlgebra>, dims: Vec<usize>, maps: Vec<Matrix<Q>>) -> Result<Self, ArtinError> {
        if dims.len() != alg.vertices().len() || maps.len() != alg.arrows().len() {
            return Err(ArtinError::Module("wrong number of vertex spaces or arrow maps".into()));
        }
        for (a, m) in alg.arrows().iter().zip(&maps) {
            if m.rows() != dims[a.target] || m.cols() != dims[a.source] {
                return Err(ArtinError::Module(format!("arrow {} has a map of the wrong shape", a.name)));
            }
        }
        let module = QuiverModule { alg, dims, maps };
        for (k, r) in module.alg.relations().iter().enumerate() {
            let (s, t) = module.path_ends(&r[0].1);
            let mut sum = Matrix::zeros(module.dims[t], module.dims[s]);
            for (c, p) in r {
                sum = sum.add(&module.path_matrix(p, s).scale(c)).expect("shapes");
            }
            if !sum.is_zero() {
                return Err(ArtinError::Module(format!("relation {k} does not act by zero")));
            }
        }
        Ok(module)
    }

    pub fn zero(alg: Arc<QuiverAlgebra>) -> Self {
        let nv = alg.vertices().len();
        let maps = alg.arrows().iter().map(|_| Matrix::zeros(0, 0)).collect();
        QuiverModule { alg, dims: vec![0; nv], maps }
    }

    /// The simple module `L_x`.
    pub fn simple(alg: Arc<QuiverAlgebra>, x: usize) -> Self {
        let dims: Vec<usize> = (0..alg.vertices().len()).map(|v| usize::from(v == x)).collect();
        let maps = alg.arrows().iter().map(|a| Matrix::zeros(dims[a.target], dims[a.source])).collect();
        QuiverModule { alg, dims, maps }
    }

    /// The indecomposable projective `P_x = e_x A`, spanned by normal paths from `x`.
    pub fn projective(alg: Arc<QuiverAlgebra>, x: usize) -> Self {
        let nv = alg.vertices().len();
        let spaces: Vec<Vec<usize>> = (0..nv).map(|y| alg.paths_between(x, y)).collect();
        let maps = alg
            .arrows()
            .iter()
            .enumerate()
            .map(|(k, a)| {
                let arrow = alg.reduce(&super::Path { source: a.source, target: a.target, arrows: vec![k] });
                let (src, tgt) = (&spaces[a.source], &spaces[a.target]);
                let mut m = Matrix::zeros(tgt.len(), src.len());
                for (col, &p) in src.iter().enumerate() {
                    let img = alg.mul(&unit(alg.dim(), p), &arrow);
                    for (row, &q) in tgt.iter().enumerate() {
                        m[(row, col)] = img[q].clone();
                    }
                }
                m
            })
            .collect();
        QuiverModule { dims: spaces.iter().map(Vec::len).collect(), alg, maps }
    }

    pub fn direct_sum(parts: &[&QuiverModule]) -> Result<Self, ArtinError> {
        let Some(first) = parts.first() else {
            return Err(ArtinError::Module("empty direct sum".into()));
        };
        if parts.iter().any(|p| p.alg != first.alg) {
            return Err(ArtinError::AlgebraMismatch);
        }
        let nv = first.dims.len();
        let dims: Vec<usize> = (0..nv).map(|x| parts.iter().map(|p| p.dims[x]).sum()).collect();
        let maps = (0..first.maps.len())
            .map(|k| block_diag(&parts.iter().map(|p| &p.maps[k]).collect::<Vec<_>>()))
            .collect();
        Ok(QuiverModule { alg: first.alg.clone(), dims, maps })
    }

    pub fn algebra(&self) -> &Arc<QuiverAlgebra> {
        &self.alg
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim_at(&self, x: usize) -> usize {
        self.dims[x]
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.total_dim() == 0
    }

    pub fn arrow_map(&self, a: usize) -> &Matrix<Q> {
        &self.maps[a]
    }

    fn path_ends(&self, p: &[usize]) -> (usize, usize) {
        let arrows = self.alg.arrows();
        (arrows[p[0]].source, arrows[*p.last().expect("nonempty")].target)
    }

    /// Action of an arrow sequence starting at `source`.
    pub fn path_matrix(&self, p: &[usize], source: usize) -> Matrix<Q> {
        let mut m = Matrix::identity(self.dims[source]);
        for &a in p {
            m = self.maps[a].mul(&m).expect("composable path");
        }
        m
    }

    /// Span of the images of arrows ending at `x`, the radical in that vertex.
    pub fn radical_at(&self, x: usize) -> Span<Q> {
        let mut span = Span::empty(self.dims[x]);
        for (a, m) in self.alg.arrows().iter().zip(&self.maps) {
            if a.target == x {
                for c in m.columns() {
                    span.try_push(c);
                }
            }
        }
        span
    }

    /// Dimension vector of the top `M / M J`.
    pub fn top_dims(&self) -> Vec<usize> {
        (0..self.dims.len()).map(|x| self.dims[x] - self.radical_at(x).dim()).collect()
    }
}

/// A module homomorphism, one matrix per vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct QuiverMap {
    pub source: QuiverModule,
    pub target: QuiverModule,
    pub comps: Vec<Matrix<Q>>,
}

impl QuiverMap {
    pub fn new(source: QuiverModule, target: QuiverModule, comps: Vec<Matrix<Q>>) -> Result<Self, ArtinError> {
        if source.alg != target.alg {
            return Err(ArtinError::AlgebraMismatch);
        }
        if comps.len() != source.dims.len()
            || comps.iter().enumerate().any(|(x, c)| c.rows() != target.dims[x] || c.cols() != source.dims[x])
        {
            return Err(ArtinError::Map("component of the wrong shape".into()));
        }
        let f = QuiverMap { source, target, comps };
        for (k, a) in f.source.alg.arrows().iter().enumerate() {
            let left = f.target.maps[k].mul(&f.comps[a.source]).expect("shapes");
            let right = f.comps[a.target].mul(&f.source.maps[k]).expect("shapes");
            if left != right {
                return Err(ArtinError::Map(format!("does not commute with arrow {}", a.name)));
            }
        }
        Ok(f)
    }

    pub fn identity(m: &QuiverModule) -> Self {
        let comps = m.dims.iter().map(|&d| Matrix::identity(d)).collect();
        QuiverMap { source: m.clone(), target: m.clone(), comps }
    }

    pub fn zero(source: &QuiverModule, target: &QuiverModule) -> Self {
        let comps = source.dims.iter().zip(&target.dims).map(|(&s, &t)| Matrix::zeros(t, s)).collect();
        QuiverMap { source: source.clone(), target: target.clone(), comps }
    }

    /// The map `P_x -> M` sending `e_x` to `g ∈ V_x(M)`.
    pub fn from_projective(x: usize, m: &QuiverModule, g: &[Q]) -> Self {
        let alg = m.alg.clone();
        let p = QuiverModule::projective(alg.clone(), x);
        let comps = (0..m.dims.len())
            .map(|y| {
                let cols: Vec<Vec<Q>> =
                    alg.paths_between(x, y).iter().map(|&b| m.path_matrix(&alg.basis()[b].arrows, x).mul_vec(g)).collect();
                Matrix::from_columns(m.dims[y], &cols)
            })
            .collect();
        QuiverMap { source: p, target: m.clone(), comps }
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &QuiverMap) -> Result<QuiverMap, ArtinError> {
        if self.target.dims != other.source.dims {
            return Err(ArtinError::Map("maps are not composable".into()));
        }
        let comps = self.comps.iter().zip(&other.comps).map(|(f, g)| g.mul(f).expect("shapes")).collect();
        Ok(QuiverMap { source: self.source.clone(), target: other.target.clone(), comps })
    }

    pub fn rank(&self) -> usize {
        self.comps.iter().map(Matrix::rank).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Matrix::is_zero)
    }

    pub fn is_surjective(&self) -> bool {
        self.rank() == self.target.total_dim()
    }

    pub fn is_injective(&self) -> bool {
        self.rank() == self.source.total_dim()
    }

    pub fn is_iso(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }

    /// The kernel with its inclusion.
    pub fn kernel(&self) -> (QuiverModule, QuiverMap) {
        let bases: Vec<Matrix<Q>> = self.comps.iter().map(Matrix::kernel_basis).collect();
        let alg = self.source.alg.clone();
        let maps = alg
            .arrows()
            .iter()
            .enumerate()
            .map(|(k, a)| {
                let img = self.source.maps[k].mul(&bases[a.source]).expect("shapes");
                bases[a.target].solve(&img).expect("shapes").expect("kernel is a submodule")
            })
            .collect();
        let dims = bases.iter().map(Matrix::cols).collect();
        let k = QuiverModule { alg, dims, maps };
        let inc = QuiverMap { source: k.clone(), target: self.source.clone(), comps: bases };
        (k, inc)
    }

    pub fn flat(&self) -> Vec<Q> {
        self.comps.iter().flat_map(|c| (0..c.rows()).flat_map(move |i| c.row(i).to_vec())).collect()
    }

    pub fn from_flat(source: &QuiverModule, target: &QuiverModule, v: &[Q]) -> Self {
        let mut at = 0;
        let comps = source
            .dims
            .iter()
            .zip(&target.dims)
            .map(|(&s, &t)| {
                let mut m = Matrix::zeros(t, s);
                for i in 0..t {
                    for j in 0..s {
                        m[(i, j)] = v[at].clone();
                        at += 1;
                    }
                }
                m
            })
            .collect();
        QuiverMap { source: source.clone(), target: target.clone(), comps }
    }
}

/// Offsets of row-major `rows[x] x cols[x]` blocks laid end to end.
pub(crate) fn block_offsets(rows: &[usize], cols: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(rows.len() + 1);
    let mut at = 0;
    for (r, c) in rows.iter().zip(cols) {
        out.push(at);
        at += r * c;
    }
    out.push(at);
    out
}

/// Basis of `Hom_A(M, N)`.
pub fn hom(m: &QuiverModule, n: &QuiverModule) -> Result<Vec<QuiverMap>, ArtinError> {
    if m.alg != n.alg {
        return Err(ArtinError::AlgebraMismatch);
    }
    let off = block_offsets(&n.dims, &m.dims);
    let unknowns = off[off.len() - 1];
    let mut rows: Vec<Vec<Q>> = Vec::new();
    for (k, a) in m.alg.arrows().iter().enumerate() {
        let (x, y) = (a.source, a.target);
        let (na, ma) = (&n.maps[k], &m.maps[k]);
        for r_out in 0..n.dims[y] {
            for c_out in 0..m.dims[x] {
                // (N_a f_x - f_y M_a)[r_out, c_out]
                let mut row = vec![Q::zero(); unknowns];
                for r in 0..n.dims[x] {
                    let i = off[x] + r * m.dims[x] + c_out;
                    row[i] = row[i].add(&na[(r_out, r)]);
                }
                for c in 0..m.dims[y] {
                    let i = off[y] + r_out * m.dims[y] + c;
                    row[i] = row[i].sub(&ma[(c, c_out)]);
                }
                rows.push(row);
            }
        }
    }
    let kernel = if rows.is_empty() { Matrix::identity(unknowns) } else { Matrix::from_rows(rows).expect("rectangular").kernel_basis() };
    Ok(kernel.columns().iter().map(|v| QuiverMap::from_flat(m, n, v)).collect())
}

pub(crate) fn unit(n: usize, i: usize) -> Vec<Q> {
    let mut v = vec![Q::zero(); n];
    v[i] = Q::one();
    v
}

pub(crate) fn block_diag(blocks: &[&Matrix<Q>]) -> Matrix<Q> {
    let rows = blocks.iter().map(|b| b.rows()).sum();
    let cols = blocks.iter().map(|b| b.cols()).sum();
    let mut out = Matrix::zeros(rows, cols);
    let (mut r0, mut c0) = (0, 0);
    for b in blocks {
        for i in 0..b.rows() {
            for j in 0..b.cols() {
                out[(r0 + i, c0 + j)] = b[(i, j)].clone();
            }
        }
        r0 += b.rows();
        c0 += b.cols();
    }
    out
}
