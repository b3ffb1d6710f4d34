use std::collections::HashMap;
use std::sync::Arc;

use super::ArtinError;
use crate::exactla::{Field, Matrix, Q};
use crate::grdalg::{AlgebraBuilder, DgAlgebra, SparseVec};

/// Paths longer than this are assumed to witness an infinite-dimensional
/// quotient.
pub const PATH_LENGTH_CAP: usize = 16;
const PATH_COUNT_CAP: usize = 20_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub name: String,
    pub source: usize,
    pub target: usize,
}

/// A path, arrows listed in the order they are traversed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Path {
    pub source: usize,
    pub target: usize,
    pub arrows: Vec<usize>,
}

impl Path {
    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }

    fn then(&self, other: &Path) -> Option<Path> {
        (self.target == other.source).then(|| Path {
            source: self.source,
            target: other.target,
            arrows: self.arrows.iter().chain(&other.arrows).copied().collect(),
        })
    }
}

/// A relation `Σ c_p p`, all paths sharing endpoints and length.
pub type Relation = Vec<(Q, Vec<usize>)>;

/// Paths of one length, with the reduced ideal rows and the chosen normal paths.
#[derive(Clone, Debug)]
struct Layer {
    paths: Vec<Path>,
    index: HashMap<(usize, Vec<usize>), usize>,
    /// Reduced rows of the ideal in this length, with pivot columns.
    rows: Vec<(usize, Vec<Q>)>,
    /// Normal path column -> basis index of the algebra.
    normal: Vec<Option<usize>>,
}

/// `kQ / I` for a finite quiver and homogeneous relations; paths compose
/// source to target, so `p · q` is `p` followed by `q`.
#[derive(Clone, Debug)]
pub struct QuiverAlgebra {
    vertices: Vec<String>,
    arrows: Vec<Arrow>,
    relations: Vec<Relation>,
    basis: Vec<Path>,
    layers: Vec<Layer>,
    mult: Vec<Vec<SparseVec>>,
}

impl PartialEq for QuiverAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.arrows == other.arrows && self.relations == other.relations
    }
}

impl QuiverAlgebra {
    pub fn new(vertices: Vec<String>, arrows: Vec<Arrow>, relations: Vec<Relation>) -> Result<Self, ArtinError> {
        let nv = vertices.len();
        if let Some(a) = arrows.iter().find(|a| a.source >= nv || a.target >= nv) {
            return Err(ArtinError::Quiver(format!("arrow {} has an unknown endpoint", a.name)));
        }
        for (k, r) in relations.iter().enumerate() {
            let ends: Vec<(usize, usize, usize)> = r
                .iter()
                .map(|(_, p)| path_ends(&arrows, p).ok_or_else(|| ArtinError::Quiver(format!("relation {k} has a broken path"))))
                .collect::<Result<_, _>>()?;
            if ends.is_empty() || ends.iter().any(|e| *e != ends[0]) {
                return Err(ArtinError::Quiver(format!("relation {k} is not homogeneous")));
            }
        }
        let mut alg = QuiverAlgebra { vertices, arrows, relations, basis: Vec::new(), layers: Vec::new(), mult: Vec::new() };
        alg.enumerate()?;
        alg.fill_mult();
        Ok(alg)
    }

    /// Convenience constructor from names; relation paths are lists of arrow names.
    pub fn from_names(
        vertices: &[&str],
        arrows: &[(&str, &str, &str)],
        relations: &[Vec<(i64, Vec<&str>)>],
    ) -> Result<Self, ArtinError> {
        let vix = |v: &str| {
            vertices.iter().position(|x| *x == v).ok_or_else(|| ArtinError::Quiver(format!("unknown vertex {v}")))
        };
        let arrows = arrows
            .iter()
            .map(|&(n, s, t)| Ok(Arrow { name: n.into(), source: vix(s)?, target: vix(t)? }))
            .collect::<Result<Vec<_>, ArtinError>>()?;
        let aix = |a: &str| {
            arrows.iter().position(|x| x.name == a).ok_or_else(|| ArtinError::Quiver(format!("unknown arrow {a}")))
        };
        let relations = relations
            .iter()
            .map(|r| r.iter().map(|(c, p)| Ok((Q::from_int(*c), p.iter().map(|a| aix(a)).collect::<Result<Vec<_>, _>>()?))).collect())
            .collect::<Result<Vec<Relation>, ArtinError>>()?;
        QuiverAlgebra::new(vertices.iter().map(|v| v.to_string()).collect(), arrows, relations)
    }

    fn enumerate(&mut self) -> Result<(), ArtinError> {
        let nv = self.vertices.len();
        let mut by_len: Vec<Vec<Path>> = vec![(0..nv).map(|v| Path { source: v, target: v, arrows: Vec::new() }).collect()];
        for len in 0..=PATH_LENGTH_CAP + 1 {
            if len > 0 {
                let next: Vec<Path> = by_len[len - 1]
                    .iter()
                    .flat_map(|p| {
                        self.arrows.iter().enumerate().filter(move |(_, a)| a.source == p.target).map(move |(k, a)| {
                            let mut arrows = p.arrows.clone();
                            arrows.push(k);
                            Path { source: p.source, target: a.target, arrows }
                        })
                    })
                    .collect();
                if next.len() > PATH_COUNT_CAP {
                    return Err(ArtinError::Infinite);
                }
                by_len.push(next);
            }
            let layer = self.layer(&by_len, len);
            let normal_count = layer.normal.iter().filter(|n| n.is_some()).count();
            if normal_count > 0 && len > PATH_LENGTH_CAP {
                return Err(ArtinError::Infinite);
            }
            let done = normal_count == 0;
            self.layers.push(layer);
            if done {
                return Ok(());
            }
        }
        Err(ArtinError::Infinite)
    }

    fn layer(&mut self, by_len: &[Vec<Path>], len: usize) -> Layer {
        let paths = by_len[len].clone();
        let index: HashMap<(usize, Vec<usize>), usize> =
            paths.iter().enumerate().map(|(i, p)| ((p.source, p.arrows.clone()), i)).collect();
        let mut ideal: Vec<Vec<Q>> = Vec::new();
        for r in &self.relations {
            let rl = r[0].1.len();
            if rl > len {
                continue;
            }
            let (rs, rt, _) = path_ends(&self.arrows, &r[0].1).expect("checked");
            for a in 0..=len - rl {
                let b = len - rl - a;
                for p in by_len[a].iter().filter(|p| p.target == rs) {
                    for q in by_len[b].iter().filter(|q| q.source == rt) {
                        let mut row = vec![Q::zero(); paths.len()];
                        for (c, mid) in r {
                            let key: Vec<usize> = p.arrows.iter().chain(mid).chain(&q.arrows).copied().collect();
                            let i = index[&(p.source, key)];
                            row[i] = row[i].add(c);
                        }
                        ideal.push(row);
                    }
                }
            }
        }
        let rows = if ideal.is_empty() {
            Vec::new()
        } else {
            let rr = Matrix::from_rows(ideal).expect("rectangular").row_reduce();
            (0..rr.rank).map(|k| (rr.pivots[k], rr.reduced.row(k).to_vec())).collect()
        };
        let pivots: Vec<usize> = rows.iter().map(|(p, _)| *p).collect();
        let mut normal = vec![None; paths.len()];
        for (i, p) in paths.iter().enumerate() {
            if !pivots.contains(&i) {
                normal[i] = Some(self.basis.len());
                self.basis.push(p.clone());
            }
        }
        Layer { paths, index, rows, normal }
    }

    /// Coordinates of a path in the normal basis.
    pub fn reduce(&self, path: &Path) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.basis.len()];
        let Some(layer) = self.layers.get(path.len()) else {
            return out;
        };
        let Some(&i) = layer.index.get(&(path.source, path.arrows.clone())) else {
            return out;
        };
        let mut v = vec![Q::zero(); layer.paths.len()];
        v[i] = Q::one();
        for (p, row) in &layer.rows {
            if !v[*p].is_zero() {
                let c = v[*p].clone();
                for (x, r) in v.iter_mut().zip(row) {
                    *x = x.sub(&c.mul(r));
                }
            }
        }
        for (k, c) in v.into_iter().enumerate() {
            if !c.is_zero() {
                out[layer.normal[k].expect("non-pivot")] = c;
            }
        }
        out
    }

    fn fill_mult(&mut self) {
        let n = self.basis.len();
        let mut mult = vec![vec![Vec::new(); n]; n];
        for a in 0..n {
            for b in 0..n {
                if let Some(p) = self.basis[a].then(&self.basis[b]) {
                    mult[a][b] = self.reduce(&p).into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();
                }
            }
        }
        self.mult = mult;
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_index(&self, name: &str) -> Result<usize, ArtinError> {
        self.vertices.iter().position(|v| v == name).ok_or_else(|| ArtinError::Quiver(format!("unknown vertex {name}")))
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn basis(&self) -> &[Path] {
        &self.basis
    }

    pub fn label(&self, i: usize) -> String {
        let p = &self.basis[i];
        if p.arrows.is_empty() {
            format!("e_{}", self.vertices[p.source])
        } else {
            p.arrows.iter().map(|&a| self.arrows[a].name.as_str()).collect::<Vec<_>>().join("*")
        }
    }

    pub fn mul_basis(&self, a: usize, b: usize) -> &SparseVec {
        &self.mult[a][b]
    }

    pub fn mul(&self, x: &[Q], y: &[Q]) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.dim()];
        for (a, ca) in x.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            for (b, cb) in y.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                let s = ca.mul(cb);
                for (k, c) in &self.mult[a][b] {
                    out[*k] = out[*k].add(&s.mul(c));
                }
            }
        }
        out
    }

    /// Normal basis indices of paths from `x` to `y`.
    pub fn paths_between(&self, x: usize, y: usize) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.basis[i].source == x && self.basis[i].target == y).collect()
    }

    pub fn vertex_element(&self, x: usize) -> usize {
        self.basis.iter().position(|p| p.arrows.is_empty() && p.source == x).expect("trivial paths are normal")
    }

    /// The algebra as a dg algebra in degree 0 with one idempotent per vertex.
    pub fn to_dg_algebra(&self) -> Arc<DgAlgebra<i32>> {
        let mut bl = AlgebraBuilder::new();
        for i in 0..self.dim() {
            bl.basis(self.label(i), 0);
        }
        for a in 0..self.dim() {
            for b in 0..self.dim() {
                bl.product(a, b, self.mult[a][b].clone());
            }
        }
        let es: Vec<usize> = (0..self.vertices.len()).map(|x| self.vertex_element(x)).collect();
        bl.unit(es.iter().map(|&e| (e, Q::one())).collect());
        for (x, &e) in es.iter().enumerate() {
            bl.idempotent(self.vertices[x].clone(), vec![(e, Q::one())]);
        }
        Arc::new(bl.build().expect("quiver algebra is associative and unital"))
    }
}

/// `(source, target, length)` of an arrow sequence, if composable.
fn path_ends(arrows: &[Arrow], p: &[usize]) -> Option<(usize, usize, usize)> {
    let first = arrows.get(*p.first()?)?;
    let mut at = first.target;
    for &k in &p[1..] {
        let a = arrows.get(k)?;
        if a.source != at {
            return None;
        }
        at = a.target;
    }
    Some((first.source, at, p.len()))
}
