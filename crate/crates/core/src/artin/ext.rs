use super::hull::Resolution;
use super::module::{block_offsets, hom, QuiverMap, QuiverModule};
use super::ArtinError;
use crate::exactla::{rank_of, Field, Matrix, Span, Q};

/// `Ext^1(M, N)` from extension data: cocycles `ζ_a: V_x(M) -> V_y(N)` per
/// arrow `a: x -> y` killing every relation, modulo `a ↦ N_a f_x - f_y M_a`.
#[derive(Clone, Debug)]
pub struct Ext1 {
    pub m: QuiverModule,
    pub n: QuiverModule,
    pub cocycle_dim: usize,
    pub boundary_dim: usize,
    /// Cocycles whose classes form a basis, flattened per arrow.
    pub reps: Vec<Vec<Q>>,
    span: Span<Q>,
    constraints: Option<Matrix<Q>>,
}

impl Ext1 {
    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn is_cocycle(&self, zeta: &[Q]) -> bool {
        self.constraints.as_ref().is_none_or(|c| c.mul_vec(zeta).iter().all(Q::is_zero))
    }

    /// Coordinates of the class of a cocycle, `None` if `zeta` is not one.
    pub fn class_of(&self, zeta: &[Q]) -> Option<Vec<Q>> {
        if !self.is_cocycle(zeta) {
            return None;
        }
        let c = self.span.coords(zeta)?;
        Some(c[self.boundary_dim..].to_vec())
    }
}

fn arrow_offsets(m: &QuiverModule, n: &QuiverModule) -> Vec<usize> {
    let arrows = m.algebra().arrows();
    let rows: Vec<usize> = arrows.iter().map(|a| n.dim_at(a.target)).collect();
    let cols: Vec<usize> = arrows.iter().map(|a| m.dim_at(a.source)).collect();
    block_offsets(&rows, &cols)
}

pub fn ext1(m: &QuiverModule, n: &QuiverModule) -> Result<Ext1, ArtinError> {
    if m.algebra() != n.algebra() {
        return Err(ArtinError::AlgebraMismatch);
    }
    let alg = m.algebra().clone();
    let arrows = alg.arrows();
    let off = arrow_offsets(m, n);
    let unknowns = off[off.len() - 1];

    let mut rows: Vec<Vec<Q>> = Vec::new();
    for r in alg.relations() {
        let s = arrows[r[0].1[0]].source;
        let t = arrows[*r[0].1.last().expect("nonempty")].target;
        let mut block = vec![vec![Q::zero(); unknowns]; n.dim_at(t) * m.dim_at(s)];
        for (c, p) in r {
            for (i, &a) in p.iter().enumerate() {
                let prefix = m.path_matrix(&p[..i], s);
                let suffix = n.path_matrix(&p[i + 1..], arrows[a].target);
                let width = m.dim_at(arrows[a].source);
                for big_r in 0..n.dim_at(t) {
                    for big_c in 0..m.dim_at(s) {
                        let row = &mut block[big_r * m.dim_at(s) + big_c];
                        for rr in 0..suffix.cols() {
                            let left = c.mul(&suffix[(big_r, rr)]);
                            if left.is_zero() {
                                continue;
                            }
                            for cc in 0..width {
                                let v = left.mul(&prefix[(cc, big_c)]);
                                if !v.is_zero() {
                                    let k = off[a] + rr * width + cc;
                                    row[k] = row[k].add(&v);
                                }
                            }
                        }
                    }
                }
            }
        }
        rows.extend(block);
    }
    let constraints = (!rows.is_empty()).then(|| Matrix::from_rows(rows).expect("rectangular"));
    let cocycles = match &constraints {
        Some(c) => c.kernel_basis().columns(),
        None => Matrix::<Q>::identity(unknowns).columns(),
    };

    let boundaries: Vec<Vec<Q>> = (0..alg.vertices().len())
        .flat_map(|x| (0..n.dim_at(x)).flat_map(move |i| (0..m.dim_at(x)).map(move |j| (x, i, j))))
        .map(|(x, i, j)| {
            let mut z = vec![Q::zero(); unknowns];
            for (k, a) in arrows.iter().enumerate() {
                let w = m.dim_at(a.source);
                if a.source == x {
                    // N_a f_x with f_x = E_ij
                    for rr in 0..n.dim_at(a.target) {
                        let idx = off[k] + rr * w + j;
                        z[idx] = z[idx].add(&n.arrow_map(k)[(rr, i)]);
                    }
                }
                if a.target == x {
                    // - f_x M_a
                    for cc in 0..w {
                        let idx = off[k] + i * w + cc;
                        z[idx] = z[idx].sub(&m.arrow_map(k)[(j, cc)]);
                    }
                }
            }
            z
        })
        .collect();
    let mut span = Span::new(unknowns, &boundaries);
    let boundary_dim = span.dim();
    let mut reps = Vec::new();
    for z in cocycles.iter() {
        if span.try_push(z.clone()) {
            reps.push(z.clone());
        }
    }
    Ok(Ext1 { m: m.clone(), n: n.clone(), cocycle_dim: cocycles.len(), boundary_dim, reps, span, constraints })
}

pub fn ext1_dim(m: &QuiverModule, n: &QuiverModule) -> Result<usize, ArtinError> {
    Ok(ext1(m, n)?.dim())
}

/// `dim Ext^k(M, N)` as cohomology of `Hom(Q_•, N)` for a projective resolution of `M`.
pub fn ext_dim_by_resolution(res: &Resolution, n: &QuiverModule, k: usize) -> Result<usize, ArtinError> {
    let Some(qk) = res.modules.get(k) else {
        return Ok(0);
    };
    let hom_k = hom(qk, n)?;
    // cocycles: f ∘ d_{k+1} = 0
    let cocycles = match res.differentials.get(k) {
        None => hom_k.len(),
        Some(d) => {
            let images: Vec<Vec<Q>> = hom_k.iter().map(|f| d.then(f).map(|g| g.flat())).collect::<Result<_, _>>()?;
            let ambient = images.first().map_or(0, Vec::len);
            hom_k.len() - rank_of(ambient, &images)
        }
    };
    let boundaries = if k == 0 {
        0
    } else {
        let d = &res.differentials[k - 1];
        let images: Vec<Vec<Q>> =
            hom(&res.modules[k - 1], n)?.iter().map(|f| d.then(f).map(|g| g.flat())).collect::<Result<_, _>>()?;
        let ambient = images.first().map_or(0, Vec::len);
        rank_of(ambient, &images)
    };
    Ok(cocycles - boundaries)
}

/// A short exact sequence `0 -> N -> E -> M -> 0`.
#[derive(Clone, Debug)]
pub struct ExtensionClass {
    pub injection: QuiverMap,
    pub surjection: QuiverMap,
}

impl ExtensionClass {
    pub fn new(injection: QuiverMap, surjection: QuiverMap) -> Result<Self, ArtinError> {
        let comp = injection.then(&surjection)?;
        if !injection.is_injective() || !surjection.is_surjective() || !comp.is_zero() {
            return Err(ArtinError::Extension("sequence is not short exact".into()));
        }
        if injection.source.total_dim() + surjection.target.total_dim() != surjection.source.total_dim() {
            return Err(ArtinError::Extension("sequence is not exact in the middle".into()));
        }
        Ok(ExtensionClass { injection, surjection })
    }

    /// The extension with arrow maps `[[N_a, ζ_a], [0, M_a]]`.
    pub fn from_cocycle(m: &QuiverModule, n: &QuiverModule, zeta: &[Q]) -> Result<Self, ArtinError> {
        let alg = m.algebra().clone();
        let off = arrow_offsets(m, n);
        if zeta.len() != off[off.len() - 1] {
            return Err(ArtinError::Extension("cocycle has the wrong length".into()));
        }
        let nv = alg.vertices().len();
        let dims: Vec<usize> = (0..nv).map(|x| n.dim_at(x) + m.dim_at(x)).collect();
        let maps = alg
            .arrows()
            .iter()
            .enumerate()
            .map(|(k, a)| {
                let (ns, nt, ms, mt) = (n.dim_at(a.source), n.dim_at(a.target), m.dim_at(a.source), m.dim_at(a.target));
                let mut e = Matrix::zeros(nt + mt, ns + ms);
                for i in 0..nt {
                    for j in 0..ns {
                        e[(i, j)] = n.arrow_map(k)[(i, j)].clone();
                    }
                    for j in 0..ms {
                        e[(i, ns + j)] = zeta[off[k] + i * ms + j].clone();
                    }
                }
                for i in 0..mt {
                    for j in 0..ms {
                        e[(nt + i, ns + j)] = m.arrow_map(k)[(i, j)].clone();
                    }
                }
                e
            })
            .collect();
        let e = QuiverModule::new(alg, dims, maps).map_err(|_| ArtinError::Extension("data is not a cocycle".into()))?;
        let inj = (0..nv)
            .map(|x| {
                let mut c = Matrix::zeros(e.dim_at(x), n.dim_at(x));
                for i in 0..n.dim_at(x) {
                    c[(i, i)] = Q::one();
                }
                c
            })
            .collect();
        let sur = (0..nv)
            .map(|x| {
                let mut c = Matrix::zeros(m.dim_at(x), e.dim_at(x));
                for i in 0..m.dim_at(x) {
                    c[(i, n.dim_at(x) + i)] = Q::one();
                }
                c
            })
            .collect();
        ExtensionClass::new(QuiverMap::new(n.clone(), e.clone(), inj)?, QuiverMap::new(e, m.clone(), sur)?)
    }

    pub fn middle(&self) -> &QuiverModule {
        &self.surjection.source
    }

    /// A cocycle for this class, through a linear section of the surjection.
    pub fn cocycle(&self) -> Vec<Q> {
        let (n, m, e) = (&self.injection.source, &self.surjection.target, self.middle());
        let alg = m.algebra();
        let sections: Vec<Matrix<Q>> = self
            .surjection
            .comps
            .iter()
            .map(|p| p.solve(&Matrix::identity(p.rows())).expect("shapes").expect("surjective"))
            .collect();
        let mut out = Vec::new();
        for (k, a) in alg.arrows().iter().enumerate() {
            let defect = e
                .arrow_map(k)
                .mul(&sections[a.source])
                .expect("shapes")
                .sub(&sections[a.target].mul(m.arrow_map(k)).expect("shapes"))
                .expect("shapes");
            let z = self.injection.comps[a.target].solve(&defect).expect("shapes").expect("defect lies in N");
            debug_assert_eq!(z.rows(), n.dim_at(a.target));
            for i in 0..z.rows() {
                out.extend(z.row(i).iter().cloned());
            }
        }
        out
    }
}

/// `0 -> L^e -> M -> A -> 0` for `e = dim Ext^1(A, L)`, classified by the
/// identity of `Ext^1(A, L)`.
#[derive(Clone, Debug)]
pub struct UniversalExtension {
    pub class: ExtensionClass,
    pub vertex: usize,
    pub e: usize,
    /// Rank of the connecting map `Hom(L^e, L) -> Ext^1(A, L)`.
    pub delta_rank: usize,
    /// `dim Ext^1(M, L)` and the bound `e · dim Ext^1(L, L)` it must respect.
    pub ext_after: usize,
    pub ext_bound: usize,
}

pub fn universal_extension(a: &QuiverModule, x: usize) -> Result<UniversalExtension, ArtinError> {
    let alg = a.algebra().clone();
    let l = QuiverModule::simple(alg.clone(), x);
    let data = ext1(a, &l)?;
    let e = data.dim();
    if e == 0 {
        return Err(ArtinError::NoExtension(alg.vertices()[x].clone()));
    }
    let copies: Vec<&QuiverModule> = std::iter::repeat_n(&l, e).collect();
    let le = QuiverModule::direct_sum(&copies)?;
    let off_l = arrow_offsets(a, &l);
    let mut zeta = Vec::new();
    for (k, arrow) in alg.arrows().iter().enumerate() {
        if arrow.target == x {
            for rep in &data.reps {
                zeta.extend(rep[off_l[k]..off_l[k + 1]].iter().cloned());
            }
        }
    }
    let class = ExtensionClass::from_cocycle(a, &le, &zeta)?;

    // pushing out along the coordinate projections recovers the basis classes
    let pushed: Vec<Vec<Q>> = (0..e)
        .map(|j| {
            let proj = QuiverMap::new(le.clone(), l.clone(), projection_at(&le, x, j))?;
            let pz = pushout_cocycle(&class, &proj);
            data.class_of(&pz).ok_or_else(|| ArtinError::Extension("pushout is not a cocycle".into()))
        })
        .collect::<Result<_, _>>()?;
    let delta_rank = rank_of(e, &pushed);
    if delta_rank != e {
        return Err(ArtinError::Extension(format!("connecting map has rank {delta_rank}, expected {e}")));
    }
    let m = class.middle().clone();
    for y in 0..alg.vertices().len() {
        let ly = QuiverModule::simple(alg.clone(), y);
        if hom(a, &ly)?.len() != hom(&m, &ly)?.len() {
            return Err(ArtinError::Extension(format!("restriction to Hom(-, L_{}) is not bijective", alg.vertices()[y])));
        }
    }
    let ext_after = ext1_dim(&m, &l)?;
    let ext_bound = e * ext1_dim(&l, &l)?;
    if ext_after > ext_bound {
        return Err(ArtinError::Extension(format!("Ext^1 grew to {ext_after}, bound {ext_bound}")));
    }
    Ok(UniversalExtension { class, vertex: x, e, delta_rank, ext_after, ext_bound })
}

fn projection_at(le: &QuiverModule, x: usize, j: usize) -> Vec<Matrix<Q>> {
    (0..le.dims().len())
        .map(|y| {
            let mut c = Matrix::zeros(usize::from(y == x), le.dim_at(y));
            if y == x {
                c[(0, j)] = Q::one();
            }
            c
        })
        .collect()
}

/// Cocycle of the pushout of an extension along `g: N -> N'`.
fn pushout_cocycle(class: &ExtensionClass, g: &QuiverMap) -> Vec<Q> {
    let z = class.cocycle();
    let (m, n) = (&class.surjection.target, &class.injection.source);
    let alg = m.algebra();
    let off = arrow_offsets(m, n);
    let mut out = Vec::new();
    for (k, a) in alg.arrows().iter().enumerate() {
        let (rows, cols) = (n.dim_at(a.target), m.dim_at(a.source));
        let mut block = Matrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                block[(i, j)] = z[off[k] + i * cols + j].clone();
            }
        }
        let img = g.comps[a.target].mul(&block).expect("shapes");
        for i in 0..img.rows() {
            out.extend(img.row(i).iter().cloned());
        }
    }
    out
}

/// Some `f: P -> M` with `c ∘ f = pi`, if one exists.
pub fn lift_through(pi: &QuiverMap, c: &QuiverMap) -> Result<Option<QuiverMap>, ArtinError> {
    let basis = hom(&pi.source, &c.source)?;
    let target = pi.flat();
    if basis.is_empty() {
        return Ok(target.iter().all(Q::is_zero).then(|| QuiverMap::zero(&pi.source, &c.source)));
    }
    let images: Vec<Vec<Q>> = basis.iter().map(|f| f.then(c).map(|g| g.flat())).collect::<Result<_, _>>()?;
    let mat = Matrix::from_columns(target.len(), &images);
    let rhs = Matrix::from_columns(target.len(), &[target]);
    let Some(sol) = mat.solve(&rhs).map_err(|e| ArtinError::Map(e.to_string()))? else {
        return Ok(None);
    };
    let mut flat = vec![Q::zero(); basis[0].flat().len()];
    for (f, coef) in basis.iter().zip(sol.column(0)) {
        for (o, v) in flat.iter_mut().zip(f.flat()) {
            *o = o.add(&coef.mul(&v));
        }
    }
    Ok(Some(QuiverMap::from_flat(&pi.source, &c.source, &flat)))
}
