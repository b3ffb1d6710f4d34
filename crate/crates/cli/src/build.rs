//! Turns a parsed fixture into validated core objects.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use dgforge_core::artin::{Arrow, QuiverAlgebra, QuiverModule, Relation};
use dgforge_core::exactla::{Matrix, Q};
use dgforge_core::grdalg::{AlgebraBuilder, Bideg, DgAlgebra, DgaMorphism, Grading};
use dgforge_core::limits::AlgebraTower;
use dgforge_core::perf::{DgFiltModule, PerfAlgebra};
use dgforge_core::samples;

use crate::fixture::{AlgebraSpec, DegreeSpec, FixtureFile, FiltModuleSpec, MorphismSpec, PipelineRequest, QuiverModuleSpec, QuiverSpec, SparseSpec, TowerSpec, FORMAT_VERSION};

/// A problem located in one entry of one section.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub section: String,
    pub name: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "section `{}`, entry `{}`: {}", self.section, self.name, self.message)
    }
}

#[derive(Clone, Debug)]
pub enum Algebra {
    Graded(Arc<DgAlgebra<i32>>),
    Bigraded(Arc<DgAlgebra<Bideg>>),
}

#[derive(Clone, Debug)]
pub struct BuiltAlgebra {
    pub algebra: Algebra,
    pub weights: Option<Vec<i32>>,
}

/// Everything a fixture defines, keyed by name.
#[derive(Debug, Default)]
pub struct Env {
    pub algebras: BTreeMap<String, BuiltAlgebra>,
    pub perf: BTreeMap<String, Arc<PerfAlgebra>>,
    pub morphisms: BTreeMap<String, DgaMorphism<i32>>,
    pub modules: BTreeMap<String, DgFiltModule>,
    pub towers: BTreeMap<String, AlgebraTower>,
    pub quivers: BTreeMap<String, Arc<QuiverAlgebra>>,
    pub quiver_modules: BTreeMap<String, QuiverModule>,
    /// One entry per checked item, in section order; `None` means valid.
    pub checks: Vec<(String, String, Option<String>)>,
}

impl Env {
    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        self.checks
            .iter()
            .filter_map(|(s, n, e)| e.as_ref().map(|m| Diagnostic { section: s.clone(), name: n.clone(), message: m.clone() }))
            .collect()
    }

    pub fn graded(&self, name: &str) -> Result<Arc<DgAlgebra<i32>>, String> {
        match self.algebras.get(name).map(|b| &b.algebra) {
            Some(Algebra::Graded(a)) => Ok(a.clone()),
            Some(Algebra::Bigraded(_)) => Err(format!("algebra `{name}` is bigraded, a singly graded one is needed")),
            None => Err(format!("unknown algebra `{name}`")),
        }
    }

    pub fn owner(&self, name: &str) -> Result<Arc<PerfAlgebra>, String> {
        self.perf.get(name).cloned().ok_or_else(|| match self.graded(name) {
            Err(e) => e,
            Ok(_) => format!("algebra `{name}` cannot own dgFilt modules"),
        })
    }
}

pub fn parse_q(s: &str) -> Result<Q, String> {
    Q::from_str(s.trim()).map_err(|e| format!("bad rational `{s}`: {e}"))
}

fn parse_matrix(rows: &[Vec<String>], shape: (usize, usize)) -> Result<Matrix<Q>, String> {
    if rows.len() != shape.0 || rows.iter().any(|r| r.len() != shape.1) {
        return Err(format!("matrix must be {} x {}", shape.0, shape.1));
    }
    let mut m = Matrix::zeros(shape.0, shape.1);
    for (i, r) in rows.iter().enumerate() {
        for (j, v) in r.iter().enumerate() {
            m[(i, j)] = parse_q(v)?;
        }
    }
    Ok(m)
}

fn sparse(spec: &SparseSpec, labels: &BTreeMap<&str, usize>) -> Result<Vec<(usize, Q)>, String> {
    spec.iter()
        .map(|(l, v)| Ok((*labels.get(l.as_str()).ok_or_else(|| format!("unknown basis label `{l}`"))?, parse_q(v)?)))
        .collect()
}

fn build_tables<G: Grading>(spec: &AlgebraSpec, degs: Vec<G>) -> Result<DgAlgebra<G>, String> {
    let mut bl = AlgebraBuilder::new();
    let mut labels = BTreeMap::new();
    for (e, g) in spec.basis.iter().zip(degs) {
        if labels.insert(e.label.as_str(), bl.basis(e.label.clone(), g)).is_some() {
            return Err(format!("duplicate basis label `{}`", e.label));
        }
    }
    let unit = sparse(&spec.unit, &labels)?;
    if spec.unit_products {
        match unit.as_slice() {
            [(u, c)] if *c == Q::from(1) => {
                bl.unit_basis(*u);
            }
            _ => return Err("unit_products needs the unit to be a single basis element".into()),
        }
    }
    bl.unit(unit);
    for p in &spec.products {
        let l = *labels.get(p.left.as_str()).ok_or_else(|| format!("unknown basis label `{}`", p.left))?;
        let r = *labels.get(p.right.as_str()).ok_or_else(|| format!("unknown basis label `{}`", p.right))?;
        bl.product(l, r, sparse(&p.value, &labels)?);
    }
    for (x, v) in &spec.differential {
        let i = *labels.get(x.as_str()).ok_or_else(|| format!("unknown basis label `{x}`"))?;
        bl.differential(i, sparse(v, &labels)?);
    }
    for e in &spec.idempotents {
        bl.idempotent(e.label.clone(), sparse(&e.value, &labels)?);
    }
    if let Some(t) = spec.truncation {
        bl.truncation(t);
    }
    bl.build().map_err(|e| e.to_string())
}

fn build_algebra(spec: &AlgebraSpec) -> Result<Algebra, String> {
    if let Some(b) = &spec.builtin {
        if !spec.basis.is_empty() {
            return Err("give either `builtin` or `basis`, not both".into());
        }
        let param = || spec.param.ok_or_else(|| format!("builtin `{b}` needs `param`"));
        return Ok(match b.as_str() {
            "gamma5" => Algebra::Bigraded(Arc::new(samples::gamma5())),
            "gamma5_impure" => Algebra::Bigraded(Arc::new(samples::gamma5_impure())),
            "wsub" => Algebra::Bigraded(Arc::new(samples::wsub())),
            "p1e" => Algebra::Graded(Arc::new(samples::p1e())),
            "eqpt" => Algebra::Graded(Arc::new(samples::eqpt(param()?))),
            "poly_trunc" => Algebra::Graded(Arc::new(samples::poly_trunc(param()?))),
            other => return Err(format!("unknown builtin algebra `{other}`")),
        });
    }
    if spec.basis.is_empty() {
        return Err("algebra needs `builtin` or a nonempty `basis`".into());
    }
    let singles: Option<Vec<i32>> =
        spec.basis.iter().map(|e| if let DegreeSpec::Single(i) = e.deg { Some(i) } else { None }).collect();
    if let Some(d) = singles {
        return Ok(Algebra::Graded(Arc::new(build_tables(spec, d)?)));
    }
    let bis: Option<Vec<Bideg>> =
        spec.basis.iter().map(|e| if let DegreeSpec::Bi([i, j]) = e.deg { Some(Bideg::new(i, j)) } else { None }).collect();
    match bis {
        Some(d) => Ok(Algebra::Bigraded(Arc::new(build_tables(spec, d)?))),
        None => Err("basis mixes single degrees and bidegrees".into()),
    }
}

fn build_morphism(env: &Env, spec: &MorphismSpec) -> Result<DgaMorphism<i32>, String> {
    let s = env.graded(&spec.source)?;
    let t = env.graded(&spec.target)?;
    match (&spec.builtin, &spec.matrix) {
        (Some(b), None) if b == "projection" => {
            let mut m = Matrix::zeros(t.dim(), s.dim());
            for k in 0..s.dim().min(t.dim()) {
                m[(k, k)] = Q::from(1);
            }
            DgaMorphism::new(s, t, m).map_err(|e| e.to_string())
        }
        (Some(b), None) => Err(format!("unknown builtin morphism `{b}`")),
        (None, Some(rows)) => {
            let m = parse_matrix(rows, (t.dim(), s.dim()))?;
            DgaMorphism::new(s, t, m).map_err(|e| e.to_string())
        }
        _ => Err("give exactly one of `builtin` and `matrix`".into()),
    }
}

fn build_module(env: &Env, spec: &FiltModuleSpec) -> Result<DgFiltModule, String> {
    let owner = env.owner(&spec.algebra)?;
    let labels: BTreeMap<&str, usize> =
        owner.algebra().basis().labels().iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    let summands: Vec<(i32, &str)> = spec.summands.iter().map(|(l, v)| (*l, v.as_str())).collect();
    let mut entries = Vec::new();
    for e in &spec.entries {
        let mut v = owner.zero();
        for (i, c) in sparse(&e.value, &labels)? {
            v[i] = c;
        }
        entries.push(((e.row, e.col), v));
    }
    DgFiltModule::from_entries(owner, &summands, &entries).map_err(|e| e.to_string())
}

fn build_tower(env: &Env, spec: &TowerSpec) -> Result<AlgebraTower, String> {
    match spec.builtin.as_deref() {
        Some("eqpt") => {
            if !spec.stages.is_empty() || !spec.maps.is_empty() {
                return Err("builtin towers take only `top`".into());
            }
            Ok(AlgebraTower::eqpt(spec.top.ok_or("builtin tower needs `top`")?))
        }
        Some(other) => Err(format!("unknown builtin tower `{other}`")),
        None => {
            let stages = spec.stages.iter().map(|s| env.graded(s)).collect::<Result<Vec<_>, _>>()?;
            let maps = spec
                .maps
                .iter()
                .map(|m| env.morphisms.get(m).cloned().ok_or_else(|| format!("unknown morphism `{m}`")))
                .collect::<Result<Vec<_>, _>>()?;
            AlgebraTower::new(stages, maps).map_err(|e| e.to_string())
        }
    }
}

fn build_quiver(spec: &QuiverSpec) -> Result<QuiverAlgebra, String> {
    let vix = |v: &str| spec.vertices.iter().position(|x| x == v).ok_or_else(|| format!("unknown vertex `{v}`"));
    let arrows = spec
        .arrows
        .iter()
        .map(|(n, s, t)| Ok(Arrow { name: n.clone(), source: vix(s)?, target: vix(t)? }))
        .collect::<Result<Vec<_>, String>>()?;
    let aix = |a: &str| arrows.iter().position(|x| x.name == a).ok_or_else(|| format!("unknown arrow `{a}`"));
    let relations = spec
        .relations
        .iter()
        .map(|r| r.iter().map(|(c, p)| Ok((parse_q(c)?, p.iter().map(|a| aix(a)).collect::<Result<Vec<_>, _>>()?))).collect())
        .collect::<Result<Vec<Relation>, String>>()?;
    QuiverAlgebra::new(spec.vertices.clone(), arrows, relations).map_err(|e| e.to_string())
}

fn build_quiver_module(env: &Env, spec: &QuiverModuleSpec) -> Result<QuiverModule, String> {
    let q = env.quivers.get(&spec.quiver).ok_or_else(|| format!("unknown quiver `{}`", spec.quiver))?.clone();
    let vix = |v: &str| q.vertex_index(v).map_err(|e| e.to_string());
    match (&spec.simple, &spec.projective, &spec.dims) {
        (Some(v), None, None) if spec.maps.is_empty() => Ok(QuiverModule::simple(q.clone(), vix(v)?)),
        (None, Some(v), None) if spec.maps.is_empty() => Ok(QuiverModule::projective(q.clone(), vix(v)?)),
        (None, None, Some(dims)) => {
            let mut d = vec![0; q.vertices().len()];
            for (v, n) in dims {
                d[vix(v)?] = *n;
            }
            if let Some(a) = spec.maps.keys().find(|a| !q.arrows().iter().any(|x| &x.name == *a)) {
                return Err(format!("unknown arrow `{a}`"));
            }
            let maps = q
                .arrows()
                .iter()
                .map(|a| match spec.maps.get(&a.name) {
                    Some(rows) => parse_matrix(rows, (d[a.target], d[a.source])),
                    None => Ok(Matrix::zeros(d[a.target], d[a.source])),
                })
                .collect::<Result<Vec<_>, _>>()?;
            QuiverModule::new(q.clone(), d, maps).map_err(|e| e.to_string())
        }
        _ => Err("give exactly one of `simple`, `projective` or `dims` (with `maps`)".into()),
    }
}

fn request_refs(env: &Env, r: &PipelineRequest) -> Result<(), String> {
    let need = |ok: bool, what: &str, name: &str| if ok { Ok(()) } else { Err(format!("unknown {what} `{name}`")) };
    match r {
        PipelineRequest::Formality { algebra, .. } => match env.algebras.get(algebra).map(|b| &b.algebra) {
            Some(Algebra::Bigraded(_)) => Ok(()),
            Some(Algebra::Graded(_)) => Err(format!("algebra `{algebra}` is not bigraded")),
            None => Err(format!("unknown algebra `{algebra}`")),
        },
        PipelineRequest::Ext { family, compare, .. } => {
            if family.is_empty() {
                return Err("empty family".into());
            }
            for m in family {
                need(env.quiver_modules.contains_key(m), "quiver module", m)?;
            }
            if let Some(c) = compare {
                env.graded(c)?;
            }
            Ok(())
        }
        PipelineRequest::Hull { module } => need(env.quiver_modules.contains_key(module), "quiver module", module),
        PipelineRequest::Lift { morphism, probes, lift, .. } => {
            need(env.morphisms.contains_key(morphism), "morphism", morphism)?;
            for m in probes.iter().chain(lift) {
                need(env.modules.contains_key(m), "module", m)?;
            }
            Ok(())
        }
        PipelineRequest::Tower { tower, .. } => need(env.towers.contains_key(tower), "tower", tower),
        PipelineRequest::Tstructure { module } => need(env.modules.contains_key(module), "module", module),
    }
}

/// Builds every entry, recording one check per entry. Entries that fail are
/// left out, so later references to them fail too.
pub fn build_env(file: &FixtureFile) -> Env {
    let mut env = Env::default();
    let check = |env: &mut Env, section: &str, name: &str, r: Result<(), String>| {
        env.checks.push((section.into(), name.into(), r.err()));
    };
    let header = if file.version != FORMAT_VERSION {
        Err(format!("unsupported format version {}", file.version))
    } else if file.field != "Q" {
        Err(format!("unsupported field `{}`, only Q is available", file.field))
    } else if file.section_count() == 0 {
        Err("no sections".into())
    } else {
        Ok(())
    };
    check(&mut env, "file", "header", header);

    for (name, spec) in &file.quivers {
        let r = build_quiver(spec).map(|q| {
            env.quivers.insert(name.clone(), Arc::new(q));
        });
        check(&mut env, "quivers", name, r);
    }
    for (name, spec) in &file.quiver_modules {
        let r = build_quiver_module(&env, spec).map(|m| {
            env.quiver_modules.insert(name.clone(), m);
        });
        check(&mut env, "quiver_modules", name, r);
    }
    for (name, spec) in &file.algebras {
        let r = build_algebra(spec).and_then(|a| {
            if let Algebra::Graded(g) = &a {
                if let Ok(p) = PerfAlgebra::new(g.clone()) {
                    env.perf.insert(name.clone(), Arc::new(p));
                }
            }
            let n_idem = match &a {
                Algebra::Graded(g) => g.idempotents().len(),
                Algebra::Bigraded(g) => g.idempotents().len(),
            };
            if let Some(w) = &spec.weights {
                if w.len() != n_idem {
                    return Err(format!("{} weights for {n_idem} idempotents", w.len()));
                }
            }
            env.algebras.insert(name.clone(), BuiltAlgebra { algebra: a, weights: spec.weights.clone() });
            Ok(())
        });
        check(&mut env, "algebras", name, r);
    }
    for (name, spec) in &file.morphisms {
        let r = build_morphism(&env, spec).map(|m| {
            env.morphisms.insert(name.clone(), m);
        });
        check(&mut env, "morphisms", name, r);
    }
    for (name, spec) in &file.modules {
        let r = build_module(&env, spec).map(|m| {
            env.modules.insert(name.clone(), m);
        });
        check(&mut env, "modules", name, r);
    }
    for (name, spec) in &file.towers {
        let r = build_tower(&env, spec).map(|t| {
            env.towers.insert(name.clone(), t);
        });
        check(&mut env, "towers", name, r);
    }
    for (i, req) in file.pipelines.iter().enumerate() {
        let r = request_refs(&env, req);
        check(&mut env, "pipelines", &format!("{i} ({})", req.name()), r);
    }
    env
}
