//! The six pipelines, each turning one request into a [`RequestReport`].

use std::collections::BTreeMap;
use std::fmt::Write;
use std::sync::Arc;

use dgforge_core::artin::{
    attach_bigrading, end_bigrading, ext1_dim, ext_algebra, ext_dim_by_resolution, projective_hull,
    projective_resolution, resolution_end_dg_algebra, BigradingRule, QuiverModule,
};
use dgforge_core::dgg::{formality_witness, weighted_sub_witness, DggError, FormalityWitness};
use dgforge_core::exactla::{rank_of, Field, Q};
use dgforge_core::exec::Exec;
use dgforge_core::grdalg::{Bideg, DgAlgebra, QisoReport};
use dgforge_core::lift::{default_probes, lift_object, verify_segment_equivalence, LiftError, Segment, TruncatedIso};
use dgforge_core::limits::{lim_hom, limit_algebra, limit_equivalence_report, stabilization_stage, validate_tower, LimitObject};
use dgforge_core::perf::{flag_analysis, t_structure_position, DgFiltModule};
use serde_json::{json, Value};

use crate::build::{Algebra, Env};
use crate::fixture::PipelineRequest;
use crate::report::{RequestReport, Table};

/// Resolutions longer than this are reported as failures.
pub const RESOLUTION_CAP: usize = 32;

fn bideg(b: Bideg) -> Value {
    json!([b.i, b.j])
}

fn qiso_table(name: &str, rep: &QisoReport<Bideg>) -> Table {
    let mut t = Table::new(name, &["bidegree", "dim_source", "dim_target", "rank", "in_window"]);
    for r in &rep.rows {
        t.push(vec![bideg(r.degree), json!(r.dim_source), json!(r.dim_target), json!(r.rank), json!(rep.in_window(r.degree))]);
    }
    t
}

fn dims_table(name: &str, dims: &BTreeMap<Bideg, usize>) -> Table {
    let mut t = Table::new(name, &["bidegree", "dim"]);
    for (g, d) in dims {
        t.push(vec![bideg(*g), json!(d)]);
    }
    t
}

fn witness_tables(out: &mut RequestReport, w: &FormalityWitness) {
    out.tables.push(dims_table("cohomology", &w.cohomology_table));
    out.tables.push(qiso_table("inclusion", &w.inclusion_report));
    out.tables.push(qiso_table("projection", &w.projection_report));
    out.windows.insert("inclusion".into(), w.inclusion_report.inconclusive_beyond);
    out.windows.insert("projection".into(), w.projection_report.inconclusive_beyond);
    out.values.insert("sub_dim".into(), json!(w.sub.dim()));
    out.values.insert("cohomology_dim".into(), json!(w.cohomology.dim()));
    if let Some(r) = w.inclusion_report.first_failure() {
        out.fail(format!("inclusion not an isomorphism on cohomology at {}", r.degree));
    }
    if let Some(r) = w.projection_report.first_failure() {
        out.fail(format!("projection not an isomorphism on cohomology at {}", r.degree));
    }
}

/// Formality of a bigraded algebra: plain Γ, or weighted Sub when weights are known.
pub fn formality(r: &Arc<DgAlgebra<Bideg>>, weights: Option<&[i32]>, out: &mut RequestReport) {
    out.passed = true;
    let result = match weights {
        Some(w) => {
            out.values.insert("weights".into(), json!(w));
            weighted_sub_witness(r, w)
        }
        None => formality_witness(r),
    };
    out.values.insert("mode".into(), json!(if weights.is_some() { "weighted_sub" } else { "gamma" }));
    match result {
        Ok(w) => witness_tables(out, &w),
        Err(e) => {
            out.tables.push(dims_table("cohomology", &r.cohomology().dims()));
            let witness = match &e {
                DggError::Impure { at, .. } => format!("impure cohomology at {at}"),
                DggError::ImpureBlock { alpha, beta, at, .. } => format!("block ({alpha}, {beta}) impure at {at}"),
                other => other.to_string(),
            };
            if let DggError::Impure { at, .. } | DggError::ImpureBlock { at, .. } = &e {
                out.values.insert("counterexample".into(), bideg(*at));
            }
            out.fail(witness);
        }
    }
}

/// Ranks of products between idempotent slices, keyed by labels and degrees.
pub fn product_ranks(alg: &DgAlgebra<i32>) -> BTreeMap<(String, i32, String, i32, String), usize> {
    let idem = alg.idempotents();
    let degrees: Vec<i32> = alg.basis().degrees().collect();
    let mut out = BTreeMap::new();
    for l in idem {
        for mid in idem {
            for r in idem {
                for &g in &degrees {
                    let xs = alg.slice_basis(&l.coords, g, &mid.coords);
                    for &h in &degrees {
                        let ys = alg.slice_basis(&mid.coords, h, &r.coords);
                        let prods: Vec<Vec<Q>> = xs.iter().flat_map(|x| ys.iter().map(|y| alg.mul(x, y))).collect();
                        out.insert((l.label.clone(), g, mid.label.clone(), h, r.label.clone()), rank_of(alg.dim(), &prods));
                    }
                }
            }
        }
    }
    out
}

/// Slice dimensions `dim e_l A^g e_r`, keyed by labels and degree.
pub fn slice_dims(alg: &DgAlgebra<i32>) -> BTreeMap<(String, i32, String), usize> {
    let mut out = BTreeMap::new();
    for l in alg.idempotents() {
        for r in alg.idempotents() {
            for g in alg.basis().degrees() {
                out.insert((l.label.clone(), g, r.label.clone()), alg.slice_dim(&l.coords, g, &r.coords));
            }
        }
    }
    out
}

pub fn ext(
    env: &Env,
    family: &[String],
    weights: Option<&[i32]>,
    compare: Option<&str>,
    out: &mut RequestReport,
) {
    out.passed = true;
    let modules: Vec<&QuiverModule> = family.iter().map(|m| &env.quiver_modules[m]).collect();
    let mut res_table = Table::new("resolutions", &["member", "term", "dims"]);
    let mut fam = Vec::new();
    for (name, m) in family.iter().zip(&modules) {
        match projective_resolution(m, RESOLUTION_CAP) {
            Ok(r) => {
                for (k, q) in r.modules.iter().enumerate() {
                    res_table.push(vec![json!(name), json!(k), json!(q.dims())]);
                }
                fam.push((name.clone(), r));
            }
            Err(e) => {
                out.tables.push(res_table);
                return out.fail(format!("resolution of {name}: {e}"));
            }
        }
    }
    out.tables.push(res_table);
    let end = match resolution_end_dg_algebra(&fam) {
        Ok(e) => e,
        Err(e) => return out.fail(format!("endomorphism algebra: {e}")),
    };
    let (h, coh) = ext_algebra(&end);
    let mut ct = Table::new("cohomology", &["degree", "dim"]);
    for (g, d) in coh.dims() {
        ct.push(vec![json!(g), json!(d)]);
    }
    out.tables.push(ct);
    let top = coh.dims().keys().copied().max().unwrap_or(0);
    let dims: Vec<usize> = (0..=top).map(|g| coh.dim(g)).collect();
    out.values.insert("dims".into(), json!(dims));
    out.values.insert("end_dim".into(), json!(end.algebra.dim()));

    let mut bt = Table::new("ext_blocks", &["source", "target", "degree", "dim", "dim_by_resolution"]);
    for (alpha, res) in &fam {
        for (beta, m) in family.iter().zip(&modules) {
            let ea = &h.idempotent(alpha).expect("member idempotent").coords;
            let eb = &h.idempotent(beta).expect("member idempotent").coords;
            for g in 0..=top {
                let got = h.slice_dim(eb, g, ea);
                let oracle = match ext_dim_by_resolution(res, m, g as usize) {
                    Ok(d) => d,
                    Err(e) => return out.fail(format!("Ext by resolution: {e}")),
                };
                if got != oracle {
                    out.fail(format!("Ext^{g}({alpha}, {beta}) is {got} in End but {oracle} by resolution"));
                }
                bt.push(vec![json!(alpha), json!(beta), json!(g), json!(got), json!(oracle)]);
            }
        }
    }
    out.tables.push(bt);

    if let Some(name) = compare {
        let other = env.graded(name).expect("checked by validation");
        let mut t = Table::new("compare", &["kind", "key", "ext", name]);
        let (a, b) = (slice_dims(&h), slice_dims(&other));
        for k in a.keys().chain(b.keys()).collect::<std::collections::BTreeSet<_>>() {
            let (x, y) = (a.get(k).copied().unwrap_or(0), b.get(k).copied().unwrap_or(0));
            if x != y {
                out.fail(format!("slice {k:?}: {x} vs {y}"));
            }
            t.push(vec![json!("slice"), json!(format!("{}|{}|{}", k.0, k.1, k.2)), json!(x), json!(y)]);
        }
        let (a, b) = (product_ranks(&h), product_ranks(&other));
        for k in a.keys().chain(b.keys()).collect::<std::collections::BTreeSet<_>>() {
            let (x, y) = (a.get(k).copied().unwrap_or(0), b.get(k).copied().unwrap_or(0));
            if x != y {
                out.fail(format!("product rank {k:?}: {x} vs {y}"));
            }
            if x + y > 0 {
                t.push(vec![json!("product"), json!(format!("{}|{}|{}|{}|{}", k.0, k.1, k.2, k.3, k.4)), json!(x), json!(y)]);
            }
        }
        out.tables.push(t);
    }

    if let Some(w) = weights {
        out.values.insert("weights".into(), json!(w));
        if w.len() != family.len() {
            return out.fail(format!("{} weights for {} members", w.len(), family.len()));
        }
        let js = end_bigrading(&end, w);
        let r = match attach_bigrading(&end.algebra, &BigradingRule::Explicit(js)) {
            Ok(r) => Arc::new(r),
            Err(e) => return out.fail(format!("bigrading: {e}")),
        };
        let mut sub = RequestReport { passed: true, ..Default::default() };
        formality(&r, Some(w), &mut sub);
        for mut t in sub.tables {
            t.name = format!("weighted_{}", t.name);
            out.tables.push(t);
        }
        for (k, v) in sub.windows {
            out.windows.insert(format!("weighted_{k}"), v);
        }
        if let Some(wit) = sub.witness {
            out.fail(format!("weighted formality: {wit}"));
        }
    }
}

pub fn hull(m: &QuiverModule, out: &mut RequestReport, trace: Option<&mut String>) {
    out.passed = true;
    let h = match projective_hull(m) {
        Ok(h) => h,
        Err(e) => return out.fail(e.to_string()),
    };
    let alg = m.algebra();
    let mut t = Table::new("trace", &["step", "vertex", "ext_dim", "dims"]);
    for s in &h.trace {
        t.push(vec![json!(s.step), json!(s.vertex), json!(s.ext_dim), json!(s.dims)]);
    }
    out.tables.push(t);
    let mut checks = Table::new("post_checks", &["check", "value"]);
    checks.push(vec![json!("surjective"), json!(h.epi.is_surjective())]);
    if !h.epi.is_surjective() {
        out.fail("hull map is not surjective");
    }
    for (x, v) in alg.vertices().iter().enumerate() {
        let d = ext1_dim(&h.module, &QuiverModule::simple(alg.clone(), x)).unwrap_or(usize::MAX);
        checks.push(vec![json!(format!("ext1_to_{v}")), json!(d)]);
        if d != 0 {
            out.fail(format!("Ext^1(hull, L_{v}) = {d}"));
        }
    }
    out.tables.push(checks);
    out.values.insert("input_dims".into(), json!(m.dims()));
    out.values.insert("dims".into(), json!(h.module.dims()));
    out.values.insert("steps".into(), json!(h.trace.len()));
    if let Some(buf) = trace {
        for s in &h.trace {
            let dims: Vec<String> = alg.vertices().iter().zip(&s.dims).map(|(v, d)| format!("{v}:{d}")).collect();
            let _ = writeln!(
                buf,
                "step {}: extend by L_{} (dim Ext^1 = {}), dims {}",
                s.step,
                s.vertex,
                s.ext_dim,
                dims.join(" ")
            );
        }
    }
}

fn entry_trace(buf: &mut String, name: &str, m: &DgFiltModule) {
    let _ = writeln!(buf, "lift {name}:");
    for i in 0..m.len() {
        for j in 0..m.len() {
            if m.entry(i, j).iter().any(|c| !Q::is_zero(c)) {
                let _ = writeln!(buf, "  entry ({i},{j}): preimage in degree {}", m.entry_degree(i, j));
            }
        }
    }
}

pub fn lift(
    env: &Env,
    morphism: &str,
    segment: [i32; 2],
    probes: &[String],
    lifts: &[String],
    out: &mut RequestReport,
    mut trace: Option<&mut String>,
) {
    out.passed = true;
    let phi = env.morphisms[morphism].clone();
    let iso = match TruncatedIso::new(phi) {
        Ok(i) => i,
        Err(e) => return out.fail(e.to_string()),
    };
    out.values.insert("agreement".into(), json!(iso.agreement.r));
    out.values.insert("agreement_capped".into(), json!(iso.agreement.capped));
    let seg = match Segment::new(segment[0], segment[1]) {
        Ok(s) => s,
        Err(e) => return out.fail(e.to_string()),
    };
    if let Err(e) = iso.require(seg) {
        if let LiftError::Refused { r, needed } = e {
            out.values.insert("refused".into(), json!({ "r": r, "needed": needed }));
        }
        let mut t = Table::new("agreement", &["r", "segment_length", "needed"]);
        t.push(vec![json!(iso.agreement.r), json!(seg.len()), json!(seg.len() + 2)]);
        out.tables.push(t);
        return out.fail(format!("refused: {e}"));
    }
    let probes: Vec<DgFiltModule> = if probes.is_empty() {
        default_probes(&iso.source, seg)
    } else {
        probes.iter().map(|p| env.modules[p].clone()).collect()
    };
    let report = match verify_segment_equivalence(&iso, seg, &probes, Exec::Parallel) {
        Ok(r) => r,
        Err(e) => return out.fail(e.to_string()),
    };
    let mut t = Table::new("hom", &["source", "target", "shift", "dim_source", "dim_target"]);
    for r in &report.rows {
        t.push(vec![json!(r.source), json!(r.target), json!(r.shift), json!(r.dim_source), json!(r.dim_target)]);
    }
    out.tables.push(t);
    if let Some(f) = report.first_failure() {
        out.fail(format!("Hom^{} between probes {} and {}: {} vs {}", f.shift, f.source, f.target, f.dim_source, f.dim_target));
    }
    out.values.insert("probes".into(), json!(probes.len()));

    let mut rt = Table::new("round_trip", &["module", "direction", "ok"]);
    let targets: Vec<(String, DgFiltModule)> = if lifts.is_empty() {
        probes.iter().enumerate().filter_map(|(k, p)| iso.push(p).ok().map(|m| (format!("probe{k}"), m))).collect()
    } else {
        lifts.iter().map(|n| (n.clone(), env.modules[n].clone())).collect()
    };
    for (k, p) in probes.iter().enumerate() {
        let ok = iso.push(p).and_then(|m| lift_object(&m, &iso, seg)).is_ok_and(|back| &back == p);
        rt.push(vec![json!(format!("probe{k}")), json!("lift . extend"), json!(ok)]);
        if !ok {
            out.fail(format!("lift of the extension of probe {k} is not the probe"));
        }
    }
    for (name, m) in &targets {
        match lift_object(m, &iso, seg) {
            Ok(l) => {
                if let Some(buf) = trace.as_deref_mut() {
                    entry_trace(buf, name, &l);
                }
                let ok = iso.push(&l).is_ok_and(|back| &back == m);
                rt.push(vec![json!(name), json!("extend . lift"), json!(ok)]);
                if !ok {
                    out.fail(format!("extension of the lift of {name} is not {name}"));
                }
            }
            Err(e) => {
                rt.push(vec![json!(name), json!("extend . lift"), json!(false)]);
                out.fail(format!("lifting {name}: {e}"));
            }
        }
    }
    out.tables.push(rt);
}

pub fn tower(env: &Env, name: &str, segment: [i32; 2], window: i32, shifts: Option<[i32; 2]>, out: &mut RequestReport) {
    out.passed = true;
    let t = &env.towers[name];
    let rep = match validate_tower(t) {
        Ok(r) => r,
        Err(e) => return out.fail(e.to_string()),
    };
    let mut at = Table::new("agreements", &["map", "r", "capped"]);
    for (n, a) in rep.agreements.iter().enumerate() {
        at.push(vec![json!(n), json!(a.r), json!(a.capped)]);
    }
    out.tables.push(at);
    out.windows.insert("tower".into(), Some(rep.window));
    let seg = match Segment::new(segment[0], segment[1]) {
        Ok(s) => s,
        Err(e) => return out.fail(e.to_string()),
    };
    match stabilization_stage(t, seg) {
        Ok(n) => {
            out.values.insert("stabilization_stage".into(), json!(n));
        }
        Err(e) => return out.fail(e.to_string()),
    }
    let lim = match limit_algebra(t, window) {
        Ok(l) => l,
        Err(e) => return out.fail(e.to_string()),
    };
    out.values.insert("limit_stage".into(), json!(lim.stage));
    out.windows.insert("limit_algebra".into(), Some(lim.window));
    let probes = default_probes(lim.perf(), seg);
    out.values.insert("probes".into(), json!(probes.len()));
    match limit_equivalence_report(t, seg, &lim, &probes, Exec::Parallel) {
        Ok(r) => {
            let mut lt = Table::new("limit", &["source", "target", "shift", "dim_limit_algebra", "dim_limit_category"]);
            for row in &r.rows {
                lt.push(vec![
                    json!(row.source),
                    json!(row.target),
                    json!(row.shift),
                    json!(row.dim_limit_algebra),
                    json!(row.dim_limit_category),
                ]);
            }
            out.tables.push(lt);
            if let Some(f) = r.first_failure() {
                out.fail(format!(
                    "Hom^{} between probes {} and {}: {} over the limit algebra, {} in the limit",
                    f.shift, f.source, f.target, f.dim_limit_algebra, f.dim_limit_category
                ));
            }
        }
        Err(e) => return out.fail(e.to_string()),
    }
    let [lo, hi] = shifts.unwrap_or([0, 4]);
    let first = match probes.first().map(|p| LimitObject::from_limit(p, t, &lim)) {
        Some(Ok(x)) => x,
        Some(Err(e)) => return out.fail(e.to_string()),
        None => return out.fail("segment has no probes"),
    };
    match lim_hom(&first, &first, t, seg, lo..=hi) {
        Ok(rows) => {
            let mut ht = Table::new("lim_hom_first_probe", &["shift", "stage", "dim", "cross_checked"]);
            for r in rows {
                ht.push(vec![json!(r.shift), json!(r.stage), json!(r.dim), json!(r.cross_checked)]);
            }
            out.tables.push(ht);
        }
        Err(e) => out.fail(e.to_string()),
    }
}

pub fn tstructure(m: &DgFiltModule, out: &mut RequestReport) {
    out.passed = true;
    out.values.insert("shifts".into(), json!(m.summands().iter().map(|s| s.shift).collect::<Vec<_>>()));
    if let Some(flags) = flag_analysis(m) {
        out.values.insert("flag".into(), json!(flags));
    }
    match t_structure_position(m) {
        Ok(p) => {
            let mut rt = Table::new("reduced_cohomology", &["degree", "dim"]);
            for (g, d) in &p.reduced_cohomology {
                rt.push(vec![json!(g), json!(d)]);
            }
            let mut gt = Table::new("generation_degrees", &["degree", "count"]);
            for (g, d) in &p.generation_degrees {
                gt.push(vec![json!(g), json!(d)]);
            }
            out.tables.push(rt);
            out.tables.push(gt);
            out.values.insert("segment".into(), json!(p.segment()));
            if !p.agree() {
                out.fail(format!("criteria disagree: {:?} vs {:?}", p.by_reduction, p.by_generation));
            }
        }
        Err(e) => out.fail(e.to_string()),
    }
}

/// Runs one request; `trace` collects the step-by-step text where supported.
pub fn run_request(env: &Env, index: usize, req: &PipelineRequest, trace: Option<&mut String>) -> RequestReport {
    let mut out = RequestReport { index, ..Default::default() };
    match req {
        PipelineRequest::Formality { algebra, weights } => {
            out.subject = algebra.clone();
            let built = &env.algebras[algebra];
            let Algebra::Bigraded(r) = &built.algebra else { unreachable!("checked by validation") };
            formality(r, weights.as_deref().or(built.weights.as_deref()), &mut out);
        }
        PipelineRequest::Ext { family, weights, compare } => {
            out.subject = family.join(",");
            ext(env, family, weights.as_deref(), compare.as_deref(), &mut out);
        }
        PipelineRequest::Hull { module } => {
            out.subject = module.clone();
            hull(&env.quiver_modules[module], &mut out, trace);
        }
        PipelineRequest::Lift { morphism, segment, probes, lift: lifts } => {
            out.subject = format!("{morphism} on [{}, {}]", segment[0], segment[1]);
            lift(env, morphism, *segment, probes, lifts, &mut out, trace);
        }
        PipelineRequest::Tower { tower: name, segment, window, shifts } => {
            out.subject = format!("{name} on [{}, {}]", segment[0], segment[1]);
            tower(env, name, *segment, *window, *shifts, &mut out);
        }
        PipelineRequest::Tstructure { module } => {
            out.subject = module.clone();
            tstructure(&env.modules[module], &mut out);
        }
    }
    if out.passed && out.tables.is_empty() {
        out.fail("no evidence produced");
    }
    out
}
