use std::collections::BTreeMap;
use std::sync::Arc;

use dgforge_core::artin::{
    attach_bigrading, end_bigrading, ext1, ext1_dim, ext_algebra, ext_dim_by_resolution, hom, lift_through,
    projective_cover, projective_hull, projective_resolution, resolution_end_dg_algebra, universal_extension,
    ArtinError, BigradingRule, ExtensionClass, QuiverAlgebra, QuiverMap, QuiverModule, Resolution,
};
use dgforge_core::dgg::{formality_witness, weighted_sub_witness};
use dgforge_core::exactla::{Field, Matrix, Q};
use dgforge_core::grdalg::{DgAlgebra, Grading};
use dgforge_core::samples;

fn p1q() -> Arc<QuiverAlgebra> {
    Arc::new(samples::p1q())
}

fn simple(a: &Arc<QuiverAlgebra>, v: &str) -> QuiverModule {
    QuiverModule::simple(a.clone(), a.vertex_index(v).unwrap())
}

fn projective(a: &Arc<QuiverAlgebra>, v: &str) -> QuiverModule {
    QuiverModule::projective(a.clone(), a.vertex_index(v).unwrap())
}

fn m(rows: &[&[i64]]) -> Matrix<Q> {
    Matrix::from_i64(rows)
}

/// The five indecomposables of P1Q plus a few sums.
fn p1q_modules(a: &Arc<QuiverAlgebra>) -> Vec<QuiverModule> {
    let ls = simple(a, "s");
    let lb = simple(a, "b");
    let ps = projective(a, "s");
    let pb = projective(a, "b");
    // b -> s via v, top at b
    let mbs = QuiverModule::new(a.clone(), vec![1, 1], vec![m(&[&[0]]), m(&[&[1]])]).unwrap();
    let sum = QuiverModule::direct_sum(&[&ls, &pb]).unwrap();
    vec![ls, lb, ps, pb, mbs, sum]
}

#[test]
fn p1q_has_five_normal_paths() {
    let a = samples::p1q();
    assert_eq!(a.dim(), 5);
    let labels: Vec<String> = (0..a.dim()).map(|i| a.label(i)).collect();
    assert_eq!(labels, ["e_s", "e_b", "u", "v", "v*u"]);
    let alg = a.to_dg_algebra();
    assert_eq!(alg.idempotents().len(), 2);
}

#[test]
fn path_products_follow_the_relation() {
    let a = samples::p1q();
    let idx = |l: &str| (0..a.dim()).find(|&i| a.label(i) == l).unwrap();
    let unit = |i: usize| {
        let mut v = vec![Q::zero(); a.dim()];
        v[i] = Q::one();
        v
    };
    let vu = a.mul(&unit(idx("v")), &unit(idx("u")));
    assert_eq!(vu, unit(idx("v*u")));
    assert!(a.mul(&unit(idx("u")), &unit(idx("v"))).iter().all(Q::is_zero));
    assert!(a.mul(&unit(idx("e_s")), &unit(idx("v"))).iter().all(Q::is_zero));
    assert_eq!(a.mul(&unit(idx("e_b")), &unit(idx("v"))), unit(idx("v")));
}

#[test]
fn loop_without_relations_is_rejected() {
    let r = QuiverAlgebra::from_names(&["x"], &[("l", "x", "x")], &[]);
    assert!(matches!(r, Err(ArtinError::Infinite)));
    // with l² = 0 it is finite
    let ok = QuiverAlgebra::from_names(&["x"], &[("l", "x", "x")], &[vec![(1, vec!["l", "l"])]]).unwrap();
    assert_eq!(ok.dim(), 2);
}

#[test]
fn inhomogeneous_relation_is_rejected() {
    let r = QuiverAlgebra::from_names(
        &["1", "2", "3"],
        &[("a", "1", "2"), ("b", "2", "3"), ("c", "1", "3")],
        &[vec![(1, vec!["a", "b"]), (-1, vec!["c"])]],
    );
    assert!(matches!(r, Err(ArtinError::Quiver(_))));
}

#[test]
fn commutative_square_quotients_one_path() {
    let a = QuiverAlgebra::from_names(
        &["1", "2", "3", "4"],
        &[("a", "1", "2"), ("b", "2", "4"), ("c", "1", "3"), ("d", "3", "4")],
        &[vec![(1, vec!["a", "b"]), (-1, vec!["c", "d"])]],
    )
    .unwrap();
    // 4 trivial paths, 4 arrows, one of the two length-2 paths
    assert_eq!(a.dim(), 9);
    let a = Arc::new(a);
    let p1 = QuiverModule::projective(a.clone(), 0);
    assert_eq!(p1.dims(), [1, 1, 1, 1]);
}

#[test]
fn projectives_have_the_expected_dimension_vectors() {
    let a = p1q();
    assert_eq!(projective(&a, "s").dims(), [1, 1]);
    assert_eq!(projective(&a, "b").dims(), [1, 2]);
    assert_eq!(projective(&a, "b").top_dims(), [0, 1]);
}

#[test]
fn hom_from_projectives_is_evaluation() {
    // Hom(P_x, M) ≅ V_x(M)
    let a = p1q();
    for module in p1q_modules(&a) {
        for x in ["s", "b"] {
            let h = hom(&projective(&a, x), &module).unwrap();
            assert_eq!(h.len(), module.dim_at(a.vertex_index(x).unwrap()), "Hom(P_{x}, {:?})", module.dims());
        }
    }
}

#[test]
fn hom_between_simples_and_projectives() {
    let a = p1q();
    let (ls, lb, ps, pb) = (simple(&a, "s"), simple(&a, "b"), projective(&a, "s"), projective(&a, "b"));
    assert_eq!(hom(&ls, &lb).unwrap().len(), 0);
    assert_eq!(hom(&ls, &ls).unwrap().len(), 1);
    assert_eq!(hom(&pb, &lb).unwrap().len(), 1);
    assert_eq!(hom(&ps, &lb).unwrap().len(), 0);
    // socle of P_b is L_b, spanned by v*u
    assert_eq!(hom(&lb, &pb).unwrap().len(), 1);
    assert_eq!(hom(&ps, &pb).unwrap().len(), 1);
    for f in hom(&pb, &ps).unwrap() {
        QuiverMap::new(f.source.clone(), f.target.clone(), f.comps.clone()).unwrap();
    }
}

#[test]
fn ext1_of_simples_counts_arrows() {
    let a = p1q();
    let (ls, lb) = (simple(&a, "s"), simple(&a, "b"));
    assert_eq!(ext1_dim(&ls, &lb).unwrap(), 1);
    assert_eq!(ext1_dim(&lb, &ls).unwrap(), 1);
    assert_eq!(ext1_dim(&ls, &ls).unwrap(), 0);
    assert_eq!(ext1_dim(&lb, &lb).unwrap(), 0);
    let k = Arc::new(samples::kronecker());
    assert_eq!(ext1_dim(&simple(&k, "1"), &simple(&k, "2")).unwrap(), 2);
    assert_eq!(ext1_dim(&simple(&k, "2"), &simple(&k, "1")).unwrap(), 0);
}

#[test]
fn ext1_routes_agree() {
    let a = p1q();
    let mods = p1q_modules(&a);
    for x in &mods {
        let res = projective_resolution(x, 8).unwrap();
        for y in &mods {
            let by_data = ext1_dim(x, y).unwrap();
            let by_res = ext_dim_by_resolution(&res, y, 1).unwrap();
            assert_eq!(by_data, by_res, "Ext^1({:?}, {:?})", x.dims(), y.dims());
            assert_eq!(ext_dim_by_resolution(&res, y, 0).unwrap(), hom(x, y).unwrap().len());
        }
    }
}

#[test]
fn projectives_have_no_ext() {
    let a = p1q();
    for p in [projective(&a, "s"), projective(&a, "b")] {
        for n in p1q_modules(&a) {
            assert_eq!(ext1_dim(&p, &n).unwrap(), 0);
        }
    }
}

#[test]
fn extension_class_round_trips() {
    let a = p1q();
    let (ls, lb) = (simple(&a, "s"), simple(&a, "b"));
    let data = ext1(&ls, &lb).unwrap();
    let zeta = data.reps[0].clone();
    let class = ExtensionClass::from_cocycle(&ls, &lb, &zeta).unwrap();
    // the nonsplit extension of L_s by L_b is P_s
    assert_eq!(class.middle().dims(), [1, 1]);
    assert!(!class.middle().arrow_map(0).is_zero());
    assert_eq!(data.class_of(&class.cocycle()).unwrap(), vec![Q::one()]);
    // the zero cocycle splits
    let split = ExtensionClass::from_cocycle(&ls, &lb, &vec![Q::zero(); zeta.len()]).unwrap();
    assert_eq!(hom(split.middle(), &ls).unwrap().len(), 1);
    assert_eq!(hom(split.middle(), &lb).unwrap().len(), 1);
    assert_eq!(data.class_of(&split.cocycle()).unwrap(), vec![Q::zero()]);
}

#[test]
fn non_cocycle_is_rejected() {
    // for the square relation a*b - c*d, an arrow deformation must respect it
    let a = Arc::new(
        QuiverAlgebra::from_names(
            &["1", "2", "3", "4"],
            &[("a", "1", "2"), ("b", "2", "4"), ("c", "1", "3"), ("d", "3", "4")],
            &[vec![(1, vec!["a", "b"]), (-1, vec!["c", "d"])]],
        )
        .unwrap(),
    );
    let p1 = QuiverModule::projective(a.clone(), 0);
    let l4 = QuiverModule::simple(a.clone(), 3);
    let data = ext1(&p1, &l4).unwrap();
    assert_eq!(data.dim(), 0);
    // ζ_b = 1 alone breaks the relation
    let zeta = vec![Q::one(), Q::zero()];
    assert!(!data.is_cocycle(&zeta));
    assert!(ExtensionClass::from_cocycle(&p1, &l4, &zeta).is_err());
}

#[test]
fn kronecker_universal_extension_has_kernel_l_squared() {
    let k = Arc::new(samples::kronecker());
    let l1 = simple(&k, "1");
    let ue = universal_extension(&l1, 1).unwrap();
    assert_eq!(ue.e, 2);
    assert_eq!(ue.delta_rank, 2);
    assert_eq!(ue.class.injection.source.dims(), [0, 2]);
    assert_eq!(ue.class.middle().dims(), [1, 2]);
    assert_eq!(ue.ext_after, 0);
    // the middle is P_1
    let p1 = projective(&k, "1");
    assert!(hom(&p1, ue.class.middle()).unwrap().iter().any(QuiverMap::is_iso));
}

#[test]
fn universal_extension_refuses_projectives() {
    let k = Arc::new(samples::kronecker());
    let p1 = projective(&k, "1");
    assert!(matches!(universal_extension(&p1, 1), Err(ArtinError::NoExtension(_))));
    let a = p1q();
    assert!(matches!(universal_extension(&simple(&a, "s"), 0), Err(ArtinError::NoExtension(_))));
}

#[test]
fn cover_lifts_through_universal_extension() {
    let a = p1q();
    let lb = simple(&a, "b");
    let cover = projective_cover(&lb).unwrap();
    let ue = universal_extension(&lb, 0).unwrap();
    let lifted = lift_through(&cover, &ue.class.surjection).unwrap().unwrap();
    assert!(lifted.is_surjective());
    assert_eq!(lifted.then(&ue.class.surjection).unwrap(), cover);
}

#[test]
fn hull_of_lb_takes_two_steps() {
    let a = p1q();
    let h = projective_hull(&simple(&a, "b")).unwrap();
    let steps: Vec<(&str, usize)> = h.trace.iter().map(|s| (s.vertex.as_str(), s.ext_dim)).collect();
    assert_eq!(steps, [("s", 1), ("b", 1)]);
    assert_eq!(h.module.dims(), [1, 2]);
    assert!(h.epi.is_surjective());
    let pb = projective(&a, "b");
    assert!(hom(&pb, &h.module).unwrap().iter().any(QuiverMap::is_iso));
}

#[test]
fn hull_of_ls_takes_one_step() {
    let a = p1q();
    let h = projective_hull(&simple(&a, "s")).unwrap();
    assert_eq!(h.trace.len(), 1);
    assert_eq!(h.trace[0].vertex, "b");
    assert_eq!(h.module.dims(), [1, 1]);
}

#[test]
fn hull_of_projective_is_itself() {
    let a = p1q();
    let pb = projective(&a, "b");
    let h = projective_hull(&pb).unwrap();
    assert!(h.trace.is_empty());
    assert!(h.epi.is_iso());
}

#[test]
fn resolutions_of_simples() {
    let a = p1q();
    let rb = projective_resolution(&simple(&a, "b"), 8).unwrap();
    assert_eq!(rb.length(), 1);
    assert_eq!(rb.modules.iter().map(|q| q.dims().to_vec()).collect::<Vec<_>>(), [vec![1, 2], vec![1, 1]]);
    let rs = projective_resolution(&simple(&a, "s"), 8).unwrap();
    assert_eq!(rs.length(), 2);
    assert_eq!(
        rs.modules.iter().map(|q| q.dims().to_vec()).collect::<Vec<_>>(),
        [vec![1, 1], vec![1, 2], vec![1, 1]]
    );
    assert!(rs.is_exact());
    assert!(matches!(projective_resolution(&simple(&a, "s"), 1), Err(ArtinError::ResolutionCap(1))));
}

#[test]
fn higher_ext_by_resolution() {
    let a = p1q();
    let rs = projective_resolution(&simple(&a, "s"), 8).unwrap();
    assert_eq!(ext_dim_by_resolution(&rs, &simple(&a, "s"), 2).unwrap(), 1);
    assert_eq!(ext_dim_by_resolution(&rs, &simple(&a, "b"), 2).unwrap(), 0);
    assert_eq!(ext_dim_by_resolution(&rs, &simple(&a, "s"), 3).unwrap(), 0);
}

fn family(a: &Arc<QuiverAlgebra>) -> Vec<(String, Resolution)> {
    ["s", "b"].iter().map(|v| (v.to_string(), projective_resolution(&simple(a, v), 8).unwrap())).collect()
}

/// Ranks of multiplication between idempotent slices, keyed by labels and degrees.
fn product_table(alg: &DgAlgebra<i32>) -> BTreeMap<(String, i32, String, i32, String), usize> {
    let idem = alg.idempotents();
    let degrees: Vec<i32> = alg.basis().degrees().collect();
    let mut out = BTreeMap::new();
    for l in idem {
        for mid in idem {
            for r in idem {
                for &g in &degrees {
                    for &h in &degrees {
                        let xs = alg.slice_basis(&l.coords, g, &mid.coords);
                        let ys = alg.slice_basis(&mid.coords, h, &r.coords);
                        let prods: Vec<Vec<Q>> =
                            xs.iter().flat_map(|x| ys.iter().map(|y| alg.mul(x, y))).collect();
                        let rank = dgforge_core::exactla::rank_of(alg.dim(), &prods);
                        out.insert((l.label.clone(), g, mid.label.clone(), h, r.label.clone()), rank);
                    }
                }
            }
        }
    }
    out
}

#[test]
fn ext_algebra_of_p1q_simples_matches_p1e() {
    let a = p1q();
    let fam = family(&a);
    let end = resolution_end_dg_algebra(&fam).unwrap();
    let (h, coh) = ext_algebra(&end);
    assert_eq!(coh.dims(), BTreeMap::from([(0, 2), (1, 2), (2, 1)]));
    let p1e = samples::p1e();
    for l in ["s", "b"] {
        for r in ["s", "b"] {
            for g in 0..3 {
                let (el, er) = (&h.idempotent(l).unwrap().coords, &h.idempotent(r).unwrap().coords);
                let (fl, fr) = (&p1e.idempotent(l).unwrap().coords, &p1e.idempotent(r).unwrap().coords);
                assert_eq!(h.slice_dim(el, g, er), p1e.slice_dim(fl, g, fr), "slice {l},{g},{r}");
            }
        }
    }
    assert_eq!(product_table(&h), product_table(&p1e));
}

#[test]
fn end_blocks_match_ext_by_resolution() {
    // H^i(e_b End e_a) = Ext^i(L_a, L_b)
    let a = p1q();
    let fam = family(&a);
    let end = resolution_end_dg_algebra(&fam).unwrap();
    let (h, _) = ext_algebra(&end);
    for (alpha, res) in &fam {
        for beta in ["s", "b"] {
            for i in 0..3 {
                let expected = ext_dim_by_resolution(res, &simple(&a, beta), i as usize).unwrap();
                let got = h.slice_dim(&h.idempotent(beta).unwrap().coords, i, &h.idempotent(alpha).unwrap().coords);
                assert_eq!(got, expected, "Ext^{i}(L_{alpha}, L_{beta})");
            }
        }
    }
}

#[test]
fn end_bigrading_gives_weighted_formality() {
    let a = p1q();
    let end = resolution_end_dg_algebra(&family(&a)).unwrap();
    let weights = [0, 1];
    let js = end_bigrading(&end, &weights);
    let r = Arc::new(attach_bigrading(&end.algebra, &BigradingRule::Explicit(js)).unwrap());
    let w = weighted_sub_witness(&r, &weights).unwrap();
    assert!(w.passed());
    assert_eq!(w.cohomology.dim(), 5);
    // with these weights the classes sit off the diagonal
    assert!(formality_witness(&r).is_err());
}

#[test]
fn weights_rule_on_p1e_is_pure() {
    let p1e = samples::p1e();
    let r = Arc::new(attach_bigrading(&p1e, &BigradingRule::Weights(vec![0, 1])).unwrap());
    assert!(weighted_sub_witness(&r, &[0, 1]).unwrap().passed());
    let diag = Arc::new(attach_bigrading(&p1e, &BigradingRule::Diagonal).unwrap());
    assert!(formality_witness(&diag).unwrap().passed());
}

#[test]
fn inconsistent_bigrading_is_rejected() {
    let p1e = samples::p1e();
    let mut js: Vec<i32> = (0..p1e.dim()).map(|k| p1e.basis().deg(k).cohom()).collect();
    // bump u only: v*u = w no longer homogeneous
    let u = p1e.basis().index_of("u").unwrap();
    js[u] += 1;
    assert!(attach_bigrading(&p1e, &BigradingRule::Explicit(js)).is_err());
    assert!(attach_bigrading(&p1e, &BigradingRule::Explicit(vec![0])).is_err());
}
