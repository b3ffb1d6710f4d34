use std::collections::BTreeMap;
use std::sync::Arc;

use dgforge_core::exactla::{Field, Matrix, Q};
use dgforge_core::grdalg::{extend_scalars, hom_complex, AlgebraBuilder, DgAlgebra, DgaMorphism};
use dgforge_core::perf::{
    cone, filt_hom_complex, flag_analysis, minimal_model, t_structure_position, DgFiltModule, FiltMorphism,
    PerfAlgebra, PerfError,
};
use dgforge_core::samples::{self, random_filt};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn p1e() -> Arc<PerfAlgebra> {
    Arc::new(PerfAlgebra::new(Arc::new(samples::p1e())).unwrap())
}

fn eqpt() -> Arc<PerfAlgebra> {
    Arc::new(PerfAlgebra::new(Arc::new(samples::eqpt(6))).unwrap())
}

fn elem(owner: &PerfAlgebra, label: &str) -> Vec<Q> {
    let i = owner.algebra().basis().index_of(label).unwrap();
    owner.algebra().basis_vec(i)
}

fn simple(owner: &Arc<PerfAlgebra>, label: &str) -> DgFiltModule {
    DgFiltModule::induced_simple(owner.clone(), owner.label_index(label).unwrap()).unwrap()
}

/// Standard object: `(0,s), (0,b)` with `d(g_2) = g_1 v`.
fn standard(owner: &Arc<PerfAlgebra>) -> DgFiltModule {
    DgFiltModule::from_entries(owner.clone(), &[(0, "s"), (0, "b")], &[((0, 1), elem(owner, "v"))]).unwrap()
}

/// `A^0` as a product of fields and the projection `A -> A^0`.
fn degree_zero_projection(owner: &PerfAlgebra) -> DgaMorphism<i32> {
    let a = owner.algebra();
    let mut bl = AlgebraBuilder::new();
    let idx: Vec<usize> = (0..owner.label_count()).map(|v| bl.basis(owner.label(v), 0)).collect();
    for &i in &idx {
        bl.product_basis(i, i, i);
        bl.idempotent(a.idempotents()[i].label.clone(), vec![(i, Q::one())]);
    }
    bl.unit(idx.iter().map(|&i| (i, Q::one())).collect());
    let a0: DgAlgebra<i32> = bl.build().unwrap();
    let mut m = Matrix::zeros(a0.dim(), a.dim());
    for (v, e) in a.idempotents().iter().enumerate() {
        let k = e.coords.iter().position(|c| !c.is_zero()).unwrap();
        m[(v, k)] = e.coords[k].inv().unwrap();
    }
    DgaMorphism::new(a.clone(), Arc::new(a0), m).unwrap()
}

#[test]
fn single_summand_is_induced_simple() {
    let o = p1e();
    let m = DgFiltModule::from_entries(o.clone(), &[(0, "s")], &[]).unwrap();
    assert_eq!(m, simple(&o, "s"));
    assert_eq!(m.filtration(), vec![(0, "s".to_string())]);
}

#[test]
fn standard_two_summand_module_is_valid() {
    let o = p1e();
    assert_eq!(o.slice(0, 1, 1).dim(), 1);
    let m = standard(&o);
    assert_eq!(m.filtration(), vec![(0, "s".into()), (0, "b".into())]);
}

#[test]
fn unsorted_shifts_are_rejected() {
    let o = p1e();
    let err = DgFiltModule::from_entries(o, &[(-1, "s"), (0, "b")], &[]).unwrap_err();
    assert_eq!(err, PerfError::Unsorted(1));
}

#[test]
fn wrong_entry_degree_is_rejected() {
    let o = p1e();
    // x_12 must lie in e_s A^1 e_b, but w has degree 2
    let err = DgFiltModule::from_entries(o.clone(), &[(0, "s"), (0, "b")], &[((0, 1), elem(&o, "w"))]).unwrap_err();
    assert!(matches!(err, PerfError::EntryDegree { i: 0, j: 1, degree: 1, .. }));
    // u lies in e_b A e_s, the wrong idempotent type
    let err = DgFiltModule::from_entries(o.clone(), &[(0, "s"), (0, "b")], &[((0, 1), elem(&o, "u"))]).unwrap_err();
    assert!(matches!(err, PerfError::EntryDegree { .. }));
}

#[test]
fn nonzero_square_is_rejected() {
    let o = p1e();
    // d(g_2) = g_1 v, d(g_3) = g_2 u gives x^2 = vu = w at (1,3)
    let err = DgFiltModule::from_entries(
        o.clone(),
        &[(0, "s"), (0, "b"), (0, "s")],
        &[((0, 1), elem(&o, "v")), ((1, 2), elem(&o, "u"))],
    )
    .unwrap_err();
    assert_eq!(err, PerfError::NotSquareZero(0, 2));
}

#[test]
fn unknown_label_is_rejected() {
    let o = p1e();
    assert!(matches!(o.label_index("z"), Err(PerfError::UnknownLabel(_))));
}

#[test]
fn induced_simple_over_field_is_the_field() {
    let k = Arc::new(PerfAlgebra::new(Arc::new(DgAlgebra::field())).unwrap());
    let m = DgFiltModule::induced_simple(k, 0).unwrap().to_dg_module().unwrap();
    assert_eq!(m.dim(), 1);
    assert_eq!(m.cohomology().dims(), BTreeMap::from([(0, 1)]));
}

#[test]
fn induced_simple_has_components_of_right_ideal() {
    let o = p1e();
    let m = simple(&o, "s").to_dg_module().unwrap();
    let es = o.idempotent(0).to_vec();
    let mut expected = BTreeMap::new();
    for k in 0..=2 {
        let dim = o.algebra().slice_dim(&es, k, o.algebra().unit_vec());
        if dim > 0 {
            expected.insert(k, dim);
        }
    }
    let got: BTreeMap<i32, usize> = m.basis().degrees().map(|g| (g, m.basis().dim_in(g))).collect();
    assert_eq!(got, expected);
    assert!(m.complex().d_is_zero());
}

#[test]
fn hom_between_induced_simples_matches_slices() {
    for o in [p1e(), eqpt()] {
        for x in 0..o.label_count() {
            for y in 0..o.label_count() {
                let lx = DgFiltModule::induced_simple(o.clone(), x).unwrap();
                for k in -2..=4 {
                    let ly = DgFiltModule::induced_simple(o.clone(), y).unwrap().shift(k);
                    let h = filt_hom_complex(&lx, &ly).unwrap();
                    if let Some(d) = h.hom_dim(0) {
                        assert_eq!(d, o.slice(y, k, x).dim(), "x={x} y={y} k={k}");
                    }
                }
            }
        }
    }
}

#[test]
fn hom_examples() {
    let o = p1e();
    let (ls, lb) = (simple(&o, "s"), simple(&o, "b"));
    assert_eq!(filt_hom_complex(&ls, &ls).unwrap().hom_dim(0), Some(1));
    let h = filt_hom_complex(&ls, &lb.shift(1)).unwrap();
    assert_eq!(h.hom_dim(0), Some(1));
    let far = filt_hom_complex(&ls, &ls.shift(-5)).unwrap();
    assert_eq!(far.chain_dim(0), 0);
    assert_eq!(far.hom_dim(0), Some(0));
}

#[test]
fn hom_matches_generic_hom_complex() {
    let o = p1e();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..12 {
        let m = random_filt::module(&mut rng, &o, 2);
        let n = random_filt::module(&mut rng, &o, 2);
        let filt = filt_hom_complex(&m, &n).unwrap();
        let generic = hom_complex(&m.to_dg_module().unwrap(), &n.to_dg_module().unwrap()).unwrap();
        assert_eq!(filt.cohomology().dims(), generic.complex.cohomology().dims());
    }
}

#[test]
fn cone_of_identity_is_contractible() {
    for o in [p1e(), eqpt()] {
        for x in 0..o.label_count() {
            let lx = DgFiltModule::induced_simple(o.clone(), x).unwrap();
            let c = cone(&FiltMorphism::identity(&lx)).unwrap();
            for y in 0..o.label_count() {
                let ly = DgFiltModule::induced_simple(o.clone(), y).unwrap();
                let h = filt_hom_complex(&c, &ly).unwrap();
                let (lo, hi) = h.degree_range().unwrap();
                for k in lo - 1..=hi + 1 {
                    assert!(h.hom_dim(k).is_none_or(|d| d == 0), "k={k}");
                }
            }
            assert!(minimal_model(&c).unwrap().is_empty());
        }
    }
}

#[test]
fn cone_of_zero_is_direct_sum() {
    let o = p1e();
    let m = standard(&o);
    let n = simple(&o, "b").shift(-1);
    let zero = vec![vec![o.zero(); m.len()]; n.len()];
    let f = FiltMorphism::new(m.clone(), n.clone(), zero).unwrap();
    let c = cone(&f).unwrap();
    assert_eq!(c, DgFiltModule::direct_sum(&[&n, &m.shift(1)]).unwrap());
}

#[test]
fn cone_into_standard_module_has_three_steps() {
    let o = p1e();
    let m = standard(&o);
    let ls = simple(&o, "s");
    let f = FiltMorphism::new(ls.clone(), m, vec![vec![o.idempotent(0).to_vec()], vec![o.zero()]]).unwrap();
    let c = cone(&f).unwrap();
    assert_eq!(c.filtration(), vec![(1, "s".into()), (0, "s".into()), (0, "b".into())]);
    let pos = t_structure_position(&c).unwrap();
    assert_eq!(pos.segment(), Some((0, 0)));
    assert_eq!(minimal_model(&c).unwrap().filtration(), vec![(0, "b".to_string())]);
}

#[test]
fn non_chain_map_is_rejected() {
    let o = p1e();
    let m = standard(&o);
    let lb = simple(&o, "b");
    // g_b -> g_2 is not a chain map: d(g_2) = g_1 v has no preimage
    let f = vec![vec![o.zero()], vec![o.idempotent(1).to_vec()]];
    assert!(matches!(FiltMorphism::new(lb, m, f), Err(PerfError::NotChainMap(..))));
}

#[test]
fn positions_of_shifted_simples() {
    let o = p1e();
    for l in -2..=2 {
        let m = simple(&o, "s").shift(l);
        assert_eq!(t_structure_position(&m).unwrap().segment(), Some((-l, -l)));
    }
}

#[test]
fn positive_connecting_entry_spans_both_degrees() {
    let o = p1e();
    let m = DgFiltModule::from_entries(o.clone(), &[(0, "s"), (-1, "s")], &[((0, 1), elem(&o, "w"))]).unwrap();
    let pos = t_structure_position(&m).unwrap();
    assert_eq!(pos.segment(), Some((0, 1)));
    assert_eq!(pos.reduced_cohomology, BTreeMap::from([(0, 1), (1, 1)]));
}

#[test]
fn reduction_matches_generic_extension_of_scalars() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for o in [p1e(), eqpt()] {
        let phi = degree_zero_projection(&o);
        for _ in 0..15 {
            let m = random_filt::module(&mut rng, &o, 3);
            let pos = t_structure_position(&m).unwrap();
            let reduced = extend_scalars(&m.to_dg_module().unwrap(), &phi).unwrap();
            assert_eq!(reduced.cohomology().dims(), pos.reduced_cohomology);
        }
    }
}

#[test]
fn criteria_agree_on_random_modules() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut nontrivial = 0;
    for o in [p1e(), eqpt()] {
        for _ in 0..60 {
            let m = random_filt::module(&mut rng, &o, 3);
            let pos = t_structure_position(&m).unwrap();
            assert!(pos.agree());
            if minimal_model(&m).unwrap().len() < m.len() {
                nontrivial += 1;
            }
        }
    }
    assert!(nontrivial > 10, "only {nontrivial} modules had cancellations");
}

#[test]
fn minimal_model_preserves_hom() {
    let o = p1e();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let m = random_filt::module(&mut rng, &o, 3);
        let min = minimal_model(&m).unwrap();
        for y in 0..o.label_count() {
            let ly = DgFiltModule::induced_simple(o.clone(), y).unwrap();
            let a = filt_hom_complex(&m, &ly).unwrap().cohomology().dims();
            let b = filt_hom_complex(&min, &ly).unwrap().cohomology().dims();
            assert_eq!(a, b);
        }
    }
}

#[test]
fn flag_examples() {
    let o = p1e();
    assert_eq!(flag_analysis(&simple(&o, "s")), Some(BTreeMap::from([("s".into(), 1)])));
    assert_eq!(flag_analysis(&standard(&o)), Some(BTreeMap::from([("b".into(), 1), ("s".into(), 1)])));
    assert_eq!(flag_analysis(&simple(&o, "s").shift(1)), None);
}

#[test]
fn flag_analysis_is_additive() {
    let o = p1e();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let a = random_filt::module(&mut rng, &o, 2);
        let b = random_filt::module(&mut rng, &o, 2);
        let sum = DgFiltModule::direct_sum(&[&a, &b]).unwrap();
        match (flag_analysis(&a), flag_analysis(&b)) {
            (Some(x), Some(y)) => {
                let mut z = x.clone();
                for (k, v) in y {
                    *z.entry(k).or_insert(0) += v;
                }
                assert_eq!(flag_analysis(&sum), Some(z));
            }
            _ => assert_eq!(flag_analysis(&sum), None),
        }
    }
}

#[test]
fn homotopy_check() {
    let o = p1e();
    let ls = simple(&o, "s");
    let c = cone(&FiltMorphism::identity(&ls)).unwrap();
    let id = FiltMorphism::identity(&c);
    assert!(id.is_null_homotopic().unwrap());
    let zero = FiltMorphism::new(c.clone(), c.clone(), vec![vec![o.zero(); 2]; 2]).unwrap();
    // c = (1,s),(0,s) with d(g_1) = g_2; h(g_2) = g_1 contracts
    let mut h = vec![vec![o.zero(); 2]; 2];
    h[0][1] = o.idempotent(0).to_vec();
    id.check_homotopy(&zero, &h).unwrap();
    assert!(!FiltMorphism::identity(&ls).is_null_homotopic().unwrap());
}
