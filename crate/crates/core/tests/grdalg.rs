use std::collections::BTreeMap;
use std::sync::Arc;

use dgforge_core::exactla::{Field, Matrix, Q};
use dgforge_core::grdalg::{
    bimodule_tensor_equivalence_witness, end_dg_algebra, extend_scalars, hom_complex, AlgebraBuilder, BimoduleSetup,
    DgAlgebra, DgBimodule, DgModule, DgaMorphism, GrdError, ModuleMap,
};
use dgforge_core::samples;

fn q(v: i64) -> Q {
    Q::from_int(v)
}

#[test]
fn base_field_is_valid() {
    let k = DgAlgebra::<i32>::field();
    assert_eq!(k.dim(), 1);
    assert!(k.check_positive().is_ok());
}

#[test]
fn eqpt_is_valid_with_expected_dims() {
    let a = samples::eqpt(6);
    let dims: Vec<usize> = (0..=7).map(|g| a.basis().dim_in(g)).collect();
    assert_eq!(dims, vec![1, 0, 1, 0, 1, 0, 1, 0]);
    assert!(a.check_positive().is_ok());
}

#[test]
fn non_orthogonal_idempotents_are_rejected() {
    let mut b = AlgebraBuilder::<i32>::new();
    let e = b.basis("e", 0);
    let f = b.basis("f", 0);
    b.product_basis(e, e, e).product_basis(f, f, f).product_basis(e, f, e).product_basis(f, e, f);
    b.unit(vec![(e, q(1)), (f, q(1))]);
    b.idempotent("e", vec![(e, q(1))]).idempotent("f", vec![(f, q(1))]);
    let err = b.build().unwrap_err();
    assert!(matches!(err, GrdError::Unit(_) | GrdError::Associativity(..) | GrdError::Idempotent(_)), "{err}");
}

#[test]
fn orthogonality_failure_is_named() {
    let mut b = AlgebraBuilder::<i32>::new();
    let u = b.basis("1", 0);
    b.unit_basis(u);
    b.idempotent("x", vec![(u, q(1))]).idempotent("y", vec![(u, q(1))]);
    let err = b.build().unwrap_err();
    assert_eq!(err, GrdError::Idempotent("x and y are not orthogonal".into()));
}

#[test]
fn cohomology_of_zero_differential_is_itself() {
    let a = samples::eqpt(6);
    let (h, _) = a.cohomology_algebra();
    for g in 0..=6 {
        assert_eq!(h.basis().dim_in(g), a.basis().dim_in(g));
    }
    let dims: BTreeMap<i32, usize> = a.cohomology().dims();
    assert_eq!(dims, BTreeMap::from([(0, 1), (2, 1), (4, 1), (6, 1)]));
}

#[test]
fn gamma5_single_graded_cohomology() {
    let a = samples::gamma5().regrade(|b| b.i).unwrap();
    let h = a.cohomology();
    assert_eq!((h.dim(0), h.dim(1), h.dim(2)), (1, 1, 0));
}

#[test]
fn hom_from_free_module_is_the_module() {
    let a = Arc::new(samples::poly_trunc(3));
    let free = DgModule::free(a.clone());
    let hc = hom_complex(&free, &free).unwrap();
    for g in -6..=6 {
        let expect = if g >= 0 { a.basis().dim_in(g) } else { 0 };
        assert_eq!(hc.dim_in(g), expect, "degree {g}");
    }
}

#[test]
fn hom_from_free_matches_cohomology_of_target() {
    let r = Arc::new(samples::gamma5().regrade(|b| b.i).unwrap());
    let free = DgModule::free(r.clone());
    let hc = hom_complex(&free, &free).unwrap();
    let h = hc.complex.cohomology();
    let hr = r.cohomology();
    for g in -2..=2 {
        assert_eq!(h.dim(g), hr.dim(g), "degree {g}");
    }
}

#[test]
fn identity_class_survives_in_end_cohomology() {
    let r = Arc::new(samples::gamma5().regrade(|b| b.i).unwrap());
    let m = DgModule::free(r);
    let (end, _) = end_dg_algebra(&m, &[]).unwrap();
    assert!(end.d_of(end.unit_vec()).iter().all(Q::is_zero));
    let h = end.cohomology();
    let class = h.class_in(end.basis(), end.unit_vec(), 0).unwrap();
    assert!(class.iter().any(|c| !c.is_zero()));
}

#[test]
fn end_of_one_dimensional_module_is_the_field() {
    let k = Arc::new(DgAlgebra::<i32>::field());
    let m = DgModule::free(k);
    let (end, _) = end_dg_algebra(&m, &[]).unwrap();
    assert_eq!(end.dim(), 1);
    assert_eq!(end.mul(end.unit_vec(), end.unit_vec()), end.unit_vec());
}

#[test]
fn sign_law_of_hom_differential() {
    let r = Arc::new(samples::gamma5().regrade(|b| b.i).unwrap());
    let m = DgModule::free(r.clone());
    let n = m.shift(1);
    let hc = hom_complex(&m, &n).unwrap();
    let dm = Matrix::from_columns(m.dim(), &(0..m.dim()).map(|i| m.d_of(&m.basis_vec(i))).collect::<Vec<_>>());
    let dn = Matrix::from_columns(n.dim(), &(0..n.dim()).map(|i| n.d_of(&n.basis_vec(i))).collect::<Vec<_>>());
    for (i, f) in hc.maps.iter().enumerate() {
        let g = hc.complex.basis.deg(i);
        let s = if g % 2 == 0 { q(1) } else { q(-1) };
        let expect = dn.mul(f).unwrap().sub(&f.mul(&dm).unwrap().scale(&s)).unwrap();
        let df = hc.complex.apply_d(&hc.complex.basis.embed(&[], g).iter().enumerate().map(|(k, _)| if k == i { q(1) } else { q(0) }).collect::<Vec<_>>());
        let mut got = Matrix::zeros(n.dim(), m.dim());
        for (k, c) in df.iter().enumerate() {
            if !c.is_zero() {
                got = got.add(&hc.maps[k].scale(c)).unwrap();
            }
        }
        assert_eq!(got, expect, "basis map {i}");
    }
}

#[test]
fn identity_is_quasi_iso_and_zero_is_not() {
    let a = Arc::new(samples::eqpt(6));
    assert!(DgaMorphism::identity(a.clone()).is_quasi_iso());
    let m = DgModule::free(a.clone());
    let zero = ModuleMap::zero(&m, &m, 0);
    assert!(!zero.quasi_iso_report(&m, &m).is_qiso());
    assert!(ModuleMap::identity(&m).quasi_iso_report(&m, &m).is_qiso());
}

#[test]
fn extend_scalars_of_unit_module_is_target() {
    let a = Arc::new(samples::eqpt(6));
    let b = Arc::new(samples::poly_trunc(1));
    let phi = samples::poly_projection(a.clone(), b.clone());
    let m = extend_scalars(&DgModule::free(a.clone()), &phi).unwrap();
    for g in 0..=6 {
        assert_eq!(m.basis().dim_in(g), b.basis().dim_in(g));
    }
}

#[test]
fn extend_scalars_of_right_ideal() {
    let a = Arc::new(samples::wsub().regrade(|b| b.i).unwrap());
    let e1 = a.idempotent("e1").unwrap().coords.clone();
    let m = DgModule::right_ideal(a.clone(), &e1).unwrap();
    let phi = DgaMorphism::identity(a.clone());
    let ext = extend_scalars(&m, &phi).unwrap();
    for g in -1..=3 {
        assert_eq!(ext.basis().dim_in(g), m.basis().dim_in(g), "degree {g}");
    }
}

#[test]
fn extend_scalars_of_c_times_a_is_shifted_target() {
    let a = Arc::new(samples::eqpt(6));
    let b = Arc::new(samples::poly_trunc(1));
    let c = a.basis_vec(1);
    let ca = DgModule::right_ideal(a.clone(), &c).unwrap();
    assert_eq!(ca.dim(), 3);
    let phi = samples::poly_projection(a, b.clone());
    let m = extend_scalars(&ca, &phi).unwrap();
    // c·A is free on c in degree 2, so the result is {-2}B
    let dims: Vec<usize> = (0..=6).map(|g| m.basis().dim_in(g)).collect();
    assert_eq!(dims, vec![0, 0, 1, 0, 1, 0, 0]);
}

#[test]
fn extend_scalars_preserves_free_dims_along_quasi_iso() {
    let a = Arc::new(samples::wsub().regrade(|b| b.i).unwrap());
    let id = DgaMorphism::identity(a.clone());
    for e in a.idempotents() {
        let m = DgModule::right_ideal(a.clone(), &e.coords).unwrap();
        let ext = extend_scalars(&m, &id).unwrap();
        assert_eq!(ext.dim(), m.dim());
    }
}

fn witness_on_regular(n_scale: i64) -> bool {
    let a = Arc::new(samples::gamma5().regrade(|b| b.i).unwrap());
    let bim = DgBimodule::regular(a.clone());
    let id = DgaMorphism::identity(a.clone());
    let chi = ModuleMap { degree: 0, matrix: Matrix::identity(a.dim()) };
    let n: Vec<Q> = a.unit_vec().iter().map(|c| c * &q(n_scale)).collect();
    let setup = BimoduleSetup { phi: &id, psi: &id, n_mod: &bim, m_mod: &bim, chi: &chi, n };
    bimodule_tensor_equivalence_witness(&setup).unwrap().passed
}

#[test]
fn bimodule_witness_identity_and_zero() {
    assert!(witness_on_regular(1));
    assert!(!witness_on_regular(0));
}

#[test]
fn bimodule_witness_rejects_non_cocycle() {
    let a = Arc::new(samples::gamma5().regrade(|b| b.i).unwrap());
    let bim = DgBimodule::regular(a.clone());
    let id = DgaMorphism::identity(a.clone());
    let chi = ModuleMap { degree: 0, matrix: Matrix::identity(a.dim()) };
    let b = a.basis().index_of("b").unwrap();
    let setup = BimoduleSetup { phi: &id, psi: &id, n_mod: &bim, m_mod: &bim, chi: &chi, n: a.basis_vec(b) };
    assert!(matches!(bimodule_tensor_equivalence_witness(&setup), Err(GrdError::NotCocycle(_))));
}
