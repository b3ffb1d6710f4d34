use std::sync::Arc;

use dgforge_core::exactla::{Field, Matrix, Q};
use dgforge_core::exec::Exec;
use dgforge_core::grdalg::DgaMorphism;
use dgforge_core::lift::{Segment, TruncatedIso};
use dgforge_core::limits::{
    lim_hom, limit_algebra, limit_equivalence_report, stabilization_stage, transport_object, validate_tower,
    AlgebraTower, LimitError, LimitObject,
};
use dgforge_core::perf::{cone, DgFiltModule, FiltMorphism};
use dgforge_core::samples::{self, random_filt};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn seg(a: i32, b: i32) -> Segment {
    Segment::new(a, b).unwrap()
}

fn power(t: &AlgebraTower, stage: usize, k: usize) -> Vec<Q> {
    let mut v = vec![Q::zero(); t.stage(stage).dim()];
    v[k] = Q::one();
    v
}

#[test]
fn eqpt_tower_agreements() {
    let t = AlgebraTower::eqpt(5);
    let rep = validate_tower(&t).unwrap();
    let rs: Vec<i32> = rep.agreements.iter().map(|a| a.r).collect();
    assert_eq!(rs, vec![1, 3, 5, 7, 9]);
}

#[test]
fn constant_tower_is_window_capped() {
    let t = AlgebraTower::constant(Arc::new(samples::eqpt(6)), 3);
    let rep = validate_tower(&t).unwrap();
    assert!(rep.agreements.iter().all(|a| a.r == 6 && a.capped));
    assert_eq!(stabilization_stage(&t, seg(0, 1)).unwrap(), 0);
}

#[test]
fn killing_an_idempotent_violates_s3() {
    let p = Arc::new(samples::p1e());
    // e_b is sent onto e_s and everything else to zero
    let mut m = Matrix::zeros(p.dim(), p.dim());
    m[(0, 0)] = Q::one();
    m[(0, 1)] = Q::one();
    let phi = DgaMorphism { source: p.clone(), target: p.clone(), matrix: m };
    let t = AlgebraTower::new(vec![p.clone(), p], vec![phi]).unwrap();
    assert!(matches!(validate_tower(&t), Err(LimitError::Connecting { map: 0, .. })));
}

#[test]
fn stabilization_stages() {
    let t = AlgebraTower::eqpt(5);
    assert_eq!(stabilization_stage(&t, seg(0, 1)).unwrap(), 1);
    assert_eq!(stabilization_stage(&t, seg(0, 3)).unwrap(), 2);
    assert!(matches!(stabilization_stage(&t, seg(0, 10)), Err(LimitError::Uncertifiable { needed: 12 })));
}

#[test]
fn limit_of_constant_tower_is_the_stage() {
    let a = Arc::new(samples::p1e());
    let t = AlgebraTower::constant(a.clone(), 2);
    let lim = limit_algebra(&t, 2).unwrap();
    assert_eq!(lim.algebra.dim(), a.dim());
    assert_eq!(lim.stage, 0);
}

#[test]
fn eqpt_limit_through_degree_six() {
    let t = AlgebraTower::eqpt(5);
    let lim = limit_algebra(&t, 6).unwrap();
    assert_eq!(lim.stage, 3);
    let e = samples::eqpt(6);
    assert_eq!(lim.algebra.dim(), e.dim());
    for i in 0..e.dim() {
        for j in 0..e.dim() {
            assert_eq!(lim.algebra.mul_basis(i, j), e.mul_basis(i, j));
        }
    }
    for n in 0..t.len() - 1 {
        assert_eq!(lim.projections[n].matrix, lim.projections[n + 1].then(t.map(n)).unwrap().matrix);
    }
    let s: Vec<i32> = lim.agreements.iter().map(|a| a.r).collect();
    assert_eq!(s, vec![1, 3, 5, 6, 6, 6]);
}

#[test]
fn limit_needs_enough_stages() {
    let t = AlgebraTower::eqpt(2);
    assert!(matches!(limit_algebra(&t, 6), Err(LimitError::Uncertifiable { .. })));
}

#[test]
fn transport_examples() {
    let t = AlgebraTower::eqpt(3);
    let a2 = t.perf_stage(2).unwrap();
    let m = DgFiltModule::from_entries(a2.clone(), &[(0, "*"), (-3, "*")], &[((0, 1), power(&t, 2, 2))]).unwrap();
    assert_eq!(transport_object(&m, &t, 2, 2).unwrap(), m);
    let down = transport_object(&m, &t, 2, 1).unwrap();
    assert!(down.entry(0, 1).iter().all(Q::is_zero));
    let free = DgFiltModule::induced_simple(a2, 0).unwrap();
    let f0 = transport_object(&free, &t, 2, 0).unwrap();
    assert_eq!(f0.filtration(), free.filtration());
}

#[test]
fn transport_is_associative_and_commutes_with_cone_and_shift() {
    let t = AlgebraTower::eqpt(3);
    let a3 = t.perf_stage(3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..15 {
        let m = random_filt::module(&mut rng, &a3, 2);
        let direct = transport_object(&m, &t, 3, 0).unwrap();
        let stepped = transport_object(&transport_object(&m, &t, 3, 2).unwrap(), &t, 2, 0).unwrap();
        assert_eq!(direct, stepped);
        assert_eq!(transport_object(&m.shift(1), &t, 3, 1).unwrap(), transport_object(&m, &t, 3, 1).unwrap().shift(1));

        let n = random_filt::module(&mut rng, &a3, 2);
        let f = random_filt::chain_map(&mut rng, &m, &n);
        let iso = TruncatedIso::new(t.composite(3, 1).unwrap()).unwrap();
        let down = iso.push_morphism(&f).unwrap();
        assert_eq!(transport_object(&cone(&f).unwrap(), &t, 3, 1).unwrap(), cone(&down).unwrap());
    }
}

#[test]
fn lim_hom_of_simple() {
    let t = AlgebraTower::eqpt(5);
    let lim = limit_algebra(&t, 6).unwrap();
    let l = DgFiltModule::induced_simple(lim.perf().clone(), 0).unwrap();
    let x = LimitObject::from_limit(&l, &t, &lim).unwrap();
    let rows = lim_hom(&x, &x, &t, seg(0, 1), -1..=4).unwrap();
    let dims: Vec<(i32, Option<usize>)> = rows.iter().map(|r| (r.shift, r.dim)).collect();
    assert_eq!(dims, vec![(-1, Some(0)), (0, Some(1)), (1, Some(0)), (2, Some(1)), (3, Some(0)), (4, Some(1))]);
    assert_eq!(rows[1].stage, Some(1));
    assert!(rows.iter().all(|r| r.cross_checked));
}

#[test]
fn lim_hom_is_stage_stable() {
    let t = AlgebraTower::eqpt(5);
    let lim = limit_algebra(&t, 6).unwrap();
    let o = lim.perf().clone();
    let c = {
        let mut v = o.zero();
        v[1] = Q::one();
        v
    };
    let m = DgFiltModule::from_entries(o.clone(), &[(0, "*"), (-1, "*")], &[((0, 1), c)]).unwrap();
    let x = LimitObject::from_limit(&m, &t, &lim).unwrap();
    let n = stabilization_stage(&t, seg(0, 1)).unwrap();
    let base = dgforge_core::perf::filt_hom_complex(&x.modules[n], &x.modules[n]).unwrap();
    let r = t.agreements()[n].r;
    for s in n..t.len() {
        let h = dgforge_core::perf::filt_hom_complex(&x.modules[s], &x.modules[s]).unwrap();
        for k in -2..=r - 2 {
            assert_eq!(h.hom_dim(k), base.hom_dim(k), "stage {s} shift {k}");
        }
    }
}

#[test]
fn limit_equivalence_on_probes() {
    let t = AlgebraTower::eqpt(5);
    let lim = limit_algebra(&t, 6).unwrap();
    let probes = dgforge_core::lift::default_probes(lim.perf(), seg(0, 1));
    let rep = limit_equivalence_report(&t, seg(0, 1), &lim, &probes, Exec::Parallel).unwrap();
    assert!(rep.passed(), "{:?}", rep.first_failure());
    assert!(rep.rows.len() > 10);

    let constant = AlgebraTower::constant(Arc::new(samples::p1e()), 2);
    let clim = limit_algebra(&constant, 3).unwrap();
    let cprobes = dgforge_core::lift::default_probes(clim.perf(), seg(0, 1));
    assert!(limit_equivalence_report(&constant, seg(0, 1), &clim, &cprobes, Exec::Sequential).unwrap().passed());
}

#[test]
fn probe_outside_window_is_refused() {
    let t = AlgebraTower::eqpt(5);
    let lim = limit_algebra(&t, 2).unwrap();
    let probes = vec![DgFiltModule::induced_simple(lim.perf().clone(), 0).unwrap()];
    assert!(matches!(
        limit_equivalence_report(&t, seg(0, 1), &lim, &probes, Exec::Sequential),
        Err(LimitError::Window { .. })
    ));
    let lim6 = limit_algebra(&t, 6).unwrap();
    let outside = vec![DgFiltModule::induced_simple(lim6.perf().clone(), 0).unwrap().shift(-3)];
    assert!(matches!(
        limit_equivalence_report(&t, seg(0, 1), &lim6, &outside, Exec::Sequential),
        Err(LimitError::OutsideSegment(_))
    ));
}

#[test]
fn witnesses_must_be_inverse() {
    let t = AlgebraTower::eqpt(1);
    let (a0, a1) = (t.perf_stage(0).unwrap(), t.perf_stage(1).unwrap());
    let m1 = DgFiltModule::induced_simple(a1, 0).unwrap();
    let m0 = DgFiltModule::induced_simple(a0.clone(), 0).unwrap();
    let two = vec![vec![a0.idempotent(0).iter().map(|c| c.add(c)).collect::<Vec<_>>()]];
    let w = FiltMorphism::new(m0.clone(), m0.clone(), two).unwrap();
    let id = FiltMorphism::identity(&m0);
    assert!(matches!(LimitObject::new(&t, vec![m0.clone(), m1.clone()], vec![(w, id.clone())]), Err(LimitError::Witness(0))));
    assert!(LimitObject::new(&t, vec![m0, m1], vec![(id.clone(), id)]).is_ok());
}
