//! Named fixture algebras shared by tests, benches and the CLI.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::exactla::{Field, Matrix, Q};
use crate::grdalg::{AlgebraBuilder, Bideg, BimoduleBuilder, DgAlgebra, DgBimodule, DgaMorphism, Grading, SparseVec};

fn one() -> Q {
    Q::one()
}

/// `Q[c]` with `deg c = 2`, truncated at degree `d` (window `d`).
pub fn eqpt(d: i32) -> DgAlgebra<i32> {
    let mut b = poly_builder(d / 2);
    b.truncation(d);
    b.build().expect("eqpt is valid")
}

/// `Q[c]/(c^{n+1})` with `deg c = 2`, no truncation window.
pub fn poly_trunc(n: i32) -> DgAlgebra<i32> {
    poly_builder(n).build().expect("truncated polynomial algebra is valid")
}

fn poly_builder(top: i32) -> AlgebraBuilder<i32> {
    let mut b = AlgebraBuilder::new();
    let idx: Vec<usize> = (0..=top).map(|k| b.basis(if k == 0 { "1".into() } else { format!("c^{k}") }, 2 * k)).collect();
    b.unit_basis(idx[0]);
    for p in 1..=top {
        for q in 1..=top {
            if p + q <= top {
                b.product_basis(idx[p as usize], idx[q as usize], idx[(p + q) as usize]);
            }
        }
    }
    b
}

/// The projection `Q[c]/(c^{n+1}) -> Q[c]/(c^{m+1})` (or from a truncated
/// `eqpt`), sending `c^k` to `c^k` when `k <= m` and to zero otherwise.
pub fn poly_projection(source: Arc<DgAlgebra<i32>>, target: Arc<DgAlgebra<i32>>) -> DgaMorphism<i32> {
    let mut m = Matrix::zeros(target.dim(), source.dim());
    for k in 0..source.dim().min(target.dim()) {
        m[(k, k)] = one();
    }
    DgaMorphism::new(source, target, m).expect("projection is a dga morphism")
}

/// GAMMA5: `1` at (0,0), `a` at (1,1), `b` at (1,2), `c` at (2,2), `db = c`,
/// all products of non-unit elements zero.
pub fn gamma5() -> DgAlgebra<Bideg> {
    gamma5_with(true)
}

/// GAMMA5 with `db = 0`: cohomology gains `b` at (1,2), breaking purity.
pub fn gamma5_impure() -> DgAlgebra<Bideg> {
    gamma5_with(false)
}

fn gamma5_with(db: bool) -> DgAlgebra<Bideg> {
    let mut bl = AlgebraBuilder::new();
    let u = bl.basis("1", Bideg::new(0, 0));
    bl.basis("a", Bideg::new(1, 1));
    let b = bl.basis("b", Bideg::new(1, 2));
    let c = bl.basis("c", Bideg::new(2, 2));
    bl.unit_basis(u);
    if db {
        bl.differential(b, vec![(c, one())]);
    }
    bl.build().expect("GAMMA5 is valid")
}

/// WSUB: idempotents `e1`, `e2` at (0,0); `t = e2 t e1` at (0,1); inside
/// `e1 R e1` a copy of GAMMA5's `a`, `b`, `c` with `db = c`. Weights
/// `n1 = 0`, `n2 = 1` (see [`wsub_weights`]).
pub fn wsub() -> DgAlgebra<Bideg> {
    let mut bl = AlgebraBuilder::new();
    let e1 = bl.basis("e1", Bideg::new(0, 0));
    let e2 = bl.basis("e2", Bideg::new(0, 0));
    let t = bl.basis("t", Bideg::new(0, 1));
    let a = bl.basis("a", Bideg::new(1, 1));
    let b = bl.basis("b", Bideg::new(1, 2));
    let c = bl.basis("c", Bideg::new(2, 2));
    bl.product_basis(e1, e1, e1).product_basis(e2, e2, e2);
    bl.product_basis(e2, t, t).product_basis(t, e1, t);
    for x in [a, b, c] {
        bl.product_basis(e1, x, x).product_basis(x, e1, x);
    }
    bl.differential(b, vec![(c, one())]);
    bl.unit(vec![(e1, one()), (e2, one())]);
    bl.idempotent("e1", vec![(e1, one())]);
    bl.idempotent("e2", vec![(e2, one())]);
    bl.build().expect("WSUB is valid")
}

pub fn wsub_weights() -> Vec<i32> {
    vec![0, 1]
}

/// `R ⊕ Cone(id_R)` as an `R`-`R`-bimodule. The cone has elements `(x, y)`
/// with `y` in `{1}R`, `d(x, y) = (dx + y, -dy)`, `a(x, y) = (ax, (-1)^|a| ay)`
/// and `(x, y)b = (xb, yb)`. The first summand's inclusion `R -> M` is a
/// quasi-isomorphism; its value at `1` is the witness element.
pub fn with_cone_summand<G: Grading>(r: Arc<DgAlgebra<G>>) -> DgBimodule<G> {
    let n = r.dim();
    let mut bl = BimoduleBuilder::new(r.clone(), r.clone());
    let base = |k: usize| k;
    let xs = |k: usize| n + k;
    let ys = |k: usize| 2 * n + k;
    for k in 0..n {
        bl.basis(r.basis().label(k).to_string(), r.basis().deg(k));
    }
    for k in 0..n {
        bl.basis(format!("x.{}", r.basis().label(k)), r.basis().deg(k));
    }
    for k in 0..n {
        bl.basis(format!("y.{}", r.basis().label(k)), r.basis().deg(k).shifted(1));
    }
    let shift_to = |v: &SparseVec, f: &dyn Fn(usize) -> usize, s: &Q| -> SparseVec {
        v.iter().map(|(k, c)| (f(*k), s * c)).collect()
    };
    let plus = Q::one();
    let minus = -Q::one();
    for k in 0..n {
        let dk = &r.complex().d[k];
        bl.differential(base(k), shift_to(dk, &base, &plus));
        bl.differential(xs(k), shift_to(dk, &xs, &plus));
        let mut dy = shift_to(dk, &ys, &minus);
        dy.push((xs(k), plus.clone()));
        bl.differential(ys(k), dy);
        for a in 0..n {
            let sa = if r.basis().deg(a).cohom() % 2 == 0 { plus.clone() } else { minus.clone() };
            bl.left_action(a, base(k), shift_to(r.mul_basis(a, k), &base, &plus));
            bl.left_action(a, xs(k), shift_to(r.mul_basis(a, k), &xs, &plus));
            bl.left_action(a, ys(k), shift_to(r.mul_basis(a, k), &ys, &sa));
            bl.right_action(base(k), a, shift_to(r.mul_basis(k, a), &base, &plus));
            bl.right_action(xs(k), a, shift_to(r.mul_basis(k, a), &xs, &plus));
            bl.right_action(ys(k), a, shift_to(r.mul_basis(k, a), &ys, &plus));
        }
    }
    bl.build().expect("R ⊕ Cone(id_R) is a valid bimodule")
}

/// Direct product `A × B`; idempotents of both factors are kept (prefixed).
pub fn product<G: Grading>(a: &DgAlgebra<G>, b: &DgAlgebra<G>) -> DgAlgebra<G> {
    let na = a.dim();
    let mut bl = AlgebraBuilder::new();
    for k in 0..na {
        bl.basis(format!("L.{}", a.basis().label(k)), a.basis().deg(k));
    }
    for k in 0..b.dim() {
        bl.basis(format!("R.{}", b.basis().label(k)), b.basis().deg(k));
    }
    let off = |v: &SparseVec, o: usize| -> SparseVec { v.iter().map(|(k, c)| (k + o, c.clone())).collect() };
    for x in 0..na {
        for y in 0..na {
            bl.product(x, y, a.mul_basis(x, y).clone());
        }
        bl.differential(x, a.complex().d[x].clone());
    }
    for x in 0..b.dim() {
        for y in 0..b.dim() {
            bl.product(na + x, na + y, off(b.mul_basis(x, y), na));
        }
        bl.differential(na + x, off(&b.complex().d[x], na));
    }
    let sparse = |v: &[Q], o: usize| -> SparseVec {
        v.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(k, c)| (k + o, c.clone())).collect()
    };
    let mut unit = sparse(a.unit_vec(), 0);
    unit.extend(sparse(b.unit_vec(), na));
    bl.unit(unit);
    for e in a.idempotents() {
        bl.idempotent(format!("L.{}", e.label), sparse(&e.coords, 0));
    }
    for e in b.idempotents() {
        bl.idempotent(format!("R.{}", e.label), sparse(&e.coords, na));
    }
    if let (Some(x), Some(y)) = (a.truncation(), b.truncation()) {
        bl.truncation(x.min(y));
    }
    bl.build().expect("product of valid algebras is valid")
}

/// Graded tensor product `A ⊗ B` with the Koszul sign on the first component.
/// Both factors must have a single idempotent.
pub fn tensor<G: Grading>(a: &DgAlgebra<G>, b: &DgAlgebra<G>) -> DgAlgebra<G> {
    let nb = b.dim();
    let idx = |i: usize, j: usize| i * nb + j;
    let mut bl = AlgebraBuilder::new();
    for i in 0..a.dim() {
        for j in 0..nb {
            bl.basis(format!("{}⊗{}", a.basis().label(i), b.basis().label(j)), a.basis().deg(i).add(b.basis().deg(j)));
        }
    }
    let sgn = |e: i32| if e.rem_euclid(2) == 0 { Q::one() } else { -Q::one() };
    for i in 0..a.dim() {
        for j in 0..nb {
            for k in 0..a.dim() {
                for l in 0..nb {
                    let s = sgn(b.basis().deg(j).cohom() * a.basis().deg(k).cohom());
                    let mut v = Vec::new();
                    for (p, c) in a.mul_basis(i, k) {
                        for (r, e) in b.mul_basis(j, l) {
                            v.push((idx(*p, *r), &(&s * c) * e));
                        }
                    }
                    bl.product(idx(i, j), idx(k, l), v);
                }
            }
            let mut dv = Vec::new();
            for (p, c) in &a.complex().d[i] {
                dv.push((idx(*p, j), c.clone()));
            }
            let s = sgn(a.basis().deg(i).cohom());
            for (r, c) in &b.complex().d[j] {
                dv.push((idx(i, *r), &s * c));
            }
            bl.differential(idx(i, j), dv);
        }
    }
    let mut unit = Vec::new();
    for (i, c) in a.unit_vec().iter().enumerate() {
        for (j, e) in b.unit_vec().iter().enumerate() {
            if !c.is_zero() && !e.is_zero() {
                unit.push((idx(i, j), c * e));
            }
        }
    }
    bl.unit(unit);
    bl.build().expect("tensor product of valid algebras is valid")
}

/// Ext algebra of the two-vertex quiver algebra: idempotents `s`, `b`,
/// `u ∈ e_b A^1 e_s`, `v ∈ e_s A^1 e_b`, `w = v u ∈ e_s A^2 e_s`, `u v = 0`.
pub fn p1e() -> DgAlgebra<i32> {
    let mut bl = AlgebraBuilder::new();
    let es = bl.basis("e_s", 0);
    let eb = bl.basis("e_b", 0);
    let u = bl.basis("u", 1);
    let v = bl.basis("v", 1);
    let w = bl.basis("w", 2);
    for (l, x, r) in [(es, es, es), (eb, eb, eb), (eb, u, es), (es, v, eb), (es, w, es)] {
        bl.product_basis(l, x, x);
        bl.product_basis(x, r, x);
    }
    bl.product_basis(v, u, w);
    bl.unit(vec![(es, one()), (eb, one())]);
    bl.idempotent("s", vec![(es, one())]);
    bl.idempotent("b", vec![(eb, one())]);
    bl.build().expect("p1e is valid")
}

/// Random bigraded dg algebras for property tests.
pub mod random {
    use rand::seq::SliceRandom;
    use rand::Rng;

    use super::*;

    /// Bidegrees live in `[0, WINDOW)²`.
    pub const WINDOW: i32 = 6;
    pub const MAX_DIM: usize = 4;

    fn rand_q<R: Rng>(rng: &mut R) -> Q {
        let mut v = rng.gen_range(-3i64..=3);
        if v == 0 {
            v = 1;
        }
        Q::from_int(v)
    }

    /// Square-zero extension `k·1 ⊕ V`, where `V` is a sum of acyclic pairs
    /// `x -> y` and cocycles; cocycles are placed on the diagonal when
    /// `pure`, and at least one off the diagonal otherwise. The result is
    /// disguised by a random triangular change of basis in each bidegree.
    pub fn square_zero<R: Rng>(rng: &mut R, pure: bool) -> DgAlgebra<Bideg> {
        let mut dims: BTreeMap<Bideg, usize> = BTreeMap::new();
        dims.insert(Bideg::new(0, 0), 1);
        let mut bl = AlgebraBuilder::new();
        let u = bl.basis("1", Bideg::new(0, 0));
        let mut diffs: Vec<(usize, usize)> = Vec::new();
        let room = |g: Bideg, n: usize, dims: &mut BTreeMap<Bideg, usize>| {
            let e = dims.entry(g).or_insert(0);
            if *e + n > MAX_DIM {
                false
            } else {
                *e += n;
                true
            }
        };
        let pairs = rng.gen_range(1..=5);
        for p in 0..pairs {
            let g = Bideg::new(rng.gen_range(0..WINDOW - 1), rng.gen_range(0..WINDOW));
            let h = g.add(Bideg::step());
            if room(g, 1, &mut dims) {
                if room(h, 1, &mut dims) {
                    let x = bl.basis(format!("x{p}"), g);
                    let y = bl.basis(format!("y{p}"), h);
                    diffs.push((x, y));
                } else {
                    *dims.get_mut(&g).unwrap() -= 1;
                }
            }
        }
        let cocycles = rng.gen_range(1..=4);
        for z in 0..cocycles {
            let i = rng.gen_range(0..WINDOW);
            let g = Bideg::new(i, i);
            if (i, i) != (0, 0) && room(g, 1, &mut dims) {
                bl.basis(format!("z{z}"), g);
            }
        }
        if !pure {
            loop {
                let g = Bideg::new(rng.gen_range(0..WINDOW), rng.gen_range(0..WINDOW));
                if g.i != g.j && room(g, 1, &mut dims) {
                    bl.basis("w", g);
                    break;
                }
            }
        }
        bl.unit_basis(u);
        for (x, y) in diffs {
            bl.differential(x, vec![(y, Q::one())]);
        }
        let alg = bl.build().expect("square-zero extension is valid");
        disguise(rng, &alg)
    }

    /// Random unitriangular base change inside each bidegree (unit fixed).
    pub fn disguise<R: Rng>(rng: &mut R, a: &DgAlgebra<Bideg>) -> DgAlgebra<Bideg> {
        let n = a.dim();
        let mut change = Matrix::identity(n);
        let unit_idx: Vec<usize> = (0..n).filter(|&i| !a.unit_vec()[i].is_zero()).collect();
        for g in a.basis().degrees() {
            let idx = a.basis().indices(g);
            for (p, &i) in idx.iter().enumerate() {
                for &j in &idx[p + 1..] {
                    if unit_idx.contains(&j) || !rng.gen_bool(0.5) {
                        continue;
                    }
                    change[(i, j)] = rand_q(rng);
                }
            }
        }
        let labels = (0..n).map(|i| format!("{}'", a.basis().label(i))).collect();
        a.rebase(&change, labels).expect("unitriangular change is invertible").0
    }

    /// A pure random algebra: a square-zero extension, or the tensor product
    /// of two small ones when it fits the window.
    pub fn pure_dgg<R: Rng>(rng: &mut R) -> DgAlgebra<Bideg> {
        if rng.gen_bool(0.3) {
            let a = square_zero_small(rng);
            let b = square_zero_small(rng);
            let t = tensor(&a, &b);
            let fits = t.basis().degrees().all(|g| g.i < WINDOW && g.j < WINDOW && t.basis().dim_in(g) <= MAX_DIM);
            if fits {
                return disguise(rng, &t);
            }
        }
        square_zero(rng, true)
    }

    fn square_zero_small<R: Rng>(rng: &mut R) -> DgAlgebra<Bideg> {
        let mut bl = AlgebraBuilder::new();
        let u = bl.basis("1", Bideg::new(0, 0));
        let i = rng.gen_range(1..3);
        bl.basis("z", Bideg::new(i, i));
        if rng.gen_bool(0.5) {
            let g = Bideg::new(rng.gen_range(0..2), rng.gen_range(0..3));
            let x = bl.basis("x", g);
            let y = bl.basis("y", g.add(Bideg::step()));
            bl.differential(x, vec![(y, Q::one())]);
        }
        bl.unit_basis(u);
        bl.build().expect("small square-zero extension is valid")
    }

    pub fn impure_dgg<R: Rng>(rng: &mut R) -> DgAlgebra<Bideg> {
        square_zero(rng, false)
    }

    /// The same algebra with its basis listed in a random order.
    pub fn permute_basis<R: Rng, G: Grading>(rng: &mut R, a: &DgAlgebra<G>) -> DgAlgebra<G> {
        let n = a.dim();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        let mut change = Matrix::zeros(n, n);
        for (new, &old) in perm.iter().enumerate() {
            change[(old, new)] = Q::one();
        }
        let labels = perm.iter().map(|&o| a.basis().label(o).to_string()).collect();
        a.rebase(&change, labels).expect("permutation is invertible").0
    }
}

/// Random dgFilt modules built from shifted induced simples by direct sums
/// and cones of random chain maps.
pub mod random_filt {
    use rand::Rng;

    use super::*;
    use crate::perf::{cone, filt_hom_complex, DgFiltModule, FiltMorphism, PerfAlgebra};

    pub const MAX_SUMMANDS: usize = 6;

    fn simple<R: Rng>(rng: &mut R, owner: &Arc<PerfAlgebra>) -> DgFiltModule {
        let label = rng.gen_range(0..owner.label_count());
        DgFiltModule::induced_simple(owner.clone(), label).expect("simple").shift(-rng.gen_range(0..=2))
    }

    /// A random degree-0 cycle `M -> N`.
    pub fn chain_map<R: Rng>(rng: &mut R, m: &DgFiltModule, n: &DgFiltModule) -> FiltMorphism {
        let h = filt_hom_complex(m, n).expect("same owner");
        let cycles = h.cohomology().get(0).map(|c| c.cycles.clone()).unwrap_or_default();
        let mut local = vec![Q::zero(); h.chain_dim(0)];
        for z in &cycles {
            let c = Q::from_int(rng.gen_range(-2i64..=2));
            for (a, b) in local.iter_mut().zip(z) {
                *a = a.add(&c.mul(b));
            }
        }
        FiltMorphism::new(m.clone(), n.clone(), h.to_matrix(&local, 0)).expect("cycle is a chain map")
    }

    pub fn module<R: Rng>(rng: &mut R, owner: &Arc<PerfAlgebra>, depth: usize) -> DgFiltModule {
        if depth == 0 || rng.gen_bool(0.2) {
            return simple(rng, owner);
        }
        let a = module(rng, owner, depth - 1);
        let out = match rng.gen_range(0..3) {
            0 => {
                let b = module(rng, owner, depth - 1);
                DgFiltModule::direct_sum(&[&a, &b]).expect("sum")
            }
            1 => {
                let b = module(rng, owner, depth - 1);
                let f = chain_map(rng, &a, &b);
                cone(&f).expect("cone")
            }
            _ => {
                // a map into a sum containing `a` has identity-like parts, so
                // the cone carries cancellable degree-0 entries
                let b = simple(rng, owner);
                let target = DgFiltModule::direct_sum(&[&a, &b]).expect("sum");
                let f = chain_map(rng, &a, &target);
                cone(&f).expect("cone")
            }
        };
        if out.len() > MAX_SUMMANDS {
            a
        } else {
            out
        }
    }
}

/// Quiver `s ⇄ b` with arrows `u: s -> b`, `v: b -> s` and relation `u·v = 0`.
pub fn p1q() -> crate::artin::QuiverAlgebra {
    crate::artin::QuiverAlgebra::from_names(&["s", "b"], &[("u", "s", "b"), ("v", "b", "s")], &[vec![(1, vec!["u", "v"])]])
        .expect("p1q is finite")
}

/// Kronecker quiver: two arrows `a, c: 1 -> 2`, no relations.
pub fn kronecker() -> crate::artin::QuiverAlgebra {
    crate::artin::QuiverAlgebra::from_names(&["1", "2"], &[("a", "1", "2"), ("c", "1", "2")], &[])
        .expect("kronecker is finite")
}
