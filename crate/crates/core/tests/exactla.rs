use dgforge_core::exactla::{Field, Fp, Matrix, Span, Q};
use proptest::prelude::*;

fn small_matrix() -> impl Strategy<Value = Matrix<Q>> {
    (1usize..6, 1usize..6).prop_flat_map(|(r, c)| {
        prop::collection::vec(-3i64..=3, r * c).prop_map(move |v| {
            Matrix::from_rows(v.chunks(c).map(|row| row.iter().map(|&x| Q::from_int(x)).collect()).collect()).unwrap()
        })
    })
}

fn fp_matrix() -> impl Strategy<Value = Matrix<Fp<7>>> {
    (1usize..6, 1usize..6).prop_flat_map(|(r, c)| {
        prop::collection::vec(0i64..7, r * c).prop_map(move |v| {
            Matrix::from_rows(v.chunks(c).map(|row| row.iter().map(|&x| Fp::<7>::from_i64(x)).collect()).collect()).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn rank_nullity(m in small_matrix()) {
        prop_assert_eq!(m.rank() + m.kernel_basis().cols(), m.cols());
    }

    #[test]
    fn rank_nullity_mod_p(m in fp_matrix()) {
        prop_assert_eq!(m.rank() + m.kernel_basis().cols(), m.cols());
    }

    #[test]
    fn kernel_vectors_are_killed(m in small_matrix()) {
        let k = m.kernel_basis();
        prop_assert!(m.mul(&k).unwrap().is_zero());
    }

    #[test]
    fn row_reduce_is_idempotent(m in small_matrix()) {
        let once = m.row_reduce();
        let twice = once.reduced.row_reduce();
        prop_assert_eq!(&once.reduced, &twice.reduced);
        prop_assert_eq!(once.pivots, twice.pivots);
    }

    #[test]
    fn rank_of_transpose(m in small_matrix()) {
        prop_assert_eq!(m.rank(), m.transpose().rank());
    }

    #[test]
    fn solve_recovers_a_solution(m in small_matrix(), x in prop::collection::vec(-3i64..=3, 6)) {
        let x = Matrix::from_columns(m.cols(), &[x[..m.cols()].iter().map(|&v| Q::from_int(v)).collect()]);
        let b = m.mul(&x).unwrap();
        let y = m.solve(&b).unwrap().expect("b lies in the column space");
        prop_assert_eq!(m.mul(&y).unwrap(), b);
    }

    #[test]
    fn span_coords_reconstruct(m in small_matrix()) {
        let cols = m.columns();
        let span = Span::new(m.rows(), &cols);
        prop_assert_eq!(span.dim(), m.rank());
        for c in &cols {
            let coords = span.coords(c).expect("column lies in its span");
            let mut back = vec![Q::zero(); m.rows()];
            for (k, b) in coords.iter().zip(span.basis()) {
                for (o, v) in back.iter_mut().zip(b) {
                    *o = o.add(&k.mul(v));
                }
            }
            prop_assert_eq!(&back, c);
        }
    }

    #[test]
    fn rational_field_axioms(a in -50i64..50, b in 1i64..50, c in -50i64..50, d in 1i64..50) {
        let x = Q::new(a, b).unwrap();
        let y = Q::new(c, d).unwrap();
        prop_assert_eq!(x.add(&y).sub(&y), x.clone());
        if !y.is_zero() {
            prop_assert_eq!(x.mul(&y).div(&y).unwrap(), x);
        }
    }
}
