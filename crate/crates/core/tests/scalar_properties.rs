use std::cmp::Ordering;

use ahkit::scalars::{
    certified_sign, parse_ext, parse_scalar, reduce_square_class, ExtScalar, QSqrt17, TowerScalar,
};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn atom(i: usize) -> TowerScalar {
    match i {
        0 => TowerScalar::one(),
        1 => TowerScalar::sqrt17(),
        2 => TowerScalar::sqrt_q(&QSqrt17::from_int(2)).unwrap(),
        n => TowerScalar::beta(n as i64 - 4).unwrap(),
    }
}

fn tower() -> impl Strategy<Value = TowerScalar> {
    prop::collection::vec((-6i64..=6, 1i64..=4, 0usize..10, 0usize..10), 1..4).prop_map(|terms| {
        terms.into_iter().fold(TowerScalar::zero(), |acc, (n, d, i, j)| {
            &acc + &(&TowerScalar::from_ratio(n, d) * &(&atom(i) * &atom(j)))
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(x in tower(), y in tower(), z in tower()) {
        prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        prop_assert_eq!(&x - &x, TowerScalar::zero());
    }

    #[test]
    fn inverses(x in tower()) {
        prop_assume!(!x.is_zero());
        prop_assert_eq!(&x * &x.inv().unwrap(), TowerScalar::one());
    }

    #[test]
    fn serialization_round_trips(x in tower()) {
        let s = x.to_string();
        prop_assert_eq!(parse_scalar(&s).unwrap(), x);
    }

    #[test]
    fn ext_serialization_round_trips(x in tower(), n in -1i64..=5, m in -1i64..=5) {
        let v = &ExtScalar::from(x) * &(&ExtScalar::sqrt_beta(n).unwrap() + &ExtScalar::sqrt_beta(m).unwrap());
        prop_assert_eq!(parse_ext(&v.to_string()).unwrap(), v);
    }

    #[test]
    fn squares_are_never_negative(x in tower()) {
        let s = certified_sign(&(&x * &x));
        prop_assert!(s != Ordering::Less);
        prop_assert_eq!(s == Ordering::Equal, x.is_zero());
    }

    #[test]
    fn sign_agrees_with_floating_point(x in tower()) {
        let f = x.to_f64();
        prop_assume!(f.abs() > 1e-9);
        prop_assert_eq!(certified_sign(&x), if f > 0.0 { Ordering::Greater } else { Ordering::Less });
    }

    #[test]
    fn reduction_is_idempotent(a in -40i64..40, b in -10i64..10, den in 1i64..6) {
        let q = QSqrt17::new(
            num_rational::BigRational::new(a.into(), den.into()),
            num_rational::BigRational::new(b.into(), den.into()),
        );
        prop_assume!(q.is_positive());
        let (class, m) = reduce_square_class(&q).unwrap();
        prop_assert_eq!(&(&m * &m) * &class.radicand(), q);
        let (class2, m2) = reduce_square_class(&class.radicand()).unwrap();
        prop_assert_eq!(class2, class);
        prop_assert_eq!(m2, QSqrt17::one());
    }
}

#[test]
fn division_by_zero_is_reported() {
    assert!(TowerScalar::zero().inv().is_none());
    assert!(parse_scalar("1/(sqrt(2)*sqrt(2)-2)").is_err());
}
