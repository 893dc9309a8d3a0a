use std::sync::Arc;

use proptest::prelude::*;
use quatlat::catalog;
use quatlat::numbers::{BaseField, FieldElement};
use quatlat::quat::{Quaternion, QuaternionAlgebra};

fn algebra(name: &str) -> Arc<QuaternionAlgebra> {
    catalog::order(name).unwrap().algebra().clone()
}

fn algebras() -> impl Strategy<Value = Arc<QuaternionAlgebra>> {
    prop_oneof![Just(algebra("hurwitz")), Just(algebra("m31")), Just(algebra("cubian")), Just(algebra("icosian")),]
}

fn coeff(f: BaseField) -> impl Strategy<Value = FieldElement> {
    (-20i64..=20, -20i64..=20, 1i64..=6)
        .prop_map(move |(a, b, d)| FieldElement::from_ints(f, a, if f == BaseField::Q { 0 } else { b }, d))
}

fn quaternion(alg: Arc<QuaternionAlgebra>) -> impl Strategy<Value = Quaternion> {
    let f = alg.field();
    [coeff(f), coeff(f), coeff(f), coeff(f)].prop_map(move |[t, x, y, z]| Quaternion::new(&alg, t, x, y, z))
}

fn triple() -> impl Strategy<Value = (Quaternion, Quaternion, Quaternion)> {
    algebras().prop_flat_map(|a| (quaternion(a.clone()), quaternion(a.clone()), quaternion(a)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn conjugation_is_an_involutive_anti_automorphism((p, q, _) in triple()) {
        prop_assert_eq!((&p * &q).conj(), &q.conj() * &p.conj());
        prop_assert_eq!(p.conj().conj(), p.clone());
        prop_assert_eq!((&p + &q).conj(), &p.conj() + &q.conj());
    }

    #[test]
    fn norm_and_trace_laws((p, q, _) in triple()) {
        prop_assert_eq!((&p * &q).nrd(), &p.nrd() * &q.nrd());
        prop_assert_eq!((&p + &q).trd(), &p.trd() + &q.trd());
        let alg = p.algebra();
        prop_assert_eq!(&p * &p.conj(), Quaternion::scalar(alg, p.nrd()));
        prop_assert_eq!(&p + &p.conj(), Quaternion::scalar(alg, p.trd()));
    }

    #[test]
    fn quadratic_identity((p, _, _) in triple()) {
        prop_assert!(p.quadratic_identity_check());
    }

    #[test]
    fn associativity_and_inverses((p, q, r) in triple()) {
        prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
        if !p.is_zero() {
            let one = Quaternion::one(p.algebra());
            prop_assert_eq!(&p * &p.inv().unwrap(), one);
        }
    }
}
