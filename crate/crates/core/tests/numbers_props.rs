use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use quatlat::numbers::*;

fn field() -> impl Strategy<Value = BaseField> {
    prop_oneof![Just(BaseField::Q), Just(BaseField::Sqrt2), Just(BaseField::Sqrt5)]
}

fn quadratic() -> impl Strategy<Value = BaseField> {
    prop_oneof![Just(BaseField::Sqrt2), Just(BaseField::Sqrt5)]
}

fn element(f: BaseField, r: i64) -> impl Strategy<Value = RingInteger> {
    (-r..=r, -r..=r).prop_map(move |(a, b)| RingInteger::from_pair(f, a, if f == BaseField::Q { 0 } else { b }))
}

fn rational(f: BaseField) -> impl Strategy<Value = FieldElement> {
    (-50i64..=50, -50i64..=50, 1i64..=12)
        .prop_map(move |(a, b, d)| FieldElement::from_ints(f, a, if f == BaseField::Q { 0 } else { b }, d))
}

/// Sign of u + v·√d decided on rational intervals around √d, refined
/// until the interval excludes zero.
fn sign_of(u: &BigRational, v: &BigRational, d: u32) -> i32 {
    if v.is_zero() {
        return if u.is_positive() {
            1
        } else if u.is_negative() {
            -1
        } else {
            0
        };
    }
    let mut k = 10u32;
    loop {
        let scale = BigInt::from(10).pow(k);
        let s = (BigInt::from(d) * &scale * &scale).sqrt();
        let lo = BigRational::new(s.clone(), scale.clone());
        let hi = BigRational::new(s + 1, scale);
        let (a, b) = (u + v * &lo, u + v * &hi);
        let (min, max) = if a < b { (a, b) } else { (b, a) };
        if min.is_positive() {
            return 1;
        }
        if max.is_negative() {
            return -1;
        }
        k *= 2;
    }
}

/// Both embeddings of a + bω as (u, v) pairs meaning u ± v√d.
fn interval_totally_positive(x: &RingInteger) -> bool {
    let a = BigRational::from_integer(x.a().clone());
    let b = BigRational::from_integer(x.b().clone());
    match x.field() {
        BaseField::Q => a.is_positive(),
        BaseField::Sqrt2 => sign_of(&a, &b, 2) > 0 && sign_of(&a, &(-&b), 2) > 0,
        BaseField::Sqrt5 => {
            let half = BigRational::new(1.into(), 2.into());
            let u = &a + &b * &half;
            let v = &b * &half;
            sign_of(&u, &v, 5) > 0 && sign_of(&u, &(-v.clone()), 5) > 0
        }
    }
}

#[test]
fn fundamental_units() {
    for f in [BaseField::Sqrt2, BaseField::Sqrt5] {
        let eps = f.fundamental_unit().unwrap();
        assert_eq!(eps.nm(), BigInt::from(-1));
        let sq = &eps * &eps;
        assert!(sq.is_totally_positive());
        for k in -20i64..=20 {
            let u = RingInteger::unit_power(f, 2 * k);
            let r = sqrt_totally_positive_unit(&u).unwrap();
            assert_eq!(&r * &r, u, "{f} k={k}");
            let ek = RingInteger::unit_power(f, k);
            assert!(r == ek || r == -&ek, "{f} k={k}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn norm_is_multiplicative_and_trace_additive(
        (x, y) in field().prop_flat_map(|f| (element(f, 1000), element(f, 1000))),
    ) {
        prop_assert_eq!((&x * &y).nm(), x.nm() * y.nm());
        prop_assert_eq!((&x + &y).tr(), x.tr() + y.tr());
    }

    #[test]
    fn field_norm_and_trace((x, y) in field().prop_flat_map(|f| (rational(f), rational(f)))) {
        prop_assert_eq!((&x * &y).nm(), x.nm() * y.nm());
        prop_assert_eq!((&x + &y).tr(), x.tr() + y.tr());
    }

    #[test]
    fn factor_round_trip(x in field().prop_flat_map(|f| element(f, 400))) {
        prop_assume!(!x.is_zero());
        let fx = factor(&x).unwrap();
        prop_assert_eq!(fx.product(), x);
        prop_assert!(fx.unit.is_unit());
        for (p, _) in &fx.factors {
            prop_assert!(!p.is_unit());
            prop_assert_eq!(canonical_associate(p), p.clone());
            prop_assert!(factor(p).unwrap().factors == vec![(p.clone(), 1)]);
        }
    }

    #[test]
    fn total_positivity_matches_intervals(x in quadratic().prop_flat_map(|f| element(f, 1_000_000))) {
        prop_assert_eq!(x.is_totally_positive(), interval_totally_positive(&x));
    }

    #[test]
    fn total_positivity_near_the_boundary(
        f in quadratic(),
        b in -100_000i64..=100_000,
        delta in -3i64..=3,
    ) {
        // a is chosen so that one embedding lies close to zero.
        let a = match f {
            BaseField::Sqrt2 => (2.0f64.sqrt() * b as f64).abs().round() as i64,
            _ => ((5.0f64.sqrt() - 1.0) / 2.0 * b as f64).abs().round() as i64,
        } + delta;
        let x = RingInteger::from_pair(f, a, b);
        prop_assert_eq!(x.is_totally_positive(), interval_totally_positive(&x));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn total_positivity_1000(x in field().prop_flat_map(|f| element(f, 1_000_000))) {
        prop_assert_eq!(x.is_totally_positive(), interval_totally_positive(&x));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn gcd_is_greatest((x, y) in field().prop_flat_map(|f| (element(f, 20), element(f, 20)))) {
        prop_assume!(!x.is_zero() && !y.is_zero());
        let f = x.field();
        let g = euclid_gcd(&x, &y);
        prop_assert!(g.divides(&x) && g.divides(&y));
        let r = if f == BaseField::Q { 0 } else { 25 };
        for a in -25i64..=25 {
            for b in -r..=r {
                let d = RingInteger::from_pair(f, a, b);
                if !d.is_zero() && d.divides(&x) && d.divides(&y) {
                    prop_assert!(d.divides(&g), "{} divides {} and {} but not {}", d, x, y, g);
                }
            }
        }
    }
}
