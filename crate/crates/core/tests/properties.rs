use proptest::prelude::*;
use rug::Rational;

use strange_qmf::cyclotomic::{gcd, Cyclotomic};
use strange_qmf::lfunctions::{self, PeriodicSequence};
use strange_qmf::qseries::{self, Length, QSeries};
use strange_qmf::strange::{self, Component, RationalPoint};

fn in_field(n: u32) -> impl Strategy<Value = Cyclotomic> {
    prop::collection::vec((0i64..n as i64, -12i64..13, 1i64..6), 0..6).prop_map(move |t| {
        Cyclotomic::from_terms(n, t.into_iter().map(|(j, p, q)| (j, Rational::from((p, q)))))
    })
}

fn cyclotomic() -> impl Strategy<Value = Cyclotomic> {
    (1u32..=36).prop_flat_map(in_field)
}

fn small_field() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![1u32, 3, 4, 5, 8, 12])
}

fn series(trunc: i64) -> impl Strategy<Value = QSeries> {
    small_field()
        .prop_flat_map(move |n| prop::collection::vec((0i64..trunc, in_field(n)), 0..8))
        .prop_map(move |t| {
            let t_r = Rational::from(trunc);
            t.into_iter().fold(QSeries::zero(Some(t_r.clone())), |acc, (e, c)| {
                acc.add(&QSeries::monomial(c, &Rational::from(e), Some(t_r.clone())))
            })
        })
}

fn sequence(period: usize) -> impl Strategy<Value = PeriodicSequence> {
    small_field()
        .prop_flat_map(move |n| prop::collection::vec(in_field(n), period - 1))
        .prop_map(|mut v| {
            let s = v.iter().fold(Cyclotomic::zero(), |acc, x| &acc + x);
            v.push(-&s);
            PeriodicSequence::new(v).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn embedding_is_a_ring_homomorphism(a in cyclotomic(), b in cyclotomic()) {
        let prec = 128;
        let (ea, eb) = (a.embed(prec), b.embed(prec));
        let scale = 1.0 + (ea.abs_f64() + 1.0) * (eb.abs_f64() + 1.0);
        let bound = 2f64.powi(-(prec as i32) + 10) * scale;
        prop_assert!((&ea * &eb - (&a * &b).embed(prec)).abs_f64() < bound);
        prop_assert!((&ea + &eb - (&a + &b).embed(prec)).abs_f64() < bound);
        prop_assert!((&ea - &eb - (&a - &b).embed(prec)).abs_f64() < bound);
    }

    #[test]
    fn division_inverts_multiplication(a in cyclotomic(), b in cyclotomic()) {
        prop_assume!(!b.is_zero());
        let q = a.checked_div(&b).unwrap();
        prop_assert_eq!(&q * &b, a);
    }

    #[test]
    fn reduction_is_idempotent(a in cyclotomic()) {
        let m = a.minimal();
        prop_assert_eq!(m.minimal(), m.clone());
        prop_assert_eq!(m, a);
    }

    #[test]
    fn canonical_text_and_json_round_trip(a in cyclotomic()) {
        let parsed: Cyclotomic = a.to_string().parse().unwrap();
        prop_assert_eq!(&parsed, &a);
        prop_assert_eq!(Cyclotomic::from_json(&a.to_json()).unwrap(), a);
    }

    #[test]
    fn pochhammer_is_multiplicative(
        a in -6i64..7, t in 1i64..4, m in 0u64..6, n in 0u64..6,
    ) {
        let (a, t) = (Rational::from((a, 2)), Rational::from(t));
        let whole = qseries::pochhammer::<Rational>(&a, &t, Length::Finite(m + n), None, None).unwrap();
        let head = qseries::pochhammer::<Rational>(&a, &t, Length::Finite(m), None, None).unwrap();
        let shifted: Rational = &a + Rational::from(&t * m);
        let tail = qseries::pochhammer::<Rational>(&shifted, &t, Length::Finite(n), None, None).unwrap();
        prop_assert_eq!(head.mul(&tail), whole);
    }

    #[test]
    fn half_derivative_is_linear(f in series(40), g in series(40), a in small_field().prop_flat_map(in_field), b in small_field().prop_flat_map(in_field)) {
        let lhs = qseries::half_derivative(&f.scale(&a).add(&g.scale(&b))).unwrap();
        let rhs = qseries::half_derivative(&f).unwrap().scale(&a)
            .add(&qseries::half_derivative(&g).unwrap().scale(&b));
        prop_assert_eq!(lhs.scaled.normalized(), rhs.scaled.normalized());
    }

    #[test]
    fn l_value_is_linear(
        x in sequence(4), y in sequence(6), a in small_field().prop_flat_map(in_field), b in small_field().prop_flat_map(in_field), n in 0u32..6,
    ) {
        let z = PeriodicSequence::linear_combination(&a, &x, &b, &y).unwrap();
        let lhs = lfunctions::l_value(&z, n).unwrap();
        let rhs = &(&a * &lfunctions::l_value(&x, n).unwrap()) + &(&b * &lfunctions::l_value(&y, n).unwrap());
        prop_assert_eq!(lhs, rhs.minimal());
    }

    #[test]
    fn l_value_survives_period_doubling(x in sequence(5), n in 0u32..7) {
        prop_assert_eq!(
            lfunctions::l_value(&x, n).unwrap(),
            lfunctions::l_value(&x.repeated(2), n).unwrap()
        );
    }

    #[test]
    fn phi1_is_periodic(a in -60i64..60, h in 0usize..8, shift in -3i64..4) {
        let k = 2 * h as i64 + 1;
        prop_assume!(gcd(a.unsigned_abs(), k as u64) == 1);
        let x = RationalPoint::new(a, k).unwrap();
        prop_assert_eq!(
            strange::phi(1, &x.add_int(shift)).unwrap(),
            strange::phi(1, &x).unwrap()
        );
    }

    #[test]
    fn strange_values_are_stable_under_galois_action(a in 1i64..40, h in 1usize..7) {
        // sigma_b sends theta_1^S(zeta_k) to theta_1^S(zeta_k^b).
        let k = 2 * h as i64 + 1;
        prop_assume!(gcd(a as u64, k as u64) == 1);
        let one = strange::strange_eval(Component::Theta1, &RationalPoint::new(1, k).unwrap()).unwrap().exact;
        let at_a = strange::strange_eval(Component::Theta1, &RationalPoint::new(a, k).unwrap()).unwrap().exact;
        prop_assert_eq!(one.galois(a), at_a);
    }
}

#[test]
fn roots_of_unity_sum_to_zero() {
    for k in 2..=60u32 {
        let s = (0..k).fold(Cyclotomic::zero(), |acc, j| &acc + &Cyclotomic::root_of_unity(k, j as i64));
        assert!(s.is_zero(), "k = {k}");
    }
}

#[test]
fn theta1_coefficients_to_400() {
    let t = Rational::from(401);
    let th = qseries::eta_expansion(&qseries::EtaQuotientSpec::theta1(), &t).unwrap();
    for m in 0..=400i64 {
        let r = (m as f64).sqrt() as i64;
        let want = if m == 0 {
            1
        } else if r * r == m {
            if r % 2 == 0 { 2 } else { -2 }
        } else {
            0
        };
        assert_eq!(th.coefficient(&Rational::from(m)), Cyclotomic::from_i64(want), "q^{m}");
    }
}
