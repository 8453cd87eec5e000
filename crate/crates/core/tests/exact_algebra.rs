use std::collections::BTreeSet;

use casimir_core::exact::{
    int, rat, reduce_to_moments, MomentPairTable, PiRational, PolynomialFamily, Rational, MAX_U_DEGREE,
};
use proptest::prelude::*;

fn small_rational() -> impl Strategy<Value = Rational> {
    (-40i64..=40, 1i64..=12).prop_map(|(p, q)| rat(p, q))
}

fn u_polynomial() -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(small_rational(), 1..=MAX_U_DEGREE + 1)
}

fn combine(a: &Rational, f: &[Rational], b: &Rational, g: &[Rational]) -> Vec<Rational> {
    let n = f.len().max(g.len());
    let at = |v: &[Rational], i: usize| v.get(i).cloned().unwrap_or_else(|| int(0));
    (0..n).map(|i| a * at(f, i) + b * at(g, i)).collect()
}

fn keys(tables: &[&MomentPairTable]) -> BTreeSet<(u32, u32)> {
    tables.iter().flat_map(|t| t.iter().map(|(k, _)| k)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reduction_is_linear(f in u_polynomial(), g in u_polynomial(), a in small_rational(), b in small_rational()) {
        let tf = reduce_to_moments(&f).unwrap();
        let tg = reduce_to_moments(&g).unwrap();
        let th = reduce_to_moments(&combine(&a, &f, &b, &g)).unwrap();
        for (p, q) in keys(&[&tf, &tg, &th]) {
            prop_assert_eq!(th.get(p, q), &a * tf.get(p, q) + &b * tg.get(p, q));
        }
    }

    #[test]
    fn only_even_total_degree_survives(f in u_polynomial()) {
        let t = reduce_to_moments(&f).unwrap();
        for ((p, q), c) in t.iter() {
            prop_assert!(p <= q);
            prop_assert!((p + q) % 2 == 0);
            prop_assert!(*c != int(0));
            prop_assert_eq!(t.get(q, p), c.clone());
        }
    }

    #[test]
    fn json_round_trip(f in u_polynomial()) {
        let t = reduce_to_moments(&f).unwrap();
        prop_assert_eq!(MomentPairTable::from_json(&t.to_json()).unwrap(), t);
    }

    #[test]
    fn pi_rational_field_laws(a in small_rational(), b in small_rational(), p in -4i32..=4, q in -4i32..=4) {
        prop_assume!(b != int(0));
        let x = PiRational::new(a.clone(), p);
        let y = PiRational::new(b.clone(), q);
        let prod = &x * &y;
        prop_assert_eq!(prod.checked_div(&y).unwrap(), x.clone());
        if a != int(0) {
            prop_assert_eq!(prod.pi_power(), p + q);
        }
        let f: f64 = prod.to_float();
        let want = x.to_float::<f64>() * y.to_float::<f64>();
        prop_assert!((f - want).abs() <= 1e-12 * want.abs().max(1e-300));
    }
}

#[test]
fn families_reduce_to_their_tables() {
    for fam in PolynomialFamily::ALL {
        assert_eq!(reduce_to_moments(&fam.coefficients()).unwrap(), fam.table());
        assert_eq!(PolynomialFamily::parse(fam.name()), Some(fam));
    }
}

#[test]
fn mixed_powers_only_add_when_pi_power_matches() {
    let a = PiRational::new(rat(1, 2), 3);
    let b = PiRational::new(rat(1, 3), 3);
    assert_eq!(a.checked_add(&b).unwrap(), PiRational::new(rat(5, 6), 3));
    assert!(a.checked_add(&PiRational::new(int(1), 2)).is_err());
    assert!(a.checked_add(&PiRational::zero()).is_ok());
}

#[test]
fn degree_limit_is_enforced() {
    let too_long = vec![int(1); MAX_U_DEGREE + 2];
    assert!(reduce_to_moments(&too_long).is_err());
}
