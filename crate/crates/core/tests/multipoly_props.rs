use std::collections::HashMap;

use num_bigint::BigInt;
use proptest::prelude::*;

use hanoi_dimer_core::multipoly::{Monomial, Polynomial, VarSet};

fn vars() -> VarSet {
    VarSet::new(["w", "x", "y", "z"])
}

/// Random polynomial over `w, x, y, z`, coefficients up to 10^6, degree <= 6.
fn poly() -> impl Strategy<Value = Polynomial> {
    let exps = prop::collection::vec(0u32..=2, 4).prop_filter("degree <= 6", |e| e.iter().sum::<u32>() <= 6);
    prop::collection::vec((exps, -1_000_000i64..=1_000_000), 0..8).prop_map(|terms| {
        Polynomial::from_terms(&vars(), terms.into_iter().map(|(e, c)| (Monomial::from_exponents(e), BigInt::from(c))))
    })
}

fn point() -> impl Strategy<Value = HashMap<String, BigInt>> {
    prop::collection::vec(-50i64..=50, 4).prop_map(|xs| {
        vars().names().iter().cloned().zip(xs.into_iter().map(BigInt::from)).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn addition_and_multiplication_commute(p in poly(), q in poly()) {
        prop_assert_eq!(&p + &q, &q + &p);
        prop_assert_eq!(&p * &q, &q * &p);
    }

    #[test]
    fn associativity(p in poly(), q in poly(), r in poly()) {
        prop_assert_eq!(&(&p + &q) + &r, &p + &(&q + &r));
        prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
    }

    #[test]
    fn distributivity(p in poly(), q in poly(), r in poly()) {
        prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
    }

    #[test]
    fn subtraction_inverts_addition(p in poly(), q in poly()) {
        prop_assert_eq!(&(&p + &q) - &q, p.clone());
        prop_assert!((&p - &p).is_zero());
    }

    #[test]
    fn evaluation_is_a_ring_homomorphism(p in poly(), q in poly(), x in point()) {
        let (a, b) = (p.evaluate_int(&x).unwrap(), q.evaluate_int(&x).unwrap());
        prop_assert_eq!((&p * &q).evaluate_int(&x).unwrap(), &a * &b);
        prop_assert_eq!((&p + &q).evaluate_int(&x).unwrap(), a + b);
    }

    #[test]
    fn serialization_round_trips(p in poly()) {
        let text = p.serialize();
        let back = Polynomial::parse(&text, &vars()).unwrap();
        prop_assert_eq!(back.serialize(), text);
        prop_assert_eq!(back, p);
    }

    #[test]
    fn identity_substitution(p in poly()) {
        let bindings: HashMap<String, Polynomial> =
            vars().names().iter().map(|n| (n.clone(), Polynomial::var(&vars(), n))).collect();
        prop_assert_eq!(p.substitute(&bindings).with_vars(&vars()).unwrap(), p);
    }

    #[test]
    fn substitution_commutes_with_evaluation(p in poly(), q in poly(), x in point()) {
        let bindings = HashMap::from([("x".to_string(), q.clone())]);
        let lhs = p.substitute(&bindings).with_vars(&vars()).unwrap().evaluate_int(&x).unwrap();
        let mut y = x.clone();
        y.insert("x".into(), q.evaluate_int(&x).unwrap());
        prop_assert_eq!(lhs, p.evaluate_int(&y).unwrap());
    }

    #[test]
    fn power_is_repeated_product(p in poly(), e in 0u32..4) {
        let mut expected = Polynomial::constant(&vars(), 1);
        for _ in 0..e {
            expected = &expected * &p;
        }
        prop_assert_eq!(p.pow(e), expected);
    }
}

#[test]
fn fixed_formatting() {
    let v = VarSet::new(["f", "g"]);
    assert_eq!(Polynomial::zero(&v).serialize(), "0");
    let p = &Polynomial::var(&v, "f") + &Polynomial::var(&v, "g").scale(&BigInt::from(2));
    assert_eq!(p.serialize(), "1*f + 2*g");
}
