use std::cmp::Ordering;

use num_traits::Zero;
use proptest::prelude::*;

use slope_lab::exactnum::{compare, factorize_u64, ratio, LogValue, Rational};

fn log_value() -> impl Strategy<Value = LogValue> {
    prop::collection::vec((2i64..60, -9i64..=9, 1i64..=6), 0..4).prop_map(|terms| {
        terms
            .into_iter()
            .map(|(n, p, q)| LogValue::log_of(&ratio(n, 1), &ratio(p, q)).unwrap())
            .sum()
    })
}

proptest! {
    #[test]
    fn equality_is_term_equality(a in log_value(), b in log_value()) {
        prop_assert_eq!(compare(&a, &b) == Ordering::Equal, a.terms() == b.terms());
    }

    #[test]
    fn vector_space_laws(a in log_value(), b in log_value(), p in -7i64..=7, q in 1i64..=7) {
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        prop_assert!(a.scale(&Rational::zero()).is_zero());
        let s = ratio(p, q);
        prop_assert_eq!((&a + &b).scale(&s), &a.scale(&s) + &b.scale(&s));
    }

    #[test]
    fn refinements_nest(a in log_value(), bits in 2u32..80) {
        let coarse = a.approximate(bits);
        let fine = a.approximate(bits + 10);
        prop_assert!(coarse.contains(&fine.midpoint()));
        prop_assert!(coarse.width() <= ratio(1, 1) / Rational::from_integer(num_bigint::BigInt::from(1u8) << bits));
    }

    #[test]
    fn compare_matches_narrow_midpoint(a in log_value(), b in log_value()) {
        let d = &a - &b;
        let ord = compare(&a, &b);
        if ord != Ordering::Equal {
            let mid = d.approximate(200).midpoint();
            prop_assert_eq!(mid.cmp(&Rational::zero()), ord);
        }
    }

    #[test]
    fn factorizations_multiply_back(n in 1u64..2_000_000_000_000) {
        let product: u64 = factorize_u64(n).iter().map(|(p, e)| p.pow(*e)).product();
        prop_assert_eq!(product, n);
    }
}

#[test]
fn compare_agrees_with_floats_on_separated_values() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let mut pick = || -> LogValue {
            (0..3)
                .map(|_| LogValue::log_of(&ratio(rng.gen_range(2..100), 1), &ratio(rng.gen_range(-5..=5), rng.gen_range(1..=4))).unwrap())
                .sum()
        };
        let (a, b) = (pick(), pick());
        let (x, y) = (a.to_f64(), b.to_f64());
        if (x - y).abs() > 1e-9 {
            assert_eq!(compare(&a, &b), x.partial_cmp(&y).unwrap());
        }
    }
}
