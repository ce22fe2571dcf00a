use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use slope_lab::exactnum::{rat, ratio, Rational};
use slope_lab::filtration::{
    common_compatible_basis, random_basis, random_filtration, scalar_product, CompatibleBasis, Filtration,
    LambdaValue,
};

fn filtration_pair(max_dim: usize) -> impl Strategy<Value = (Filtration, Filtration)> {
    (1..=max_dim, any::<u64>()).prop_map(|(d, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (random_filtration(d, 4, &mut rng), random_filtration(d, 4, &mut rng))
    })
}

fn finite(v: LambdaValue) -> Rational {
    match v {
        LambdaValue::Finite(q) => q,
        LambdaValue::Infinity => panic!("λ of a nonzero vector"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn scalar_product_is_symmetric_and_scales((f, g) in filtration_pair(5), p in 1i64..9, q in 1i64..9) {
        let fg = scalar_product(&f, &g).unwrap();
        prop_assert_eq!(&fg, &scalar_product(&g, &f).unwrap());
        let eps = ratio(p, q);
        prop_assert_eq!(scalar_product(&f.dilate(&eps).unwrap(), &g).unwrap(), &eps * &fg);
        prop_assert_eq!(f.dilate(&eps).unwrap().expectation(), &eps * f.expectation());
    }

    #[test]
    fn norm_vanishes_exactly_on_trivial((f, _) in filtration_pair(5)) {
        prop_assert_eq!(f.norm_sq().is_zero(), f.is_trivial());
        prop_assert_eq!(f.norm_sq(), scalar_product(&f, &f).unwrap());
    }

    #[test]
    fn coordinates_round_trip(d in 1usize..=5, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = random_basis(d, 3, &mut rng);
        let x: Vec<Rational> = (0..d).map(|_| rat(rng.gen_range(-5..=5))).collect();
        let f = Filtration::from_coordinates(&e, &x).unwrap();
        let basis = CompatibleBasis::new(e.clone()).unwrap();
        prop_assert!(f.is_compatible(&basis));
        prop_assert_eq!(f.coordinates(&basis).unwrap(), x.clone());
        let again = Filtration::from_coordinates(&e, &f.coordinates(&basis).unwrap()).unwrap();
        prop_assert_eq!(again, f);
    }

    #[test]
    fn tensor_lambda_two_ways((f, g) in filtration_pair(3), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_filtration(rng.gen_range(1..=3), 3, &mut rng);
        let t = Filtration::tensor(&[f.clone(), h.clone()]).unwrap();
        let bf = f.adapted_basis();
        let bh = h.adapted_basis();
        let lf = f.coordinates(&bf).unwrap();
        let lh = h.coordinates(&bh).unwrap();
        let (m, n) = (f.dim(), h.dim());
        // random vector in the product basis, as coefficients c_{ij}
        let c: Vec<i64> = (0..m * n).map(|_| rng.gen_range(-2..=2)).collect();
        prop_assume!(c.iter().any(|&x| x != 0));
        let mut w = vec![Rational::zero(); m * n];
        let mut expected: Option<Rational> = None;
        for i in 0..m {
            for j in 0..n {
                let cij = c[i * n + j];
                if cij == 0 {
                    continue;
                }
                for a in 0..m {
                    for b in 0..n {
                        w[a * n + b] += rat(cij) * &bf.vectors()[i][a] * &bh.vectors()[j][b];
                    }
                }
                let l = &lf[i] + &lh[j];
                expected = Some(expected.map_or(l.clone(), |e: Rational| e.min(l)));
            }
        }
        prop_assert_eq!(finite(t.lambda_of(&w).unwrap()), expected.unwrap());
        let _ = g;
    }

    #[test]
    fn dilation_commutes_with_tensor((f, g) in filtration_pair(3), p in 1i64..6, q in 1i64..6) {
        let eps = ratio(p, q);
        let lhs = Filtration::tensor(&[f.clone(), g.clone()]).unwrap().dilate(&eps).unwrap();
        let rhs = Filtration::tensor(&[f.dilate(&eps).unwrap(), g.dilate(&eps).unwrap()]).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn common_bases_are_compatible((f, g) in filtration_pair(5)) {
        let b = common_compatible_basis(&f, &g).unwrap();
        prop_assert!(f.is_compatible(&b) && g.is_compatible(&b));
    }
}

#[test]
fn json_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let f = random_filtration(rng.gen_range(1..=4), 3, &mut rng);
        let s = serde_json::to_string(&f).unwrap();
        let back: Filtration = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
    }
}
