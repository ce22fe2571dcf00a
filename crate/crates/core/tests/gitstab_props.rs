use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use slope_lab::exactnum::{rat, ratio, Rational};
use slope_lab::filtration::{random_filtration, Filtration};
use slope_lab::gitstab::{
    big_lambda, brute_force_minimum, is_semistable, mu_invariant, rr_reduce, LineBundle, Stability, TensorPoint,
};

const SHAPES: [&[usize]; 6] = [&[1], &[2], &[1, 1], &[1, 2], &[2, 1], &[2, 2]];

fn small_point() -> impl Strategy<Value = TensorPoint> {
    (0..SHAPES.len(), prop::collection::vec((0usize..4, -3i64..=3), 1..=4)).prop_filter_map("zero point", |(s, entries)| {
        let shape = SHAPES[s].to_vec();
        let size: usize = shape.iter().product();
        let mut values = vec![Rational::zero(); size];
        for (k, c) in entries {
            values[k % size] = rat(c);
        }
        TensorPoint::from_dense(shape, &values).ok()
    })
}

fn tuple(x: &TensorPoint, rng: &mut ChaCha8Rng) -> Vec<Filtration> {
    x.shape().iter().map(|&r| random_filtration(r, 3, rng)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lambda_is_dilation_invariant(x in small_point(), seed in any::<u64>(), p in 1i64..7, q in 1i64..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = tuple(&x, &mut rng);
        prop_assume!(t.iter().any(|f| !f.is_trivial()));
        let eps = ratio(p, q);
        let dilated: Vec<Filtration> = t.iter().map(|f| f.dilate(&eps).unwrap()).collect();
        prop_assert_eq!(big_lambda(&x, &dilated).unwrap(), big_lambda(&x, &t).unwrap());
    }

    #[test]
    fn hilbert_mumford_direction(x in small_point(), seed in any::<u64>()) {
        let bundle = LineBundle::standard(x.arity(), 2);
        match is_semistable(&x).unwrap() {
            Stability::Unstable { destabilizer } => {
                let mu = mu_invariant(&x, &destabilizer.minimizer, &bundle).unwrap();
                prop_assert!(mu.is_negative());
                prop_assert!(brute_force_minimum(&x, 3).unwrap().is_negative());
                let red = rr_reduce(&x, &destabilizer).unwrap();
                for blocks in &red.blocks {
                    prop_assert_eq!(blocks.iter().map(|b| b.a * b.rank as i64).sum::<i64>(), 0);
                    prop_assert!(blocks.iter().all(|b| b.b >= 0));
                }
            }
            Stability::Semistable { certified } => {
                prop_assert!(certified);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                for _ in 0..20 {
                    let t = tuple(&x, &mut rng);
                    prop_assert!(mu_invariant(&x, &t, &bundle).unwrap() >= BigInt::zero());
                }
            }
        }
    }
}

#[test]
fn spec_points() {
    let pure = TensorPoint::basis_vector(vec![2, 2], vec![0, 0]).unwrap();
    assert!(!is_semistable(&pure).unwrap().is_semistable());
    let id = TensorPoint::identity(2);
    assert_eq!(is_semistable(&id).unwrap(), Stability::Semistable { certified: true });
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let t = tuple(&id, &mut rng);
        let _ = rng.gen::<u8>();
        assert!(!big_lambda(&id, &t).unwrap().is_negative());
    }
}

#[test]
fn point_json_round_trip() {
    let x = TensorPoint::identity(3);
    let s = serde_json::to_string(&x).unwrap();
    let back: TensorPoint = serde_json::from_str(&s).unwrap();
    assert_eq!(back, x);
}
