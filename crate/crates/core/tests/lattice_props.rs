use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use slope_lab::exactnum::{rat, ratio, to_f64, LogValue, Rational};
use slope_lab::harness::random_lattice;
use slope_lab::lattice::{hn_filtration, mu_max, short_vectors, udeg_max, Lattice};
use slope_lab::linalg::{self, subsets};

fn lattice(max_rank: usize, bound: i64) -> impl Strategy<Value = Lattice> {
    (1..=max_rank, any::<u64>()).prop_map(move |(r, seed)| random_lattice(r, bound, &mut ChaCha8Rng::seed_from_u64(seed)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn direct_sums_add_degrees(a in lattice(3, 10), b in lattice(3, 10)) {
        prop_assert_eq!(a.direct_sum(&b).degree(), &a.degree() + &b.degree());
    }

    #[test]
    fn hn_slopes_decrease_and_sum_to_degree(l in lattice(4, 6)) {
        let hn = hn_filtration(&l).unwrap();
        for w in hn.slopes.windows(2) {
            prop_assert!(w[0] > w[1]);
        }
        let weighted: LogValue = hn
            .slopes
            .iter()
            .zip(hn.subquotient_ranks())
            .map(|(s, r)| s.scale(&rat(r as i64)))
            .sum();
        prop_assert_eq!(weighted, l.degree());
        prop_assert_eq!(hn.mu_max(), &mu_max(&l).unwrap().0);
    }

    #[test]
    fn sub_and_quotient_degrees_add(l in lattice(4, 8), seed in any::<u64>()) {
        let r = l.rank();
        prop_assume!(r >= 2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = rng.gen_range(1..r);
        let gens: Vec<Vec<BigInt>> = (0..k).map(|_| (0..r).map(|_| BigInt::from(rng.gen_range(-5..=5))).collect()).collect();
        if let Ok(sub) = l.sublattice(gens) {
            let s = sub.saturate();
            prop_assume!(s.rank() > 0 && s.rank() < r);
            prop_assert!(s.is_saturated());
            prop_assert_eq!(&s.sub_bundle().degree() + &s.quotient_bundle().unwrap().degree(), l.degree());
        }
    }
}

/// Smallest integer above `exp(t)`, padded against floating-point error.
fn exp_ceiling(t: &LogValue) -> Rational {
    let x = to_f64(&t.approximate(30).hi()).exp() * (1.0 + 1e-9) + 1e-9;
    Rational::from_integer(BigInt::from(x.ceil() as u128))
}

/// Maximal slope over saturations of spans of short vectors. A rank-`k`
/// sublattice of slope at least `μ` has a spanning set of vectors with
/// `|v|² <= γ_k^k e^{-2kμ} / λ₁^{2(k-1)}` (with `γ_k^k <= 2` for `k <= 3`),
/// so the radius below reaches every sublattice at least as steep as `μ`.
fn brute_force_mu_max(l: &Lattice, mu: &LogValue) -> LogValue {
    let r = l.rank();
    let mut best = l.slope().unwrap();
    let (u, _) = udeg_max(l).unwrap();
    for k in 1..r {
        let log_radius = &(&mu.scale(&rat(-2 * k as i64)) + &u.scale(&rat(2 * (k as i64 - 1)))) + &LogValue::ln(&rat(2));
        let radius = exp_ceiling(&log_radius).max(rat(25));
        let vs = short_vectors(l, &radius).unwrap();
        for pick in subsets(vs.len(), k) {
            let gens: Vec<Vec<BigInt>> = pick.iter().map(|&i| vs[i].clone()).collect();
            let q: Vec<Vec<Rational>> = gens.iter().map(|v| v.iter().map(|x| Rational::from_integer(x.clone())).collect()).collect();
            if linalg::rank(&q) != k {
                continue;
            }
            let s = l.sublattice(gens).unwrap().saturate();
            let slope = s.slope().unwrap();
            if slope > best {
                best = slope;
            }
        }
    }
    best
}

#[test]
fn mu_max_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for k in 0..200 {
        let l = random_lattice(rng.gen_range(1..=3), 10, &mut rng);
        let (mu, witness) = mu_max(&l).unwrap();
        assert_eq!(witness.slope().unwrap(), mu, "witness slope, lattice #{k}");
        assert_eq!(brute_force_mu_max(&l, &mu), mu, "lattice #{k}: {:?}", l.gram());
    }
}

#[test]
fn udeg_is_minus_log_of_shortest_length() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..50 {
        let l = random_lattice(rng.gen_range(1..=4), 6, &mut rng);
        let (u, v) = udeg_max(&l).unwrap();
        let n = l.norm_sq(&v);
        assert_eq!(u, LogValue::log_of(&n, &ratio(-1, 2)).unwrap());
        let shorter = short_vectors(&l, &n).unwrap();
        assert!(shorter.iter().all(|w| l.norm_sq(w) >= n));
        assert!(!v.iter().all(Zero::is_zero));
    }
}

#[test]
fn unit_lattice_has_flat_filtration() {
    let hn = hn_filtration(&Lattice::identity(3)).unwrap();
    assert!(hn.is_semistable());
    assert!(hn.mu_max().is_zero());
    assert!(Lattice::identity(3).determinant().is_one());
}
