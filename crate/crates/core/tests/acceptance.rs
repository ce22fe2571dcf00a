//! Acceptance criteria, run in order with their runtime limits. Each prints
//! one PASS or FAIL line; the test fails if any criterion does.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use slope_lab::exactnum::{rat, ratio, LogValue, Rational};
use slope_lab::filtration::{
    common_compatible_basis_with, random_basis, random_filtration, scalar_product, CompatibleBasis,
    Filtration, LambdaValue,
};
use slope_lab::gitstab::{
    brute_force_minimum, is_semistable_with, oracle_applies, rr_reduce, same_up_to_dilation,
    satisfies_lower_bound, KempfOptions, MinimizationResult, Stability, TensorPoint,
};
use slope_lab::harness::{
    check_bogomolov, check_bost_kunnemann, check_main_theorem, check_reduction_chain, random_lattice,
    TrialConfig, TrialReport,
};
use slope_lab::invariants::det_tensor;
use slope_lab::linalg::{binomial, IMat};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ln(n: u64) -> LogValue {
    LogValue::ln(&Rational::from_integer(n.into()))
}

fn summarize(report: &TrialReport) -> Outcome {
    if let Some(t) = report.failures().next() {
        let c = t.headline().map(|c| c.label.clone()).unwrap_or_default();
        return Err(format!("{} failed trials, first #{} ({c}): {}", report.failed, t.index, t.inputs));
    }
    if report.inconclusive > 0 {
        return Err(format!("{} inconclusive trials", report.inconclusive));
    }
    Ok(format!("{} trials", report.passed))
}

fn random_unimodular(n: usize, rng: &mut ChaCha8Rng) -> IMat {
    let mut u: IMat = (0..n)
        .map(|i| (0..n).map(|j| BigInt::from((i == j) as i32)).collect())
        .collect();
    for _ in 0..3 * n {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i == j {
            continue;
        }
        let k = BigInt::from(rng.gen_range(-2..=2));
        #[allow(clippy::needless_range_loop)]
        for c in 0..n {
            let add = &u[j][c] * &k;
            u[i][c] += add;
        }
        if rng.gen_bool(0.3) {
            u.swap(i, j);
        }
    }
    u
}

fn exact_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut sequences = 0;
    for k in 0..500 {
        let r = rng.gen_range(1..=3);
        let e = random_lattice(r, 10, &mut rng);
        let f = random_lattice(rng.gen_range(1..=3), 10, &mut rng);
        let deg = e.degree();
        let tag = |what: &str| format!("{what} fails on lattice #{k}: {:?}", e.gram());

        if r >= 2 {
            let gens: Vec<Vec<BigInt>> = (0..rng.gen_range(1..r))
                .map(|_| (0..r).map(|_| BigInt::from(rng.gen_range(-4..=4))).collect())
                .collect();
            if let Ok(sub) = e.sublattice(gens) {
                let s = sub.saturate();
                if s.rank() > 0 && s.rank() < r {
                    let q = s.quotient_bundle().map_err(|x| x.to_string())?;
                    ensure(deg == &s.degree() + &q.degree(), || tag("degree additivity"))?;
                    sequences += 1;
                }
            }
        }
        let t = e.tensor(&f);
        let expected = &deg.scale(&rat(f.rank() as i64)) + &f.degree().scale(&rat(r as i64));
        ensure(t.degree() == expected, || tag("tensor degree formula"))?;
        for p in 1..=r {
            let ext = e.exterior_power(p).map_err(|x| x.to_string())?;
            let expected = deg.scale(&rat(binomial(r - 1, p - 1) as i64));
            ensure(ext.degree() == expected, || tag("determinant formula"))?;
        }
        ensure(e.dual().degree() == -&deg, || tag("dual antisymmetry"))?;
        let u = random_unimodular(r, &mut rng);
        let moved = e.change_basis(&u).map_err(|x| x.to_string())?;
        ensure(moved.degree() == deg, || tag("unimodular invariance"))?;
    }
    Ok(format!("500 lattices, {sequences} exact sequences"))
}

fn bost_kunnemann() -> Outcome {
    let config = TrialConfig {
        seed: 2,
        ranks: vec![1, 2, 3, 4],
        entry_bound: 10,
        trials: 200,
        tolerance_bits: 64,
    };
    summarize(&check_bost_kunnemann(&config).map_err(|e| e.to_string())?)
}

fn main_theorem() -> Outcome {
    let square = TrialConfig {
        seed: 3,
        ranks: vec![2, 2],
        entry_bound: 10,
        trials: 100,
        tolerance_bits: 64,
    };
    let a = summarize(&check_main_theorem(&square).map_err(|e| e.to_string())?)?;
    let oblong = TrialConfig {
        ranks: vec![2, 3],
        trials: 25,
        ..square
    };
    let b = summarize(&check_main_theorem(&oblong).map_err(|e| e.to_string())?)?;
    Ok(format!("(2,2): {a}; (2,3): {b}"))
}

fn coords(f: &Filtration, b: &CompatibleBasis) -> Result<Vec<Rational>, String> {
    f.coordinates(b).map_err(|e| e.to_string())
}

fn dot(x: &[Rational], y: &[Rational]) -> Rational {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn lambda(f: &Filtration, v: &[Rational]) -> Result<Rational, String> {
    match f.lambda_of(v).map_err(|e| e.to_string())? {
        LambdaValue::Finite(q) => Ok(q),
        LambdaValue::Infinity => Err("λ of a nonzero vector is infinite".into()),
    }
}

fn random_vector(dim: usize, rng: &mut ChaCha8Rng) -> Vec<Rational> {
    loop {
        let v: Vec<Rational> = (0..dim).map(|_| rat(rng.gen_range(-3..=3))).collect();
        if v.iter().any(|x| !x.is_zero()) {
            return v;
        }
    }
}

fn kron(u: &[Rational], w: &[Rational]) -> Vec<Rational> {
    u.iter().flat_map(|a| w.iter().map(move |b| a * b)).collect()
}

fn filtration_calculus() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let err = |e: slope_lab::Error| e.to_string();
    for k in 0..200 {
        let d = rng.gen_range(1..=5);
        let f = random_filtration(d, 3, &mut rng);
        let g = random_filtration(d, 3, &mut rng);
        let sp = scalar_product(&f, &g).map_err(err)?;
        for _ in 0..10 {
            let b = common_compatible_basis_with(&f, &g, &random_basis(d, 3, &mut rng)).map_err(err)?;
            let via = dot(&coords(&f, &b)?, &coords(&g, &b)?) / rat(d as i64);
            ensure(via == sp, || format!("pair #{k}: scalar product depends on the basis"))?;
        }

        let eps = ratio(rng.gen_range(1..=7), rng.gen_range(1..=5));
        let fe = f.dilate(&eps).map_err(err)?;
        ensure(fe.expectation() == &eps * f.expectation(), || format!("pair #{k}: dilated expectation"))?;
        ensure(scalar_product(&fe, &g).map_err(err)? == &eps * &sp, || format!("pair #{k}: dilated scalar product"))?;
        let v = random_vector(d, &mut rng);
        ensure(lambda(&fe, &v)? == &eps * lambda(&f, &v)?, || format!("pair #{k}: dilated λ"))?;

        let e = random_basis(d, 3, &mut rng);
        let x: Vec<Rational> = (0..d).map(|_| rat(rng.gen_range(-4..=4))).collect();
        let y: Vec<Rational> = (0..d).map(|_| rat(rng.gen_range(-4..=4))).collect();
        let fx = Filtration::from_coordinates(&e, &x).map_err(err)?;
        let fy = Filtration::from_coordinates(&e, &y).map_err(err)?;
        let cb = CompatibleBasis::new(e).map_err(err)?;
        ensure(coords(&fx, &cb)? == x, || format!("pair #{k}: coordinates do not invert"))?;
        let product = scalar_product(&fx, &fy).map_err(err)? * rat(d as i64);
        ensure(product == dot(&x, &y), || format!("pair #{k}: Φ_e is not an isometry"))?;

        if d <= 3 {
            let d2 = rng.gen_range(1..=3);
            let h = random_filtration(d2, 3, &mut rng);
            let t = Filtration::tensor(&[f.clone(), h.clone()]).map_err(err)?;
            let u = random_vector(d, &mut rng);
            let w = random_vector(d2, &mut rng);
            let sum = lambda(&f, &u)? + lambda(&h, &w)?;
            ensure(lambda(&t, &kron(&u, &w))? == sum, || format!("pair #{k}: tensor λ sum rule"))?;
            ensure(t.expectation() == f.expectation() + h.expectation(), || format!("pair #{k}: tensor expectation"))?;
            let te = Filtration::tensor(&[fe.clone(), h.dilate(&eps).map_err(err)?]).map_err(err)?;
            ensure(te == t.dilate(&eps).map_err(err)?, || format!("pair #{k}: dilation of a tensor product"))?;
        }
    }
    Ok("200 pairs × 10 bases".into())
}

const SHAPES: [&[usize]; 6] = [&[1], &[2], &[1, 1], &[1, 2], &[2, 1], &[2, 2]];

/// The 100 random points shared by the Kempf and reduction criteria.
fn kempf_points() -> Vec<TensorPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut out = Vec::new();
    while out.len() < 100 {
        let shape = SHAPES[rng.gen_range(0..SHAPES.len())].to_vec();
        let size: usize = shape.iter().product();
        let support = rng.gen_range(1..=size.min(4));
        let mut values = vec![Rational::zero(); size];
        for _ in 0..support {
            values[rng.gen_range(0..size)] = rat(rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 });
        }
        if let Ok(x) = TensorPoint::from_dense(shape, &values) {
            out.push(x);
        }
    }
    out
}

fn destabilizer(x: &TensorPoint, seed: u64) -> Result<Option<MinimizationResult>, String> {
    let opts = KempfOptions {
        seed,
        ..KempfOptions::default()
    };
    match is_semistable_with(x, &opts).map_err(|e| e.to_string())? {
        Stability::Semistable { .. } => Ok(None),
        Stability::Unstable { destabilizer } => Ok(Some(*destabilizer)),
    }
}

fn kempf_minimizer() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut unstable = 0;
    for (k, x) in kempf_points().iter().enumerate() {
        let tag = |what: &str| format!("point #{k} {}: {what}", serde_json::to_string(x).unwrap());
        let first = destabilizer(x, 0)?;
        let oracle = brute_force_minimum(x, 3).map_err(|e| e.to_string())?;
        ensure(first.is_some() == oracle.is_negative(), || tag("verdict disagrees with the oracle"))?;
        let Some(m) = first else { continue };
        unstable += 1;
        let second = destabilizer(x, 99)?.ok_or_else(|| tag("second seed finds no destabilizer"))?;
        let same = same_up_to_dilation(&m.minimizer, &second.minimizer).map_err(|e| e.to_string())?;
        ensure(same, || tag("minimizers are not proportional"))?;
        ensure(m.minimizer.iter().all(|f| f.expectation().is_zero()), || tag("nonzero expectation"))?;
        for _ in 0..100 {
            let g: Vec<Filtration> = x.shape().iter().map(|&r| random_filtration(r, 3, &mut rng)).collect();
            let ok = satisfies_lower_bound(x, &m, &g).map_err(|e| e.to_string())?;
            ensure(ok, || tag("lower bound on Λ fails for a challenge"))?;
        }
    }
    Ok(format!("100 points, {unstable} unstable"))
}

fn reduction() -> Outcome {
    let mut reduced = 0;
    let mut certified = 0;
    for (k, x) in kempf_points().iter().enumerate() {
        let Some(m) = destabilizer(x, 0)? else { continue };
        let tag = |what: &str| format!("point #{k} {}: {what}", serde_json::to_string(x).unwrap());
        let red = rr_reduce(x, &m).map_err(|e| tag(&e.to_string()))?;
        for blocks in &red.blocks {
            ensure(blocks.iter().map(|b| b.a * b.rank as i64).sum::<i64>() == 0, || tag("Σ a_j r_j ≠ 0"))?;
            ensure(blocks.iter().all(|b| b.b >= 0), || tag("negative b_j"))?;
        }
        ensure(!red.reduced_point.coords().is_empty(), || tag("reduced point vanishes"))?;
        let check = red.is_semistable().map_err(|e| e.to_string())?;
        ensure(check.semistable, || tag("reduced point is unstable"))?;
        if oracle_applies(&red.reduced_point) {
            ensure(check.certified, || tag("oracle applies but the verdict is not certified"))?;
        }
        reduced += 1;
        certified += check.certified as usize;
    }
    Ok(format!("{reduced} reductions, {certified} certified semistable"))
}

fn determinant_norms() -> Outcome {
    let mut fact = 1u64;
    for d in 1..=6u64 {
        fact *= d;
        let t = det_tensor(d as usize).map_err(|e| e.to_string())?;
        ensure(t.norm == ln(fact).scale(&ratio(1, 2)), || format!("d = {d}: norm {}", t.norm))?;
    }
    Ok("d = 1..6".into())
}

fn bogomolov() -> Outcome {
    let config = TrialConfig {
        seed: 8,
        ranks: vec![1, 2, 3],
        entry_bound: 3,
        trials: 100,
        tolerance_bits: 64,
    };
    let report = check_bogomolov(&config).map_err(|e| e.to_string())?;
    let semistable = report.trials.iter().filter(|t| t.branches.iter().any(|b| b == "semistable")).count();
    Ok(format!("{}; {semistable} semistable", summarize(&report)?))
}

fn reduction_chain() -> Outcome {
    let config = TrialConfig {
        seed: 9,
        ranks: vec![2, 2],
        entry_bound: 3,
        trials: 100,
        tolerance_bits: 64,
    };
    let report = check_reduction_chain(&config).map_err(|e| e.to_string())?;
    let lines: usize = report.trials.iter().map(|t| t.branches.len()).sum();
    let reduced: usize = report
        .trials
        .iter()
        .map(|t| t.branches.iter().filter(|b| b.ends_with("reduced")).count())
        .sum();
    Ok(format!("{}; {lines} lines, {reduced} reduced", summarize(&report)?))
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

const fn minutes(m: u64) -> Duration {
    Duration::from_secs(60 * m)
}

#[test]
fn acceptance_criteria() {
    let criteria = [
        Criterion { id: 1, name: "exact degree identities", limit: minutes(1), run: exact_identities },
        Criterion { id: 2, name: "Bost–Künnemann bracket", limit: minutes(5), run: bost_kunnemann },
        Criterion { id: 3, name: "maximal slope of tensor products", limit: minutes(10), run: main_theorem },
        Criterion { id: 4, name: "filtration calculus", limit: minutes(1), run: filtration_calculus },
        Criterion { id: 5, name: "Kempf minimizer", limit: minutes(10), run: kempf_minimizer },
        Criterion { id: 6, name: "Ramanan–Ramanathan reduction", limit: minutes(5), run: reduction },
        Criterion { id: 7, name: "determinant tensor norm", limit: minutes(1), run: determinant_norms },
        Criterion { id: 8, name: "Bogomolov criterion", limit: minutes(2), run: bogomolov },
        Criterion { id: 9, name: "degree of line subbundles", limit: minutes(10), run: reduction_chain },
    ];
    let mut failed = Vec::new();
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let verdict = match outcome {
            Ok(detail) if elapsed <= c.limit => Ok(detail),
            Ok(detail) => Err(format!("{detail}; took {elapsed:.1?}, limit {:?}", c.limit)),
            Err(e) => Err(e),
        };
        match verdict {
            Ok(detail) => println!("PASS [{}] {} ({elapsed:.1?}): {detail}", c.id, c.name),
            Err(e) => {
                println!("FAIL [{}] {} ({elapsed:.1?}): {e}", c.id, c.name);
                failed.push(c.id);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
