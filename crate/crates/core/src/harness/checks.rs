use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::{campaign, random_lattice, random_matrix, Check, Comparison, Relation, TrialConfig, TrialRecord, TrialReport, Verdict, DECIMAL_BITS};
use crate::error::{Error, Result};
use crate::exactnum::{int, primitive_integer_vector, rat, ratio, LogValue, Rational};
use crate::gitstab::{is_semistable_with, rr_reduce_with, KempfOptions, ReducedInstance, Stability, TensorPoint};
use crate::lattice::{
    hn_filtration, morphism_height, mu_max, short_vectors, udeg_max, Lattice, Morphism, DEFAULT_RANK_LIMIT,
};
use crate::linalg::{self, Subspace};

fn ln(n: usize) -> LogValue {
    LogValue::ln(&rat(n as i64))
}

fn lattices_json(ls: &[Lattice]) -> serde_json::Value {
    serde_json::to_value(ls).expect("lattices serialize")
}

fn tensor_all(ls: &[Lattice]) -> Lattice {
    ls[1..].iter().fold(ls[0].clone(), |acc, l| acc.tensor(l))
}

fn pick_rank(ranks: &[usize], rng: &mut ChaCha8Rng) -> usize {
    ranks[rng.gen_range(0..ranks.len())]
}

pub fn check_main_theorem(config: &TrialConfig) -> Result<TrialReport> {
    let total: usize = config.ranks.iter().product();
    if total > DEFAULT_RANK_LIMIT {
        return Err(Error::PreconditionViolated(format!(
            "the tensor product has rank {total}, above the exact search limit {DEFAULT_RANK_LIMIT}"
        )));
    }
    campaign(Check::MainTheorem, config, main_theorem_trial)
}

pub(super) fn main_theorem_trial(index: usize, rng: &mut ChaCha8Rng, config: &TrialConfig) -> Result<TrialRecord> {
    let ls: Vec<Lattice> = config.ranks.iter().map(|&r| random_lattice(r, config.entry_bound, rng)).collect();
    let cmp = main_theorem_comparisons(&ls)?;
    Ok(TrialRecord::new(index, json!({ "lattices": lattices_json(&ls) }), cmp))
}

/// `Σ μ̂_max(Ē_i) <= μ̂_max(⊗Ē_i) <= Σ (μ̂_max(Ē_i) + log r_i)`, with
/// equality on the left when at most one factor has rank above one.
pub fn main_theorem_comparisons(ls: &[Lattice]) -> Result<Vec<Comparison>> {
    if ls.is_empty() {
        return Err(Error::invalid("at least one factor is required"));
    }
    let mut sum_mu = LogValue::zero();
    let mut rhs = LogValue::zero();
    for l in ls {
        let (mu, _) = mu_max(l)?;
        rhs += &(&mu + &ln(l.rank()));
        sum_mu += &mu;
    }
    let (mu_t, _) = mu_max(&tensor_all(ls))?;
    let mut cmp = vec![
        Comparison::exact("mu_max(tensor) <= sum(mu_max + log r)", mu_t.clone(), Relation::Le, rhs),
        Comparison::exact("sum(mu_max) <= mu_max(tensor)", sum_mu.clone(), Relation::Le, mu_t.clone()),
    ];
    if ls.iter().filter(|l| l.rank() > 1).count() <= 1 {
        cmp.push(Comparison::exact("mu_max(tensor) = sum(mu_max)", mu_t, Relation::Eq, sum_mu));
    }
    Ok(cmp)
}

pub fn check_bost_kunnemann(config: &TrialConfig) -> Result<TrialReport> {
    campaign(Check::BostKunnemann, config, bost_kunnemann_trial)
}

pub(super) fn bost_kunnemann_trial(index: usize, rng: &mut ChaCha8Rng, config: &TrialConfig) -> Result<TrialRecord> {
    let r = pick_rank(&config.ranks, rng);
    let l = random_lattice(r, config.entry_bound, rng);
    let cmp = bost_kunnemann_comparisons(&l)?;
    Ok(TrialRecord::new(index, json!({ "lattices": lattices_json(&[l]) }), cmp))
}

/// `udeĝ <= μ̂_max <= udeĝ + ½ log r`.
pub fn bost_kunnemann_comparisons(l: &Lattice) -> Result<Vec<Comparison>> {
    let (u, _) = udeg_max(l)?;
    let (mu, _) = mu_max(l)?;
    let upper = &u + &ln(l.rank()).scale(&ratio(1, 2));
    Ok(vec![
        Comparison::exact("udeg <= mu_max", u, Relation::Le, mu.clone()),
        Comparison::exact("mu_max <= udeg + log(r)/2", mu, Relation::Le, upper),
    ])
}

/// Limits of the flag and sequence enumeration in the Bogomolov check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlagBudget {
    pub random_flags: usize,
    /// Sequences `a` have entries `r t_j` or `t_j` with `|t_j| <= max_entry`.
    pub max_entry: i64,
}

impl Default for FlagBudget {
    fn default() -> Self {
        FlagBudget {
            random_flags: 4,
            max_entry: 2,
        }
    }
}

/// `(rank, degree)` of `E = E_0 ⊋ E_1 ⊋ … ⊋ E_d = 0`.
type Levels = Vec<(usize, LogValue)>;

fn saturated_degree(l: &Lattice, vectors: &[Vec<Rational>]) -> Result<(usize, LogValue)> {
    let s = Subspace::span(l.rank(), vectors);
    if s.dim() == 0 {
        return Ok((0, LogValue::zero()));
    }
    if s.dim() == l.rank() {
        return Ok((l.rank(), l.degree()));
    }
    let gens: Vec<Vec<BigInt>> = s.basis().iter().map(|v| primitive_integer_vector(v)).collect();
    Ok((s.dim(), l.sublattice(gens)?.saturate().degree()))
}

fn levels_of(l: &Lattice, members: &[Vec<Vec<Rational>>]) -> Result<Levels> {
    let mut out = vec![(l.rank(), l.degree())];
    for m in members {
        out.push(saturated_degree(l, m)?);
    }
    out.push((0, LogValue::zero()));
    Ok(out)
}

/// `deĝ 𝓛^a_𝓓` from its definition as a tensor of determinants.
fn degree_by_definition(levels: &Levels, a: &[i64]) -> LogValue {
    let (r, deg_e) = &levels[0];
    a.iter()
        .enumerate()
        .map(|(j, &aj)| {
            let (rj, dj) = &levels[j];
            let (rn, dn) = &levels[j + 1];
            let twist = deg_e.scale(&-ratio((rj - rn) as i64, *r as i64));
            (&twist + &(dj - dn)).scale(&rat(aj))
        })
        .sum()
}

/// The same degree as `Σ_{j>=1} (a_j − a_{j−1}) rk E_j (μ̂(E_j) − μ̂(E))`.
fn degree_by_telescoping(levels: &Levels, a: &[i64]) -> LogValue {
    let (r, deg_e) = &levels[0];
    let mu_e = deg_e.scale(&ratio(1, *r as i64));
    (1..a.len())
        .map(|j| {
            let (rj, dj) = &levels[j];
            let mu_j = dj.scale(&ratio(1, *rj as i64));
            (&mu_j - &mu_e).scale(&rat((a[j] - a[j - 1]) * *rj as i64))
        })
        .sum()
}

/// Strictly increasing `a` of length `d`, either in `rℤ^d` or with
/// `Σ r_j a_j = 0`.
fn admissible_sequences(step_ranks: &[usize], r: usize, max_entry: i64) -> Vec<Vec<i64>> {
    let d = step_ranks.len();
    let mut out = BTreeSet::new();
    let values: Vec<i64> = (-max_entry..=max_entry).collect();
    for pick in linalg::subsets(values.len(), d) {
        let t: Vec<i64> = pick.iter().map(|&k| values[k]).collect();
        out.insert(t.iter().map(|x| x * r as i64).collect::<Vec<_>>());
        if t.iter().zip(step_ranks).map(|(x, &rj)| x * rj as i64).sum::<i64>() == 0 {
            out.insert(t);
        }
    }
    out.into_iter().collect()
}

fn random_chain(l: &Lattice, rng: &mut ChaCha8Rng) -> Option<Vec<Vec<Vec<Rational>>>> {
    let r = l.rank();
    let vs: Vec<Vec<Rational>> = (0..r.saturating_sub(1))
        .map(|_| (0..r).map(|_| rat(rng.gen_range(-3..=3))).collect())
        .collect();
    let mut chain = Vec::new();
    for k in 1..r {
        if Subspace::span(r, &vs[..k]).dim() != k {
            return None;
        }
        if rng.gen_bool(0.5) {
            chain.push(vs[..k].to_vec());
        }
    }
    chain.reverse();
    Some(chain)
}

/// Degrees `deĝ 𝓛^a_𝓓` over enumerated flags and sequences: every value is
/// `<= 0` when `L` is semistable, and the two-step flag through the
/// maximal destabilizing sublattice gives a positive value otherwise. Both
/// formulas for the degree are compared on every pair.
pub fn bogomolov_comparisons(l: &Lattice, budget: &FlagBudget, rng: &mut ChaCha8Rng) -> Result<(Vec<Comparison>, String)> {
    let hn = hn_filtration(l)?;
    let r = l.rank();
    let basis_of = |s: &crate::lattice::SubLattice| -> Vec<Vec<Rational>> {
        s.basis().iter().map(|v| v.iter().map(int).collect()).collect()
    };
    let mut flags: Vec<Vec<Vec<Vec<Rational>>>> = vec![Vec::new()];
    let proper = &hn.chain[..hn.chain.len() - 1];
    if !proper.is_empty() {
        flags.push(proper.iter().rev().map(basis_of).collect());
        flags.push(vec![basis_of(&proper[0])]);
    }
    for _ in 0..budget.random_flags {
        if let Some(c) = random_chain(l, rng) {
            flags.push(c);
        }
    }

    let mut cmp = Vec::new();
    let mut best: Option<LogValue> = None;
    let mut pairs = 0usize;
    let mut mismatches = 0usize;
    for flag in &flags {
        let levels = levels_of(l, flag)?;
        let steps: Vec<usize> = levels.windows(2).map(|w| w[0].0 - w[1].0).collect();
        if steps.contains(&0) {
            continue;
        }
        for a in admissible_sequences(&steps, r, budget.max_entry) {
            let def = degree_by_definition(&levels, &a);
            let tele = degree_by_telescoping(&levels, &a);
            pairs += 1;
            if def != tele && mismatches < 5 {
                mismatches += 1;
                cmp.push(Comparison::exact(format!("definition = telescoping for a = {a:?}"), def.clone(), Relation::Eq, tele));
            }
            if best.as_ref().is_none_or(|b| def > *b) {
                best = Some(def);
            }
        }
    }
    let best = best.unwrap_or_else(LogValue::zero);
    let branch = if hn.is_semistable() {
        cmp.push(Comparison::exact(format!("max deg L over {pairs} pairs <= 0"), best, Relation::Le, LogValue::zero()));
        "semistable"
    } else {
        let e1 = saturated_degree(l, &basis_of(&hn.chain[0]))?;
        let levels = vec![(r, l.degree()), e1, (0, LogValue::zero())];
        let a = [0, r as i64];
        let value = degree_by_telescoping(&levels, &a);
        cmp.push(Comparison::exact("deg L(a=(0,r)) = definition", value.clone(), Relation::Eq, degree_by_definition(&levels, &a)));
        cmp.push(Comparison::exact("0 < deg L(a=(0,r))", LogValue::zero(), Relation::Lt, value));
        "unstable"
    };
    Ok((cmp, branch.to_string()))
}

pub fn check_bogomolov(config: &TrialConfig) -> Result<TrialReport> {
    campaign(Check::Bogomolov, config, bogomolov_trial)
}

pub(super) fn bogomolov_trial(index: usize, rng: &mut ChaCha8Rng, config: &TrialConfig) -> Result<TrialRecord> {
    let r = pick_rank(&config.ranks, rng);
    let l = random_lattice(r, config.entry_bound, rng);
    let (cmp, branch) = bogomolov_comparisons(&l, &FlagBudget::default(), rng)?;
    let mut rec = TrialRecord::new(index, json!({ "lattices": lattices_json(&[l]) }), cmp);
    rec.branches.push(branch);
    Ok(rec)
}

pub fn check_slope_inequalities(config: &TrialConfig) -> Result<TrialReport> {
    campaign(Check::SlopeInequalities, config, slope_trial)
}

/// For a random nonzero integer matrix `φ: E → F`: `μ̂(Ē) <= μ̂_max(F̄) + h(φ)`
/// when `φ` is injective, and `μ̂_min(Ē) <= μ̂_max(F̄) + h(φ)`.
pub(super) fn slope_trial(index: usize, rng: &mut ChaCha8Rng, config: &TrialConfig) -> Result<TrialRecord> {
    let re = pick_rank(&config.ranks, rng);
    let rf = pick_rank(&config.ranks, rng);
    let e = random_lattice(re, config.entry_bound, rng);
    let f = random_lattice(rf, config.entry_bound, rng);
    let phi = loop {
        let m = random_matrix(rf, re, config.entry_bound, rng);
        let phi = Morphism::new(e.clone(), f.clone(), linalg::to_rational(&m))?;
        if !phi.is_zero() {
            break phi;
        }
    };
    let h = morphism_height(&phi, config.tolerance_bits)?;
    let (mu_f, _) = mu_max(&f)?;
    let lower = &mu_f + &h.lower();
    let upper = &mu_f + &h.upper();
    let mut cmp = Vec::new();
    if phi.is_injective() {
        cmp.push(Comparison::le_bracket("mu(E) <= mu_max(F) + h(phi)", e.slope()?, lower.clone(), upper.clone()));
    }
    let mu_min = hn_filtration(&e)?.mu_min().clone();
    cmp.push(Comparison::le_bracket("mu_min(E) <= mu_max(F) + h(phi)", mu_min, lower, upper));
    let inputs = json!({ "morphism": serde_json::to_value(&phi).expect("morphism serializes") });
    Ok(TrialRecord::new(index, inputs, cmp))
}

pub fn check_reduction_chain(config: &TrialConfig) -> Result<TrialReport> {
    let total: usize = config.ranks.iter().product();
    if total > DEFAULT_RANK_LIMIT {
        return Err(Error::PreconditionViolated(format!(
            "the tensor product has rank {total}, above the exact search limit {DEFAULT_RANK_LIMIT}"
        )));
    }
    campaign(Check::ReductionChain, config, reduction_trial)
}

/// Attempts at drawing a semistable factor before giving up on a trial.
const SEMISTABLE_ATTEMPTS: usize = 200;

/// Extra room below the bound covered by the line enumeration.
fn coverage_margin() -> LogValue {
    LogValue::ln(&rat(2))
}

/// Smallest integer `B` with `exp(t) <= B` for the value `t`, padded
/// against floating-point error in the exponential.
fn exp_ceiling(t: &LogValue) -> Rational {
    let hi = t.approximate(DECIMAL_BITS).hi();
    let x = crate::exactnum::to_f64(&hi).exp() * (1.0 + 1e-9) + 1e-9;
    Rational::from_integer(BigInt::from(x.ceil() as u128))
}

/// For semistable factors, every line `M̄` of the tensor product near the
/// bound satisfies `deĝ M̄ <= Σ (μ̂(Ē_i) + ½ log r_i)`. Lines that are GIT
/// unstable also go through the reduction, and each step of the resulting
/// chain of bounds is checked.
pub(super) fn reduction_trial(index: usize, rng: &mut ChaCha8Rng, config: &TrialConfig) -> Result<TrialRecord> {
    let mut ls = Vec::new();
    for &r in &config.ranks {
        let l = (0..SEMISTABLE_ATTEMPTS)
            .map(|_| random_lattice(r, config.entry_bound, rng))
            .find(|l| hn_filtration(l).is_ok_and(|h| h.is_semistable()));
        match l {
            Some(l) => ls.push(l),
            None => {
                return Err(Error::SearchNotConverged(format!(
                    "no semistable lattice of rank {r} in {SEMISTABLE_ATTEMPTS} draws"
                )))
            }
        }
    }
    let mut mus = Vec::new();
    for l in &ls {
        mus.push(l.slope()?);
    }
    let rhs = bound_of(&ls, &mus);
    let t = tensor_all(&ls);
    let (shortest, _) = udeg_max(&t)?;
    let radius = exp_ceiling(&(&coverage_margin() - &rhs).scale(&rat(2)));
    let shortest_sq = exp_ceiling(&(-shortest.scale(&rat(2))));
    let bound = radius.max(shortest_sq);
    let lines: Vec<Vec<BigInt>> = short_vectors(&t, &bound)?
        .into_iter()
        .filter(|v| v.iter().fold(BigInt::zero(), |g, x| g.gcd(x)).is_one())
        .collect();

    let mut cmp = Vec::new();
    let mut branches = Vec::new();
    let mut broken = Vec::new();
    for v in &lines {
        let line = line_subbundle_comparisons(&ls, v, config.seed)?;
        cmp.extend(line.comparisons);
        branches.push(format!("{v:?}: {}", line.branch));
        broken.extend(line.broken);
    }
    let mut rec = TrialRecord::new(index, json!({ "lattices": lattices_json(&ls), "lines": lines.len() }), cmp);
    rec.branches = branches;
    if !broken.is_empty() {
        rec.verdict = Verdict::Fail;
        rec.note = Some(broken.join("; "));
    }
    Ok(rec)
}

/// Outcome of the degree bound for one line `M = ℤv` of `⊗Ē_i`.
#[derive(Debug, Clone)]
pub struct LineCheck {
    pub comparisons: Vec<Comparison>,
    /// `semistable` when `M_K` is GIT semistable, `reduced` otherwise.
    pub branch: &'static str,
    /// Violated structural facts of the reduction.
    pub broken: Vec<String>,
}

/// `deĝ M̄ <= Σ (μ̂(Ē_i) + ½ log r_i)` for `M = ℤv` in the tensor product of
/// semistable factors, following the reduction when `M_K` is unstable.
pub fn line_subbundle_comparisons(ls: &[Lattice], v: &[BigInt], seed: u64) -> Result<LineCheck> {
    let ranks: Vec<usize> = ls.iter().map(Lattice::rank).collect();
    let t = tensor_all(ls);
    if v.len() != t.rank() || v.iter().all(Zero::is_zero) {
        return Err(Error::invalid("the line needs a nonzero vector of the tensor product"));
    }
    let mut mus = Vec::new();
    for l in ls {
        mus.push(l.slope()?);
    }
    let rhs = bound_of(ls, &mus);
    let deg_m = LogValue::log_of(&t.norm_sq(v), &ratio(-1, 2))?;
    let x = TensorPoint::from_dense(ranks, &v.iter().map(int).collect::<Vec<_>>())?;
    let mut comparisons = vec![Comparison::exact(
        format!("deg M <= sum(mu + log(r)/2) for v = {v:?}"),
        deg_m.clone(),
        Relation::Le,
        rhs.clone(),
    )];
    let opts = KempfOptions {
        seed,
        ..KempfOptions::default()
    };
    let mut broken = Vec::new();
    let branch = match is_semistable_with(&x, &opts)? {
        Stability::Semistable { .. } => "semistable",
        Stability::Unstable { destabilizer } => {
            let red = rr_reduce_with(&x, &destabilizer, 100, seed)?;
            if !red.is_semistable()?.semistable {
                broken.push(format!("reduced point of {v:?} is unstable"));
            }
            comparisons.extend(reduced_chain(ls, &mus, &red, &deg_m, &rhs, &mut broken)?);
            "reduced"
        }
    };
    Ok(LineCheck {
        comparisons,
        branch,
        broken,
    })
}

fn bound_of(ls: &[Lattice], mus: &[LogValue]) -> LogValue {
    ls.iter()
        .zip(mus)
        .map(|(l, mu)| mu + &ln(l.rank()).scale(&ratio(1, 2)))
        .sum()
}

/// `deĝ M <= R₁ <= R₂ <= R₃ = Σ (μ̂_i + ½ log r_i)` along the reduction:
/// `R₁ = Σ μ̂_i + (1/N) Σ deĝ 𝓛_i + Σ r_j b_j log r_j / 2N`, `R₂` drops the
/// line bundle terms and `R₃` replaces `log r_j` by `log r_i`.
fn reduced_chain(
    ls: &[Lattice],
    mus: &[LogValue],
    red: &ReducedInstance,
    deg_m: &LogValue,
    rhs: &LogValue,
    broken: &mut Vec<String>,
) -> Result<Vec<Comparison>> {
    let n = red.n;
    let sum_mu: LogValue = mus.iter().cloned().sum();
    let mut line_bundles = LogValue::zero();
    let mut local = LogValue::zero();
    let mut global = LogValue::zero();
    for ((l, f), blocks) in ls.iter().zip(&red.flags).zip(&red.blocks) {
        let members: Vec<Vec<Vec<Rational>>> = (1..f.depth()).map(|j| f.member(j).basis().clone()).collect();
        let levels = levels_of(l, &members)?;
        if blocks.iter().map(|b| b.a * b.rank as i64).sum::<i64>() != 0 {
            broken.push("Σ a_j r_j ≠ 0".into());
        }
        for (j, b) in blocks.iter().enumerate() {
            if b.b < 0 {
                broken.push(format!("negative twist b = {}", b.b));
            }
            let diff = &levels[j].1 - &levels[j + 1].1;
            line_bundles += &diff.scale(&rat(b.a));
            let w = ratio(b.rank as i64 * b.b, 2 * n);
            local += &ln(b.rank).scale(&w);
            global += &ln(l.rank()).scale(&w);
        }
    }
    let r1 = &(&sum_mu + &line_bundles.scale(&ratio(1, n))) + &local;
    let r2 = &sum_mu + &local;
    let r3 = &sum_mu + &global;
    Ok(vec![
        Comparison::exact("deg M <= reduced bound", deg_m.clone(), Relation::Le, r1.clone()),
        Comparison::exact("reduced bound <= bound without line bundles", r1, Relation::Le, r2.clone()),
        Comparison::exact("bound with log r_j <= bound with log r", r2, Relation::Le, r3.clone()),
        Comparison::exact("reduced chain ends at sum(mu + log(r)/2)", r3, Relation::Eq, rhs.clone()),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::trial_rng;

    fn levels(l: &Lattice, members: &[Vec<Vec<i64>>]) -> Levels {
        let m: Vec<Vec<Vec<Rational>>> = members
            .iter()
            .map(|vs| vs.iter().map(|v| v.iter().map(|&x| rat(x)).collect()).collect())
            .collect();
        levels_of(l, &m).unwrap()
    }

    #[test]
    fn bogomolov_examples() {
        let id = Lattice::identity(2);
        let lv = levels(&id, &[vec![vec![1, 0]]]);
        assert!(degree_by_telescoping(&lv, &[0, 2]).is_zero());

        let d = Lattice::diag(&[1, 4]).unwrap();
        let lv = levels(&d, &[vec![vec![1, 0]]]);
        let v = degree_by_telescoping(&lv, &[0, 2]);
        assert_eq!(v, LogValue::ln(&rat(2)));
        assert_eq!(degree_by_definition(&lv, &[0, 2]), v);
    }

    #[test]
    fn sequences_are_admissible() {
        for a in admissible_sequences(&[1, 2], 3, 2) {
            assert!(a[0] < a[1]);
            assert!(a.iter().all(|x| x % 3 == 0) || a[0] + 2 * a[1] == 0);
        }
        assert!(admissible_sequences(&[1, 1], 2, 2).contains(&vec![-1, 1]));
    }

    #[test]
    fn bogomolov_branches() {
        let mut rng = trial_rng(0, 0);
        let (cmp, branch) = bogomolov_comparisons(&Lattice::diag(&[1, 4]).unwrap(), &FlagBudget::default(), &mut rng).unwrap();
        assert_eq!(branch, "unstable");
        assert!(cmp.iter().all(|c| c.verdict == Verdict::Pass));
        let (cmp, branch) = bogomolov_comparisons(&Lattice::identity(3), &FlagBudget::default(), &mut rng).unwrap();
        assert_eq!(branch, "semistable");
        assert!(cmp.iter().all(|c| c.verdict == Verdict::Pass));
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn main_theorem_examples() {
        let d = Lattice::diag(&[1, 4]).unwrap();
        let cmp = main_theorem_comparisons(&[d.clone(), d]).unwrap();
        assert!(cmp[0].lhs.is_zero());
        assert_eq!(cmp[0].rhs, LogValue::ln(&rat(4)));
        assert!(cmp.iter().all(|c| c.verdict == Verdict::Pass));
        let id = Lattice::identity(2);
        assert!(main_theorem_comparisons(&[id.clone(), id]).unwrap().iter().all(|c| c.verdict == Verdict::Pass));
        let cmp = main_theorem_comparisons(&[Lattice::diag(&[1, 4]).unwrap(), Lattice::diag(&[9]).unwrap()]).unwrap();
        assert_eq!(cmp.len(), 3);
        assert!(cmp.iter().all(|c| c.verdict == Verdict::Pass));
    }

    #[test]
    fn bost_kunnemann_examples() {
        let cmp = bost_kunnemann_comparisons(&Lattice::identity(3)).unwrap();
        assert!(cmp[0].lhs.is_zero() && cmp[0].rhs.is_zero());
        assert_eq!(cmp[1].rhs, LogValue::ln(&rat(3)).scale(&ratio(1, 2)));
        let cmp = bost_kunnemann_comparisons(&Lattice::diag(&[1, 4]).unwrap()).unwrap();
        assert!(cmp.iter().all(|c| c.verdict == Verdict::Pass));
    }

    #[test]
    fn line_subbundle_examples() {
        let id = Lattice::identity(2);
        let ls = [id.clone(), id];
        let pure = line_subbundle_comparisons(&ls, &big(&[1, 0, 0, 0]), 0).unwrap();
        assert_eq!(pure.branch, "reduced");
        assert!(pure.broken.is_empty());
        assert!(pure.comparisons[0].lhs.is_zero());
        assert_eq!(pure.comparisons[0].rhs, LogValue::ln(&rat(2)));
        assert!(pure.comparisons.iter().all(|c| c.verdict == Verdict::Pass));

        let diagonal = line_subbundle_comparisons(&ls, &big(&[1, 0, 0, 1]), 0).unwrap();
        assert_eq!(diagonal.branch, "semistable");
        assert_eq!(diagonal.comparisons[0].lhs, -LogValue::ln(&rat(2)).scale(&ratio(1, 2)));
        assert!(diagonal.comparisons.iter().all(|c| c.verdict == Verdict::Pass));
    }

    #[test]
    fn slope_example() {
        let id = Lattice::identity(2);
        let phi = Morphism::new(id.clone(), id, vec![vec![rat(1), rat(0)], vec![rat(0), rat(2)]]).unwrap();
        let h = morphism_height(&phi, 64).unwrap();
        assert!(h.is_exact());
        assert_eq!(h.upper(), LogValue::ln(&rat(2)));
    }

    #[test]
    fn exp_ceiling_covers() {
        assert_eq!(exp_ceiling(&LogValue::ln(&rat(3))), rat(4));
        assert_eq!(exp_ceiling(&LogValue::zero()), rat(2));
    }
}
