use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::forms::{grid_minimum, min_norm_point, FormLayout};
use super::point::serde_index_list;
use super::{AlgValue, TensorPoint};
use crate::error::{Error, Result};
use crate::exactnum::{int, primitive_integer_vector, rat, serde_rational, Rational};
use crate::filtration::{
    common_compatible_basis, common_compatible_basis_with, random_basis, random_filtration,
    scalar_product, CompatibleBasis, Filtration,
};
use crate::linalg::{self, QMat};

/// The line bundle `O(m) ⊗ ⊗_i det(V⁽ⁱ⁾)^{m_i / r_i}`; `twists` holds the
/// `m_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineBundle {
    pub m: i64,
    pub twists: Vec<i64>,
}

impl LineBundle {
    /// The bundle with `m_i = m` for every factor.
    pub fn standard(arity: usize, m: i64) -> Self {
        LineBundle {
            m,
            twists: vec![m; arity],
        }
    }
}

/// A minimizer of `Λ_x` found in the bases `bases`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimizationResult {
    pub minimizer: Vec<Filtration>,
    pub c: AlgValue,
    #[serde(with = "serde_rational")]
    pub c_tilde: Rational,
    pub bases: Vec<CompatibleBasis>,
    /// Support tuples, in the coordinates of `bases`, active at the optimum.
    #[serde(with = "serde_index_list")]
    pub support: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Stability {
    /// No destabilizer exists (`certified`) or none was found by the search.
    Semistable { certified: bool },
    Unstable { destabilizer: Box<MinimizationResult> },
}

impl Stability {
    pub fn is_semistable(&self) -> bool {
        matches!(self, Stability::Semistable { .. })
    }
}

#[derive(Debug, Clone)]
pub struct KempfOptions {
    pub seed: u64,
    pub random_bases: usize,
    pub challenges: usize,
    pub max_rounds: usize,
}

impl Default for KempfOptions {
    fn default() -> Self {
        KempfOptions {
            seed: 0,
            random_bases: 4,
            challenges: 100,
            max_rounds: 25,
        }
    }
}

fn check_tuple(x: &TensorPoint, tuple: &[Filtration]) -> Result<()> {
    if tuple.len() != x.arity() {
        return Err(Error::dims(format!(
            "{} filtrations for a tensor with {} factors",
            tuple.len(),
            x.arity()
        )));
    }
    for (i, (f, &r)) in tuple.iter().zip(x.shape()).enumerate() {
        if f.dim() != r {
            return Err(Error::dims(format!("filtration {i} has dimension {} but the factor has rank {r}", f.dim())));
        }
    }
    Ok(())
}

/// `λ_{𝓕⁽¹⁾⊗…⊗𝓕⁽ⁿ⁾}(v_x)`.
pub fn tensor_lambda(x: &TensorPoint, tuple: &[Filtration]) -> Result<Rational> {
    check_tuple(x, tuple)?;
    let bases: Vec<CompatibleBasis> = tuple.iter().map(Filtration::adapted_basis).collect();
    let values = tuple
        .iter()
        .zip(&bases)
        .map(|(f, b)| f.coordinates(b))
        .collect::<Result<Vec<_>>>()?;
    let mats: Vec<QMat> = bases.iter().map(|b| b.vectors().clone()).collect();
    let c = x.in_bases(&mats)?;
    Ok(c.coords()
        .keys()
        .map(|s| s.iter().enumerate().map(|(i, &j)| values[i][j].clone()).sum::<Rational>())
        .min()
        .expect("nonzero point"))
}

/// `Σ𝔼[𝓖⁽ⁱ⁾] − λ_{⊗𝓖}(v_x)`.
fn numerator(x: &TensorPoint, tuple: &[Filtration]) -> Result<Rational> {
    let e: Rational = tuple.iter().map(Filtration::expectation).sum();
    Ok(e - tensor_lambda(x, tuple)?)
}

fn total_norm_sq(tuple: &[Filtration]) -> Rational {
    tuple.iter().map(Filtration::norm_sq).sum()
}

/// `Λ_x(𝓖⁽¹⁾, …, 𝓖⁽ⁿ⁾)`, zero on the trivial tuple.
pub fn big_lambda(x: &TensorPoint, tuple: &[Filtration]) -> Result<AlgValue> {
    let num = numerator(x, tuple)?;
    let den = total_norm_sq(tuple);
    if den.is_zero() {
        return Ok(AlgValue::zero());
    }
    Ok(AlgValue::ratio(&num, &den))
}

/// `μ(x, h, L) = Σ m_i 𝔼[𝓕⁽ⁱ⁾] − m λ_𝓕(v_x)` for the one-parameter subgroup
/// given by integer-jump filtrations.
pub fn mu_invariant(x: &TensorPoint, tuple: &[Filtration], bundle: &LineBundle) -> Result<BigInt> {
    check_tuple(x, tuple)?;
    if bundle.m < 1 {
        return Err(Error::invalid("the bundle needs m >= 1"));
    }
    if bundle.twists.len() != x.arity() {
        return Err(Error::dims("one twist per tensor factor is required"));
    }
    if !tuple.iter().all(Filtration::has_integer_jumps) {
        return Err(Error::PreconditionViolated("one-parameter subgroups need integer jumps".into()));
    }
    let twisted: Rational = tuple
        .iter()
        .zip(&bundle.twists)
        .map(|(f, &mi)| f.expectation() * rat(mi))
        .sum();
    let mu = twisted - rat(bundle.m) * tensor_lambda(x, tuple)?;
    if !mu.is_integer() {
        return Err(Error::PreconditionViolated(format!(
            "μ = {mu} is not an integer; the twists must make m_i 𝔼 integral"
        )));
    }
    Ok(mu.to_integer())
}

fn result_for(x: &TensorPoint, minimizer: Vec<Filtration>, bases: Vec<CompatibleBasis>, support: Vec<Vec<usize>>) -> Result<MinimizationResult> {
    let num = numerator(x, &minimizer)?;
    let den = total_norm_sq(&minimizer);
    Ok(MinimizationResult {
        c: AlgValue::ratio(&num, &den),
        c_tilde: num / den,
        minimizer,
        bases,
        support,
    })
}

/// Exact minimum of `Λ_x` over tuples compatible with `bases`; `None` when
/// that minimum is not negative.
pub fn minimize_fixed_basis(x: &TensorPoint, bases: &[CompatibleBasis]) -> Result<Option<MinimizationResult>> {
    if bases.len() != x.arity() || bases.iter().zip(x.shape()).any(|(b, &r)| b.dim() != r) {
        return Err(Error::dims("one basis of the right rank per tensor factor is required"));
    }
    let mats: Vec<QMat> = bases.iter().map(|b| b.vectors().clone()).collect();
    let c = x.in_bases(&mats)?;
    let support = c.support();
    let layout = FormLayout::plain(x.shape());
    let gens: Vec<Vec<Rational>> = support.iter().map(|s| layout.gradient(s)).collect();
    let (p, active) = min_norm_point(&gens, &layout)?;
    if linalg::is_zero_vec(&p) {
        return Ok(None);
    }
    let y: Vec<Rational> = primitive_integer_vector(&p).iter().map(|k| -int(k)).collect();
    let minimizer = layout
        .split(&y)
        .iter()
        .zip(bases)
        .map(|(part, b)| Filtration::from_coordinates(b.vectors(), part))
        .collect::<Result<Vec<_>>>()?;
    let active_support = active.iter().map(|&k| support[k].clone()).collect();
    let result = result_for(x, minimizer, bases.to_vec(), active_support)?;
    if !result.c.is_negative() || result.c.square() != &layout.norm_sq(&p) {
        return Err(Error::Internal("min-norm point and Λ_x disagree".into()));
    }
    Ok(Some(result))
}

/// Candidate bases of `V⁽ⁱ⁾`: the coordinate basis and bases adapted to
/// echelon forms of the mode-`i` matricization.
pub fn mode_candidates(x: &TensorPoint, i: usize) -> Vec<CompatibleBasis> {
    let fibers = linalg::transpose(&x.matricization(i));
    echelon_candidates(&fibers, x.shape()[i])
}

/// The coordinate basis of `ℚ^r`, the row echelon bases of the span of
/// `fibers` (forward and reversed coordinate order) completed by coordinate
/// vectors, and a basis starting with independent fibers.
pub(crate) fn echelon_candidates(fibers: &[Vec<Rational>], r: usize) -> Vec<CompatibleBasis> {
    let mut out: Vec<QMat> = vec![linalg::identity(r)];
    for reversed in [false, true] {
        let flip = |v: &Vec<Rational>| -> Vec<Rational> {
            if reversed {
                v.iter().rev().cloned().collect()
            } else {
                v.clone()
            }
        };
        let cols: QMat = fibers.iter().map(flip).collect();
        let (rows, pivots) = linalg::rref(&cols);
        let mut basis: QMat = rows;
        for a in (0..r).filter(|a| !pivots.contains(a)) {
            let mut e = vec![Rational::zero(); r];
            e[a] = Rational::from_integer(1.into());
            basis.push(e);
        }
        out.push(basis.iter().map(flip).collect());
    }
    let mut chosen: QMat = Vec::new();
    let extends = |chosen: &QMat, v: &Vec<Rational>| {
        linalg::rank(&[chosen.clone(), vec![v.clone()]].concat()) > chosen.len()
    };
    for f in fibers {
        if chosen.len() < r && extends(&chosen, f) {
            chosen.push(f.clone());
        }
    }
    for e in linalg::identity(r) {
        if chosen.len() < r && extends(&chosen, &e) {
            chosen.push(e);
        }
    }
    out.push(chosen);
    let mut unique: Vec<CompatibleBasis> = Vec::new();
    for b in out {
        let b = CompatibleBasis::new(b).expect("completed to a basis");
        if !unique.contains(&b) {
            unique.push(b);
        }
    }
    unique
}

/// All tuples of mode candidates, capped at `limit` tuples.
fn candidate_tuples(x: &TensorPoint, limit: usize) -> Vec<Vec<CompatibleBasis>> {
    let per: Vec<Vec<CompatibleBasis>> = (0..x.arity()).map(|i| mode_candidates(x, i)).collect();
    product_capped(&per, limit)
}

/// The cartesian product of the option lists, truncated to `limit` tuples.
pub(crate) fn product_capped<T: Clone>(per: &[Vec<T>], limit: usize) -> Vec<Vec<T>> {
    let mut tuples: Vec<Vec<T>> = vec![Vec::new()];
    for options in per {
        let mut next = Vec::new();
        'outer: for t in &tuples {
            for b in options {
                if next.len() >= limit {
                    break 'outer;
                }
                let mut t = t.clone();
                t.push(b.clone());
                next.push(t);
            }
        }
        tuples = next;
    }
    tuples
}

fn improve(x: &TensorPoint, bases: &[CompatibleBasis], best: &mut Option<MinimizationResult>) -> Result<bool> {
    match minimize_fixed_basis(x, bases)? {
        Some(r) if best.as_ref().is_none_or(|b| r.c < b.c) => {
            *best = Some(r);
            Ok(true)
        }
        _ => Ok(false),
    }
}

/// Bases compatible with the current minimizer and with each candidate
/// echelon basis; repeats while the value strictly decreases.
fn local_improvement(x: &TensorPoint, best: &mut Option<MinimizationResult>, max_rounds: usize) -> Result<()> {
    let per: Vec<Vec<CompatibleBasis>> = (0..x.arity()).map(|i| mode_candidates(x, i)).collect();
    let width = per.iter().map(Vec::len).max().unwrap_or(0);
    for _ in 0..max_rounds {
        let Some(current) = best.clone() else { return Ok(()) };
        let mut improved = false;
        for k in 0..width {
            let bases = current
                .minimizer
                .iter()
                .zip(&per)
                .map(|(f, options)| {
                    let b = &options[k % options.len()];
                    let ranks: Vec<Rational> = (0..b.dim()).map(|a| rat(a as i64)).collect();
                    let g = Filtration::from_coordinates(b.vectors(), &ranks)?;
                    common_compatible_basis_with(f, &g, b.vectors())
                })
                .collect::<Result<Vec<_>>>()?;
            improved |= improve(x, &bases, best)?;
        }
        if !improved {
            return Ok(());
        }
    }
    Ok(())
}

fn random_tuple(x: &TensorPoint, rng: &mut ChaCha8Rng) -> Vec<Filtration> {
    x.shape().iter().map(|&r| random_filtration(r, 3, rng)).collect()
}

/// Global minimization of `Λ_x`. Returns the minimizer normalized to coprime
/// integer jumps, or `None` when no negative value was found.
///
/// Every returned minimizer has passed the expectation-zero check and the
/// lower-bound inequality against `challenges` random tuples; a failed
/// challenge is used to improve the minimizer before giving up.
pub fn kempf_minimize(x: &TensorPoint, opts: &KempfOptions) -> Result<Option<MinimizationResult>> {
    let mut best = None;
    for bases in candidate_tuples(x, 256) {
        improve(x, &bases, &mut best)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.random_bases {
        let bases: Vec<CompatibleBasis> = x
            .shape()
            .iter()
            .map(|&r| CompatibleBasis::new(random_basis(r, 2, &mut rng)).expect("invertible"))
            .collect();
        improve(x, &bases, &mut best)?;
    }
    local_improvement(x, &mut best, opts.max_rounds)?;

    for _ in 0..opts.max_rounds {
        match best.clone() {
            None => {
                let mut witness = None;
                for _ in 0..opts.challenges {
                    let g = random_tuple(x, &mut rng);
                    if big_lambda(x, &g)?.is_negative() {
                        witness = Some(g);
                        break;
                    }
                }
                let Some(g) = witness else { return Ok(None) };
                let bases: Vec<CompatibleBasis> = g.iter().map(Filtration::adapted_basis).collect();
                if !improve(x, &bases, &mut best)? {
                    return Err(Error::Internal("negative Λ_x not reproduced in its own basis".into()));
                }
            }
            Some(r) => {
                if r.minimizer.iter().any(|f| !f.expectation().is_zero()) {
                    return Err(Error::SearchNotConverged("minimizer has nonzero expectation".into()));
                }
                let mut violated = None;
                for _ in 0..opts.challenges {
                    let g = random_tuple(x, &mut rng);
                    if !satisfies_lower_bound(x, &r, &g)? {
                        violated = Some(g);
                        break;
                    }
                }
                let Some(g) = violated else { return Ok(Some(r)) };
                let bases = r
                    .minimizer
                    .iter()
                    .zip(&g)
                    .map(|(f, gi)| common_compatible_basis(f, gi))
                    .collect::<Result<Vec<_>>>()?;
                if !improve(x, &bases, &mut best)? {
                    return Err(Error::SearchNotConverged(
                        "a challenge tuple violates the minimizer inequality".into(),
                    ));
                }
            }
        }
        local_improvement(x, &mut best, opts.max_rounds)?;
    }
    Err(Error::SearchNotConverged("verification rounds exhausted".into()))
}

/// `Σ𝔼[𝓖⁽ⁱ⁾] − λ_{⊗𝓖}(v_x) >= c·Σ⟨𝓕⁽ⁱ⁾,𝓖⁽ⁱ⁾⟩ / ‖𝓕‖`, using `c/‖𝓕‖ = c̃`.
pub fn satisfies_lower_bound(x: &TensorPoint, r: &MinimizationResult, g: &[Filtration]) -> Result<bool> {
    let lhs = numerator(x, g)?;
    let pairing = r
        .minimizer
        .iter()
        .zip(g)
        .map(|(f, gi)| scalar_product(f, gi))
        .sum::<Result<Rational>>()?;
    Ok(lhs >= &r.c_tilde * pairing)
}

/// Whether the brute-force oracle covers the shape.
pub fn oracle_applies(x: &TensorPoint) -> bool {
    x.arity() <= 2 && x.shape().iter().all(|&r| r <= 2) && x.coords().len() <= 4
}

/// Minimum of `Λ_x` over integer jumps in `[-bound, bound]` on all tuples of
/// candidate bases.
pub fn brute_force_minimum(x: &TensorPoint, bound: i64) -> Result<AlgValue> {
    let layout = FormLayout::plain(x.shape());
    let mut best = AlgValue::zero();
    for bases in candidate_tuples(x, usize::MAX) {
        let mats: Vec<QMat> = bases.iter().map(|b| b.vectors().clone()).collect();
        let support = x.in_bases(&mats)?.support();
        let v = grid_minimum(&layout, &support, bound);
        if v < best {
            best = v;
        }
    }
    Ok(best)
}

pub fn is_semistable(x: &TensorPoint) -> Result<Stability> {
    is_semistable_with(x, &KempfOptions::default())
}

/// Hilbert–Mumford decision through `Λ_x`. A semistable verdict is
/// certified when every factor has rank one or the brute-force oracle
/// applies and agrees.
pub fn is_semistable_with(x: &TensorPoint, opts: &KempfOptions) -> Result<Stability> {
    if let Some(r) = kempf_minimize(x, opts)? {
        return Ok(Stability::Unstable {
            destabilizer: Box::new(r),
        });
    }
    let certified = if x.shape().iter().all(|&r| r == 1) {
        true
    } else if oracle_applies(x) {
        if brute_force_minimum(x, 3)?.is_negative() {
            return Err(Error::SearchNotConverged("the brute-force oracle found a destabilizer".into()));
        }
        true
    } else {
        false
    };
    Ok(Stability::Semistable { certified })
}

/// Whether two tuples agree up to a positive dilation, compared through
/// coordinates in common compatible bases.
pub fn same_up_to_dilation(a: &[Filtration], b: &[Filtration]) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::dims("tuples of different lengths"));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (f, g) in a.iter().zip(b) {
        let basis = common_compatible_basis(f, g)?;
        xs.extend(f.coordinates(&basis)?);
        ys.extend(g.coordinates(&basis)?);
    }
    let Some(k) = xs.iter().position(|q| !q.is_zero()) else {
        return Ok(ys.iter().all(Zero::is_zero));
    };
    let t = &ys[k] / &xs[k];
    Ok(t.is_positive() && xs.iter().zip(&ys).all(|(p, q)| p * &t == *q))
}
