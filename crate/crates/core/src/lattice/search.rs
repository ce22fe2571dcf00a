//! Shortest vectors, maximal slopes and Harder-Narasimhan filtrations.
//!
//! The best rank-`k` sublattice is the shortest nonzero decomposable vector
//! of `Λ^k L`. Searches compare slopes through exact keys `(det, rank)`:
//! `slope(a) >= slope(b)` iff `det_a^rank_b <= det_b^rank_a`.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::{Lattice, SubLattice};
use crate::error::{Error, Result};
use crate::exactnum::{
    compare_powers, primitive_integer_vector, ratio, serde_bigint_matrix, to_f64, LogValue,
    Rational,
};
use crate::linalg::{self, QMat, DEFAULT_NODE_BUDGET};

pub const DEFAULT_RANK_LIMIT: usize = 6;

/// All nonzero `v` with `vᵀGv <= bound`, one of each `±v`.
pub fn short_vectors(l: &Lattice, bound: &Rational) -> Result<Vec<Vec<BigInt>>> {
    if !bound.is_positive() {
        return Err(Error::invalid("enumeration bound must be positive"));
    }
    Ok(linalg::short_vectors(l.gram(), bound, DEFAULT_NODE_BUDGET)?
        .into_iter()
        .map(|(v, _)| v)
        .collect())
}

/// Tie-break among equally good candidates: prefer the lexicographically
/// largest sign-normalized vector, so `e1` beats `e2`.
fn prefer<T: Ord>(a: &T, b: &T) -> bool {
    a > b
}

/// Largest degree of a rank-one sublattice and a primitive vector attaining it.
pub fn udeg_max(l: &Lattice) -> Result<(LogValue, Vec<BigInt>)> {
    let (norm, v) = shortest_vector(l.gram())?;
    Ok((LogValue::log_of(&norm, &ratio(-1, 2))?, v))
}

fn shortest_vector(g: &QMat) -> Result<(Rational, Vec<BigInt>)> {
    if g.is_empty() {
        return Err(Error::invalid("rank must be positive"));
    }
    let u = linalg::lll_gram(g);
    let reduced = linalg::congruence(g, &linalg::transpose(&u));
    let radius = (0..g.len()).map(|i| reduced[i][i].clone()).min().expect("nonempty");
    let found = linalg::short_vectors(g, &radius, DEFAULT_NODE_BUDGET)?;
    let min = found.first().map(|x| x.1.clone()).ok_or_else(|| {
        Error::Internal("enumeration missed the reduced basis vector".into())
    })?;
    let best = found
        .into_iter()
        .filter(|(_, n)| *n == min)
        .map(|(v, _)| v)
        .reduce(|a, b| if prefer(&b, &a) { b } else { a })
        .expect("nonempty");
    Ok((min, best))
}

/// Exact slope key: `slope = -½ log(det) / rank`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Key {
    det: Rational,
    rank: u32,
}

impl Key {
    fn slope(&self) -> LogValue {
        LogValue::log_of(&self.det, &ratio(-1, 2 * self.rank as i64)).expect("positive det")
    }

    fn cmp_slope(&self, other: &Key) -> Ordering {
        compare_powers(&other.det, self.rank, &self.det, other.rank)
    }
}

/// A rational `R >= det^(k / rank)`, exact when `rank` divides `k`.
fn radius_for(best: &Key, k: u32) -> Rational {
    if k.is_multiple_of(best.rank) {
        return num_traits::pow(best.det.clone(), (k / best.rank) as usize);
    }
    let est = (to_f64(&best.det).ln() * k as f64 / best.rank as f64).exp();
    let mut r = BigRational::from_float(est * (1.0 + 1e-9)).unwrap_or_else(|| best.det.clone());
    let bump = ratio(1 << 20 | 1, 1 << 20);
    while compare_powers(&r, best.rank, &best.det, k) == Ordering::Less {
        r *= &bump;
    }
    r
}

/// Signed coordinate of `e_{set}` (unsorted) in a vector indexed by sorted subsets.
fn signed_coord(w: &[Rational], set: &[usize], n: usize) -> Rational {
    let mut s = set.to_vec();
    let mut sign = false;
    for i in 0..s.len() {
        for j in 0..s.len() - 1 - i {
            match s[j].cmp(&s[j + 1]) {
                Ordering::Greater => {
                    s.swap(j, j + 1);
                    sign = !sign;
                }
                Ordering::Equal => return Rational::zero(),
                Ordering::Less => {}
            }
        }
    }
    let v = w[linalg::subset_index(&s, n)].clone();
    if sign {
        -v
    } else {
        v
    }
}

/// Quadratic Plücker relations for a `k`-vector in `Λ^k ℚ^n`.
fn satisfies_plucker(w: &[Rational], n: usize, k: usize) -> bool {
    if k <= 1 || k + 1 >= n {
        return true;
    }
    for small in linalg::subsets(n, k - 1) {
        for big in linalg::subsets(n, k + 1) {
            let mut total = Rational::zero();
            for l in 0..=k {
                let mut a = small.clone();
                a.push(big[l]);
                let pa = signed_coord(w, &a, n);
                if pa.is_zero() {
                    continue;
                }
                let mut b = big.clone();
                b.remove(l);
                let pb = signed_coord(w, &b, n);
                if l % 2 == 0 {
                    total += pa * pb;
                } else {
                    total -= pa * pb;
                }
            }
            if !total.is_zero() {
                return false;
            }
        }
    }
    true
}

/// The subspace `{v : v ∧ w = 0}` as primitive integer vectors; it has
/// dimension `k` exactly when `w` is decomposable.
fn decomposition_space(w: &[Rational], n: usize, k: usize) -> Vec<Vec<BigInt>> {
    if k == n {
        return (0..n)
            .map(|i| (0..n).map(|j| BigInt::from((i == j) as i32)).collect())
            .collect();
    }
    let rows: QMat = linalg::subsets(n, k + 1)
        .iter()
        .map(|set| {
            let mut row = vec![Rational::zero(); n];
            for (pos, &j) in set.iter().enumerate() {
                let mut rest = set.clone();
                rest.remove(pos);
                let c = w[linalg::subset_index(&rest, n)].clone();
                row[j] = if pos % 2 == 0 { c } else { -c };
            }
            row
        })
        .collect();
    linalg::kernel(&rows, n)
        .iter()
        .map(|v| primitive_integer_vector(v))
        .collect()
}

/// Saturated sublattices of maximal slope, in canonical generator form.
struct Maximizers {
    key: Key,
    subs: Vec<Vec<Vec<BigInt>>>,
}

fn lll_prefix_best(g: &QMat) -> Key {
    let u = linalg::lll_gram(g);
    let reduced = linalg::congruence(g, &linalg::transpose(&u));
    let r = g.len();
    let mut best = Key {
        det: linalg::determinant(g),
        rank: r as u32,
    };
    for k in 1..r {
        let minor: QMat = reduced[..k].iter().map(|row| row[..k].to_vec()).collect();
        let cand = Key {
            det: linalg::determinant(&minor),
            rank: k as u32,
        };
        if cand.cmp_slope(&best) == Ordering::Greater {
            best = cand;
        }
    }
    best
}

fn maximizers(l: &Lattice, limit: usize) -> Result<Maximizers> {
    let r = l.rank();
    if r == 0 {
        return Err(Error::invalid("rank must be positive"));
    }
    let g = l.gram();
    if r > limit {
        let best = lll_prefix_best(g);
        let (u, _) = udeg_max(l)?;
        let bk = u.clone().max(best.slope());
        return Err(Error::ExactSearchUnavailable {
            rank: r,
            limit,
            best_found: bk,
            upper_bound: &u + &LogValue::log_of(&ratio(r as i64, 1), &ratio(1, 2))?,
        });
    }
    let u = linalg::lll_gram(g);
    let u_cols = linalg::transpose(&u);
    let reduced = linalg::congruence(g, &u_cols);
    let mut best = lll_prefix_best(g);
    let mut found: BTreeMap<Vec<Vec<BigInt>>, Key> = BTreeMap::new();
    found.insert(
        linalg::saturate_columns(&u_cols, r),
        Key {
            det: l.determinant(),
            rank: r as u32,
        },
    );
    for k in 1..r {
        let radius = radius_for(&best, k as u32);
        let comp = linalg::compound(&reduced, k);
        for (w, _) in linalg::short_vectors(&comp, &radius, DEFAULT_NODE_BUDGET)? {
            let wq: Vec<Rational> = w.iter().map(|x| Rational::from_integer(x.clone())).collect();
            if !satisfies_plucker(&wq, r, k) {
                continue;
            }
            let space = decomposition_space(&wq, r, k);
            if space.len() != k {
                return Err(Error::Internal(format!(
                    "Plücker-decomposable vector with a {}-dimensional annihilator",
                    space.len()
                )));
            }
            let original: Vec<Vec<BigInt>> = space
                .iter()
                .map(|y| {
                    (0..r)
                        .map(|i| u[i].iter().zip(y).fold(BigInt::zero(), |s, (a, b)| s + a * b))
                        .collect()
                })
                .collect();
            let sat = linalg::saturate_columns(&original, r);
            let key = Key {
                det: linalg::determinant(&linalg::congruence(g, &sat)),
                rank: k as u32,
            };
            match key.cmp_slope(&best) {
                Ordering::Less => continue,
                Ordering::Greater => best = key.clone(),
                Ordering::Equal => {}
            }
            found.insert(sat, key);
        }
    }
    let subs = found
        .into_iter()
        .filter(|(_, key)| key.cmp_slope(&best) == Ordering::Equal)
        .map(|(s, _)| s)
        .collect();
    Ok(Maximizers { key: best, subs })
}

/// Maximal slope over all nonzero saturated sublattices, with a witness of
/// lowest rank.
pub fn mu_max(l: &Lattice) -> Result<(LogValue, SubLattice)> {
    mu_max_with_limit(l, DEFAULT_RANK_LIMIT)
}

pub fn mu_max_with_limit(l: &Lattice, limit: usize) -> Result<(LogValue, SubLattice)> {
    let m = maximizers(l, limit)?;
    let value = m.key.slope();
    let (udeg, _) = udeg_max(l)?;
    let upper = &udeg + &LogValue::log_of(&ratio(l.rank() as i64, 1), &ratio(1, 2))?;
    if value < udeg || value > upper {
        return Err(Error::Internal(format!(
            "maximal slope {value} outside the Minkowski bracket [{udeg}, {upper}]"
        )));
    }
    let witness = m
        .subs
        .into_iter()
        .reduce(|a, b| {
            let better = b.len() < a.len() || (b.len() == a.len() && prefer(&b, &a));
            if better {
                b
            } else {
                a
            }
        })
        .expect("the lattice itself is a candidate");
    Ok((value, SubLattice::new(l.clone(), witness)?))
}

/// Harder-Narasimhan filtration `0 ⊊ F_1 ⊊ … ⊊ F_s = E`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HnResult {
    /// `F_1, …, F_s`; the zero sublattice is implicit.
    pub chain: Vec<SubLattice>,
    /// Slopes of the successive subquotients `F_i / F_{i-1}`.
    pub slopes: Vec<LogValue>,
}

#[derive(Serialize)]
struct HnJson<'a> {
    #[serde(with = "chain_ser")]
    chain: Vec<Vec<Vec<BigInt>>>,
    ranks: Vec<usize>,
    slopes: &'a [LogValue],
}

mod chain_ser {
    use super::*;
    use serde::ser::SerializeSeq;
    use serde::Serializer;

    #[derive(Serialize)]
    struct Basis<'a>(#[serde(with = "serde_bigint_matrix")] &'a Vec<Vec<BigInt>>);

    pub fn serialize<S: Serializer>(c: &[Vec<Vec<BigInt>>], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(c.len()))?;
        for b in c {
            seq.serialize_element(&Basis(b))?;
        }
        seq.end()
    }
}

impl Serialize for HnResult {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        HnJson {
            chain: self.chain.iter().map(|f| f.basis().to_vec()).collect(),
            ranks: self.chain.iter().map(SubLattice::rank).collect(),
            slopes: &self.slopes,
        }
        .serialize(s)
    }
}

impl HnResult {
    pub fn is_semistable(&self) -> bool {
        self.chain.len() == 1
    }

    pub fn mu_max(&self) -> &LogValue {
        &self.slopes[0]
    }

    pub fn mu_min(&self) -> &LogValue {
        self.slopes.last().expect("nonempty filtration")
    }

    /// Ranks of the subquotients `F_i / F_{i-1}`.
    pub fn subquotient_ranks(&self) -> Vec<usize> {
        let mut prev = 0;
        self.chain
            .iter()
            .map(|f| {
                let d = f.rank() - prev;
                prev = f.rank();
                d
            })
            .collect()
    }
}

pub fn hn_filtration(l: &Lattice) -> Result<HnResult> {
    hn_filtration_with_limit(l, DEFAULT_RANK_LIMIT)
}

pub fn hn_filtration_with_limit(l: &Lattice, limit: usize) -> Result<HnResult> {
    let steps = hn_steps(l, limit)?;
    let mut chain = Vec::with_capacity(steps.len());
    let mut slopes = Vec::with_capacity(steps.len());
    for (gens, slope) in steps {
        chain.push(SubLattice::new(l.clone(), gens)?);
        slopes.push(slope);
    }
    for w in slopes.windows(2) {
        if w[0] <= w[1] {
            return Err(Error::Internal("HN slopes are not strictly decreasing".into()));
        }
    }
    Ok(HnResult { chain, slopes })
}

fn hn_steps(l: &Lattice, limit: usize) -> Result<Vec<(Vec<Vec<BigInt>>, LogValue)>> {
    let r = l.rank();
    let m = maximizers(l, limit)?;
    let all: Vec<Vec<BigInt>> = m.subs.iter().flatten().cloned().collect();
    let des = linalg::saturate_columns(&all, r);
    let des_key = Key {
        det: linalg::determinant(&linalg::congruence(l.gram(), &des)),
        rank: des.len() as u32,
    };
    if des_key.cmp_slope(&m.key) != Ordering::Equal {
        return Err(Error::Internal(
            "sum of maximal-slope sublattices does not attain the maximal slope".into(),
        ));
    }
    let slope = m.key.slope();
    if des.len() == r {
        return Ok(vec![(des, slope)]);
    }
    let sub = SubLattice::new(l.clone(), des.clone())?;
    let (quot, lift) = sub.quotient_with_lift()?;
    let mut out = vec![(des.clone(), slope)];
    for (gens, s) in hn_steps(&quot, limit)? {
        let mut all = des.clone();
        for y in gens {
            all.push(
                (0..r)
                    .map(|i| lift.iter().zip(&y).fold(BigInt::zero(), |acc, (c, yj)| acc + &c[i] * yj))
                    .collect(),
            );
        }
        out.push((linalg::saturate_columns(&all, r), s));
    }
    Ok(out)
}
