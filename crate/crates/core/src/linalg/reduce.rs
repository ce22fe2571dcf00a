//! LLL reduction of a Gram matrix and Fincke-Pohst enumeration.
//!
//! Floating point is used only to reduce the basis and to prune the search
//! tree. The pruning radius carries a relative slack and every leaf is
//! re-checked exactly, so the returned list is exact.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{bilinear, congruence, int_identity, ldl, IMat, QMat};
use crate::error::{Error, Result};
use crate::exactnum::{lcm_of_denominators, to_f64, Rational};

pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;

const LLL_DELTA: f64 = 0.99;
const LLL_MAX_STEPS: usize = 200_000;
const PRUNE_SLACK: f64 = 1e-7;

fn gso(g: &[Vec<i128>]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = g.len();
    let mut mu = vec![vec![0.0; n]; n];
    let mut b = vec![0.0; n];
    for i in 0..n {
        for j in 0..i {
            let mut s = g[i][j] as f64;
            for l in 0..j {
                s -= mu[j][l] * mu[i][l] * b[l];
            }
            mu[i][j] = s / b[j];
        }
        let mut s = g[i][i] as f64;
        for l in 0..i {
            s -= mu[i][l] * mu[i][l] * b[l];
        }
        b[i] = s;
    }
    (mu, b)
}

/// `b_k -= q b_j` on the Gram matrix and the transform.
fn reduce_step(g: &mut [Vec<i128>], u: &mut [Vec<i128>], k: usize, j: usize, q: i128) -> Option<()> {
    let n = g.len();
    for l in 0..n {
        g[k][l] = g[k][l].checked_sub(q.checked_mul(g[j][l])?)?;
    }
    for l in 0..n {
        g[l][k] = g[l][k].checked_sub(q.checked_mul(g[l][j])?)?;
    }
    for row in u.iter_mut() {
        row[k] = row[k].checked_sub(q.checked_mul(row[j])?)?;
    }
    Some(())
}

fn swap_step(g: &mut [Vec<i128>], u: &mut [Vec<i128>], k: usize) {
    g.swap(k, k - 1);
    for row in g.iter_mut() {
        row.swap(k, k - 1);
    }
    for row in u.iter_mut() {
        row.swap(k, k - 1);
    }
}

fn lll_i128(g: &mut [Vec<i128>]) -> Option<Vec<Vec<i128>>> {
    let n = g.len();
    let mut u: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i128).collect()).collect();
    let mut k = 1;
    let mut steps = 0;
    while k < n {
        steps += 1;
        if steps > LLL_MAX_STEPS {
            break;
        }
        let (mut mu, b) = gso(g);
        for j in (0..k).rev() {
            let q = mu[k][j].round();
            if q != 0.0 {
                if !q.is_finite() || q.abs() > 1e30 {
                    return None;
                }
                let qi = q as i128;
                reduce_step(g, &mut u, k, j, qi)?;
                for l in 0..j {
                    mu[k][l] -= q * mu[j][l];
                }
                mu[k][j] -= q;
            }
        }
        if b[k] >= (LLL_DELTA - mu[k][k - 1] * mu[k][k - 1]) * b[k - 1] {
            k += 1;
        } else {
            swap_step(g, &mut u, k);
            k = (k - 1).max(1);
        }
    }
    Some(u)
}

/// Unimodular `U` whose columns form an LLL-reduced basis of the lattice with
/// Gram matrix `g`. Falls back to the identity if intermediate values leave
/// the machine range.
pub fn lll_gram(g: &[Vec<Rational>]) -> IMat {
    let n = g.len();
    let scale = lcm_of_denominators(g.iter().flatten());
    let scaled: Option<Vec<Vec<i128>>> = g
        .iter()
        .map(|row| {
            row.iter()
                .map(|q| (q.numer() * (&scale / q.denom())).to_i128())
                .collect()
        })
        .collect();
    let Some(mut gi) = scaled else {
        return int_identity(n);
    };
    match lll_i128(&mut gi) {
        Some(u) => u
            .into_iter()
            .map(|row| row.into_iter().map(BigInt::from).collect())
            .collect(),
        None => int_identity(n),
    }
}

struct Enumerator {
    d: Vec<f64>,
    l: Vec<Vec<f64>>,
    bound: f64,
    x: Vec<i64>,
    nodes: u64,
    budget: u64,
    found: Vec<Vec<i64>>,
}

impl Enumerator {
    fn run(&mut self, i: usize, partial: f64) -> Result<()> {
        let n = self.x.len();
        let center: f64 = -(i + 1..n).map(|j| self.l[j][i] * self.x[j] as f64).sum::<f64>();
        let rem = self.bound - partial;
        if rem < 0.0 {
            return Ok(());
        }
        let r = (rem / self.d[i]).sqrt();
        let mut lo = (center - r).ceil() as i64;
        let hi = (center + r).floor() as i64;
        if self.x[i + 1..].iter().all(|&v| v == 0) {
            lo = lo.max(0);
        }
        for xi in lo..=hi {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(Error::EnumerationBudget(self.budget));
            }
            let t = xi as f64 - center;
            let next = partial + self.d[i] * t * t;
            if next > self.bound {
                continue;
            }
            self.x[i] = xi;
            if i == 0 {
                if self.x.iter().any(|&v| v != 0) {
                    self.found.push(self.x.clone());
                }
            } else {
                self.run(i - 1, next)?;
            }
        }
        self.x[i] = 0;
        Ok(())
    }
}

/// Flips the sign so the first nonzero coordinate is positive.
pub(crate) fn normalize_sign(v: &mut [BigInt]) {
    if let Some(first) = v.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in v.iter_mut() {
                *x = -&*x;
            }
        }
    }
}

/// All nonzero integer vectors with `vᵀ G v <= bound`, one per `±` pair,
/// sign-normalized and sorted by norm then lexicographically.
pub fn short_vectors(
    g: &[Vec<Rational>],
    bound: &Rational,
    budget: u64,
) -> Result<Vec<(Vec<BigInt>, Rational)>> {
    let n = g.len();
    if n == 0 || !bound.is_positive() {
        return Ok(Vec::new());
    }
    let u = lll_gram(g);
    let u_cols: Vec<Vec<BigInt>> = super::transpose(&u);
    let reduced: QMat = congruence(g, &u_cols);
    let (l, d) = ldl(&reduced).ok_or(Error::NotPositiveDefinite)?;
    let mut e = Enumerator {
        d: d.iter().map(to_f64).collect(),
        l: l.iter().map(|row| row.iter().map(to_f64).collect()).collect(),
        bound: to_f64(bound) * (1.0 + PRUNE_SLACK),
        x: vec![0; n],
        nodes: 0,
        budget,
        found: Vec::new(),
    };
    e.run(n - 1, 0.0)?;
    let mut out = Vec::new();
    for x in e.found {
        let xb: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
        let norm = bilinear(&reduced, &xb, &xb);
        if &norm > bound {
            continue;
        }
        let mut v: Vec<BigInt> = (0..n)
            .map(|i| u[i].iter().zip(&xb).fold(BigInt::zero(), |s, (a, b)| s + a * b))
            .collect();
        normalize_sign(&mut v);
        out.push((v, norm));
    }
    out.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    Ok(out)
}
