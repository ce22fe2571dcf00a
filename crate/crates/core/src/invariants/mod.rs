//! Classical invariant theory at desk scale: the determinant tensor, search
//! for an invariant not vanishing at a point, and the degree bound for line
//! subbundles with semistable generic fibre.

mod witness;

pub use witness::{invariant_witness_search, SumPoint, WitnessInvariant, WitnessOutcome, DEFAULT_TERM_BUDGET};

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{rat, ratio, LogValue, Rational};
use crate::gitstab::TensorPoint;

/// Permutations of `0..d` in lexicographic order with their signs.
pub fn permutations_with_sign(d: usize) -> Vec<(Vec<usize>, i64)> {
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..d).collect();
    loop {
        out.push((perm.clone(), permutation_sign(&perm)));
        // next lexicographic permutation
        let Some(i) = (1..d).rev().find(|&i| perm[i - 1] < perm[i]) else {
            return out;
        };
        let j = (i..d).rev().find(|&j| perm[j] > perm[i - 1]).expect("exists");
        perm.swap(i - 1, j);
        perm[i..].reverse();
    }
}

pub fn permutation_sign(perm: &[usize]) -> i64 {
    let mut seen = vec![false; perm.len()];
    let mut sign = 1;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut k = start;
        while !seen[k] {
            seen[k] = true;
            k = perm[k];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DetTensor {
    pub tensor: TensorPoint,
    /// Hermitian norm in the standard orthonormal basis, as a logarithm.
    pub norm: LogValue,
}

/// `Σ_σ sign(σ) e_σ(1) ⊗ … ⊗ e_σ(d)` and its norm, computed from the sum of
/// squared coefficients.
pub fn det_tensor(d: usize) -> Result<DetTensor> {
    if d == 0 {
        return Err(Error::invalid("the determinant tensor needs d >= 1"));
    }
    let coords: BTreeMap<Vec<usize>, Rational> = permutations_with_sign(d)
        .into_iter()
        .map(|(p, s)| (p, rat(s)))
        .collect();
    let tensor = TensorPoint::new(vec![d; d], coords)?;
    let sum_sq: Rational = tensor.coords().values().map(|c| c * c).sum();
    let norm = LogValue::log_of(&sum_sq, &ratio(1, 2))?;
    Ok(DetTensor { tensor, norm })
}

fn check_bound_input(mu_list: &[(LogValue, usize)], b: &[i64], m: i64) -> Result<()> {
    if m < 1 {
        return Err(Error::invalid("m must be positive"));
    }
    if mu_list.len() != b.len() {
        return Err(Error::dims("one twist per factor is required"));
    }
    if mu_list.iter().any(|(_, r)| *r == 0) {
        return Err(Error::invalid("ranks must be positive"));
    }
    Ok(())
}

/// `Σ (b_i/m)(μ̂_i + ½ log r_i)` for `(μ̂_i, r_i)` in `mu_list`.
pub fn semistable_degree_bound(mu_list: &[(LogValue, usize)], b: &[i64], m: i64) -> Result<LogValue> {
    check_bound_input(mu_list, b, m)?;
    Ok(mu_list
        .iter()
        .zip(b)
        .map(|((mu, r), &bi)| {
            let term = mu + &LogValue::ln(&rat(*r as i64)).scale(&ratio(1, 2));
            term.scale(&ratio(bi, m))
        })
        .sum())
}

/// The sharper `Σ (b_i/m)(μ̂_i + log(r_i!)/(2 r_i))` before `r! <= r^r`.
pub fn sharp_degree_bound(mu_list: &[(LogValue, usize)], b: &[i64], m: i64) -> Result<LogValue> {
    check_bound_input(mu_list, b, m)?;
    Ok(mu_list
        .iter()
        .zip(b)
        .map(|((mu, r), &bi)| {
            let fact: BigInt = (1..=*r as u64).map(BigInt::from).product::<BigInt>().max(BigInt::one());
            let log_fact = LogValue::ln(&Rational::from_integer(fact)).scale(&ratio(1, 2 * *r as i64));
            (mu + &log_fact).scale(&ratio(bi, m))
        })
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_norms() {
        assert!(det_tensor(1).unwrap().norm.is_zero());
        assert_eq!(det_tensor(2).unwrap().norm, LogValue::ln(&rat(2)).scale(&ratio(1, 2)));
        let d3 = det_tensor(3).unwrap();
        assert_eq!(d3.tensor.coords().len(), 6);
        assert_eq!(d3.norm, LogValue::ln(&rat(6)).scale(&ratio(1, 2)));
        assert!(det_tensor(0).is_err());
    }

    #[test]
    fn signs() {
        assert_eq!(permutation_sign(&[1, 0, 2]), -1);
        assert_eq!(permutation_sign(&[1, 2, 0]), 1);
        let all = permutations_with_sign(4);
        assert_eq!(all.len(), 24);
        assert_eq!(all.iter().map(|(_, s)| s).sum::<i64>(), 0);
    }

    #[test]
    fn degree_bound_examples() {
        let z = LogValue::zero();
        assert!(semistable_degree_bound(&[(z.clone(), 1), (z.clone(), 1)], &[1, 1], 1).unwrap().is_zero());
        let log2 = LogValue::ln(&rat(2));
        assert_eq!(semistable_degree_bound(&[(z.clone(), 2), (z.clone(), 2)], &[2, 2], 2).unwrap(), log2);
        let mus = [(-log2.clone(), 2), (-log2.scale(&ratio(1, 2)), 2)];
        assert_eq!(semistable_degree_bound(&mus, &[4, 4], 4).unwrap(), -log2.scale(&ratio(1, 2)));
        assert!(sharp_degree_bound(&mus, &[4, 4], 4).unwrap() <= semistable_degree_bound(&mus, &[4, 4], 4).unwrap());
    }
}
