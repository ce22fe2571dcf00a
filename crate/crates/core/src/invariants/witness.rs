//! Search for an invariant of `S^{mD}(W^∨) ⊗ L^D` that does not vanish on a
//! line `R = ℚ v`, in the form of a composed map
//! `R^{⊗mD} → V^A → V^A → ℚ` built from a family `α_1, …, α_{mD}` of
//! summands, a permutation `σ ∈ 𝔖_A` and determinants.
//!
//! Slots of `V^A = ⊗_i V_i^{⊗A(i)}` are numbered per factor `V_i` in the
//! order of the family: the `V_i` slots of `α_1` first, then those of `α_2`
//! and so on. After `σ`, consecutive runs of `r_i` slots are contracted with
//! `det_{V_i}`, with `L = ⊗_i (det V_i)^{⊗ b_i}`.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::permutations_with_sign;
use crate::error::{Error, Result};
use crate::exactnum::{format_rational, parse_rational, rat, serde_rational, Rational};
use crate::gitstab::TensorPoint;

pub const DEFAULT_TERM_BUDGET: u64 = 20_000_000;

/// A vector of `W = ⊕_{α∈𝒜} V_1^{⊗α(1)} ⊗ … ⊗ V_n^{⊗α(n)}`. A component's
/// index tuple lists the `V_1` indices first, then the `V_2` indices, and so
/// on; indices are 0-based in memory and 1-based in JSON.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumPoint {
    ranks: Vec<usize>,
    components: BTreeMap<Vec<u32>, BTreeMap<Vec<usize>, Rational>>,
}

impl SumPoint {
    pub fn new(ranks: Vec<usize>, components: BTreeMap<Vec<u32>, BTreeMap<Vec<usize>, Rational>>) -> Result<Self> {
        if ranks.is_empty() || ranks.contains(&0) {
            return Err(Error::invalid("ranks must be a nonempty list of positive integers"));
        }
        let mut kept = BTreeMap::new();
        for (alpha, coords) in components {
            if alpha.len() != ranks.len() || alpha.iter().all(|&a| a == 0) {
                return Err(Error::invalid(format!("bad summand exponent {alpha:?}")));
            }
            let bounds: Vec<usize> = alpha
                .iter()
                .zip(&ranks)
                .flat_map(|(&a, &r)| std::iter::repeat_n(r, a as usize))
                .collect();
            for idx in coords.keys() {
                if idx.len() != bounds.len() || idx.iter().zip(&bounds).any(|(j, r)| j >= r) {
                    return Err(Error::dims(format!("index {idx:?} outside summand {alpha:?}")));
                }
            }
            let nz: BTreeMap<_, _> = coords.into_iter().filter(|(_, q)| !q.is_zero()).collect();
            if !nz.is_empty() {
                kept.insert(alpha, nz);
            }
        }
        if kept.is_empty() {
            return Err(Error::invalid("the zero vector does not define a point"));
        }
        Ok(SumPoint {
            ranks,
            components: kept,
        })
    }

    /// `W = V_1 ⊗ … ⊗ V_n` with the single summand `α = (1, …, 1)`.
    pub fn from_tensor(x: &TensorPoint) -> Self {
        let alpha = vec![1; x.arity()];
        SumPoint {
            ranks: x.shape().to_vec(),
            components: BTreeMap::from([(alpha, x.coords().clone())]),
        }
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn components(&self) -> &BTreeMap<Vec<u32>, BTreeMap<Vec<usize>, Rational>> {
        &self.components
    }
}

#[derive(Serialize, Deserialize)]
struct ComponentJson {
    alpha: Vec<u32>,
    coords: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
struct SumPointJson {
    ranks: Vec<usize>,
    components: Vec<ComponentJson>,
}

impl Serialize for SumPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let key = |idx: &Vec<usize>| idx.iter().map(|j| (j + 1).to_string()).collect::<Vec<_>>().join(",");
        SumPointJson {
            ranks: self.ranks.clone(),
            components: self
                .components
                .iter()
                .map(|(alpha, coords)| ComponentJson {
                    alpha: alpha.clone(),
                    coords: coords.iter().map(|(k, v)| (key(k), format_rational(v))).collect(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SumPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = SumPointJson::deserialize(d)?;
        let mut components = BTreeMap::new();
        for c in j.components {
            let mut coords = BTreeMap::new();
            for (k, v) in c.coords {
                let idx = k
                    .split(',')
                    .map(|t| match t.trim().parse::<usize>() {
                        Ok(x) if x >= 1 => Ok(x - 1),
                        _ => Err(D::Error::custom(format!("bad 1-based index tuple {k:?}"))),
                    })
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                coords.insert(idx, parse_rational(&v).map_err(D::Error::custom)?);
            }
            components.insert(c.alpha, coords);
        }
        SumPoint::new(j.ranks, components).map_err(D::Error::custom)
    }
}

/// A composed map not vanishing on `R`; `sigma[i]` is the one-line form
/// (1-based) of the permutation of the `V_i` slots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessInvariant {
    #[serde(rename = "D")]
    pub d: u32,
    pub alphas: Vec<Vec<u32>>,
    pub sigma: Vec<Vec<usize>>,
    #[serde(with = "serde_rational")]
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum WitnessOutcome {
    Found { witness: WitnessInvariant },
    /// Every `D <= d_max` was searched exhaustively.
    Exhausted { d_max: u32 },
    /// The term budget ran out while searching degree `d`.
    Budget { d: u32, terms: u64 },
}

struct Search<'a> {
    x: &'a SumPoint,
    perms: Vec<Vec<(Vec<usize>, i64)>>,
    terms: u64,
    budget: u64,
}

impl Search<'_> {
    /// Value of the composed map for a family and the slot groups of each
    /// factor.
    fn evaluate(&mut self, family: &[Vec<u32>], groups: &[Vec<Vec<usize>>]) -> Option<Rational> {
        let n = self.x.ranks.len();
        let slots: Vec<usize> = (0..n).map(|i| family.iter().map(|a| a[i] as usize).sum()).collect();
        let flat_groups: Vec<(usize, &Vec<usize>)> = groups
            .iter()
            .enumerate()
            .flat_map(|(i, gs)| gs.iter().map(move |g| (i, g)))
            .collect();
        let mut choice = vec![0usize; flat_groups.len()];
        let mut assigned: Vec<Vec<usize>> = slots.iter().map(|&s| vec![0; s]).collect();
        let mut total = Rational::zero();
        loop {
            self.terms += 1;
            if self.terms > self.budget {
                return None;
            }
            let mut sign = 1;
            for (g, &(i, group)) in flat_groups.iter().enumerate() {
                let (perm, s) = &self.perms[i][choice[g]];
                sign *= s;
                for (pos, &slot) in group.iter().enumerate() {
                    assigned[i][slot] = perm[pos];
                }
            }
            let mut product = rat(sign);
            let mut cursor = vec![0usize; n];
            for alpha in family {
                let mut key = Vec::new();
                for i in 0..n {
                    for _ in 0..alpha[i] {
                        key.push(assigned[i][cursor[i]]);
                        cursor[i] += 1;
                    }
                }
                match self.x.components[alpha].get(&key) {
                    Some(c) => product *= c,
                    None => {
                        product = Rational::zero();
                        break;
                    }
                }
            }
            total += product;
            let mut g = 0;
            while g < choice.len() {
                choice[g] += 1;
                if choice[g] < self.perms[flat_groups[g].0].len() {
                    break;
                }
                choice[g] = 0;
                g += 1;
            }
            if g == choice.len() {
                return Some(total);
            }
        }
    }
}

/// Partitions of `0..total` into unordered groups of size `r`, each listed
/// ascending and ordered by first element.
fn set_partitions(total: usize, r: usize) -> Vec<Vec<Vec<usize>>> {
    fn rec(rest: Vec<usize>, r: usize, acc: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if rest.is_empty() {
            out.push(acc.clone());
            return;
        }
        let first = rest[0];
        let others = &rest[1..];
        for pick in crate::linalg::subsets(others.len(), r - 1) {
            let mut group = vec![first];
            group.extend(pick.iter().map(|&k| others[k]));
            let remaining: Vec<usize> = others
                .iter()
                .enumerate()
                .filter(|(k, _)| !pick.contains(k))
                .map(|(_, &s)| s)
                .collect();
            acc.push(group);
            rec(remaining, r, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    if total.is_multiple_of(r) {
        rec((0..total).collect(), r, &mut Vec::new(), &mut out);
    }
    out
}

/// Multisets of size `k` from `options` (as nondecreasing index lists)
/// whose sum is `target`.
fn families(options: &[Vec<u32>], k: usize, target: &[u64]) -> Vec<Vec<usize>> {
    fn rec(options: &[Vec<u32>], start: usize, k: usize, rest: &mut Vec<u64>, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if acc.len() == k {
            if rest.iter().all(|&r| r == 0) {
                out.push(acc.clone());
            }
            return;
        }
        for o in start..options.len() {
            let alpha = &options[o];
            if alpha.iter().zip(rest.iter()).any(|(&a, &r)| a as u64 > r) {
                continue;
            }
            for (r, &a) in rest.iter_mut().zip(alpha) {
                *r -= a as u64;
            }
            acc.push(o);
            rec(options, o, k, rest, acc, out);
            acc.pop();
            for (r, &a) in rest.iter_mut().zip(alpha) {
                *r += a as u64;
            }
        }
    }
    let mut out = Vec::new();
    rec(options, 0, k, &mut target.to_vec(), &mut Vec::new(), &mut out);
    out
}

/// Searches `D = 1, …, d_max` for a composed map not vanishing on `ℚ v_x`.
/// Permutations are enumerated modulo the symmetries of the determinant
/// contractions, that is as partitions of the slots into `det` groups.
pub fn invariant_witness_search(x: &SumPoint, b: &[i64], m: u32, d_max: u32, budget: u64) -> Result<WitnessOutcome> {
    let n = x.ranks.len();
    if b.len() != n {
        return Err(Error::dims("one twist per factor is required"));
    }
    if m == 0 || d_max == 0 {
        return Err(Error::invalid("m and D_max must be positive"));
    }
    if b.iter().any(|&bi| bi < 0) {
        return Ok(WitnessOutcome::Exhausted { d_max });
    }
    let options: Vec<Vec<u32>> = x.components.keys().cloned().collect();
    let mut search = Search {
        x,
        perms: x.ranks.iter().map(|&r| permutations_with_sign(r)).collect(),
        terms: 0,
        budget,
    };
    for d in 1..=d_max {
        let target: Vec<u64> = b
            .iter()
            .zip(&x.ranks)
            .map(|(&bi, &r)| d as u64 * bi as u64 * r as u64)
            .collect();
        let k = (m * d) as usize;
        let partitions: Vec<Vec<Vec<Vec<usize>>>> = target
            .iter()
            .zip(&x.ranks)
            .map(|(&t, &r)| set_partitions(t as usize, r))
            .collect();
        for fam in families(&options, k, &target) {
            let family: Vec<Vec<u32>> = fam.iter().map(|&o| options[o].clone()).collect();
            let mut choice = vec![0usize; n];
            if partitions.iter().any(Vec::is_empty) {
                break;
            }
            loop {
                let groups: Vec<Vec<Vec<usize>>> = (0..n).map(|i| partitions[i][choice[i]].clone()).collect();
                let Some(value) = search.evaluate(&family, &groups) else {
                    return Ok(WitnessOutcome::Budget { d, terms: search.terms });
                };
                if !value.is_zero() {
                    let sigma = groups
                        .iter()
                        .map(|gs| gs.iter().flatten().map(|s| s + 1).collect())
                        .collect();
                    return Ok(WitnessOutcome::Found {
                        witness: WitnessInvariant {
                            d,
                            alphas: family,
                            sigma,
                            value,
                        },
                    });
                }
                let mut i = 0;
                while i < n {
                    choice[i] += 1;
                    if choice[i] < partitions[i].len() {
                        break;
                    }
                    choice[i] = 0;
                    i += 1;
                }
                if i == n {
                    break;
                }
            }
        }
    }
    Ok(WitnessOutcome::Exhausted { d_max })
}

impl WitnessInvariant {
    /// Recomputes the value of the composed map at `x`.
    pub fn evaluate(&self, x: &SumPoint) -> Result<Rational> {
        let n = x.ranks.len();
        if self.sigma.len() != n || self.alphas.iter().any(|a| a.len() != n) {
            return Err(Error::dims("witness does not match the point"));
        }
        let mut groups = Vec::with_capacity(n);
        for (i, line) in self.sigma.iter().enumerate() {
            let r = x.ranks[i];
            let slots: usize = self.alphas.iter().map(|a| a[i] as usize).sum();
            let mut sorted: Vec<usize> = line.clone();
            sorted.sort_unstable();
            if line.len() != slots || sorted != (1..=slots).collect::<Vec<_>>() || !slots.is_multiple_of(r) {
                return Err(Error::invalid(format!("sigma[{i}] is not a permutation of the slots")));
            }
            groups.push(line.chunks(r).map(|c| c.iter().map(|s| s - 1).collect()).collect::<Vec<Vec<usize>>>());
        }
        if self.alphas.iter().any(|a| !x.components.contains_key(a)) {
            return Ok(Rational::zero());
        }
        let mut search = Search {
            x,
            perms: x.ranks.iter().map(|&r| permutations_with_sign(r)).collect(),
            terms: 0,
            budget: u64::MAX,
        };
        // Chunks of sigma are contracted in the order given; sorting each
        // chunk only changes the sign.
        let mut sign = 1;
        for gs in groups.iter_mut() {
            for g in gs.iter_mut() {
                let order: Vec<usize> = {
                    let mut idx: Vec<usize> = (0..g.len()).collect();
                    idx.sort_by_key(|&k| g[k]);
                    idx
                };
                sign *= super::permutation_sign(&order);
                g.sort_unstable();
            }
        }
        Ok(rat(sign) * search.evaluate(&self.alphas, &groups).expect("unbounded budget"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_tensor_has_a_witness() {
        let x = SumPoint::from_tensor(&TensorPoint::identity(2));
        let out = invariant_witness_search(&x, &[1, 1], 2, 1, DEFAULT_TERM_BUDGET).unwrap();
        let WitnessOutcome::Found { witness } = out else { panic!("expected a witness") };
        assert_eq!(witness.d, 1);
        assert_eq!(witness.alphas, vec![vec![1, 1], vec![1, 1]]);
        assert_eq!(witness.value, rat(2));
        assert_eq!(witness.evaluate(&x).unwrap(), rat(2));
        let json = serde_json::to_string(&witness).unwrap();
        assert_eq!(json, r#"{"D":1,"alphas":[[1,1],[1,1]],"sigma":[[1,2],[1,2]],"value":"2"}"#);
    }

    #[test]
    fn pure_tensor_has_none() {
        let x = SumPoint::from_tensor(&TensorPoint::basis_vector(vec![2, 2], vec![0, 0]).unwrap());
        let out = invariant_witness_search(&x, &[1, 1], 2, 2, DEFAULT_TERM_BUDGET).unwrap();
        assert_eq!(out, WitnessOutcome::Exhausted { d_max: 2 });
    }

    #[test]
    fn scalars_always_have_one() {
        let x = SumPoint::from_tensor(&TensorPoint::from_dense(vec![1], &[rat(3)]).unwrap());
        let out = invariant_witness_search(&x, &[2], 2, 1, DEFAULT_TERM_BUDGET).unwrap();
        let WitnessOutcome::Found { witness } = out else { panic!("expected a witness") };
        assert_eq!(witness.sigma, vec![vec![1, 2]]);
        assert_eq!(witness.value, rat(9));
    }

    #[test]
    fn budget_is_reported() {
        let x = SumPoint::from_tensor(&TensorPoint::basis_vector(vec![2, 2], vec![0, 0]).unwrap());
        let out = invariant_witness_search(&x, &[1, 1], 2, 3, 10).unwrap();
        assert!(matches!(out, WitnessOutcome::Budget { .. }));
    }

    #[test]
    fn partitions_are_counted() {
        assert_eq!(set_partitions(4, 2).len(), 3);
        assert_eq!(set_partitions(6, 3).len(), 10);
        assert_eq!(set_partitions(6, 2).len(), 15);
        assert!(set_partitions(5, 2).is_empty());
    }

    #[test]
    fn sum_point_json() {
        let json = r#"{"ranks":[2],"components":[{"alpha":[2],"coords":{"1,2":"1","2,1":"-1"}}]}"#;
        let x: SumPoint = serde_json::from_str(json).unwrap();
        assert_eq!(serde_json::to_string(&x).unwrap(), json);
        let out = invariant_witness_search(&x, &[1], 1, 1, DEFAULT_TERM_BUDGET).unwrap();
        assert!(matches!(out, WitnessOutcome::Found { .. }));
    }
}
