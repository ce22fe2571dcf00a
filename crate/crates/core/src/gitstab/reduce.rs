//! Passage from an unstable point to its associated graded point.
//!
//! With the Kempf minimizer `(𝓕⁽ⁱ⁾)` and `β = λ_𝓕(v_x)`, the image of `v_x`
//! in `W̃ = 𝓕_β W / 𝓕_{>β} W` is semistable for `Π_{i,j} GL(V_j⁽ⁱ⁾/V_{j+1}⁽ⁱ⁾)`
//! relative to the twist by `b_j⁽ⁱ⁾`.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::forms::{grid_minimum, min_norm_point, FormLayout};
use super::kempf::{echelon_candidates, product_capped, tensor_lambda, MinimizationResult};
use super::point::serde_index_list;
use super::{AlgValue, TensorPoint};
use crate::error::{Error, Result};
use crate::exactnum::{rat, serde_rational_matrix, Rational};
use crate::filtration::{random_filtration, CompatibleBasis, Filtration};
use crate::linalg::{self, QMat};

/// One subquotient `V_j⁽ⁱ⁾ / V_{j+1}⁽ⁱ⁾` of a minimizing flag.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub rank: usize,
    pub jump: i64,
    pub a: i64,
    pub b: i64,
    /// Lifts to `V⁽ⁱ⁾` of a basis of the subquotient.
    #[serde(with = "serde_rational_matrix")]
    pub basis: QMat,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducedInstance {
    pub beta: i64,
    pub flags: Vec<Filtration>,
    /// `blocks[i][j]` for the `j`-th jump of the `i`-th flag.
    pub blocks: Vec<Vec<Block>>,
    #[serde(rename = "N")]
    pub n: i64,
    /// Block tuples `(j_1, …, j_n)` with `Σ λ_{j_i} = β`, the summands of `W̃`.
    #[serde(with = "serde_index_list")]
    pub summands: Vec<Vec<usize>>,
    /// `ṽ_x` in the concatenated block bases.
    pub reduced_point: TensorPoint,
}

/// Verdict on the reduced point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReducedCheck {
    pub semistable: bool,
    pub certified: bool,
    /// Smallest value of the normalized functional met by the search.
    pub minimum: AlgValue,
}

fn small(q: &Rational, what: &str) -> Result<i64> {
    if !q.is_integer() {
        return Err(Error::Internal(format!("{what} = {q} is not an integer")));
    }
    q.to_integer()
        .to_i64()
        .ok_or_else(|| Error::Internal(format!("{what} does not fit in 64 bits")))
}

pub fn rr_reduce(x: &TensorPoint, m: &MinimizationResult) -> Result<ReducedInstance> {
    rr_reduce_with(x, m, 100, 0)
}

/// Builds the reduced instance and checks the twisted semistability
/// inequality on `samples` random subquotient tuples.
pub fn rr_reduce_with(x: &TensorPoint, m: &MinimizationResult, samples: usize, seed: u64) -> Result<ReducedInstance> {
    if !m.c.is_negative() {
        return Err(Error::invalid("reduction needs a destabilizing minimizer (c < 0)"));
    }
    if !m.minimizer.iter().all(Filtration::has_integer_jumps) {
        return Err(Error::invalid("the minimizer must have integer jumps"));
    }
    let beta_q = tensor_lambda(x, &m.minimizer)?;
    let beta = small(&beta_q, "β")?;

    let mut n = num_bigint::BigInt::one();
    for (f, &r) in m.minimizer.iter().zip(x.shape()) {
        n = n.lcm(&(r as i64).into());
        for l in f.jumps() {
            let t = -(&m.c_tilde * l) / rat(r as i64);
            n = n.lcm(t.denom());
        }
    }
    let n_q = Rational::from_integer(n);
    let nn = small(&n_q, "N")?;

    let mut blocks = Vec::new();
    let mut concat: Vec<QMat> = Vec::new();
    let mut block_of: Vec<Vec<usize>> = Vec::new();
    for (f, &r) in m.minimizer.iter().zip(x.shape()) {
        let lifts = f.block_bases();
        let mut per = Vec::new();
        let mut basis = Vec::new();
        let mut owner = Vec::new();
        for (j, ((lift, &rj), l)) in lifts.iter().zip(&f.step_ranks()).zip(f.jumps()).enumerate() {
            let a = &n_q * (-(&m.c_tilde * l) / rat(r as i64));
            let b = &n_q / rat(r as i64) + &a;
            let block = Block {
                rank: rj,
                jump: small(l, "jump")?,
                a: small(&a, "a")?,
                b: small(&b, "b")?,
                basis: lift.clone(),
            };
            if block.b < 0 {
                return Err(Error::Internal("negative twist b in the reduction".into()));
            }
            basis.extend(lift.iter().cloned());
            owner.extend(std::iter::repeat_n(j, rj));
            per.push(block);
        }
        let balance: i64 = per.iter().map(|bl| bl.a * bl.rank as i64).sum();
        if balance != 0 {
            return Err(Error::Internal("Σ a_j r_j is not zero".into()));
        }
        blocks.push(per);
        concat.push(basis);
        block_of.push(owner);
    }

    let c = x.in_bases(&concat)?;
    let mut coords = BTreeMap::new();
    for (idx, q) in c.coords() {
        let level: i64 = idx
            .iter()
            .enumerate()
            .map(|(i, &a)| blocks[i][block_of[i][a]].jump)
            .sum();
        if level < beta {
            return Err(Error::Internal("support below β".into()));
        }
        if level == beta {
            coords.insert(idx.clone(), q.clone());
        }
    }
    let reduced_point = TensorPoint::new(x.shape().to_vec(), coords)
        .map_err(|_| Error::Internal("the reduced point vanishes".into()))?;

    let per_mode: Vec<Vec<usize>> = blocks.iter().map(|bs| (0..bs.len()).collect()).collect();
    let summands = product_capped(&per_mode, usize::MAX)
        .into_iter()
        .filter(|t| t.iter().enumerate().map(|(i, &j)| blocks[i][j].jump).sum::<i64>() == beta)
        .collect();

    let inst = ReducedInstance {
        beta,
        flags: m.minimizer.clone(),
        blocks,
        n: nn,
        summands,
        reduced_point,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let tuple: Vec<Vec<Filtration>> = inst
            .blocks
            .iter()
            .map(|bs| bs.iter().map(|bl| random_filtration(bl.rank, 3, &mut rng)).collect())
            .collect();
        if inst.psi(&tuple)?.is_negative() {
            return Err(Error::SearchNotConverged(
                "reduced point violates the twisted semistability inequality".into(),
            ));
        }
    }
    Ok(inst)
}

impl ReducedInstance {
    fn block_dims(&self) -> Vec<Vec<usize>> {
        self.blocks.iter().map(|bs| bs.iter().map(|b| b.rank).collect()).collect()
    }

    fn layout(&self) -> FormLayout {
        let kappa = self
            .blocks
            .iter()
            .map(|bs| bs.iter().map(|b| rat(b.b * b.rank as i64)).collect())
            .collect();
        FormLayout::graded(&self.block_dims(), kappa, rat(self.n))
    }

    /// Block-diagonal basis of `ℚ^{r_i}` from one basis per block.
    fn block_diagonal(&self, per_block: &[Vec<CompatibleBasis>]) -> Vec<QMat> {
        per_block
            .iter()
            .zip(self.reduced_point.shape())
            .map(|(bases, &r)| {
                let mut out = Vec::with_capacity(r);
                let mut offset = 0;
                for b in bases {
                    for v in b.vectors() {
                        let mut w = vec![Rational::zero(); r];
                        w[offset..offset + v.len()].clone_from_slice(v);
                        out.push(w);
                    }
                    offset += b.dim();
                }
                out
            })
            .collect()
    }

    /// `Σ_{i,j} b_j⁽ⁱ⁾ r_j⁽ⁱ⁾ 𝔼[𝓖⁽ⁱ⁾ʲ] − N λ_𝓖̃(ṽ_x)`, the μ-invariant of the
    /// reduced point for the one-parameter subgroup given by `tuple[i][j]`.
    pub fn psi(&self, tuple: &[Vec<Filtration>]) -> Result<Rational> {
        let dims = self.block_dims();
        if tuple.len() != dims.len()
            || tuple.iter().zip(&dims).any(|(t, d)| t.len() != d.len() || t.iter().zip(d).any(|(f, &r)| f.dim() != r))
        {
            return Err(Error::dims("one filtration per subquotient is required"));
        }
        let bases: Vec<Vec<CompatibleBasis>> =
            tuple.iter().map(|t| t.iter().map(Filtration::adapted_basis).collect()).collect();
        let mut values: Vec<Vec<Rational>> = Vec::new();
        for (t, bs) in tuple.iter().zip(&bases) {
            let mut v = Vec::new();
            for (f, b) in t.iter().zip(bs) {
                v.extend(f.coordinates(b)?);
            }
            values.push(v);
        }
        let c = self.reduced_point.in_bases(&self.block_diagonal(&bases))?;
        let lambda = c
            .coords()
            .keys()
            .map(|s| s.iter().enumerate().map(|(i, &a)| values[i][a].clone()).sum::<Rational>())
            .min()
            .expect("nonzero point");
        let twisted: Rational = tuple
            .iter()
            .zip(&self.blocks)
            .flat_map(|(t, bs)| t.iter().zip(bs))
            .map(|(f, bl)| f.expectation() * rat(bl.b * bl.rank as i64))
            .sum();
        Ok(twisted - rat(self.n) * lambda)
    }

    fn oracle_applies(&self) -> bool {
        self.blocks.len() <= 2
            && self.blocks.iter().flatten().all(|b| b.rank <= 2)
            && self.reduced_point.coords().len() <= 4
    }

    /// Semistability of `ṽ_x` for the product of the subquotient groups,
    /// searched over echelon bases of each block. Certified when every block
    /// has rank one or the jump-grid oracle applies.
    pub fn is_semistable(&self) -> Result<ReducedCheck> {
        let layout = self.layout();
        let mut options: Vec<Vec<Vec<CompatibleBasis>>> = Vec::new();
        for (i, bs) in self.blocks.iter().enumerate() {
            let mat = self.reduced_point.matricization(i);
            let mut offset = 0;
            let mut per = Vec::new();
            for b in bs {
                let fibers = linalg::transpose(&mat[offset..offset + b.rank]);
                let fibers: QMat = fibers.into_iter().filter(|f| !linalg::is_zero_vec(f)).collect();
                per.push(echelon_candidates(&fibers, b.rank));
                offset += b.rank;
            }
            options.push(per);
        }
        let flat: Vec<Vec<CompatibleBasis>> = options.iter().flatten().cloned().collect();
        let shape: Vec<usize> = self.blocks.iter().map(Vec::len).collect();
        let mut minimum = AlgValue::zero();
        let grid = self.oracle_applies();
        for choice in product_capped(&flat, 256) {
            let mut per_mode = Vec::new();
            let mut at = 0;
            for &k in &shape {
                per_mode.push(choice[at..at + k].to_vec());
                at += k;
            }
            let support = self.reduced_point.in_bases(&self.block_diagonal(&per_mode))?.support();
            let gens: Vec<Vec<Rational>> = support.iter().map(|s| layout.gradient(s)).collect();
            let (p, _) = min_norm_point(&gens, &layout)?;
            if !linalg::is_zero_vec(&p) {
                let v = AlgValue::new(-1, layout.norm_sq(&p));
                if v < minimum {
                    minimum = v;
                }
            }
            if grid {
                let v = grid_minimum(&layout, &support, 3);
                if v < minimum {
                    minimum = v;
                }
            }
        }
        let semistable = !minimum.is_negative();
        let all_rank_one = self.blocks.iter().flatten().all(|b| b.rank == 1);
        Ok(ReducedCheck {
            semistable,
            certified: semistable && (all_rank_one || grid),
            minimum,
        })
    }
}
