//! Rational ℝ-filtrations of finite-dimensional `ℚ`-vector spaces.
//!
//! A filtration is a flag `V = V_0 ⊋ V_1 ⊋ … ⊋ V_d = 0` with strictly
//! increasing jumps `λ_0 < … < λ_{d-1}`; `𝓕_λ V = V_i` for
//! `λ_{i-1} < λ <= λ_i`. Vectors in `V_i \ V_{i+1}` have `λ_𝓕 = λ_i`.

mod basis;

pub use basis::{common_compatible_basis, common_compatible_basis_with, CompatibleBasis};

use std::fmt;

use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{format_rational, rat, serde_rational_matrix, serde_rational_vec, Rational};
use crate::gitstab::AlgValue;
use crate::linalg::{self, QMat, Subspace};

/// `λ_𝓕(v)`: a jump for `v ≠ 0`, `+∞` for `v = 0`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum LambdaValue {
    Finite(Rational),
    Infinity,
}

impl LambdaValue {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            LambdaValue::Finite(q) => Some(q),
            LambdaValue::Infinity => None,
        }
    }
}

impl fmt::Display for LambdaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaValue::Finite(q) => f.write_str(&format_rational(q)),
            LambdaValue::Infinity => f.write_str("+inf"),
        }
    }
}

impl Serialize for LambdaValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "FiltrationJson", into = "FiltrationJson")]
pub struct Filtration {
    dim: usize,
    /// `V_1, …, V_{d-1}`; `V_0 = V` and `V_d = 0` are implicit.
    members: Vec<Subspace>,
    jumps: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
struct Member(#[serde(with = "serde_rational_matrix")] QMat);

#[derive(Serialize, Deserialize)]
struct FiltrationJson {
    dim: usize,
    #[serde(with = "serde_rational_vec")]
    jumps: Vec<Rational>,
    flag: Vec<Member>,
}

impl TryFrom<FiltrationJson> for Filtration {
    type Error = Error;
    fn try_from(j: FiltrationJson) -> Result<Self> {
        Filtration::new(j.dim, j.flag.into_iter().map(|m| m.0).collect(), j.jumps)
    }
}

impl From<Filtration> for FiltrationJson {
    fn from(f: Filtration) -> Self {
        FiltrationJson {
            dim: f.dim,
            jumps: f.jumps,
            flag: f.members.iter().map(|s| Member(s.basis().clone())).collect(),
        }
    }
}

impl Filtration {
    /// Builds a filtration from spanning sets of `V_1, …, V_{d-1}` and the
    /// `d` jumps.
    pub fn new(dim: usize, flag: Vec<QMat>, jumps: Vec<Rational>) -> Result<Self> {
        for (i, m) in flag.iter().enumerate() {
            if m.iter().any(|v| v.len() != dim) {
                return Err(Error::dims(format!(
                    "flag member {} has vectors not of length {dim}",
                    i + 1
                )));
            }
        }
        let members = flag.iter().map(|m| Subspace::span(dim, m)).collect();
        Self::from_subspaces(dim, members, jumps)
    }

    pub fn from_subspaces(dim: usize, members: Vec<Subspace>, jumps: Vec<Rational>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("filtration of the zero space"));
        }
        if jumps.len() != members.len() + 1 {
            return Err(Error::dims(format!(
                "{} jumps for a flag with {} proper members",
                jumps.len(),
                members.len()
            )));
        }
        if jumps.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("jumps must be strictly increasing"));
        }
        let mut prev = Subspace::full(dim);
        for (i, m) in members.iter().enumerate() {
            if m.ambient() != dim {
                return Err(Error::dims("flag member in the wrong ambient space"));
            }
            if m.dim() == 0 || m.dim() >= prev.dim() || !prev.contains_subspace(m) {
                return Err(Error::invalid(format!(
                    "flag member {} is not a nonzero proper subspace of the previous one",
                    i + 1
                )));
            }
            prev = m.clone();
        }
        Ok(Filtration {
            dim,
            members,
            jumps,
        })
    }

    /// The filtration supported by `{λ}`.
    pub fn constant(dim: usize, lambda: Rational) -> Self {
        Filtration {
            dim,
            members: Vec::new(),
            jumps: vec![lambda],
        }
    }

    pub fn trivial(dim: usize) -> Self {
        Self::constant(dim, Rational::zero())
    }

    /// The unique filtration for which `basis` is compatible and
    /// `λ(basis[k]) = values[k]`.
    pub fn from_coordinates(basis: &[Vec<Rational>], values: &[Rational]) -> Result<Self> {
        let dim = basis.len();
        if values.len() != dim || basis.iter().any(|v| v.len() != dim) {
            return Err(Error::dims("basis and values must match the dimension"));
        }
        if linalg::rank(basis) != dim {
            return Err(Error::invalid("vectors do not form a basis"));
        }
        let mut jumps: Vec<Rational> = values.to_vec();
        jumps.sort();
        jumps.dedup();
        let members = jumps[1..]
            .iter()
            .map(|l| {
                let vs: QMat = basis
                    .iter()
                    .zip(values)
                    .filter(|(_, x)| *x >= l)
                    .map(|(v, _)| v.clone())
                    .collect();
                Subspace::span(dim, &vs)
            })
            .collect();
        Self::from_subspaces(dim, members, jumps)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn jumps(&self) -> &[Rational] {
        &self.jumps
    }

    /// Number of distinct jumps `d`.
    pub fn depth(&self) -> usize {
        self.jumps.len()
    }

    /// `V_i` for `0 <= i <= d`.
    pub fn member(&self, i: usize) -> Subspace {
        match i {
            0 => Subspace::full(self.dim),
            i if i == self.depth() => Subspace::zero(self.dim),
            i => self.members[i - 1].clone(),
        }
    }

    /// `dim V_i - dim V_{i+1}` for each jump.
    pub fn step_ranks(&self) -> Vec<usize> {
        (0..self.depth())
            .map(|i| self.member(i).dim() - self.member(i + 1).dim())
            .collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.depth() == 1 && self.jumps[0].is_zero()
    }

    pub fn has_integer_jumps(&self) -> bool {
        self.jumps.iter().all(|j| j.is_integer())
    }

    pub fn expectation(&self) -> Rational {
        let total: Rational = self
            .step_ranks()
            .iter()
            .zip(&self.jumps)
            .map(|(&r, l)| l * rat(r as i64))
            .sum();
        total / rat(self.dim as i64)
    }

    /// Index of the deepest member containing a nonzero `v`.
    pub fn level(&self, v: &[Rational]) -> Result<Option<usize>> {
        if v.len() != self.dim {
            return Err(Error::dims(format!("vector of length {} in dimension {}", v.len(), self.dim)));
        }
        if linalg::is_zero_vec(v) {
            return Ok(None);
        }
        let mut level = 0;
        for (i, m) in self.members.iter().enumerate() {
            if m.contains(v) {
                level = i + 1;
            } else {
                break;
            }
        }
        Ok(Some(level))
    }

    pub fn lambda_of(&self, v: &[Rational]) -> Result<LambdaValue> {
        Ok(match self.level(v)? {
            None => LambdaValue::Infinity,
            Some(i) => LambdaValue::Finite(self.jumps[i].clone()),
        })
    }

    fn lambda_nonzero(&self, v: &[Rational]) -> Rational {
        let i = self.level(v).expect("dimension checked").expect("nonzero vector");
        self.jumps[i].clone()
    }

    pub fn dilate(&self, eps: &Rational) -> Result<Self> {
        if !eps.is_positive() {
            return Err(Error::invalid("dilation factor must be positive"));
        }
        Ok(Filtration {
            dim: self.dim,
            members: self.members.clone(),
            jumps: self.jumps.iter().map(|l| l * eps).collect(),
        })
    }

    /// Adds `t` to every jump.
    pub fn shift(&self, t: &Rational) -> Self {
        Filtration {
            dim: self.dim,
            members: self.members.clone(),
            jumps: self.jumps.iter().map(|l| l + t).collect(),
        }
    }

    /// A compatible basis preferring standard basis vectors, listed from the
    /// deepest member outwards.
    pub fn adapted_basis(&self) -> CompatibleBasis {
        common_compatible_basis(self, &Filtration::trivial(self.dim)).expect("same dimension")
    }

    pub fn adapted_basis_with(&self, reference: &[Vec<Rational>]) -> Result<CompatibleBasis> {
        common_compatible_basis_with(self, &Filtration::trivial(self.dim), reference)
    }

    /// For each jump `λ_j`, the vectors of the adapted basis lying in
    /// `V_j \ V_{j+1}`; their images form a basis of `V_j / V_{j+1}`.
    pub fn block_bases(&self) -> Vec<QMat> {
        let mut blocks = vec![Vec::new(); self.depth()];
        for v in self.adapted_basis().vectors() {
            let j = self.level(v).expect("dimension").expect("nonzero");
            blocks[j].push(v.clone());
        }
        blocks
    }

    pub fn is_compatible(&self, basis: &CompatibleBasis) -> bool {
        basis.dim() == self.dim
            && self.members.iter().all(|m| {
                basis.vectors().iter().filter(|v| m.contains(v)).count() == m.dim()
            })
    }

    /// `(λ(e_1), …, λ(e_r))` for a compatible basis.
    pub fn coordinates(&self, basis: &CompatibleBasis) -> Result<Vec<Rational>> {
        if !self.is_compatible(basis) {
            return Err(Error::invalid("basis is not compatible with the filtration"));
        }
        Ok(basis.vectors().iter().map(|v| self.lambda_nonzero(v)).collect())
    }

    pub fn norm_sq(&self) -> Rational {
        let total: Rational = self
            .step_ranks()
            .iter()
            .zip(&self.jumps)
            .map(|(&r, l)| l * l * rat(r as i64))
            .sum();
        total / rat(self.dim as i64)
    }

    pub fn norm(&self) -> AlgValue {
        AlgValue::sqrt(&self.norm_sq())
    }

    pub fn direct_sum(parts: &[Filtration]) -> Result<Filtration> {
        if parts.is_empty() {
            return Err(Error::invalid("direct sum of no filtrations"));
        }
        let dim: usize = parts.iter().map(Filtration::dim).sum();
        let mut basis = Vec::with_capacity(dim);
        let mut values = Vec::with_capacity(dim);
        let mut offset = 0;
        for f in parts {
            let b = f.adapted_basis();
            for v in b.vectors() {
                let mut w = vec![Rational::zero(); dim];
                w[offset..offset + f.dim].clone_from_slice(v);
                values.push(f.lambda_nonzero(v));
                basis.push(w);
            }
            offset += f.dim;
        }
        Filtration::from_coordinates(&basis, &values)
    }

    /// Tensor product; multi-indices are flattened row-major, so
    /// `e_j ⊗ f_k` sits at `j * dim(f) + k`.
    pub fn tensor(parts: &[Filtration]) -> Result<Filtration> {
        if parts.is_empty() {
            return Err(Error::invalid("tensor product of no filtrations"));
        }
        let mut basis: QMat = vec![vec![Rational::one()]];
        let mut values = vec![Rational::zero()];
        for f in parts {
            let b = f.adapted_basis();
            let vals: Vec<Rational> = b.vectors().iter().map(|v| f.lambda_nonzero(v)).collect();
            let mut nb = Vec::with_capacity(basis.len() * f.dim);
            let mut nv = Vec::with_capacity(basis.len() * f.dim);
            for (u, a) in basis.iter().zip(&values) {
                for (v, c) in b.vectors().iter().zip(&vals) {
                    nb.push(kron_vec(u, v));
                    nv.push(a + c);
                }
            }
            basis = nb;
            values = nv;
        }
        Filtration::from_coordinates(&basis, &values)
    }
}

pub(crate) fn kron_vec(u: &[Rational], v: &[Rational]) -> Vec<Rational> {
    let mut out = Vec::with_capacity(u.len() * v.len());
    for a in u {
        for b in v {
            out.push(a * b);
        }
    }
    out
}

/// `⟨𝓕, 𝓖⟩ = (1/r) Σ λ_𝓕(e_i) λ_𝓖(e_i)` over a common compatible basis.
pub fn scalar_product(f: &Filtration, g: &Filtration) -> Result<Rational> {
    let basis = common_compatible_basis(f, g)?;
    Ok(scalar_product_in(f, g, &basis))
}

pub(crate) fn scalar_product_in(f: &Filtration, g: &Filtration, basis: &CompatibleBasis) -> Rational {
    let total: Rational = basis
        .vectors()
        .iter()
        .map(|v| f.lambda_nonzero(v) * g.lambda_nonzero(v))
        .sum();
    total / rat(f.dim as i64)
}

/// Builds `𝓖` on `V` from filtrations `𝓖^j` of the subquotients
/// `V_j / V_{j+1}` of `𝓕`, each identified with `ℚ^{r_j}` through
/// [`Filtration::block_bases`].
pub fn assemble_from_subquotients(f: &Filtration, blocks: &[Filtration]) -> Result<Filtration> {
    let ranks = f.step_ranks();
    if blocks.len() != ranks.len() {
        return Err(Error::dims(format!(
            "{} block filtrations for {} subquotients",
            blocks.len(),
            ranks.len()
        )));
    }
    for (j, (b, &r)) in blocks.iter().zip(&ranks).enumerate() {
        if b.dim() != r {
            return Err(Error::dims(format!(
                "block {j} has dimension {} but the subquotient has rank {r}",
                b.dim()
            )));
        }
    }
    let lifts = f.block_bases();
    let mut basis = Vec::with_capacity(f.dim);
    let mut values = Vec::with_capacity(f.dim);
    for (block, lift) in blocks.iter().zip(&lifts) {
        for u in block.adapted_basis().vectors() {
            let mut v = vec![Rational::zero(); f.dim];
            for (c, w) in u.iter().zip(lift) {
                if c.is_zero() {
                    continue;
                }
                for (x, y) in v.iter_mut().zip(w) {
                    *x += c * y;
                }
            }
            values.push(block.lambda_nonzero(u));
            basis.push(v);
        }
    }
    let g = Filtration::from_coordinates(&basis, &values)?;

    let r = rat(f.dim as i64);
    let weighted: Rational = blocks
        .iter()
        .zip(&ranks)
        .map(|(b, &rj)| b.expectation() * rat(rj as i64))
        .sum();
    let paired: Rational = blocks
        .iter()
        .zip(&ranks)
        .zip(f.jumps())
        .map(|((b, &rj), l)| l * b.expectation() * rat(rj as i64))
        .sum();
    if g.expectation() != &weighted / &r {
        return Err(Error::Internal("expectation of the assembled filtration".into()));
    }
    if scalar_product(f, &g)? != &paired / &r {
        return Err(Error::Internal("scalar product with the assembled filtration".into()));
    }
    Ok(g)
}

/// A random filtration with integer jumps in `[-max_jump, max_jump]` on a
/// random basis with small entries.
pub fn random_filtration<R: Rng + ?Sized>(dim: usize, max_jump: i64, rng: &mut R) -> Filtration {
    let basis = random_basis(dim, 2, rng);
    let values: Vec<Rational> = (0..dim).map(|_| rat(rng.gen_range(-max_jump..=max_jump))).collect();
    Filtration::from_coordinates(&basis, &values).expect("random basis is invertible")
}

/// A random invertible `dim × dim` matrix with entries in `[-bound, bound]`,
/// returned as a list of basis vectors.
pub fn random_basis<R: Rng + ?Sized>(dim: usize, bound: i64, rng: &mut R) -> QMat {
    loop {
        let b: QMat = (0..dim)
            .map(|_| (0..dim).map(|_| rat(rng.gen_range(-bound..=bound))).collect())
            .collect();
        if linalg::rank(&b) == dim {
            return b;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::ratio;

    fn v(x: &[i64]) -> Vec<Rational> {
        x.iter().map(|&a| rat(a)).collect()
    }

    fn e1_flag(j0: i64, j1: i64) -> Filtration {
        Filtration::new(2, vec![vec![v(&[1, 0])]], vec![rat(j0), rat(j1)]).unwrap()
    }

    #[test]
    fn construction() {
        assert!(Filtration::trivial(2).is_trivial());
        assert!(Filtration::new(2, vec![vec![v(&[1, 0])]], vec![rat(1), rat(0)]).is_err());
        assert!(Filtration::new(2, vec![vec![v(&[1, 0]), v(&[0, 1])]], vec![rat(0), rat(1)]).is_err());
        assert!(Filtration::new(2, vec![], vec![rat(0), rat(1)]).is_err());
        let json = serde_json::to_string(&e1_flag(0, 1)).unwrap();
        assert_eq!(json, r#"{"dim":2,"jumps":["0","1"],"flag":[[["1","0"]]]}"#);
        let back: Filtration = serde_json::from_str(&json).unwrap();
        assert_eq!(back, e1_flag(0, 1));
    }

    #[test]
    fn expectation_examples() {
        assert!(Filtration::trivial(3).expectation().is_zero());
        assert_eq!(e1_flag(0, 1).expectation(), ratio(1, 2));
        let f = Filtration::new(3, vec![vec![v(&[0, 0, 1])]], vec![rat(-1), rat(2)]).unwrap();
        assert!(f.expectation().is_zero());
    }

    #[test]
    fn lambda_examples() {
        let f = e1_flag(0, 1);
        assert_eq!(f.lambda_of(&v(&[0, 0])).unwrap(), LambdaValue::Infinity);
        assert_eq!(f.lambda_of(&v(&[1, 0])).unwrap(), LambdaValue::Finite(rat(1)));
        assert_eq!(f.lambda_of(&v(&[0, 1])).unwrap(), LambdaValue::Finite(rat(0)));
        assert_eq!(f.lambda_of(&v(&[1, 1])).unwrap(), LambdaValue::Finite(rat(0)));
        assert_eq!(Filtration::trivial(2).lambda_of(&v(&[3, -1])).unwrap(), LambdaValue::Finite(rat(0)));
        assert!(f.lambda_of(&v(&[1])).is_err());
    }

    #[test]
    fn dilation() {
        let f = e1_flag(0, 1);
        assert_eq!(f.dilate(&rat(1)).unwrap(), f);
        let g = f.dilate(&rat(3)).unwrap();
        assert_eq!(g.jumps(), &[rat(0), rat(3)]);
        assert_eq!(g.expectation(), rat(3) * f.expectation());
        assert!(Filtration::trivial(2).dilate(&rat(5)).unwrap().is_trivial());
        assert!(f.dilate(&rat(0)).is_err());
    }

    #[test]
    fn tensor_and_sum() {
        let t = Filtration::tensor(&[Filtration::trivial(2), Filtration::trivial(3)]).unwrap();
        assert!(t.is_trivial());
        let f = e1_flag(0, 1);
        let t = Filtration::tensor(&[f.clone(), f.clone()]).unwrap();
        assert_eq!(t.jumps(), &[rat(0), rat(1), rat(2)]);
        let lam = |x: &[i64]| t.lambda_of(&v(x)).unwrap();
        assert_eq!(lam(&[1, 0, 0, 0]), LambdaValue::Finite(rat(2)));
        assert_eq!(lam(&[0, 1, 0, 0]), LambdaValue::Finite(rat(1)));
        assert_eq!(lam(&[0, 0, 0, 1]), LambdaValue::Finite(rat(0)));
        let eps = rat(2);
        let lhs = t.dilate(&eps).unwrap();
        let fe = f.dilate(&eps).unwrap();
        assert_eq!(lhs, Filtration::tensor(&[fe.clone(), fe]).unwrap());
        let s = Filtration::direct_sum(&[f.clone(), Filtration::constant(1, rat(5))]).unwrap();
        assert_eq!(s.jumps(), &[rat(0), rat(1), rat(5)]);
        assert_eq!(s.lambda_of(&v(&[1, 0, 0])).unwrap(), LambdaValue::Finite(rat(1)));
    }

    #[test]
    fn scalar_products() {
        let f = e1_flag(0, 1);
        assert!(scalar_product(&Filtration::trivial(2), &f).unwrap().is_zero());
        assert_eq!(scalar_product(&Filtration::constant(2, rat(1)), &Filtration::constant(2, rat(1))).unwrap(), rat(1));
        assert_eq!(f.norm_sq(), ratio(1, 2));
        assert_eq!(scalar_product(&f, &f).unwrap(), ratio(1, 2));
    }

    #[test]
    fn coordinates_round_trip() {
        let f = e1_flag(0, 1);
        let b = CompatibleBasis::new(vec![v(&[1, 0]), v(&[0, 1])]).unwrap();
        assert_eq!(f.coordinates(&b).unwrap(), vec![rat(1), rat(0)]);
        assert_eq!(Filtration::trivial(2).coordinates(&b).unwrap(), vec![rat(0), rat(0)]);
        let bad = CompatibleBasis::new(vec![v(&[1, 1]), v(&[0, 1])]).unwrap();
        assert!(f.coordinates(&bad).is_err());
        let back = Filtration::from_coordinates(b.vectors(), &[rat(1), rat(0)]).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn subquotient_assembly() {
        let f = e1_flag(0, 1);
        let g = assemble_from_subquotients(&f, &[Filtration::trivial(1), Filtration::trivial(1)]).unwrap();
        assert!(g.is_trivial());
        let (u0, u1) = (rat(3), rat(-2));
        let g = assemble_from_subquotients(
            &f,
            &[Filtration::constant(1, u0.clone()), Filtration::constant(1, u1.clone())],
        )
        .unwrap();
        let expected = (rat(1) * &u1 + rat(0) * &u0) / rat(2);
        assert_eq!(scalar_product(&f, &g).unwrap(), expected);
        let single = Filtration::new(2, vec![], vec![rat(0)]).unwrap();
        let h = e1_flag(-1, 4);
        assert_eq!(assemble_from_subquotients(&single, std::slice::from_ref(&h)).unwrap(), h);
    }
}
