//! Euclidean lattices `(ℤ^r, G)` with exact rational Gram matrices, viewed as
//! Hermitian vector bundles over `Spec ℤ`.
//!
//! The Arakelov degree in the standard basis is `-½ log det G`; every degree,
//! slope and height is returned as an exact [`LogValue`].

mod height;
mod search;

pub use height::{morphism_height, HeightBracket, Morphism};
pub use search::{
    hn_filtration, hn_filtration_with_limit, mu_max, mu_max_with_limit, short_vectors, udeg_max,
    HnResult, DEFAULT_RANK_LIMIT,
};

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{ratio, serde_bigint_matrix, serde_rational_matrix, LogValue, Rational};
use crate::linalg::{self, IMat, QMat};

/// A lattice of rank `r` given by its symmetric positive definite Gram matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LatticeJson", into = "LatticeJson")]
pub struct Lattice {
    gram: QMat,
}

#[derive(Serialize, Deserialize)]
struct LatticeJson {
    rank: usize,
    #[serde(with = "serde_rational_matrix")]
    gram: QMat,
}

impl TryFrom<LatticeJson> for Lattice {
    type Error = Error;
    fn try_from(j: LatticeJson) -> Result<Self> {
        if j.gram.len() != j.rank {
            return Err(Error::dims(format!(
                "rank {} but gram has {} rows",
                j.rank,
                j.gram.len()
            )));
        }
        Lattice::new(j.gram)
    }
}

impl From<Lattice> for LatticeJson {
    fn from(l: Lattice) -> Self {
        LatticeJson {
            rank: l.rank(),
            gram: l.gram,
        }
    }
}

impl Lattice {
    pub fn new(gram: QMat) -> Result<Self> {
        let n = gram.len();
        if gram.iter().any(|row| row.len() != n) {
            return Err(Error::dims("gram matrix is not square"));
        }
        if n == 0 {
            return Err(Error::invalid("lattice rank must be positive"));
        }
        if !linalg::is_positive_definite(&gram) {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(Lattice { gram })
    }

    /// Internal constructor for Gram matrices known to be positive definite,
    /// including the rank-0 lattice.
    pub(crate) fn from_trusted(gram: QMat) -> Self {
        debug_assert!(gram.is_empty() || linalg::is_positive_definite(&gram));
        Lattice { gram }
    }

    pub fn identity(rank: usize) -> Self {
        Lattice::from_trusted(linalg::identity(rank))
    }

    pub fn diagonal(entries: &[Rational]) -> Result<Self> {
        let mut g = linalg::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            g[i][i] = e.clone();
        }
        Lattice::new(g)
    }

    /// Diagonal lattice from integer entries, for examples and tests.
    pub fn diag(entries: &[i64]) -> Result<Self> {
        Self::diagonal(&entries.iter().map(|&e| ratio(e, 1)).collect::<Vec<_>>())
    }

    /// Gram matrix `BᵀB` of the columns of an integer matrix.
    pub fn from_basis_matrix(b: &IMat) -> Result<Self> {
        let cols = linalg::transpose(b);
        let g = linalg::congruence(&linalg::identity(b.len()), &cols);
        Lattice::new(g)
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &QMat {
        &self.gram
    }

    pub fn determinant(&self) -> Rational {
        if self.gram.is_empty() {
            return Rational::one();
        }
        linalg::determinant(&self.gram)
    }

    pub fn degree(&self) -> LogValue {
        LogValue::log_of(&self.determinant(), &ratio(-1, 2)).expect("positive determinant")
    }

    pub fn slope(&self) -> Result<LogValue> {
        if self.rank() == 0 {
            return Err(Error::invalid("slope of the zero lattice"));
        }
        Ok(self.degree().scale(&ratio(1, self.rank() as i64)))
    }

    pub fn norm_sq(&self, v: &[BigInt]) -> Rational {
        linalg::bilinear(&self.gram, v, v)
    }

    pub fn dual(&self) -> Lattice {
        Lattice::from_trusted(linalg::inverse(&self.gram).expect("definite gram is invertible"))
    }

    pub fn direct_sum(&self, other: &Lattice) -> Lattice {
        Lattice::from_trusted(linalg::block_diagonal(&self.gram, &other.gram))
    }

    /// Basis `e_i ⊗ f_j` is ordered with index `i * other.rank() + j`.
    pub fn tensor(&self, other: &Lattice) -> Lattice {
        Lattice::from_trusted(linalg::kronecker(&self.gram, &other.gram))
    }

    /// Basis `e_I` over sorted `k`-subsets in lexicographic order.
    pub fn exterior_power(&self, k: usize) -> Result<Lattice> {
        if k == 0 || k > self.rank() {
            return Err(Error::invalid(format!(
                "exterior power {k} of a rank {} lattice",
                self.rank()
            )));
        }
        Ok(Lattice::from_trusted(linalg::compound(&self.gram, k)))
    }

    /// `UᵀGU` for an integer matrix `U` (unimodular when a change of basis).
    pub fn change_basis(&self, u: &IMat) -> Result<Lattice> {
        if u.len() != self.rank() || u.iter().any(|r| r.len() != self.rank()) {
            return Err(Error::dims("change of basis has the wrong shape"));
        }
        Lattice::new(linalg::congruence(&self.gram, &linalg::transpose(u)))
    }

    pub fn sublattice(&self, generators: Vec<Vec<BigInt>>) -> Result<SubLattice> {
        SubLattice::new(self.clone(), generators)
    }
}

/// A sublattice of `ℤ^r` given by linearly independent integer generators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SubLatticeJson", into = "SubLatticeJson")]
pub struct SubLattice {
    ambient: Lattice,
    basis: Vec<Vec<BigInt>>,
}

#[derive(Serialize, Deserialize)]
struct SubLatticeJson {
    rank: usize,
    #[serde(with = "serde_rational_matrix")]
    gram: QMat,
    /// One inner array per generator.
    #[serde(with = "serde_bigint_matrix")]
    basis: IMat,
}

impl TryFrom<SubLatticeJson> for SubLattice {
    type Error = Error;
    fn try_from(j: SubLatticeJson) -> Result<Self> {
        let ambient = Lattice::try_from(LatticeJson {
            rank: j.rank,
            gram: j.gram,
        })?;
        SubLattice::new(ambient, j.basis)
    }
}

impl From<SubLattice> for SubLatticeJson {
    fn from(s: SubLattice) -> Self {
        SubLatticeJson {
            rank: s.ambient.rank(),
            gram: s.ambient.gram,
            basis: s.basis,
        }
    }
}

impl SubLattice {
    pub fn new(ambient: Lattice, basis: Vec<Vec<BigInt>>) -> Result<Self> {
        let r = ambient.rank();
        if basis.iter().any(|v| v.len() != r) {
            return Err(Error::dims(format!("generators must have length {r}")));
        }
        let q: QMat = linalg::to_rational(&basis);
        if linalg::rank(&q) != basis.len() {
            return Err(Error::invalid("generators are linearly dependent"));
        }
        Ok(SubLattice { ambient, basis })
    }

    pub fn ambient(&self) -> &Lattice {
        &self.ambient
    }

    /// Generators, one vector per entry.
    pub fn basis(&self) -> &[Vec<BigInt>] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn saturate(&self) -> SubLattice {
        SubLattice {
            ambient: self.ambient.clone(),
            basis: linalg::saturate_columns(&self.basis, self.ambient.rank()),
        }
    }

    pub fn is_saturated(&self) -> bool {
        linalg::complete_basis(&self.basis, self.ambient.rank()).is_ok()
    }

    pub fn gram(&self) -> QMat {
        linalg::congruence(self.ambient.gram(), &self.basis)
    }

    pub fn sub_bundle(&self) -> Lattice {
        Lattice::from_trusted(self.gram())
    }

    /// The quotient `E/S` with the induced metric, together with the integer
    /// vectors whose images form the chosen basis of the quotient.
    pub fn quotient_with_lift(&self) -> Result<(Lattice, Vec<Vec<BigInt>>)> {
        let r = self.ambient.rank();
        let c = linalg::complete_basis(&self.basis, r)?;
        Ok((schur_quotient(self.ambient.gram(), &self.basis, &c), c))
    }

    pub fn quotient_bundle(&self) -> Result<Lattice> {
        Ok(self.quotient_with_lift()?.0)
    }

    pub fn degree(&self) -> LogValue {
        self.sub_bundle().degree()
    }

    pub fn slope(&self) -> Result<LogValue> {
        self.sub_bundle().slope()
    }
}

/// Gram matrix of the orthogonal projection of `C` away from `span B`.
fn schur_quotient(g: &QMat, b: &[Vec<BigInt>], c: &[Vec<BigInt>]) -> Lattice {
    if c.is_empty() {
        return Lattice::from_trusted(Vec::new());
    }
    let g22 = linalg::congruence(g, c);
    if b.is_empty() {
        return Lattice::from_trusted(g22);
    }
    let g11 = linalg::congruence(g, b);
    let g12: QMat = b
        .iter()
        .map(|bi| c.iter().map(|cj| linalg::bilinear(g, bi, cj)).collect())
        .collect();
    let inv = linalg::inverse(&g11).expect("definite block");
    let corr = linalg::mul(&linalg::transpose(&g12), &linalg::mul(&inv, &g12));
    let q: QMat = g22
        .iter()
        .zip(&corr)
        .map(|(r, s)| r.iter().zip(s).map(|(a, b)| a - b).collect())
        .collect();
    Lattice::from_trusted(q)
}
