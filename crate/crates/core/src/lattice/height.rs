//! Heights of morphisms between lattices.
//!
//! The height is the sum over all places of the log operator norm. The
//! finite part is exact. The archimedean part is `½ log λ_max` of a pencil
//! and is returned as a certified bracket.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::Lattice;
use crate::error::{Error, Result};
use crate::exactnum::{
    gcd_of_numerators, lcm_of_denominators, ln_interval, ratio, serde_rational_matrix, LogValue,
    Rational,
};
use crate::linalg::{self, QMat};

/// A `ℚ`-linear map `source ⊗ ℚ → target ⊗ ℚ`; `matrix` has
/// `target.rank()` rows and `source.rank()` columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Morphism {
    pub source: Lattice,
    pub target: Lattice,
    #[serde(with = "serde_rational_matrix")]
    pub matrix: QMat,
}

impl Morphism {
    pub fn new(source: Lattice, target: Lattice, matrix: QMat) -> Result<Self> {
        if matrix.len() != target.rank() || matrix.iter().any(|r| r.len() != source.rank()) {
            return Err(Error::dims(format!(
                "morphism matrix must be {}x{}",
                target.rank(),
                source.rank()
            )));
        }
        Ok(Morphism {
            source,
            target,
            matrix,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().flatten().all(Zero::is_zero)
    }

    pub fn is_injective(&self) -> bool {
        linalg::rank(&self.matrix) == self.source.rank()
    }
}

/// `lower <= h(φ) <= upper` with `h = finite + archimedean`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HeightBracket {
    pub finite: LogValue,
    pub archimedean_lower: LogValue,
    pub archimedean_upper: LogValue,
}

impl HeightBracket {
    pub fn lower(&self) -> LogValue {
        &self.finite + &self.archimedean_lower
    }

    pub fn upper(&self) -> LogValue {
        &self.finite + &self.archimedean_upper
    }

    pub fn is_exact(&self) -> bool {
        self.archimedean_lower == self.archimedean_upper
    }

    /// Certified upper bound on the bracket width.
    pub fn width_upper_bound(&self) -> Rational {
        (&self.archimedean_upper - &self.archimedean_lower)
            .approximate(64)
            .hi()
    }
}

/// Height of a nonzero morphism with the archimedean bracket narrower than
/// `2^-tolerance_bits`.
pub fn morphism_height(phi: &Morphism, tolerance_bits: u32) -> Result<HeightBracket> {
    if phi.is_zero() {
        return Err(Error::invalid("height of the zero morphism"));
    }
    let entries: Vec<&Rational> = phi.matrix.iter().flatten().filter(|q| !q.is_zero()).collect();
    let lcm = lcm_of_denominators(entries.iter().copied());
    let gcd = gcd_of_numerators(entries.iter().copied()).abs();
    let finite = LogValue::log_of(&Rational::new(lcm, gcd), &Rational::one())?;

    // Operator norm squared: largest root of det(AᵀG_F A - t G_E).
    let a = &phi.matrix;
    let s = linalg::mul(&linalg::transpose(a), &linalg::mul(phi.target.gram(), a));
    let grid = tolerance_bits + 3;
    let root = linalg::largest_pencil_root(&s, phi.source.gram(), grid)?;
    let half = ratio(1, 2);
    let (lo, hi) = if root.is_exact() {
        let v = LogValue::log_of(&root.lo, &half)?;
        (v.clone(), v)
    } else {
        let log2 = LogValue::ln(&Rational::from_integer(2.into()));
        let (a, b) = log2_bracket(&root.lo, &root.hi, grid);
        (log2.scale(&(a * &half)), log2.scale(&(b * &half)))
    };
    Ok(HeightBracket {
        finite,
        archimedean_lower: lo,
        archimedean_upper: hi,
    })
}

/// Dyadic `a <= log2(lo)` and `b >= log2(hi)` on the grid `2^-t`.
fn log2_bracket(lo: &Rational, hi: &Rational, t: u32) -> (Rational, Rational) {
    let w = t + 12;
    let two = Rational::from_integer(2.into());
    let ln2 = ln_interval(&two, w);
    let l = ln_interval(lo, w).lo();
    let h = ln_interval(hi, w).hi();
    let a = if l.is_negative() { &l / ln2.lo() } else { &l / ln2.hi() };
    let b = if h.is_negative() { &h / ln2.hi() } else { &h / ln2.lo() };
    let unit = Rational::from_integer(BigInt::one() << t);
    let a = Rational::new((a * &unit).floor().to_integer(), unit.to_integer());
    let b = Rational::new((b * &unit).ceil().to_integer(), unit.to_integer());
    (a, b)
}
