use serde::{Deserialize, Serialize};

use super::Filtration;
use crate::error::{Error, Result};
use crate::exactnum::{serde_rational_matrix, Rational};
use crate::linalg::{self, QMat, Subspace};

/// An ordered basis of `ℚ^r`, stored as a list of vectors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BasisJson", into = "BasisJson")]
pub struct CompatibleBasis {
    vectors: QMat,
}

#[derive(Serialize, Deserialize)]
struct BasisJson {
    #[serde(with = "serde_rational_matrix")]
    vectors: QMat,
}

impl TryFrom<BasisJson> for CompatibleBasis {
    type Error = Error;
    fn try_from(j: BasisJson) -> Result<Self> {
        CompatibleBasis::new(j.vectors)
    }
}

impl From<CompatibleBasis> for BasisJson {
    fn from(b: CompatibleBasis) -> Self {
        BasisJson { vectors: b.vectors }
    }
}

impl CompatibleBasis {
    pub fn new(vectors: QMat) -> Result<Self> {
        let r = vectors.len();
        if vectors.iter().any(|v| v.len() != r) {
            return Err(Error::dims("a basis of ℚ^r needs r vectors of length r"));
        }
        if linalg::rank(&vectors) != r {
            return Err(Error::invalid("vectors are linearly dependent"));
        }
        Ok(CompatibleBasis { vectors })
    }

    pub fn vectors(&self) -> &QMat {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }
}

/// A basis compatible with both filtrations, preferring standard basis
/// vectors.
pub fn common_compatible_basis(f: &Filtration, g: &Filtration) -> Result<CompatibleBasis> {
    let standard = linalg::identity(f.dim());
    common_compatible_basis_with(f, g, &standard)
}

/// A basis compatible with both filtrations, preferring vectors of
/// `reference` wherever they fit.
///
/// The cells `V_i ∩ W_j` are visited from the deepest outwards and each is
/// filled up from the vectors already chosen.
pub fn common_compatible_basis_with(
    f: &Filtration,
    g: &Filtration,
    reference: &[Vec<Rational>],
) -> Result<CompatibleBasis> {
    let n = f.dim();
    if g.dim() != n {
        return Err(Error::dims(format!("filtrations of dimensions {n} and {}", g.dim())));
    }
    if reference.iter().any(|v| v.len() != n) {
        return Err(Error::dims("reference vectors of the wrong length"));
    }
    let fm: Vec<Subspace> = (0..f.depth()).map(|i| f.member(i)).collect();
    let gm: Vec<Subspace> = (0..g.depth()).map(|j| g.member(j)).collect();
    let mut chosen: QMat = Vec::with_capacity(n);
    let mut span = Subspace::zero(n);
    for vi in fm.iter().rev() {
        for wj in gm.iter().rev() {
            let cell = vi.intersect(wj);
            let mut have = chosen.iter().filter(|v| cell.contains(v)).count();
            if have == cell.dim() {
                continue;
            }
            let candidates = reference
                .iter()
                .filter(|v| cell.contains(v))
                .chain(cell.basis().iter());
            for c in candidates {
                if have == cell.dim() {
                    break;
                }
                if !span.contains(c) {
                    span = span.sum(&Subspace::span(n, std::slice::from_ref(c)));
                    chosen.push(c.clone());
                    have += 1;
                }
            }
            if have != cell.dim() {
                return Err(Error::Internal("could not fill a cell of the common basis".into()));
            }
        }
    }
    let basis = CompatibleBasis::new(chosen)
        .map_err(|_| Error::Internal("common basis is not a basis".into()))?;
    if !f.is_compatible(&basis) || !g.is_compatible(&basis) {
        return Err(Error::Internal("common basis is not compatible".into()));
    }
    Ok(basis)
}
