use num_traits::Zero;

use super::{kernel, rref, QMat};
use crate::exactnum::Rational;

/// A subspace of `ℚ^n` stored by its reduced row echelon basis, so equal
/// subspaces compare equal structurally.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    rows: QMat,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn span(ambient: usize, vectors: &[Vec<Rational>]) -> Self {
        debug_assert!(vectors.iter().all(|v| v.len() == ambient));
        let (rows, pivots) = rref(vectors);
        Subspace {
            ambient,
            rows,
            pivots,
        }
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Self::span(ambient, &super::identity(ambient))
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    /// The echelon basis.
    pub fn basis(&self) -> &QMat {
        &self.rows
    }

    /// Remainder of `v` after elimination against the echelon basis.
    pub fn reduce(&self, v: &[Rational]) -> Vec<Rational> {
        let mut w = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if w[p].is_zero() {
                continue;
            }
            let f = w[p].clone();
            for (x, y) in w.iter_mut().zip(row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.rows.iter().all(|v| self.contains(v))
    }

    /// Coordinates of a member in the echelon basis.
    pub fn coordinates(&self, v: &[Rational]) -> Option<Vec<Rational>> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut all = self.rows.clone();
        all.extend(other.rows.iter().cloned());
        Subspace::span(self.ambient, &all)
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        if self.dim() == 0 || other.dim() == 0 {
            return Subspace::zero(self.ambient);
        }
        let (a, b) = (self.dim(), other.dim());
        let eqs: QMat = (0..self.ambient)
            .map(|c| {
                self.rows
                    .iter()
                    .map(|v| v[c].clone())
                    .chain(other.rows.iter().map(|w| -w[c].clone()))
                    .collect()
            })
            .collect();
        let sols = kernel(&eqs, a + b);
        let vectors: QMat = sols
            .iter()
            .map(|s| {
                let mut v = vec![Rational::zero(); self.ambient];
                for (coef, row) in s[..a].iter().zip(&self.rows) {
                    if coef.is_zero() {
                        continue;
                    }
                    for (x, y) in v.iter_mut().zip(row) {
                        *x += coef * y;
                    }
                }
                v
            })
            .collect();
        Subspace::span(self.ambient, &vectors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    fn v(x: &[i64]) -> Vec<Rational> {
        x.iter().map(|&a| rat(a)).collect()
    }

    #[test]
    fn canonical_and_membership() {
        let a = Subspace::span(3, &[v(&[1, 1, 0]), v(&[0, 1, 1])]);
        let b = Subspace::span(3, &[v(&[1, 0, -1]), v(&[1, 2, 1])]);
        assert_eq!(a, b);
        assert!(a.contains(&v(&[2, 3, 1])));
        assert!(!a.contains(&v(&[0, 0, 1])));
        assert_eq!(a.dim(), 2);
    }

    #[test]
    fn sums_and_intersections() {
        let x = Subspace::span(3, &[v(&[1, 0, 0]), v(&[0, 1, 0])]);
        let y = Subspace::span(3, &[v(&[0, 1, 0]), v(&[0, 0, 1])]);
        assert_eq!(x.intersect(&y), Subspace::span(3, &[v(&[0, 1, 0])]));
        assert_eq!(x.sum(&y), Subspace::full(3));
        assert_eq!(x.intersect(&Subspace::zero(3)).dim(), 0);
    }
}
