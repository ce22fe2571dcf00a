//! Rational polynomials and certified isolation of the largest generalized
//! eigenvalue of a symmetric pencil.

use num_traits::{One, Signed, Zero};

use super::{determinant, inverse, mul, QMat};
use crate::error::{Error, Result};
use crate::exactnum::{rat, Rational};

/// Coefficients from the constant term upwards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly(pub Vec<Rational>);

impl Poly {
    pub fn eval(&self, t: &Rational) -> Rational {
        self.0
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * t + c)
    }

    /// Newton interpolation through `(x_i, y_i)` with distinct nodes.
    pub fn interpolate(xs: &[Rational], ys: &[Rational]) -> Poly {
        let n = xs.len();
        let mut dd = ys.to_vec();
        for level in 1..n {
            for i in (level..n).rev() {
                dd[i] = (&dd[i] - &dd[i - 1]) / (&xs[i] - &xs[i - level]);
            }
        }
        let mut coeffs = vec![Rational::zero(); n];
        for i in (0..n).rev() {
            // coeffs = coeffs * (t - x_i) + dd[i]
            let mut next = vec![Rational::zero(); n];
            for (k, c) in coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                if k + 1 < n {
                    next[k + 1] += c;
                }
                next[k] -= c * &xs[i];
            }
            next[0] += &dd[i];
            coeffs = next;
        }
        let mut p = Poly(coeffs);
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.0.len() > 1 && self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
    }

    /// `p(x + t)` as a polynomial in `x`.
    pub fn shift(&self, t: &Rational) -> Poly {
        let mut c = self.0.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                let add = &c[j + 1] * t;
                c[j] += add;
            }
        }
        Poly(c)
    }

    pub fn sign_variations(&self) -> usize {
        let signs: Vec<bool> = self
            .0
            .iter()
            .filter(|c| !c.is_zero())
            .map(Signed::is_positive)
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }
}

/// `lo <= root <= hi`; equal endpoints mean the root is exactly rational.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootBracket {
    pub lo: Rational,
    pub hi: Rational,
}

impl RootBracket {
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }
}

/// Largest `t` with `det(S - t G) = 0` for symmetric `S >= 0`, `G > 0`,
/// bracketed until `(hi - lo) <= lo * 2^-rel_bits` or found exactly.
///
/// All roots of the pencil are real, so Descartes' rule applied to the
/// shifted characteristic polynomial counts the roots above a point exactly.
pub fn largest_pencil_root(s: &QMat, g: &QMat, rel_bits: u32) -> Result<RootBracket> {
    let n = g.len();
    if n == 0 {
        return Err(Error::invalid("empty pencil"));
    }
    let xs: Vec<Rational> = (0..=n as i64).map(rat).collect();
    let ys: Vec<Rational> = xs
        .iter()
        .map(|t| {
            let m: QMat = s
                .iter()
                .zip(g)
                .map(|(rs, rg)| rs.iter().zip(rg).map(|(a, b)| a - b * t).collect())
                .collect();
            determinant(&m)
        })
        .collect();
    let p = Poly::interpolate(&xs, &ys);
    let gi_s = mul(&inverse(g)?, s);
    let trace: Rational = (0..n).map(|i| gi_s[i][i].clone()).sum();
    if !trace.is_positive() {
        return Err(Error::invalid("pencil has no positive eigenvalue"));
    }
    let above = |t: &Rational| p.shift(t).sign_variations();
    let mut lo = &trace / rat(n as i64);
    let mut hi = trace;
    if above(&lo) == 0 {
        return Ok(RootBracket { lo: lo.clone(), hi: lo });
    }
    if p.eval(&hi).is_zero() {
        return Ok(RootBracket { lo: hi.clone(), hi });
    }
    let tol = Rational::new(One::one(), num_bigint::BigInt::one() << rel_bits);
    while &hi - &lo > &lo * &tol {
        let mid = (&lo + &hi) / rat(2);
        if above(&mid) > 0 {
            lo = mid;
        } else if p.eval(&mid).is_zero() {
            return Ok(RootBracket { lo: mid.clone(), hi: mid });
        } else {
            hi = mid;
        }
    }
    let guess = simplest_between(&lo, &hi);
    if p.eval(&guess).is_zero() {
        return Ok(RootBracket { lo: guess.clone(), hi: guess });
    }
    Ok(RootBracket { lo, hi })
}

/// The rational of smallest denominator in `[lo, hi]`, for `0 <= lo <= hi`.
fn simplest_between(lo: &Rational, hi: &Rational) -> Rational {
    let f = lo.floor();
    if &f == lo {
        return f;
    }
    let next = &f + Rational::one();
    if &next <= hi {
        return next;
    }
    let inner = simplest_between(&(Rational::one() / (hi - &f)), &(Rational::one() / (lo - &f)));
    f + Rational::one() / inner
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::ratio;

    fn q(rows: &[&[i64]]) -> QMat {
        rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect()
    }

    #[test]
    fn simplest_rationals() {
        assert_eq!(simplest_between(&ratio(5, 2), &rat(5)), rat(3));
        assert_eq!(simplest_between(&ratio(31, 10), &ratio(32, 10)), ratio(16, 5));
        assert_eq!(simplest_between(&ratio(1, 3), &ratio(1, 3)), ratio(1, 3));
        assert_eq!(simplest_between(&ratio(3, 10), &ratio(4, 10)), ratio(1, 3));
    }

    #[test]
    fn interpolation_and_shift() {
        let xs: Vec<Rational> = (0..4).map(rat).collect();
        let ys: Vec<Rational> = xs.iter().map(|x| x * x * x - rat(2) * x + rat(1)).collect();
        let p = Poly::interpolate(&xs, &ys);
        assert_eq!(p, Poly(vec![rat(1), rat(-2), rat(0), rat(1)]));
        let sh = p.shift(&rat(1));
        assert_eq!(sh.eval(&rat(2)), p.eval(&rat(3)));
    }

    #[test]
    fn pencil_roots() {
        let b = largest_pencil_root(&q(&[&[1, 0], &[0, 4]]), &q(&[&[1, 0], &[0, 1]]), 40).unwrap();
        assert!(b.lo <= rat(4) && rat(4) <= b.hi);
        let b = largest_pencil_root(&q(&[&[4]]), &q(&[&[1]]), 40).unwrap();
        assert!(b.is_exact());
        assert_eq!(b.lo, rat(4));
        let b = largest_pencil_root(&q(&[&[1, 0], &[0, 1]]), &q(&[&[1, 0], &[0, 1]]), 40).unwrap();
        assert_eq!(b, RootBracket { lo: rat(1), hi: rat(1) });
        // [[2,1],[1,2]] has eigenvalues 1 and 3.
        let b = largest_pencil_root(&q(&[&[2, 1], &[1, 2]]), &q(&[&[1, 0], &[0, 1]]), 40).unwrap();
        assert!(b.lo <= rat(3) && rat(3) <= b.hi);
        // eigenvalues of [[2,1],[1,1]]: (3 ± √5)/2, largest ≈ 2.618
        let b = largest_pencil_root(&q(&[&[2, 1], &[1, 1]]), &q(&[&[1, 0], &[0, 1]]), 30).unwrap();
        assert!(b.lo < ratio(2619, 1000) && b.hi > ratio(2618, 1000));
        assert!(b.hi.clone() - b.lo.clone() <= b.lo.clone() / rat(1 << 30));
    }
}
