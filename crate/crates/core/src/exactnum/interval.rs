//! Certified dyadic enclosures of natural logarithms.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::Rational;

/// Closed interval `[lo / 2^exp, hi / 2^exp]` with dyadic endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    lo: BigInt,
    hi: BigInt,
    exp: u32,
}

impl Interval {
    pub fn new(lo: BigInt, hi: BigInt, exp: u32) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi, exp }
    }

    pub fn point(q: &BigInt, exp: u32) -> Self {
        Interval::new(q.clone(), q.clone(), exp)
    }

    pub fn lo(&self) -> Rational {
        Rational::new(self.lo.clone(), BigInt::one() << self.exp)
    }

    pub fn hi(&self) -> Rational {
        Rational::new(self.hi.clone(), BigInt::one() << self.exp)
    }

    pub fn width(&self) -> Rational {
        Rational::new(&self.hi - &self.lo, BigInt::one() << self.exp)
    }

    pub fn midpoint(&self) -> Rational {
        Rational::new(&self.hi + &self.lo, BigInt::one() << (self.exp + 1))
    }

    pub fn contains(&self, q: &Rational) -> bool {
        &self.lo() <= q && q <= &self.hi()
    }

    /// `Some(sign)` when zero is excluded, `None` otherwise.
    pub fn sign(&self) -> Option<std::cmp::Ordering> {
        if self.lo.is_positive() {
            Some(std::cmp::Ordering::Greater)
        } else if self.hi.is_negative() {
            Some(std::cmp::Ordering::Less)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(std::cmp::Ordering::Equal)
        } else {
            None
        }
    }

    pub fn midpoint_f64(&self) -> f64 {
        super::to_f64(&self.midpoint())
    }
}

/// Enclosure of `atanh(a/b)` for `0 <= a/b <= 1/3`, scaled by `2^w`.
fn atanh_scaled(a: &BigUint, b: &BigUint, w: u32) -> (BigInt, BigInt) {
    debug_assert!(BigUint::from(3u32) * a <= *b);
    if a.is_zero() {
        return (BigInt::zero(), BigInt::zero());
    }
    let a2 = a * a;
    let b2 = b * b;
    let mut num = a.clone();
    let mut den = b.clone();
    let scale = BigUint::one() << w;
    let mut lo = BigUint::zero();
    let mut hi = BigUint::zero();
    let mut k = 0u32;
    loop {
        let d = &den * BigUint::from(2 * k + 1);
        let (q, r) = (&num * &scale).div_rem(&d);
        hi += &q + if r.is_zero() { 0u32 } else { 1u32 };
        lo += q;
        num *= &a2;
        den *= &b2;
        k += 1;
        // Stop once the next term drops below one unit in the last place.
        if &num * &scale < den {
            break;
        }
    }
    // Remaining tail is at most x^(2k+1) / ((2k+1)(1-x^2)) <= (9/8) x^(2k+1).
    let tail_num = &num * &scale * 9u32;
    let tail_den = &den * 8u32 * (2 * k + 1);
    let tail = tail_num.div_ceil(&tail_den);
    hi += tail;
    (BigInt::from(lo), BigInt::from(hi))
}

/// Enclosure of `ln n` for a positive integer, scaled by `2^w`.
fn ln_natural_scaled(n: &BigUint, w: u32) -> (BigInt, BigInt) {
    assert!(!n.is_zero());
    if n.is_one() {
        return (BigInt::zero(), BigInt::zero());
    }
    let (ln2_lo, ln2_hi) = {
        let (l, h) = atanh_scaled(&BigUint::one(), &BigUint::from(3u32), w);
        (l * 2, h * 2)
    };
    let k = n.bits() - 1;
    let pk = BigUint::one() << k;
    // n = 2^k * m with m in [1, 2); ln m = 2 atanh((n - 2^k)/(n + 2^k)).
    let (m_lo, m_hi) = atanh_scaled(&(n - &pk), &(n + &pk), w);
    let k = BigInt::from(k);
    (&k * ln2_lo + m_lo * 2, &k * ln2_hi + m_hi * 2)
}

/// Enclosure of `ln q` (q > 0) with endpoints on the grid `2^-w`.
pub fn ln_interval(q: &Rational, w: u32) -> Interval {
    assert!(q.is_positive(), "ln of a non-positive rational");
    let n = q.numer().magnitude();
    let d = q.denom().magnitude();
    let (nl, nh) = ln_natural_scaled(n, w);
    let (dl, dh) = ln_natural_scaled(d, w);
    Interval::new(nl - dh, nh - dl, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{rat, ratio};

    #[test]
    fn ln2_enclosure() {
        let iv = ln_interval(&rat(2), 80);
        let w = iv.width();
        assert!(w <= ratio(1, 1 << 20));
        let approx = iv.midpoint_f64();
        assert!((approx - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn ln_of_ratio() {
        for (n, d) in [(9i64, 2i64), (1, 18), (7, 3), (1000, 999), (1, 1)] {
            let iv = ln_interval(&ratio(n, d), 64);
            let exact = (n as f64 / d as f64).ln();
            assert!(iv.lo() <= iv.hi());
            assert!((iv.midpoint_f64() - exact).abs() < 1e-12, "{n}/{d}");
        }
    }

    #[test]
    fn enclosure_is_nested_in_coarser_one() {
        let fine = ln_interval(&rat(97), 120);
        let coarse = ln_interval(&rat(97), 40);
        assert!(coarse.contains(&fine.midpoint()));
    }
}
