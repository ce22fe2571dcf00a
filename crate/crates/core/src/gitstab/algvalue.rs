use std::cmp::Ordering;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::exactnum::{format_rational, serde_rational, to_f64, Rational};

/// A real number `sign · √square` with rational `square`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AlgValue {
    sign: i8,
    #[serde(with = "serde_rational")]
    square: Rational,
}

impl AlgValue {
    pub fn zero() -> Self {
        AlgValue {
            sign: 0,
            square: Rational::zero(),
        }
    }

    pub fn new(sign: i8, square: Rational) -> Self {
        assert!(!square.is_negative(), "square must be nonnegative");
        if square.is_zero() || sign == 0 {
            return AlgValue::zero();
        }
        AlgValue {
            sign: sign.signum(),
            square,
        }
    }

    pub fn from_rational(q: &Rational) -> Self {
        AlgValue::new(sign_of(q), q * q)
    }

    /// `√q` for `q >= 0`.
    pub fn sqrt(q: &Rational) -> Self {
        AlgValue::new(1, q.clone())
    }

    /// `num / √den_square` for `den_square > 0`.
    pub fn ratio(num: &Rational, den_square: &Rational) -> Self {
        assert!(den_square.is_positive());
        AlgValue::new(sign_of(num), num * num / den_square)
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn square(&self) -> &Rational {
        &self.square
    }

    pub fn is_negative(&self) -> bool {
        self.sign < 0
    }

    pub fn mul(&self, other: &AlgValue) -> AlgValue {
        AlgValue::new(self.sign * other.sign, &self.square * &other.square)
    }

    pub fn neg(&self) -> AlgValue {
        AlgValue::new(-self.sign, self.square.clone())
    }

    /// The value itself when it is rational.
    pub fn as_rational(&self) -> Option<Rational> {
        let n = self.square.numer();
        let d = self.square.denom();
        let (rn, rd) = (n.sqrt(), d.sqrt());
        if &(&rn * &rn) == n && &(&rd * &rd) == d {
            let v = Rational::new(rn, rd);
            Some(if self.sign < 0 { -v } else { v })
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.sign as f64 * to_f64(&self.square).sqrt()
    }
}

fn sign_of(q: &Rational) -> i8 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

impl PartialOrd for AlgValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for AlgValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => match self.sign {
                1 => self.square.cmp(&other.square),
                -1 => other.square.cmp(&self.square),
                _ => Ordering::Equal,
            },
            o => o,
        }
    }
}

impl fmt::Display for AlgValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = self.as_rational() {
            return f.write_str(&format_rational(&q));
        }
        let s = if self.sign < 0 { "-" } else { "" };
        write!(f, "{s}sqrt({})", format_rational(&self.square))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{rat, ratio};

    #[test]
    fn ordering_and_display() {
        let a = AlgValue::ratio(&rat(-2), &rat(2)); // -√2
        let b = AlgValue::from_rational(&rat(-1));
        assert!(a < b);
        assert!(b < AlgValue::zero());
        assert!(AlgValue::sqrt(&rat(2)) > AlgValue::from_rational(&ratio(7, 5)));
        assert_eq!(a.to_string(), "-sqrt(2)");
        assert_eq!(b.to_string(), "-1");
        assert_eq!(AlgValue::sqrt(&ratio(9, 4)).as_rational(), Some(ratio(3, 2)));
        assert_eq!(a.mul(&a), AlgValue::from_rational(&rat(2)));
    }
}
