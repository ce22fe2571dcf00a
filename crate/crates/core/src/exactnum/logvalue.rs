//! Exact reals of the form `sum c_p * log p` with rational `c_p`.
//!
//! Logarithms of distinct primes are linearly independent over the
//! rationals, so the sparse coefficient map is a canonical representation:
//! equality is structural and only strict comparisons need numerics.

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use serde::{de, ser::SerializeMap, Deserialize, Deserializer, Serialize, Serializer};

use super::interval::ln_interval;
use super::{factorize, format_rational, parse_rational, Interval, Rational};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct LogValue {
    terms: BTreeMap<BigUint, Rational>,
}

impl LogValue {
    pub fn zero() -> Self {
        LogValue::default()
    }

    /// `scale * log q` for a positive rational `q`.
    pub fn log_of(q: &Rational, scale: &Rational) -> Result<Self> {
        if !q.is_positive() {
            return Err(Error::invalid(format!(
                "logarithm of non-positive value {}",
                format_rational(q)
            )));
        }
        let mut out = LogValue::zero();
        if scale.is_zero() {
            return Ok(out);
        }
        for (p, e) in factorize(q.numer().magnitude()) {
            out.add_term(p, scale * Rational::from_integer(BigInt::from(e)));
        }
        for (p, e) in factorize(q.denom().magnitude()) {
            out.add_term(p, -scale * Rational::from_integer(BigInt::from(e)));
        }
        Ok(out)
    }

    /// `log q`; panics when `q <= 0`.
    pub fn ln(q: &Rational) -> Self {
        Self::log_of(q, &Rational::one()).expect("log of a positive rational")
    }

    /// Builds a value from `(prime, coefficient)` pairs. The keys must be
    /// primes; this is checked.
    pub fn from_terms(terms: impl IntoIterator<Item = (BigUint, Rational)>) -> Result<Self> {
        let mut out = LogValue::zero();
        for (p, c) in terms {
            let f = factorize(&p);
            if f.len() != 1 || f[0].1 != 1 {
                return Err(Error::invalid(format!("{p} is not a prime")));
            }
            out.add_term(p, c);
        }
        Ok(out)
    }

    fn add_term(&mut self, p: BigUint, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(p) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> &BTreeMap<BigUint, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return LogValue::zero();
        }
        LogValue {
            terms: self.terms.iter().map(|(p, c)| (p.clone(), c * s)).collect(),
        }
    }

    /// Certified enclosure of the value with width at most `2^-bits`.
    pub fn approximate(&self, bits: u32) -> Interval {
        assert!(bits >= 1);
        if self.is_zero() {
            return Interval::point(&BigInt::zero(), bits);
        }
        let weight: f64 = self
            .terms
            .iter()
            .map(|(p, c)| super::to_f64(&c.abs()) * (p.bits() as f64 + 1.0))
            .sum();
        let mut extra = 8 + (weight.max(1.0).log2().ceil() as u32) + 2 * (bits.max(2).ilog2());
        loop {
            let w = bits + extra;
            let mut lo = BigInt::zero();
            let mut hi = BigInt::zero();
            for (p, c) in &self.terms {
                let iv = ln_interval(&Rational::from_integer(BigInt::from(p.clone())), w);
                let (l, h) = (iv.lo(), iv.hi());
                let (a, b) = if c.is_positive() { (c * l, c * h) } else { (c * h, c * l) };
                let unit = Rational::from_integer(BigInt::one() << w);
                lo += (a * &unit).floor().to_integer();
                hi += (b * &unit).ceil().to_integer();
            }
            let iv = Interval::new(lo, hi, w);
            if iv.width() * Rational::from_integer(BigInt::one() << bits) <= Rational::one() {
                return iv;
            }
            extra += 8;
        }
    }

    /// Sign by interval refinement at doubling precision.
    pub fn signum(&self) -> Ordering {
        if self.is_zero() {
            return Ordering::Equal;
        }
        let mut bits = 32;
        loop {
            if let Some(s) = self.approximate(bits).sign() {
                if s != Ordering::Equal {
                    return s;
                }
            }
            bits *= 2;
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.approximate(53).midpoint_f64()
    }

    /// Decimal rendering at roughly `bits` bits of certified accuracy.
    pub fn decimal(&self, bits: u32) -> String {
        let digits = ((bits as f64) * std::f64::consts::LOG10_2).ceil() as usize;
        format!("{:.*}", digits.min(17), self.approximate(bits).midpoint_f64())
    }
}

/// Three-way comparison of exact values.
pub fn compare(a: &LogValue, b: &LogValue) -> Ordering {
    if a == b {
        return Ordering::Equal;
    }
    (a - b).signum()
}

impl PartialOrd for LogValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LogValue {
    fn cmp(&self, other: &Self) -> Ordering {
        compare(self, other)
    }
}

impl Add<&LogValue> for &LogValue {
    type Output = LogValue;
    fn add(self, rhs: &LogValue) -> LogValue {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for LogValue {
    type Output = LogValue;
    fn add(self, rhs: LogValue) -> LogValue {
        &self + &rhs
    }
}

impl AddAssign<&LogValue> for LogValue {
    fn add_assign(&mut self, rhs: &LogValue) {
        for (p, c) in &rhs.terms {
            self.add_term(p.clone(), c.clone());
        }
    }
}

impl Sub<&LogValue> for &LogValue {
    type Output = LogValue;
    fn sub(self, rhs: &LogValue) -> LogValue {
        self + &(-rhs)
    }
}

impl Sub for LogValue {
    type Output = LogValue;
    fn sub(self, rhs: LogValue) -> LogValue {
        &self - &rhs
    }
}

impl Neg for &LogValue {
    type Output = LogValue;
    fn neg(self) -> LogValue {
        LogValue {
            terms: self.terms.iter().map(|(p, c)| (p.clone(), -c)).collect(),
        }
    }
}

impl Neg for LogValue {
    type Output = LogValue;
    fn neg(self) -> LogValue {
        -&self
    }
}

impl std::iter::Sum for LogValue {
    fn sum<I: Iterator<Item = LogValue>>(iter: I) -> LogValue {
        iter.fold(LogValue::zero(), |acc, x| acc + x)
    }
}

impl<'a> std::iter::Sum<&'a LogValue> for LogValue {
    fn sum<I: Iterator<Item = &'a LogValue>>(iter: I) -> LogValue {
        iter.fold(LogValue::zero(), |mut acc, x| {
            acc += x;
            acc
        })
    }
}

impl fmt::Display for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (p, c) in &self.terms {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            if mag.is_one() {
                write!(f, "log {p}")?;
            } else {
                write!(f, "{}*log {p}", format_rational(&mag))?;
            }
        }
        Ok(())
    }
}

impl Serialize for LogValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.terms.len()))?;
        for (p, c) in &self.terms {
            map.serialize_entry(&p.to_string(), &format_rational(c))?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for LogValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw: BTreeMap<String, String> = BTreeMap::deserialize(d)?;
        let mut terms = Vec::with_capacity(raw.len());
        for (k, v) in raw {
            let p: BigUint = k
                .parse()
                .map_err(|_| de::Error::custom(format!("prime key {k:?} is not an integer")))?;
            let c = parse_rational(&v).map_err(de::Error::custom)?;
            terms.push((p, c));
        }
        LogValue::from_terms(terms).map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{rat, ratio};

    fn p(n: u32) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn constructors() {
        assert!(LogValue::log_of(&rat(1), &ratio(5, 7)).unwrap().is_zero());
        let v = LogValue::log_of(&rat(4), &ratio(-1, 2)).unwrap();
        assert_eq!(v.terms().get(&p(2)), Some(&rat(-1)));
        let v = LogValue::log_of(&ratio(9, 2), &rat(1)).unwrap();
        assert_eq!(v.terms().get(&p(3)), Some(&rat(2)));
        assert_eq!(v.terms().get(&p(2)), Some(&rat(-1)));
        assert!(LogValue::log_of(&rat(0), &rat(1)).is_err());
        assert!(LogValue::log_of(&rat(-3), &rat(1)).is_err());
    }

    #[test]
    fn comparisons() {
        let l2 = LogValue::ln(&rat(2));
        let l3 = LogValue::ln(&rat(3));
        assert_eq!(compare(&l2, &l2), Ordering::Equal);
        assert_eq!(compare(&l2.scale(&ratio(1, 2)), &l2), Ordering::Less);
        // 2^3 < 3^2
        assert_eq!(compare(&l2.scale(&rat(3)), &l3.scale(&rat(2))), Ordering::Less);
        // log 8 vs log 8 written differently
        assert_eq!(LogValue::ln(&rat(8)), l2.scale(&rat(3)));
    }

    #[test]
    fn approximations() {
        let z = LogValue::zero().approximate(10);
        assert_eq!(z.lo(), rat(0));
        assert_eq!(z.hi(), rat(0));
        let iv = LogValue::ln(&rat(2)).approximate(20);
        assert!(iv.width() <= ratio(1, 1 << 20));
        assert!((iv.midpoint_f64() - std::f64::consts::LN_2).abs() < 1e-5);
        let iv = (-LogValue::ln(&rat(18))).approximate(10);
        assert!(iv.width() <= ratio(1, 1 << 10));
        assert!((iv.midpoint_f64() + 2.8903).abs() < 1e-3);
    }

    #[test]
    fn cancellation_and_display() {
        let a = LogValue::ln(&ratio(12, 5));
        let b = LogValue::ln(&rat(7));
        assert_eq!(&(&a + &b) - &b, a);
        assert!((&a - &a).is_zero());
        assert_eq!(a.scale(&rat(0)), LogValue::zero());
        assert_eq!(format!("{}", LogValue::ln(&ratio(9, 2))), "-log 2 + 2*log 3");
    }

    #[test]
    fn json_round_trip() {
        let v = LogValue::ln(&ratio(9, 2)).scale(&ratio(1, 3));
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"{"2":"-1/3","3":"2/3"}"#);
        let back: LogValue = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
        assert!(serde_json::from_str::<LogValue>(r#"{"4":"1"}"#).is_err());
    }
}
