//! Exact Gaussian-rational scalars.
//!
//! All module constructions in this crate are defined over the complex
//! numbers, but every identity in scope is polynomial in the sampled
//! parameters, so computing over `Q(i)` gives exact, decidable checks.
//! No floating point appears anywhere in the crate.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A number `re + im*i` with exact rational parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    re: BigRational,
    im: BigRational,
}

impl Scalar {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Scalar { re, im }
    }

    pub fn zero() -> Self {
        Scalar::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::from_int(1)
    }

    pub fn i() -> Self {
        Scalar::new(BigRational::zero(), BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Scalar::new(BigRational::from_integer(n), BigRational::zero())
    }

    /// Exact rational `num/den`. Panics if `den == 0`.
    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            BigRational::zero(),
        )
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Multiplicative inverse; error on zero.
    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::invalid("division by zero scalar"));
        }
        let norm = &self.re * &self.re + &self.im * &self.im;
        Ok(Scalar::new(&self.re / &norm, -(&self.im / &norm)))
    }

    /// Exact integer power; negative exponents require an invertible base.
    pub fn powi(&self, n: i64) -> Result<Scalar> {
        if n < 0 {
            return self.inv()?.powi(-n);
        }
        let mut acc = Scalar::one();
        let mut base = self.clone();
        let mut k = n as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        Ok(acc)
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        Scalar::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        Scalar::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        Scalar::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Div for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        self * &rhs.inv().expect("division by zero scalar")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::new(-self.re.clone(), -self.im.clone())
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self = &*self - rhs;
    }
}

// Lexicographic by (re, im). Only used to keep containers canonical; it is
// not a field order.
impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        self.re.cmp(&other.re).then_with(|| self.im.cmp(&other.im))
    }
}

fn rat_str(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", rat_str(&self.re));
        }
        if self.re.is_zero() {
            return write!(f, "{}*i", rat_str(&self.im));
        }
        if self.im.is_negative() {
            write!(f, "{}-{}*i", rat_str(&self.re), rat_str(&-self.im.clone()))
        } else {
            write!(f, "{}+{}*i", rat_str(&self.re), rat_str(&self.im))
        }
    }
}

fn parse_big_rational(s: &str, pos: usize) -> Result<BigRational> {
    let err = |found: &str| Error::Parse {
        pos,
        expected: "rational a/b".into(),
        found: found.into(),
    };
    let mut parts = s.splitn(2, '/');
    let numer = parts.next().ok_or_else(|| err(s))?;
    let numer: BigInt = numer.parse().map_err(|_| err(s))?;
    match parts.next() {
        None => Ok(BigRational::from_integer(numer)),
        Some(d) => {
            let denom: BigInt = d.parse().map_err(|_| err(s))?;
            if denom.is_zero() {
                return Err(Error::invalid("zero denominator"));
            }
            Ok(BigRational::new(numer, denom))
        }
    }
}

impl FromStr for Scalar {
    type Err = Error;

    /// Parses the exact-string forms `a/b`, `a/b+c/d*i`, `c/d*i`, `i`, `-i`.
    /// Whitespace is insignificant. Unicode minus is accepted.
    fn from_str(s: &str) -> Result<Scalar> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let s = s.replace('\u{2212}', "-");
        if s.is_empty() {
            return Err(Error::Parse {
                pos: 0,
                expected: "scalar".into(),
                found: "end of input".into(),
            });
        }
        // Split at the '+' or '-' that separates real and imaginary parts
        // (skipping a leading sign).
        let bytes = s.as_bytes();
        let mut split = None;
        for (idx, &b) in bytes.iter().enumerate().skip(1) {
            if b == b'+' || b == b'-' {
                split = Some(idx);
                break;
            }
        }
        let parse_part = |part: &str, pos: usize| -> Result<(BigRational, bool)> {
            // Returns (value, is_imaginary).
            if part == "i" {
                return Ok((BigRational::one(), true));
            }
            if part == "-i" {
                return Ok((-BigRational::one(), true));
            }
            if let Some(stripped) = part.strip_suffix("*i") {
                Ok((parse_big_rational(stripped, pos)?, true))
            } else if let Some(stripped) = part.strip_suffix('i') {
                Ok((parse_big_rational(stripped, pos)?, true))
            } else {
                Ok((parse_big_rational(part, pos)?, false))
            }
        };
        match split {
            None => {
                let (v, imag) = parse_part(&s, 0)?;
                Ok(if imag {
                    Scalar::new(BigRational::zero(), v)
                } else {
                    Scalar::new(v, BigRational::zero())
                })
            }
            Some(idx) => {
                let (first, first_im) = parse_part(&s[..idx], 0)?;
                let second_src = if bytes[idx] == b'+' { &s[idx + 1..] } else { &s[idx..] };
                let (second, second_im) = parse_part(second_src, idx)?;
                if first_im == second_im {
                    return Err(Error::Parse {
                        pos: idx,
                        expected: "one real and one imaginary part".into(),
                        found: s.clone(),
                    });
                }
                Ok(if first_im {
                    Scalar::new(second, first)
                } else {
                    Scalar::new(first, second)
                })
            }
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sc(s: &str) -> Scalar {
        s.parse().unwrap()
    }

    #[test]
    fn arithmetic_is_exact() {
        let a = Scalar::from_ratio(1, 3);
        let b = Scalar::from_ratio(1, 6);
        assert_eq!(&a + &b, Scalar::from_ratio(1, 2));
        assert_eq!(&a - &b, b);
        assert_eq!(&a * &Scalar::from_int(3), Scalar::one());
    }

    #[test]
    fn complex_multiplication() {
        let z = sc("1+1*i");
        assert_eq!(&z * &z, sc("2*i"));
        assert_eq!(&z * &z.inv().unwrap(), Scalar::one());
    }

    #[test]
    fn powers_including_negative() {
        let two = Scalar::from_int(2);
        assert_eq!(two.powi(10).unwrap(), Scalar::from_int(1024));
        assert_eq!(two.powi(-2).unwrap(), Scalar::from_ratio(1, 4));
        assert!(Scalar::zero().powi(-1).is_err());
    }

    #[test]
    fn display_roundtrip() {
        for s in ["4", "-3/2", "1/4*i", "-3/2+1/4*i", "1-2*i", "0"] {
            let v = sc(s);
            assert_eq!(v.to_string(), s);
            assert_eq!(sc(&v.to_string()), v);
        }
        assert_eq!(sc("i"), Scalar::i());
        assert_eq!(sc("- 1/2"), Scalar::from_ratio(-1, 2));
    }
}
