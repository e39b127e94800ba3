//! Exact scalars: elements of the rationals or of the Gaussian rationals Q(i).
//!
//! Every coefficient in this crate is a `Scalar`. The imaginary part stays
//! zero unless a construction explicitly requires a square root of -1, so
//! rational-only algebras never pay for the extension field.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

/// An element of Q(i), stored as exact real and imaginary rational parts.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    re: BigRational,
    im: BigRational,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    pub fn one() -> Self {
        Scalar {
            re: BigRational::one(),
            im: BigRational::zero(),
        }
    }

    /// The Gaussian unit i with i^2 = -1.
    pub fn gaussian_unit() -> Self {
        Scalar {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Scalar {
            re: BigRational::from_integer(BigInt::from(n)),
            im: BigRational::zero(),
        }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar {
            re: BigRational::new(BigInt::from(num), BigInt::from(den)),
            im: BigRational::zero(),
        }
    }

    pub fn from_parts(re: BigRational, im: BigRational) -> Self {
        Scalar { re, im }
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

    /// Complex conjugate (the nontrivial automorphism of Q(i) over Q).
    pub fn conj(&self) -> Self {
        Scalar {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero scalar");
        let norm = &self.re * &self.re + &self.im * &self.im;
        Scalar {
            re: &self.re / &norm,
            im: -&self.im / &norm,
        }
    }

    /// Sign of the scalar for periodicity pattern comparison: the sign of the
    /// real part, falling back to the imaginary part when the real part is 0.
    pub fn pattern_sign(&self) -> i8 {
        let part = if self.re.is_zero() { &self.im } else { &self.re };
        if part.is_zero() {
            0
        } else if part.is_positive() {
            1
        } else {
            -1
        }
    }

    /// Parse a rational written as `p` or `p/q`.
    pub fn parse_rational(text: &str) -> Result<BigRational, String> {
        let text = text.trim();
        let (num, den) = match text.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (text, "1"),
        };
        let num: BigInt = num.parse().map_err(|_| format!("bad numerator {num:?}"))?;
        let den: BigInt = den.parse().map_err(|_| format!("bad denominator {den:?}"))?;
        if den.is_zero() {
            return Err("zero denominator".into());
        }
        Ok(BigRational::new(num, den))
    }

    /// Parse `p/q`, optionally with an imaginary part `p/q+r/s*i` or `r/s*i`.
    pub fn parse(text: &str) -> Result<Scalar, String> {
        let text = text.trim();
        if let Some(stripped) = text.strip_suffix("*i").or_else(|| text.strip_suffix("i")) {
            // Either a pure imaginary value or re+im*i with a final i marker.
            if let Some(pos) = stripped.rfind(['+', '-']).filter(|&p| p > 0) {
                let (re, im) = stripped.split_at(pos);
                let re = Self::parse_rational(re)?;
                let im = Self::parse_rational(im)?;
                return Ok(Scalar { re, im });
            }
            let im = if stripped.is_empty() || stripped == "+" {
                BigRational::one()
            } else if stripped == "-" {
                -BigRational::one()
            } else {
                Self::parse_rational(stripped)?
            };
            return Ok(Scalar {
                re: BigRational::zero(),
                im,
            });
        }
        Ok(Scalar {
            re: Self::parse_rational(text)?,
            im: BigRational::zero(),
        })
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}*i", self.im)
        } else if self.im.is_positive() {
            write!(f, "{}+{}*i", self.re, self.im)
        } else {
            write!(f, "{}{}*i", self.re, self.im)
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        Scalar::parse(&text).map_err(serde::de::Error::custom)
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        Scalar {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        Scalar {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        Scalar {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($trait:ident, $method:ident) => {
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = (&*self) * rhs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_unit_squares_to_minus_one() {
        let i = Scalar::gaussian_unit();
        assert_eq!(&i * &i, Scalar::from_int(-1));
    }

    #[test]
    fn inverse_roundtrip() {
        let q = Scalar::from_parts(
            BigRational::new(BigInt::from(3), BigInt::from(7)),
            BigRational::new(BigInt::from(-2), BigInt::from(5)),
        );
        assert!((&q * &q.inv()).is_one());
    }

    #[test]
    fn parse_display_roundtrip() {
        for text in ["0", "-3/4", "2", "1/2+3/5*i", "-1*i", "5/3*i"] {
            let s = Scalar::parse(text).unwrap();
            let again = Scalar::parse(&s.to_string()).unwrap();
            assert_eq!(s, again, "{text}");
        }
    }

    #[test]
    fn pattern_sign_cases() {
        assert_eq!(Scalar::zero().pattern_sign(), 0);
        assert_eq!(Scalar::from_int(-2).pattern_sign(), -1);
        assert_eq!(Scalar::gaussian_unit().pattern_sign(), 1);
    }
}
