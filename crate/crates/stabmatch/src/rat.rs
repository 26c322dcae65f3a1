//! Exact rational arithmetic.
//!
//! All region membership tests and decompositions are decided with exact
//! arithmetic (the regions are open sets, so tolerances would misclassify
//! boundary measures). `Rat` keeps values in a reduced `i64/i64`
//! representation while they fit and transparently promotes to
//! [`BigRational`] when they do not, so the hot enumeration/simplex paths
//! stay allocation-free.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num::bigint::BigInt;
use num::integer::gcd;
use num::rational::BigRational;
use num::{Signed, ToPrimitive, Zero};

#[derive(Clone, PartialEq, Eq)]
pub struct Rat(Repr);

/// Canonical invariant: `Small` is always reduced with a positive
/// denominator; `Big` is used only when numerator or denominator does not
/// fit in `i64`. Equality can therefore be derived structurally.
#[derive(Clone, PartialEq, Eq)]
enum Repr {
    Small(i64, i64),
    Big(Box<BigRational>),
}

impl Rat {
    pub fn zero() -> Rat {
        Rat(Repr::Small(0, 1))
    }

    pub fn one() -> Rat {
        Rat(Repr::Small(1, 1))
    }

    pub fn from_int(n: i64) -> Rat {
        Rat(Repr::Small(n, 1))
    }

    /// `n/d` reduced. Panics on `d == 0`.
    pub fn new(n: i64, d: i64) -> Rat {
        Rat::from_i128(n as i128, d as i128)
    }

    fn from_i128(mut n: i128, mut d: i128) -> Rat {
        assert!(d != 0, "rational with zero denominator");
        if d < 0 {
            n = -n;
            d = -d;
        }
        let g = gcd(n.unsigned_abs(), d as u128);
        if g > 1 {
            n /= g as i128;
            d /= g as i128;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(sn), Ok(sd)) => Rat(Repr::Small(sn, sd)),
            _ => Rat(Repr::Big(Box::new(BigRational::new(
                BigInt::from(n),
                BigInt::from(d),
            )))),
        }
    }

    pub fn from_big(b: BigRational) -> Rat {
        match (b.numer().to_i64(), b.denom().to_i64()) {
            (Some(n), Some(d)) => Rat(Repr::Small(n, d)),
            _ => Rat(Repr::Big(Box::new(b))),
        }
    }

    pub fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(b) => (**b).clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }

    pub fn is_positive(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n > 0,
            Repr::Big(b) => b.is_positive(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n < 0,
            Repr::Big(b) => b.is_negative(),
        }
    }

    pub fn abs(&self) -> Rat {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Rat {
        assert!(!self.is_zero(), "reciprocal of zero");
        match &self.0 {
            Repr::Small(n, d) => Rat::from_i128(*d as i128, *n as i128),
            Repr::Big(b) => Rat::from_big(b.recip()),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(n, d) => *n as f64 / *d as f64,
            Repr::Big(b) => b.to_f64().unwrap_or(f64::NAN),
        }
    }

    /// Parses an integer, a `p/q` rational or a plain decimal such as
    /// `0.25`; the result is exact.
    pub fn parse(s: &str) -> Result<Rat, String> {
        let s = s.trim();
        if s.is_empty() {
            return Err("empty number".to_string());
        }
        if let Some((p, q)) = s.split_once('/') {
            let num = BigInt::from_str(p.trim()).map_err(|_| format!("bad numerator in {s:?}"))?;
            let den =
                BigInt::from_str(q.trim()).map_err(|_| format!("bad denominator in {s:?}"))?;
            if den.is_zero() {
                return Err(format!("zero denominator in {s:?}"));
            }
            return Ok(Rat::from_big(BigRational::new(num, den)));
        }
        if let Some((int_part, frac_part)) = s.split_once('.') {
            let (sign, int_digits) = match int_part.strip_prefix('-') {
                Some(rest) => (-1, rest),
                None => (1, int_part.strip_prefix('+').unwrap_or(int_part)),
            };
            if !int_digits.chars().all(|c| c.is_ascii_digit())
                || frac_part.is_empty()
                || !frac_part.chars().all(|c| c.is_ascii_digit())
            {
                return Err(format!("bad decimal {s:?}"));
            }
            let digits = format!("{int_digits}{frac_part}");
            let num = BigInt::from_str(&digits).map_err(|_| format!("bad decimal {s:?}"))?;
            let den = BigInt::from(10u32).pow(frac_part.len() as u32);
            return Ok(Rat::from_big(BigRational::new(BigInt::from(sign) * num, den)));
        }
        let n = BigInt::from_str(s).map_err(|_| format!("bad number {s:?}"))?;
        Ok(Rat::from_big(BigRational::from(n)))
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(b) => write!(f, "{b}"),
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Rat) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rat {
    fn cmp(&self, other: &Rat) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(an, ad), Repr::Small(bn, bd)) => {
                let lhs = *an as i128 * *bd as i128;
                let rhs = *bn as i128 * *ad as i128;
                lhs.cmp(&rhs)
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl Default for Rat {
    fn default() -> Rat {
        Rat::zero()
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Rat {
        Rat::from_int(n)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, |$an:ident, $ad:ident, $bn:ident, $bd:ident| $small:expr, $big:ident) => {
        impl $trait<&Rat> for &Rat {
            type Output = Rat;
            fn $method(self, other: &Rat) -> Rat {
                match (&self.0, &other.0) {
                    (Repr::Small($an, $ad), Repr::Small($bn, $bd)) => {
                        let ($an, $ad, $bn, $bd) =
                            (*$an as i128, *$ad as i128, *$bn as i128, *$bd as i128);
                        $small
                    }
                    _ => Rat::from_big(self.to_big().$big(other.to_big())),
                }
            }
        }
        impl $trait<Rat> for Rat {
            type Output = Rat;
            fn $method(self, other: Rat) -> Rat {
                (&self).$method(&other)
            }
        }
        impl $trait<&Rat> for Rat {
            type Output = Rat;
            fn $method(self, other: &Rat) -> Rat {
                (&self).$method(other)
            }
        }
        impl $trait<Rat> for &Rat {
            type Output = Rat;
            fn $method(self, other: Rat) -> Rat {
                self.$method(&other)
            }
        }
    };
}

binop!(Add, add, |an, ad, bn, bd| Rat::from_i128(an * bd + bn * ad, ad * bd), add);
binop!(Sub, sub, |an, ad, bn, bd| Rat::from_i128(an * bd - bn * ad, ad * bd), sub);
binop!(Mul, mul, |an, ad, bn, bd| Rat::from_i128(an * bn, ad * bd), mul);
binop!(Div, div, |an, ad, bn, bd| {
    assert!(bn != 0, "division by zero");
    Rat::from_i128(an * bd, ad * bn)
}, div);

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        match &self.0 {
            Repr::Small(n, d) => Rat::from_i128(-(*n as i128), *d as i128),
            Repr::Big(b) => Rat::from_big(-(**b).clone()),
        }
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        -&self
    }
}

impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, other: &Rat) {
        *self = &*self + other;
    }
}

impl SubAssign<&Rat> for Rat {
    fn sub_assign(&mut self, other: &Rat) {
        *self = &*self - other;
    }
}

impl Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rat> for Rat {
    fn sum<I: Iterator<Item = &'a Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |acc, x| acc + x)
    }
}
