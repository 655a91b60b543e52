//! Exact elements of the field Q(√2).

use alloc::string::{String, ToString};
use core::cmp::Ordering;
use core::fmt;
use core::iter::Sum;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use core::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// `rational + surd * √2` with both coefficients in Q.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Scalar {
    rational: BigRational,
    surd: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseScalarError(pub String);

impl fmt::Display for ParseScalarError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cannot parse scalar {:?}", self.0)
    }
}

impl Scalar {
    pub fn new(rational: BigRational, surd: BigRational) -> Self {
        Scalar { rational, surd }
    }

    pub fn zero() -> Self {
        Scalar::default()
    }

    pub fn one() -> Self {
        Scalar::int(1)
    }

    pub fn int(n: i64) -> Self {
        Scalar::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// `num / den`. Panics on a zero denominator.
    pub fn ratio(num: i64, den: i64) -> Self {
        Scalar::from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_rational(rational: BigRational) -> Self {
        Scalar { rational, surd: BigRational::zero() }
    }

    pub fn sqrt2() -> Self {
        Scalar { rational: BigRational::zero(), surd: BigRational::one() }
    }

    /// `1/√2`.
    pub fn inv_sqrt2() -> Self {
        Scalar { rational: BigRational::zero(), surd: BigRational::new(1.into(), 2.into()) }
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.rational
    }

    pub fn surd_part(&self) -> &BigRational {
        &self.surd
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.surd.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.surd.is_zero()
    }

    pub fn signum(&self) -> Ordering {
        let sa = self.rational.numer().sign_cmp();
        let sb = self.surd.numer().sign_cmp();
        match (sa, sb) {
            (a, Ordering::Equal) => a,
            (Ordering::Equal, b) => b,
            (a, b) if a == b => a,
            (a, b) => {
                let a2 = &self.rational * &self.rational;
                let b2 = &self.surd * &self.surd * BigRational::from_integer(2.into());
                if a2 > b2 {
                    a
                } else {
                    b
                }
            }
        }
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn abs(&self) -> Scalar {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn conjugate(&self) -> Scalar {
        Scalar { rational: self.rational.clone(), surd: -&self.surd }
    }

    /// `a² − 2b²`, the field norm.
    pub fn norm(&self) -> BigRational {
        &self.rational * &self.rational
            - &self.surd * &self.surd * BigRational::from_integer(2.into())
    }

    pub fn recip(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        if self.surd.is_zero() {
            return Some(Scalar::from_rational(self.rational.recip()));
        }
        let n = self.norm();
        Some(Scalar { rational: &self.rational / &n, surd: -&self.surd / &n })
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Option<Scalar> {
        if rhs.surd.is_zero() {
            if rhs.rational.is_zero() {
                return None;
            }
            return Some(Scalar {
                rational: &self.rational / &rhs.rational,
                surd: &self.surd / &rhs.rational,
            });
        }
        rhs.recip().map(|r| self * &r)
    }

    pub fn scale(&self, r: &BigRational) -> Scalar {
        if self.surd.is_zero() {
            return Scalar::from_rational(&self.rational * r);
        }
        Scalar { rational: &self.rational * r, surd: &self.surd * r }
    }

    /// Panics if `r` is zero.
    pub fn div_rational(&self, r: &BigRational) -> Scalar {
        if self.surd.is_zero() {
            return Scalar::from_rational(&self.rational / r);
        }
        Scalar { rational: &self.rational / r, surd: &self.surd / r }
    }

    pub fn to_f64(&self) -> f64 {
        ratio_f64(&self.rational) + ratio_f64(&self.surd) * core::f64::consts::SQRT_2
    }

    pub fn min(self, other: Scalar) -> Scalar {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Scalar) -> Scalar {
        if other > self {
            other
        } else {
            self
        }
    }
}

fn ratio_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => r.to_f64().unwrap_or(f64::NAN),
    }
}

trait SignCmp {
    fn sign_cmp(&self) -> Ordering;
}

impl SignCmp for BigInt {
    fn sign_cmp(&self) -> Ordering {
        if self.is_positive() {
            Ordering::Greater
        } else if self.is_negative() {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.surd == other.surd {
            return self.rational.cmp(&other.rational);
        }
        (self - other).signum()
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.surd.is_zero() {
            return write!(f, "{}", self.rational);
        }
        if self.surd.is_negative() {
            write!(f, "{}-{}*sqrt2", self.rational, -&self.surd)
        } else {
            write!(f, "{}+{}*sqrt2", self.rational, self.surd)
        }
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num).ok()?;
    let den = BigInt::from_str(den).ok()?;
    if den.is_zero() {
        return None;
    }
    Some(BigRational::new(num, den))
}

fn parse_surd(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let coeff = s.strip_suffix("sqrt2")?.trim_end();
    let coeff = coeff.strip_suffix('*').unwrap_or(coeff).trim();
    let coeff = match coeff.strip_prefix('+') {
        Some(rest) if !rest.is_empty() => rest,
        _ => coeff,
    };
    match coeff {
        "" | "+" => Some(BigRational::one()),
        "-" => Some(-BigRational::one()),
        c => parse_rational(c),
    }
}

impl FromStr for Scalar {
    type Err = ParseScalarError;

    /// Accepts `p/q`, `r/s*sqrt2`, `p/q+r/s*sqrt2` and `p/q-r/s*sqrt2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseScalarError(s.to_string());
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if !t.ends_with("sqrt2") {
            return parse_rational(&t).map(Scalar::from_rational).ok_or_else(err);
        }
        // the separator is the last sign that does not itself follow an operator
        let split = t
            .char_indices()
            .rev()
            .find(|&(i, c)| {
                (c == '+' || c == '-')
                    && i > 0
                    && !matches!(t[..i].chars().last(), Some('/' | '+' | '-' | '*'))
            })
            .map(|(i, _)| i);
        match split {
            Some(i) => {
                let a = parse_rational(&t[..i]).ok_or_else(err)?;
                let b = parse_surd(&t[i..]).ok_or_else(err)?;
                Ok(Scalar::new(a, b))
            }
            None => {
                let b = parse_surd(&t).ok_or_else(err)?;
                Ok(Scalar::new(BigRational::zero(), b))
            }
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { rational: -self.rational, surd: -self.surd }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { rational: -&self.rational, surd: -&self.surd }
    }
}

impl Add<&Scalar> for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        Scalar { rational: &self.rational + &rhs.rational, surd: &self.surd + &rhs.surd }
    }
}

impl Sub<&Scalar> for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        Scalar { rational: &self.rational - &rhs.rational, surd: &self.surd - &rhs.surd }
    }
}

impl Mul<&Scalar> for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.surd.is_zero() && rhs.surd.is_zero() {
            return Scalar::from_rational(&self.rational * &rhs.rational);
        }
        let two = BigRational::from_integer(2.into());
        Scalar {
            rational: &self.rational * &rhs.rational + &self.surd * &rhs.surd * two,
            surd: &self.rational * &rhs.surd + &self.surd * &rhs.rational,
        }
    }
}

impl Div<&Scalar> for &Scalar {
    type Output = Scalar;
    /// Panics on division by zero.
    fn div(self, rhs: &Scalar) -> Scalar {
        self.checked_div(rhs).expect("division by zero scalar")
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                self.$m(&rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.rational += &rhs.rational;
        if !rhs.surd.is_zero() {
            self.surd += &rhs.surd;
        }
    }
}

impl AddAssign<Scalar> for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        *self += &rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        self.rational -= &rhs.rational;
        if !rhs.surd.is_zero() {
            self.surd -= &rhs.surd;
        }
    }
}

impl SubAssign<Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: Scalar) {
        *self -= &rhs;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

impl Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |mut acc, x| {
            acc += &x;
            acc
        })
    }
}

impl<'a> Sum<&'a Scalar> for Scalar {
    fn sum<I: Iterator<Item = &'a Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |mut acc, x| {
            acc += x;
            acc
        })
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::from_rational(r)
    }
}
