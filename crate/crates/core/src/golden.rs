//! Exact arithmetic in the quadratic field Q(sqrt 5).
//!
//! A [`GoldenNum`] is `a + b*sqrt5` with rational `a` and `b`. Both parts are
//! kept reduced with a positive denominator, so the representation is unique
//! and equality is plain component comparison.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::bigfib::{fib_lucas_pair, Integer};

/// Exact rational; always reduced, denominator positive.
pub type Rat = BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero raised to a negative power")]
    ZeroToNegativePower,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct GoldenNum {
    a: Rat,
    b: Rat,
}

impl GoldenNum {
    pub fn new(a: Rat, b: Rat) -> Self {
        GoldenNum { a, b }
    }

    pub fn zero() -> Self {
        GoldenNum::default()
    }

    pub fn one() -> Self {
        GoldenNum::from_int(1)
    }

    pub fn from_int(v: i64) -> Self {
        GoldenNum::from_integer(Integer::from(v))
    }

    pub fn from_integer(v: Integer) -> Self {
        GoldenNum::new(Rat::from_integer(v), Rat::zero())
    }

    pub fn from_rat(v: Rat) -> Self {
        GoldenNum::new(v, Rat::zero())
    }

    /// `num/den` as a rational element.
    pub fn ratio(num: i64, den: i64) -> Self {
        GoldenNum::from_rat(Rat::new(num.into(), den.into()))
    }

    pub fn sqrt5() -> Self {
        GoldenNum::new(Rat::zero(), Rat::one())
    }

    /// The golden ratio `(1 + sqrt5) / 2`.
    pub fn alpha() -> Self {
        let half = Rat::new(1.into(), 2.into());
        GoldenNum::new(half.clone(), half)
    }

    /// `(1 - sqrt5) / 2 = -1/alpha`.
    pub fn beta() -> Self {
        let half = Rat::new(1.into(), 2.into());
        GoldenNum::new(half.clone(), -half)
    }

    pub fn rational_part(&self) -> &Rat {
        &self.a
    }

    pub fn sqrt5_part(&self) -> &Rat {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.b.is_zero() && self.a.is_integer()
    }

    /// The integer value, if this element is one.
    pub fn to_integer(&self) -> Option<Integer> {
        self.is_integer().then(|| self.a.to_integer())
    }

    /// Field norm `a^2 - 5 b^2`.
    pub fn norm(&self) -> Rat {
        &self.a * &self.a - Rat::from_integer(5.into()) * &self.b * &self.b
    }

    pub fn conj(&self) -> Self {
        GoldenNum::new(self.a.clone(), -&self.b)
    }

    pub fn inv(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        if self.b.is_zero() {
            return Ok(GoldenNum::from_rat(self.a.recip()));
        }
        let n = self.norm();
        Ok(GoldenNum::new(&self.a / &n, -&self.b / &n))
    }

    pub fn checked_div(&self, rhs: &GoldenNum) -> Result<Self, FieldError> {
        Ok(self * &rhs.inv()?)
    }

    pub fn pow(&self, m: i64) -> Result<Self, FieldError> {
        if m < 0 {
            if self.is_zero() {
                return Err(FieldError::ZeroToNegativePower);
            }
            return Ok(self.inv()?.pow_unsigned(m.unsigned_abs()));
        }
        Ok(self.pow_unsigned(m as u64))
    }

    pub fn pow_unsigned(&self, mut m: u64) -> Self {
        let mut base = self.clone();
        let mut acc = GoldenNum::one();
        while m > 0 {
            if m & 1 == 1 {
                acc = &acc * &base;
            }
            m >>= 1;
            if m > 0 {
                base = &base * &base;
            }
        }
        acc
    }
}

pub fn gf_mul(x: &GoldenNum, y: &GoldenNum) -> GoldenNum {
    x * y
}

pub fn gf_pow(x: &GoldenNum, m: i64) -> Result<GoldenNum, FieldError> {
    x.pow(m)
}

pub fn gf_inv(x: &GoldenNum) -> Result<GoldenNum, FieldError> {
    x.inv()
}

pub fn gf_conj(x: &GoldenNum) -> GoldenNum {
    x.conj()
}

/// `alpha^j = (L_j + F_j sqrt5) / 2`, read off the Binet formulas.
pub fn alpha_pow(j: i64) -> GoldenNum {
    let (f, l) = fib_lucas_pair(j);
    let two = Integer::from(2);
    GoldenNum::new(Rat::new(l, two.clone()), Rat::new(f, two))
}

/// `beta^j = (L_j - F_j sqrt5) / 2`.
pub fn beta_pow(j: i64) -> GoldenNum {
    alpha_pow(j).conj()
}

pub fn gf_decompose(x: &GoldenNum) -> (Rat, Rat) {
    (x.a.clone(), x.b.clone())
}

impl From<i64> for GoldenNum {
    fn from(v: i64) -> Self {
        GoldenNum::from_int(v)
    }
}

impl From<Integer> for GoldenNum {
    fn from(v: Integer) -> Self {
        GoldenNum::from_integer(v)
    }
}

impl From<Rat> for GoldenNum {
    fn from(v: Rat) -> Self {
        GoldenNum::from_rat(v)
    }
}

impl<'a> Add<&'a GoldenNum> for &'a GoldenNum {
    type Output = GoldenNum;
    fn add(self, rhs: &GoldenNum) -> GoldenNum {
        GoldenNum::new(&self.a + &rhs.a, &self.b + &rhs.b)
    }
}

impl<'a> Sub<&'a GoldenNum> for &'a GoldenNum {
    type Output = GoldenNum;
    fn sub(self, rhs: &GoldenNum) -> GoldenNum {
        GoldenNum::new(&self.a - &rhs.a, &self.b - &rhs.b)
    }
}

impl<'a> Mul<&'a GoldenNum> for &'a GoldenNum {
    type Output = GoldenNum;
    fn mul(self, rhs: &GoldenNum) -> GoldenNum {
        match (self.b.is_zero(), rhs.b.is_zero()) {
            (true, true) => GoldenNum::from_rat(&self.a * &rhs.a),
            (true, false) => GoldenNum::new(&self.a * &rhs.a, &self.a * &rhs.b),
            (false, true) => GoldenNum::new(&self.a * &rhs.a, &self.b * &rhs.a),
            (false, false) => {
                let five = Rat::from_integer(5.into());
                GoldenNum::new(
                    &self.a * &rhs.a + five * &self.b * &rhs.b,
                    &self.a * &rhs.b + &self.b * &rhs.a,
                )
            }
        }
    }
}

impl Neg for &GoldenNum {
    type Output = GoldenNum;
    fn neg(self) -> GoldenNum {
        GoldenNum::new(-&self.a, -&self.b)
    }
}

impl Neg for GoldenNum {
    type Output = GoldenNum;
    fn neg(self) -> GoldenNum {
        GoldenNum::new(-self.a, -self.b)
    }
}

macro_rules! forward_owned {
    ($trait:ident, $method:ident) => {
        impl $trait<GoldenNum> for GoldenNum {
            type Output = GoldenNum;
            fn $method(self, rhs: GoldenNum) -> GoldenNum {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $trait<&'a GoldenNum> for GoldenNum {
            type Output = GoldenNum;
            fn $method(self, rhs: &GoldenNum) -> GoldenNum {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Panics on a zero divisor; use [`GoldenNum::checked_div`] where the
/// divisor is not known to be non-zero.
impl<'a> Div<&'a GoldenNum> for &'a GoldenNum {
    type Output = GoldenNum;
    fn div(self, rhs: &GoldenNum) -> GoldenNum {
        self.checked_div(rhs).expect("division by zero in Q(sqrt5)")
    }
}

impl AddAssign<&GoldenNum> for GoldenNum {
    fn add_assign(&mut self, rhs: &GoldenNum) {
        self.a += &rhs.a;
        self.b += &rhs.b;
    }
}

impl SubAssign<&GoldenNum> for GoldenNum {
    fn sub_assign(&mut self, rhs: &GoldenNum) {
        self.a -= &rhs.a;
        self.b -= &rhs.b;
    }
}

impl MulAssign<&GoldenNum> for GoldenNum {
    fn mul_assign(&mut self, rhs: &GoldenNum) {
        *self = &*self * rhs;
    }
}

/// Canonical rendering: `a`, `c*sqrt5`, or `a + c*sqrt5` with `a`, `c`
/// written as `n` or `n/d`. The output re-parses as a DSL expression.
impl fmt::Display for GoldenNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        let coeff = |c: &Rat| -> String {
            if c.is_one() {
                "sqrt5".to_string()
            } else {
                format!("{c}*sqrt5")
            }
        };
        if self.a.is_zero() {
            if self.b.is_negative() {
                return write!(f, "-{}", coeff(&-&self.b));
            }
            return write!(f, "{}", coeff(&self.b));
        }
        if self.b.is_negative() {
            write!(f, "{} - {}", self.a, coeff(&-&self.b))
        } else {
            write!(f, "{} + {}", self.a, coeff(&self.b))
        }
    }
}
