//! The Gaussian extension Q(sqrt5)(i).
//!
//! Every `modulus * cos(m * arctan(y/x))` factor is the real part of
//! `(x + iy)^m` when `x > 0`, and the matching `sin` factor is the imaginary
//! part. Computing the power exactly keeps trigonometric closed forms inside
//! the field.

use std::ops::{Add, Mul, Sub};

use crate::golden::GoldenNum;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GaussGolden {
    pub re: GoldenNum,
    pub im: GoldenNum,
}

impl GaussGolden {
    pub fn new(re: GoldenNum, im: GoldenNum) -> Self {
        GaussGolden { re, im }
    }

    pub fn one() -> Self {
        GaussGolden::new(GoldenNum::one(), GoldenNum::zero())
    }

    /// `re^2 + im^2`.
    pub fn norm(&self) -> GoldenNum {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn pow(&self, mut m: u64) -> Self {
        let mut base = self.clone();
        let mut acc = GaussGolden::one();
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

impl<'a> Mul<&'a GaussGolden> for &'a GaussGolden {
    type Output = GaussGolden;
    fn mul(self, rhs: &GaussGolden) -> GaussGolden {
        GaussGolden::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl<'a> Add<&'a GaussGolden> for &'a GaussGolden {
    type Output = GaussGolden;
    fn add(self, rhs: &GaussGolden) -> GaussGolden {
        GaussGolden::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl<'a> Sub<&'a GaussGolden> for &'a GaussGolden {
    type Output = GaussGolden;
    fn sub(self, rhs: &GaussGolden) -> GaussGolden {
        GaussGolden::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

/// `(Re, Im)` of `(x + iy)^m`.
///
/// For `x > 0` these equal `sqrt((x^2+y^2)^m) cos(m arctan(y/x))` and
/// `sqrt((x^2+y^2)^m) sin(m arctan(y/x))`.
pub fn re_im_pow(x: &GoldenNum, y: &GoldenNum, m: u64) -> (GoldenNum, GoldenNum) {
    let p = GaussGolden::new(x.clone(), y.clone()).pow(m);
    (p.re, p.im)
}
