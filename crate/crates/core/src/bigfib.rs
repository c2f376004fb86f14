//! Arbitrary-precision Fibonacci, Lucas and binomial numbers.
//!
//! Indices may be negative. The sign laws `F(-j) = (-1)^(j-1) F(j)` and
//! `L(-j) = (-1)^j L(j)` are applied here and nowhere else, so callers can
//! pass whatever index an identity produces.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

/// Arbitrary-precision signed integer. `BigInt` has no negative zero.
pub type Integer = BigInt;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BigFibError {
    #[error("binomial coefficient with negative upper index {0}")]
    NegativeUpper(i64),
}

/// `(F_m, F_{m+1})` for `m >= 0` by fast doubling, walking the bits of `m`
/// from the top.
fn doubling(m: u64) -> (Integer, Integer) {
    let mut a = Integer::zero(); // F_k
    let mut b = Integer::one(); // F_{k+1}
    if m == 0 {
        return (a, b);
    }
    let bits = 64 - m.leading_zeros();
    for i in (0..bits).rev() {
        // F_{2k} = F_k (2 F_{k+1} - F_k), F_{2k+1} = F_k^2 + F_{k+1}^2
        let two_b_minus_a = (&b << 1u32) - &a;
        let c = &a * &two_b_minus_a;
        let d = &a * &a + &b * &b;
        if (m >> i) & 1 == 0 {
            a = c;
            b = d;
        } else {
            b = &c + &d;
            a = d;
        }
    }
    (a, b)
}

/// Fibonacci number `F_j` for any integer `j`.
pub fn fib(j: i64) -> Integer {
    let (f, _) = doubling(j.unsigned_abs());
    if j < 0 && j % 2 == 0 {
        -f
    } else {
        f
    }
}

/// Lucas number `L_j` for any integer `j`.
pub fn lucas(j: i64) -> Integer {
    fib_lucas_pair(j).1
}

/// `(F_j, L_j)` from one fast-doubling pass.
pub fn fib_lucas_pair(j: i64) -> (Integer, Integer) {
    let (f, f_next) = doubling(j.unsigned_abs());
    // L_m = 2 F_{m+1} - F_m
    let l = (f_next << 1u32) - &f;
    if j >= 0 {
        return (f, l);
    }
    if j % 2 == 0 {
        (-f, l)
    } else {
        (f, -l)
    }
}

/// `F_n` by the plain linear recurrence. Kept as the slow strategy for the
/// benchmark harness.
pub fn fib_iterative(n: u64) -> Integer {
    let mut a = Integer::zero();
    let mut b = Integer::one();
    for _ in 0..n {
        let next = &a + &b;
        a = std::mem::replace(&mut b, next);
    }
    a
}

/// Binomial coefficient `C(n, k)`; zero when `k < 0` or `k > n`.
pub fn binom(n: i64, k: i64) -> Result<Integer, BigFibError> {
    if n < 0 {
        return Err(BigFibError::NegativeUpper(n));
    }
    if k < 0 || k > n {
        return Ok(Integer::zero());
    }
    let k = k.min(n - k);
    let mut acc = Integer::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    Ok(acc)
}

/// Walks along one row of Pascal's triangle, so that the consecutive
/// `C(n, k)` requested by a summation cost one small multiply and divide
/// each instead of a fresh product.
#[derive(Debug, Clone, Default)]
pub struct BinomialCursor {
    state: Option<(i64, i64, Integer)>,
}

/// Largest step the cursor will take before recomputing from scratch.
const CURSOR_REACH: i64 = 64;

impl BinomialCursor {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&mut self, n: i64, k: i64) -> Result<Integer, BigFibError> {
        if n < 0 {
            return Err(BigFibError::NegativeUpper(n));
        }
        if k < 0 || k > n {
            return Ok(Integer::zero());
        }
        if let Some((cn, ck, value)) = &mut self.state {
            if *cn == n && (k - *ck).abs() <= CURSOR_REACH {
                while *ck < k {
                    *value *= n - *ck;
                    *ck += 1;
                    *value /= *ck;
                }
                while *ck > k {
                    *value *= *ck;
                    *ck -= 1;
                    *value /= n - *ck;
                }
                return Ok(value.clone());
            }
        }
        let value = binom(n, k)?;
        self.state = Some((n, k, value.clone()));
        Ok(value)
    }
}

/// Walks `(F_j, L_j)` along the index line with
/// `F_{j+1} = (F_j + L_j)/2` and `L_{j+1} = (5F_j + L_j)/2`, so nearby
/// indices cost a few additions instead of a fresh fast-doubling run.
#[derive(Debug, Clone, Default)]
pub struct SequenceCursor {
    state: Option<(i64, Integer, Integer)>,
}

impl SequenceCursor {
    pub fn new() -> Self {
        Self::default()
    }

    /// Distance from the cursor to `j`, if it has a position.
    pub fn distance(&self, j: i64) -> Option<u64> {
        self.state.as_ref().map(|(at, ..)| at.abs_diff(j))
    }

    /// `(F_j, L_j)`.
    pub fn get(&mut self, j: i64) -> (Integer, Integer) {
        match &mut self.state {
            Some((at, f, l)) if (j - *at).abs() <= CURSOR_REACH => {
                while *at < j {
                    let next_f = (&*f + &*l) >> 1u32;
                    *l = (&*f * 5u32 + &*l) >> 1u32;
                    *f = next_f;
                    *at += 1;
                }
                while *at > j {
                    let prev_f = (&*l - &*f) >> 1u32;
                    *l = (&*f * 5u32 - &*l) >> 1u32;
                    *f = prev_f;
                    *at -= 1;
                }
                (f.clone(), l.clone())
            }
            _ => {
                let (f, l) = fib_lucas_pair(j);
                self.state = Some((j, f.clone(), l.clone()));
                (f, l)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(v: i64) -> Integer {
        Integer::from(v)
    }

    #[test]
    fn small_values() {
        assert_eq!(fib(0), int(0));
        assert_eq!(fib(1), int(1));
        assert_eq!(fib(10), int(55));
        assert_eq!(fib(-4), int(-3));
        assert_eq!(fib(-5), int(5));
        assert_eq!(lucas(0), int(2));
        assert_eq!(lucas(7), int(29));
        assert_eq!(lucas(-3), int(-4));
        assert_eq!(lucas(-4), int(7));
    }

    #[test]
    fn sequence_cursor_walks_both_ways() {
        let mut c = SequenceCursor::new();
        assert_eq!(c.distance(3), None);
        for j in [500, 503, 501, 400, 470, -30, -31, -1, 2, 90] {
            assert_eq!(c.get(j), fib_lucas_pair(j), "j={j}");
        }
        assert_eq!(c.distance(80), Some(10));
    }

    #[test]
    fn pair_matches_components() {
        assert_eq!(fib_lucas_pair(0), (int(0), int(2)));
        assert_eq!(fib_lucas_pair(10), (int(55), int(123)));
        assert_eq!(fib_lucas_pair(-5), (int(5), int(-11)));
    }

    #[test]
    fn binomials() {
        assert_eq!(binom(4, 2).unwrap(), int(6));
        assert_eq!(binom(7, 0).unwrap(), int(1));
        assert_eq!(binom(3, 5).unwrap(), int(0));
        assert_eq!(binom(3, -1).unwrap(), int(0));
        assert_eq!(binom(0, 0).unwrap(), int(1));
        assert_eq!(binom(-1, 0), Err(BigFibError::NegativeUpper(-1)));
    }

    #[test]
    fn cursor_agrees_with_direct() {
        let mut cursor = BinomialCursor::new();
        for n in [0i64, 1, 5, 40, 200] {
            for k in (-2..=n + 2).chain((0..=n).rev()).step_by(3) {
                assert_eq!(cursor.get(n, k).unwrap(), binom(n, k).unwrap(), "C({n},{k})");
            }
        }
        assert!(cursor.get(-3, 1).is_err());
    }

    #[test]
    fn iterative_agrees() {
        for n in 0..100u64 {
            assert_eq!(fib_iterative(n), fib(n as i64));
        }
    }
}
