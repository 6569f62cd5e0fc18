//! p-adic valuations, exact binomial coefficients and the divisibility
//! bounds used to control exponents of commutators of prime powers.
//!
//! Everything here is exact integer arithmetic. Logarithms are computed by
//! repeated multiplication, never through floating point.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValuationError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("argument {value} outside ({low}, {high}]")]
    OutOfRange { value: u64, low: u64, high: String },
    #[error("{what} must be at least {min}, got {got}")]
    TooSmall { what: &'static str, min: u64, got: u64 },
}

/// The exponent of the exact prime power dividing an integer.
///
/// `Infinite` is reserved for the valuation of zero and compares greater than
/// every finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Valuation {
    Finite(u64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<u64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("infinite"),
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn require_prime(p: u64) -> Result<(), ValuationError> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(ValuationError::NotPrime(p))
    }
}

/// Largest `n` with `p^n | a`; `Infinite` for `a = 0`.
pub fn ord_p(p: u64, a: &BigInt) -> Result<Valuation, ValuationError> {
    require_prime(p)?;
    if a.is_zero() {
        return Ok(Valuation::Infinite);
    }
    let p = BigInt::from(p);
    let mut rest = a.abs();
    let mut n = 0u64;
    loop {
        let (q, r) = rest.div_rem(&p);
        if !r.is_zero() {
            return Ok(Valuation::Finite(n));
        }
        rest = q;
        n += 1;
    }
}

/// `ord_p` for machine integers.
pub fn ord_p_u64(p: u64, a: u64) -> Result<Valuation, ValuationError> {
    ord_p(p, &BigInt::from(a))
}

/// The binomial coefficient `C(n, m)`, zero when `m > n`.
pub fn binom(n: u64, m: u64) -> BigUint {
    if m > n {
        return BigUint::zero();
    }
    let m = m.min(n - m);
    let mut acc = BigUint::one();
    for i in 0..m {
        // acc * (n - i) is divisible by (i + 1) at every step.
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Generalized binomial `C(e, n) = e (e-1) ... (e-n+1) / n!` for any integer `e`.
pub fn binom_signed(e: &BigInt, n: u64) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..n {
        num *= e - BigInt::from(i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

/// Number of carries when adding `a` and `b` written in base `p`.
pub fn carries_base_p(p: u64, a: u64, b: u64) -> Result<u64, ValuationError> {
    require_prime(p)?;
    let (mut a, mut b) = (a, b);
    let mut carry = 0u64;
    let mut count = 0u64;
    while a > 0 || b > 0 || carry > 0 {
        let digit = a % p + b % p + carry;
        carry = u64::from(digit >= p);
        count += carry;
        a /= p;
        b /= p;
    }
    Ok(count)
}

/// `p^n` as a `u64`, if it fits.
pub fn checked_prime_power(p: u64, n: u64) -> Option<u64> {
    let exp = u32::try_from(n).ok()?;
    p.checked_pow(exp)
}

/// `floor(log_base(m))` for `m >= 1`, by repeated multiplication.
pub fn floor_log(base: u64, m: u64) -> u64 {
    assert!(base >= 2 && m >= 1);
    let mut d = 0u64;
    let mut power = base;
    while power <= m {
        d += 1;
        match power.checked_mul(base) {
            Some(next) => power = next,
            None => break,
        }
    }
    d
}

fn check_range(p: u64, n: u64, value: u64) -> Result<(), ValuationError> {
    match checked_prime_power(p, n) {
        Some(bound) if value > 0 && value <= bound => Ok(()),
        Some(bound) => Err(ValuationError::OutOfRange {
            value,
            low: 0,
            high: bound.to_string(),
        }),
        // p^n overflows u64, so every positive u64 lies below it.
        None if value > 0 => Ok(()),
        None => Err(ValuationError::OutOfRange {
            value,
            low: 0,
            high: format!("{p}^{n}"),
        }),
    }
}

/// Exact valuation of `C(p^n, a)` for `0 < a <= p^n`, namely `n - ord_p(a)`.
pub fn prime_power_binom_valuation(p: u64, n: u64, a: u64) -> Result<u64, ValuationError> {
    require_prime(p)?;
    if n == 0 {
        return Err(ValuationError::TooSmall { what: "n", min: 1, got: 0 });
    }
    check_range(p, n, a)?;
    let v = ord_p_u64(p, a)?
        .finite()
        .expect("a is positive, so its valuation is finite");
    Ok(n - v)
}

/// Guaranteed lower bound `n - floor(log_p m)` on the valuation of any integer
/// combination `a_1 C(p^n,1) + ... + a_m C(p^n,m)`.
pub fn binom_sum_divisibility(p: u64, n: u64, m: u64) -> Result<u64, ValuationError> {
    require_prime(p)?;
    if n == 0 {
        return Err(ValuationError::TooSmall { what: "n", min: 1, got: 0 });
    }
    check_range(p, n, m)?;
    Ok(n - floor_log(p, m))
}

/// `floor((k-1)/(p-1))`, the slack allowed between the two largest generator
/// orders of a capable p-group of class `k`.
pub fn hall_bound(k: u64, p: u64) -> Result<u64, ValuationError> {
    require_prime(p)?;
    if k == 0 {
        return Err(ValuationError::TooSmall { what: "k", min: 1, got: 0 });
    }
    Ok((k - 1) / (p - 1))
}

/// `max_{s=1..k} floor((k-s)/(n-1)) + floor(log_n(s+1))`, in closed form
/// `floor(k/(n-1))`.
pub fn max_s_bound(k: u64, n: u64) -> Result<u64, ValuationError> {
    if k == 0 {
        return Err(ValuationError::TooSmall { what: "k", min: 1, got: 0 });
    }
    if n < 2 {
        return Err(ValuationError::TooSmall { what: "n", min: 2, got: n });
    }
    Ok(k / (n - 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pascal_row(n: usize) -> Vec<BigUint> {
        let mut row = vec![BigUint::one()];
        for _ in 0..n {
            let mut next = vec![BigUint::one(); row.len() + 1];
            for i in 1..row.len() {
                next[i] = &row[i - 1] + &row[i];
            }
            row = next;
        }
        row
    }

    #[test]
    fn ord_p_examples() {
        assert_eq!(ord_p_u64(2, 8).unwrap(), Valuation::Finite(3));
        assert_eq!(ord_p_u64(3, 0).unwrap(), Valuation::Infinite);
        assert_eq!(ord_p_u64(5, 28).unwrap(), Valuation::Finite(0));
        assert_eq!(ord_p(3, &BigInt::from(-54)).unwrap(), Valuation::Finite(3));
        assert_eq!(ord_p_u64(4, 8), Err(ValuationError::NotPrime(4)));
        assert!(Valuation::Finite(1_000_000) < Valuation::Infinite);
    }

    #[test]
    fn binom_examples() {
        assert_eq!(binom(8, 2), BigUint::from(28u32));
        assert_eq!(binom(4, 0), BigUint::one());
        assert_eq!(binom(3, 5), BigUint::zero());
        // Pascal recurrence oracle.
        assert_eq!(pascal_row(30)[15], BigUint::from(155_117_520u64));
        assert_eq!(binom(30, 15), BigUint::from(155_117_520u64));
        for (m, expected) in pascal_row(60).iter().enumerate() {
            assert_eq!(&binom(60, m as u64), expected);
        }
    }

    #[test]
    fn signed_binomial() {
        assert_eq!(binom_signed(&BigInt::from(-3), 2), BigInt::from(6));
        assert_eq!(binom_signed(&BigInt::from(5), 2), BigInt::from(10));
        assert_eq!(binom_signed(&BigInt::from(1), 2), BigInt::zero());
        assert_eq!(binom_signed(&BigInt::from(-1), 3), BigInt::from(-1));
    }

    #[test]
    fn carries_examples() {
        assert_eq!(carries_base_p(2, 6, 2).unwrap(), 2);
        assert_eq!(ord_p(2, &BigInt::from(binom(8, 2))).unwrap(), Valuation::Finite(2));
        assert_eq!(carries_base_p(3, 1, 1).unwrap(), 0);
        assert_eq!(carries_base_p(2, 1, 1).unwrap(), 1);
        assert!(carries_base_p(9, 1, 1).is_err());
    }

    #[test]
    fn prime_power_binomials() {
        assert_eq!(prime_power_binom_valuation(2, 3, 2).unwrap(), 2);
        assert_eq!(prime_power_binom_valuation(3, 2, 9).unwrap(), 0);
        assert_eq!(prime_power_binom_valuation(5, 1, 1).unwrap(), 1);
        assert!(prime_power_binom_valuation(2, 3, 9).is_err());
        assert!(prime_power_binom_valuation(2, 3, 0).is_err());
    }

    #[test]
    fn binomial_sum_bound() {
        assert_eq!(binom_sum_divisibility(2, 4, 2).unwrap(), 3);
        assert_eq!(binom_sum_divisibility(3, 5, 1).unwrap(), 5);
        assert_eq!(binom_sum_divisibility(2, 3, 8).unwrap(), 0);
        assert!(binom_sum_divisibility(2, 3, 9).is_err());
    }

    #[test]
    fn class_bounds() {
        assert_eq!(hall_bound(2, 3).unwrap(), 0);
        assert_eq!(hall_bound(3, 2).unwrap(), 2);
        assert_eq!(hall_bound(1, 2).unwrap(), 0);
        assert_eq!(max_s_bound(6, 3).unwrap(), 3);
        assert_eq!(max_s_bound(1, 2).unwrap(), 1);
        assert_eq!(max_s_bound(4, 5).unwrap(), 1);
        assert!(max_s_bound(4, 1).is_err());
    }

    #[test]
    fn floor_log_matches_definition() {
        assert_eq!(floor_log(2, 1), 0);
        assert_eq!(floor_log(2, 8), 3);
        assert_eq!(floor_log(3, 26), 2);
        assert_eq!(floor_log(3, 27), 3);
        for p in [2u64, 3, 5, 7, 11, 13] {
            assert_eq!(floor_log(p, 2), 1 / (p - 1));
        }
    }
}
