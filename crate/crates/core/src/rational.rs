//! Exact arithmetic helpers over big rationals.
//!
//! Coefficient moduli reach hundreds of bits, so every bound, noise value,
//! and threshold is kept as an arbitrary-precision rational. Nothing in the
//! checker touches floating point.

use alloc::string::String;
use alloc::string::ToString;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_from_big(n: BigInt) -> Rat {
    Rat::from_integer(n)
}

pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// floor(log2(x)) for x > 0, exact.
pub fn floor_log2(x: &Rat) -> i64 {
    assert!(x.is_positive(), "floor_log2 needs a positive rational");
    let n = x.numer().bits() as i64;
    let d = x.denom().bits() as i64;
    // 2^(n-1) <= numer < 2^n and likewise for denom, so the answer is
    // n - d or n - d - 1; settle it with one comparison.
    let mut guess = n - d;
    if pow2(guess) > *x {
        guess -= 1;
    }
    debug_assert!(pow2(guess) <= *x && *x < pow2(guess + 1));
    guess
}

/// 2^e as a rational, for any sign of e.
pub fn pow2(e: i64) -> Rat {
    if e >= 0 {
        Rat::from_integer(BigInt::one() << (e as usize))
    } else {
        Rat::new(BigInt::one(), BigInt::one() << ((-e) as usize))
    }
}

/// log2(x) rendered with a few decimals, for reports. The mantissa is
/// taken to 32 fixed-point bits and refined by repeated squaring in u128
/// arithmetic, so huge rationals cost nothing extra.
pub fn log2_approx(x: &Rat) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let fl = floor_log2(x);
    // mantissa = x / 2^fl in [1, 2), as Q32 fixed point
    let (numer, denom) = (x.numer().clone(), x.denom().clone());
    let (num2, den2) = if fl >= 0 {
        (numer << 32usize, denom << (fl as usize))
    } else {
        (numer << (32 + (-fl) as usize), denom)
    };
    let q: BigInt = num2 / den2;
    let mut m: u128 = u128::try_from(q.magnitude().to_u64_digits().first().copied().unwrap_or(1) as u128)
        .unwrap_or(1u128 << 32);
    if q.bits() > 64 {
        m = 1u128 << 32; // cannot happen for a reduced mantissa, stay safe
    }
    let one = 1u128 << 32;
    m = m.clamp(one, (one << 1) - 1);
    let mut bits = 0f64;
    let mut step = 0.5f64;
    for _ in 0..24 {
        m = (m * m) >> 32;
        if m >= one << 1 {
            bits += step;
            m >>= 1;
        }
        step /= 2.0;
    }
    fl as f64 + bits
}

/// Decimal rendering without precision loss for integers; rationals are
/// shown as numer/denom.
pub fn display(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        let mut s = x.numer().to_string();
        s.push('/');
        s.push_str(&x.denom().to_string());
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_log2_basics() {
        assert_eq!(floor_log2(&rat(1)), 0);
        assert_eq!(floor_log2(&rat(2)), 1);
        assert_eq!(floor_log2(&rat(3)), 1);
        assert_eq!(floor_log2(&rat(4)), 2);
        assert_eq!(floor_log2(&ratio(1, 2)), -1);
        assert_eq!(floor_log2(&ratio(3, 8)), -2);
        assert_eq!(floor_log2(&ratio(1023, 1)), 9);
        assert_eq!(floor_log2(&ratio(1025, 1)), 10);
    }

    #[test]
    fn log2_approx_close() {
        let x = ratio(1000, 1024);
        let v = log2_approx(&x);
        assert!((v - (-0.03342)).abs() < 0.01, "{v}");
    }

    #[test]
    fn display_forms() {
        assert_eq!(display(&rat(42)), "42");
        assert_eq!(display(&ratio(5, 3)), "5/3");
    }
}
