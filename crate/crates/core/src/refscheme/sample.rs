//! Seeded samplers for key material and encryption randomness.

use alloc::vec::Vec;

use num_bigint::{BigInt, RandBigInt};
use num_traits::Zero;
use rand::Rng;
use rand::RngCore;

use super::ring::{center_mod, Poly};

/// Uniform polynomial with centered coefficients mod q.
pub fn uniform_poly(d: usize, q: &BigInt, rng: &mut dyn RngCore) -> Poly {
    let mut coeffs = Vec::with_capacity(d);
    for _ in 0..d {
        let c = rng.gen_bigint_range(&BigInt::zero(), q);
        coeffs.push(center_mod(&c, q));
    }
    Poly { coeffs }
}

/// Uniform ternary polynomial (coefficients in {-1, 0, 1}).
pub fn ternary_poly(d: usize, rng: &mut dyn RngCore) -> Poly {
    let mut coeffs = Vec::with_capacity(d);
    for _ in 0..d {
        coeffs.push(BigInt::from(rng.gen_range(-1i8..=1)));
    }
    Poly { coeffs }
}

/// Centered binomial: each coefficient is a sum of `width` fair +-1 pairs,
/// so it lies in [-width, width].
pub fn cbd_poly(d: usize, width: u8, rng: &mut dyn RngCore) -> Poly {
    let mut coeffs = Vec::with_capacity(d);
    for _ in 0..d {
        let mut acc = 0i32;
        for _ in 0..width {
            acc += i32::from(rng.gen::<bool>()) - i32::from(rng.gen::<bool>());
        }
        coeffs.push(BigInt::from(acc));
    }
    Poly { coeffs }
}
