//! Negacyclic polynomial arithmetic over Z_q[x]/(x^d+1) with centered
//! representatives. Schoolbook multiplication; at d <= 256 this is
//! microseconds per product, which is all the desk-scale harness needs.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

/// Centered representative of `x` modulo `m`, in [-m/2, m/2).
pub fn center_mod(x: &BigInt, m: &BigInt) -> BigInt {
    let mut r = x.mod_floor(m);
    if &r * 2 >= *m {
        r -= m;
    }
    r
}

/// Nearest integer to `num / den` (den > 0), ties rounded up.
pub fn round_nearest(num: &BigInt, den: &BigInt) -> BigInt {
    debug_assert!(den.is_positive());
    let two_num: BigInt = num * 2;
    (two_num + den).div_floor(&(den * 2))
}

/// Coefficient vector of fixed length d. The modulus is supplied per
/// operation; plaintexts use t, ciphertext components use the level's q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    pub coeffs: Vec<BigInt>,
}

impl Poly {
    pub fn zero(d: usize) -> Self {
        Poly {
            coeffs: vec![BigInt::zero(); d],
        }
    }

    pub fn from_scalar(v: &BigInt, d: usize) -> Self {
        let mut p = Poly::zero(d);
        p.coeffs[0] = v.clone();
        p
    }

    pub fn degree_size(&self) -> usize {
        self.coeffs.len()
    }

    pub fn reduce(&self, m: &BigInt) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| center_mod(c, m)).collect(),
        }
    }

    pub fn add(&self, rhs: &Poly, m: &BigInt) -> Poly {
        Poly {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| center_mod(&(a + b), m))
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Poly, m: &BigInt) -> Poly {
        Poly {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| center_mod(&(a - b), m))
                .collect(),
        }
    }

    pub fn neg(&self, m: &BigInt) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|a| center_mod(&(-a), m)).collect(),
        }
    }

    pub fn scalar_mul(&self, n: &BigInt, m: &BigInt) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|a| center_mod(&(a * n), m)).collect(),
        }
    }

    /// Negacyclic product over the integers (no coefficient reduction).
    pub fn mul_z(&self, rhs: &Poly) -> Poly {
        let d = self.coeffs.len();
        let mut out = vec![BigInt::zero(); d];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let prod = a * b;
                let k = i + j;
                if k < d {
                    out[k] += prod;
                } else {
                    out[k - d] -= prod;
                }
            }
        }
        Poly { coeffs: out }
    }

    pub fn mul(&self, rhs: &Poly, m: &BigInt) -> Poly {
        self.mul_z(rhs).reduce(m)
    }

    pub fn inf_norm(&self) -> BigInt {
        self.coeffs
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn centering_range() {
        let m = bi(16);
        assert_eq!(center_mod(&bi(8), &m), bi(-8));
        assert_eq!(center_mod(&bi(7), &m), bi(7));
        assert_eq!(center_mod(&bi(-8), &m), bi(-8));
        assert_eq!(center_mod(&bi(16), &m), bi(0));
        assert_eq!(center_mod(&bi(-9), &m), bi(7));
        let odd = bi(17);
        assert_eq!(center_mod(&bi(9), &odd), bi(-8));
        assert_eq!(center_mod(&bi(8), &odd), bi(8));
    }

    #[test]
    fn rounding() {
        assert_eq!(round_nearest(&bi(7), &bi(2)), bi(4)); // 3.5 -> 4
        assert_eq!(round_nearest(&bi(-7), &bi(2)), bi(-3)); // -3.5 -> -3
        assert_eq!(round_nearest(&bi(10), &bi(4)), bi(3)); // 2.5 -> 3
        assert_eq!(round_nearest(&bi(9), &bi(4)), bi(2)); // 2.25 -> 2
    }

    #[test]
    fn negacyclic_wraparound() {
        // (x^(d-1)) * x = -1 in Z[x]/(x^d+1)
        let d = 4;
        let mut a = Poly::zero(d);
        a.coeffs[d - 1] = bi(1);
        let mut b = Poly::zero(d);
        b.coeffs[1] = bi(1);
        let prod = a.mul_z(&b);
        assert_eq!(prod.coeffs[0], bi(-1));
        assert!(prod.coeffs[1..].iter().all(|c| c.is_zero()));
    }

    #[test]
    fn constant_polys_multiply_like_scalars() {
        let d = 8;
        let a = Poly::from_scalar(&bi(3), d);
        let b = Poly::from_scalar(&bi(-5), d);
        let prod = a.mul(&b, &bi(97));
        assert_eq!(prod.coeffs[0], bi(-15));
        assert!(prod.coeffs[1..].iter().all(|c| c.is_zero()));
    }
}
