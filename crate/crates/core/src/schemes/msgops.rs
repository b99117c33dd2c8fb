//! Message-level semantics shared by all scheme models: componentwise
//! modular arithmetic over centered Z_t, with the coefficient-embedding
//! convolution for products of wider vectors.

use alloc::vec;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::model::MsgValue;
use crate::refscheme::center_mod;

pub fn msg_add(a: &MsgValue, b: &MsgValue, t: &BigInt) -> MsgValue {
    let n = a.len().max(b.len());
    let zero = BigInt::zero();
    (0..n)
        .map(|i| {
            let x = a.get(i).unwrap_or(&zero);
            let y = b.get(i).unwrap_or(&zero);
            center_mod(&(x + y), t)
        })
        .collect()
}

/// Negacyclic convolution at the common width; for width-1 values this is
/// the scalar product mod t.
pub fn msg_mul(a: &MsgValue, b: &MsgValue, t: &BigInt) -> MsgValue {
    let w = a.len().max(b.len()).max(1);
    let mut out = vec![BigInt::zero(); w];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            let k = i + j;
            let prod = x * y;
            if k < w {
                out[k] += prod;
            } else {
                out[k - w] -= prod;
            }
        }
    }
    for c in &mut out {
        *c = center_mod(c, t);
    }
    out
}

pub fn msg_scale(n: &BigInt, a: &MsgValue, t: &BigInt) -> MsgValue {
    a.iter().map(|x| center_mod(&(x * n), t)).collect()
}

pub fn msg_scalar(v: &BigInt, t: &BigInt) -> MsgValue {
    vec![center_mod(v, t)]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(vals: &[i64]) -> MsgValue {
        vals.iter().map(|v| BigInt::from(*v)).collect()
    }

    #[test]
    fn componentwise_modular_add() {
        // [3,7] + [5,12] = [8,3] mod 16
        let t = BigInt::from(16);
        assert_eq!(msg_add(&m(&[3, 7]), &m(&[5, 12]), &t), m(&[-8, 3]));
        // note: 8 is the centered representative -8 of Z_16
    }

    #[test]
    fn scalar_product() {
        let t = BigInt::from(16);
        assert_eq!(msg_mul(&m(&[3]), &m(&[5]), &t), m(&[-1])); // 15 = -1 mod 16
        assert_eq!(msg_mul(&m(&[2]), &m(&[3]), &t), m(&[6]));
    }

    #[test]
    fn scaling() {
        let t = BigInt::from(16);
        assert_eq!(msg_scale(&BigInt::from(-3), &m(&[1, 2]), &t), m(&[-3, -6]));
    }
}
