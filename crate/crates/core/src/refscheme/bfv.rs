//! Toy BFV: the plaintext is scaled to the top bits by Delta = floor(q/t).
//! Noise is measured as the maximal distance of t*phase_i/q from the
//! integer lattice, an exact rational in [0, 1/2]; decryption is correct
//! while it stays below 1/2.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::Signed;
use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::rational::Rat;

use super::ring::{center_mod, round_nearest, Poly};
use super::sample::{cbd_poly, ternary_poly, uniform_poly};
use super::{ToyError, ToyParams};

/// Single-modulus BFV ciphertext (the chain must have length 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BfvCiphertext {
    pub parts: Vec<Poly>,
}

impl BfvCiphertext {
    pub fn degree2(&self) -> bool {
        self.parts.len() == 2
    }
}

#[derive(Debug, Clone)]
pub struct BfvKeys {
    pub params: ToyParams,
    pub sk: Poly,
    pub pk: (Poly, Poly),
    /// rlk[i] = (-a_i*s + e_i + 2^i*s^2, a_i); errors unscaled, unlike BGV.
    pub rlk: Vec<(Poly, Poly)>,
    pub seed: u64,
}

impl BfvKeys {
    pub fn q(&self) -> &BigInt {
        &self.params.chain[0]
    }

    pub fn delta(&self) -> BigInt {
        use num_integer::Integer;
        self.q().div_floor(&self.params.t)
    }
}

pub fn keygen(params: &ToyParams, seed: u64) -> BfvKeys {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let d = params.d;
    let q = &params.chain[0];
    let sk = ternary_poly(d, &mut rng);
    let sk2 = sk.mul_z(&sk);
    let a = uniform_poly(d, q, &mut rng);
    let e = cbd_poly(d, params.err_width, &mut rng);
    let pk = (a.mul(&sk, q).neg(q).add(&e, q), a);
    let bits = q.bits() as usize;
    let mut rlk = Vec::with_capacity(bits);
    let mut power = BigInt::from(1);
    for _ in 0..bits {
        let a_i = uniform_poly(d, q, &mut rng);
        let e_i = cbd_poly(d, params.err_width, &mut rng);
        let b_i = a_i
            .mul(&sk, q)
            .neg(q)
            .add(&e_i, q)
            .add(&sk2.scalar_mul(&power, q), q);
        rlk.push((b_i, a_i));
        power <<= 1;
    }
    BfvKeys {
        params: params.clone(),
        sk,
        pk,
        rlk,
        seed,
    }
}

pub fn encrypt(keys: &BfvKeys, p: &Poly, rng: &mut dyn RngCore) -> BfvCiphertext {
    let params = &keys.params;
    let q = keys.q();
    let d = params.d;
    let delta = keys.delta();
    let u = ternary_poly(d, rng);
    let e0 = cbd_poly(d, params.err_width, rng);
    let e1 = cbd_poly(d, params.err_width, rng);
    let c0 = keys
        .pk
        .0
        .mul(&u, q)
        .add(&e0, q)
        .add(&p.reduce(&params.t).scalar_mul(&delta, q), q);
    let c1 = keys.pk.1.mul(&u, q).add(&e1, q);
    BfvCiphertext {
        parts: vec![c0, c1],
    }
}

pub fn phase(keys: &BfvKeys, ct: &BfvCiphertext) -> Poly {
    let q = keys.q();
    let mut acc = ct.parts[0].clone().reduce(q);
    let mut sk_pow = keys.sk.clone();
    for part in &ct.parts[1..] {
        acc = acc.add(&part.mul(&sk_pow, q), q);
        sk_pow = sk_pow.mul_z(&keys.sk);
    }
    acc
}

pub fn decrypt(keys: &BfvKeys, ct: &BfvCiphertext) -> Poly {
    let q = keys.q();
    let t = &keys.params.t;
    let coeffs = phase(keys, ct)
        .coeffs
        .iter()
        .map(|c| center_mod(&round_nearest(&(c * t), q), t))
        .collect();
    Poly { coeffs }
}

/// Max_i dist(t*phase_i/q, Z) as an exact rational in [0, 1/2].
pub fn eval_noise(keys: &BfvKeys, ct: &BfvCiphertext) -> Rat {
    let q = keys.q();
    let t = &keys.params.t;
    let mut worst = Rat::from_integer(0.into());
    for c in &phase(keys, ct).coeffs {
        let num = c * t;
        let nearest = round_nearest(&num, q);
        let dist = Rat::new((num - nearest * q).abs(), q.clone());
        if dist > worst {
            worst = dist;
        }
    }
    worst
}

pub fn hom_add(a: &BfvCiphertext, b: &BfvCiphertext, keys: &BfvKeys) -> BfvCiphertext {
    let q = keys.q();
    let d = keys.params.d;
    let zero = Poly::zero(d);
    let n = a.parts.len().max(b.parts.len());
    let mut parts = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.parts.get(i).unwrap_or(&zero);
        let y = b.parts.get(i).unwrap_or(&zero);
        parts.push(x.add(y, q));
    }
    BfvCiphertext { parts }
}

pub fn hom_add_plain(ct: &BfvCiphertext, p: &Poly, keys: &BfvKeys) -> BfvCiphertext {
    let q = keys.q();
    let delta = keys.delta();
    let mut parts = ct.parts.clone();
    parts[0] = parts[0].add(&p.reduce(&keys.params.t).scalar_mul(&delta, q), q);
    BfvCiphertext { parts }
}

/// Tensor multiply with t/q rescaling, then relinearize.
pub fn hom_mul(keys: &BfvKeys, a: &BfvCiphertext, b: &BfvCiphertext) -> Result<BfvCiphertext, ToyError> {
    if !a.degree2() || !b.degree2() {
        return Err(ToyError::DegreeTooHigh);
    }
    let q = keys.q();
    let t = &keys.params.t;
    // tensor over the integers, then scale-round each coefficient
    let c0 = a.parts[0].mul_z(&b.parts[0]);
    let c1 = {
        let x = a.parts[0].mul_z(&b.parts[1]);
        let y = a.parts[1].mul_z(&b.parts[0]);
        Poly {
            coeffs: x
                .coeffs
                .iter()
                .zip(&y.coeffs)
                .map(|(p, r)| p + r)
                .collect(),
        }
    };
    let c2 = a.parts[1].mul_z(&b.parts[1]);
    let rescale = |p: &Poly| Poly {
        coeffs: p
            .coeffs
            .iter()
            .map(|c| center_mod(&round_nearest(&(c * t), q), q))
            .collect(),
    };
    let raw = BfvCiphertext {
        parts: vec![rescale(&c0), rescale(&c1), rescale(&c2)],
    };
    Ok(relinearize(keys, &raw))
}

pub fn relinearize(keys: &BfvKeys, ct: &BfvCiphertext) -> BfvCiphertext {
    if ct.parts.len() <= 2 {
        return ct.clone();
    }
    let q = keys.q();
    let d = keys.params.d;
    let mut acc0 = ct.parts[0].coeffs.clone();
    let mut acc1 = ct.parts[1].coeffs.clone();
    let lifted: Vec<BigInt> = ct.parts[2]
        .coeffs
        .iter()
        .map(|c| num_integer::Integer::mod_floor(c, q))
        .collect();
    let mut shift_add = |acc: &mut Vec<BigInt>, row: &Poly, k: usize| {
        for (j, v) in row.coeffs.iter().enumerate() {
            let idx = k + j;
            if idx < d {
                acc[idx] += v;
            } else {
                acc[idx - d] -= v;
            }
        }
    };
    for (i, (rb, ra)) in keys.rlk.iter().enumerate() {
        for (k, c) in lifted.iter().enumerate() {
            if c.bit(i as u64) {
                shift_add(&mut acc0, rb, k);
                shift_add(&mut acc1, ra, k);
            }
        }
    }
    BfvCiphertext {
        parts: vec![Poly { coeffs: acc0 }.reduce(q), Poly { coeffs: acc1 }.reduce(q)],
    }
}

pub fn hom_scalar_mul(ct: &BfvCiphertext, n: &BigInt, keys: &BfvKeys) -> BfvCiphertext {
    let q = keys.q();
    BfvCiphertext {
        parts: ct.parts.iter().map(|p| p.scalar_mul(n, q)).collect(),
    }
}

pub fn hom_mul_plain(ct: &BfvCiphertext, p: &Poly, keys: &BfvKeys) -> BfvCiphertext {
    let q = keys.q();
    let lifted = p.reduce(&keys.params.t).reduce(q);
    BfvCiphertext {
        parts: ct.parts.iter().map(|c| c.mul(&lifted, q)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn test_params() -> ToyParams {
        ToyParams {
            t: BigInt::from(16),
            d: 16,
            chain: vec![BigInt::from((1u64 << 40) + 1)],
            err_width: 1,
        }
    }

    fn enc_scalar(keys: &BfvKeys, v: i64, rng: &mut ChaCha20Rng) -> BfvCiphertext {
        let p = Poly::from_scalar(&center_mod(&BigInt::from(v), &keys.params.t), keys.params.d);
        encrypt(keys, &p, rng)
    }

    #[test]
    fn roundtrip() {
        let params = test_params();
        let keys = keygen(&params, 17);
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for _ in 0..500 {
            let p = super::super::sample::uniform_poly(params.d, &params.t, &mut rng);
            let ct = encrypt(&keys, &p, &mut rng);
            assert_eq!(decrypt(&keys, &ct), p.reduce(&params.t));
        }
    }

    #[test]
    fn mul_and_add_decrypt_correctly() {
        let params = test_params();
        let keys = keygen(&params, 18);
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let a = enc_scalar(&keys, 2, &mut rng);
        let b = enc_scalar(&keys, 3, &mut rng);
        let sum = hom_add(&a, &b, &keys);
        assert_eq!(decrypt(&keys, &sum).coeffs[0], BigInt::from(5));
        let prod = hom_mul(&keys, &a, &b).unwrap();
        assert_eq!(decrypt(&keys, &prod).coeffs[0], BigInt::from(6));
    }

    #[test]
    fn fresh_noise_is_small_rational() {
        let params = test_params();
        let keys = keygen(&params, 19);
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        for _ in 0..300 {
            let ct = enc_scalar(&keys, 7, &mut rng);
            let eps = eval_noise(&keys, &ct);
            assert!(eps < ratio(1, 1 << 20), "fresh noise too large: {eps}");
        }
    }
}
