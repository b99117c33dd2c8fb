//! Toy BGV: ciphertexts are 2- or 3-tuples of ring elements at a chain
//! level; the plaintext rides in the low mod-t bits of the phase
//! c0 + c1*s (+ c2*s^2). Decryption is exact while the phase magnitude
//! stays below q_w/2.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use super::ring::{center_mod, round_nearest, Poly};
use super::sample::{cbd_poly, ternary_poly, uniform_poly};
use super::{ToyError, ToyParams};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BgvCiphertext {
    /// 2 components normally, 3 right after an unrelinearized multiply.
    pub parts: Vec<Poly>,
    pub level: u32,
}

impl BgvCiphertext {
    pub fn degree2(&self) -> bool {
        self.parts.len() == 2
    }
}

/// Secret and public key material. Per-level public and relinearization
/// keys, since chain moduli are independent.
#[derive(Debug, Clone)]
pub struct BgvKeys {
    pub params: ToyParams,
    pub sk: Poly,
    /// pk_w = (-a*s + t*e, a) mod q_w.
    pub pks: Vec<(Poly, Poly)>,
    /// rlk_w[i] = (-a_i*s + t*e_i + 2^i*s^2, a_i) mod q_w.
    pub rlks: Vec<Vec<(Poly, Poly)>>,
    pub seed: u64,
}

pub fn keygen(params: &ToyParams, seed: u64) -> BgvKeys {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let d = params.d;
    let sk = ternary_poly(d, &mut rng);
    let sk2 = sk.mul_z(&sk);
    let mut pks = Vec::new();
    let mut rlks = Vec::new();
    for q in &params.chain {
        let a = uniform_poly(d, q, &mut rng);
        let e = cbd_poly(d, params.err_width, &mut rng);
        let b = a
            .mul(&sk, q)
            .neg(q)
            .add(&e.scalar_mul(&params.t, q), q);
        pks.push((b, a));

        let bits = q.bits() as usize;
        let mut rlk = Vec::with_capacity(bits);
        let mut power = BigInt::from(1);
        for _ in 0..bits {
            let a_i = uniform_poly(d, q, &mut rng);
            let e_i = cbd_poly(d, params.err_width, &mut rng);
            let b_i = a_i
                .mul(&sk, q)
                .neg(q)
                .add(&e_i.scalar_mul(&params.t, q), q)
                .add(&sk2.scalar_mul(&power, q), q);
            rlk.push((b_i, a_i));
            power <<= 1;
        }
        rlks.push(rlk);
    }
    BgvKeys {
        params: params.clone(),
        sk,
        pks,
        rlks,
        seed,
    }
}

/// Encrypt a mod-t plaintext at the given level.
pub fn encrypt(keys: &BgvKeys, p: &Poly, level: u32, rng: &mut dyn RngCore) -> BgvCiphertext {
    let params = &keys.params;
    let q = params.modulus(level);
    let d = params.d;
    let (pk0, pk1) = &keys.pks[level as usize];
    let u = ternary_poly(d, rng);
    let e0 = cbd_poly(d, params.err_width, rng);
    let e1 = cbd_poly(d, params.err_width, rng);
    let c0 = pk0
        .mul(&u, q)
        .add(&e0.scalar_mul(&params.t, q), q)
        .add(&p.reduce(q), q);
    let c1 = pk1.mul(&u, q).add(&e1.scalar_mul(&params.t, q), q);
    BgvCiphertext {
        parts: vec![c0, c1],
        level,
    }
}

/// The decryption phase: sum of parts[i] * sk^i, centered mod the level
/// modulus. Decryption and the noise oracle both read off this value.
pub fn phase(keys: &BgvKeys, ct: &BgvCiphertext) -> Poly {
    let q = keys.params.modulus(ct.level);
    let mut acc = ct.parts[0].clone().reduce(q);
    let mut sk_pow = keys.sk.clone();
    for part in &ct.parts[1..] {
        acc = acc.add(&part.mul(&sk_pow, q), q);
        sk_pow = sk_pow.mul_z(&keys.sk);
    }
    acc
}

pub fn decrypt(keys: &BgvKeys, ct: &BgvCiphertext) -> Poly {
    phase(keys, ct).reduce(&keys.params.t)
}

/// Exact infinity norm of the decryption residual phase - p, the t-scaled
/// error left after removing the message. The phase itself (message plus
/// residual) must stay below q_w/2 for decryption to be exact.
pub fn eval_noise(keys: &BgvKeys, ct: &BgvCiphertext) -> BigInt {
    let ph = phase(keys, ct);
    let p = ph.reduce(&keys.params.t);
    Poly {
        coeffs: ph
            .coeffs
            .iter()
            .zip(&p.coeffs)
            .map(|(a, b)| a - b)
            .collect(),
    }
    .inf_norm()
}

pub fn hom_add(a: &BgvCiphertext, b: &BgvCiphertext, params: &ToyParams) -> Result<BgvCiphertext, ToyError> {
    if a.level != b.level {
        return Err(ToyError::LevelMismatch {
            left: a.level,
            right: b.level,
        });
    }
    let q = params.modulus(a.level);
    let n = a.parts.len().max(b.parts.len());
    let d = params.d;
    let zero = Poly::zero(d);
    let mut parts = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.parts.get(i).unwrap_or(&zero);
        let y = b.parts.get(i).unwrap_or(&zero);
        parts.push(x.add(y, q));
    }
    Ok(BgvCiphertext {
        parts,
        level: a.level,
    })
}

pub fn hom_add_plain(ct: &BgvCiphertext, p: &Poly, params: &ToyParams) -> BgvCiphertext {
    let q = params.modulus(ct.level);
    let mut parts = ct.parts.clone();
    parts[0] = parts[0].add(&p.reduce(q), q);
    BgvCiphertext {
        parts,
        level: ct.level,
    }
}

/// Tensor multiply: degree-2 inputs, degree-3 output decryptable with
/// (1, sk, sk^2).
pub fn hom_mul_raw(
    a: &BgvCiphertext,
    b: &BgvCiphertext,
    params: &ToyParams,
) -> Result<BgvCiphertext, ToyError> {
    if a.level != b.level {
        return Err(ToyError::LevelMismatch {
            left: a.level,
            right: b.level,
        });
    }
    if !a.degree2() || !b.degree2() {
        return Err(ToyError::DegreeTooHigh);
    }
    let q = params.modulus(a.level);
    let c0 = a.parts[0].mul(&b.parts[0], q);
    let c1 = a.parts[0]
        .mul(&b.parts[1], q)
        .add(&a.parts[1].mul(&b.parts[0], q), q);
    let c2 = a.parts[1].mul(&b.parts[1], q);
    Ok(BgvCiphertext {
        parts: vec![c0, c1, c2],
        level: a.level,
    })
}

/// Key switching with base-2 gadget decomposition: folds the s^2 component
/// back onto (1, s). The digit polynomials have 0/1 coefficients, so each
/// contributes negacyclically shifted additions of the key rows; the
/// accumulators are reduced once at the end.
pub fn relinearize(keys: &BgvKeys, ct: &BgvCiphertext) -> BgvCiphertext {
    if ct.parts.len() <= 2 {
        return ct.clone();
    }
    let q = keys.params.modulus(ct.level);
    let rlk = &keys.rlks[ct.level as usize];
    let d = keys.params.d;
    let mut acc0 = ct.parts[0].coeffs.clone();
    let mut acc1 = ct.parts[1].coeffs.clone();
    // non-negative digits of each coefficient of c2
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
    for (i, (rb, ra)) in rlk.iter().enumerate() {
        for (k, c) in lifted.iter().enumerate() {
            if c.bit(i as u64) {
                shift_add(&mut acc0, rb, k);
                shift_add(&mut acc1, ra, k);
            }
        }
    }
    BgvCiphertext {
        parts: vec![Poly { coeffs: acc0 }.reduce(q), Poly { coeffs: acc1 }.reduce(q)],
        level: ct.level,
    }
}

/// Multiply and immediately relinearize back to degree 2.
pub fn hom_mul(
    keys: &BgvKeys,
    a: &BgvCiphertext,
    b: &BgvCiphertext,
) -> Result<BgvCiphertext, ToyError> {
    let raw = hom_mul_raw(a, b, &keys.params)?;
    Ok(relinearize(keys, &raw))
}

pub fn hom_scalar_mul(ct: &BgvCiphertext, n: &BigInt, params: &ToyParams) -> BgvCiphertext {
    let q = params.modulus(ct.level);
    BgvCiphertext {
        parts: ct.parts.iter().map(|p| p.scalar_mul(n, q)).collect(),
        level: ct.level,
    }
}

pub fn hom_mul_plain(ct: &BgvCiphertext, p: &Poly, params: &ToyParams) -> BgvCiphertext {
    let q = params.modulus(ct.level);
    let lifted = p.reduce(q);
    BgvCiphertext {
        parts: ct.parts.iter().map(|c| c.mul(&lifted, q)).collect(),
        level: ct.level,
    }
}

/// Rescale from q_w to q_{w-1}, rounding each coefficient to the nearest
/// value congruent mod t. The plaintext is preserved exactly; the phase
/// scales by q_{w-1}/q_w plus a bounded rounding correction.
pub fn hom_modswitch(ct: &BgvCiphertext, params: &ToyParams) -> Result<BgvCiphertext, ToyError> {
    if ct.level == 0 {
        return Err(ToyError::ChainBottom);
    }
    let q = params.modulus(ct.level);
    let q_next = params.modulus(ct.level - 1);
    let t = &params.t;
    let mut parts = Vec::with_capacity(ct.parts.len());
    for part in &ct.parts {
        let coeffs = part
            .coeffs
            .iter()
            .map(|x| {
                let scaled = round_nearest(&(x * q_next), q);
                let fix = center_mod(&(x - &scaled), t);
                center_mod(&(scaled + fix), q_next)
            })
            .collect();
        parts.push(Poly { coeffs });
    }
    Ok(BgvCiphertext {
        parts,
        level: ct.level - 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn test_params() -> ToyParams {
        ToyParams {
            t: BigInt::from(16),
            d: 16,
            chain: vec![
                BigInt::from(1u64 << 25) + 1,
                BigInt::from(1u64 << 35) + 1,
                BigInt::from(1u64 << 45) + 1,
            ],
            err_width: 1,
        }
    }

    fn enc_scalar(keys: &BgvKeys, v: i64, level: u32, rng: &mut ChaCha20Rng) -> BgvCiphertext {
        let p = Poly::from_scalar(&center_mod(&BigInt::from(v), &keys.params.t), keys.params.d);
        encrypt(keys, &p, level, rng)
    }

    #[test]
    fn keygen_is_deterministic_per_seed() {
        let params = test_params();
        let k1 = keygen(&params, 7);
        let k2 = keygen(&params, 7);
        assert_eq!(k1.sk, k2.sk);
        assert_eq!(k1.pks, k2.pks);
        let k3 = keygen(&params, 8);
        assert_ne!(k1.sk, k3.sk);
    }

    #[test]
    fn roundtrip_many_random_messages() {
        let params = test_params();
        let keys = keygen(&params, 1);
        let mut rng = ChaCha20Rng::seed_from_u64(99);
        for trial in 0..1000 {
            let p = super::super::sample::uniform_poly(params.d, &params.t, &mut rng);
            let ct = encrypt(&keys, &p, params.top_level(), &mut rng);
            assert_eq!(decrypt(&keys, &ct), p.reduce(&params.t), "trial {trial}");
        }
    }

    #[test]
    fn fresh_noise_within_declared_bound() {
        let params = test_params();
        let keys = keygen(&params, 2);
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        // residual |t*(e*u + e0 + e1*s)| <= t*w*(2d+1)
        let w = BigInt::from(params.err_width);
        let bound = &params.t * &w * BigInt::from(2 * params.d + 1);
        for _ in 0..1000 {
            let ct = enc_scalar(&keys, 5, 1, &mut rng);
            assert!(eval_noise(&keys, &ct) <= bound);
        }
    }

    #[test]
    fn add_and_mul_decrypt_correctly() {
        let params = test_params();
        let keys = keygen(&params, 4);
        let mut rng = ChaCha20Rng::seed_from_u64(10);
        let a = enc_scalar(&keys, 2, 2, &mut rng);
        let b = enc_scalar(&keys, 3, 2, &mut rng);

        let sum = hom_add(&a, &b, &params).unwrap();
        assert_eq!(
            decrypt(&keys, &sum).coeffs[0],
            BigInt::from(5),
            "decrypt(enc(2) + enc(3)) = 5"
        );

        let prod = hom_mul(&keys, &a, &b).unwrap();
        assert_eq!(
            decrypt(&keys, &prod).coeffs[0],
            BigInt::from(6),
            "decrypt(enc(2) * enc(3)) = 6"
        );
    }

    #[test]
    fn zero_encrypts_to_zero() {
        let params = test_params();
        let keys = keygen(&params, 4);
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let ct = enc_scalar(&keys, 0, 0, &mut rng);
        assert!(decrypt(&keys, &ct).is_zero());
    }

    #[test]
    fn noise_is_subadditive_over_addition() {
        let params = test_params();
        let keys = keygen(&params, 4);
        let mut rng = ChaCha20Rng::seed_from_u64(12);
        for _ in 0..200 {
            let a = enc_scalar(&keys, 3, 1, &mut rng);
            let b = enc_scalar(&keys, -2, 1, &mut rng);
            let sum = hom_add(&a, &b, &params).unwrap();
            assert!(eval_noise(&keys, &sum) <= eval_noise(&keys, &a) + eval_noise(&keys, &b));
        }
    }

    #[test]
    fn repeated_squaring_corrupts_exactly_when_true_phase_crosses_half_q() {
        let params = ToyParams {
            chain: vec![BigInt::from((1u64 << 30) + 1)],
            ..test_params()
        };
        let keys = keygen(&params, 21);
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let mut ct = enc_scalar(&keys, 1, 0, &mut rng);
        let q = params.modulus(0).clone();
        // exact unreduced phase, valid until the first wrap: squaring
        // squares it negacyclically, relinearization adds a small delta
        // that is measurable while nothing has wrapped
        let mut true_phase = phase(&keys, &ct);
        let mut corrupted = false;
        for step in 0..12 {
            let raw = hom_mul_raw(&ct, &ct, &params).unwrap();
            let relined = relinearize(&keys, &raw);
            let delta = phase(&keys, &relined).sub(&phase(&keys, &raw), &q);
            true_phase = true_phase.mul_z(&true_phase);
            true_phase = Poly {
                coeffs: true_phase
                    .coeffs
                    .iter()
                    .zip(&delta.coeffs)
                    .map(|(a, b)| a + b)
                    .collect(),
            };
            ct = relined;
            let ok = decrypt(&keys, &ct) == Poly::from_scalar(&BigInt::from(1), params.d);
            if &true_phase.inf_norm() * 2 < q {
                // below the critical value: decryption must be exact and
                // the reduced phase must still equal the true phase
                assert!(ok, "corruption below q/2 at step {step}");
                assert_eq!(phase(&keys, &ct), true_phase.reduce(q));
            } else {
                // first crossing: decryption corrupts here
                assert!(!ok, "no corruption although true phase crossed q/2");
                corrupted = true;
                break;
            }
        }
        assert!(corrupted, "squaring chain never corrupted");
        let _ = rat(0);
    }

    #[test]
    fn modswitch_preserves_plaintext_and_reduces_noise() {
        let params = test_params();
        let keys = keygen(&params, 31);
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let mut shrank = 0;
        for _ in 0..1000 {
            let a = enc_scalar(&keys, 3, 2, &mut rng);
            let b = enc_scalar(&keys, 5, 2, &mut rng);
            // a couple of multiplies so the noise is well above the
            // rounding correction
            let noisy = hom_mul(&keys, &a, &b).unwrap();
            let switched = hom_modswitch(&noisy, &params).unwrap();
            assert_eq!(switched.level, 1);
            assert_eq!(decrypt(&keys, &switched), decrypt(&keys, &noisy));
            if eval_noise(&keys, &switched) < eval_noise(&keys, &noisy) {
                shrank += 1;
            }
        }
        assert_eq!(shrank, 1000, "modswitch failed to reduce noise");
    }

    #[test]
    fn modswitch_at_bottom_fails() {
        let params = test_params();
        let keys = keygen(&params, 31);
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let ct = enc_scalar(&keys, 1, 0, &mut rng);
        assert_eq!(hom_modswitch(&ct, &params), Err(ToyError::ChainBottom));
    }

    #[test]
    fn mul_requires_degree_two() {
        let params = test_params();
        let keys = keygen(&params, 31);
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let a = enc_scalar(&keys, 1, 0, &mut rng);
        let raw = hom_mul_raw(&a, &a, &params).unwrap();
        assert!(hom_mul_raw(&raw, &a, &params).is_err());
    }
}
