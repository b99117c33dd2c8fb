//! Simulated TFHE values: exact integer value tracking plus a noise
//! counter driven by the same growth functions the static bounds use.
//! Bootstrapping internals are out of scope; `pbs` is modeled as a
//! value-preserving noise reset. The true (unreduced) value is kept so
//! that plaintext-modulus wraparound is observable.

use num_bigint::BigInt;
use num_traits::Signed;

use crate::model::TfheId;
use crate::rational::{Rat, rat_from_big};

use super::ring::center_mod;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TfheParams {
    pub t: BigInt,
    pub q: BigInt,
    /// Noise counter assigned to fresh encryptions.
    pub fresh_noise: Rat,
    /// Noise counter after a programmable bootstrap (eps_b).
    pub pbs_noise: Rat,
}

impl TfheParams {
    /// Simulated decryption is considered reliable while the counter stays
    /// at or below the loosest operator admissibility threshold, q/t.
    pub fn corruption_threshold(&self) -> Rat {
        Rat::new(self.q.clone(), self.t.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TfheSimValue {
    pub id: TfheId,
    /// The value the circuit intends, tracked without reduction.
    pub true_value: BigInt,
    pub noise: Rat,
}

impl TfheSimValue {
    pub fn fresh(params: &TfheParams, id: TfheId, value: &BigInt) -> Self {
        TfheSimValue {
            id,
            true_value: value.clone(),
            noise: params.fresh_noise.clone(),
        }
    }

    /// What decryption would return: the value reduced into centered Z_t.
    pub fn decrypt(&self, params: &TfheParams) -> BigInt {
        center_mod(&self.true_value, &params.t)
    }

    /// The true value left the centered plaintext range, so the decrypted
    /// value no longer equals the intended integer.
    pub fn wrapped(&self, params: &TfheParams) -> bool {
        let t = rat_from_big(params.t.clone());
        let v = rat_from_big(self.true_value.clone());
        let half = t / crate::rational::rat(2);
        v < -half.clone() || v >= half
    }

    /// Decryption mismatch signal for the completeness criterion: either
    /// the noise counter left the simulated correctness envelope or the
    /// value wrapped.
    pub fn corrupt(&self, params: &TfheParams) -> bool {
        self.noise > params.corruption_threshold() || self.wrapped(params)
    }
}

pub fn sim_add(a: &TfheSimValue, b: &TfheSimValue) -> TfheSimValue {
    TfheSimValue {
        id: a.id.max(b.id),
        true_value: &a.true_value + &b.true_value,
        noise: &a.noise + &b.noise,
    }
}

pub fn sim_add_plain(a: &TfheSimValue, v: &BigInt) -> TfheSimValue {
    TfheSimValue {
        id: a.id,
        true_value: &a.true_value + v,
        noise: a.noise.clone(),
    }
}

/// RGSW-RGSW and external products share value semantics; the noise
/// counter is set by the caller from the estimator family.
pub fn sim_mul(id: TfheId, a: &TfheSimValue, b: &TfheSimValue, noise: Rat) -> TfheSimValue {
    TfheSimValue {
        id,
        true_value: &a.true_value * &b.true_value,
        noise,
    }
}

pub fn sim_scalar_mul(n: &BigInt, a: &TfheSimValue) -> TfheSimValue {
    TfheSimValue {
        id: a.id,
        true_value: n * &a.true_value,
        noise: a.noise.clone() * rat_from_big(n.abs()),
    }
}

/// Value-preserving noise reset.
pub fn sim_pbs(params: &TfheParams, input: &TfheSimValue) -> TfheSimValue {
    TfheSimValue {
        id: TfheId::Lwe,
        true_value: input.true_value.clone(),
        noise: params.pbs_noise.clone(),
    }
}

/// Selection on the control value (1 picks the first branch), with the
/// noise of the two-external-products-plus-add composition.
pub fn sim_cmux(
    params: &TfheParams,
    ctrl: &TfheSimValue,
    d1: &TfheSimValue,
    d0: &TfheSimValue,
    noise: Rat,
) -> TfheSimValue {
    let taken = if ctrl.decrypt(params) == BigInt::from(1) {
        d1
    } else {
        d0
    };
    TfheSimValue {
        id: TfheId::Rlwe,
        true_value: taken.true_value.clone(),
        noise,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn params(p: u32) -> TfheParams {
        TfheParams {
            t: BigInt::from(1u64 << p),
            q: BigInt::from(1u64 << 50),
            fresh_noise: rat(16),
            pbs_noise: rat(16),
        }
    }

    #[test]
    fn additions_wrap_exactly_at_t() {
        // start at -t/2, add 1 each time: t-1 additions stay in range, the
        // t-th flips the wrap flag
        let pp = params(4);
        let t = 16i64;
        let mut v = TfheSimValue::fresh(&pp, TfheId::Lwe, &BigInt::from(-t / 2));
        let one = TfheSimValue::fresh(&pp, TfheId::Lwe, &BigInt::from(1));
        for step in 1..=t {
            v = sim_add(&v, &one);
            if step < t {
                assert!(!v.wrapped(&pp), "wrapped early at step {step}");
            } else {
                assert!(v.wrapped(&pp), "no wrap at step {step}");
            }
        }
    }

    #[test]
    fn pbs_resets_noise_and_keeps_value() {
        let pp = params(4);
        let mut v = TfheSimValue::fresh(&pp, TfheId::Lwe, &BigInt::from(3));
        for _ in 0..10 {
            v = sim_add(&v, &TfheSimValue::fresh(&pp, TfheId::Lwe, &BigInt::from(0)));
        }
        assert!(v.noise > pp.pbs_noise);
        let b = sim_pbs(&pp, &v);
        assert_eq!(b.noise, pp.pbs_noise);
        assert_eq!(b.true_value, BigInt::from(3));
        assert_eq!(b.id, TfheId::Lwe);
    }

    #[test]
    fn scalar_by_zero_clears_value_and_noise() {
        let pp = params(4);
        let v = TfheSimValue::fresh(&pp, TfheId::Lwe, &BigInt::from(5));
        let z = sim_scalar_mul(&BigInt::from(0), &v);
        assert_eq!(z.true_value, BigInt::from(0));
        assert_eq!(z.noise, rat(0));
    }

    #[test]
    fn cmux_selects_on_control_bit() {
        let pp = params(4);
        let yes = TfheSimValue::fresh(&pp, TfheId::Rgsw, &BigInt::from(1));
        let no = TfheSimValue::fresh(&pp, TfheId::Rgsw, &BigInt::from(0));
        let a = TfheSimValue::fresh(&pp, TfheId::Lwe, &BigInt::from(6));
        let b = TfheSimValue::fresh(&pp, TfheId::Lwe, &BigInt::from(-2));
        assert_eq!(
            sim_cmux(&pp, &yes, &a, &b, rat(1)).true_value,
            BigInt::from(6)
        );
        assert_eq!(
            sim_cmux(&pp, &no, &a, &b, rat(1)).true_value,
            BigInt::from(-2)
        );
    }
}
