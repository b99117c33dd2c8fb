//! The built-in toy RLWE scheme: textbook BGV- and BFV-style encryption
//! over Z_q[x]/(x^d+1) with an exact secret-key noise oracle, plus a
//! lightweight simulated TFHE value/noise model.
//!
//! This scheme is INSECURE by construction (tiny rings, narrow error, no
//! hardness validation). It exists as ground truth: decryption really does
//! corrupt when noise crosses q/2, which is the phenomenon the static
//! analysis is tested against.

pub mod bfv;
pub mod bgv;
mod ring;
mod sample;
mod tfhe_sim;

pub use bfv::{BfvCiphertext, BfvKeys};
pub use bgv::{BgvCiphertext, BgvKeys};
pub use ring::{center_mod, round_nearest, Poly};
pub use sample::{cbd_poly, ternary_poly, uniform_poly};
pub use tfhe_sim::{
    sim_add as tfhe_sim_add, sim_add_plain as tfhe_sim_add_plain, sim_cmux as tfhe_sim_cmux,
    sim_mul as tfhe_sim_mul, sim_pbs as tfhe_sim_pbs, sim_scalar_mul as tfhe_sim_scalar_mul,
    TfheParams, TfheSimValue,
};

use alloc::string::String;

use num_bigint::BigInt;
use num_traits::One;

/// Parameters shared by the toy BGV/BFV instances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToyParams {
    /// Plaintext modulus.
    pub t: BigInt,
    /// Ring degree (power of two).
    pub d: usize,
    /// Moduli q_0 < ... < q_L, all coprime to t.
    pub chain: Vec<BigInt>,
    /// Centered-binomial error width; coefficients lie in [-w, w].
    pub err_width: u8,
}

use alloc::vec::Vec;

impl ToyParams {
    pub fn validate(&self) -> Result<(), String> {
        use alloc::format;
        use num_integer::Integer;
        let _ = Integer::gcd(&self.t, &self.t);
        if self.t < BigInt::from(1) {
            return Err("plaintext modulus t must be >= 1".into());
        }
        if self.d == 0 || (self.d & (self.d - 1)) != 0 {
            return Err(format!("ring degree d = {} must be a power of two", self.d));
        }
        if self.chain.is_empty() {
            return Err("modulus chain must be non-empty".into());
        }
        for w in self.chain.windows(2) {
            if w[0] >= w[1] {
                return Err("modulus chain must be strictly increasing from q_0 to q_L".into());
            }
        }
        for q in &self.chain {
            if q <= &self.t {
                return Err(format!("modulus {q} must exceed t = {}", self.t));
            }
            // q = 1 (mod t) keeps modulus switching message-preserving and
            // implies coprimality
            if self.t > BigInt::one() && q.mod_floor(&self.t) != BigInt::one() {
                return Err(format!(
                    "modulus {q} must be congruent to 1 mod t = {}",
                    self.t
                ));
            }
        }
        Ok(())
    }

    pub fn top_level(&self) -> u32 {
        (self.chain.len() - 1) as u32
    }

    pub fn modulus(&self, level: u32) -> &BigInt {
        &self.chain[level as usize]
    }
}

/// Errors from toy-scheme operations; these are hard usage errors, not
/// overflow signals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ToyError {
    LevelMismatch { left: u32, right: u32 },
    DegreeTooHigh,
    ChainBottom,
}

impl core::fmt::Display for ToyError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ToyError::LevelMismatch { left, right } => {
                write!(f, "ciphertext levels differ: {left} vs {right}")
            }
            ToyError::DegreeTooHigh => write!(f, "operation needs a degree-2 ciphertext"),
            ToyError::ChainBottom => write!(f, "modulus chain exhausted (already at level 0)"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ToyError {}
