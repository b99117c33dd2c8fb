//! Bounds maps per scheme: the partial functions the type checker runs.
//! Undefinedness is an explicit `BoundsFailure` naming the violated
//! condition.

use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::Signed;

use crate::model::{Bound, BoundArg, BoundsFailure, OverflowKind, TfheId};
use crate::rational::{rat, rat_from_big, Rat};

use super::estimator::NoiseEstimator;

pub(crate) fn interval_add(a: (&Rat, &Rat), b: (&Rat, &Rat)) -> (Rat, Rat) {
    (a.0 + b.0, a.1 + b.1)
}

pub(crate) fn interval_mul(a: (&Rat, &Rat), b: (&Rat, &Rat)) -> (Rat, Rat) {
    let candidates = [a.0 * b.0, a.0 * b.1, a.1 * b.0, a.1 * b.1];
    let inf = candidates.iter().min().unwrap().clone();
    let sup = candidates.iter().max().unwrap().clone();
    (inf, sup)
}

pub(crate) fn interval_scale(n: &Rat, a: (&Rat, &Rat)) -> (Rat, Rat) {
    let x = n * a.0;
    let y = n * a.1;
    if x <= y {
        (x, y)
    } else {
        (y, x)
    }
}

pub(crate) fn interval_hull(a: (&Rat, &Rat), b: (&Rat, &Rat)) -> (Rat, Rat) {
    (a.0.min(b.0).clone(), a.1.max(b.1).clone())
}

/// -t/2 <= inf <= sup < t/2
pub(crate) fn value_check(t: &Rat, inf: &Rat, sup: &Rat) -> Result<(), BoundsFailure> {
    let half = t / rat(2);
    if inf < &-half.clone() || sup >= &half {
        let worst = if sup.abs() >= inf.abs() {
            sup.clone()
        } else {
            inf.clone()
        };
        return Err(BoundsFailure::new(
            OverflowKind::Value,
            format!(
                "interval [{}, {}] leaves the plaintext range",
                crate::rational::display(inf),
                crate::rational::display(sup)
            )
            ,
        )
        .with_quantities(worst, half));
    }
    Ok(())
}

fn noise_check(eps: &Rat, kappa: &Rat, what: &str) -> Result<(), BoundsFailure> {
    if eps > kappa {
        return Err(BoundsFailure::new(
            OverflowKind::Noise,
            format!("{what} noise exceeds the threshold"),
        )
        .with_quantities(eps.clone(), kappa.clone()));
    }
    Ok(())
}

fn sort_failure(detail: impl Into<alloc::string::String>) -> BoundsFailure {
    BoundsFailure::new(OverflowKind::Sort, detail)
}

// ---- BGV ----

#[derive(Debug, Clone)]
pub struct BgvBounds {
    pub t: Rat,
    pub chain: Vec<BigInt>,
    pub est: NoiseEstimator,
}

impl BgvBounds {
    /// Decryption threshold at a level: kappa_w = q_w / 2.
    pub fn kappa(&self, level: u32) -> Rat {
        rat_from_big(self.chain[level as usize].clone()) / rat(2)
    }

    /// Modswitch target cap l_w (configurable; defaults to kappa_w).
    pub fn cap(&self, level: u32) -> Rat {
        rat_from_big(self.chain[level as usize].clone()) * &self.est.ms_cap_ratio
    }

    fn common_level(&self, l1: u32, l2: u32) -> Result<u32, BoundsFailure> {
        if l1 != l2 {
            return Err(BoundsFailure::new(
                OverflowKind::Level,
                format!("operands at different levels ({l1} vs {l2})"),
            ));
        }
        Ok(l1)
    }

    pub fn add(&self, args: &[BoundArg]) -> Result<Bound, BoundsFailure> {
        match (&args[0].bound, &args[1].bound) {
            (
                Bound::Plain { inf: i1, sup: s1 },
                Bound::Plain { inf: i2, sup: s2 },
            ) => {
                let (inf, sup) = interval_add((i1, s1), (i2, s2));
                value_check(&self.t, &inf, &sup)?;
                Ok(Bound::Plain { inf, sup })
            }
            (
                Bound::BgvCipher {
                    inf: i1,
                    sup: s1,
                    noise: n1,
                    level: l1,
                },
                Bound::BgvCipher {
                    inf: i2,
                    sup: s2,
                    noise: n2,
                    level: l2,
                },
            ) => {
                let level = self.common_level(*l1, *l2)?;
                let (inf, sup) = interval_add((i1, s1), (i2, s2));
                let noise = n1 + n2;
                value_check(&self.t, &inf, &sup)?;
                noise_check(&noise, &self.kappa(level), "addition")?;
                Ok(Bound::BgvCipher {
                    inf,
                    sup,
                    noise,
                    level,
                })
            }
            (Bound::Plain { inf: i1, sup: s1 }, Bound::BgvCipher { inf, sup, noise, level })
            | (Bound::BgvCipher { inf, sup, noise, level }, Bound::Plain { inf: i1, sup: s1 }) => {
                // the plaintext carries no noise
                let (inf, sup) = interval_add((i1, s1), (inf, sup));
                value_check(&self.t, &inf, &sup)?;
                noise_check(noise, &self.kappa(*level), "addition")?;
                Ok(Bound::BgvCipher {
                    inf,
                    sup,
                    noise: noise.clone(),
                    level: *level,
                })
            }
            (a, b) => Err(sort_failure(format!(
                "(+) undefined on {} and {}",
                a.sort(),
                b.sort()
            ))),
        }
    }

    pub fn mul(&self, args: &[BoundArg]) -> Result<Bound, BoundsFailure> {
        match (&args[0].bound, &args[1].bound) {
            (
                Bound::Plain { inf: i1, sup: s1 },
                Bound::Plain { inf: i2, sup: s2 },
            ) => {
                let (inf, sup) = interval_mul((i1, s1), (i2, s2));
                value_check(&self.t, &inf, &sup)?;
                Ok(Bound::Plain { inf, sup })
            }
            (
                Bound::BgvCipher {
                    inf: i1,
                    sup: s1,
                    noise: n1,
                    level: l1,
                },
                Bound::BgvCipher {
                    inf: i2,
                    sup: s2,
                    noise: n2,
                    level: l2,
                },
            ) => {
                let level = self.common_level(*l1, *l2)?;
                let (inf, sup) = interval_mul((i1, s1), (i2, s2));
                value_check(&self.t, &inf, &sup)?;
                let noise = self.est.mul_cc.eval(n1, n2).ok_or_else(|| {
                    BoundsFailure::new(
                        OverflowKind::Noise,
                        "estimator table exceeded for cipher-cipher multiply",
                    )
                })?;
                noise_check(&noise, &self.kappa(level), "cipher-cipher multiply")?;
                Ok(Bound::BgvCipher {
                    inf,
                    sup,
                    noise,
                    level,
                })
            }
            (Bound::Plain { inf: i1, sup: s1 }, Bound::BgvCipher { inf, sup, noise, level })
            | (Bound::BgvCipher { inf, sup, noise, level }, Bound::Plain { inf: i1, sup: s1 }) => {
                let (inf, sup) = interval_mul((i1, s1), (inf, sup));
                value_check(&self.t, &inf, &sup)?;
                let grown = self.est.mul_pc(noise);
                noise_check(&grown, &self.kappa(*level), "plain-cipher multiply")?;
                Ok(Bound::BgvCipher {
                    inf,
                    sup,
                    noise: grown,
                    level: *level,
                })
            }
            (a, b) => Err(sort_failure(format!(
                "(*) undefined on {} and {}",
                a.sort(),
                b.sort()
            ))),
        }
    }

    pub fn modswitch(&self, args: &[BoundArg]) -> Result<Bound, BoundsFailure> {
        match &args[0].bound {
            Bound::BgvCipher {
                inf,
                sup,
                noise,
                level,
            } => {
                if *level == 0 {
                    return Err(BoundsFailure::new(
                        OverflowKind::Level,
                        "chain exhausted: cannot switch below level 0",
                    ));
                }
                let q_from = rat_from_big(self.chain[*level as usize].clone());
                let q_to = rat_from_big(self.chain[(*level - 1) as usize].clone());
                let switched = &q_to / &q_from * noise + &self.est.b_r;
                let cap = self.cap(*level - 1);
                if switched > cap {
                    return Err(BoundsFailure::new(
                        OverflowKind::Noise,
                        "switched noise exceeds the target level cap",
                    )
                    .with_quantities(switched, cap));
                }
                Ok(Bound::BgvCipher {
                    inf: inf.clone(),
                    sup: sup.clone(),
                    noise: switched,
                    level: *level - 1,
                })
            }
            other => Err(sort_failure(format!(
                "modswitch undefined on {}",
                other.sort()
            ))),
        }
    }

    pub fn scalar_mul(&self, args: &[BoundArg]) -> Result<Bound, BoundsFailure> {
        let n = scalar_of(&args[0])?;
        match &args[1].bound {
            Bound::BgvCipher {
                inf,
                sup,
                noise,
                level,
            } => {
                let (inf, sup) = interval_scale(&n, (inf, sup));
                value_check(&self.t, &inf, &sup)?;
                // noise domain floor stays at 1
                let scaled = (n.abs() * noise).max(rat(1));
                noise_check(&scaled, &self.kappa(*level), "scalar multiply")?;
                Ok(Bound::BgvCipher {
                    inf,
                    sup,
                    noise: scaled,
                    level: *level,
                })
            }
            other => Err(sort_failure(format!(
                "(.) needs a cipher right operand, got {}",
                other.sort()
            ))),
        }
    }
}

pub(crate) fn scalar_of(arg: &BoundArg) -> Result<Rat, BoundsFailure> {
    match (&arg.bound, &arg.scalar) {
        (Bound::Msg, Some(n)) => Ok(rat_from_big(n.clone())),
        _ => Err(sort_failure(
            "scalar multiplier must be an integer literal",
        )),
    }
}

// ---- BFV ----

#[derive(Debug, Clone)]
pub struct BfvBounds {
    pub t: Rat,
    /// Worst-case relative shift of a plaintext addition: the scaling
    /// Delta = floor(q/t) is misaligned from q/t by up to (q mod t)/q.
    pub plain_shift: Rat,
    pub est: NoiseEstimator,
}

impl BfvBounds {
    /// kappa = 1/2, independent of any level.
    pub fn kappa(&self) -> Rat {
        crate::rational::ratio(1, 2)
    }

    pub fn add(&self, args: &[BoundArg]) -> Result<Bound, BoundsFailure> {
        match (&args[0].bound, &args[1].bound) {
            (
                Bound::Plain { inf: i1, sup: s1 },
                Bound::Plain { inf: i2, sup: s2 },
            ) => {
                let (inf, sup) = interval_add((i1, s1), (i2, s2));
                value_check(&self.t, &inf, &sup)?;
                Ok(Bound::Plain { inf, sup })
            }
            (
                Bound::BfvCipher {
                    inf: i1,
                    sup: s1,
                    noise: n1,
                },
                Bound::BfvCipher {
                    inf: i2,
                    sup: s2,
                    noise: n2,
                },
            ) => {
                let (inf, sup) = interval_add((i1, s1), (i2, s2));
                let noise = n1 + n2;
                value_check(&self.t, &inf, &sup)?;
                noise_check(&noise, &self.kappa(), "addition")?;
                Ok(Bound::BfvCipher { inf, sup, noise })
            }
            (Bound::Plain { inf: i1, sup: s1 }, Bound::BfvCipher { inf, sup, noise })
            | (Bound::BfvCipher { inf, sup, noise }, Bound::Plain { inf: i1, sup: s1 }) => {
                let (inf, sup) = interval_add((i1, s1), (inf, sup));
                value_check(&self.t, &inf, &sup)?;
                let noise = noise + &self.plain_shift;
                noise_check(&noise, &self.kappa(), "addition")?;
                Ok(Bound::BfvCipher { inf, sup, noise })
            }
            (a, b) => Err(sort_failure(format!(
                "(+) undefined on {} and {}",
                a.sort(),
                b.sort()
            ))),
        }
    }

    pub fn mul(&self, args: &[BoundArg]) -> Result<Bound, BoundsFailure> {
        match (&args[0].bound, &args[1].bound) {
            (
                Bound::Plain { inf: i1, sup: s1 },
                Bound::Plain { inf: i2, sup: s2 },
            ) => {
                let (inf, sup) = interval_mul((i1, s1), (i2, s2));
                value_check(&self.t, &inf, &sup)?;
                Ok(Bound::Plain { inf, sup })
            }
            (
                Bound::BfvCipher {
                    inf: i1,
                    sup: s1,
                    noise: n1,
                },
                Bound::BfvCipher {
                    inf: i2,
                    sup: s2,
                    noise: n2,
                },
            ) => {
                let (inf, sup) = interval_mul((i1, s1), (i2, s2));
                value_check(&self.t, &inf, &sup)?;
                let noise = self.est.mul_cc.eval(n1, n2).ok_or_else(|| {
                    BoundsFailure::new(
                        OverflowKind::Noise,
                        "estimator table exceeded for cipher-cipher multiply",
                    )
                })?;
                noise_check(&noise, &self.kappa(), "cipher-cipher multiply")?;
                Ok(Bound::BfvCipher { inf, sup, noise })
            }
            (Bound::Plain { inf: i1, sup: s1 }, Bound::BfvCipher { inf, sup, noise })
            | (Bound::BfvCipher { inf, sup, noise }, Bound::Plain { inf: i1, sup: s1 }) => {
                let (inf, sup) = interval_mul((i1, s1), (inf, sup));
                value_check(&self.t, &inf, &sup)?;
                let grown = self.est.mul_pc(noise);
                noise_check(&grown, &self.kappa(), "plain-cipher multiply")?;
                Ok(Bound::BfvCipher {
                    inf,
                    sup,
                    noise: grown,
                })
            }
            (a, b) => Err(sort_failure(format!(
                "(*) undefined on {} and {}",
                a.sort(),
                b.sort()
            ))),
        }
    }

    pub fn scalar_mul(&self, args: &[BoundArg]) -> Result<Bound, BoundsFailure> {
        let n = scalar_of(&args[0])?;
        match &args[1].bound {
            Bound::BfvCipher { inf, sup, noise } => {
                let (inf, sup) = interval_scale(&n, (inf, sup));
                value_check(&self.t, &inf, &sup)?;
                let scaled = n.abs() * noise;
                noise_check(&scaled, &self.kappa(), "scalar multiply")?;
                Ok(Bound::BfvCipher {
                    inf,
                    sup,
                    noise: scaled,
                })
            }
            other => Err(sort_failure(format!(
                "(.) needs a cipher right operand, got {}",
                other.sort()
            ))),
        }
    }
}

// ---- TFHE ----

#[derive(Debug, Clone)]
pub struct TfheBounds {
    pub t: Rat,
    pub q: Rat,
    /// Fresh noise after a programmable bootstrap (eps_b).
    pub pbs_noise: Rat,
    pub est: NoiseEstimator,
}

impl TfheBounds {
    pub fn add_threshold(&self) -> Rat {
        &self.q / (rat(2) * &self.t)
    }

    pub fn mul_threshold(&self) -> Rat {
        &self.q / &self.t
    }

    pub fn add(&self, args: &[BoundArg]) -> Result<Bound, BoundsFailure> {
        match (&args[0].bound, &args[1].bound) {
            (
                Bound::Plain { inf: i1, sup: s1 },
                Bound::Plain { inf: i2, sup: s2 },
            ) => {
                let (inf, sup) = interval_add((i1, s1), (i2, s2));
                value_check(&self.t, &inf, &sup)?;
                Ok(Bound::Plain { inf, sup })
            }
            (
                Bound::TfheCipher {
                    id: id1,
                    inf: i1,
                    sup: s1,
                    noise: n1,
                },
                Bound::TfheCipher {
                    id: id2,
                    inf: i2,
                    sup: s2,
                    noise: n2,
                },
            ) => {
                if *id1 == TfheId::Rgsw || *id2 == TfheId::Rgsw {
                    return Err(sort_failure("(+) is undefined on RGSW ciphertexts"));
                }
                let (inf, sup) = interval_add((i1, s1), (i2, s2));
                let noise = n1 + n2;
                value_check(&self.t, &inf, &sup)?;
                noise_check(&noise, &self.add_threshold(), "addition")?;
                Ok(Bound::TfheCipher {
                    id: (*id1).max(*id2),
                    inf,
                    sup,
                    noise,
                })
            }
            (Bound::Plain { inf: i1, sup: s1 }, Bound::TfheCipher { id, inf, sup, noise })
            | (Bound::TfheCipher { id, inf, sup, noise }, Bound::Plain { inf: i1, sup: s1 }) => {
                if *id == TfheId::Rgsw {
                    return Err(sort_failure("(+) is undefined on RGSW ciphertexts"));
                }
                let (inf, sup) = interval_add((i1, s1), (inf, sup));
                value_check(&self.t, &inf, &sup)?;
                noise_check(noise, &self.add_threshold(), "addition")?;
                Ok(Bound::TfheCipher {
                    id: *id,
                    inf,
                    sup,
                    noise: noise.clone(),
                })
            }
            (a, b) => Err(sort_failure(format!(
                "(+) undefined on {} and {}",
                a.sort(),
                b.sort()
            ))),
        }
    }

    /// `(*)` exists only on plaintexts for TFHE; ciphertext products go
    /// through `(#)` and `(@)`.
    pub fn mul(&self, args: &[BoundArg]) -> Result<Bound, BoundsFailure> {
        match (&args[0].bound, &args[1].bound) {
            (
                Bound::Plain { inf: i1, sup: s1 },
                Bound::Plain { inf: i2, sup: s2 },
            ) => {
                let (inf, sup) = interval_mul((i1, s1), (i2, s2));
                value_check(&self.t, &inf, &sup)?;
                Ok(Bound::Plain { inf, sup })
            }
            (a, b) => Err(sort_failure(format!(
                "(*) under TFHE is plain-plain only, got {} and {}",
                a.sort(),
                b.sort()
            ))),
        }
    }

    pub fn box_mul(&self, args: &[BoundArg]) -> Result<Bound, BoundsFailure> {
        match (&args[0].bound, &args[1].bound) {
            (
                Bound::TfheCipher {
                    id: TfheId::Rgsw,
                    inf: i1,
                    sup: s1,
                    noise: n1,
                },
                Bound::TfheCipher {
                    id: TfheId::Rgsw,
                    inf: i2,
                    sup: s2,
                    noise: n2,
                },
            ) => {
                let (inf, sup) = interval_mul((i1, s1), (i2, s2));
                let noise = self.est.tfhe_box.eval(n1, n2).ok_or_else(|| {
                    BoundsFailure::new(OverflowKind::Noise, "estimator table exceeded for (#)")
                })?;
                noise_check(&noise, &self.mul_threshold(), "RGSW product")?;
                Ok(Bound::TfheCipher {
                    id: TfheId::Rgsw,
                    inf,
                    sup,
                    noise,
                })
            }
            (a, b) => Err(sort_failure(format!(
                "(#) takes RGSW operands, got {a} and {b}"
            ))),
        }
    }

    pub fn ext_mul(&self, args: &[BoundArg]) -> Result<Bound, BoundsFailure> {
        match (&args[0].bound, &args[1].bound) {
            (
                Bound::TfheCipher {
                    id: TfheId::Rgsw,
                    inf: i1,
                    sup: s1,
                    noise: n1,
                },
                Bound::TfheCipher {
                    id: id2 @ (TfheId::Lwe | TfheId::Rlwe),
                    inf: i2,
                    sup: s2,
                    noise: n2,
                },
            ) => {
                let growth = match id2 {
                    TfheId::Lwe => &self.est.tfhe_ext_lwe,
                    _ => &self.est.tfhe_ext_rlwe,
                };
                let (inf, sup) = interval_mul((i1, s1), (i2, s2));
                let noise = growth.eval(n1, n2).ok_or_else(|| {
                    BoundsFailure::new(OverflowKind::Noise, "estimator table exceeded for (@)")
                })?;
                noise_check(&noise, &self.mul_threshold(), "external product")?;
                Ok(Bound::TfheCipher {
                    id: TfheId::Rlwe,
                    inf,
                    sup,
                    noise,
                })
            }
            (a, b) => Err(sort_failure(format!(
                "(@) takes RGSW x (LWE|RLWE), got {a} and {b}"
            ))),
        }
    }

    pub fn scalar_mul(&self, args: &[BoundArg]) -> Result<Bound, BoundsFailure> {
        let n = scalar_of(&args[0])?;
        match &args[1].bound {
            Bound::TfheCipher {
                id,
                inf,
                sup,
                noise,
            } => {
                let (inf, sup) = interval_scale(&n, (inf, sup));
                value_check(&self.t, &inf, &sup)?;
                let scaled = n.abs() * noise;
                noise_check(&scaled, &self.mul_threshold(), "scalar multiply")?;
                Ok(Bound::TfheCipher {
                    id: *id,
                    inf,
                    sup,
                    noise: scaled,
                })
            }
            other => Err(sort_failure(format!(
                "(.) needs a cipher right operand, got {}",
                other.sort()
            ))),
        }
    }

    pub fn pbs(&self, args: &[BoundArg]) -> Result<Bound, BoundsFailure> {
        match (&args[0].bound, &args[1].bound) {
            (
                Bound::TfheCipher {
                    id: TfheId::Rgsw,
                    inf: lut_inf,
                    sup: lut_sup,
                    ..
                },
                Bound::TfheCipher {
                    id: TfheId::Lwe,
                    inf,
                    sup,
                    ..
                },
            ) => {
                value_check(&self.t, lut_inf, lut_sup).map_err(|mut e| {
                    e.detail = format!("LUT {}", e.detail);
                    e
                })?;
                // max(|inf|, |sup|) <= t/2, i.e. log2 of the magnitude is
                // at most log2(t) - 1
                let half = &self.t / rat(2);
                let mag = inf.abs().max(sup.abs());
                if mag > half {
                    return Err(BoundsFailure::new(
                        OverflowKind::Value,
                        "pbs input magnitude exceeds t/2",
                    )
                    .with_quantities(mag, half));
                }
                Ok(Bound::TfheCipher {
                    id: TfheId::Lwe,
                    inf: inf.clone(),
                    sup: sup.clone(),
                    noise: self.pbs_noise.clone(),
                })
            }
            (a, b) => Err(sort_failure(format!(
                "pbs takes (RGSW lut, LWE input), got {a} and {b}"
            ))),
        }
    }

    /// Selector bounds as the two-external-products-plus-add composition:
    /// interval is the branch hull, noise is g(eps_c, eps_1) + g(eps_c,
    /// eps_0) under both the external-product and addition thresholds.
    pub fn cmux(&self, args: &[BoundArg]) -> Result<Bound, BoundsFailure> {
        match (&args[0].bound, &args[1].bound, &args[2].bound) {
            (
                Bound::TfheCipher {
                    id: TfheId::Rgsw,
                    noise: nc,
                    ..
                },
                Bound::TfheCipher {
                    id: id1 @ (TfheId::Lwe | TfheId::Rlwe),
                    inf: i1,
                    sup: s1,
                    noise: n1,
                },
                Bound::TfheCipher {
                    id: id0 @ (TfheId::Lwe | TfheId::Rlwe),
                    inf: i0,
                    sup: s0,
                    noise: n0,
                },
            ) => {
                let growth = |id: &TfheId, n: &Rat| {
                    let g = match id {
                        TfheId::Lwe => &self.est.tfhe_ext_lwe,
                        _ => &self.est.tfhe_ext_rlwe,
                    };
                    g.eval(nc, n).ok_or_else(|| {
                        BoundsFailure::new(
                            OverflowKind::Noise,
                            "estimator table exceeded for cmux",
                        )
                    })
                };
                let g1 = growth(id1, n1)?;
                let g0 = growth(id0, n0)?;
                noise_check(&g1, &self.mul_threshold(), "cmux branch product")?;
                noise_check(&g0, &self.mul_threshold(), "cmux branch product")?;
                let noise = &g1 + &g0;
                noise_check(&noise, &self.add_threshold(), "cmux combination")?;
                let (inf, sup) = interval_hull((i1, s1), (i0, s0));
                value_check(&self.t, &inf, &sup)?;
                Ok(Bound::TfheCipher {
                    id: TfheId::Rlwe,
                    inf,
                    sup,
                    noise,
                })
            }
            (a, b, c) => Err(sort_failure(format!(
                "cmux takes (RGSW, LWE|RLWE, LWE|RLWE), got {a}, {b}, {c}"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SchemeKind;
    use crate::schemes::estimator::{make_estimator, EstimatorParams};

    fn bgv_ctx() -> BgvBounds {
        let params = EstimatorParams {
            scheme: SchemeKind::Bgv,
            t: BigInt::from(16),
            d: 16,
            q_top: BigInt::from(1u64 << 45),
            err_width: 1,
        };
        BgvBounds {
            t: rat(16),
            chain: alloc::vec![
                BigInt::from(1u64 << 25),
                BigInt::from(1u64 << 35),
                BigInt::from(1u64 << 45),
            ],
            est: make_estimator("worst_case", &params, &Default::default()).unwrap(),
        }
    }

    fn cb(inf: i64, sup: i64, noise: i64, level: u32) -> BoundArg {
        BoundArg::plain(Bound::BgvCipher {
            inf: rat(inf),
            sup: rat(sup),
            noise: rat(noise),
            level,
        })
    }

    fn pb(inf: i64, sup: i64) -> BoundArg {
        BoundArg::plain(Bound::Plain {
            inf: rat(inf),
            sup: rat(sup),
        })
    }

    #[test]
    fn add_row_from_the_table() {
        // (0,3,2,w) + (1,4,3,w) with t=16 -> (1,7,5,w)
        let ctx = bgv_ctx();
        let out = ctx.add(&[cb(0, 3, 2, 1), cb(1, 4, 3, 1)]).unwrap();
        assert_eq!(
            out,
            Bound::BgvCipher {
                inf: rat(1),
                sup: rat(7),
                noise: rat(5),
                level: 1
            }
        );
    }

    #[test]
    fn add_value_overflow_is_strict_at_half_t() {
        // sup1 + sup2 = 8 = t/2 must be rejected
        let ctx = bgv_ctx();
        let err = ctx.add(&[cb(0, 7, 2, 1), cb(0, 1, 2, 1)]).unwrap_err();
        assert_eq!(err.kind, OverflowKind::Value);
    }

    #[test]
    fn plain_add_keeps_cipher_noise() {
        let ctx = bgv_ctx();
        let out = ctx.add(&[pb(0, 0), cb(0, 3, 2, 1)]).unwrap();
        assert_eq!(
            out,
            Bound::BgvCipher {
                inf: rat(0),
                sup: rat(3),
                noise: rat(2),
                level: 1
            }
        );
    }

    #[test]
    fn mul_interval_is_the_four_product_hull() {
        // [-1,2] * [-3,1] -> [-6,3]
        let ctx = bgv_ctx();
        let out = ctx.mul(&[cb(-1, 2, 1, 0), cb(-3, 1, 1, 0)]).unwrap();
        let (inf, sup) = out.interval().unwrap();
        assert_eq!((inf.clone(), sup.clone()), (rat(-6), rat(3)));
    }

    #[test]
    fn mul_noise_threshold() {
        // eps1 = eps2 = 2^10 -> f = 2^20, defined only if 2^20 <= q_w/2
        let ctx = bgv_ctx();
        let big = 1 << 10;
        // level 0: q = 2^25, kappa = 2^24, 2^20 fits
        assert!(ctx.mul(&[cb(0, 1, big, 0), cb(0, 1, big, 0)]).is_ok());
        // eps = 2^13 each -> 2^26 > 2^24 fails
        let err = ctx
            .mul(&[cb(0, 1, 1 << 13, 0), cb(0, 1, 1 << 13, 0)])
            .unwrap_err();
        assert_eq!(err.kind, OverflowKind::Noise);
    }

    #[test]
    fn plain_plain_unit_interval_is_a_fixed_point() {
        let ctx = bgv_ctx();
        let out = ctx.mul(&[pb(0, 1), pb(0, 1)]).unwrap();
        assert_eq!(
            out,
            Bound::Plain {
                inf: rat(0),
                sup: rat(1)
            }
        );
    }

    #[test]
    fn level_mismatch_rejected() {
        let ctx = bgv_ctx();
        let err = ctx.add(&[cb(0, 1, 1, 0), cb(0, 1, 1, 1)]).unwrap_err();
        assert_eq!(err.kind, OverflowKind::Level);
    }

    #[test]
    fn modswitch_row() {
        // eps = 1000, q_w/q_{w-1} = 2^10: eps' = 1000/1024 + B_r
        let ctx = bgv_ctx();
        let out = ctx.modswitch(&[cb(0, 1, 1000, 1)]).unwrap();
        match out {
            Bound::BgvCipher {
                inf,
                sup,
                noise,
                level,
            } => {
                assert_eq!(level, 0);
                assert_eq!((inf, sup), (rat(0), rat(1)));
                let expected = crate::rational::ratio(1000, 1024) + ctx.est.b_r.clone();
                assert_eq!(noise, expected);
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn modswitch_bottom_of_chain() {
        let ctx = bgv_ctx();
        let err = ctx.modswitch(&[cb(0, 1, 1000, 0)]).unwrap_err();
        assert_eq!(err.kind, OverflowKind::Level);
        assert!(err.detail.contains("chain exhausted"), "{err}");
    }

    #[test]
    fn bfv_threshold_is_half() {
        let params = EstimatorParams {
            scheme: SchemeKind::Bfv,
            t: BigInt::from(16),
            d: 16,
            q_top: BigInt::from(1u64 << 40),
            err_width: 1,
        };
        let ctx = BfvBounds {
            t: rat(16),
            plain_shift: rat(0),
            est: make_estimator("worst_case", &params, &Default::default()).unwrap(),
        };
        let mk = |n: Rat| {
            BoundArg::plain(Bound::BfvCipher {
                inf: rat(0),
                sup: rat(1),
                noise: n,
            })
        };
        use crate::rational::ratio;
        // 0.2 + 0.2 = 0.4 <= 1/2 defined
        let ok = ctx.add(&[mk(ratio(1, 5)), mk(ratio(1, 5))]).unwrap();
        assert_eq!(ok.noise().unwrap(), &ratio(2, 5));
        // 0.3 + 0.3 = 0.6 > 1/2 undefined
        let err = ctx.add(&[mk(ratio(3, 10)), mk(ratio(3, 10))]).unwrap_err();
        assert_eq!(err.kind, OverflowKind::Noise);
    }

    fn tfhe_ctx(p: u32) -> TfheBounds {
        let params = EstimatorParams {
            scheme: SchemeKind::Tfhe,
            t: BigInt::from(1u64 << p),
            d: 1,
            q_top: BigInt::from(1u64 << 50),
            err_width: 1,
        };
        TfheBounds {
            t: rat(1 << p),
            q: rat(1i64 << 50),
            pbs_noise: rat(16),
            est: make_estimator("worst_case", &params, &Default::default()).unwrap(),
        }
    }

    fn tb(id: TfheId, inf: i64, sup: i64, noise: i64) -> BoundArg {
        BoundArg::plain(Bound::TfheCipher {
            id,
            inf: rat(inf),
            sup: rat(sup),
            noise: rat(noise),
        })
    }

    #[test]
    fn tfhe_scalar_row() {
        // n = -3 on (LWE, 1, 2, eps) -> (LWE, -6, -3, 3*eps)
        let ctx = tfhe_ctx(4);
        let scalar = BoundArg {
            bound: Bound::Msg,
            scalar: Some(BigInt::from(-3)),
        };
        let out = ctx.scalar_mul(&[scalar, tb(TfheId::Lwe, 1, 2, 2)]).unwrap();
        assert_eq!(
            out,
            Bound::TfheCipher {
                id: TfheId::Lwe,
                inf: rat(-6),
                sup: rat(-3),
                noise: rat(6),
            }
        );
    }

    #[test]
    fn tfhe_add_id_is_max_on_all_legal_combinations() {
        let ctx = tfhe_ctx(4);
        for (a, b, want) in [
            (TfheId::Lwe, TfheId::Lwe, TfheId::Lwe),
            (TfheId::Lwe, TfheId::Rlwe, TfheId::Rlwe),
            (TfheId::Rlwe, TfheId::Lwe, TfheId::Rlwe),
            (TfheId::Rlwe, TfheId::Rlwe, TfheId::Rlwe),
        ] {
            let out = ctx.add(&[tb(a, 0, 1, 1), tb(b, 0, 1, 1)]).unwrap();
            match out {
                Bound::TfheCipher { id, .. } => assert_eq!(id, want),
                other => panic!("unexpected {other}"),
            }
        }
    }

    #[test]
    fn tfhe_pbs_resets_noise_and_keeps_interval() {
        let ctx = tfhe_ctx(4);
        let lut = tb(TfheId::Rgsw, 0, 7, 1);
        let input = tb(TfheId::Lwe, -4, 3, 1 << 20);
        let out = ctx.pbs(&[lut, input]).unwrap();
        assert_eq!(
            out,
            Bound::TfheCipher {
                id: TfheId::Lwe,
                inf: rat(-4),
                sup: rat(3),
                noise: rat(16),
            }
        );
    }

    #[test]
    fn tfhe_ext_mul_id_discipline() {
        let ctx = tfhe_ctx(4);
        let err = ctx
            .ext_mul(&[tb(TfheId::Lwe, 0, 1, 1), tb(TfheId::Lwe, 0, 1, 1)])
            .unwrap_err();
        assert_eq!(err.kind, OverflowKind::Sort);
        let ok = ctx
            .ext_mul(&[tb(TfheId::Rgsw, 0, 1, 2), tb(TfheId::Rlwe, 0, 1, 3)])
            .unwrap();
        match ok {
            Bound::TfheCipher { id, noise, .. } => {
                assert_eq!(id, TfheId::Rlwe);
                assert_eq!(noise, rat(6));
            }
            other => panic!("unexpected {other}"),
        }
    }
}
