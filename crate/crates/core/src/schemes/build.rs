//! Wires the concrete scheme instances: toy-scheme native semantics,
//! bounds maps, message semantics, oracle hooks, and the samplers the
//! axiom harness draws from.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_bigint::BigInt;
use rand::Rng;
use rand::RngCore;

use crate::ir::{InputKind, OpKind};
use crate::model::{
    ArgSamplerFn, Bound, BoundArg, BoundSamplerFn, EvalError, MsgValue, OperatorSpec, Oracle,
    SchemeKind, SchemeModel, Sort, TfheId, Value,
};
use crate::rational::{rat, rat_from_big, Rat};
use crate::refscheme::{self, center_mod, BgvKeys, BfvKeys, Poly, TfheParams, ToyParams};

use super::bounds::{BfvBounds, BgvBounds, TfheBounds};
use super::estimator::NoiseEstimator;
use super::msgops;

fn stuck(op: OpKind, detail: impl Into<alloc::string::String>) -> EvalError {
    EvalError::SortMismatch {
        op,
        detail: detail.into(),
    }
}

fn binary_hom_signature(sorts: &[Sort]) -> Option<Sort> {
    match sorts {
        [Sort::Plain, Sort::Plain] => Some(Sort::Plain),
        [Sort::Plain, Sort::Cipher]
        | [Sort::Cipher, Sort::Plain]
        | [Sort::Cipher, Sort::Cipher] => Some(Sort::Cipher),
        _ => None,
    }
}

/// Declared fresh-encryption noise bound: the residual |t(e*u + e0 +
/// e1*s)| is at most t*w*(2d+1).
pub fn bgv_fresh_noise(params: &ToyParams) -> Rat {
    let t = rat_from_big(params.t.clone());
    let w = rat(i64::from(params.err_width.max(1)));
    &t * &w * rat(2 * params.d as i64 + 1)
}

/// Declared fresh relative noise for BFV: t*(w*(2d+1) + t/2) / q.
pub fn bfv_fresh_noise(params: &ToyParams) -> Rat {
    let t = rat_from_big(params.t.clone());
    let w = rat(i64::from(params.err_width.max(1)));
    let q = rat_from_big(params.chain[0].clone());
    &t * (&w * rat(2 * params.d as i64 + 1) + &t / rat(2)) / &q
}

fn decode_scalar(t: BigInt) -> Arc<dyn Fn(&Poly) -> MsgValue + Send + Sync> {
    Arc::new(move |p: &Poly| alloc::vec![center_mod(&p.coeffs[0], &t)])
}

fn encode_scalar(t: BigInt, d: usize) -> Arc<dyn Fn(&BigInt) -> Poly + Send + Sync> {
    Arc::new(move |v: &BigInt| Poly::from_scalar(&center_mod(v, &t), d))
}

fn shrink_interval(inf: &Rat, sup: &Rat, rng: &mut dyn RngCore) -> (Rat, Rat) {
    let width = sup - inf;
    let a: i64 = rng.gen_range(0..=8);
    let b: i64 = rng.gen_range(0..=(8 - a.min(8)));
    let inf2 = inf + &width * rat(a) / rat(16);
    let sup2 = sup - &width * rat(b) / rat(16);
    (inf2, sup2)
}

/// Pointwise-smaller variant of a bound tuple, for the downwards-closed
/// harness. Scalars (operator indices) are preserved.
pub fn shrink_bound_arg(arg: &BoundArg, rng: &mut dyn RngCore) -> BoundArg {
    let k: i64 = rng.gen_range(0..=16);
    let bound = match &arg.bound {
        Bound::Msg => Bound::Msg,
        Bound::Plain { inf, sup } => {
            let (inf, sup) = shrink_interval(inf, sup, rng);
            Bound::Plain { inf, sup }
        }
        Bound::BgvCipher {
            inf,
            sup,
            noise,
            level,
        } => {
            let (inf, sup) = shrink_interval(inf, sup, rng);
            let noise = rat(1) + (noise - rat(1)).max(rat(0)) * rat(k) / rat(16);
            Bound::BgvCipher {
                inf,
                sup,
                noise,
                level: *level,
            }
        }
        Bound::BfvCipher { inf, sup, noise } => {
            let (inf, sup) = shrink_interval(inf, sup, rng);
            Bound::BfvCipher {
                inf,
                sup,
                noise: noise * rat(k) / rat(16),
            }
        }
        Bound::TfheCipher {
            id,
            inf,
            sup,
            noise,
        } => {
            let (inf, sup) = shrink_interval(inf, sup, rng);
            Bound::TfheCipher {
                id: *id,
                inf,
                sup,
                noise: noise * rat(k) / rat(16),
            }
        }
    };
    BoundArg {
        bound,
        scalar: arg.scalar.clone(),
    }
}

// ---- BGV ----

struct BgvWiring {
    params: Arc<ToyParams>,
    keys: Option<Arc<BgvKeys>>,
}

impl BgvWiring {
    fn native_add(&self) -> crate::model::NativeFn {
        let params = self.params.clone();
        Arc::new(move |args: &[Value]| match (&args[0], &args[1]) {
            (Value::Plain(a), Value::Plain(b)) => Ok(Value::Plain(a.add(b, &params.t))),
            (Value::BgvCipher(a), Value::BgvCipher(b)) => refscheme::bgv::hom_add(a, b, &params)
                .map(Value::BgvCipher)
                .map_err(|e| EvalError::Stuck {
                    detail: format!("{e}"),
                }),
            (Value::Plain(p), Value::BgvCipher(c)) | (Value::BgvCipher(c), Value::Plain(p)) => {
                Ok(Value::BgvCipher(refscheme::bgv::hom_add_plain(c, p, &params)))
            }
            _ => Err(stuck(OpKind::Add, "needs plain/cipher operands")),
        })
    }

    fn native_mul(&self) -> crate::model::NativeFn {
        let params = self.params.clone();
        let keys = self.keys.clone();
        Arc::new(move |args: &[Value]| match (&args[0], &args[1]) {
            (Value::Plain(a), Value::Plain(b)) => Ok(Value::Plain(a.mul(b, &params.t))),
            (Value::BgvCipher(a), Value::BgvCipher(b)) => {
                let keys = keys
                    .as_ref()
                    .ok_or(EvalError::OracleRequired("cipher multiplication"))?;
                refscheme::bgv::hom_mul(keys, a, b)
                    .map(Value::BgvCipher)
                    .map_err(|e| EvalError::Stuck {
                        detail: format!("{e}"),
                    })
            }
            (Value::Plain(p), Value::BgvCipher(c)) | (Value::BgvCipher(c), Value::Plain(p)) => {
                Ok(Value::BgvCipher(refscheme::bgv::hom_mul_plain(c, p, &params)))
            }
            _ => Err(stuck(OpKind::Mul, "needs plain/cipher operands")),
        })
    }

    fn native_scalar(&self) -> crate::model::NativeFn {
        let params = self.params.clone();
        Arc::new(move |args: &[Value]| {
            let n = args[0]
                .msg_scalar()
                .ok_or_else(|| stuck(OpKind::ScalarMul, "multiplier must be a message scalar"))?;
            match &args[1] {
                Value::BgvCipher(c) => Ok(Value::BgvCipher(refscheme::bgv::hom_scalar_mul(
                    c, n, &params,
                ))),
                _ => Err(stuck(OpKind::ScalarMul, "needs a cipher right operand")),
            }
        })
    }

    fn native_modswitch(&self) -> crate::model::NativeFn {
        let params = self.params.clone();
        Arc::new(move |args: &[Value]| match &args[0] {
            Value::BgvCipher(c) => refscheme::bgv::hom_modswitch(c, &params)
                .map(Value::BgvCipher)
                .map_err(|e| EvalError::Stuck {
                    detail: format!("{e}"),
                }),
            _ => Err(stuck(OpKind::ModSwitch, "needs a cipher operand")),
        })
    }
}

fn sample_small(rng: &mut dyn RngCore, max_abs: i64) -> BigInt {
    BigInt::from(rng.gen_range(-max_abs..=max_abs))
}

/// Build the BGV model. Pass keys to enable oracle mode (native cipher
/// multiplication, measurement, axiom sampling); without keys the model
/// supports exactly what static checking needs.
pub fn build_bgv(
    params: ToyParams,
    est: NoiseEstimator,
    keys: Option<Arc<BgvKeys>>,
) -> SchemeModel {
    let params = Arc::new(params);
    let bounds = Arc::new(BgvBounds {
        t: rat_from_big(params.t.clone()),
        chain: params.chain.clone(),
        est,
    });
    let wiring = BgvWiring {
        params: params.clone(),
        keys: keys.clone(),
    };
    let t = params.t.clone();
    let d = params.d;
    let top = params.top_level();

    let mut ops = BTreeMap::new();

    // sampler helpers capture keys
    let sample_cipher = {
        let keys = keys.clone();
        let params = params.clone();
        move |rng: &mut dyn RngCore, level: u32, max_abs: i64, extra_adds: usize| -> Value {
            let keys = keys.as_ref().expect("sampler requires keys");
            let v = sample_small(rng, max_abs);
            let p = Poly::from_scalar(&center_mod(&v, &params.t), params.d);
            let mut ct = refscheme::bgv::encrypt(keys, &p, level, rng);
            for _ in 0..extra_adds {
                let v2 = sample_small(rng, max_abs.min(1));
                let p2 = Poly::from_scalar(&center_mod(&v2, &params.t), params.d);
                let fresh = refscheme::bgv::encrypt(keys, &p2, level, rng);
                ct = refscheme::bgv::hom_add(&ct, &fresh, &params).unwrap();
            }
            Value::BgvCipher(ct)
        }
    };
    let sample_plain = {
        let params = params.clone();
        move |rng: &mut dyn RngCore, max_abs: i64| -> Value {
            let v = sample_small(rng, max_abs);
            Value::Plain(Poly::from_scalar(&center_mod(&v, &params.t), params.d))
        }
    };

    let arg_sampler = |op: OpKind| -> Option<ArgSamplerFn> {
        keys.as_ref()?;
        let sample_cipher = sample_cipher.clone();
        let sample_plain = sample_plain.clone();
        let top = top;
        Some(Arc::new(move |rng: &mut dyn RngCore| -> Vec<Value> {
            let level = rng.gen_range(0..=top);
            match op {
                OpKind::Add => {
                    let case = rng.gen_range(0..4u8);
                    let extra = rng.gen_range(0..2usize);
                    match case {
                        0 => alloc::vec![
                            sample_cipher(&mut *rng, level, 3, extra),
                            sample_cipher(&mut *rng, level, 3, 0)
                        ],
                        1 => alloc::vec![sample_plain(&mut *rng, 3), sample_cipher(&mut *rng, level, 3, extra)],
                        2 => alloc::vec![sample_cipher(&mut *rng, level, 3, extra), sample_plain(&mut *rng, 3)],
                        _ => alloc::vec![sample_plain(&mut *rng, 3), sample_plain(&mut *rng, 3)],
                    }
                }
                OpKind::Mul => {
                    let case = rng.gen_range(0..4u8);
                    match case {
                        0 => alloc::vec![
                            sample_cipher(&mut *rng, level, 2, 0),
                            sample_cipher(&mut *rng, level, 2, 0)
                        ],
                        1 => alloc::vec![sample_plain(&mut *rng, 2), sample_cipher(&mut *rng, level, 2, 0)],
                        2 => alloc::vec![sample_cipher(&mut *rng, level, 2, 0), sample_plain(&mut *rng, 2)],
                        _ => alloc::vec![sample_plain(&mut *rng, 2), sample_plain(&mut *rng, 2)],
                    }
                }
                OpKind::ScalarMul => {
                    let n = sample_small(rng, 3);
                    alloc::vec![
                        Value::Msg(alloc::vec![n]),
                        sample_cipher(&mut *rng, level, 2, 0)
                    ]
                }
                OpKind::ModSwitch => {
                    let lvl = if top == 0 { 0 } else { rng.gen_range(1..=top) };
                    {
                        let extra = rng.gen_range(0..3usize);
                        alloc::vec![sample_cipher(&mut *rng, lvl, 3, extra)]
                    }
                }
                _ => Vec::new(),
            }
        }))
    };

    let bound_sampler = |op: OpKind| -> Option<BoundSamplerFn> {
        let t = rat_from_big(params.t.clone());
        let chain_len = params.chain.len() as u32;
        Some(Arc::new(move |rng: &mut dyn RngCore| -> Vec<BoundArg> {
            let quarter = &t / rat(4);
            let cipher = |rng: &mut dyn RngCore, level: u32| -> BoundArg {
                let a: i64 = rng.gen_range(-8..=8);
                let b: i64 = rng.gen_range(a..=8);
                let inf = &quarter * rat(a) / rat(8);
                let sup = &quarter * rat(b) / rat(8);
                let noise = rat(1) + rat(2).pow(rng.gen_range(0..20) as i32) * rat(rng.gen_range(1..=16)) / rat(16);
                BoundArg::plain(Bound::BgvCipher {
                    inf,
                    sup,
                    noise,
                    level,
                })
            };
            let plain = |rng: &mut dyn RngCore| -> BoundArg {
                let a: i64 = rng.gen_range(-8..=8);
                let b: i64 = rng.gen_range(a..=8);
                BoundArg::plain(Bound::Plain {
                    inf: &quarter * rat(a) / rat(8),
                    sup: &quarter * rat(b) / rat(8),
                })
            };
            let level = rng.gen_range(0..chain_len);
            match op {
                OpKind::Add | OpKind::Mul => match rng.gen_range(0..4u8) {
                    0 => alloc::vec![cipher(&mut *rng, level), cipher(&mut *rng, level)],
                    1 => alloc::vec![plain(rng), cipher(&mut *rng, level)],
                    2 => alloc::vec![cipher(&mut *rng, level), plain(rng)],
                    _ => alloc::vec![plain(rng), plain(rng)],
                },
                OpKind::ScalarMul => alloc::vec![
                    BoundArg {
                        bound: Bound::Msg,
                        scalar: Some(sample_small(rng, 3)),
                    },
                    cipher(&mut *rng, level)
                ],
                OpKind::ModSwitch => {
                    let lvl = if chain_len == 1 {
                        0
                    } else {
                        rng.gen_range(1..chain_len)
                    };
                    alloc::vec![cipher(&mut *rng, lvl)]
                }
                _ => Vec::new(),
            }
        }))
    };

    let b = bounds.clone();
    ops.insert(
        OpKind::Add,
        OperatorSpec {
            op: OpKind::Add,
            arity: 2,
            signature: Arc::new(binary_hom_signature),
            native: wiring.native_add(),
            bounds: Arc::new(move |args| b.add(args)),
            msg: {
                let t = t.clone();
                Arc::new(move |args: &[MsgValue]| Ok(msgops::msg_add(&args[0], &args[1], &t)))
            },
            sample_args: arg_sampler(OpKind::Add),
            sample_bounds: bound_sampler(OpKind::Add),
        },
    );
    let b = bounds.clone();
    ops.insert(
        OpKind::Mul,
        OperatorSpec {
            op: OpKind::Mul,
            arity: 2,
            signature: Arc::new(binary_hom_signature),
            native: wiring.native_mul(),
            bounds: Arc::new(move |args| b.mul(args)),
            msg: {
                let t = t.clone();
                Arc::new(move |args: &[MsgValue]| Ok(msgops::msg_mul(&args[0], &args[1], &t)))
            },
            sample_args: arg_sampler(OpKind::Mul),
            sample_bounds: bound_sampler(OpKind::Mul),
        },
    );
    let b = bounds.clone();
    ops.insert(
        OpKind::ScalarMul,
        OperatorSpec {
            op: OpKind::ScalarMul,
            arity: 2,
            signature: Arc::new(|sorts: &[Sort]| match sorts {
                [Sort::Msg, Sort::Cipher] => Some(Sort::Cipher),
                _ => None,
            }),
            native: wiring.native_scalar(),
            bounds: Arc::new(move |args| b.scalar_mul(args)),
            msg: {
                let t = t.clone();
                Arc::new(move |args: &[MsgValue]| {
                    let n = args[0]
                        .first()
                        .cloned()
                        .unwrap_or_else(|| BigInt::from(0));
                    Ok(msgops::msg_scale(&n, &args[1], &t))
                })
            },
            sample_args: arg_sampler(OpKind::ScalarMul),
            sample_bounds: bound_sampler(OpKind::ScalarMul),
        },
    );
    let b = bounds.clone();
    ops.insert(
        OpKind::ModSwitch,
        OperatorSpec {
            op: OpKind::ModSwitch,
            arity: 1,
            signature: Arc::new(|sorts: &[Sort]| match sorts {
                [Sort::Cipher] => Some(Sort::Cipher),
                _ => None,
            }),
            native: wiring.native_modswitch(),
            bounds: Arc::new(move |args| b.modswitch(args)),
            // noise management is the identity at message level
            msg: Arc::new(move |args: &[MsgValue]| Ok(args[0].clone())),
            sample_args: arg_sampler(OpKind::ModSwitch),
            sample_bounds: bound_sampler(OpKind::ModSwitch),
        },
    );
    ops.insert(OpKind::True, true_op(t.clone()));

    let oracle = keys.map(|keys| {
        let params_m = params.clone();
        let keys_m = keys.clone();
        let measure = Arc::new(move |v: &Value| match v {
            Value::BgvCipher(ct) => {
                let msg = center_mod(
                    &refscheme::bgv::decrypt(&keys_m, ct).coeffs[0],
                    &params_m.t,
                );
                let noise = rat_from_big(refscheme::bgv::eval_noise(&keys_m, ct));
                Ok(Bound::BgvCipher {
                    inf: rat_from_big(msg.clone()),
                    sup: rat_from_big(msg),
                    noise,
                    level: ct.level,
                })
            }
            _ => Err(EvalError::Stuck {
                detail: "measure expects a ciphertext".into(),
            }),
        });
        let keys_i = keys.clone();
        let params_i = params.clone();
        let interp_cipher = Arc::new(move |v: &Value| match v {
            Value::BgvCipher(ct) => Ok(alloc::vec![center_mod(
                &refscheme::bgv::decrypt(&keys_i, ct).coeffs[0],
                &params_i.t
            )]),
            _ => Err(EvalError::Stuck {
                detail: "interp expects a ciphertext".into(),
            }),
        });
        let keys_e = keys;
        let params_e = params.clone();
        let encrypt = Arc::new(
            move |v: &BigInt, kind: InputKind, rng: &mut dyn RngCore| match kind {
                InputKind::Cipher => {
                    let p = Poly::from_scalar(&center_mod(v, &params_e.t), params_e.d);
                    Ok(Value::BgvCipher(refscheme::bgv::encrypt(
                        &keys_e,
                        &p,
                        params_e.top_level(),
                        rng,
                    )))
                }
                other => Err(EvalError::Stuck {
                    detail: format!("{} is not available under BGV", other.keyword()),
                }),
            },
        );
        Oracle {
            measure,
            interp_cipher,
            encrypt,
        }
    });

    SchemeModel {
        kind: SchemeKind::Bgv,
        t: params.t.clone(),
        d,
        chain: params.chain.clone(),
        ops,
        fresh_noise: bgv_fresh_noise(&params),
        oracle,
        decode: decode_scalar(params.t.clone()),
        encode: encode_scalar(params.t.clone(), d),
    }
}

fn true_op(t: BigInt) -> OperatorSpec {
    let t2 = t.clone();
    OperatorSpec {
        op: OpKind::True,
        arity: 0,
        signature: Arc::new(|sorts: &[Sort]| sorts.is_empty().then_some(Sort::Msg)),
        native: Arc::new(move |_args: &[Value]| {
            Ok(Value::Msg(alloc::vec![center_mod(&BigInt::from(1), &t)]))
        }),
        bounds: Arc::new(|_args| Ok(Bound::Msg)),
        msg: Arc::new(move |_args: &[MsgValue]| {
            Ok(alloc::vec![center_mod(&BigInt::from(1), &t2)])
        }),
        sample_args: None,
        sample_bounds: None,
    }
}

// ---- BFV ----

pub fn build_bfv(
    params: ToyParams,
    est: NoiseEstimator,
    keys: Option<Arc<BfvKeys>>,
) -> SchemeModel {
    let params = Arc::new(params);
    let bounds = Arc::new(BfvBounds {
        t: rat_from_big(params.t.clone()),
        plain_shift: {
            use num_integer::Integer;
            let q = &params.chain[0];
            let r_t = q.mod_floor(&params.t);
            rat_from_big(params.t.clone()) / rat(2) * rat_from_big(r_t) / rat_from_big(q.clone())
        },
        est,
    });
    let t = params.t.clone();
    let d = params.d;

    let mut ops = BTreeMap::new();

    let native_add = {
        let params = params.clone();
        let keys = keys.clone();
        Arc::new(move |args: &[Value]| match (&args[0], &args[1]) {
            (Value::Plain(a), Value::Plain(b)) => Ok(Value::Plain(a.add(b, &params.t))),
            (Value::BfvCipher(a), Value::BfvCipher(b)) => {
                let keys = keys.as_ref().ok_or(EvalError::OracleRequired("bfv add"))?;
                Ok(Value::BfvCipher(refscheme::bfv::hom_add(a, b, keys)))
            }
            (Value::Plain(p), Value::BfvCipher(c)) | (Value::BfvCipher(c), Value::Plain(p)) => {
                let keys = keys.as_ref().ok_or(EvalError::OracleRequired("bfv add"))?;
                Ok(Value::BfvCipher(refscheme::bfv::hom_add_plain(c, p, keys)))
            }
            _ => Err(stuck(OpKind::Add, "needs plain/cipher operands")),
        })
    };
    let native_mul = {
        let params = params.clone();
        let keys = keys.clone();
        Arc::new(move |args: &[Value]| match (&args[0], &args[1]) {
            (Value::Plain(a), Value::Plain(b)) => Ok(Value::Plain(a.mul(b, &params.t))),
            (Value::BfvCipher(a), Value::BfvCipher(b)) => {
                let keys = keys.as_ref().ok_or(EvalError::OracleRequired("bfv mul"))?;
                refscheme::bfv::hom_mul(keys, a, b)
                    .map(Value::BfvCipher)
                    .map_err(|e| EvalError::Stuck {
                        detail: format!("{e}"),
                    })
            }
            (Value::Plain(p), Value::BfvCipher(c)) | (Value::BfvCipher(c), Value::Plain(p)) => {
                let keys = keys.as_ref().ok_or(EvalError::OracleRequired("bfv mul"))?;
                Ok(Value::BfvCipher(refscheme::bfv::hom_mul_plain(c, p, keys)))
            }
            _ => Err(stuck(OpKind::Mul, "needs plain/cipher operands")),
        })
    };
    let native_scalar = {
        let keys = keys.clone();
        Arc::new(move |args: &[Value]| {
            let n = args[0]
                .msg_scalar()
                .ok_or_else(|| stuck(OpKind::ScalarMul, "multiplier must be a message scalar"))?;
            match &args[1] {
                Value::BfvCipher(c) => {
                    let keys = keys
                        .as_ref()
                        .ok_or(EvalError::OracleRequired("bfv scalar mul"))?;
                    Ok(Value::BfvCipher(refscheme::bfv::hom_scalar_mul(c, n, keys)))
                }
                _ => Err(stuck(OpKind::ScalarMul, "needs a cipher right operand")),
            }
        })
    };

    let sample_cipher = {
        let keys = keys.clone();
        let params = params.clone();
        move |rng: &mut dyn RngCore, max_abs: i64| -> Value {
            let keys = keys.as_ref().expect("sampler requires keys");
            let v = sample_small(rng, max_abs);
            let p = Poly::from_scalar(&center_mod(&v, &params.t), params.d);
            Value::BfvCipher(refscheme::bfv::encrypt(keys, &p, rng))
        }
    };
    let sample_plain = {
        let params = params.clone();
        move |rng: &mut dyn RngCore, max_abs: i64| -> Value {
            let v = sample_small(rng, max_abs);
            Value::Plain(Poly::from_scalar(&center_mod(&v, &params.t), params.d))
        }
    };
    let arg_sampler = |op: OpKind| -> Option<ArgSamplerFn> {
        keys.as_ref()?;
        let sample_cipher = sample_cipher.clone();
        let sample_plain = sample_plain.clone();
        Some(Arc::new(move |rng: &mut dyn RngCore| -> Vec<Value> {
            match op {
                OpKind::Add | OpKind::Mul => {
                    let max = if op == OpKind::Mul { 2 } else { 3 };
                    match rng.gen_range(0..4u8) {
                        0 => alloc::vec![sample_cipher(&mut *rng, max), sample_cipher(&mut *rng, max)],
                        1 => alloc::vec![sample_plain(&mut *rng, max), sample_cipher(&mut *rng, max)],
                        2 => alloc::vec![sample_cipher(&mut *rng, max), sample_plain(&mut *rng, max)],
                        _ => alloc::vec![sample_plain(&mut *rng, max), sample_plain(&mut *rng, max)],
                    }
                }
                OpKind::ScalarMul => alloc::vec![
                    Value::Msg(alloc::vec![sample_small(rng, 3)]),
                    sample_cipher(&mut *rng, 2)
                ],
                _ => Vec::new(),
            }
        }))
    };
    let bound_sampler = |op: OpKind| -> Option<BoundSamplerFn> {
        let t = rat_from_big(params.t.clone());
        Some(Arc::new(move |rng: &mut dyn RngCore| -> Vec<BoundArg> {
            let quarter = &t / rat(4);
            let cipher = |rng: &mut dyn RngCore| -> BoundArg {
                let a: i64 = rng.gen_range(-8..=8);
                let b: i64 = rng.gen_range(a..=8);
                // noise in (0, 1/4]: small enough that sums stay defined
                let noise = rat(rng.gen_range(1..=16)) / rat(64);
                BoundArg::plain(Bound::BfvCipher {
                    inf: &quarter * rat(a) / rat(8),
                    sup: &quarter * rat(b) / rat(8),
                    noise,
                })
            };
            let plain = |rng: &mut dyn RngCore| -> BoundArg {
                let a: i64 = rng.gen_range(-8..=8);
                let b: i64 = rng.gen_range(a..=8);
                BoundArg::plain(Bound::Plain {
                    inf: &quarter * rat(a) / rat(8),
                    sup: &quarter * rat(b) / rat(8),
                })
            };
            match op {
                OpKind::Add | OpKind::Mul => match rng.gen_range(0..4u8) {
                    0 => alloc::vec![cipher(rng), cipher(rng)],
                    1 => alloc::vec![plain(rng), cipher(rng)],
                    2 => alloc::vec![cipher(rng), plain(rng)],
                    _ => alloc::vec![plain(rng), plain(rng)],
                },
                OpKind::ScalarMul => alloc::vec![
                    BoundArg {
                        bound: Bound::Msg,
                        scalar: Some(sample_small(rng, 3)),
                    },
                    cipher(rng)
                ],
                _ => Vec::new(),
            }
        }))
    };

    let b = bounds.clone();
    ops.insert(
        OpKind::Add,
        OperatorSpec {
            op: OpKind::Add,
            arity: 2,
            signature: Arc::new(binary_hom_signature),
            native: native_add,
            bounds: Arc::new(move |args| b.add(args)),
            msg: {
                let t = t.clone();
                Arc::new(move |args: &[MsgValue]| Ok(msgops::msg_add(&args[0], &args[1], &t)))
            },
            sample_args: arg_sampler(OpKind::Add),
            sample_bounds: bound_sampler(OpKind::Add),
        },
    );
    let b = bounds.clone();
    ops.insert(
        OpKind::Mul,
        OperatorSpec {
            op: OpKind::Mul,
            arity: 2,
            signature: Arc::new(binary_hom_signature),
            native: native_mul,
            bounds: Arc::new(move |args| b.mul(args)),
            msg: {
                let t = t.clone();
                Arc::new(move |args: &[MsgValue]| Ok(msgops::msg_mul(&args[0], &args[1], &t)))
            },
            sample_args: arg_sampler(OpKind::Mul),
            sample_bounds: bound_sampler(OpKind::Mul),
        },
    );
    let b = bounds.clone();
    ops.insert(
        OpKind::ScalarMul,
        OperatorSpec {
            op: OpKind::ScalarMul,
            arity: 2,
            signature: Arc::new(|sorts: &[Sort]| match sorts {
                [Sort::Msg, Sort::Cipher] => Some(Sort::Cipher),
                _ => None,
            }),
            native: native_scalar,
            bounds: Arc::new(move |args| b.scalar_mul(args)),
            msg: {
                let t = t.clone();
                Arc::new(move |args: &[MsgValue]| {
                    let n = args[0]
                        .first()
                        .cloned()
                        .unwrap_or_else(|| BigInt::from(0));
                    Ok(msgops::msg_scale(&n, &args[1], &t))
                })
            },
            sample_args: arg_sampler(OpKind::ScalarMul),
            sample_bounds: bound_sampler(OpKind::ScalarMul),
        },
    );
    ops.insert(OpKind::True, true_op(t.clone()));

    let oracle = keys.map(|keys| {
        let keys_m = keys.clone();
        let params_m = params.clone();
        let measure = Arc::new(move |v: &Value| match v {
            Value::BfvCipher(ct) => {
                let msg = center_mod(
                    &refscheme::bfv::decrypt(&keys_m, ct).coeffs[0],
                    &params_m.t,
                );
                Ok(Bound::BfvCipher {
                    inf: rat_from_big(msg.clone()),
                    sup: rat_from_big(msg),
                    noise: refscheme::bfv::eval_noise(&keys_m, ct),
                })
            }
            _ => Err(EvalError::Stuck {
                detail: "measure expects a ciphertext".into(),
            }),
        });
        let keys_i = keys.clone();
        let params_i = params.clone();
        let interp_cipher = Arc::new(move |v: &Value| match v {
            Value::BfvCipher(ct) => Ok(alloc::vec![center_mod(
                &refscheme::bfv::decrypt(&keys_i, ct).coeffs[0],
                &params_i.t
            )]),
            _ => Err(EvalError::Stuck {
                detail: "interp expects a ciphertext".into(),
            }),
        });
        let keys_e = keys;
        let params_e = params.clone();
        let encrypt = Arc::new(
            move |v: &BigInt, kind: InputKind, rng: &mut dyn RngCore| match kind {
                InputKind::Cipher => {
                    let p = Poly::from_scalar(&center_mod(v, &params_e.t), params_e.d);
                    Ok(Value::BfvCipher(refscheme::bfv::encrypt(&keys_e, &p, rng)))
                }
                other => Err(EvalError::Stuck {
                    detail: format!("{} is not available under BFV", other.keyword()),
                }),
            },
        );
        Oracle {
            measure,
            interp_cipher,
            encrypt,
        }
    });

    SchemeModel {
        kind: SchemeKind::Bfv,
        t: params.t.clone(),
        d,
        chain: params.chain.clone(),
        ops,
        fresh_noise: bfv_fresh_noise(&params),
        oracle,
        decode: decode_scalar(params.t.clone()),
        encode: encode_scalar(params.t.clone(), d),
    }
}

// ---- TFHE ----

fn tfhe_id_of(kind: InputKind) -> TfheId {
    match kind {
        InputKind::CipherRgsw => TfheId::Rgsw,
        InputKind::CipherRlwe => TfheId::Rlwe,
        _ => TfheId::Lwe,
    }
}

/// Build the TFHE model over the simulated scheme. `with_oracle` enables
/// the simulation hooks (run modes); static checking passes `false`.
pub fn build_tfhe(params: TfheParams, est: NoiseEstimator, with_oracle: bool) -> SchemeModel {
    let params = Arc::new(params);
    let bounds = Arc::new(TfheBounds {
        t: rat_from_big(params.t.clone()),
        q: rat_from_big(params.q.clone()),
        pbs_noise: params.pbs_noise.clone(),
        est,
    });
    let t = params.t.clone();

    let mut ops = BTreeMap::new();

    let native_add = {
        let params = params.clone();
        Arc::new(move |args: &[Value]| match (&args[0], &args[1]) {
            (Value::Plain(a), Value::Plain(b)) => Ok(Value::Plain(a.add(b, &params.t))),
            (Value::TfheCipher(a), Value::TfheCipher(b)) => {
                if a.id == TfheId::Rgsw || b.id == TfheId::Rgsw {
                    return Err(stuck(OpKind::Add, "(+) is undefined on RGSW"));
                }
                Ok(Value::TfheCipher(refscheme::tfhe_sim_add(a, b)))
            }
            (Value::Plain(p), Value::TfheCipher(c)) | (Value::TfheCipher(c), Value::Plain(p)) => {
                if c.id == TfheId::Rgsw {
                    return Err(stuck(OpKind::Add, "(+) is undefined on RGSW"));
                }
                Ok(Value::TfheCipher(refscheme::tfhe_sim_add_plain(
                    c,
                    &p.coeffs[0],
                )))
            }
            _ => Err(stuck(OpKind::Add, "needs plain/cipher operands")),
        })
    };
    let native_mul = {
        let params = params.clone();
        Arc::new(move |args: &[Value]| match (&args[0], &args[1]) {
            (Value::Plain(a), Value::Plain(b)) => Ok(Value::Plain(a.mul(b, &params.t))),
            _ => Err(stuck(OpKind::Mul, "(*) under TFHE is plain-plain only")),
        })
    };
    let native_box = {
        let bounds = bounds.clone();
        Arc::new(move |args: &[Value]| match (&args[0], &args[1]) {
            (Value::TfheCipher(a), Value::TfheCipher(b))
                if a.id == TfheId::Rgsw && b.id == TfheId::Rgsw =>
            {
                let noise = bounds
                    .est
                    .tfhe_box
                    .eval(&a.noise, &b.noise)
                    .unwrap_or_else(|| &a.noise * &b.noise);
                Ok(Value::TfheCipher(refscheme::tfhe_sim_mul(
                    TfheId::Rgsw,
                    a,
                    b,
                    noise,
                )))
            }
            _ => Err(stuck(OpKind::BoxMul, "(#) takes RGSW operands")),
        })
    };
    let native_ext = {
        let bounds = bounds.clone();
        Arc::new(move |args: &[Value]| match (&args[0], &args[1]) {
            (Value::TfheCipher(a), Value::TfheCipher(b))
                if a.id == TfheId::Rgsw && b.id != TfheId::Rgsw =>
            {
                let g = match b.id {
                    TfheId::Lwe => &bounds.est.tfhe_ext_lwe,
                    _ => &bounds.est.tfhe_ext_rlwe,
                };
                let noise = g
                    .eval(&a.noise, &b.noise)
                    .unwrap_or_else(|| &a.noise * &b.noise);
                Ok(Value::TfheCipher(refscheme::tfhe_sim_mul(
                    TfheId::Rlwe,
                    a,
                    b,
                    noise,
                )))
            }
            _ => Err(stuck(OpKind::ExtMul, "(@) takes RGSW x (LWE|RLWE)")),
        })
    };
    let native_scalar = Arc::new(move |args: &[Value]| {
        let n = args[0]
            .msg_scalar()
            .ok_or_else(|| stuck(OpKind::ScalarMul, "multiplier must be a message scalar"))?;
        match &args[1] {
            Value::TfheCipher(c) => Ok(Value::TfheCipher(refscheme::tfhe_sim_scalar_mul(n, c))),
            _ => Err(stuck(OpKind::ScalarMul, "needs a cipher right operand")),
        }
    });
    let native_pbs = {
        let params = params.clone();
        Arc::new(move |args: &[Value]| match (&args[0], &args[1]) {
            (Value::TfheCipher(lut), Value::TfheCipher(c))
                if lut.id == TfheId::Rgsw && c.id == TfheId::Lwe =>
            {
                Ok(Value::TfheCipher(refscheme::tfhe_sim_pbs(&params, c)))
            }
            _ => Err(stuck(OpKind::Pbs, "pbs takes (RGSW lut, LWE input)")),
        })
    };
    let native_cmux = {
        let params = params.clone();
        let bounds = bounds.clone();
        Arc::new(move |args: &[Value]| match (&args[0], &args[1], &args[2]) {
            (Value::TfheCipher(ctrl), Value::TfheCipher(d1), Value::TfheCipher(d0))
                if ctrl.id == TfheId::Rgsw
                    && d1.id != TfheId::Rgsw
                    && d0.id != TfheId::Rgsw =>
            {
                let g = |id: TfheId, n: &Rat| {
                    let grow = match id {
                        TfheId::Lwe => &bounds.est.tfhe_ext_lwe,
                        _ => &bounds.est.tfhe_ext_rlwe,
                    };
                    grow.eval(&ctrl.noise, n)
                        .unwrap_or_else(|| &ctrl.noise * n)
                };
                let noise = g(d1.id, &d1.noise) + g(d0.id, &d0.noise);
                Ok(Value::TfheCipher(refscheme::tfhe_sim_cmux(
                    &params, ctrl, d1, d0, noise,
                )))
            }
            _ => Err(stuck(OpKind::Cmux, "cmux takes (RGSW, LWE|RLWE, LWE|RLWE)")),
        })
    };

    let sample_sim = {
        let params = params.clone();
        move |rng: &mut dyn RngCore, id: TfheId, max_abs: i64| -> Value {
            let v = sample_small(rng, max_abs);
            Value::TfheCipher(refscheme::TfheSimValue::fresh(&params, id, &v))
        }
    };
    let arg_sampler = |op: OpKind| -> Option<ArgSamplerFn> {
        if !with_oracle {
            return None;
        }
        let sample_sim = sample_sim.clone();
        let params = params.clone();
        Some(Arc::new(move |rng: &mut dyn RngCore| -> Vec<Value> {
            let small = |rng: &mut dyn RngCore| -> i64 {
                let quarter: BigInt = &params.t / 4;
                let m: i64 = (&quarter).try_into().unwrap_or(2);
                rng.gen_range(0..=m.max(1))
            };
            let lwe_or_rlwe = |rng: &mut dyn RngCore| {
                if rng.gen::<bool>() {
                    TfheId::Lwe
                } else {
                    TfheId::Rlwe
                }
            };
            match op {
                OpKind::Add => {
                    let m = small(&mut *rng) / 2;
                    let id1 = lwe_or_rlwe(&mut *rng);
                    let id2 = lwe_or_rlwe(&mut *rng);
                    alloc::vec![
                        sample_sim(&mut *rng, id1, m.max(1)),
                        sample_sim(&mut *rng, id2, m.max(1))
                    ]
                }
                OpKind::BoxMul => alloc::vec![
                    sample_sim(&mut *rng, TfheId::Rgsw, 2),
                    sample_sim(&mut *rng, TfheId::Rgsw, 2)
                ],
                OpKind::ExtMul => {
                    let id = lwe_or_rlwe(&mut *rng);
                    alloc::vec![
                        sample_sim(&mut *rng, TfheId::Rgsw, 2),
                        sample_sim(&mut *rng, id, 2)
                    ]
                }
                OpKind::ScalarMul => {
                    let id = lwe_or_rlwe(&mut *rng);
                    alloc::vec![
                        Value::Msg(alloc::vec![sample_small(&mut *rng, 2)]),
                        sample_sim(&mut *rng, id, 2)
                    ]
                }
                OpKind::Pbs => {
                    let m = small(&mut *rng).max(1);
                    alloc::vec![
                        sample_sim(&mut *rng, TfheId::Rgsw, 2),
                        sample_sim(&mut *rng, TfheId::Lwe, m)
                    ]
                }
                OpKind::Cmux => {
                    let id1 = lwe_or_rlwe(&mut *rng);
                    let id0 = lwe_or_rlwe(&mut *rng);
                    alloc::vec![
                        sample_sim(&mut *rng, TfheId::Rgsw, 1),
                        sample_sim(&mut *rng, id1, 2),
                        sample_sim(&mut *rng, id0, 2)
                    ]
                }
                OpKind::Mul => alloc::vec![
                    Value::Plain(Poly::from_scalar(&sample_small(rng, 2), 1)),
                    Value::Plain(Poly::from_scalar(&sample_small(rng, 2), 1))
                ],
                _ => Vec::new(),
            }
        }))
    };
    let bound_sampler = |op: OpKind| -> Option<BoundSamplerFn> {
        let t = rat_from_big(params.t.clone());
        let fresh = params.fresh_noise.clone();
        Some(Arc::new(move |rng: &mut dyn RngCore| -> Vec<BoundArg> {
            let quarter = &t / rat(4);
            let tc = |rng: &mut dyn RngCore, id: TfheId| -> BoundArg {
                let a: i64 = rng.gen_range(-8..=8);
                let b: i64 = rng.gen_range(a..=8);
                let noise = &fresh * rat(rng.gen_range(1..=64));
                BoundArg::plain(Bound::TfheCipher {
                    id,
                    inf: &quarter * rat(a) / rat(8),
                    sup: &quarter * rat(b) / rat(8),
                    noise,
                })
            };
            let lwe_or_rlwe = |rng: &mut dyn RngCore| {
                if rng.gen::<bool>() {
                    TfheId::Lwe
                } else {
                    TfheId::Rlwe
                }
            };
            let plain = |rng: &mut dyn RngCore| -> BoundArg {
                let a: i64 = rng.gen_range(-8..=8);
                let b: i64 = rng.gen_range(a..=8);
                BoundArg::plain(Bound::Plain {
                    inf: &quarter * rat(a) / rat(8),
                    sup: &quarter * rat(b) / rat(8),
                })
            };
            match op {
                OpKind::Add => {
                    let id1 = lwe_or_rlwe(&mut *rng);
                    let id2 = lwe_or_rlwe(&mut *rng);
                    match rng.gen_range(0..3u8) {
                        0 => alloc::vec![tc(&mut *rng, id1), tc(&mut *rng, id2)],
                        1 => alloc::vec![plain(rng), tc(&mut *rng, id1)],
                        _ => alloc::vec![tc(&mut *rng, id1), plain(rng)],
                    }
                }
                OpKind::Mul => alloc::vec![plain(rng), plain(rng)],
                OpKind::BoxMul => alloc::vec![tc(&mut *rng, TfheId::Rgsw), tc(&mut *rng, TfheId::Rgsw)],
                OpKind::ExtMul => {
                    let id = lwe_or_rlwe(&mut *rng);
                    alloc::vec![tc(&mut *rng, TfheId::Rgsw), tc(&mut *rng, id)]
                }
                OpKind::ScalarMul => {
                    let id = lwe_or_rlwe(&mut *rng);
                    alloc::vec![
                        BoundArg {
                            bound: Bound::Msg,
                            scalar: Some(sample_small(&mut *rng, 3)),
                        },
                        tc(&mut *rng, id)
                    ]
                }
                OpKind::Pbs => alloc::vec![tc(&mut *rng, TfheId::Rgsw), tc(&mut *rng, TfheId::Lwe)],
                OpKind::Cmux => {
                    let id1 = lwe_or_rlwe(&mut *rng);
                    let id0 = lwe_or_rlwe(&mut *rng);
                    alloc::vec![
                        tc(&mut *rng, TfheId::Rgsw),
                        tc(&mut *rng, id1),
                        tc(&mut *rng, id0)
                    ]
                }
                _ => Vec::new(),
            }
        }))
    };

    let mut insert =
        |op: OpKind,
         arity: usize,
         signature: crate::model::SignatureFn,
         native: crate::model::NativeFn,
         bfn: crate::model::BoundsFn,
         msg: crate::model::MsgFn,
         samplers: bool| {
            ops.insert(
                op,
                OperatorSpec {
                    op,
                    arity,
                    signature,
                    native,
                    bounds: bfn,
                    msg,
                    sample_args: if samplers { arg_sampler(op) } else { None },
                    sample_bounds: if samplers { bound_sampler(op) } else { None },
                },
            );
        };

    let b = bounds.clone();
    let tt = t.clone();
    insert(
        OpKind::Add,
        2,
        Arc::new(binary_hom_signature),
        native_add,
        Arc::new(move |args| b.add(args)),
        Arc::new(move |args: &[MsgValue]| Ok(msgops::msg_add(&args[0], &args[1], &tt))),
        true,
    );
    let b = bounds.clone();
    let tt = t.clone();
    insert(
        OpKind::Mul,
        2,
        Arc::new(|sorts: &[Sort]| match sorts {
            [Sort::Plain, Sort::Plain] => Some(Sort::Plain),
            _ => None,
        }),
        native_mul,
        Arc::new(move |args| b.mul(args)),
        Arc::new(move |args: &[MsgValue]| Ok(msgops::msg_mul(&args[0], &args[1], &tt))),
        true,
    );
    let b = bounds.clone();
    let tt = t.clone();
    insert(
        OpKind::BoxMul,
        2,
        Arc::new(|sorts: &[Sort]| match sorts {
            [Sort::Cipher, Sort::Cipher] => Some(Sort::Cipher),
            _ => None,
        }),
        native_box,
        Arc::new(move |args| b.box_mul(args)),
        Arc::new(move |args: &[MsgValue]| Ok(msgops::msg_mul(&args[0], &args[1], &tt))),
        true,
    );
    let b = bounds.clone();
    let tt = t.clone();
    insert(
        OpKind::ExtMul,
        2,
        Arc::new(|sorts: &[Sort]| match sorts {
            [Sort::Cipher, Sort::Cipher] => Some(Sort::Cipher),
            _ => None,
        }),
        native_ext,
        Arc::new(move |args| b.ext_mul(args)),
        Arc::new(move |args: &[MsgValue]| Ok(msgops::msg_mul(&args[0], &args[1], &tt))),
        true,
    );
    let b = bounds.clone();
    let tt = t.clone();
    insert(
        OpKind::ScalarMul,
        2,
        Arc::new(|sorts: &[Sort]| match sorts {
            [Sort::Msg, Sort::Cipher] => Some(Sort::Cipher),
            _ => None,
        }),
        native_scalar,
        Arc::new(move |args| b.scalar_mul(args)),
        Arc::new(move |args: &[MsgValue]| {
            let n = args[0].first().cloned().unwrap_or_else(|| BigInt::from(0));
            Ok(msgops::msg_scale(&n, &args[1], &tt))
        }),
        true,
    );
    let b = bounds.clone();
    insert(
        OpKind::Pbs,
        2,
        Arc::new(|sorts: &[Sort]| match sorts {
            [Sort::Cipher, Sort::Cipher] => Some(Sort::Cipher),
            _ => None,
        }),
        native_pbs,
        Arc::new(move |args| b.pbs(args)),
        // noise management: identity on the bootstrapped input
        Arc::new(move |args: &[MsgValue]| Ok(args[1].clone())),
        true,
    );
    let b = bounds.clone();
    let tt = t.clone();
    insert(
        OpKind::Cmux,
        3,
        Arc::new(|sorts: &[Sort]| match sorts {
            [Sort::Cipher, Sort::Cipher, Sort::Cipher] => Some(Sort::Cipher),
            _ => None,
        }),
        native_cmux,
        Arc::new(move |args| b.cmux(args)),
        Arc::new(move |args: &[MsgValue]| {
            let one = alloc::vec![center_mod(&BigInt::from(1), &tt)];
            Ok(if args[0] == one {
                args[1].clone()
            } else {
                args[2].clone()
            })
        }),
        true,
    );
    ops.insert(OpKind::True, true_op(t.clone()));

    let oracle = with_oracle.then(|| {
        let _params_m = params.clone();
        let measure = Arc::new(move |v: &Value| match v {
            Value::TfheCipher(s) => Ok(Bound::TfheCipher {
                id: s.id,
                inf: rat_from_big(s.true_value.clone()),
                sup: rat_from_big(s.true_value.clone()),
                noise: s.noise.clone(),
            }),
            _ => Err(EvalError::Stuck {
                detail: "measure expects a ciphertext".into(),
            }),
        });
        let params_i = params.clone();
        let interp_cipher = Arc::new(move |v: &Value| match v {
            Value::TfheCipher(s) => Ok(alloc::vec![s.decrypt(&params_i)]),
            _ => Err(EvalError::Stuck {
                detail: "interp expects a ciphertext".into(),
            }),
        });
        let params_e = params.clone();
        let encrypt = Arc::new(
            move |v: &BigInt, kind: InputKind, _rng: &mut dyn RngCore| {
                Ok(Value::TfheCipher(refscheme::TfheSimValue::fresh(
                    &params_e,
                    tfhe_id_of(kind),
                    &center_mod(v, &params_e.t),
                )))
            },
        );
        Oracle {
            measure,
            interp_cipher,
            encrypt,
        }
    });

    SchemeModel {
        kind: SchemeKind::Tfhe,
        t: params.t.clone(),
        d: 1,
        chain: alloc::vec![params.q.clone()],
        ops,
        fresh_noise: params.fresh_noise.clone(),
        oracle,
        decode: decode_scalar(params.t.clone()),
        encode: encode_scalar(params.t.clone(), 1),
    }
}
