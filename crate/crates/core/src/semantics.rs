//! Dual big-step interpreters: native (homomorphic) evaluation and the
//! cleartext message-level evaluation where constants are interpreted on
//! the fly and noise management collapses to the identity. The equivalence
//! harness runs both and compares interpretations pointwise.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use rand::RngCore;

use crate::ir::{ConstValue, CoreCmd, CoreExpr, InputDecl, Pos};
use crate::model::{bound_le, Bound, EvalError, MsgValue, SchemeModel, Sort, Value};
use crate::refscheme::center_mod;
use crate::typecheck::{Diagnosis, Type, TypingContext};

pub type Substitution = BTreeMap<String, Value>;
pub type MsgSubstitution = BTreeMap<String, MsgValue>;

/// Per-assignment oracle measurements from a native run.
#[derive(Debug, Clone, Default)]
pub struct EvalTrace {
    pub entries: Vec<TraceEntry>,
}

#[derive(Debug, Clone)]
pub struct TraceEntry {
    pub var: String,
    pub pos: Pos,
    pub measured: Bound,
}

/// Shared constant evaluation: literals are reduced into centered Z_t in
/// both semantics, so the two interpreters agree on them by construction.
pub fn value_of_const(model: &SchemeModel, c: &ConstValue) -> Value {
    match c {
        ConstValue::Msg(v) => Value::Msg(alloc::vec![center_mod(v, &model.t)]),
        ConstValue::Plain(v) => Value::Plain((model.encode)(v)),
    }
}

fn msg_of_const(model: &SchemeModel, c: &ConstValue) -> MsgValue {
    match c {
        ConstValue::Msg(v) => alloc::vec![center_mod(v, &model.t)],
        // interp of a plaintext constant: decode(encode(v))
        ConstValue::Plain(v) => (model.decode)(&(model.encode)(v)),
    }
}

/// Native expression evaluation.
pub fn eval_expr(model: &SchemeModel, env: &Substitution, e: &CoreExpr) -> Result<Value, EvalError> {
    match e {
        CoreExpr::Var(x) => env
            .get(x)
            .cloned()
            .ok_or_else(|| EvalError::UnboundVariable(x.clone())),
        CoreExpr::Const(c) => Ok(value_of_const(model, c)),
        CoreExpr::Op(op, args) => {
            let spec = model.op(*op).map_err(|e| EvalError::Stuck {
                detail: format!("{e}"),
            })?;
            let mut values = Vec::with_capacity(args.len());
            for a in args {
                values.push(eval_expr(model, env, a)?);
            }
            let sorts: Vec<Sort> = values.iter().map(|v| v.sort()).collect();
            if (spec.signature)(&sorts).is_none() {
                let shown: Vec<String> = sorts.iter().map(|s| format!("{s}")).collect();
                return Err(EvalError::SortMismatch {
                    op: *op,
                    detail: format!("runtime sorts ({})", shown.join(", ")),
                });
            }
            (spec.native)(&values)
        }
    }
}

fn guard_taken(model: &SchemeModel, v: &Value) -> Result<bool, EvalError> {
    match v {
        Value::Msg(m) => Ok(*m == model.true_value()),
        other => Err(EvalError::Stuck {
            detail: format!("if-guard evaluated to a {} value", other.sort()),
        }),
    }
}

/// Native command evaluation. With `trace` set (oracle mode), every
/// assignment's measured bound is recorded.
pub fn eval_native(
    model: &SchemeModel,
    env: &Substitution,
    cmd: &CoreCmd,
    mut trace: Option<&mut EvalTrace>,
) -> Result<Substitution, EvalError> {
    fn go(
        model: &SchemeModel,
        env: &mut Substitution,
        cmd: &CoreCmd,
        trace: &mut Option<&mut EvalTrace>,
    ) -> Result<(), EvalError> {
        match cmd {
            CoreCmd::Skip => Ok(()),
            CoreCmd::Assign(x, e, pos) => {
                let v = eval_expr(model, env, e)?;
                if let Some(t) = trace.as_deref_mut() {
                    let measured = model.bound_of_value(&v)?;
                    t.entries.push(TraceEntry {
                        var: x.clone(),
                        pos: *pos,
                        measured,
                    });
                }
                env.insert(x.clone(), v);
                Ok(())
            }
            CoreCmd::Seq(cs) => {
                for c in cs {
                    go(model, env, c, trace)?;
                }
                Ok(())
            }
            CoreCmd::If(g, a, b, _) => {
                let gv = eval_expr(model, env, g)?;
                if guard_taken(model, &gv)? {
                    go(model, env, a, trace)
                } else {
                    go(model, env, b, trace)
                }
            }
        }
    }
    let mut env = env.clone();
    go(model, &mut env, cmd, &mut trace)?;
    Ok(env)
}

/// Message-level expression evaluation: constants are interpreted, and
/// operators run their message semantics.
pub fn eval_msg_expr(
    model: &SchemeModel,
    env: &MsgSubstitution,
    e: &CoreExpr,
) -> Result<MsgValue, EvalError> {
    match e {
        CoreExpr::Var(x) => env
            .get(x)
            .cloned()
            .ok_or_else(|| EvalError::UnboundVariable(x.clone())),
        CoreExpr::Const(c) => Ok(msg_of_const(model, c)),
        CoreExpr::Op(op, args) => {
            let spec = model.op(*op).map_err(|e| EvalError::Stuck {
                detail: format!("{e}"),
            })?;
            let mut values = Vec::with_capacity(args.len());
            for a in args {
                values.push(eval_msg_expr(model, env, a)?);
            }
            (spec.msg)(&values)
        }
    }
}

/// Cleartext command evaluation over message substitutions.
pub fn eval_msg(
    model: &SchemeModel,
    env: &MsgSubstitution,
    cmd: &CoreCmd,
) -> Result<MsgSubstitution, EvalError> {
    fn go(model: &SchemeModel, env: &mut MsgSubstitution, cmd: &CoreCmd) -> Result<(), EvalError> {
        match cmd {
            CoreCmd::Skip => Ok(()),
            CoreCmd::Assign(x, e, _) => {
                let v = eval_msg_expr(model, env, e)?;
                env.insert(x.clone(), v);
                Ok(())
            }
            CoreCmd::Seq(cs) => {
                for c in cs {
                    go(model, env, c)?;
                }
                Ok(())
            }
            CoreCmd::If(g, a, b, _) => {
                let gv = eval_msg_expr(model, env, g)?;
                if gv == model.true_value() {
                    go(model, env, a)
                } else {
                    go(model, env, b)
                }
            }
        }
    }
    let mut env = env.clone();
    go(model, &mut env, cmd)?;
    Ok(env)
}

/// interp^sp of a whole substitution.
pub fn interp_substitution(
    model: &SchemeModel,
    env: &Substitution,
) -> Result<MsgSubstitution, EvalError> {
    let mut out = BTreeMap::new();
    for (x, v) in env {
        out.insert(x.clone(), model.interp(v)?);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivVerdict {
    pub holds: bool,
    /// Variables whose interpreted native value disagrees with the message
    /// run, with both sides as witnesses.
    pub mismatches: Vec<(String, MsgValue, MsgValue)>,
}

/// Run the commuting square: evaluate natively, evaluate the cleartext
/// program on the interpreted inputs, and compare interpretations of every
/// output variable.
pub fn check_message_equivalence(
    model: &SchemeModel,
    gamma: &TypingContext,
    env: &Substitution,
    cmd: &CoreCmd,
) -> Result<EquivVerdict, EvalError> {
    // well-formedness of the input substitution (oracle mode)
    if model.oracle.is_some() {
        for (x, ty) in gamma.iter() {
            if let Some(v) = env.get(x) {
                let measured = model.bound_of_value(v)?;
                if !bound_le(&measured, ty.bound()) {
                    return Err(EvalError::Stuck {
                        detail: format!(
                            "input `{x}` is not well-formed: measured {measured} exceeds declared {}",
                            ty.bound()
                        ),
                    });
                }
            }
        }
    }
    let native_out = eval_native(model, env, cmd, None)?;
    let msg_in = interp_substitution(model, env)?;
    let msg_out = eval_msg(model, &msg_in, cmd)?;
    let mut mismatches = Vec::new();
    for (x, v) in &native_out {
        let lhs = model.interp(v)?;
        match msg_out.get(x) {
            Some(rhs) if *rhs == lhs => {}
            Some(rhs) => mismatches.push((x.clone(), lhs, rhs.clone())),
            None => mismatches.push((x.clone(), lhs, MsgValue::new())),
        }
    }
    Ok(EquivVerdict {
        holds: mismatches.is_empty(),
        mismatches,
    })
}

/// Build the initial typing context from input declarations. Literals must
/// already be centered representatives of Z_t; anything else would make
/// the declared value differ from what encryption produces.
pub fn initial_context(
    model: &SchemeModel,
    inputs: &[InputDecl],
) -> Result<TypingContext, Diagnosis> {
    use crate::ir::InputKind;
    use crate::model::{OverflowKind, SchemeKind, TfheId};
    use crate::rational::rat_from_big;

    let mut ctx = TypingContext::new();
    for inp in inputs {
        let centered = center_mod(&inp.value, &model.t);
        if centered != inp.value {
            return Err(Diagnosis::new(
                OverflowKind::Value,
                format!(
                    "input literal {} for `{}` is outside the centered plaintext range",
                    inp.value, inp.name
                ),
            )
            .at(inp.pos));
        }
        let v = rat_from_big(inp.value.clone());
        let bound = match (inp.kind, model.kind) {
            (InputKind::Plain, _) => Bound::Plain {
                inf: v.clone(),
                sup: v,
            },
            (InputKind::Cipher, SchemeKind::Bgv) => Bound::BgvCipher {
                inf: v.clone(),
                sup: v,
                noise: model.fresh_noise.clone(),
                level: model.top_level(),
            },
            (InputKind::Cipher, SchemeKind::Bfv) => Bound::BfvCipher {
                inf: v.clone(),
                sup: v,
                noise: model.fresh_noise.clone(),
            },
            (kind, SchemeKind::Tfhe) => {
                let id = match kind {
                    InputKind::Cipher => TfheId::Lwe,
                    InputKind::CipherRlwe => TfheId::Rlwe,
                    InputKind::CipherRgsw => TfheId::Rgsw,
                    InputKind::Plain => unreachable!(),
                };
                Bound::TfheCipher {
                    id,
                    inf: v.clone(),
                    sup: v,
                    noise: model.fresh_noise.clone(),
                }
            }
            (kind, scheme) => {
                return Err(Diagnosis::new(
                    OverflowKind::Sort,
                    format!("{} is not available under {scheme}", kind.keyword()),
                )
                .at(inp.pos))
            }
        };
        ctx.insert(inp.name.clone(), Type::new(bound));
    }
    Ok(ctx)
}

/// Build the runtime input substitution (oracle mode: plaintext inputs are
/// encoded, cipher inputs freshly encrypted).
pub fn initial_substitution(
    model: &SchemeModel,
    inputs: &[InputDecl],
    rng: &mut dyn RngCore,
) -> Result<Substitution, EvalError> {
    let mut env = BTreeMap::new();
    for inp in inputs {
        let value: BigInt = center_mod(&inp.value, &model.t);
        let v = match inp.kind {
            crate::ir::InputKind::Plain => Value::Plain((model.encode)(&value)),
            kind => match &model.oracle {
                Some(o) => (o.encrypt)(&value, kind, rng)?,
                None => return Err(EvalError::OracleRequired("encrypting inputs")),
            },
        };
        env.insert(inp.name.clone(), v);
    }
    Ok(env)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{InputKind, OpKind};
    use crate::refscheme::ToyParams;
    use crate::schemes::{build_bgv, make_estimator, EstimatorParams};
    use alloc::sync::Arc;
    use alloc::vec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn oracle_model(seed: u64) -> SchemeModel {
        let params = ToyParams {
            t: BigInt::from(16),
            d: 16,
            chain: vec![
                BigInt::from(1u64 << 25) + 1,
                BigInt::from(1u64 << 45) + 1,
            ],
            err_width: 1,
        };
        let est = make_estimator(
            "worst_case",
            &EstimatorParams {
                scheme: crate::model::SchemeKind::Bgv,
                t: params.t.clone(),
                d: params.d,
                q_top: params.chain.last().unwrap().clone(),
                err_width: params.err_width,
            },
            &Default::default(),
        )
        .unwrap();
        let keys = Arc::new(crate::refscheme::bgv::keygen(&params, seed));
        build_bgv(params, est, Some(keys))
    }

    fn decl(name: &str, kind: InputKind, v: i64) -> InputDecl {
        InputDecl {
            name: name.into(),
            kind,
            value: BigInt::from(v),
            pos: Pos::default(),
        }
    }

    #[test]
    fn skip_returns_the_environment() {
        let m = oracle_model(1);
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let inputs = vec![decl("a", InputKind::Cipher, 3)];
        let env = initial_substitution(&m, &inputs, &mut rng).unwrap();
        let out = eval_native(&m, &env, &CoreCmd::Skip, None).unwrap();
        assert_eq!(out, env);
    }

    #[test]
    fn else_branch_taken_when_guard_is_not_true() {
        let m = oracle_model(1);
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let inputs = vec![decl("a", InputKind::Cipher, 2)];
        let env = initial_substitution(&m, &inputs, &mut rng).unwrap();
        // if 0 { x := a (+) a } else { x := a }
        let cmd = CoreCmd::If(
            CoreExpr::Const(ConstValue::Msg(BigInt::from(0))),
            alloc::boxed::Box::new(CoreCmd::Assign(
                "x".into(),
                CoreExpr::Op(OpKind::Add, vec![CoreExpr::var("a"), CoreExpr::var("a")]),
                Pos::default(),
            )),
            alloc::boxed::Box::new(CoreCmd::Assign(
                "x".into(),
                CoreExpr::var("a"),
                Pos::default(),
            )),
            Pos::default(),
        );
        let out = eval_native(&m, &env, &cmd, None).unwrap();
        let decrypted = m.interp(&out["x"]).unwrap();
        assert_eq!(decrypted, vec![BigInt::from(2)]);
    }

    #[test]
    fn modswitch_is_identity_at_message_level() {
        let m = oracle_model(3);
        let mut env = MsgSubstitution::new();
        env.insert("x".into(), vec![BigInt::from(5)]);
        let e = CoreExpr::Op(OpKind::ModSwitch, vec![CoreExpr::var("x")]);
        assert_eq!(eval_msg_expr(&m, &env, &e).unwrap(), vec![BigInt::from(5)]);
    }

    #[test]
    fn plain_constant_interprets_by_decoding() {
        let m = oracle_model(3);
        let env = MsgSubstitution::new();
        let e = CoreExpr::Const(ConstValue::Plain(BigInt::from(7)));
        assert_eq!(eval_msg_expr(&m, &env, &e).unwrap(), vec![BigInt::from(7)]);
    }

    #[test]
    fn empty_program_is_vacuously_equivalent() {
        let m = oracle_model(4);
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let inputs = vec![decl("a", InputKind::Cipher, 1)];
        let gamma = initial_context(&m, &inputs).unwrap();
        let env = initial_substitution(&m, &inputs, &mut rng).unwrap();
        let verdict = check_message_equivalence(&m, &gamma, &env, &CoreCmd::Skip).unwrap();
        assert!(verdict.holds);
    }

    #[test]
    fn well_typed_arith_is_message_equivalent() {
        let m = oracle_model(6);
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let inputs = vec![
            decl("a", InputKind::Cipher, 2),
            decl("b", InputKind::Cipher, 3),
        ];
        let gamma = initial_context(&m, &inputs).unwrap();
        let env = initial_substitution(&m, &inputs, &mut rng).unwrap();
        // x := a (*) b; y := x (+) 1
        let cmd = CoreCmd::seq(vec![
            CoreCmd::Assign(
                "x".into(),
                CoreExpr::Op(OpKind::Mul, vec![CoreExpr::var("a"), CoreExpr::var("b")]),
                Pos::default(),
            ),
            CoreCmd::Assign(
                "y".into(),
                CoreExpr::Op(
                    OpKind::Add,
                    vec![
                        CoreExpr::var("x"),
                        CoreExpr::Const(ConstValue::Plain(BigInt::from(1))),
                    ],
                ),
                Pos::default(),
            ),
        ]);
        let verdict = check_message_equivalence(&m, &gamma, &env, &cmd).unwrap();
        assert!(verdict.holds, "{:?}", verdict.mismatches);
        let native = eval_native(&m, &env, &cmd, None).unwrap();
        assert_eq!(m.interp(&native["y"]).unwrap(), vec![BigInt::from(7)]);
    }

    #[test]
    fn out_of_range_input_literal_rejected() {
        let m = oracle_model(6);
        let inputs = vec![decl("a", InputKind::Cipher, 200)];
        assert!(initial_context(&m, &inputs).is_err());
    }

    #[test]
    fn trace_records_assignments() {
        let m = oracle_model(8);
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        let inputs = vec![decl("a", InputKind::Cipher, 1)];
        let env = initial_substitution(&m, &inputs, &mut rng).unwrap();
        let cmd = CoreCmd::seq(vec![
            CoreCmd::Assign(
                "x".into(),
                CoreExpr::Op(OpKind::Add, vec![CoreExpr::var("a"), CoreExpr::var("a")]),
                Pos::new(1, 1),
            ),
            CoreCmd::Assign("y".into(), CoreExpr::var("x"), Pos::new(2, 1)),
        ]);
        let mut trace = EvalTrace::default();
        eval_native(&m, &env, &cmd, Some(&mut trace)).unwrap();
        assert_eq!(trace.entries.len(), 2);
        assert_eq!(trace.entries[0].var, "x");
    }
}
