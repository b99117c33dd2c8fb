//! Random circuit generation for the fuzz campaigns: well-typed circuits
//! grown statement by statement against the checker, plus deliberately
//! ill-typed extensions whose dynamic behavior the completeness criterion
//! inspects.

use num_bigint::BigInt;
use rand::Rng;
use rand_chacha::ChaCha20Rng;

use ila_core::ir::{ConstValue, CoreCmd, CoreExpr, InputDecl, InputKind, OpKind, Pos};
use ila_core::model::{SchemeKind, SchemeModel, Sort};
use ila_core::semantics::initial_context;
use ila_core::typecheck::{type_expr, TypingContext};

#[derive(Debug, Clone)]
pub struct GenConfig {
    pub max_stmts: usize,
    pub max_mult_depth: u32,
    pub n_cipher_inputs: usize,
    pub n_plain_inputs: usize,
    /// Grow an ill-typed tail after the well-typed prefix.
    pub force_overflow: bool,
    /// Occasionally emit an if over a message guard.
    pub allow_if: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_stmts: 40,
            max_mult_depth: 8,
            n_cipher_inputs: 3,
            n_plain_inputs: 2,
            force_overflow: false,
            allow_if: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GenCircuit {
    pub inputs: Vec<InputDecl>,
    pub body: CoreCmd,
    /// Index (in emitted order) of the first statement the checker
    /// rejects, if an overflow tail was forced.
    pub first_rejected: Option<usize>,
    pub gamma0: TypingContext,
}

struct VarInfo {
    name: String,
    sort: Sort,
    mult_depth: u32,
}

/// Grow one random circuit. The well-typed prefix is checked statement by
/// statement; candidates the checker rejects are skipped (up to a retry
/// budget). With `force_overflow`, a rejected multiply/add chain is then
/// appended deliberately.
pub fn gen_circuit(model: &SchemeModel, cfg: &GenConfig, rng: &mut ChaCha20Rng) -> GenCircuit {
    let quarter: i64 = {
        let q: BigInt = &model.t / 4;
        i64::try_from(&q).unwrap_or(2).max(1)
    };
    let small = quarter.min(3);

    let mut inputs = Vec::new();
    let mut vars: Vec<VarInfo> = Vec::new();
    for i in 0..cfg.n_cipher_inputs {
        let kind = if model.kind == SchemeKind::Tfhe {
            match rng.gen_range(0..3u8) {
                0 => InputKind::Cipher,
                1 => InputKind::CipherRlwe,
                _ => InputKind::CipherRgsw,
            }
        } else {
            InputKind::Cipher
        };
        let name = format!("in{i}");
        inputs.push(InputDecl {
            name: name.clone(),
            kind,
            value: BigInt::from(rng.gen_range(-small..=small)),
            pos: Pos::new(1, 1 + i as u32),
        });
        vars.push(VarInfo {
            name,
            sort: Sort::Cipher,
            mult_depth: 0,
        });
    }
    for i in 0..cfg.n_plain_inputs {
        let name = format!("p{i}");
        inputs.push(InputDecl {
            name: name.clone(),
            kind: InputKind::Plain,
            value: BigInt::from(rng.gen_range(-small..=small)),
            pos: Pos::new(2, 1 + i as u32),
        });
        vars.push(VarInfo {
            name,
            sort: Sort::Plain,
            mult_depth: 0,
        });
    }
    let gamma0 = initial_context(model, &inputs).expect("generated inputs are in range");

    let mut gamma = gamma0.clone();
    let mut cmds: Vec<CoreCmd> = Vec::new();
    let mut line = 10u32;
    let mut fresh = 0usize;

    let ops: &[OpKind] = match model.kind {
        SchemeKind::Tfhe => &[
            OpKind::Add,
            OpKind::Add,
            OpKind::ScalarMul,
            OpKind::BoxMul,
            OpKind::ExtMul,
            OpKind::Pbs,
            OpKind::Cmux,
        ],
        _ => &[
            OpKind::Add,
            OpKind::Add,
            OpKind::Mul,
            OpKind::Mul,
            OpKind::ScalarMul,
            OpKind::ModSwitch,
        ],
    };

    let mut emitted = 0usize;
    let mut tries = 0usize;
    while emitted < cfg.max_stmts && tries < cfg.max_stmts * 30 {
        tries += 1;
        let op = ops[rng.gen_range(0..ops.len())];
        let Some((expr, depth)) = candidate(model, &vars, op, small, rng) else {
            continue;
        };
        if depth > cfg.max_mult_depth {
            continue;
        }
        if type_expr(model, &gamma, &expr).is_err() {
            continue;
        }
        let name = format!("v{fresh}");
        fresh += 1;
        let ty = type_expr(model, &gamma, &expr).unwrap();
        let sort = ty.sort();
        gamma = gamma.update(&name, ty);
        cmds.push(CoreCmd::Assign(name.clone(), expr, Pos::new(line, 1)));
        line += 1;
        vars.push(VarInfo {
            name,
            sort,
            mult_depth: depth,
        });
        emitted += 1;

        // occasionally wrap the next couple of statements in a message if
        if cfg.allow_if && emitted + 2 < cfg.max_stmts && rng.gen_ratio(1, 12) {
            if let Some((then_cmd, else_cmd, ifname)) =
                gen_if(model, &gamma, &vars, line, fresh, rng)
            {
                fresh += 1;
                let guard = if rng.gen::<bool>() {
                    CoreExpr::Op(OpKind::True, vec![])
                } else {
                    CoreExpr::Const(ConstValue::Msg(BigInt::from(rng.gen_range(0..2))))
                };
                let cmd = CoreCmd::If(
                    guard,
                    Box::new(then_cmd),
                    Box::new(else_cmd),
                    Pos::new(line, 1),
                );
                if ila_core::typecheck::type_cmd(model, &gamma, &cmd).is_ok() {
                    gamma = ila_core::typecheck::type_cmd(model, &gamma, &cmd).unwrap();
                    cmds.push(cmd);
                    line += 1;
                    emitted += 1;
                    // the merged variable may or may not survive the merge
                    if let Some(ty) = gamma.lookup(&ifname) {
                        vars.push(VarInfo {
                            name: ifname,
                            sort: ty.sort(),
                            mult_depth: cfg.max_mult_depth.min(4),
                        });
                    }
                }
            }
        }
    }

    let mut first_rejected = None;
    if cfg.force_overflow {
        // drive the deepest cipher variable into a rejected chain: keep
        // squaring (BGV/BFV) or adding (TFHE) past the threshold
        let deepest = vars
            .iter()
            .filter(|v| v.sort == Sort::Cipher)
            .max_by_key(|v| v.mult_depth)
            .map(|v| v.name.clone());
        if let Some(mut cur) = deepest {
            for k in 0..64 {
                let expr = match model.kind {
                    SchemeKind::Tfhe => CoreExpr::Op(
                        OpKind::Add,
                        vec![CoreExpr::Var(cur.clone()), CoreExpr::Var(cur.clone())],
                    ),
                    _ => CoreExpr::Op(
                        OpKind::Mul,
                        vec![CoreExpr::Var(cur.clone()), CoreExpr::Var(cur.clone())],
                    ),
                };
                let name = format!("ov{k}");
                let rejected = type_expr(model, &gamma, &expr).is_err();
                if let Ok(ty) = type_expr(model, &gamma, &expr) {
                    gamma = gamma.update(&name, ty);
                }
                cmds.push(CoreCmd::Assign(name.clone(), expr, Pos::new(line, 1)));
                line += 1;
                if rejected {
                    first_rejected = Some(cmds.len() - 1);
                    break;
                }
                cur = name;
            }
        }
    }

    GenCircuit {
        inputs,
        body: CoreCmd::seq(cmds),
        first_rejected,
        gamma0,
    }
}

fn pick_var<'a>(
    vars: &'a [VarInfo],
    sort: Sort,
    rng: &mut ChaCha20Rng,
) -> Option<&'a VarInfo> {
    let pool: Vec<&VarInfo> = vars.iter().filter(|v| v.sort == sort).collect();
    if pool.is_empty() {
        None
    } else {
        Some(pool[rng.gen_range(0..pool.len())])
    }
}

fn candidate(
    _model: &SchemeModel,
    vars: &[VarInfo],
    op: OpKind,
    small: i64,
    rng: &mut ChaCha20Rng,
) -> Option<(CoreExpr, u32)> {
    let plain_const = |rng: &mut ChaCha20Rng| {
        CoreExpr::Const(ConstValue::Plain(BigInt::from(rng.gen_range(-1i64..=1))))
    };
    match op {
        OpKind::Add | OpKind::Mul | OpKind::BoxMul | OpKind::ExtMul => {
            let a = pick_var(vars, Sort::Cipher, rng)?;
            let use_plain = op == OpKind::Add && rng.gen_ratio(1, 3);
            let (b_expr, b_depth) = if use_plain {
                (plain_const(rng), 0)
            } else {
                let b = pick_var(vars, Sort::Cipher, rng)?;
                (CoreExpr::Var(b.name.clone()), b.mult_depth)
            };
            let depth = match op {
                OpKind::Add => a.mult_depth.max(b_depth),
                _ => a.mult_depth.max(b_depth) + 1,
            };
            Some((
                CoreExpr::Op(op, vec![CoreExpr::Var(a.name.clone()), b_expr]),
                depth,
            ))
        }
        OpKind::ScalarMul => {
            let a = pick_var(vars, Sort::Cipher, rng)?;
            let n = rng.gen_range(-small.max(1)..=small.max(1));
            Some((
                CoreExpr::Op(
                    op,
                    vec![
                        CoreExpr::Const(ConstValue::Msg(BigInt::from(n))),
                        CoreExpr::Var(a.name.clone()),
                    ],
                ),
                a.mult_depth,
            ))
        }
        OpKind::ModSwitch => {
            let a = pick_var(vars, Sort::Cipher, rng)?;
            Some((
                CoreExpr::Op(op, vec![CoreExpr::Var(a.name.clone())]),
                a.mult_depth,
            ))
        }
        OpKind::Pbs => {
            let lut = pick_var(vars, Sort::Cipher, rng)?;
            let x = pick_var(vars, Sort::Cipher, rng)?;
            Some((
                CoreExpr::Op(
                    op,
                    vec![
                        CoreExpr::Var(lut.name.clone()),
                        CoreExpr::Var(x.name.clone()),
                    ],
                ),
                x.mult_depth,
            ))
        }
        OpKind::Cmux => {
            let c = pick_var(vars, Sort::Cipher, rng)?;
            let a = pick_var(vars, Sort::Cipher, rng)?;
            let b = pick_var(vars, Sort::Cipher, rng)?;
            Some((
                CoreExpr::Op(
                    op,
                    vec![
                        CoreExpr::Var(c.name.clone()),
                        CoreExpr::Var(a.name.clone()),
                        CoreExpr::Var(b.name.clone()),
                    ],
                ),
                a.mult_depth.max(b.mult_depth) + 1,
            ))
        }
        _ => None,
    }
}

fn gen_if(
    model: &SchemeModel,
    gamma: &TypingContext,
    vars: &[VarInfo],
    line: u32,
    fresh: usize,
    rng: &mut ChaCha20Rng,
) -> Option<(CoreCmd, CoreCmd, String)> {
    let a = pick_var(vars, Sort::Cipher, rng)?;
    let b = pick_var(vars, Sort::Cipher, rng)?;
    let name = format!("v{fresh}");
    // distinct positions per branch keep assignment identities unique
    let mk = |src: &VarInfo, col: u32| {
        CoreCmd::Assign(
            name.clone(),
            CoreExpr::Op(
                OpKind::Add,
                vec![
                    CoreExpr::Var(src.name.clone()),
                    CoreExpr::Var(src.name.clone()),
                ],
            ),
            Pos::new(line, col),
        )
    };
    let then_cmd = mk(a, 2);
    let else_cmd = mk(b, 3);
    // both branches must type for the candidate to be usable
    let ok = ila_core::typecheck::type_cmd(model, gamma, &then_cmd).is_ok()
        && ila_core::typecheck::type_cmd(model, gamma, &else_cmd).is_ok();
    ok.then_some((then_cmd, else_cmd, name))
}
