//! Lowering: unroll loops, resolve vector/matrix indexing, fold counter
//! arithmetic, and collect input declarations. The output is a loop-free
//! core command whose semantics matches the surface program; the
//! equivalence is exercised by the differential tests in `tests/`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::Zero;

use super::ast::*;

/// Default cap on emitted core statements.
pub const DEFAULT_UNROLL_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LowerError {
    pub pos: Pos,
    pub msg: String,
}

impl core::fmt::Display for LowerError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "lowering error at {}: {}", self.pos, self.msg)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for LowerError {}

/// A loop-free program plus the inputs its environment must provide.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoweredProgram {
    pub inputs: Vec<InputDecl>,
    pub body: CoreCmd,
}

#[derive(Debug, Clone, Copy)]
struct VecMeta {
    rows: usize,
    /// `Some` for matrices (row-major flattening), `None` for vectors.
    cols: Option<usize>,
}

struct Lowerer {
    budget: usize,
    emitted: usize,
    inputs: Vec<InputDecl>,
    vectors: BTreeMap<String, VecMeta>,
    scalars: BTreeMap<String, InputKind>,
    consts: BTreeMap<String, BigInt>,
    depth: usize,
}

enum Folded {
    Int(BigInt),
    Core(CoreExpr),
}

impl Lowerer {
    fn fail<T>(&self, pos: Pos, msg: impl Into<String>) -> Result<T, LowerError> {
        Err(LowerError {
            pos,
            msg: msg.into(),
        })
    }

    fn element_name(name: &str, meta: &VecMeta, idx: &[usize]) -> String {
        match (meta.cols, idx) {
            (None, [i]) => format!("{name}.{i}"),
            (Some(cols), [i, j]) => format!("{name}.{}", i * cols + j),
            _ => unreachable!("index arity checked before mangling"),
        }
    }

    fn resolve_index(
        &mut self,
        name: &str,
        idx: &[SurfaceExpr],
        pos: Pos,
    ) -> Result<String, LowerError> {
        let meta = match self.vectors.get(name) {
            Some(m) => *m,
            None => {
                return self.fail(
                    pos,
                    format!("`{name}` is not a declared vector or matrix"),
                )
            }
        };
        let want_dims = if meta.cols.is_some() { 2 } else { 1 };
        if idx.len() != want_dims {
            return self.fail(
                pos,
                format!(
                    "`{name}` takes {} index dimension(s), got {}",
                    want_dims,
                    idx.len()
                ),
            );
        }
        let mut resolved = Vec::new();
        for (dim, e) in idx.iter().enumerate() {
            let v = match self.fold(e)? {
                Folded::Int(v) => v,
                Folded::Core(_) => {
                    return self.fail(
                        e.pos(),
                        "vector index must be a compile-time constant".to_string(),
                    )
                }
            };
            let limit = if dim == 0 {
                meta.rows
            } else {
                meta.cols.unwrap()
            };
            let as_usize: usize = match (&v).try_into() {
                Ok(u) => u,
                Err(_) => usize::MAX,
            };
            if v < BigInt::zero() || as_usize >= limit {
                return self.fail(
                    e.pos(),
                    format!("index {v} out of bounds for `{name}` (length {limit})"),
                );
            }
            resolved.push(as_usize);
        }
        Ok(Self::element_name(name, &meta, &resolved))
    }

    fn fold(&mut self, e: &SurfaceExpr) -> Result<Folded, LowerError> {
        match e {
            SurfaceExpr::Int(v, _) => Ok(Folded::Int(v.clone())),
            SurfaceExpr::Var(x, pos) => {
                if let Some(v) = self.consts.get(x) {
                    return Ok(Folded::Int(v.clone()));
                }
                if self.vectors.contains_key(x) {
                    return self.fail(*pos, format!("vector `{x}` used without an index"));
                }
                Ok(Folded::Core(CoreExpr::Var(x.clone())))
            }
            SurfaceExpr::Index(name, idx, pos) => {
                let var = self.resolve_index(name, idx, *pos)?;
                Ok(Folded::Core(CoreExpr::Var(var)))
            }
            SurfaceExpr::Neg(inner, pos) => match self.fold(inner)? {
                Folded::Int(v) => Ok(Folded::Int(-v)),
                Folded::Core(_) => self.fail(
                    *pos,
                    "unary minus needs a compile-time constant; use `-1 (.) e` for runtime negation",
                ),
            },
            SurfaceExpr::IntBin(op, a, b, pos) => {
                let (a, b) = (self.fold(a)?, self.fold(b)?);
                match (a, b) {
                    (Folded::Int(a), Folded::Int(b)) => {
                        let v = match op {
                            IntBinOp::Add => a + b,
                            IntBinOp::Sub => a - b,
                            IntBinOp::Mul => a * b,
                            IntBinOp::Lt => BigInt::from((a < b) as u8),
                            IntBinOp::Le => BigInt::from((a <= b) as u8),
                            IntBinOp::Gt => BigInt::from((a > b) as u8),
                            IntBinOp::Ge => BigInt::from((a >= b) as u8),
                            IntBinOp::EqEq => BigInt::from((a == b) as u8),
                            IntBinOp::Ne => BigInt::from((a != b) as u8),
                        };
                        Ok(Folded::Int(v))
                    }
                    _ => self.fail(
                        *pos,
                        format!(
                            "integer operator `{}` needs compile-time constant operands",
                            op.token()
                        ),
                    ),
                }
            }
            SurfaceExpr::HomBin(OpKind::ScalarMul, lhs, rhs, pos) => {
                let n = match self.fold(lhs)? {
                    Folded::Int(n) => n,
                    Folded::Core(_) => {
                        return self.fail(
                            *pos,
                            "scalar multiplier (left of `(.)`) must be a compile-time constant",
                        )
                    }
                };
                let rhs = self.fold_operand(rhs)?;
                Ok(Folded::Core(CoreExpr::Op(
                    OpKind::ScalarMul,
                    alloc::vec![CoreExpr::Const(ConstValue::Msg(n)), rhs],
                )))
            }
            SurfaceExpr::HomBin(op, lhs, rhs, _) => {
                let l = self.fold_operand(lhs)?;
                let r = self.fold_operand(rhs)?;
                Ok(Folded::Core(CoreExpr::Op(*op, alloc::vec![l, r])))
            }
            SurfaceExpr::Call(op, args, _) => {
                let mut core_args = Vec::new();
                for a in args {
                    core_args.push(self.fold_operand(a)?);
                }
                Ok(Folded::Core(CoreExpr::Op(*op, core_args)))
            }
        }
    }

    /// Fold an operand of a scheme operator; integers become plaintext
    /// constants there.
    fn fold_operand(&mut self, e: &SurfaceExpr) -> Result<CoreExpr, LowerError> {
        Ok(match self.fold(e)? {
            Folded::Int(v) => CoreExpr::Const(ConstValue::Plain(v)),
            Folded::Core(c) => c,
        })
    }

    /// Fold in a position where integers stay messages (guards, counter
    /// assignments).
    fn fold_msg(&mut self, e: &SurfaceExpr) -> Result<CoreExpr, LowerError> {
        Ok(match self.fold(e)? {
            Folded::Int(v) => CoreExpr::Const(ConstValue::Msg(v)),
            Folded::Core(c) => c,
        })
    }

    fn emit(&mut self, out: &mut Vec<CoreCmd>, cmd: CoreCmd, pos: Pos) -> Result<(), LowerError> {
        self.emitted += 1;
        if self.emitted > self.budget {
            return self.fail(
                pos,
                format!("unroll budget of {} core statements exceeded", self.budget),
            );
        }
        out.push(cmd);
        Ok(())
    }

    fn declare_inputs(
        &mut self,
        name: &str,
        kind: InputKind,
        shape: &InitShape,
        pos: Pos,
    ) -> Result<(), LowerError> {
        if self.depth > 0 {
            return self.fail(
                pos,
                "cipher_init/plain_init declarations must be at the top level",
            );
        }
        if self.vectors.contains_key(name) || self.scalars.contains_key(name) {
            return self.fail(pos, format!("input `{name}` declared twice"));
        }
        let push = |this: &mut Self, var: String, value: &BigInt| {
            this.inputs.push(InputDecl {
                name: var,
                kind,
                value: value.clone(),
                pos,
            });
        };
        match shape {
            InitShape::Scalar(v) => {
                self.scalars.insert(name.to_string(), kind);
                push(self, name.to_string(), v);
            }
            InitShape::Vector(vs) => {
                let meta = VecMeta {
                    rows: vs.len(),
                    cols: None,
                };
                self.vectors.insert(name.to_string(), meta);
                for (i, v) in vs.iter().enumerate() {
                    push(self, Self::element_name(name, &meta, &[i]), v);
                }
            }
            InitShape::Matrix(rows) => {
                let cols = rows.first().map(|r| r.len()).unwrap_or(0);
                if rows.iter().any(|r| r.len() != cols) || cols == 0 {
                    return self.fail(pos, "matrix rows must be non-empty and equal length");
                }
                let meta = VecMeta {
                    rows: rows.len(),
                    cols: Some(cols),
                };
                self.vectors.insert(name.to_string(), meta);
                for (i, row) in rows.iter().enumerate() {
                    for (j, v) in row.iter().enumerate() {
                        push(self, Self::element_name(name, &meta, &[i, j]), v);
                    }
                }
            }
        }
        Ok(())
    }

    fn stmt(&mut self, s: &SurfaceStmt, out: &mut Vec<CoreCmd>) -> Result<(), LowerError> {
        match s {
            SurfaceStmt::Assign { target, rhs, pos } => match rhs {
                SurfaceRhs::Init(kind, shape) => {
                    let name = match target {
                        LValue::Var(n) => n,
                        LValue::Index(..) => {
                            return self.fail(*pos, "cannot assign an initializer to an element")
                        }
                    };
                    self.declare_inputs(name, *kind, shape, *pos)
                }
                SurfaceRhs::Expr(e) => {
                    let var = match target {
                        LValue::Var(n) => {
                            if self.vectors.contains_key(n) {
                                return self.fail(
                                    *pos,
                                    format!("vector `{n}` can only be assigned element-wise"),
                                );
                            }
                            n.clone()
                        }
                        LValue::Index(name, idx) => self.resolve_index(name, idx, *pos)?,
                    };
                    let folded = self.fold_msg(e)?;
                    // track counters for loop bounds and indexing
                    if let CoreExpr::Const(ConstValue::Msg(v)) = &folded {
                        self.consts.insert(var.clone(), v.clone());
                    } else {
                        self.consts.remove(&var);
                    }
                    self.emit(out, CoreCmd::Assign(var, folded, *pos), *pos)
                }
            },
            SurfaceStmt::While { cond, body, pos } => {
                let mut iterations = 0usize;
                loop {
                    let guard = match self.fold(cond) {
                        Ok(Folded::Int(v)) => v,
                        Ok(Folded::Core(_)) => {
                            return self.fail(
                                cond.pos(),
                                "non-constant bound: while condition must be statically evaluable",
                            )
                        }
                        Err(e) => {
                            return self.fail(
                                cond.pos(),
                                format!("non-constant bound: {}", e.msg),
                            )
                        }
                    };
                    if guard.is_zero() {
                        break;
                    }
                    iterations += 1;
                    if iterations > self.budget {
                        return self.fail(
                            *pos,
                            format!("unroll budget of {} iterations exceeded", self.budget),
                        );
                    }
                    self.depth += 1;
                    for s in body {
                        self.stmt(s, out)?;
                    }
                    self.depth -= 1;
                }
                Ok(())
            }
            SurfaceStmt::If {
                cond,
                then_body,
                else_body,
                pos,
            } => {
                let guard = self.fold_msg(cond)?;
                let consts_before = self.consts.clone();
                self.depth += 1;
                let mut then_cmds = Vec::new();
                for s in then_body {
                    self.stmt(s, &mut then_cmds)?;
                }
                let consts_then = core::mem::replace(&mut self.consts, consts_before);
                let mut else_cmds = Vec::new();
                for s in else_body {
                    self.stmt(s, &mut else_cmds)?;
                }
                self.depth -= 1;
                // only counters that agree across both branches stay constant
                let consts_else = core::mem::take(&mut self.consts);
                self.consts = consts_then
                    .into_iter()
                    .filter(|(k, v)| consts_else.get(k) == Some(v))
                    .collect();
                let cmd = CoreCmd::If(
                    guard,
                    alloc::boxed::Box::new(CoreCmd::seq(then_cmds)),
                    alloc::boxed::Box::new(CoreCmd::seq(else_cmds)),
                    *pos,
                );
                self.emit(out, cmd, *pos)
            }
        }
    }
}

pub fn lower(prog: &SurfaceProgram) -> Result<LoweredProgram, LowerError> {
    lower_with_budget(prog, DEFAULT_UNROLL_BUDGET)
}

pub fn lower_with_budget(
    prog: &SurfaceProgram,
    budget: usize,
) -> Result<LoweredProgram, LowerError> {
    let mut lw = Lowerer {
        budget,
        emitted: 0,
        inputs: Vec::new(),
        vectors: BTreeMap::new(),
        scalars: BTreeMap::new(),
        consts: BTreeMap::new(),
        depth: 0,
    };
    let mut out = Vec::new();
    for s in &prog.stmts {
        lw.stmt(s, &mut out)?;
    }
    Ok(LoweredProgram {
        inputs: lw.inputs,
        body: CoreCmd::seq(out),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::parse;

    #[test]
    fn two_iteration_unroll() {
        let src = "x := cipher_init(1)\ni := 0\nwhile i < 2 {\n  x := x (*) x\n  i := i + 1\n}\n";
        let p = lower(&parse(src).unwrap()).unwrap();
        // i:=0, then per iteration: x:=x(*)x and i:=i+1
        assert_eq!(p.body.assign_count(), 5);
        assert_eq!(p.inputs.len(), 1);
    }

    #[test]
    fn non_constant_bound_rejected() {
        let src = "n := cipher_init(3)\ni := 0\nwhile i < n {\n  i := i + 1\n}\n";
        let err = lower(&parse(src).unwrap()).unwrap_err();
        assert!(err.msg.contains("non-constant bound"), "{err}");
    }

    #[test]
    fn index_out_of_bounds() {
        let src = "A := cipher_init[1, 2]\nx := A[2]\n";
        let err = lower(&parse(src).unwrap()).unwrap_err();
        assert!(err.msg.contains("out of bounds"), "{err}");
    }

    #[test]
    fn matrix_flattens_row_major() {
        let src = "M := cipher_init[[1,2],[3,4]]\nx := M[1][0]\n";
        let p = lower(&parse(src).unwrap()).unwrap();
        assert_eq!(p.inputs.len(), 4);
        assert_eq!(p.inputs[2].name, "M.2");
        match &p.body {
            CoreCmd::Assign(x, CoreExpr::Var(v), _) => {
                assert_eq!(x, "x");
                assert_eq!(v, "M.2");
            }
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn unroll_budget_enforced() {
        let src = "i := 0\nwhile i < 100 {\n  i := i + 1\n}\n";
        let err = lower_with_budget(&parse(src).unwrap(), 10).unwrap_err();
        assert!(err.msg.contains("budget"), "{err}");
    }

    #[test]
    fn rectangular_nest_size_is_product_of_bounds() {
        // 3 * 4 iterations, 2 statements in the inner body, plus loop
        // counter machinery: exactly (bounds product) * (body size).
        let src = "\
c := cipher_init(1)
i := 0
while i < 3 {
  j := 0
  while j < 4 {
    c := c (+) c
    j := j + 1
  }
  i := i + 1
}
";
        let p = lower(&parse(src).unwrap()).unwrap();
        // top level: i:=0 (1); outer per-iteration: j:=0, inner 4*(2), i:=i+1
        // = 3 * (1 + 8 + 1) = 30; total 31
        assert_eq!(p.body.assign_count(), 31);
        let inner_body = 2;
        let product: usize = 3 * 4;
        let inner_assigns = product * inner_body;
        assert_eq!(p.body.assign_count(), 1 + inner_assigns + 3 * 2);
    }

    #[test]
    fn if_keeps_runtime_guard() {
        let src = "g := 1\nx := cipher_init(1)\nif g {\n  y := x (+) x\n} else {\n  y := x\n}\n";
        let p = lower(&parse(src).unwrap()).unwrap();
        assert!(p.body.contains_if());
    }

    #[test]
    fn init_inside_loop_rejected() {
        let src = "i := 0\nwhile i < 2 {\n  A := cipher_init(1)\n  i := i + 1\n}\n";
        assert!(lower(&parse(src).unwrap()).is_err());
    }
}
