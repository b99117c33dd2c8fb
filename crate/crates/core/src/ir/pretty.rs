//! Canonical printers. `parse(pretty_surface(p))` reproduces `p` up to
//! source positions; the property test in `tests/` keeps this honest.

use alloc::string::String;

use core::fmt::Write;

use super::ast::*;
use super::lower::LoweredProgram;

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

fn surface_atom(e: &SurfaceExpr) -> bool {
    matches!(
        e,
        SurfaceExpr::Int(..) | SurfaceExpr::Var(..) | SurfaceExpr::Index(..) | SurfaceExpr::Call(..)
    )
}

fn write_surface_expr(out: &mut String, e: &SurfaceExpr) {
    match e {
        SurfaceExpr::Int(v, _) => {
            let _ = write!(out, "{v}");
        }
        SurfaceExpr::Var(x, _) => out.push_str(x),
        SurfaceExpr::Index(x, idx, _) => {
            out.push_str(x);
            for i in idx {
                out.push('[');
                write_surface_expr(out, i);
                out.push(']');
            }
        }
        SurfaceExpr::Neg(inner, _) => {
            out.push('-');
            write_paren_if(out, inner, !surface_atom(inner));
        }
        SurfaceExpr::IntBin(op, a, b, _) => {
            write_paren_if(out, a, !surface_atom(a));
            let _ = write!(out, " {} ", op.token());
            write_paren_if(out, b, !surface_atom(b));
        }
        SurfaceExpr::HomBin(op, a, b, _) => {
            write_paren_if(out, a, !surface_atom(a));
            let _ = write!(out, " {} ", op.name());
            write_paren_if(out, b, !surface_atom(b));
        }
        SurfaceExpr::Call(op, args, _) => {
            out.push_str(call_name(*op));
            if *op == OpKind::True {
                out.push_str("()");
                return;
            }
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_surface_expr(out, a);
            }
            out.push(')');
        }
    }
}

fn call_name(op: OpKind) -> &'static str {
    match op {
        OpKind::ModSwitch => "modswitch",
        OpKind::Pbs => "pbs",
        OpKind::Cmux => "cmux",
        OpKind::True => "true",
        other => other.name(),
    }
}

fn write_paren_if(out: &mut String, e: &SurfaceExpr, paren: bool) {
    if paren {
        out.push('(');
        write_surface_expr(out, e);
        out.push(')');
    } else {
        write_surface_expr(out, e);
    }
}

fn write_init(out: &mut String, kw: &str, shape: &InitShape) {
    out.push_str(kw);
    match shape {
        InitShape::Scalar(v) => {
            let _ = write!(out, "({v})");
        }
        InitShape::Vector(vs) => {
            out.push('[');
            for (i, v) in vs.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "{v}");
            }
            out.push(']');
        }
        InitShape::Matrix(rows) => {
            out.push('[');
            for (i, row) in rows.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push('[');
                for (j, v) in row.iter().enumerate() {
                    if j > 0 {
                        out.push_str(", ");
                    }
                    let _ = write!(out, "{v}");
                }
                out.push(']');
            }
            out.push(']');
        }
    }
}

fn write_stmt(out: &mut String, s: &SurfaceStmt, level: usize) {
    indent(out, level);
    match s {
        SurfaceStmt::Assign { target, rhs, .. } => {
            match target {
                LValue::Var(x) => out.push_str(x),
                LValue::Index(x, idx) => {
                    out.push_str(x);
                    for i in idx {
                        out.push('[');
                        write_surface_expr(out, i);
                        out.push(']');
                    }
                }
            }
            out.push_str(" := ");
            match rhs {
                SurfaceRhs::Init(kind, shape) => write_init(out, kind.keyword(), shape),
                SurfaceRhs::Expr(e) => write_surface_expr(out, e),
            }
            out.push('\n');
        }
        SurfaceStmt::While { cond, body, .. } => {
            out.push_str("while ");
            write_surface_expr(out, cond);
            out.push_str(" {\n");
            for s in body {
                write_stmt(out, s, level + 1);
            }
            indent(out, level);
            out.push_str("}\n");
        }
        SurfaceStmt::If {
            cond,
            then_body,
            else_body,
            ..
        } => {
            out.push_str("if ");
            write_surface_expr(out, cond);
            out.push_str(" {\n");
            for s in then_body {
                write_stmt(out, s, level + 1);
            }
            indent(out, level);
            if else_body.is_empty() {
                out.push_str("}\n");
            } else {
                out.push_str("} else {\n");
                for s in else_body {
                    write_stmt(out, s, level + 1);
                }
                indent(out, level);
                out.push_str("}\n");
            }
        }
    }
}

pub fn pretty_surface(p: &SurfaceProgram) -> String {
    let mut out = String::new();
    for s in &p.stmts {
        write_stmt(&mut out, s, 0);
    }
    out
}

fn core_atom(e: &CoreExpr) -> bool {
    !matches!(
        e,
        CoreExpr::Op(
            OpKind::Add
                | OpKind::Mul
                | OpKind::ScalarMul
                | OpKind::BoxMul
                | OpKind::ExtMul,
            _
        )
    )
}

fn write_core_expr(out: &mut String, e: &CoreExpr) {
    match e {
        CoreExpr::Var(x) => out.push_str(x),
        CoreExpr::Const(ConstValue::Msg(v)) | CoreExpr::Const(ConstValue::Plain(v)) => {
            let _ = write!(out, "{v}");
        }
        CoreExpr::Op(
            op @ (OpKind::Add | OpKind::Mul | OpKind::ScalarMul | OpKind::BoxMul | OpKind::ExtMul),
            args,
        ) => {
            let paren = |out: &mut String, a: &CoreExpr| {
                if core_atom(a) {
                    write_core_expr(out, a);
                } else {
                    out.push('(');
                    write_core_expr(out, a);
                    out.push(')');
                }
            };
            paren(out, &args[0]);
            let _ = write!(out, " {} ", op.name());
            paren(out, &args[1]);
        }
        CoreExpr::Op(OpKind::True, _) => out.push_str("true()"),
        CoreExpr::Op(op, args) => {
            out.push_str(call_name(*op));
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_core_expr(out, a);
            }
            out.push(')');
        }
    }
}

fn write_core_cmd(out: &mut String, c: &CoreCmd, level: usize) {
    match c {
        CoreCmd::Skip => {}
        CoreCmd::Assign(x, e, _) => {
            indent(out, level);
            out.push_str(x);
            out.push_str(" := ");
            write_core_expr(out, e);
            out.push('\n');
        }
        CoreCmd::Seq(cs) => {
            for c in cs {
                write_core_cmd(out, c, level);
            }
        }
        CoreCmd::If(g, a, b, _) => {
            indent(out, level);
            out.push_str("if ");
            write_core_expr(out, g);
            out.push_str(" {\n");
            write_core_cmd(out, a, level + 1);
            indent(out, level);
            out.push_str("} else {\n");
            write_core_cmd(out, b, level + 1);
            indent(out, level);
            out.push_str("}\n");
        }
    }
}

pub fn pretty_core(c: &CoreCmd) -> String {
    let mut out = String::new();
    write_core_cmd(&mut out, c, 0);
    out
}

/// Render a lowered program back to `.ila` text: scalar init declarations
/// for every input, then the body. Reparsing and lowering the output yields
/// the same inputs and body.
pub fn pretty_lowered(p: &LoweredProgram) -> String {
    let mut out = String::new();
    for inp in &p.inputs {
        let _ = writeln!(out, "{} := {}({})", inp.name, inp.kind.keyword(), inp.value);
    }
    write_core_cmd(&mut out, &p.body, 0);
    out
}

/// Structural equality that ignores source positions; used by round-trip
/// tests.
pub fn surface_eq_modulo_pos(a: &SurfaceProgram, b: &SurfaceProgram) -> bool {
    fn stmts_eq(a: &[SurfaceStmt], b: &[SurfaceStmt]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| stmt_eq(x, y))
    }
    fn stmt_eq(a: &SurfaceStmt, b: &SurfaceStmt) -> bool {
        match (a, b) {
            (
                SurfaceStmt::Assign {
                    target: t1,
                    rhs: r1,
                    ..
                },
                SurfaceStmt::Assign {
                    target: t2,
                    rhs: r2,
                    ..
                },
            ) => lvalue_eq(t1, t2) && rhs_eq(r1, r2),
            (
                SurfaceStmt::While {
                    cond: c1, body: b1, ..
                },
                SurfaceStmt::While {
                    cond: c2, body: b2, ..
                },
            ) => expr_eq(c1, c2) && stmts_eq(b1, b2),
            (
                SurfaceStmt::If {
                    cond: c1,
                    then_body: t1,
                    else_body: e1,
                    ..
                },
                SurfaceStmt::If {
                    cond: c2,
                    then_body: t2,
                    else_body: e2,
                    ..
                },
            ) => expr_eq(c1, c2) && stmts_eq(t1, t2) && stmts_eq(e1, e2),
            _ => false,
        }
    }
    fn lvalue_eq(a: &LValue, b: &LValue) -> bool {
        match (a, b) {
            (LValue::Var(x), LValue::Var(y)) => x == y,
            (LValue::Index(x, i), LValue::Index(y, j)) => {
                x == y && i.len() == j.len() && i.iter().zip(j).all(|(a, b)| expr_eq(a, b))
            }
            _ => false,
        }
    }
    fn rhs_eq(a: &SurfaceRhs, b: &SurfaceRhs) -> bool {
        match (a, b) {
            (SurfaceRhs::Init(k1, x), SurfaceRhs::Init(k2, y)) => k1 == k2 && x == y,
            (SurfaceRhs::Expr(x), SurfaceRhs::Expr(y)) => expr_eq(x, y),
            _ => false,
        }
    }
    fn exprs_eq(a: &[SurfaceExpr], b: &[SurfaceExpr]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| expr_eq(x, y))
    }
    fn expr_eq(a: &SurfaceExpr, b: &SurfaceExpr) -> bool {
        match (a, b) {
            (SurfaceExpr::Int(x, _), SurfaceExpr::Int(y, _)) => x == y,
            (SurfaceExpr::Var(x, _), SurfaceExpr::Var(y, _)) => x == y,
            (SurfaceExpr::Index(x, i, _), SurfaceExpr::Index(y, j, _)) => {
                x == y && exprs_eq(i, j)
            }
            (SurfaceExpr::Neg(x, _), SurfaceExpr::Neg(y, _)) => expr_eq(x, y),
            (SurfaceExpr::IntBin(o1, a1, b1, _), SurfaceExpr::IntBin(o2, a2, b2, _)) => {
                o1 == o2 && expr_eq(a1, a2) && expr_eq(b1, b2)
            }
            (SurfaceExpr::HomBin(o1, a1, b1, _), SurfaceExpr::HomBin(o2, a2, b2, _)) => {
                o1 == o2 && expr_eq(a1, a2) && expr_eq(b1, b2)
            }
            (SurfaceExpr::Call(o1, a1, _), SurfaceExpr::Call(o2, a2, _)) => {
                o1 == o2 && exprs_eq(a1, a2)
            }
            _ => false,
        }
    }
    stmts_eq(&a.stmts, &b.stmts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{lower, parse};

    #[test]
    fn surface_round_trip() {
        let src = "\
A := cipher_init[1, 3, 36]
B := cipher_init[2, 20]
result := R.0
i := 0
while i < 3 {
  j := 0
  while j < 2 {
    t1 := -1 (.) B[j]
    t2 := A[i] (+) t1
    result := result (*) t2
    j := j + 1
  }
  i := i + 1
}
";
        let p = parse(src).unwrap();
        let printed = pretty_surface(&p);
        let p2 = parse(&printed).unwrap();
        assert!(surface_eq_modulo_pos(&p, &p2), "round trip changed the AST:\n{printed}");
        // a second print is a fixed point
        assert_eq!(printed, pretty_surface(&p2));
    }

    #[test]
    fn lowered_round_trip() {
        let src = "x := cipher_init(1)\ny := x (*) x\nz := modswitch(y) (*) modswitch(y)\n";
        let low = lower(&parse(src).unwrap()).unwrap();
        let printed = pretty_lowered(&low);
        let low2 = lower(&parse(&printed).unwrap()).unwrap();
        let sig = |p: &LoweredProgram| {
            (
                p.inputs
                    .iter()
                    .map(|i| (i.name.clone(), i.kind, i.value.clone()))
                    .collect::<alloc::vec::Vec<_>>(),
                pretty_core(&p.body),
            )
        };
        assert_eq!(sig(&low), sig(&low2));
    }
}
