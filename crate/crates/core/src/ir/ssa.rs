//! Single-assignment form for straight-line core programs. The modswitch
//! inference pass operates on this representation.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::ast::*;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SsaDef {
    pub var: String,
    pub rhs: CoreExpr,
    pub pos: Pos,
}

/// Ordered single-assignment definitions; `root` is the final definition's
/// variable, taken as the program output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SsaProgram {
    pub defs: Vec<SsaDef>,
    pub root: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SsaError {
    /// Conversion handles straight-line commands only; branch programs are
    /// processed per branch by the inference driver.
    ContainsIf(Pos),
    UseBeforeDef { var: String, pos: Pos },
    Empty,
}

impl core::fmt::Display for SsaError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SsaError::ContainsIf(p) => write!(f, "ssa conversion at {p}: `if` is not supported"),
            SsaError::UseBeforeDef { var, pos } => {
                write!(f, "ssa conversion at {pos}: `{var}` used before its definition")
            }
            SsaError::Empty => write!(f, "ssa conversion: program has no assignments"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SsaError {}

fn collect_assigns(cmd: &CoreCmd, out: &mut Vec<(String, CoreExpr, Pos)>) -> Result<(), SsaError> {
    match cmd {
        CoreCmd::Skip => Ok(()),
        CoreCmd::Assign(x, e, p) => {
            out.push((x.clone(), e.clone(), *p));
            Ok(())
        }
        CoreCmd::Seq(cs) => {
            for c in cs {
                collect_assigns(c, out)?;
            }
            Ok(())
        }
        CoreCmd::If(_, _, _, p) => Err(SsaError::ContainsIf(*p)),
    }
}

fn rename_uses(e: &CoreExpr, current: &BTreeMap<String, String>) -> CoreExpr {
    match e {
        CoreExpr::Var(x) => CoreExpr::Var(current.get(x).cloned().unwrap_or_else(|| x.clone())),
        CoreExpr::Const(c) => CoreExpr::Const(c.clone()),
        CoreExpr::Op(op, args) => CoreExpr::Op(
            *op,
            args.iter().map(|a| rename_uses(a, current)).collect(),
        ),
    }
}

/// Convert a straight-line command to SSA. Variables assigned once keep
/// their names; re-assigned variables get version suffixes.
pub fn to_ssa(cmd: &CoreCmd) -> Result<SsaProgram, SsaError> {
    let mut flat = Vec::new();
    collect_assigns(cmd, &mut flat)?;
    if flat.is_empty() {
        return Err(SsaError::Empty);
    }

    let mut assign_count: BTreeMap<&str, usize> = BTreeMap::new();
    let mut used_names: BTreeSet<String> = BTreeSet::new();
    for (x, e, _) in &flat {
        *assign_count.entry(x.as_str()).or_default() += 1;
        used_names.insert(x.clone());
        let mut vs = Vec::new();
        e.vars(&mut vs);
        used_names.extend(vs);
    }

    let mut current: BTreeMap<String, String> = BTreeMap::new();
    let mut version: BTreeMap<String, usize> = BTreeMap::new();
    let mut defs = Vec::new();
    for (x, e, pos) in &flat {
        // check uses first: a variable assigned somewhere in the program
        // must already have a version when read
        let mut vs = Vec::new();
        e.vars(&mut vs);
        for v in vs {
            if assign_count.contains_key(v.as_str()) && !current.contains_key(&v) {
                return Err(SsaError::UseBeforeDef {
                    var: v,
                    pos: *pos,
                });
            }
        }
        let rhs = rename_uses(e, &current);
        let fresh = if assign_count[x.as_str()] == 1 {
            x.clone()
        } else {
            let n = version.entry(x.clone()).or_insert(0);
            *n += 1;
            let mut candidate = format!("{x}__{n}");
            while used_names.contains(&candidate) {
                candidate.push('_');
            }
            used_names.insert(candidate.clone());
            candidate
        };
        current.insert(x.clone(), fresh.clone());
        defs.push(SsaDef {
            var: fresh,
            rhs,
            pos: *pos,
        });
    }
    let root = defs.last().unwrap().var.clone();
    Ok(SsaProgram { defs, root })
}

/// Rebuild a core command from SSA definitions.
pub fn ssa_to_cmd(p: &SsaProgram) -> CoreCmd {
    CoreCmd::seq(
        p.defs
            .iter()
            .map(|d| CoreCmd::Assign(d.var.clone(), d.rhs.clone(), d.pos))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn assign(x: &str, e: CoreExpr) -> CoreCmd {
        CoreCmd::Assign(x.to_string(), e, Pos::default())
    }

    fn mul(a: &str, b: &str) -> CoreExpr {
        CoreExpr::Op(OpKind::Mul, vec![CoreExpr::var(a), CoreExpr::var(b)])
    }

    #[test]
    fn rename_chain() {
        // x := a (*) a; x := x (*) x  ->  x__1 := a (*) a; x__2 := x__1 (*) x__1
        let cmd = CoreCmd::seq(vec![assign("x", mul("a", "a")), assign("x", mul("x", "x"))]);
        let ssa = to_ssa(&cmd).unwrap();
        assert_eq!(ssa.defs[0].var, "x__1");
        assert_eq!(ssa.defs[1].var, "x__2");
        assert_eq!(ssa.defs[1].rhs, mul("x__1", "x__1"));
        assert_eq!(ssa.root, "x__2");
    }

    #[test]
    fn already_ssa_unchanged() {
        let cmd = CoreCmd::seq(vec![
            assign("c2", mul("c1", "c1")),
            assign("c3", mul("c2", "c2")),
        ]);
        let ssa = to_ssa(&cmd).unwrap();
        assert_eq!(ssa_to_cmd(&ssa), cmd);
        assert_eq!(ssa.root, "c3");
    }

    #[test]
    fn use_before_def_rejected() {
        let cmd = CoreCmd::seq(vec![assign("y", mul("x", "x")), assign("x", mul("a", "a"))]);
        match to_ssa(&cmd) {
            Err(SsaError::UseBeforeDef { var, .. }) => assert_eq!(var, "x"),
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn if_rejected() {
        let cmd = CoreCmd::If(
            CoreExpr::Const(ConstValue::Msg(1.into())),
            alloc::boxed::Box::new(CoreCmd::Skip),
            alloc::boxed::Box::new(CoreCmd::Skip),
            Pos::default(),
        );
        assert!(matches!(to_ssa(&cmd), Err(SsaError::ContainsIf(_))));
    }
}
