//! Modulus-switch inference: build the multiplicative-depth tree of the
//! failing definition, insert switches on the operands of the parent of a
//! least-positive-depth node, propagate levels forward, and validate every
//! rewrite through the type checker. If one round still fails, the next
//! round targets the next-deeper tree layer, until either the program
//! checks or the chain is exhausted.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::ir::{CoreCmd, CoreExpr, OpKind, SsaDef, SsaProgram};
use crate::model::{OverflowKind, SchemeKind, SchemeModel, Sort};
use crate::typecheck::{type_expr, Diagnosis, TypingContext};

/// Ordered variable definitions extracted from an SSA program.
#[derive(Debug, Clone)]
pub struct DefList {
    pub defs: Vec<SsaDef>,
    index: BTreeMap<String, usize>,
}

impl DefList {
    pub fn get(&self, var: &str) -> Option<&CoreExpr> {
        self.index.get(var).map(|i| &self.defs[*i].rhs)
    }

    pub fn position(&self, var: &str) -> Option<usize> {
        self.index.get(var).copied()
    }

    pub fn contains(&self, var: &str) -> bool {
        self.index.contains_key(var)
    }
}

pub fn build_deflist(p: &SsaProgram) -> DefList {
    let mut index = BTreeMap::new();
    for (i, d) in p.defs.iter().enumerate() {
        index.insert(d.var.clone(), i);
    }
    DefList {
        defs: p.defs.clone(),
        index,
    }
}

fn is_mul_op(op: OpKind) -> bool {
    matches!(op, OpKind::Mul | OpKind::BoxMul | OpKind::ExtMul)
}

/// Variables appearing as multiplicative operands of `e`: directly under a
/// multiplication, or inside additive operands expanded recursively
/// through their definitions. Plaintext and message operands are excluded.
pub fn mulops(
    e: &CoreExpr,
    defs: &DefList,
    is_cipher: &dyn Fn(&str) -> bool,
) -> BTreeSet<String> {
    fn expand(
        e: &CoreExpr,
        defs: &DefList,
        is_cipher: &dyn Fn(&str) -> bool,
        out: &mut BTreeSet<String>,
    ) {
        match e {
            // additive context: look through the definition
            CoreExpr::Var(x) => {
                if let Some(rhs) = defs.get(x) {
                    expand(rhs, defs, is_cipher, out);
                }
            }
            CoreExpr::Const(_) => {}
            CoreExpr::Op(op, args) if is_mul_op(*op) => {
                for a in args {
                    direct(a, defs, is_cipher, out);
                }
            }
            CoreExpr::Op(_, args) => {
                for a in args {
                    expand(a, defs, is_cipher, out);
                }
            }
        }
    }
    // an operand position of a multiplication: a variable counts itself,
    // noise-management wrappers are transparent, and other compound
    // operands are expanded like additive contexts
    fn direct(
        e: &CoreExpr,
        defs: &DefList,
        is_cipher: &dyn Fn(&str) -> bool,
        out: &mut BTreeSet<String>,
    ) {
        match e {
            CoreExpr::Var(x) => {
                if is_cipher(x) {
                    out.insert(x.clone());
                }
            }
            CoreExpr::Const(_) => {}
            CoreExpr::Op(OpKind::ModSwitch, args) => direct(&args[0], defs, is_cipher, out),
            CoreExpr::Op(OpKind::Pbs, args) => direct(&args[1], defs, is_cipher, out),
            CoreExpr::Op(_, _) => expand(e, defs, is_cipher, out),
        }
    }
    let mut out = BTreeSet::new();
    expand(e, defs, is_cipher, &mut out);
    out
}

/// Multiplicative-depth tree: children of a node are its Mulops,
/// recursively expanded. Input variables are leaves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MdTree {
    pub var: String,
    pub children: Vec<MdTree>,
}

impl MdTree {
    /// Max root-to-leaf distance in edges.
    pub fn height(&self) -> usize {
        self.children
            .iter()
            .map(|c| c.height() + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(|c| c.node_count()).sum::<usize>()
    }
}

pub fn build_mdtree(
    node: &str,
    defs: &DefList,
    is_cipher: &dyn Fn(&str) -> bool,
) -> MdTree {
    let children = match defs.get(node) {
        Some(rhs) => mulops(rhs, defs, is_cipher)
            .into_iter()
            .map(|c| build_mdtree(&c, defs, is_cipher))
            .collect(),
        None => Vec::new(),
    };
    MdTree {
        var: node.to_string(),
        children,
    }
}

/// Signature-level sorts of every variable (inputs from the context,
/// definitions from the operator table). Total: unknowns come out `None`.
fn infer_sorts(
    model: &SchemeModel,
    gamma0: &TypingContext,
    defs: &DefList,
) -> BTreeMap<String, Sort> {
    fn sort_of(
        e: &CoreExpr,
        model: &SchemeModel,
        sorts: &BTreeMap<String, Sort>,
    ) -> Option<Sort> {
        match e {
            CoreExpr::Var(x) => sorts.get(x).copied(),
            CoreExpr::Const(c) => Some(match c {
                crate::ir::ConstValue::Msg(_) => Sort::Msg,
                crate::ir::ConstValue::Plain(_) => Sort::Plain,
            }),
            CoreExpr::Op(op, args) => {
                let spec = model.op(*op).ok()?;
                let arg_sorts: Option<Vec<Sort>> =
                    args.iter().map(|a| sort_of(a, model, sorts)).collect();
                (spec.signature)(&arg_sorts?)
            }
        }
    }
    let mut sorts: BTreeMap<String, Sort> = gamma0
        .iter()
        .map(|(x, t)| (x.clone(), t.sort()))
        .collect();
    for d in &defs.defs {
        if let Some(s) = sort_of(&d.rhs, model, &sorts) {
            sorts.insert(d.var.clone(), s);
        }
    }
    sorts
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InferFailure {
    /// The program's rejection is not a noise overflow; switching cannot
    /// help.
    NotNoise(Diagnosis),
    /// No modulus left to switch to.
    ChainExhausted(String),
    /// The tree offers no further placement (all layers tried).
    NoPlacement(String),
    /// Modswitch inference only applies to the leveled scheme.
    UnsupportedScheme(SchemeKind),
    Ssa(crate::ir::SsaError),
}

impl core::fmt::Display for InferFailure {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            InferFailure::NotNoise(d) => write!(f, "not a noise overflow: {d}"),
            InferFailure::ChainExhausted(s) => write!(f, "chain exhausted: {s}"),
            InferFailure::NoPlacement(s) => write!(f, "no placement left: {s}"),
            InferFailure::UnsupportedScheme(k) => {
                write!(f, "modswitch inference needs a leveled scheme, got {k}")
            }
            InferFailure::Ssa(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for InferFailure {}

#[derive(Debug, Clone)]
pub struct InferOutcome {
    pub program: SsaProgram,
    /// Total modswitch operations inserted.
    pub inserted: usize,
    /// Insertion rounds used (0 when the input already checks).
    pub rounds: usize,
    pub log: Vec<String>,
}

/// Sequential typecheck of a definition list; returns the failing index
/// with its diagnosis, or the final context.
pub fn typecheck_defs(
    model: &SchemeModel,
    gamma0: &TypingContext,
    p: &SsaProgram,
) -> Result<TypingContext, (usize, Diagnosis)> {
    let mut gamma = gamma0.clone();
    for (i, d) in p.defs.iter().enumerate() {
        match type_expr(model, &gamma, &d.rhs) {
            Ok(ty) => gamma = gamma.update(&d.var, ty),
            Err(diag) => return Err((i, diag.at(d.pos))),
        }
    }
    Ok(gamma)
}

fn wrap_modswitch(e: CoreExpr, times: u32) -> CoreExpr {
    let mut out = e;
    for _ in 0..times {
        out = CoreExpr::Op(OpKind::ModSwitch, alloc::vec![out]);
    }
    out
}

/// MSinsert: wrap every cipher variable occurrence of a definition in one
/// modswitch, lowering the definition's level uniformly by one. Returns
/// the number of switches inserted.
fn insert_on_rhs(e: &CoreExpr, is_cipher: &dyn Fn(&str) -> bool) -> (CoreExpr, usize) {
    match e {
        CoreExpr::Var(x) if is_cipher(x) => (
            wrap_modswitch(CoreExpr::Var(x.clone()), 1),
            1,
        ),
        CoreExpr::Var(_) | CoreExpr::Const(_) => (e.clone(), 0),
        CoreExpr::Op(op, args) => {
            let mut n = 0;
            let new_args = args
                .iter()
                .map(|a| {
                    let (w, k) = insert_on_rhs(a, is_cipher);
                    n += k;
                    w
                })
                .collect();
            (CoreExpr::Op(*op, new_args), n)
        }
    }
}

/// MSLevel: recompute expression levels and wrap lower-level-needing
/// operands so every operator sees equal cipher levels. Structural only;
/// bounds are validated by the caller's re-typecheck.
fn equalize_expr(
    e: &CoreExpr,
    levels: &BTreeMap<String, Option<u32>>,
) -> Result<(CoreExpr, Option<u32>, usize), InferFailure> {
    match e {
        CoreExpr::Var(x) => Ok((e.clone(), levels.get(x).copied().flatten(), 0)),
        CoreExpr::Const(_) => Ok((e.clone(), None, 0)),
        CoreExpr::Op(OpKind::ModSwitch, args) => {
            let (inner, level, n) = equalize_expr(&args[0], levels)?;
            let next = match level {
                Some(0) => {
                    return Err(InferFailure::ChainExhausted(
                        "a required switch would go below level 0".to_string(),
                    ))
                }
                Some(l) => Some(l - 1),
                None => None,
            };
            Ok((
                CoreExpr::Op(OpKind::ModSwitch, alloc::vec![inner]),
                next,
                n,
            ))
        }
        CoreExpr::Op(op, args) => {
            let mut parts = Vec::with_capacity(args.len());
            let mut inserted = 0;
            for a in args {
                let part = equalize_expr(a, levels)?;
                inserted += part.2;
                parts.push((part.0, part.1));
            }
            let target = parts.iter().filter_map(|(_, l)| *l).min();
            let mut new_args = Vec::with_capacity(parts.len());
            if let Some(target) = target {
                for (sub, level) in parts {
                    match level {
                        Some(l) if l > target => {
                            inserted += (l - target) as usize;
                            new_args.push(wrap_modswitch(sub, l - target));
                        }
                        _ => new_args.push(sub),
                    }
                }
            } else {
                new_args.extend(parts.into_iter().map(|(sub, _)| sub));
            }
            Ok((CoreExpr::Op(*op, new_args), target, inserted))
        }
    }
}

/// Forward pass: equalize operand levels across the whole definition list.
fn propagate_levels(
    program: &mut SsaProgram,
    gamma0: &TypingContext,
) -> Result<usize, InferFailure> {
    let mut levels: BTreeMap<String, Option<u32>> = gamma0
        .iter()
        .map(|(x, t)| (x.clone(), t.bound().level()))
        .collect();
    let mut inserted = 0;
    for def in &mut program.defs {
        let (rhs, level, n) = equalize_expr(&def.rhs, &levels)?;
        def.rhs = rhs;
        inserted += n;
        levels.insert(def.var.clone(), level);
    }
    Ok(inserted)
}

/// Find the first (in definition order) defined node at exactly the wanted
/// subtree height and return it with its tree parent (root has none).
fn pick_target(
    tree: &MdTree,
    height: usize,
    defs: &DefList,
) -> Option<(String, Option<String>)> {
    fn walk(
        node: &MdTree,
        parent: Option<&MdTree>,
        height: usize,
        defs: &DefList,
        best: &mut Option<(usize, String, Option<String>)>,
    ) {
        if node.height() == height && defs.contains(&node.var) {
            let pos = defs.position(&node.var).unwrap_or(usize::MAX);
            let better = match best {
                Some((p, _, _)) => pos < *p,
                None => true,
            };
            if better {
                *best = Some((pos, node.var.clone(), parent.map(|p| p.var.clone())));
            }
        }
        for c in &node.children {
            walk(c, Some(node), height, defs, best);
        }
    }
    let mut best = None;
    walk(tree, None, height, defs, &mut best);
    best.map(|(_, var, parent)| (var, parent))
}

/// Algorithm: typecheck; on a noise failure build the MD tree of the
/// failing definition, insert switches at the parent of the
/// least-positive-depth node, re-level, and repeat one layer deeper while
/// failures persist.
pub fn infer_modswitch(
    p: &SsaProgram,
    gamma0: &TypingContext,
    model: &SchemeModel,
) -> Result<InferOutcome, InferFailure> {
    if model.kind != SchemeKind::Bgv {
        return Err(InferFailure::UnsupportedScheme(model.kind));
    }
    let mut program = p.clone();
    let mut inserted = 0usize;
    let mut log = Vec::new();
    let mut round = 0usize;
    loop {
        match typecheck_defs(model, gamma0, &program) {
            Ok(_) => {
                return Ok(InferOutcome {
                    program,
                    inserted,
                    rounds: round,
                    log,
                })
            }
            Err((_, diag)) if diag.kind != OverflowKind::Noise => {
                return Err(InferFailure::NotNoise(diag))
            }
            Err((idx, diag)) => {
                round += 1;
                let failing = program.defs[idx].var.clone();
                let defs = build_deflist(&program);
                let sorts = infer_sorts(model, gamma0, &defs);
                let is_cipher =
                    move |x: &str| -> bool { sorts.get(x) == Some(&Sort::Cipher) };
                let tree = build_mdtree(&failing, &defs, &is_cipher);
                if tree.height() == 0 {
                    return Err(InferFailure::NoPlacement(format!(
                        "`{failing}` has no multiplicative ancestry ({diag})"
                    )));
                }
                if round > tree.height() {
                    return Err(InferFailure::NoPlacement(format!(
                        "all {} tree layers switched and `{failing}` still overflows",
                        tree.height()
                    )));
                }
                let Some((target, parent)) = pick_target(&tree, round, &defs) else {
                    return Err(InferFailure::NoPlacement(format!(
                        "no defined node at depth {round}"
                    )));
                };
                // operand-wrapping form: rewrite the parent of the target
                // (the target itself when it is the root)
                let rewrite_var = parent.clone().unwrap_or_else(|| target.clone());
                let at = defs
                    .position(&rewrite_var)
                    .expect("rewrite target must be defined");
                let (new_rhs, n) = insert_on_rhs(&program.defs[at].rhs, &is_cipher);
                program.defs[at].rhs = new_rhs;
                inserted += n;
                log.push(format!(
                    "round {round}: depth-{round} node `{target}`, switched operands of `{rewrite_var}` ({n} inserted)"
                ));
                inserted += propagate_levels(&mut program, gamma0)?;
            }
        }
    }
}

/// Inference over full commands: straight-line regions run the SSA
/// algorithm; `if` branches are inferred independently and the merged
/// context continues. Definitions renamed per branch stay branch-local.
pub fn infer_in_cmd(
    model: &SchemeModel,
    gamma0: &TypingContext,
    cmd: &CoreCmd,
) -> Result<(CoreCmd, usize, Vec<String>), InferFailure> {
    use crate::typecheck::{merge_contexts, type_cmd};

    fn flatten(cmd: &CoreCmd, out: &mut Vec<CoreCmd>) {
        match cmd {
            CoreCmd::Skip => {}
            CoreCmd::Seq(cs) => {
                for c in cs {
                    flatten(c, out);
                }
            }
            other => out.push(other.clone()),
        }
    }

    fn infer_segment(
        model: &SchemeModel,
        gamma: &TypingContext,
        segment: Vec<CoreCmd>,
        inserted: &mut usize,
        log: &mut Vec<String>,
    ) -> Result<(Vec<CoreCmd>, TypingContext), InferFailure> {
        if segment.is_empty() {
            return Ok((segment, gamma.clone()));
        }
        let cmd = CoreCmd::seq(segment);
        let ssa = crate::ir::to_ssa(&cmd).map_err(InferFailure::Ssa)?;
        // keep the final version of every variable addressable under its
        // original name for whatever follows the segment
        let mut final_names: BTreeMap<String, String> = BTreeMap::new();
        for (orig, def) in originals(&cmd).into_iter().zip(ssa.defs.iter()) {
            final_names.insert(orig, def.var.clone());
        }
        let outcome = infer_modswitch(&ssa, gamma, model)?;
        *inserted += outcome.inserted;
        log.extend(outcome.log);
        let mut cmds: Vec<CoreCmd> = outcome
            .program
            .defs
            .iter()
            .map(|d| CoreCmd::Assign(d.var.clone(), d.rhs.clone(), d.pos))
            .collect();
        // re-expose originals that were renamed
        let mut seen: BTreeMap<String, String> = BTreeMap::new();
        for (orig, fin) in &final_names {
            if orig != fin {
                seen.insert(orig.clone(), fin.clone());
            }
        }
        for (orig, fin) in seen {
            cmds.push(CoreCmd::Assign(
                orig.clone(),
                CoreExpr::Var(fin),
                crate::ir::Pos::default(),
            ));
        }
        let rebuilt = CoreCmd::seq(cmds);
        let gamma_out = type_cmd(model, gamma, &rebuilt).map_err(InferFailure::NotNoise)?;
        let items = match rebuilt {
            CoreCmd::Seq(cs) => cs,
            other => alloc::vec![other],
        };
        Ok((items, gamma_out))
    }

    // original target variable of each assignment, in order
    fn originals(cmd: &CoreCmd) -> Vec<String> {
        let mut out = Vec::new();
        fn go(cmd: &CoreCmd, out: &mut Vec<String>) {
            match cmd {
                CoreCmd::Assign(x, _, _) => out.push(x.clone()),
                CoreCmd::Seq(cs) => cs.iter().for_each(|c| go(c, out)),
                _ => {}
            }
        }
        go(cmd, &mut out);
        out
    }

    let mut items = Vec::new();
    flatten(cmd, &mut items);

    let mut out: Vec<CoreCmd> = Vec::new();
    let mut segment: Vec<CoreCmd> = Vec::new();
    let mut gamma = gamma0.clone();
    let mut inserted = 0usize;
    let mut log = Vec::new();
    for item in items {
        match item {
            CoreCmd::If(g, a, b, pos) => {
                let (seg, g_after) =
                    infer_segment(model, &gamma, core::mem::take(&mut segment), &mut inserted, &mut log)?;
                out.extend(seg);
                gamma = g_after;
                let (a2, na, la) = infer_in_cmd(model, &gamma, &a)?;
                let (b2, nb, lb) = infer_in_cmd(model, &gamma, &b)?;
                inserted += na + nb;
                log.extend(la);
                log.extend(lb);
                let ga = type_cmd(model, &gamma, &a2).map_err(InferFailure::NotNoise)?;
                let gb = type_cmd(model, &gamma, &b2).map_err(InferFailure::NotNoise)?;
                gamma = merge_contexts(&ga, &gb);
                out.push(CoreCmd::If(g, Box::new(a2), Box::new(b2), pos));
            }
            other => segment.push(other),
        }
    }
    let (seg, _) = infer_segment(model, &gamma, segment, &mut inserted, &mut log)?;
    out.extend(seg);
    Ok((CoreCmd::seq(out), inserted, log))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::Pos;
    use alloc::vec;

    fn def(var: &str, rhs: CoreExpr) -> SsaDef {
        SsaDef {
            var: var.into(),
            rhs,
            pos: Pos::default(),
        }
    }

    fn mul(a: &str, b: &str) -> CoreExpr {
        CoreExpr::Op(OpKind::Mul, vec![CoreExpr::var(a), CoreExpr::var(b)])
    }

    fn add(a: &str, b: &str) -> CoreExpr {
        CoreExpr::Op(OpKind::Add, vec![CoreExpr::var(a), CoreExpr::var(b)])
    }

    fn power_chain() -> SsaProgram {
        // c2 = c1*c1; c3 = c2*c2; c4 = c3*c3; c5 = c4*c4
        SsaProgram {
            defs: vec![
                def("c2", mul("c1", "c1")),
                def("c3", mul("c2", "c2")),
                def("c4", mul("c3", "c3")),
                def("c5", mul("c4", "c4")),
            ],
            root: "c5".into(),
        }
    }

    fn all_cipher(_: &str) -> bool {
        true
    }

    #[test]
    fn deflist_of_the_power_chain() {
        let p = power_chain();
        let defs = build_deflist(&p);
        assert_eq!(defs.get("c2"), Some(&mul("c1", "c1")));
        assert_eq!(defs.get("c5"), Some(&mul("c4", "c4")));
        assert_eq!(defs.get("c1"), None);
        assert_eq!(defs.defs.len(), 4);
    }

    #[test]
    fn mulops_direct_operands() {
        let p = power_chain();
        let defs = build_deflist(&p);
        let got = mulops(&mul("c2", "c3"), &defs, &all_cipher);
        let want: BTreeSet<String> = ["c2", "c3"].iter().map(|s| s.to_string()).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn mulops_expands_additive_operands() {
        // c1 := c2*c3; c4 := c5*c6; e = c4 (+) c1 -> {c2,c3,c5,c6}
        let p = SsaProgram {
            defs: vec![def("c1", mul("c2", "c3")), def("c4", mul("c5", "c6"))],
            root: "c4".into(),
        };
        let defs = build_deflist(&p);
        let got = mulops(&add("c4", "c1"), &defs, &all_cipher);
        let want: BTreeSet<String> = ["c2", "c3", "c5", "c6"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn mulops_of_a_leaf_through_addition_is_empty() {
        let p = SsaProgram {
            defs: vec![def("x", add("p", "c"))],
            root: "x".into(),
        };
        let defs = build_deflist(&p);
        // c is an input leaf reached additively: no multiplicative ancestry
        let got = mulops(defs.get("x").unwrap(), &defs, &all_cipher);
        assert!(got.is_empty());
    }

    #[test]
    fn mdtree_of_the_power_chain_has_height_four() {
        let p = power_chain();
        let defs = build_deflist(&p);
        let tree = build_mdtree("c5", &defs, &all_cipher);
        assert_eq!(tree.height(), 4);
        // chain collapses to one child per layer down to the input leaf
        assert_eq!(tree.var, "c5");
        assert_eq!(tree.children.len(), 1);
        assert_eq!(tree.children[0].var, "c4");
    }

    #[test]
    fn mdtree_single_assignment() {
        let p = SsaProgram {
            defs: vec![def("c2", mul("c1", "c1"))],
            root: "c2".into(),
        };
        let defs = build_deflist(&p);
        let tree = build_mdtree("c2", &defs, &all_cipher);
        assert_eq!(tree.var, "c2");
        assert_eq!(tree.children.len(), 1);
        assert_eq!(tree.children[0].var, "c1");
        assert!(tree.children[0].children.is_empty());
        assert_eq!(tree.height(), 1);
    }

    #[test]
    fn mdtree_pure_addition_has_height_zero() {
        let p = SsaProgram {
            defs: vec![def("s", add("a", "b"))],
            root: "s".into(),
        };
        let defs = build_deflist(&p);
        let tree = build_mdtree("s", &defs, &all_cipher);
        assert_eq!(tree.height(), 0);
    }

    #[test]
    fn equalize_wraps_the_higher_operand() {
        // operands at levels (3, 2) -> wrap the first once
        let mut levels = BTreeMap::new();
        levels.insert("a".to_string(), Some(3));
        levels.insert("b".to_string(), Some(2));
        let (e, level, n) = equalize_expr(&mul("a", "b"), &levels).unwrap();
        assert_eq!(level, Some(2));
        assert_eq!(n, 1);
        let want = CoreExpr::Op(
            OpKind::Mul,
            vec![
                wrap_modswitch(CoreExpr::var("a"), 1),
                CoreExpr::var("b"),
            ],
        );
        assert_eq!(e, want);
    }

    #[test]
    fn equalize_is_idempotent_on_equal_levels() {
        let mut levels = BTreeMap::new();
        levels.insert("a".to_string(), Some(2));
        levels.insert("b".to_string(), Some(2));
        let (e, level, n) = equalize_expr(&mul("a", "b"), &levels).unwrap();
        assert_eq!((e, level, n), (mul("a", "b"), Some(2), 0));
    }

    #[test]
    fn equalize_wraps_several_levels() {
        // (5, 1) needs four switches on the first operand
        let mut levels = BTreeMap::new();
        levels.insert("a".to_string(), Some(5));
        levels.insert("b".to_string(), Some(1));
        let (_, level, n) = equalize_expr(&mul("a", "b"), &levels).unwrap();
        assert_eq!(level, Some(1));
        assert_eq!(n, 4);
    }

    #[test]
    fn equalize_fails_below_zero() {
        let mut levels = BTreeMap::new();
        levels.insert("a".to_string(), Some(0));
        let e = CoreExpr::Op(OpKind::ModSwitch, vec![CoreExpr::var("a")]);
        assert!(matches!(
            equalize_expr(&e, &levels),
            Err(InferFailure::ChainExhausted(_))
        ));
    }
}
