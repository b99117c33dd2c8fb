//! The bounds-tracking type checker: subtyping, expression typing, command
//! typing, and context merge for branches. Checking needs only public
//! parameters; a rejection carries a structured diagnosis naming the
//! violated condition and the quantities involved.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;

use crate::ir::{ConstValue, CoreCmd, CoreExpr, OpKind, Pos};
use crate::model::{
    bound_le, compare_bounds, Bound, BoundArg, BoundOrdering, BoundsFailure, OverflowKind,
    SchemeModel, Sort,
};
use crate::rational::{self, rat_from_big, Rat};

/// A type is a sort paired with a bound; the sort is derived from the
/// bound's tag, which keeps the pairing consistent by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Type(Bound);

impl Type {
    pub fn new(bound: Bound) -> Self {
        Type(bound)
    }

    pub fn sort(&self) -> Sort {
        self.0.sort()
    }

    pub fn bound(&self) -> &Bound {
        &self.0
    }

    pub fn into_bound(self) -> Bound {
        self.0
    }
}

impl core::fmt::Display for Type {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{} {}", self.sort(), self.0)
    }
}

/// Ordered variable-to-type map; updates are functional.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TypingContext(BTreeMap<String, Type>);

impl TypingContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn lookup(&self, x: &str) -> Option<&Type> {
        self.0.get(x)
    }

    pub fn update(&self, x: &str, ty: Type) -> Self {
        let mut next = self.0.clone();
        next.insert(x.to_string(), ty);
        TypingContext(next)
    }

    pub fn insert(&mut self, x: String, ty: Type) {
        self.0.insert(x, ty);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Type)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Structured rejection: position, operator, the failed condition class,
/// and the computed quantity against its threshold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnosis {
    pub pos: Option<Pos>,
    pub op: Option<OpKind>,
    pub kind: OverflowKind,
    pub detail: String,
    pub measured: Option<Rat>,
    pub threshold: Option<Rat>,
}

impl Diagnosis {
    pub fn new(kind: OverflowKind, detail: impl Into<String>) -> Self {
        Diagnosis {
            pos: None,
            op: None,
            kind,
            detail: detail.into(),
            measured: None,
            threshold: None,
        }
    }

    pub fn from_failure(op: OpKind, f: BoundsFailure) -> Self {
        Diagnosis {
            pos: None,
            op: Some(op),
            kind: f.kind,
            detail: f.detail,
            measured: f.measured,
            threshold: f.threshold,
        }
    }

    pub fn at(mut self, pos: Pos) -> Self {
        if self.pos.is_none() {
            self.pos = Some(pos);
        }
        self
    }

    /// Remaining noise budget in bits at the failure point:
    /// log2(threshold) - log2(measured). Negative once the threshold is
    /// crossed.
    pub fn budget_bits(&self) -> Option<f64> {
        use num_traits::Signed;
        match (&self.measured, &self.threshold) {
            (Some(m), Some(t)) if m.is_positive() && t.is_positive() => {
                Some(rational::log2_approx(t) - rational::log2_approx(m))
            }
            _ => None,
        }
    }
}

impl core::fmt::Display for Diagnosis {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        if let Some(pos) = self.pos {
            write!(f, "{pos}: ")?;
        }
        write!(f, "{} overflow", self.kind.label())?;
        if let Some(op) = self.op {
            write!(f, " at {op}")?;
        }
        write!(f, ": {}", self.detail)?;
        if let (Some(m), Some(t)) = (&self.measured, &self.threshold) {
            write!(
                f,
                " (computed {}, threshold {})",
                rational::display(m),
                rational::display(t)
            )?;
            if let Some(bits) = self.budget_bits() {
                write!(f, " [budget {bits:.1} bits]")?;
            }
        }
        Ok(())
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Diagnosis {}

/// Subtyping: same sort and bound inclusion.
pub fn subtype(a: &Type, b: &Type) -> bool {
    a.sort() == b.sort() && bound_le(a.bound(), b.bound())
}

/// `|v|^pp` for constants. Bounds reflect the literal as written; an
/// out-of-range literal is caught by the value condition of the first
/// operator it reaches.
fn const_type(c: &ConstValue) -> Type {
    match c {
        ConstValue::Msg(_) => Type(Bound::Msg),
        ConstValue::Plain(v) => {
            let r = rat_from_big(v.clone());
            Type(Bound::Plain {
                inf: r.clone(),
                sup: r,
            })
        }
    }
}

fn scalar_of_expr(e: &CoreExpr) -> Option<BigInt> {
    match e {
        CoreExpr::Const(ConstValue::Msg(v)) => Some(v.clone()),
        _ => None,
    }
}

/// Type an expression under a context. Implements the var/const/op rules;
/// subsumption is realized implicitly by computing principal bounds and
/// comparing at use sites.
pub fn type_expr(model: &SchemeModel, ctx: &TypingContext, e: &CoreExpr) -> Result<Type, Diagnosis> {
    match e {
        CoreExpr::Var(x) => ctx.lookup(x).cloned().ok_or_else(|| {
            Diagnosis::new(OverflowKind::Sort, format!("unbound variable `{x}`"))
        }),
        CoreExpr::Const(c) => Ok(const_type(c)),
        CoreExpr::Op(op, args) => {
            let spec = model.op(*op).map_err(|_| {
                Diagnosis::new(
                    OverflowKind::Sort,
                    format!("operator {op} is not supported by the {} scheme", model.kind),
                )
            })?;
            if args.len() != spec.arity {
                return Err(Diagnosis::new(
                    OverflowKind::Sort,
                    format!("{op} takes {} argument(s), got {}", spec.arity, args.len()),
                ));
            }
            let mut arg_types = Vec::with_capacity(args.len());
            for a in args {
                arg_types.push(type_expr(model, ctx, a)?);
            }
            let sorts: Vec<Sort> = arg_types.iter().map(|t| t.sort()).collect();
            let out_sort = (spec.signature)(&sorts).ok_or_else(|| {
                let shown: Vec<String> = sorts.iter().map(|s| s.to_string()).collect();
                Diagnosis::new(
                    OverflowKind::Sort,
                    format!("{op} is undefined at sorts ({})", shown.join(", ")),
                )
            })?;
            let bound_args: Vec<BoundArg> = arg_types
                .iter()
                .zip(args)
                .map(|(t, a)| BoundArg {
                    bound: t.bound().clone(),
                    scalar: scalar_of_expr(a),
                })
                .collect();
            let bound = (spec.bounds)(&bound_args).map_err(|f| Diagnosis::from_failure(*op, f))?;
            debug_assert_eq!(bound.sort(), out_sort);
            Ok(Type(bound))
        }
    }
}

/// Merge two post-contexts of an `if`. The result keeps variables present
/// in both with equal sorts, at the componentwise least upper bound;
/// cipher bounds at unequal levels (or TFHE ids) are dropped rather than
/// coerced.
pub fn merge_contexts(g1: &TypingContext, g2: &TypingContext) -> TypingContext {
    let mut out = TypingContext::new();
    for (x, t1) in g1.iter() {
        let Some(t2) = g2.lookup(x) else { continue };
        if let Some(joined) = join_bounds(t1.bound(), t2.bound()) {
            out.insert(x.clone(), Type(joined));
        }
    }
    out
}

fn join_bounds(a: &Bound, b: &Bound) -> Option<Bound> {
    match (a, b) {
        (Bound::Msg, Bound::Msg) => Some(Bound::Msg),
        (
            Bound::Plain { inf: i1, sup: s1 },
            Bound::Plain { inf: i2, sup: s2 },
        ) => Some(Bound::Plain {
            inf: i1.min(i2).clone(),
            sup: s1.max(s2).clone(),
        }),
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
        ) if l1 == l2 => Some(Bound::BgvCipher {
            inf: i1.min(i2).clone(),
            sup: s1.max(s2).clone(),
            noise: n1.max(n2).clone(),
            level: *l1,
        }),
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
        ) => Some(Bound::BfvCipher {
            inf: i1.min(i2).clone(),
            sup: s1.max(s2).clone(),
            noise: n1.max(n2).clone(),
        }),
        (
            Bound::TfheCipher {
                id: d1,
                inf: i1,
                sup: s1,
                noise: n1,
            },
            Bound::TfheCipher {
                id: d2,
                inf: i2,
                sup: s2,
                noise: n2,
            },
        ) if d1 == d2 => Some(Bound::TfheCipher {
            id: *d1,
            inf: i1.min(i2).clone(),
            sup: s1.max(s2).clone(),
            noise: n1.max(n2).clone(),
        }),
        _ => None,
    }
}

/// Type a command, threading the context. `if` guards must be messages;
/// branch contexts are merged.
pub fn type_cmd(
    model: &SchemeModel,
    ctx: &TypingContext,
    cmd: &CoreCmd,
) -> Result<TypingContext, Diagnosis> {
    let mut cur = ctx.clone();
    type_cmd_mut(model, &mut cur, cmd)?;
    Ok(cur)
}

// straight-line updates mutate in place; branches snapshot at the `if`
fn type_cmd_mut(
    model: &SchemeModel,
    ctx: &mut TypingContext,
    cmd: &CoreCmd,
) -> Result<(), Diagnosis> {
    match cmd {
        CoreCmd::Skip => Ok(()),
        CoreCmd::Assign(x, e, pos) => {
            let ty = type_expr(model, ctx, e).map_err(|d| d.at(*pos))?;
            ctx.insert(x.clone(), ty);
            Ok(())
        }
        CoreCmd::Seq(cs) => {
            for c in cs {
                type_cmd_mut(model, ctx, c)?;
            }
            Ok(())
        }
        CoreCmd::If(guard, then_cmd, else_cmd, pos) => {
            let gt = type_expr(model, ctx, guard).map_err(|d| d.at(*pos))?;
            if gt.sort() != Sort::Msg {
                return Err(Diagnosis::new(
                    OverflowKind::Sort,
                    format!("if-guard must be a message, got {}", gt.sort()),
                )
                .at(*pos));
            }
            let mut g1 = ctx.clone();
            type_cmd_mut(model, &mut g1, then_cmd)?;
            let mut g2 = ctx.clone();
            type_cmd_mut(model, &mut g2, else_cmd)?;
            *ctx = merge_contexts(&g1, &g2);
            Ok(())
        }
    }
}

/// Convenience: check subtyping via the ordering directly.
pub fn bound_ordering(a: &Type, b: &Type) -> Option<BoundOrdering> {
    compare_bounds(a.bound(), b.bound()).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::refscheme::ToyParams;
    use crate::schemes::{build_bgv, make_estimator, EstimatorParams};
    use alloc::vec;

    fn model() -> SchemeModel {
        let params = ToyParams {
            t: BigInt::from(16),
            d: 16,
            chain: vec![
                BigInt::from(1u64 << 25) + 1,
                BigInt::from(1u64 << 35) + 1,
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
        build_bgv(params, est, None)
    }

    fn cipher(inf: i64, sup: i64, noise: i64, level: u32) -> Type {
        Type(Bound::BgvCipher {
            inf: rat(inf),
            sup: rat(sup),
            noise: rat(noise),
            level,
        })
    }

    #[test]
    fn subtype_follows_the_cipher_order() {
        assert!(subtype(&cipher(1, 2, 5, 1), &cipher(0, 3, 7, 1)));
        assert!(!subtype(&cipher(0, 3, 7, 1), &cipher(1, 2, 5, 1)));
        let plain = Type(Bound::Plain {
            inf: rat(0),
            sup: rat(1),
        });
        assert!(!subtype(&plain, &cipher(0, 1, 1, 0)));
        // reflexivity
        let tau = cipher(0, 3, 5, 1);
        assert!(subtype(&tau, &tau));
    }

    #[test]
    fn add_rule_computes_the_table_bound() {
        let m = model();
        let mut ctx = TypingContext::new();
        ctx.insert("a".into(), cipher(0, 3, 2, 1));
        ctx.insert("b".into(), cipher(1, 4, 3, 1));
        let e = CoreExpr::Op(OpKind::Add, vec![CoreExpr::var("a"), CoreExpr::var("b")]);
        let ty = type_expr(&m, &ctx, &e).unwrap();
        assert_eq!(ty, cipher(1, 7, 5, 1));
    }

    #[test]
    fn message_constant_has_the_empty_bound() {
        let m = model();
        let ctx = TypingContext::new();
        let e = CoreExpr::Const(ConstValue::Msg(BigInt::from(3)));
        let ty = type_expr(&m, &ctx, &e).unwrap();
        assert_eq!(ty.sort(), Sort::Msg);
        assert_eq!(ty.bound(), &Bound::Msg);
    }

    #[test]
    fn noise_overflow_diagnosis_carries_quantities() {
        let m = model();
        let mut ctx = TypingContext::new();
        // f(e1,e2) = e1*e2 = 2^26 exceeds kappa_0 = 2^24
        ctx.insert("a".into(), cipher(0, 1, 1 << 13, 0));
        ctx.insert("b".into(), cipher(0, 1, 1 << 13, 0));
        let e = CoreExpr::Op(OpKind::Mul, vec![CoreExpr::var("a"), CoreExpr::var("b")]);
        let d = type_expr(&m, &ctx, &e).unwrap_err();
        assert_eq!(d.kind, OverflowKind::Noise);
        assert_eq!(d.measured, Some(rat(1 << 26)));
        assert!(d.budget_bits().unwrap() < 0.0);
    }

    #[test]
    fn value_overflow_is_strict_at_half_t() {
        let m = model();
        let mut ctx = TypingContext::new();
        ctx.insert("a".into(), cipher(0, 7, 2, 0));
        ctx.insert("b".into(), cipher(0, 1, 2, 0));
        let e = CoreExpr::Op(OpKind::Add, vec![CoreExpr::var("a"), CoreExpr::var("b")]);
        let d = type_expr(&m, &ctx, &e).unwrap_err();
        assert_eq!(d.kind, OverflowKind::Value);
    }

    #[test]
    fn skip_preserves_context_and_merge_joins() {
        let m = model();
        let mut ctx = TypingContext::new();
        ctx.insert("x".into(), cipher(0, 1, 2, 1));
        assert_eq!(type_cmd(&m, &ctx, &CoreCmd::Skip).unwrap(), ctx);

        let g1 = ctx.update("x", cipher(0, 1, 2, 1));
        let g2 = ctx.update("x", cipher(2, 3, 4, 1));
        let merged = merge_contexts(&g1, &g2);
        assert_eq!(merged.lookup("x").unwrap(), &cipher(0, 3, 4, 1));
        // merge soundness: both inputs are subtypes of the join
        assert!(subtype(g1.lookup("x").unwrap(), merged.lookup("x").unwrap()));
        assert!(subtype(g2.lookup("x").unwrap(), merged.lookup("x").unwrap()));
    }

    #[test]
    fn merge_intersects_domains_and_drops_level_mismatches() {
        let mut g1 = TypingContext::new();
        g1.insert("x".into(), cipher(0, 1, 2, 1));
        g1.insert("y".into(), cipher(0, 1, 2, 1));
        let mut g2 = TypingContext::new();
        g2.insert("x".into(), cipher(0, 1, 2, 0)); // different level
        let merged = merge_contexts(&g1, &g2);
        assert!(merged.lookup("x").is_none(), "level mismatch must drop");
        assert!(merged.lookup("y").is_none(), "y only on one side");
        // idempotence
        let same = merge_contexts(&g1, &g1);
        assert_eq!(same, g1);
    }

    #[test]
    fn modswitch_under_bfv_is_unknown() {
        use crate::schemes::build_bfv;
        let params = ToyParams {
            t: BigInt::from(16),
            d: 16,
            chain: vec![BigInt::from(1u64 << 40) + 1],
            err_width: 1,
        };
        let est = make_estimator(
            "worst_case",
            &EstimatorParams {
                scheme: crate::model::SchemeKind::Bfv,
                t: params.t.clone(),
                d: params.d,
                q_top: params.chain[0].clone(),
                err_width: params.err_width,
            },
            &Default::default(),
        )
        .unwrap();
        let m = build_bfv(params, est, None);
        let mut ctx = TypingContext::new();
        ctx.insert(
            "x".into(),
            Type(Bound::BfvCipher {
                inf: rat(0),
                sup: rat(1),
                noise: crate::rational::ratio(1, 100),
            }),
        );
        let e = CoreExpr::Op(OpKind::ModSwitch, vec![CoreExpr::var("x")]);
        let d = type_expr(&m, &ctx, &e).unwrap_err();
        assert!(d.detail.contains("not supported"), "{d}");
    }

    #[test]
    fn if_requires_msg_guard() {
        let m = model();
        let mut ctx = TypingContext::new();
        ctx.insert("c".into(), cipher(0, 1, 2, 1));
        let cmd = CoreCmd::If(
            CoreExpr::var("c"),
            alloc::boxed::Box::new(CoreCmd::Skip),
            alloc::boxed::Box::new(CoreCmd::Skip),
            Pos::default(),
        );
        let d = type_cmd(&m, &ctx, &cmd).unwrap_err();
        assert_eq!(d.kind, OverflowKind::Sort);
    }
}
