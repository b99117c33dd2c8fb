//! The scheme-agnostic model: sorts, partially ordered bounds, operator
//! triples (native semantics, partial bounds map, message semantics), and
//! executable checkers for the two validity axioms.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_bigint::BigInt;
use rand::RngCore;

use crate::ir::OpKind;
use crate::rational::{self, Rat};
use crate::refscheme::{BgvCiphertext, BfvCiphertext, Poly, TfheSimValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Sort {
    Msg,
    Plain,
    Cipher,
}

impl core::fmt::Display for Sort {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Sort::Msg => "msg",
            Sort::Plain => "plain",
            Sort::Cipher => "cipher",
        })
    }
}

/// TFHE ciphertext kinds, ordered LWE < RLWE < RGSW.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TfheId {
    Lwe,
    Rlwe,
    Rgsw,
}

impl core::fmt::Display for TfheId {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            TfheId::Lwe => "LWE",
            TfheId::Rlwe => "RLWE",
            TfheId::Rgsw => "RGSW",
        })
    }
}

/// Sort-indexed element of the bounds poset. The message bound set is a
/// single (empty) point; plaintext bounds are value intervals; ciphertext
/// bounds carry the scheme-specific payload.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bound {
    Msg,
    Plain {
        inf: Rat,
        sup: Rat,
    },
    BgvCipher {
        inf: Rat,
        sup: Rat,
        noise: Rat,
        level: u32,
    },
    BfvCipher {
        inf: Rat,
        sup: Rat,
        noise: Rat,
    },
    TfheCipher {
        id: TfheId,
        inf: Rat,
        sup: Rat,
        noise: Rat,
    },
}

impl Bound {
    pub fn sort(&self) -> Sort {
        match self {
            Bound::Msg => Sort::Msg,
            Bound::Plain { .. } => Sort::Plain,
            Bound::BgvCipher { .. } | Bound::BfvCipher { .. } | Bound::TfheCipher { .. } => {
                Sort::Cipher
            }
        }
    }

    pub fn noise(&self) -> Option<&Rat> {
        match self {
            Bound::BgvCipher { noise, .. }
            | Bound::BfvCipher { noise, .. }
            | Bound::TfheCipher { noise, .. } => Some(noise),
            _ => None,
        }
    }

    pub fn interval(&self) -> Option<(&Rat, &Rat)> {
        match self {
            Bound::Plain { inf, sup }
            | Bound::BgvCipher { inf, sup, .. }
            | Bound::BfvCipher { inf, sup, .. }
            | Bound::TfheCipher { inf, sup, .. } => Some((inf, sup)),
            Bound::Msg => None,
        }
    }

    pub fn level(&self) -> Option<u32> {
        match self {
            Bound::BgvCipher { level, .. } => Some(*level),
            _ => None,
        }
    }
}

impl core::fmt::Display for Bound {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Bound::Msg => write!(f, "msg"),
            Bound::Plain { inf, sup } => write!(
                f,
                "plain[{}, {}]",
                rational::display(inf),
                rational::display(sup)
            ),
            Bound::BgvCipher {
                inf,
                sup,
                noise,
                level,
            } => write!(
                f,
                "cipher[{}, {}] eps={} w={}",
                rational::display(inf),
                rational::display(sup),
                rational::display(noise),
                level
            ),
            Bound::BfvCipher { inf, sup, noise } => write!(
                f,
                "cipher[{}, {}] eps={}",
                rational::display(inf),
                rational::display(sup),
                rational::display(noise)
            ),
            Bound::TfheCipher {
                id,
                inf,
                sup,
                noise,
            } => write!(
                f,
                "cipher({id})[{}, {}] eps={}",
                rational::display(inf),
                rational::display(sup),
                rational::display(noise)
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundOrdering {
    Le,
    Ge,
    Eq,
    Incomparable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelError {
    SortMismatch { want: Sort, got: Sort },
    MixedSchemes,
    OracleRequired(&'static str),
    UnknownOperator(OpKind),
    Inner(String),
}

impl core::fmt::Display for ModelError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ModelError::SortMismatch { want, got } => {
                write!(f, "sort mismatch: expected {want}, got {got}")
            }
            ModelError::MixedSchemes => write!(f, "bounds from different schemes compared"),
            ModelError::OracleRequired(what) => {
                write!(f, "{what} requires secret parameters (oracle mode)")
            }
            ModelError::UnknownOperator(op) => write!(f, "operator {op} not in this model"),
            ModelError::Inner(s) => f.write_str(s),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ModelError {}

fn interval_cmp(inf_a: &Rat, sup_a: &Rat, inf_b: &Rat, sup_b: &Rat) -> BoundOrdering {
    // smaller = contained: a <= b iff inf_b <= inf_a <= sup_a <= sup_b
    let le = inf_b <= inf_a && sup_a <= sup_b;
    let ge = inf_a <= inf_b && sup_b <= sup_a;
    match (le, ge) {
        (true, true) => BoundOrdering::Eq,
        (true, false) => BoundOrdering::Le,
        (false, true) => BoundOrdering::Ge,
        (false, false) => BoundOrdering::Incomparable,
    }
}

fn combine(a: BoundOrdering, b: BoundOrdering) -> BoundOrdering {
    use BoundOrdering::*;
    match (a, b) {
        (Eq, x) | (x, Eq) => x,
        (Le, Le) => Le,
        (Ge, Ge) => Ge,
        _ => Incomparable,
    }
}

fn rat_cmp(a: &Rat, b: &Rat) -> BoundOrdering {
    use core::cmp::Ordering::*;
    match a.cmp(b) {
        Less => BoundOrdering::Le,
        Equal => BoundOrdering::Eq,
        Greater => BoundOrdering::Ge,
    }
}

/// Realizes the per-sort partial orders. Cipher bounds at different levels
/// (or different TFHE ids) are incomparable.
pub fn compare_bounds(a: &Bound, b: &Bound) -> Result<BoundOrdering, ModelError> {
    match (a, b) {
        (Bound::Msg, Bound::Msg) => Ok(BoundOrdering::Eq),
        (
            Bound::Plain { inf, sup },
            Bound::Plain {
                inf: inf2,
                sup: sup2,
            },
        ) => Ok(interval_cmp(inf, sup, inf2, sup2)),
        (
            Bound::BgvCipher {
                inf,
                sup,
                noise,
                level,
            },
            Bound::BgvCipher {
                inf: inf2,
                sup: sup2,
                noise: noise2,
                level: level2,
            },
        ) => {
            if level != level2 {
                return Ok(BoundOrdering::Incomparable);
            }
            Ok(combine(
                interval_cmp(inf, sup, inf2, sup2),
                rat_cmp(noise, noise2),
            ))
        }
        (
            Bound::BfvCipher { inf, sup, noise },
            Bound::BfvCipher {
                inf: inf2,
                sup: sup2,
                noise: noise2,
            },
        ) => Ok(combine(
            interval_cmp(inf, sup, inf2, sup2),
            rat_cmp(noise, noise2),
        )),
        (
            Bound::TfheCipher {
                id,
                inf,
                sup,
                noise,
            },
            Bound::TfheCipher {
                id: id2,
                inf: inf2,
                sup: sup2,
                noise: noise2,
            },
        ) => {
            if id != id2 {
                return Ok(BoundOrdering::Incomparable);
            }
            Ok(combine(
                interval_cmp(inf, sup, inf2, sup2),
                rat_cmp(noise, noise2),
            ))
        }
        (x, y) if x.sort() != y.sort() => Err(ModelError::SortMismatch {
            want: x.sort(),
            got: y.sort(),
        }),
        _ => Err(ModelError::MixedSchemes),
    }
}

/// `a <= b` in the bounds poset.
pub fn bound_le(a: &Bound, b: &Bound) -> bool {
    matches!(
        compare_bounds(a, b),
        Ok(BoundOrdering::Le) | Ok(BoundOrdering::Eq)
    )
}

// ---- runtime values ----

/// Message values: short vectors over centered Z_t. The toy schemes encode
/// scalars (constant polynomials), so width is almost always 1.
pub type MsgValue = Vec<BigInt>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Msg(MsgValue),
    Plain(Poly),
    BgvCipher(BgvCiphertext),
    BfvCipher(BfvCiphertext),
    TfheCipher(TfheSimValue),
}

impl Value {
    pub fn sort(&self) -> Sort {
        match self {
            Value::Msg(_) => Sort::Msg,
            Value::Plain(_) => Sort::Plain,
            Value::BgvCipher(_) | Value::BfvCipher(_) | Value::TfheCipher(_) => Sort::Cipher,
        }
    }

    /// The integer behind a width-1 message value, if it is one.
    pub fn msg_scalar(&self) -> Option<&BigInt> {
        match self {
            Value::Msg(v) if v.len() == 1 => Some(&v[0]),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalError {
    UnboundVariable(String),
    SortMismatch { op: OpKind, detail: String },
    Stuck { detail: String },
    OracleRequired(&'static str),
}

impl core::fmt::Display for EvalError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            EvalError::UnboundVariable(x) => write!(f, "unbound variable `{x}`"),
            EvalError::SortMismatch { op, detail } => {
                write!(f, "sort mismatch at {op}: {detail}")
            }
            EvalError::Stuck { detail } => write!(f, "stuck: {detail}"),
            EvalError::OracleRequired(what) => {
                write!(f, "{what} requires secret parameters (oracle mode)")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for EvalError {}

/// Which admissibility condition of a bounds map failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OverflowKind {
    Value,
    Noise,
    Level,
    Sort,
}

impl OverflowKind {
    pub fn label(self) -> &'static str {
        match self {
            OverflowKind::Value => "value",
            OverflowKind::Noise => "noise",
            OverflowKind::Level => "level",
            OverflowKind::Sort => "sort",
        }
    }
}

/// Structured undefinedness of a bounds map: which condition failed and the
/// quantities involved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundsFailure {
    pub kind: OverflowKind,
    pub detail: String,
    pub measured: Option<Rat>,
    pub threshold: Option<Rat>,
}

impl BoundsFailure {
    pub fn new(kind: OverflowKind, detail: impl Into<String>) -> Self {
        BoundsFailure {
            kind,
            detail: detail.into(),
            measured: None,
            threshold: None,
        }
    }

    pub fn with_quantities(mut self, measured: Rat, threshold: Rat) -> Self {
        self.measured = Some(measured);
        self.threshold = Some(threshold);
        self
    }
}

impl core::fmt::Display for BoundsFailure {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{} overflow: {}", self.kind.label(), self.detail)?;
        if let (Some(m), Some(t)) = (&self.measured, &self.threshold) {
            write!(
                f,
                " ({} vs threshold {})",
                rational::display(m),
                rational::display(t)
            )?;
        }
        Ok(())
    }
}

/// Bounds-map argument: the bound plus, for literal message scalars, the
/// scalar itself. Scalar multiplication is a family of operators indexed by
/// the multiplier, which the message bound (an empty point) cannot carry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundArg {
    pub bound: Bound,
    pub scalar: Option<BigInt>,
}

impl BoundArg {
    pub fn plain(b: Bound) -> Self {
        BoundArg {
            bound: b,
            scalar: None,
        }
    }
}

pub type NativeFn = Arc<dyn Fn(&[Value]) -> Result<Value, EvalError> + Send + Sync>;
pub type BoundsFn = Arc<dyn Fn(&[BoundArg]) -> Result<Bound, BoundsFailure> + Send + Sync>;
pub type MsgFn = Arc<dyn Fn(&[MsgValue]) -> Result<MsgValue, EvalError> + Send + Sync>;
pub type SignatureFn = Arc<dyn Fn(&[Sort]) -> Option<Sort> + Send + Sync>;
pub type ArgSamplerFn = Arc<dyn Fn(&mut dyn RngCore) -> Vec<Value> + Send + Sync>;
pub type BoundSamplerFn = Arc<dyn Fn(&mut dyn RngCore) -> Vec<BoundArg> + Send + Sync>;

/// One operator of the model: arity/sort signature plus the three mappings.
pub struct OperatorSpec {
    pub op: OpKind,
    pub arity: usize,
    /// Sort admissibility: given argument sorts, the output sort.
    pub signature: SignatureFn,
    /// Native semantics over runtime values.
    pub native: NativeFn,
    /// Partial bounds map; `Err` is the overflow signal.
    pub bounds: BoundsFn,
    /// Message-level semantics (noise management collapses to identity).
    pub msg: MsgFn,
    /// Samples well-bounded argument tuples for the axiom harness
    /// (needs key material; `None` in static mode).
    pub sample_args: Option<ArgSamplerFn>,
    /// Samples argument bounds on which the bounds map is usually defined.
    pub sample_bounds: Option<BoundSamplerFn>,
}

impl core::fmt::Debug for OperatorSpec {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("OperatorSpec")
            .field("op", &self.op)
            .field("arity", &self.arity)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SchemeKind {
    Bgv,
    Bfv,
    Tfhe,
}

impl core::fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            SchemeKind::Bgv => "bgv",
            SchemeKind::Bfv => "bfv",
            SchemeKind::Tfhe => "tfhe",
        })
    }
}

/// Secret-parameter hooks: exact bound measurement and decryption. Absent
/// in static mode; the type checker never consults them.
pub struct Oracle {
    /// `|v|^sp`: the exact measured bound of a runtime value.
    pub measure: Arc<dyn Fn(&Value) -> Result<Bound, EvalError> + Send + Sync>,
    /// `interp^sp`: decrypt-and-decode to a message.
    pub interp_cipher: Arc<dyn Fn(&Value) -> Result<MsgValue, EvalError> + Send + Sync>,
    /// Fresh encryption of a scalar input (the kind picks the TFHE
    /// ciphertext id; BGV/BFV accept only the plain cipher kind).
    pub encrypt: Arc<
        dyn Fn(&BigInt, crate::ir::InputKind, &mut dyn RngCore) -> Result<Value, EvalError>
            + Send
            + Sync,
    >,
}

impl core::fmt::Debug for Oracle {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str("Oracle")
    }
}

/// A fully wired model instance. Immutable after construction.
pub struct SchemeModel {
    pub kind: SchemeKind,
    /// Plaintext modulus t.
    pub t: BigInt,
    /// Ring degree d.
    pub d: usize,
    /// Moduli q_0 < ... < q_L.
    pub chain: Vec<BigInt>,
    pub ops: BTreeMap<OpKind, OperatorSpec>,
    /// Declared noise bound for fresh cipher inputs.
    pub fresh_noise: Rat,
    pub oracle: Option<Oracle>,
    /// Decode an encoded plaintext to its message (`interp^pp_plain`).
    pub decode: Arc<dyn Fn(&Poly) -> MsgValue + Send + Sync>,
    /// Encode a message scalar as a plaintext (constant polynomial).
    pub encode: Arc<dyn Fn(&BigInt) -> Poly + Send + Sync>,
}

impl core::fmt::Debug for SchemeModel {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("SchemeModel")
            .field("kind", &self.kind)
            .field("t", &self.t)
            .field("d", &self.d)
            .field("levels", &self.chain.len())
            .field("oracle", &self.oracle.is_some())
            .finish()
    }
}

impl SchemeModel {
    pub fn op(&self, op: OpKind) -> Result<&OperatorSpec, ModelError> {
        self.ops.get(&op).ok_or(ModelError::UnknownOperator(op))
    }

    pub fn top_level(&self) -> u32 {
        (self.chain.len() - 1) as u32
    }

    /// `|v|^pp` for public sorts, `|v|^sp` (via the oracle) for ciphers.
    pub fn bound_of_value(&self, v: &Value) -> Result<Bound, EvalError> {
        match v {
            Value::Msg(_) => Ok(Bound::Msg),
            Value::Plain(p) => {
                let msg = (self.decode)(p);
                let (inf, sup) = scalar_hull(&msg);
                Ok(Bound::Plain { inf, sup })
            }
            _ => match &self.oracle {
                Some(o) => (o.measure)(v),
                None => Err(EvalError::OracleRequired("measuring a ciphertext bound")),
            },
        }
    }

    /// `interp^sp`: messages are untouched, plaintexts decode, ciphertexts
    /// decrypt (oracle mode only).
    pub fn interp(&self, v: &Value) -> Result<MsgValue, EvalError> {
        match v {
            Value::Msg(m) => Ok(m.clone()),
            Value::Plain(p) => Ok((self.decode)(p)),
            _ => match &self.oracle {
                Some(o) => (o.interp_cipher)(v),
                None => Err(EvalError::OracleRequired("decrypting")),
            },
        }
    }

    /// The distinguished `true` message.
    pub fn true_value(&self) -> MsgValue {
        let one = crate::refscheme::center_mod(&BigInt::from(1), &self.t);
        alloc::vec![one]
    }
}

pub(crate) fn scalar_hull(msg: &MsgValue) -> (Rat, Rat) {
    let mut inf: Option<BigInt> = None;
    let mut sup: Option<BigInt> = None;
    for v in msg {
        inf = Some(match inf {
            None => v.clone(),
            Some(cur) => cur.min(v.clone()),
        });
        sup = Some(match sup {
            None => v.clone(),
            Some(cur) => cur.max(v.clone()),
        });
    }
    let inf = inf.unwrap_or_default();
    let sup = sup.unwrap_or_default();
    (rational::rat_from_big(inf), rational::rat_from_big(sup))
}

// ---- validity axioms ----

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomVerdict {
    pub holds: bool,
    /// The bounds map was undefined on the inputs, so the axiom holds
    /// vacuously.
    pub vacuous: bool,
    pub detail: String,
}

impl AxiomVerdict {
    fn pass() -> Self {
        AxiomVerdict {
            holds: true,
            vacuous: false,
            detail: String::new(),
        }
    }

    fn vacuous_pass() -> Self {
        AxiomVerdict {
            holds: true,
            vacuous: true,
            detail: "bounds map undefined on inputs".to_string(),
        }
    }

    fn fail(detail: String) -> Self {
        AxiomVerdict {
            holds: false,
            vacuous: false,
            detail,
        }
    }
}

/// Commutativity: when the bounds map is defined on the measured argument
/// bounds, (a) the native result's measured bound stays below the computed
/// bound, and (b) interpretation commutes with the operator.
pub fn check_commutativity(
    model: &SchemeModel,
    op: OpKind,
    args: &[Value],
) -> Result<AxiomVerdict, ModelError> {
    if model.oracle.is_none() {
        return Err(ModelError::OracleRequired("axiom checking"));
    }
    let spec = model.op(op)?;
    let sorts: Vec<Sort> = args.iter().map(|a| a.sort()).collect();
    let out_sort = (spec.signature)(&sorts).ok_or(ModelError::SortMismatch {
        want: Sort::Cipher,
        got: *sorts.first().unwrap_or(&Sort::Msg),
    })?;

    let mut bound_args = Vec::new();
    for a in args {
        let bound = model
            .bound_of_value(a)
            .map_err(|e| ModelError::Inner(format!("{e}")))?;
        bound_args.push(BoundArg {
            bound,
            scalar: a.msg_scalar().cloned(),
        });
    }

    let computed = match (spec.bounds)(&bound_args) {
        Ok(b) => b,
        Err(_) => return Ok(AxiomVerdict::vacuous_pass()),
    };

    let native = match (spec.native)(args) {
        Ok(v) => v,
        Err(e) => return Ok(AxiomVerdict::fail(format!("native semantics stuck: {e}"))),
    };
    if native.sort() != out_sort {
        return Ok(AxiomVerdict::fail(format!(
            "native result has sort {}, signature says {}",
            native.sort(),
            out_sort
        )));
    }

    // clause (a): measured result bound <= computed bound
    let measured = model
        .bound_of_value(&native)
        .map_err(|e| ModelError::Inner(format!("{e}")))?;
    if !bound_le(&measured, &computed) {
        return Ok(AxiomVerdict::fail(format!(
            "measured bound {measured} exceeds computed bound {computed}"
        )));
    }

    // clause (b): interp(native(args)) == msg_op(interp(args))
    let lhs = model
        .interp(&native)
        .map_err(|e| ModelError::Inner(format!("{e}")))?;
    let mut interp_args = Vec::new();
    for a in args {
        interp_args.push(
            model
                .interp(a)
                .map_err(|e| ModelError::Inner(format!("{e}")))?,
        );
    }
    let rhs = match (spec.msg)(&interp_args) {
        Ok(v) => v,
        Err(e) => return Ok(AxiomVerdict::fail(format!("message semantics stuck: {e}"))),
    };
    if lhs != rhs {
        return Ok(AxiomVerdict::fail(format!(
            "interp(native) = {lhs:?} but msg-level result = {rhs:?}"
        )));
    }
    Ok(AxiomVerdict::pass())
}

/// Downwards closed: definedness on larger bounds implies definedness on
/// pointwise-smaller bounds, with a smaller-or-equal result.
pub fn check_downwards_closed(
    model: &SchemeModel,
    op: OpKind,
    bounds: &[BoundArg],
    smaller: &[BoundArg],
) -> Result<AxiomVerdict, ModelError> {
    let spec = model.op(op)?;
    if bounds.len() != smaller.len() {
        return Err(ModelError::MixedSchemes);
    }
    for (b, s) in bounds.iter().zip(smaller) {
        if !bound_le(&s.bound, &b.bound) {
            return Err(ModelError::Inner(format!(
                "inputs not comparable: {} vs {}",
                s.bound, b.bound
            )));
        }
    }
    let big = match (spec.bounds)(bounds) {
        Ok(b) => b,
        Err(_) => return Ok(AxiomVerdict::vacuous_pass()),
    };
    match (spec.bounds)(smaller) {
        Ok(small) => {
            if bound_le(&small, &big) {
                Ok(AxiomVerdict::pass())
            } else {
                Ok(AxiomVerdict::fail(format!(
                    "result on smaller inputs ({small}) not below result on larger inputs ({big})"
                )))
            }
        }
        Err(e) => Ok(AxiomVerdict::fail(format!(
            "bounds map defined on larger inputs but undefined on smaller: {e}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};

    fn bgv(inf: i64, sup: i64, noise: i64, level: u32) -> Bound {
        Bound::BgvCipher {
            inf: rat(inf),
            sup: rat(sup),
            noise: rat(noise),
            level,
        }
    }

    #[test]
    fn cipher_order_follows_containment_and_noise() {
        // (1,2,eps=5,w=1) <= (0,3,eps=7,w=1)
        assert_eq!(
            compare_bounds(&bgv(1, 2, 5, 1), &bgv(0, 3, 7, 1)).unwrap(),
            BoundOrdering::Le
        );
    }

    #[test]
    fn levels_make_bounds_incomparable() {
        assert_eq!(
            compare_bounds(&bgv(0, 3, 5, 1), &bgv(0, 3, 5, 2)).unwrap(),
            BoundOrdering::Incomparable
        );
    }

    #[test]
    fn reflexivity() {
        let b = bgv(0, 3, 5, 1);
        assert_eq!(compare_bounds(&b, &b).unwrap(), BoundOrdering::Eq);
    }

    #[test]
    fn sort_mismatch_is_an_error() {
        let p = Bound::Plain {
            inf: rat(0),
            sup: rat(1),
        };
        assert!(compare_bounds(&p, &bgv(0, 1, 1, 0)).is_err());
    }

    #[test]
    fn tfhe_ids_gate_comparability() {
        let a = Bound::TfheCipher {
            id: TfheId::Lwe,
            inf: rat(0),
            sup: rat(1),
            noise: rat(1),
        };
        let b = Bound::TfheCipher {
            id: TfheId::Rlwe,
            inf: rat(0),
            sup: rat(1),
            noise: rat(1),
        };
        assert_eq!(compare_bounds(&a, &b).unwrap(), BoundOrdering::Incomparable);
    }

    #[test]
    fn interval_orders_partially() {
        let narrow_noisy = Bound::BfvCipher {
            inf: rat(1),
            sup: rat(2),
            noise: ratio(1, 2),
        };
        let wide_quiet = Bound::BfvCipher {
            inf: rat(0),
            sup: rat(3),
            noise: ratio(1, 4),
        };
        assert_eq!(
            compare_bounds(&narrow_noisy, &wide_quiet).unwrap(),
            BoundOrdering::Incomparable
        );
    }
}
