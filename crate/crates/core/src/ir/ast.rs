use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;

/// Source position, 1-based. Statements produced by loop unrolling keep the
/// position of the line they came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl Pos {
    pub fn new(line: u32, col: u32) -> Self {
        Pos { line, col }
    }
}

impl core::fmt::Display for Pos {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// Scheme operators. Which of these are admissible, and at which sorts, is
/// decided by the scheme model's operator table, not by the AST.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OpKind {
    /// Homomorphic / sorted addition, written `(+)`.
    Add,
    /// Multiplication, written `(*)`.
    Mul,
    /// Scalar multiplication by an integer, written `n (.) e`.
    ScalarMul,
    /// Modulus switch, `modswitch(e)`.
    ModSwitch,
    /// TFHE RGSW-RGSW product, written `(#)`.
    BoxMul,
    /// TFHE external product, written `(@)`.
    ExtMul,
    /// TFHE selector, `cmux(c, a, b)`.
    Cmux,
    /// TFHE programmable bootstrap, `pbs(lut, e)`.
    Pbs,
    /// The distinguished nullary message operator used by `if` guards.
    True,
}

impl OpKind {
    pub fn name(self) -> &'static str {
        match self {
            OpKind::Add => "(+)",
            OpKind::Mul => "(*)",
            OpKind::ScalarMul => "(.)",
            OpKind::ModSwitch => "modswitch",
            OpKind::BoxMul => "(#)",
            OpKind::ExtMul => "(@)",
            OpKind::Cmux => "cmux",
            OpKind::Pbs => "pbs",
            OpKind::True => "true",
        }
    }
}

impl core::fmt::Display for OpKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// Literal constants that may appear in core programs. Ciphertext literals
/// are deliberately unrepresentable; ciphertexts enter only through the
/// input substitution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstValue {
    /// A message scalar (loop counters, guards, scalar multipliers).
    Msg(BigInt),
    /// A plaintext scalar, encoded as a constant polynomial.
    Plain(BigInt),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoreExpr {
    Var(String),
    Const(ConstValue),
    Op(OpKind, Vec<CoreExpr>),
}

impl CoreExpr {
    pub fn var(name: &str) -> Self {
        CoreExpr::Var(String::from(name))
    }

    /// Free variables in evaluation order, with duplicates.
    pub fn vars(&self, out: &mut Vec<String>) {
        match self {
            CoreExpr::Var(x) => out.push(x.clone()),
            CoreExpr::Const(_) => {}
            CoreExpr::Op(_, args) => {
                for a in args {
                    a.vars(out);
                }
            }
        }
    }
}

/// Loop-free commands. Sequencing is n-ary so that unrolled programs do not
/// nest thousands of levels deep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoreCmd {
    Skip,
    Assign(String, CoreExpr, Pos),
    Seq(Vec<CoreCmd>),
    If(CoreExpr, Box<CoreCmd>, Box<CoreCmd>, Pos),
}

impl CoreCmd {
    pub fn seq(cmds: Vec<CoreCmd>) -> Self {
        match cmds.len() {
            0 => CoreCmd::Skip,
            1 => cmds.into_iter().next().unwrap(),
            _ => CoreCmd::Seq(cmds),
        }
    }

    /// Number of assignments, counting both branches of every `if`.
    pub fn assign_count(&self) -> usize {
        match self {
            CoreCmd::Skip => 0,
            CoreCmd::Assign(..) => 1,
            CoreCmd::Seq(cs) => cs.iter().map(|c| c.assign_count()).sum(),
            CoreCmd::If(_, a, b, _) => a.assign_count() + b.assign_count(),
        }
    }

    pub fn contains_if(&self) -> bool {
        match self {
            CoreCmd::Skip | CoreCmd::Assign(..) => false,
            CoreCmd::Seq(cs) => cs.iter().any(|c| c.contains_if()),
            CoreCmd::If(..) => true,
        }
    }
}

// ---- surface language ----

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceProgram {
    pub stmts: Vec<SurfaceStmt>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SurfaceStmt {
    Assign {
        target: LValue,
        rhs: SurfaceRhs,
        pos: Pos,
    },
    While {
        cond: SurfaceExpr,
        body: Vec<SurfaceStmt>,
        pos: Pos,
    },
    If {
        cond: SurfaceExpr,
        then_body: Vec<SurfaceStmt>,
        else_body: Vec<SurfaceStmt>,
        pos: Pos,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LValue {
    Var(String),
    /// `A[i]`, and `M[i][j]` for matrices.
    Index(String, Vec<SurfaceExpr>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SurfaceRhs {
    Init(InputKind, InitShape),
    Expr(SurfaceExpr),
}

/// Initializer payloads. Matrices are row-major lists of rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InitShape {
    Scalar(BigInt),
    Vector(Vec<BigInt>),
    Matrix(Vec<Vec<BigInt>>),
}

/// Integer operators that exist only at the surface level. They must
/// constant-fold during lowering; there is no runtime counterpart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntBinOp {
    Add,
    Sub,
    Mul,
    Lt,
    Le,
    Gt,
    Ge,
    EqEq,
    Ne,
}

impl IntBinOp {
    pub fn token(self) -> &'static str {
        match self {
            IntBinOp::Add => "+",
            IntBinOp::Sub => "-",
            IntBinOp::Mul => "*",
            IntBinOp::Lt => "<",
            IntBinOp::Le => "<=",
            IntBinOp::Gt => ">",
            IntBinOp::Ge => ">=",
            IntBinOp::EqEq => "==",
            IntBinOp::Ne => "!=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SurfaceExpr {
    Int(BigInt, Pos),
    Var(String, Pos),
    Index(String, Vec<SurfaceExpr>, Pos),
    Neg(Box<SurfaceExpr>, Pos),
    IntBin(IntBinOp, Box<SurfaceExpr>, Box<SurfaceExpr>, Pos),
    HomBin(OpKind, Box<SurfaceExpr>, Box<SurfaceExpr>, Pos),
    Call(OpKind, Vec<SurfaceExpr>, Pos),
}

impl SurfaceExpr {
    pub fn pos(&self) -> Pos {
        match self {
            SurfaceExpr::Int(_, p)
            | SurfaceExpr::Var(_, p)
            | SurfaceExpr::Index(_, _, p)
            | SurfaceExpr::Neg(_, p)
            | SurfaceExpr::IntBin(_, _, _, p)
            | SurfaceExpr::HomBin(_, _, _, p)
            | SurfaceExpr::Call(_, _, p) => *p,
        }
    }
}

/// Declared circuit input: one scalar per variable, produced by flattening
/// `cipher_init` / `plain_init` declarations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputDecl {
    pub name: String,
    pub kind: InputKind,
    pub value: BigInt,
    pub pos: Pos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum InputKind {
    /// `cipher_init`: an LWE ciphertext under TFHE, the ordinary
    /// ciphertext kind elsewhere.
    Cipher,
    /// `rlwe_init` (TFHE only).
    CipherRlwe,
    /// `rgsw_init` (TFHE only).
    CipherRgsw,
    /// `plain_init`.
    Plain,
}

impl InputKind {
    pub fn keyword(self) -> &'static str {
        match self {
            InputKind::Cipher => "cipher_init",
            InputKind::CipherRlwe => "rlwe_init",
            InputKind::CipherRgsw => "rgsw_init",
            InputKind::Plain => "plain_init",
        }
    }

    pub fn is_cipher(self) -> bool {
        !matches!(self, InputKind::Plain)
    }
}
