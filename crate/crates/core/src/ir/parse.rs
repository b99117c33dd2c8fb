//! Parser for the `.ila` circuit format: one statement per line, `#`
//! comments, brace-delimited blocks. The grammar is frozen in
//! `docs/ila-grammar.ebnf` and by the golden tests.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;

use super::ast::*;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub pos: Pos,
    pub msg: String,
}

impl core::fmt::Display for ParseError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "syntax error at {}: {}", self.pos, self.msg)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Assign,
    LParen,
    RParen,
    LBrack,
    RBrack,
    LBrace,
    RBrace,
    Comma,
    HomOp(OpKind),
    Plus,
    Minus,
    Star,
    Rel(IntBinOp),
    KwWhile,
    KwIf,
    KwElse,
    KwInit(InputKind),
    KwCall(OpKind),
    Newline,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(n) => format!("integer `{n}`"),
            Tok::Assign => ":=".into(),
            Tok::LParen => "(".into(),
            Tok::RParen => ")".into(),
            Tok::LBrack => "[".into(),
            Tok::RBrack => "]".into(),
            Tok::LBrace => "{".into(),
            Tok::RBrace => "}".into(),
            Tok::Comma => ",".into(),
            Tok::HomOp(op) => op.name().into(),
            Tok::Plus => "+".into(),
            Tok::Minus => "-".into(),
            Tok::Star => "*".into(),
            Tok::Rel(op) => op.token().into(),
            Tok::KwWhile => "while".into(),
            Tok::KwIf => "if".into(),
            Tok::KwElse => "else".into(),
            Tok::KwInit(k) => k.keyword().into(),
            Tok::KwCall(op) => op.name().into(),
            Tok::Newline => "end of line".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_cont(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '.'
}

fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut toks = Vec::new();
    let mut line = 1u32;
    let mut col = 1u32;
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0usize;
    let n = chars.len();
    while i < n {
        let c = chars[i];
        let pos = Pos::new(line, col);
        match c {
            '\n' => {
                toks.push((Tok::Newline, pos));
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            ' ' | '\t' | '\r' => {
                i += 1;
                col += 1;
                continue;
            }
            '#' => {
                while i < n && chars[i] != '\n' {
                    i += 1;
                    col += 1;
                }
                continue;
            }
            '(' => {
                // homomorphic operator tokens are spelled (+) (*) (.) (#) (@)
                if i + 2 < n && chars[i + 2] == ')' {
                    let op = match chars[i + 1] {
                        '+' => Some(OpKind::Add),
                        '*' => Some(OpKind::Mul),
                        '.' => Some(OpKind::ScalarMul),
                        '#' => Some(OpKind::BoxMul),
                        '@' => Some(OpKind::ExtMul),
                        _ => None,
                    };
                    if let Some(op) = op {
                        toks.push((Tok::HomOp(op), pos));
                        i += 3;
                        col += 3;
                        continue;
                    }
                }
                toks.push((Tok::LParen, pos));
                i += 1;
                col += 1;
            }
            ')' => {
                toks.push((Tok::RParen, pos));
                i += 1;
                col += 1;
            }
            '[' => {
                toks.push((Tok::LBrack, pos));
                i += 1;
                col += 1;
            }
            ']' => {
                toks.push((Tok::RBrack, pos));
                i += 1;
                col += 1;
            }
            '{' => {
                toks.push((Tok::LBrace, pos));
                i += 1;
                col += 1;
            }
            '}' => {
                toks.push((Tok::RBrace, pos));
                i += 1;
                col += 1;
            }
            ',' => {
                toks.push((Tok::Comma, pos));
                i += 1;
                col += 1;
            }
            '+' => {
                toks.push((Tok::Plus, pos));
                i += 1;
                col += 1;
            }
            '-' => {
                toks.push((Tok::Minus, pos));
                i += 1;
                col += 1;
            }
            '*' => {
                toks.push((Tok::Star, pos));
                i += 1;
                col += 1;
            }
            ':' => {
                if i + 1 < n && chars[i + 1] == '=' {
                    toks.push((Tok::Assign, pos));
                    i += 2;
                    col += 2;
                } else {
                    return Err(ParseError {
                        pos,
                        msg: "expected `:=`".to_string(),
                    });
                }
            }
            '=' => {
                if i + 1 < n && chars[i + 1] == '=' {
                    toks.push((Tok::Rel(IntBinOp::EqEq), pos));
                    i += 2;
                    col += 2;
                } else {
                    toks.push((Tok::Assign, pos));
                    i += 1;
                    col += 1;
                }
            }
            '<' => {
                if i + 1 < n && chars[i + 1] == '=' {
                    toks.push((Tok::Rel(IntBinOp::Le), pos));
                    i += 2;
                    col += 2;
                } else {
                    toks.push((Tok::Rel(IntBinOp::Lt), pos));
                    i += 1;
                    col += 1;
                }
            }
            '>' => {
                if i + 1 < n && chars[i + 1] == '=' {
                    toks.push((Tok::Rel(IntBinOp::Ge), pos));
                    i += 2;
                    col += 2;
                } else {
                    toks.push((Tok::Rel(IntBinOp::Gt), pos));
                    i += 1;
                    col += 1;
                }
            }
            '!' => {
                if i + 1 < n && chars[i + 1] == '=' {
                    toks.push((Tok::Rel(IntBinOp::Ne), pos));
                    i += 2;
                    col += 2;
                } else {
                    return Err(ParseError {
                        pos,
                        msg: "expected `!=`".to_string(),
                    });
                }
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < n && chars[i].is_ascii_digit() {
                    i += 1;
                    col += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let value = text.parse::<BigInt>().map_err(|_| ParseError {
                    pos,
                    msg: format!("bad integer literal `{text}`"),
                })?;
                toks.push((Tok::Int(value), pos));
            }
            c if is_ident_start(c) => {
                let start = i;
                while i < n && is_ident_cont(chars[i]) {
                    i += 1;
                    col += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let tok = match text.as_str() {
                    "while" => Tok::KwWhile,
                    "if" => Tok::KwIf,
                    "else" => Tok::KwElse,
                    "cipher_init" => Tok::KwInit(InputKind::Cipher),
                    "rlwe_init" => Tok::KwInit(InputKind::CipherRlwe),
                    "rgsw_init" => Tok::KwInit(InputKind::CipherRgsw),
                    "plain_init" => Tok::KwInit(InputKind::Plain),
                    "modswitch" => Tok::KwCall(OpKind::ModSwitch),
                    "pbs" => Tok::KwCall(OpKind::Pbs),
                    "cmux" => Tok::KwCall(OpKind::Cmux),
                    "true" => Tok::KwCall(OpKind::True),
                    _ => Tok::Ident(text),
                };
                toks.push((tok, pos));
            }
            other => {
                return Err(ParseError {
                    pos,
                    msg: format!("unexpected character `{other}`"),
                });
            }
        }
    }
    toks.push((Tok::Eof, Pos::new(line, col)));
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: &Tok) -> Result<Pos, ParseError> {
        if self.peek() == want {
            Ok(self.bump().1)
        } else {
            Err(self.err(format!(
                "expected {}, found {}",
                want.describe(),
                self.peek().describe()
            )))
        }
    }

    fn err(&self, msg: String) -> ParseError {
        ParseError {
            pos: self.pos(),
            msg,
        }
    }

    fn skip_newlines(&mut self) {
        while matches!(self.peek(), Tok::Newline) {
            self.bump();
        }
    }

    /// Statement terminator: newline(s) or end of input.
    fn end_of_stmt(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Newline => {
                self.skip_newlines();
                Ok(())
            }
            Tok::Eof => Ok(()),
            other => Err(self.err(format!(
                "expected end of line, found {}",
                other.describe()
            ))),
        }
    }

    fn program(&mut self) -> Result<SurfaceProgram, ParseError> {
        let mut stmts = Vec::new();
        self.skip_newlines();
        while !matches!(self.peek(), Tok::Eof) {
            stmts.push(self.stmt()?);
            self.skip_newlines();
        }
        Ok(SurfaceProgram { stmts })
    }

    fn block(&mut self) -> Result<Vec<SurfaceStmt>, ParseError> {
        self.expect(&Tok::LBrace)?;
        self.end_of_stmt()?;
        let mut stmts = Vec::new();
        loop {
            self.skip_newlines();
            if matches!(self.peek(), Tok::RBrace) {
                self.bump();
                return Ok(stmts);
            }
            if matches!(self.peek(), Tok::Eof) {
                return Err(self.err("unclosed block, expected `}`".to_string()));
            }
            stmts.push(self.stmt()?);
        }
    }

    fn stmt(&mut self) -> Result<SurfaceStmt, ParseError> {
        let pos = self.pos();
        match self.peek() {
            Tok::KwWhile => {
                self.bump();
                let cond = self.expr()?;
                let body = self.block()?;
                self.end_of_stmt()?;
                Ok(SurfaceStmt::While { cond, body, pos })
            }
            Tok::KwIf => {
                self.bump();
                let cond = self.expr()?;
                let then_body = self.block()?;
                let else_body = if matches!(self.peek(), Tok::KwElse) {
                    self.bump();
                    self.block()?
                } else {
                    Vec::new()
                };
                self.end_of_stmt()?;
                Ok(SurfaceStmt::If {
                    cond,
                    then_body,
                    else_body,
                    pos,
                })
            }
            Tok::Ident(_) => {
                let target = self.lvalue()?;
                self.expect(&Tok::Assign)?;
                let rhs = match *self.peek() {
                    Tok::KwInit(kind) => {
                        self.bump();
                        SurfaceRhs::Init(kind, self.init_shape()?)
                    }
                    _ => SurfaceRhs::Expr(self.expr()?),
                };
                self.end_of_stmt()?;
                Ok(SurfaceStmt::Assign { target, rhs, pos })
            }
            other => Err(self.err(format!("expected a statement, found {}", other.describe()))),
        }
    }

    fn lvalue(&mut self) -> Result<LValue, ParseError> {
        let name = match self.bump() {
            (Tok::Ident(s), _) => s,
            (other, pos) => {
                return Err(ParseError {
                    pos,
                    msg: format!("expected identifier, found {}", other.describe()),
                })
            }
        };
        let mut idx = Vec::new();
        while matches!(self.peek(), Tok::LBrack) {
            self.bump();
            idx.push(self.expr()?);
            self.expect(&Tok::RBrack)?;
            if idx.len() > 2 {
                return Err(self.err("at most two index dimensions".to_string()));
            }
        }
        if idx.is_empty() {
            Ok(LValue::Var(name))
        } else {
            Ok(LValue::Index(name, idx))
        }
    }

    fn signed_int(&mut self) -> Result<BigInt, ParseError> {
        let neg = if matches!(self.peek(), Tok::Minus) {
            self.bump();
            true
        } else {
            false
        };
        match self.bump() {
            (Tok::Int(v), _) => Ok(if neg { -v } else { v }),
            (other, pos) => Err(ParseError {
                pos,
                msg: format!("expected integer, found {}", other.describe()),
            }),
        }
    }

    fn init_shape(&mut self) -> Result<InitShape, ParseError> {
        match self.peek() {
            Tok::LParen => {
                self.bump();
                let v = self.signed_int()?;
                self.expect(&Tok::RParen)?;
                Ok(InitShape::Scalar(v))
            }
            Tok::LBrack => {
                self.bump();
                if matches!(self.peek(), Tok::LBrack) {
                    // matrix: list of rows
                    let mut rows = Vec::new();
                    loop {
                        self.expect(&Tok::LBrack)?;
                        let mut row = Vec::new();
                        loop {
                            row.push(self.signed_int()?);
                            if matches!(self.peek(), Tok::Comma) {
                                self.bump();
                            } else {
                                break;
                            }
                        }
                        self.expect(&Tok::RBrack)?;
                        rows.push(row);
                        if matches!(self.peek(), Tok::Comma) {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    self.expect(&Tok::RBrack)?;
                    Ok(InitShape::Matrix(rows))
                } else {
                    let mut elems = Vec::new();
                    loop {
                        elems.push(self.signed_int()?);
                        if matches!(self.peek(), Tok::Comma) {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    self.expect(&Tok::RBrack)?;
                    Ok(InitShape::Vector(elems))
                }
            }
            other => Err(self.err(format!(
                "expected `(value)` or `[values]` after init keyword, found {}",
                other.describe()
            ))),
        }
    }

    fn expr(&mut self) -> Result<SurfaceExpr, ParseError> {
        let lhs = self.sum()?;
        if let Tok::Rel(op) = *self.peek() {
            let pos = self.bump().1;
            let rhs = self.sum()?;
            return Ok(SurfaceExpr::IntBin(op, Box::new(lhs), Box::new(rhs), pos));
        }
        Ok(lhs)
    }

    fn sum(&mut self) -> Result<SurfaceExpr, ParseError> {
        let mut lhs = self.product()?;
        loop {
            let (mk, pos) = match self.peek() {
                Tok::Plus => (Ok(IntBinOp::Add), self.pos()),
                Tok::Minus => (Ok(IntBinOp::Sub), self.pos()),
                Tok::HomOp(OpKind::Add) => (Err(OpKind::Add), self.pos()),
                _ => break,
            };
            self.bump();
            let rhs = self.product()?;
            lhs = match mk {
                Ok(iop) => SurfaceExpr::IntBin(iop, Box::new(lhs), Box::new(rhs), pos),
                Err(hop) => SurfaceExpr::HomBin(hop, Box::new(lhs), Box::new(rhs), pos),
            };
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<SurfaceExpr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let (mk, pos) = match self.peek() {
                Tok::Star => (Ok(IntBinOp::Mul), self.pos()),
                Tok::HomOp(op) if *op != OpKind::Add => (Err(*op), self.pos()),
                _ => break,
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = match mk {
                Ok(iop) => SurfaceExpr::IntBin(iop, Box::new(lhs), Box::new(rhs), pos),
                Err(hop) => SurfaceExpr::HomBin(hop, Box::new(lhs), Box::new(rhs), pos),
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<SurfaceExpr, ParseError> {
        if matches!(self.peek(), Tok::Minus) {
            let pos = self.bump().1;
            let inner = self.unary()?;
            // fold negation of literals immediately
            if let SurfaceExpr::Int(v, p) = inner {
                return Ok(SurfaceExpr::Int(-v, p));
            }
            return Ok(SurfaceExpr::Neg(Box::new(inner), pos));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<SurfaceExpr, ParseError> {
        let atom = self.atom()?;
        if let SurfaceExpr::Var(name, pos) = &atom {
            if matches!(self.peek(), Tok::LBrack) {
                let mut idx = Vec::new();
                while matches!(self.peek(), Tok::LBrack) {
                    self.bump();
                    idx.push(self.expr()?);
                    self.expect(&Tok::RBrack)?;
                    if idx.len() > 2 {
                        return Err(self.err("at most two index dimensions".to_string()));
                    }
                }
                return Ok(SurfaceExpr::Index(name.clone(), idx, *pos));
            }
        }
        Ok(atom)
    }

    fn atom(&mut self) -> Result<SurfaceExpr, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(SurfaceExpr::Int(v, pos))
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(SurfaceExpr::Var(name, pos))
            }
            Tok::KwCall(OpKind::True) => {
                self.bump();
                if matches!(self.peek(), Tok::LParen) {
                    self.bump();
                    self.expect(&Tok::RParen)?;
                }
                Ok(SurfaceExpr::Call(OpKind::True, Vec::new(), pos))
            }
            Tok::KwCall(op) => {
                self.bump();
                self.expect(&Tok::LParen)?;
                let mut args = Vec::new();
                loop {
                    args.push(self.expr()?);
                    if matches!(self.peek(), Tok::Comma) {
                        self.bump();
                    } else {
                        break;
                    }
                }
                self.expect(&Tok::RParen)?;
                let want = match op {
                    OpKind::ModSwitch => 1,
                    OpKind::Pbs => 2,
                    OpKind::Cmux => 3,
                    _ => args.len(),
                };
                if args.len() != want {
                    return Err(ParseError {
                        pos,
                        msg: format!("{} takes {} argument(s), got {}", op, want, args.len()),
                    });
                }
                Ok(SurfaceExpr::Call(op, args, pos))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(&Tok::RParen)?;
                Ok(e)
            }
            other => Err(self.err(format!("expected an expression, found {}", other.describe()))),
        }
    }
}

/// Parse `.ila` source text into a surface program.
pub fn parse(source: &str) -> Result<SurfaceProgram, ParseError> {
    let toks = lex(source)?;
    let mut p = Parser { toks, at: 0 };
    p.program()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn int(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn single_statement() {
        let p = parse("x := a (+) b").unwrap();
        assert_eq!(p.stmts.len(), 1);
        match &p.stmts[0] {
            SurfaceStmt::Assign {
                target: LValue::Var(x),
                rhs: SurfaceRhs::Expr(SurfaceExpr::HomBin(OpKind::Add, lhs, rhs, _)),
                ..
            } => {
                assert_eq!(x, "x");
                assert!(matches!(&**lhs, SurfaceExpr::Var(a, _) if a == "a"));
                assert!(matches!(&**rhs, SurfaceExpr::Var(b, _) if b == "b"));
            }
            other => panic!("unexpected parse: {other:?}"),
        }
    }

    #[test]
    fn truncated_input_is_rejected_at_eof() {
        let err = parse("x := ").unwrap_err();
        assert!(err.msg.contains("end of input"), "{err}");
    }

    #[test]
    fn unknown_character() {
        assert!(parse("x := a $ b").is_err());
    }

    #[test]
    fn init_forms() {
        let p = parse("A := cipher_init[1, 3, 36]\nb := plain_init(7)\nM := cipher_init[[1,2],[3,4]]").unwrap();
        assert_eq!(p.stmts.len(), 3);
        match &p.stmts[0] {
            SurfaceStmt::Assign {
                rhs: SurfaceRhs::Init(InputKind::Cipher, InitShape::Vector(v)),
                ..
            } => assert_eq!(v, &vec![int(1), int(3), int(36)]),
            other => panic!("unexpected: {other:?}"),
        }
        match &p.stmts[2] {
            SurfaceStmt::Assign {
                rhs: SurfaceRhs::Init(InputKind::Cipher, InitShape::Matrix(rows)),
                ..
            } => assert_eq!(rows.len(), 2),
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn nested_while_blocks() {
        let src = "i := 0\nwhile i < 2 {\n  j := 0\n  while j < 3 {\n    j := j + 1\n  }\n  i := i + 1\n}\n";
        let p = parse(src).unwrap();
        assert_eq!(p.stmts.len(), 2);
        match &p.stmts[1] {
            SurfaceStmt::While { body, .. } => {
                assert_eq!(body.len(), 3);
                assert!(matches!(body[1], SurfaceStmt::While { .. }));
            }
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn if_else_and_calls() {
        let src = "g := 1\nif g {\n  x := modswitch(y)\n} else {\n  x := cmux(c, a, b)\n}\n";
        let p = parse(src).unwrap();
        match &p.stmts[1] {
            SurfaceStmt::If {
                then_body,
                else_body,
                ..
            } => {
                assert_eq!(then_body.len(), 1);
                assert_eq!(else_body.len(), 1);
            }
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn comments_and_blank_lines() {
        let src = "# a comment\n\nx := 1  # trailing\n";
        let p = parse(src).unwrap();
        assert_eq!(p.stmts.len(), 1);
    }

    #[test]
    fn scalar_mul_spelling() {
        let p = parse("y := -1 (.) x").unwrap();
        match &p.stmts[0] {
            SurfaceStmt::Assign {
                rhs: SurfaceRhs::Expr(SurfaceExpr::HomBin(OpKind::ScalarMul, lhs, _, _)),
                ..
            } => assert!(matches!(&**lhs, SurfaceExpr::Int(v, _) if *v == int(-1))),
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn wrong_arity_call() {
        assert!(parse("x := pbs(a)").is_err());
        assert!(parse("x := cmux(a, b)").is_err());
    }
}
