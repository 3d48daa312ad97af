//! The cycle expression language.
//!
//! ```text
//! sum   := comp (('+' | '-') comp)*
//! comp  := ext (('o' | '∘') ext)*
//! ext   := prod (('x' | '×') prod)*
//! prod  := unary ('*' unary)*
//! unary := '-' unary | power
//! power := atom ('^' INT)?
//! atom  := INT ('/' INT)? | IDENT | 'S' '[' INT (',' INT)* ']' | 'S' '[' ']'
//!        | 't' '(' sum ')' | 'mod' '(' sum ',' INT ')' | '(' sum ')'
//! ```
//!
//! Whitespace is insignificant. The words `o`, `x`, `t`, `mod` and `S` are
//! reserved. Every node carries the byte span of the text it was parsed from;
//! spans are ignored when comparing expressions.

use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

/// Half-open byte range `[start, end)` into the source text.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    fn join(self, other: Span) -> Span {
        Span { start: self.start.min(other.start), end: self.end.max(other.end) }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("syntax error at byte {offset}: {message}")]
pub struct SyntaxError {
    pub offset: usize,
    pub message: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Compose,
    External,
    Mul,
}

impl BinOp {
    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Compose => 2,
            BinOp::External => 3,
            BinOp::Mul => 4,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => " + ",
            BinOp::Sub => " - ",
            BinOp::Compose => " o ",
            BinOp::External => " x ",
            BinOp::Mul => "*",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprKind {
    Int(BigInt),
    Fraction(BigInt, BigInt),
    Name(String),
    Schubert(Vec<u32>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, u32),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Transpose(Box<Expr>),
    Mod(Box<Expr>, u64),
}

#[derive(Clone, Debug, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

const NEG_PRECEDENCE: u8 = 5;
const POW_PRECEDENCE: u8 = 6;
const ATOM_PRECEDENCE: u8 = 7;

impl Expr {
    pub fn new(kind: ExprKind) -> Self {
        Expr { kind, span: Span::default() }
    }

    fn precedence(&self) -> u8 {
        match &self.kind {
            ExprKind::Binary(op, _, _) => op.precedence(),
            ExprKind::Neg(_) => NEG_PRECEDENCE,
            ExprKind::Pow(_, _) => POW_PRECEDENCE,
            _ => ATOM_PRECEDENCE,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "(")?;
            self.write_at(f, 0)?;
            return write!(f, ")");
        }
        match &self.kind {
            ExprKind::Int(v) => write!(f, "{v}"),
            ExprKind::Fraction(n, d) => write!(f, "{n}/{d}"),
            ExprKind::Name(name) => write!(f, "{name}"),
            ExprKind::Schubert(parts) => {
                let parts: Vec<String> = parts.iter().map(u32::to_string).collect();
                write!(f, "S[{}]", parts.join(","))
            }
            ExprKind::Neg(inner) => {
                write!(f, "-")?;
                inner.write_at(f, NEG_PRECEDENCE)
            }
            ExprKind::Pow(base, k) => {
                base.write_at(f, ATOM_PRECEDENCE)?;
                write!(f, "^{k}")
            }
            ExprKind::Binary(op, lhs, rhs) => {
                lhs.write_at(f, op.precedence())?;
                write!(f, "{}", op.symbol())?;
                rhs.write_at(f, op.precedence() + 1)
            }
            ExprKind::Transpose(inner) => {
                write!(f, "t(")?;
                inner.write_at(f, 0)?;
                write!(f, ")")
            }
            ExprKind::Mod(inner, m) => {
                write!(f, "mod(")?;
                inner.write_at(f, 0)?;
                write!(f, ", {m})")
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    Comma,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Compose,
    External,
    Transpose,
    Mod,
    Schubert,
    End,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Int(v) => format!("integer {v}"),
            Token::Ident(s) => format!("name `{s}`"),
            Token::End => "end of input".into(),
            Token::Plus => "`+`".into(),
            Token::Minus => "`-`".into(),
            Token::Star => "`*`".into(),
            Token::Caret => "`^`".into(),
            Token::Slash => "`/`".into(),
            Token::Comma => "`,`".into(),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
            Token::LBracket => "`[`".into(),
            Token::RBracket => "`]`".into(),
            Token::Compose => "`o`".into(),
            Token::External => "`x`".into(),
            Token::Transpose => "`t`".into(),
            Token::Mod => "`mod`".into(),
            Token::Schubert => "`S`".into(),
        }
    }
}

fn tokenize(input: &str) -> Result<Vec<(Token, Span)>, SyntaxError> {
    let mut out = Vec::new();
    let mut chars = input.char_indices().peekable();
    while let Some(&(start, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        if c.is_ascii_digit() {
            let mut end = start;
            while let Some(&(i, d)) = chars.peek() {
                if !d.is_ascii_digit() {
                    break;
                }
                end = i + d.len_utf8();
                chars.next();
            }
            let value = input[start..end].parse::<BigInt>().expect("digits parse");
            out.push((Token::Int(value), Span { start, end }));
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let mut end = start;
            while let Some(&(i, d)) = chars.peek() {
                if !(d.is_alphanumeric() || d == '_') {
                    break;
                }
                end = i + d.len_utf8();
                chars.next();
            }
            let word = &input[start..end];
            let token = match word {
                "o" => Token::Compose,
                "x" => Token::External,
                "t" => Token::Transpose,
                "mod" => Token::Mod,
                "S" => Token::Schubert,
                _ => Token::Ident(word.to_string()),
            };
            out.push((token, Span { start, end }));
            continue;
        }
        let token = match c {
            '+' => Token::Plus,
            '-' | '−' => Token::Minus,
            '*' | '·' => Token::Star,
            '^' => Token::Caret,
            '/' => Token::Slash,
            ',' => Token::Comma,
            '(' => Token::LParen,
            ')' => Token::RParen,
            '[' => Token::LBracket,
            ']' => Token::RBracket,
            '∘' => Token::Compose,
            '×' => Token::External,
            other => {
                return Err(SyntaxError { offset: start, message: format!("unexpected character `{other}`") });
            }
        };
        chars.next();
        out.push((token, Span { start, end: start + c.len_utf8() }));
    }
    out.push((Token::End, Span { start: input.len(), end: input.len() }));
    Ok(out)
}

struct Parser {
    tokens: Vec<(Token, Span)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].0
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].1
    }

    fn bump(&mut self) -> (Token, Span) {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> SyntaxError {
        SyntaxError {
            offset: self.span().start,
            message: format!("expected {expected}, found {}", self.peek().describe()),
        }
    }

    fn expect(&mut self, token: Token, what: &str) -> Result<Span, SyntaxError> {
        if *self.peek() == token {
            Ok(self.bump().1)
        } else {
            Err(self.error(what))
        }
    }

    fn integer(&mut self, what: &str) -> Result<(BigInt, Span), SyntaxError> {
        match self.peek().clone() {
            Token::Int(v) => {
                let span = self.bump().1;
                Ok((v, span))
            }
            _ => Err(self.error(what)),
        }
    }

    fn small<T: TryFrom<BigInt>>(&mut self, what: &str) -> Result<(T, Span), SyntaxError> {
        let (v, span) = self.integer(what)?;
        let shown = v.to_string();
        T::try_from(v)
            .map(|v| (v, span))
            .map_err(|_| SyntaxError { offset: span.start, message: format!("{what} {shown} is out of range") })
    }

    fn binary_level(
        &mut self,
        ops: &[(Token, BinOp)],
        next: fn(&mut Parser) -> Result<Expr, SyntaxError>,
    ) -> Result<Expr, SyntaxError> {
        let mut lhs = next(self)?;
        while let Some(op) = ops.iter().find(|(t, _)| t == self.peek()).map(|(_, op)| *op) {
            self.bump();
            let rhs = next(self)?;
            let span = lhs.span.join(rhs.span);
            lhs = Expr { kind: ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span };
        }
        Ok(lhs)
    }

    fn sum(&mut self) -> Result<Expr, SyntaxError> {
        self.binary_level(&[(Token::Plus, BinOp::Add), (Token::Minus, BinOp::Sub)], Parser::comp)
    }

    fn comp(&mut self) -> Result<Expr, SyntaxError> {
        self.binary_level(&[(Token::Compose, BinOp::Compose)], Parser::ext)
    }

    fn ext(&mut self) -> Result<Expr, SyntaxError> {
        self.binary_level(&[(Token::External, BinOp::External)], Parser::prod)
    }

    fn prod(&mut self) -> Result<Expr, SyntaxError> {
        self.binary_level(&[(Token::Star, BinOp::Mul)], Parser::unary)
    }

    fn unary(&mut self) -> Result<Expr, SyntaxError> {
        if *self.peek() == Token::Minus {
            let start = self.bump().1;
            let inner = self.unary()?;
            let span = start.join(inner.span);
            return Ok(Expr { kind: ExprKind::Neg(Box::new(inner)), span });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, SyntaxError> {
        let base = self.atom()?;
        if *self.peek() != Token::Caret {
            return Ok(base);
        }
        self.bump();
        let (k, span) = self.small::<u32>("exponent")?;
        let span = base.span.join(span);
        Ok(Expr { kind: ExprKind::Pow(Box::new(base), k), span })
    }

    fn atom(&mut self) -> Result<Expr, SyntaxError> {
        let start = self.span();
        match self.peek().clone() {
            Token::Int(n) => {
                self.bump();
                if *self.peek() == Token::Slash {
                    self.bump();
                    let (d, end) = self.integer("denominator")?;
                    if d == BigInt::from(0) {
                        return Err(SyntaxError { offset: end.start, message: "zero denominator".into() });
                    }
                    return Ok(Expr { kind: ExprKind::Fraction(n, d), span: start.join(end) });
                }
                Ok(Expr { kind: ExprKind::Int(n), span: start })
            }
            Token::Ident(name) => {
                self.bump();
                Ok(Expr { kind: ExprKind::Name(name), span: start })
            }
            Token::Schubert => {
                self.bump();
                self.expect(Token::LBracket, "`[` after S")?;
                let mut parts = Vec::new();
                if *self.peek() != Token::RBracket {
                    parts.push(self.small::<u32>("part")?.0);
                    while *self.peek() == Token::Comma {
                        self.bump();
                        parts.push(self.small::<u32>("part")?.0);
                    }
                }
                let end = self.expect(Token::RBracket, "`,` or `]`")?;
                Ok(Expr { kind: ExprKind::Schubert(parts), span: start.join(end) })
            }
            Token::Transpose => {
                self.bump();
                self.expect(Token::LParen, "`(` after t")?;
                let inner = self.sum()?;
                let end = self.expect(Token::RParen, "`)`")?;
                Ok(Expr { kind: ExprKind::Transpose(Box::new(inner)), span: start.join(end) })
            }
            Token::Mod => {
                self.bump();
                self.expect(Token::LParen, "`(` after mod")?;
                let inner = self.sum()?;
                self.expect(Token::Comma, "`,` before the modulus")?;
                let (m, mspan) = self.small::<u64>("modulus")?;
                if m < 2 {
                    return Err(SyntaxError { offset: mspan.start, message: "modulus must be at least 2".into() });
                }
                let end = self.expect(Token::RParen, "`)`")?;
                Ok(Expr { kind: ExprKind::Mod(Box::new(inner), m), span: start.join(end) })
            }
            Token::LParen => {
                self.bump();
                let mut inner = self.sum()?;
                let end = self.expect(Token::RParen, "`)`")?;
                inner.span = start.join(end);
                Ok(inner)
            }
            _ => Err(self.error("an expression")),
        }
    }
}

pub fn parse(input: &str) -> Result<Expr, SyntaxError> {
    let mut parser = Parser { tokens: tokenize(input)?, pos: 0 };
    let expr = parser.sum()?;
    if *parser.peek() != Token::End {
        return Err(parser.error("an operator or end of input"));
    }
    Ok(expr)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn name(s: &str) -> Expr {
        Expr::new(ExprKind::Name(s.into()))
    }

    fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::new(ExprKind::Binary(op, Box::new(a), Box::new(b)))
    }

    #[test]
    fn precedence() {
        let e = parse("a + b o c x d * e^2").unwrap();
        let expected = bin(
            BinOp::Add,
            name("a"),
            bin(
                BinOp::Compose,
                name("b"),
                bin(BinOp::External, name("c"), bin(BinOp::Mul, name("d"), Expr::new(ExprKind::Pow(Box::new(name("e")), 2)))),
            ),
        );
        assert_eq!(e, expected);
        assert_eq!(e.to_string(), "a + b o c x d*e^2");
    }

    #[test]
    fn structures() {
        assert!(matches!(parse("rho o t(rho)").unwrap().kind, ExprKind::Binary(BinOp::Compose, _, _)));
        assert!(matches!(parse("S[2,1] x H^3").unwrap().kind, ExprKind::Binary(BinOp::External, _, _)));
        assert_eq!(parse("S[2,1] ∘ S[]").unwrap().to_string(), "S[2,1] o S[]");
        assert_eq!(parse("mod(rho^3 o t(rho^2), 5)").unwrap().to_string(), "mod(rho^3 o t(rho^2), 5)");
        assert_eq!(parse("(a - b) - (c - d)").unwrap().to_string(), "a - b - (c - d)");
        assert_eq!(parse("-(a*b)^2").unwrap().to_string(), "-(a*b)^2");
        assert_eq!(parse("5/2 * g5").unwrap().to_string(), "5/2*g5");
    }

    #[test]
    fn spans() {
        let e = parse("  g2 * g3").unwrap();
        assert_eq!(e.span, Span { start: 2, end: 9 });
        let ExprKind::Binary(_, lhs, rhs) = &e.kind else { panic!() };
        assert_eq!((lhs.span, rhs.span), (Span { start: 2, end: 4 }, Span { start: 7, end: 9 }));
    }

    #[test]
    fn syntax_errors_have_offsets() {
        assert_eq!(parse("g2 *").unwrap_err().offset, 4);
        assert_eq!(parse("g2 $ g3").unwrap_err().offset, 3);
        assert_eq!(parse("t rho").unwrap_err().offset, 2);
        assert_eq!(parse("(g2").unwrap_err().offset, 3);
        assert_eq!(parse("mod(g2, 1)").unwrap_err().offset, 8);
        assert_eq!(parse("g2 g3").unwrap_err().offset, 3);
        assert_eq!(parse("1/0").unwrap_err().offset, 2);
        assert!(parse("").is_err());
    }
}
