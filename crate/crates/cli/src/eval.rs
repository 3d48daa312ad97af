//! Evaluation of cycle expressions against a Grassmannian `Gr(d,n)` and the
//! projective space `P^{n−1}` it pairs with.
//!
//! Generator names resolve on `Gr(d,n)` except `H`, which is the hyperplane
//! class of `P^{n−1}`, and `r`, `rho`, which are `c_1` and `c_2` of
//! `τ_d ⊠ τ_1` on `Gr(d,n) × P^{n−1}`.

use std::fmt;

use motive_workbench::chow_ring::{multiply, named_generator};
use motive_workbench::correspondence::{compose, external_product, intersection, transpose};
use motive_workbench::rationality::segre_chern_class;
use motive_workbench::ring::Coeff;
use motive_workbench::{ChowClass, CoefficientRing, GrassmannSpace, Partition, ProductClass};
use serde::Serialize;
use thiserror::Error;

use crate::expr::{BinOp, Expr, ExprKind, Span};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("type error at {span}: {message}")]
    Type { span: Span, message: String },
    #[error("at {span}: {source}")]
    Algebra {
        span: Span,
        #[source]
        source: motive_workbench::Error,
    },
}

/// The result of an evaluation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Value {
    Class(ChowClass),
    Product(ProductClass),
    #[serde(serialize_with = "motive_workbench::ring::coeff_serde::serialize")]
    Scalar(Coeff),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Class(c) => write!(f, "{c:#}"),
            Value::Product(p) => write!(f, "{p}"),
            Value::Scalar(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Context {
    pub space: GrassmannSpace,
    pub ring: CoefficientRing,
}

impl Context {
    pub fn new(space: GrassmannSpace, ring: CoefficientRing) -> Self {
        Context { space, ring }
    }

    pub fn projective(&self) -> GrassmannSpace {
        GrassmannSpace::projective(self.space.n() - 1).expect("n >= 2 for any Grassmannian")
    }
}

impl Default for Context {
    fn default() -> Self {
        Context { space: GrassmannSpace::new(2, 5).expect("Gr(2,5)"), ring: CoefficientRing::Integers }
    }
}

fn type_error(span: Span, message: impl Into<String>) -> EvalError {
    EvalError::Type { span, message: message.into() }
}

fn kind(v: &Value) -> String {
    match v {
        Value::Class(c) => format!("a class on {}", c.space()),
        Value::Product(p) => format!("a class on {}×{}", p.left(), p.right()),
        Value::Scalar(_) => "a scalar".into(),
    }
}

struct Evaluator<'a> {
    ctx: &'a Context,
}

impl Evaluator<'_> {
    fn in_ring<T>(&self, span: Span, r: motive_workbench::Result<T>) -> Result<T, EvalError> {
        r.map_err(|source| EvalError::Algebra { span, source })
    }

    fn scalar_class(&self, s: &Coeff, space: GrassmannSpace, ring: CoefficientRing, span: Span) -> Result<ChowClass, EvalError> {
        self.in_ring(span, ChowClass::one(space, ring).scale(s))
    }

    fn scalar_product(&self, s: &Coeff, like: &ProductClass, span: Span) -> Result<ProductClass, EvalError> {
        let left = ChowClass::one(like.left(), like.ring());
        let right = ChowClass::one(like.right(), like.ring());
        let unit = self.in_ring(span, external_product(&left, &right))?;
        self.in_ring(span, unit.scale(s))
    }

    fn name(&self, name: &str, span: Span) -> Result<Value, EvalError> {
        let cast_product = |p: ProductClass| self.in_ring(span, p.cast(self.ctx.ring)).map(Value::Product);
        match name {
            "r" | "rho" | "ρ" => {
                let i = if name == "r" { 1 } else { 2 };
                let class = self.in_ring(span, segre_chern_class(self.ctx.space.d(), 1, self.ctx.space.n(), i))?;
                cast_product(class)
            }
            "H" => {
                let class = self.in_ring(span, named_generator(self.ctx.projective(), "H"))?;
                self.in_ring(span, class.cast(self.ctx.ring)).map(Value::Class)
            }
            _ => {
                let class = named_generator(self.ctx.space, name)
                    .map_err(|_| type_error(span, format!("unknown generator `{name}` on {}", self.ctx.space)))?;
                self.in_ring(span, class.cast(self.ctx.ring)).map(Value::Class)
            }
        }
    }

    fn eval(&self, e: &Expr) -> Result<Value, EvalError> {
        let span = e.span;
        match &e.kind {
            ExprKind::Int(v) => Ok(Value::Scalar(Coeff::from_integer(v.clone()))),
            ExprKind::Fraction(n, d) => {
                if self.ctx.ring != CoefficientRing::Rationals {
                    return Err(type_error(span, format!("fractions need --ring Q (current ring {})", self.ctx.ring)));
                }
                Ok(Value::Scalar(Coeff::new(n.clone(), d.clone())))
            }
            ExprKind::Name(name) => self.name(name, span),
            ExprKind::Schubert(parts) => {
                let lambda = self.in_ring(span, Partition::new(parts.clone()))?;
                let class = self.in_ring(span, ChowClass::basis(self.ctx.space, lambda))?;
                self.in_ring(span, class.cast(self.ctx.ring)).map(Value::Class)
            }
            ExprKind::Neg(inner) => Ok(match self.eval(inner)? {
                Value::Class(c) => Value::Class(c.neg()),
                Value::Product(p) => Value::Product(p.neg()),
                Value::Scalar(s) => Value::Scalar(-s),
            }),
            ExprKind::Pow(base, k) => match self.eval(base)? {
                Value::Class(c) => self.in_ring(span, c.pow(*k)).map(Value::Class),
                Value::Product(p) => self.in_ring(span, p.pow(*k)).map(Value::Product),
                Value::Scalar(s) => Ok(Value::Scalar(num_traits::pow(s, *k as usize))),
            },
            ExprKind::Transpose(inner) => match self.eval(inner)? {
                Value::Product(p) => Ok(Value::Product(transpose(&p))),
                other => Err(type_error(span, format!("t() needs a class on a product, found {}", kind(&other)))),
            },
            ExprKind::Mod(inner, m) => {
                let target = self.in_ring(span, CoefficientRing::integers_mod(*m))?;
                match self.eval(inner)? {
                    Value::Class(c) => self.in_ring(span, c.cast(target)).map(Value::Class),
                    Value::Product(p) => self.in_ring(span, p.cast(target)).map(Value::Product),
                    Value::Scalar(s) => {
                        let class = self.scalar_class(&s, self.ctx.space, self.ctx.ring, span)?;
                        self.in_ring(span, class.cast(target)).map(Value::Class)
                    }
                }
            }
            ExprKind::Binary(op, lhs, rhs) => {
                let a = self.eval(lhs)?;
                let b = self.eval(rhs)?;
                self.binary(*op, a, b, span)
            }
        }
    }

    fn binary(&self, op: BinOp, a: Value, b: Value, span: Span) -> Result<Value, EvalError> {
        use Value::*;
        match op {
            BinOp::Add | BinOp::Sub => {
                let b = if op == BinOp::Sub {
                    match b {
                        Class(c) => Class(c.neg()),
                        Product(p) => Product(p.neg()),
                        Scalar(s) => Scalar(-s),
                    }
                } else {
                    b
                };
                match (a, b) {
                    (Scalar(x), Scalar(y)) => Ok(Scalar(x + y)),
                    (Class(x), Class(y)) => self.in_ring(span, x.add(&y)).map(Class),
                    (Product(x), Product(y)) => self.in_ring(span, x.add(&y)).map(Product),
                    (Class(c), Scalar(s)) | (Scalar(s), Class(c)) => {
                        let unit = self.scalar_class(&s, c.space(), c.ring(), span)?;
                        self.in_ring(span, c.add(&unit)).map(Class)
                    }
                    (Product(p), Scalar(s)) | (Scalar(s), Product(p)) => {
                        let unit = self.scalar_product(&s, &p, span)?;
                        self.in_ring(span, p.add(&unit)).map(Product)
                    }
                    (x, y) => Err(type_error(span, format!("cannot add {} and {}", kind(&x), kind(&y)))),
                }
            }
            BinOp::Mul => match (a, b) {
                (Scalar(x), Scalar(y)) => Ok(Scalar(x * y)),
                (Scalar(s), Class(c)) | (Class(c), Scalar(s)) => self.in_ring(span, c.scale(&s)).map(Class),
                (Scalar(s), Product(p)) | (Product(p), Scalar(s)) => self.in_ring(span, p.scale(&s)).map(Product),
                (Class(x), Class(y)) => self.in_ring(span, multiply(&x, &y)).map(Class),
                (Product(x), Product(y)) => self.in_ring(span, intersection(&x, &y)).map(Product),
                (x, y) => Err(type_error(span, format!("cannot multiply {} by {}", kind(&x), kind(&y)))),
            },
            BinOp::External => match (a, b) {
                (Class(x), Class(y)) => self.in_ring(span, external_product(&x, &y)).map(Product),
                (x, y) => Err(type_error(span, format!("x needs two classes, found {} and {}", kind(&x), kind(&y)))),
            },
            BinOp::Compose => match (a, b) {
                (Product(outer), Product(inner)) => {
                    if inner.right() != outer.left() {
                        return Err(type_error(
                            span,
                            format!("cannot compose: middle spaces {} and {} differ", inner.right(), outer.left()),
                        ));
                    }
                    self.in_ring(span, compose(&outer, &inner)).map(Product)
                }
                (x, y) => Err(type_error(span, format!("o needs two product classes, found {} and {}", kind(&x), kind(&y)))),
            },
        }
    }
}

/// Evaluates `e`. A bare scalar at the top level is returned as a multiple
/// of the unit class of the context space.
pub fn eval(e: &Expr, ctx: &Context) -> Result<Value, EvalError> {
    let ev = Evaluator { ctx };
    match ev.eval(e)? {
        Value::Scalar(s) => ev.scalar_class(&s, ctx.space, ctx.ring, e.span).map(Value::Class),
        other => Ok(other),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn run(src: &str) -> String {
        eval(&parse(src).unwrap(), &Context::default()).unwrap().to_string()
    }

    #[test]
    fn ring_products() {
        assert_eq!(run("g2*g2"), "g₄");
        assert_eq!(run("sigma1*sigma1"), "σ₂ + g₂");
        assert_eq!(run("1"), "1");
        assert_eq!(run("S[1]^6"), "5pt");
        assert_eq!(run("2*g2 - g2 + 3"), "3 + g₂");
    }

    #[test]
    fn correspondences() {
        assert_eq!(run("rho"), "1×H² + σ₁×H + g₂×1");
        assert_eq!(run("mod(rho^3 o t(rho^2), 5)"), "1×H⁴ + H×H³ + H²×H² + H³×H + H⁴×1");
        assert_eq!(run("rho^2"), "1×H⁴ + 2σ₁×H³ + (σ₂+3g₂)×H² + 2g₃×H + g₄×1");
        assert_eq!(run("S[1] x H^3"), "σ₁×H³");
    }

    #[test]
    fn type_errors_carry_spans() {
        let ctx = Context::default();
        let err = eval(&parse("g2 o g3").unwrap(), &ctx).unwrap_err();
        assert!(matches!(err, EvalError::Type { span: Span { start: 0, end: 7 }, .. }), "{err}");
        let err = eval(&parse("rho o rho").unwrap(), &ctx).unwrap_err();
        assert!(matches!(err, EvalError::Type { .. }), "{err}");
        let err = eval(&parse("g2 + H").unwrap(), &ctx).unwrap_err();
        assert!(matches!(err, EvalError::Algebra { .. }), "{err}");
        let err = eval(&parse("1 + bogus").unwrap(), &ctx).unwrap_err();
        assert!(matches!(err, EvalError::Type { span: Span { start: 4, end: 9 }, .. }), "{err}");
        assert!(eval(&parse("5/2*g5").unwrap(), &ctx).is_err());
        assert!(eval(&parse("S[4]").unwrap(), &ctx).is_err());
    }

    #[test]
    fn rationals() {
        let ctx = Context::new(GrassmannSpace::new(2, 5).unwrap(), CoefficientRing::Rationals);
        let v = eval(&parse("5/2*g5").unwrap(), &ctx).unwrap();
        assert_eq!(v.to_string(), "5/2·g₅");
    }
}
