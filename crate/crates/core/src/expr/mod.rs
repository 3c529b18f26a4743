//! Coefficient expressions in the time variable `t`.
//!
//! Every time-varying coefficient of a system is an [`Expr`]: a small tree of
//! constants, `t`, the four arithmetic operators, powers with a constant
//! exponent and a handful of elementary functions. Expressions are parsed from
//! text, evaluated pointwise and differentiated symbolically. There is no
//! simplifier beyond constant folding, so two expressions are compared by
//! evaluating them on a grid, never structurally.

mod diff;
mod parse;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use parse::{parse, ParseError, ParseErrorKind};

/// Elementary functions accepted by the grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Ln,
    Sqrt,
    Sin,
    Cos,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sqrt" => Func::Sqrt,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Var,
    Neg(Expr),
    Add(Expr, Expr),
    Sub(Expr, Expr),
    Mul(Expr, Expr),
    Div(Expr, Expr),
    Pow(Expr, f64),
    Call(Func, Expr),
}

/// Immutable, cheaply clonable expression tree.
#[derive(Clone, PartialEq)]
pub struct Expr(Arc<Node>);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainErrorKind {
    DivisionByZero,
    LogOfNonPositive,
    SqrtOfNegative,
    InvalidPower,
    Overflow,
}

impl fmt::Display for DomainErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DomainErrorKind::DivisionByZero => "division by zero",
            DomainErrorKind::LogOfNonPositive => "logarithm of a non-positive value",
            DomainErrorKind::SqrtOfNegative => "square root of a negative value",
            DomainErrorKind::InvalidPower => "power undefined for this base",
            DomainErrorKind::Overflow => "non-finite result",
        })
    }
}

/// Evaluation failed inside `subexpr` at time `t`.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{kind} in `{subexpr}` at t = {t}")]
pub struct EvalError {
    pub kind: DomainErrorKind,
    pub subexpr: String,
    pub t: f64,
}

impl Expr {
    pub fn node(&self) -> &Node {
        &self.0
    }

    fn wrap(node: Node) -> Self {
        Expr(Arc::new(node))
    }

    pub fn constant(c: f64) -> Self {
        Self::wrap(Node::Const(c))
    }

    pub fn t() -> Self {
        Self::wrap(Node::Var)
    }

    pub fn as_constant(&self) -> Option<f64> {
        match self.node() {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    /// True when the tree does not mention `t`.
    pub fn is_time_invariant(&self) -> bool {
        match self.node() {
            Node::Const(_) => true,
            Node::Var => false,
            Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => a.is_time_invariant(),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.is_time_invariant() && b.is_time_invariant()
            }
        }
    }

    // Constructors below fold constants and drop additive/multiplicative
    // identities; nothing else is simplified.

    #[allow(clippy::should_implement_trait)]
    pub fn neg(a: Expr) -> Expr {
        match a.node() {
            Node::Const(c) => Expr::constant(-c),
            Node::Neg(inner) => inner.clone(),
            _ => Self::wrap(Node::Neg(a)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(a: Expr, b: Expr) -> Expr {
        match (a.as_constant(), b.as_constant()) {
            (Some(x), Some(y)) => Expr::constant(x + y),
            (Some(x), _) if x == 0.0 => b,
            (_, Some(y)) if y == 0.0 => a,
            _ => Self::wrap(Node::Add(a, b)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(a: Expr, b: Expr) -> Expr {
        match (a.as_constant(), b.as_constant()) {
            (Some(x), Some(y)) => Expr::constant(x - y),
            (Some(x), _) if x == 0.0 => Expr::neg(b),
            (_, Some(y)) if y == 0.0 => a,
            _ => Self::wrap(Node::Sub(a, b)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(a: Expr, b: Expr) -> Expr {
        match (a.as_constant(), b.as_constant()) {
            (Some(x), Some(y)) => Expr::constant(x * y),
            (Some(x), _) | (_, Some(x)) if x == 0.0 => Expr::constant(0.0),
            (Some(x), _) if x == 1.0 => b,
            (_, Some(y)) if y == 1.0 => a,
            (Some(x), _) if x == -1.0 => Expr::neg(b),
            (_, Some(y)) if y == -1.0 => Expr::neg(a),
            _ => Self::wrap(Node::Mul(a, b)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(a: Expr, b: Expr) -> Expr {
        match (a.as_constant(), b.as_constant()) {
            (Some(x), Some(y)) if y != 0.0 => Expr::constant(x / y),
            (Some(x), _) if x == 0.0 => Expr::constant(0.0),
            (_, Some(y)) if y == 1.0 => a,
            _ => Self::wrap(Node::Div(a, b)),
        }
    }

    pub fn pow(a: Expr, p: f64) -> Expr {
        if p == 0.0 {
            return Expr::constant(1.0);
        }
        if p == 1.0 {
            return a;
        }
        match a.node() {
            Node::Const(c) if c.powf(p).is_finite() => Expr::constant(c.powf(p)),
            _ => Self::wrap(Node::Pow(a, p)),
        }
    }

    pub fn call(f: Func, a: Expr) -> Expr {
        Self::wrap(Node::Call(f, a))
    }

    pub fn scale(k: f64, a: Expr) -> Expr {
        Expr::mul(Expr::constant(k), a)
    }

    /// Evaluate at `t`. Any non-finite intermediate is reported with the
    /// offending subexpression.
    pub fn eval(&self, t: f64) -> Result<f64, EvalError> {
        let fail = |kind| EvalError {
            kind,
            subexpr: self.to_string(),
            t,
        };
        let v = match self.node() {
            Node::Const(c) => *c,
            Node::Var => t,
            Node::Neg(a) => -a.eval(t)?,
            Node::Add(a, b) => a.eval(t)? + b.eval(t)?,
            Node::Sub(a, b) => a.eval(t)? - b.eval(t)?,
            Node::Mul(a, b) => a.eval(t)? * b.eval(t)?,
            Node::Div(a, b) => {
                let num = a.eval(t)?;
                let den = b.eval(t)?;
                if den == 0.0 {
                    return Err(fail(DomainErrorKind::DivisionByZero));
                }
                num / den
            }
            Node::Pow(a, p) => {
                let base = a.eval(t)?;
                if base == 0.0 && *p < 0.0 {
                    return Err(fail(DomainErrorKind::DivisionByZero));
                }
                let v = if *p == 2.0 {
                    base * base
                } else {
                    base.powf(*p)
                };
                if v.is_nan() {
                    return Err(fail(DomainErrorKind::InvalidPower));
                }
                v
            }
            Node::Call(func, a) => {
                let x = a.eval(t)?;
                match func {
                    Func::Exp => x.exp(),
                    Func::Ln => {
                        if x <= 0.0 {
                            return Err(fail(DomainErrorKind::LogOfNonPositive));
                        }
                        x.ln()
                    }
                    Func::Sqrt => {
                        if x < 0.0 {
                            return Err(fail(DomainErrorKind::SqrtOfNegative));
                        }
                        x.sqrt()
                    }
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(fail(DomainErrorKind::Overflow))
        }
    }

    /// Exact symbolic derivative with respect to `t`.
    pub fn differentiate(&self) -> Expr {
        diff::derivative(self)
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self.node() {
            Node::Const(_) | Node::Var => 1,
            Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => 1 + a.size(),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

impl From<f64> for Expr {
    fn from(c: f64) -> Self {
        Expr::constant(c)
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

/// Fully parenthesised rendering that re-parses to an equivalent tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Const(c) if *c < 0.0 => write!(f, "(-{})", -c),
            Node::Const(c) => write!(f, "{c}"),
            Node::Var => f.write_str("t"),
            Node::Neg(a) => write!(f, "(-{a})"),
            Node::Add(a, b) => write!(f, "({a} + {b})"),
            Node::Sub(a, b) => write!(f, "({a} - {b})"),
            Node::Mul(a, b) => write!(f, "({a} * {b})"),
            Node::Div(a, b) => write!(f, "({a} / {b})"),
            Node::Pow(a, p) => write!(f, "({a}^{p})"),
            Node::Call(func, a) => {
                // strip one layer of parentheses the argument already carries
                let inner = a.to_string();
                if inner.starts_with('(') && balanced_outer(&inner) {
                    write!(f, "{}{}", func.name(), inner)
                } else {
                    write!(f, "{}({})", func.name(), inner)
                }
            }
        }
    }
}

fn balanced_outer(s: &str) -> bool {
    let mut depth = 0i32;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 && i != s.len() - 1 {
                    return false;
                }
            }
            _ => {}
        }
    }
    s.ends_with(')')
}
