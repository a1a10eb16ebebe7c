//! Values and expressions shared by programs and trace-formula predicates.
//!
//! Program expressions are evaluated totally: a type-mismatched operation
//! yields a designated default (`0` for arithmetic, `false` for boolean
//! operators and ordering comparisons) instead of failing. Predicates in
//! trace formulas reuse the same syntax, with identifiers standing for
//! logic variables or skolem constants instead of program variables.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

/// A runtime value: integers, strings and booleans.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Str(String),
}

impl Value {
    /// The default value of declared variables.
    pub fn default_int() -> Value {
        Value::Int(0)
    }

    /// Truthiness used by conditionals: only `true` is true.
    pub fn is_true(&self) -> bool {
        matches!(self, Value::Bool(true))
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Str(s) => write!(f, "{s:?}"),
        }
    }
}

/// Binary operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinOp {
    /// Concrete syntax of the operator.
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }

    /// Binding strength used by the parser and the pretty-printer.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Ne => 3,
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 4,
            BinOp::Add | BinOp::Sub => 5,
            BinOp::Mul => 6,
        }
    }

    /// Whether the operator is arithmetic.
    pub fn is_arith(self) -> bool {
        matches!(self, BinOp::Add | BinOp::Sub | BinOp::Mul)
    }
}

/// Expressions over named identifiers.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Lit(Value),
    Var(String),
    Not(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn int(i: i64) -> Expr {
        Expr::Lit(Value::Int(i))
    }

    pub fn str(s: &str) -> Expr {
        Expr::Lit(Value::Str(s.to_string()))
    }

    pub fn bool(b: bool) -> Expr {
        Expr::Lit(Value::Bool(b))
    }

    pub fn var(x: &str) -> Expr {
        Expr::Var(x.to_string())
    }

    pub fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Bin(op, Box::new(a), Box::new(b))
    }

    pub fn not(e: Expr) -> Expr {
        Expr::Not(Box::new(e))
    }

    /// Evaluates the expression; `lookup` resolves identifiers and returns
    /// `None` for unbound ones, which aborts evaluation with the name.
    pub fn eval<F>(&self, lookup: &F) -> Result<Value, String>
    where
        F: Fn(&str) -> Option<Value>,
    {
        Ok(match self {
            Expr::Lit(v) => v.clone(),
            Expr::Var(x) => lookup(x).ok_or_else(|| x.clone())?,
            Expr::Not(e) => Value::Bool(!e.eval(lookup)?.is_true()),
            Expr::Bin(op, a, b) => apply(*op, &a.eval(lookup)?, &b.eval(lookup)?),
        })
    }

    /// Identifiers occurring in the expression.
    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Lit(_) => {}
            Expr::Var(x) => {
                out.insert(x.clone());
            }
            Expr::Not(e) => e.collect_vars(out),
            Expr::Bin(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Literals occurring in the expression.
    pub fn literals(&self, out: &mut BTreeSet<Value>) {
        match self {
            Expr::Lit(v) => {
                out.insert(v.clone());
            }
            Expr::Var(_) => {}
            Expr::Not(e) => e.literals(out),
            Expr::Bin(_, a, b) => {
                a.literals(out);
                b.literals(out);
            }
        }
    }

    /// Whether an arithmetic operator is applied to a subterm mentioning an
    /// identifier (such predicates defeat finite sampling).
    pub fn has_var_arith(&self) -> bool {
        match self {
            Expr::Lit(_) | Expr::Var(_) => false,
            Expr::Not(e) => e.has_var_arith(),
            Expr::Bin(op, a, b) => {
                (op.is_arith() && (!a.vars().is_empty() || !b.vars().is_empty()))
                    || a.has_var_arith()
                    || b.has_var_arith()
            }
        }
    }

    /// Simultaneous substitution of identifiers by expressions.
    pub fn subst(&self, map: &dyn Fn(&str) -> Option<Expr>) -> Expr {
        match self {
            Expr::Lit(_) => self.clone(),
            Expr::Var(x) => map(x).unwrap_or_else(|| self.clone()),
            Expr::Not(e) => Expr::not(e.subst(map)),
            Expr::Bin(op, a, b) => Expr::bin(*op, a.subst(map), b.subst(map)),
        }
    }

    /// Constant folding; returns the literal if the expression is closed.
    pub fn fold(&self) -> Expr {
        match self {
            Expr::Lit(_) | Expr::Var(_) => self.clone(),
            Expr::Not(e) => match e.fold() {
                Expr::Lit(v) => Expr::Lit(Value::Bool(!v.is_true())),
                e => Expr::not(e),
            },
            Expr::Bin(op, a, b) => match (a.fold(), b.fold()) {
                (Expr::Lit(x), Expr::Lit(y)) => Expr::Lit(apply(*op, &x, &y)),
                (a, b) => Expr::bin(*op, a, b),
            },
        }
    }
}

/// Total semantics of binary operators.
pub fn apply(op: BinOp, a: &Value, b: &Value) -> Value {
    use Value::*;
    match op {
        BinOp::Add | BinOp::Sub | BinOp::Mul => match (a, b) {
            (Int(x), Int(y)) => Int(match op {
                BinOp::Add => x.wrapping_add(*y),
                BinOp::Sub => x.wrapping_sub(*y),
                _ => x.wrapping_mul(*y),
            }),
            _ => Int(0),
        },
        BinOp::Eq => Bool(a == b),
        BinOp::Ne => Bool(a != b),
        BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
            let ord = match (a, b) {
                (Int(x), Int(y)) => x.cmp(y),
                (Str(x), Str(y)) => x.cmp(y),
                _ => return Bool(false),
            };
            Bool(match op {
                BinOp::Lt => ord.is_lt(),
                BinOp::Le => ord.is_le(),
                BinOp::Gt => ord.is_gt(),
                _ => ord.is_ge(),
            })
        }
        BinOp::And => Bool(a.is_true() && b.is_true()),
        BinOp::Or => Bool(a.is_true() || b.is_true()),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_expr(self, 0, f)
    }
}

fn fmt_expr(e: &Expr, ctx: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e {
        Expr::Lit(v) => write!(f, "{v}"),
        Expr::Var(x) => write!(f, "{x}"),
        Expr::Not(e) => {
            write!(f, "!")?;
            fmt_expr(e, 7, f)
        }
        Expr::Bin(op, a, b) => {
            let p = op.precedence();
            if p < ctx {
                write!(f, "(")?;
            }
            fmt_expr(a, p, f)?;
            write!(f, " {} ", op.symbol())?;
            // Left associative: the right operand needs strictly higher binding.
            fmt_expr(b, p + 1, f)?;
            if p < ctx {
                write!(f, ")")?;
            }
            Ok(())
        }
    }
}
