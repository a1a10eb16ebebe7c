//! Trace formulas.

use crate::expr::{Expr, Value};
use crate::trace::{Event, FileOp};
use std::collections::BTreeSet;
use std::fmt;

/// A procedure-name position in an event pattern.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NameP {
    Any,
    Is(String),
}

/// A value position in an event pattern: a wildcard or an expression over
/// logic variables, constants and literals.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Any,
    Is(Expr),
}

impl Term {
    pub fn int(i: i64) -> Term {
        Term::Is(Expr::int(i))
    }

    pub fn var(x: &str) -> Term {
        Term::Is(Expr::var(x))
    }
}

/// Event patterns.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EvPat {
    /// Start of a scope: `call ** push` for synchronous calls, the push
    /// alone for scheduled invocations.
    Start(NameP, Term),
    Call(NameP, Term),
    Invoc(NameP, Term),
    Push(NameP, Term),
    Pop(NameP, Term),
    Ret(Term),
    File(FileOp, Term),
}

impl EvPat {
    pub fn start(m: &str, i: Term) -> EvPat {
        EvPat::Start(NameP::Is(m.to_string()), i)
    }

    pub fn pop(m: &str, i: Term) -> EvPat {
        EvPat::Pop(NameP::Is(m.to_string()), i)
    }

    pub fn file(op: FileOp, t: Term) -> EvPat {
        EvPat::File(op, t)
    }

    /// Terms of the pattern.
    pub fn terms(&self) -> Vec<&Term> {
        match self {
            EvPat::Start(_, t)
            | EvPat::Call(_, t)
            | EvPat::Invoc(_, t)
            | EvPat::Push(_, t)
            | EvPat::Pop(_, t)
            | EvPat::Ret(t)
            | EvPat::File(_, t) => vec![t],
        }
    }

    fn map_terms(&self, f: &dyn Fn(&Term) -> Term) -> EvPat {
        match self {
            EvPat::Start(n, t) => EvPat::Start(n.clone(), f(t)),
            EvPat::Call(n, t) => EvPat::Call(n.clone(), f(t)),
            EvPat::Invoc(n, t) => EvPat::Invoc(n.clone(), f(t)),
            EvPat::Push(n, t) => EvPat::Push(n.clone(), f(t)),
            EvPat::Pop(n, t) => EvPat::Pop(n.clone(), f(t)),
            EvPat::Ret(t) => EvPat::Ret(f(t)),
            EvPat::File(op, t) => EvPat::File(*op, f(t)),
        }
    }

    /// Substitutes identifiers inside the pattern's terms.
    pub fn subst(&self, map: &dyn Fn(&str) -> Option<Expr>) -> EvPat {
        self.map_terms(&|t| match t {
            Term::Any => Term::Any,
            Term::Is(e) => Term::Is(e.subst(map).fold()),
        })
    }

    /// Whether a concrete event matches this pattern. A start pattern
    /// matches the push of the scope (its call, if any, is handled by the
    /// interval semantics). `eval` resolves terms to values.
    pub fn matches_event(&self, ev: &Event, eval: &dyn Fn(&Expr) -> Result<Value, String>) -> Result<bool, String> {
        let name_ok = |p: &NameP, n: &str| match p {
            NameP::Any => true,
            NameP::Is(m) => m == n,
        };
        let term_ok = |t: &Term, v: &Value| -> Result<bool, String> {
            match t {
                Term::Any => Ok(true),
                Term::Is(e) => Ok(&eval(e)? == v),
            }
        };
        let id = |i: u64| Value::Int(i as i64);
        Ok(match (self, ev) {
            (EvPat::Start(p, t), Event::Push { name, id: i })
            | (EvPat::Call(p, t), Event::Call { name, id: i })
            | (EvPat::Invoc(p, t), Event::Invoc { name, id: i })
            | (EvPat::Push(p, t), Event::Push { name, id: i })
            | (EvPat::Pop(p, t), Event::Pop { name, id: i }) => name_ok(p, name) && term_ok(t, &id(*i))?,
            (EvPat::Ret(t), Event::Ret { id: i }) => term_ok(t, &id(*i))?,
            (EvPat::File(op, t), Event::File { op: o, file }) => op == o && term_ok(t, file)?,
            _ => false,
        })
    }

    /// For exclusion lists: whether the event is excluded. A start pattern
    /// excludes both the call and the push of the scope.
    pub fn excludes(&self, ev: &Event, eval: &dyn Fn(&Expr) -> Result<Value, String>) -> Result<bool, String> {
        if let (EvPat::Start(p, t), Event::Call { .. }) = (self, ev) {
            return EvPat::Call(p.clone(), t.clone()).matches_event(ev, eval);
        }
        self.matches_event(ev, eval)
    }
}

/// Trace formulas.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    /// `⟨P⟩`: singleton traces, provided the predicate holds.
    Pred(Expr),
    /// A recursion variable.
    Var(String),
    /// An event triple (or the start shape).
    Ev(EvPat),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    /// Plain concatenation `Φ1 · Φ2`.
    Concat(Box<Formula>, Box<Formula>),
    /// Chop `Φ1 ** Φ2`, sharing one state.
    Chop(Box<Formula>, Box<Formula>),
    /// Least fixed point `μX.Φ`.
    Mu(String, Box<Formula>),
    /// Observation `℧ x as y. Φ`: binds logic variable `y` to the value of
    /// program variable `x` in the first state.
    Obs { x: String, y: String, body: Box<Formula> },
    /// `⌐[ēv]`: non-empty traces without the listed events; `⌐` when the
    /// list is empty.
    NoEv(Vec<EvPat>),
}

impl Formula {
    /// `⌐`.
    pub fn top() -> Formula {
        Formula::NoEv(Vec::new())
    }

    pub fn tt() -> Formula {
        Formula::Pred(Expr::bool(true))
    }

    pub fn ff() -> Formula {
        Formula::Pred(Expr::bool(false))
    }

    pub fn ev(p: EvPat) -> Formula {
        Formula::Ev(p)
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn concat(a: Formula, b: Formula) -> Formula {
        Formula::Concat(Box::new(a), Box::new(b))
    }

    pub fn chop(a: Formula, b: Formula) -> Formula {
        Formula::Chop(Box::new(a), Box::new(b))
    }

    /// Right-nested chop of a non-empty list.
    pub fn chop_all(parts: Vec<Formula>) -> Formula {
        let mut it = parts.into_iter().rev();
        let last = it.next().expect("chop_all of an empty list");
        it.fold(last, |acc, f| Formula::chop(f, acc))
    }

    pub fn mu(x: &str, body: Formula) -> Formula {
        Formula::Mu(x.to_string(), Box::new(body))
    }

    pub fn obs(x: &str, y: &str, body: Formula) -> Formula {
        Formula::Obs { x: x.to_string(), y: y.to_string(), body: Box::new(body) }
    }

    /// `⌐` modulo the unit law `⌐ ⟺ ⌐ ** ⟨true⟩`.
    pub fn is_top(&self) -> bool {
        match self.normalize() {
            Formula::NoEv(v) => v.is_empty(),
            _ => false,
        }
    }

    /// Unit laws: `⟨true⟩` is a unit for chop on both sides.
    pub fn normalize(&self) -> Formula {
        match self {
            Formula::Chop(a, b) => {
                let (a, b) = (a.normalize(), b.normalize());
                if a == Formula::tt() {
                    b
                } else if b == Formula::tt() {
                    a
                } else {
                    Formula::chop(a, b)
                }
            }
            Formula::And(a, b) => Formula::and(a.normalize(), b.normalize()),
            Formula::Or(a, b) => Formula::or(a.normalize(), b.normalize()),
            Formula::Concat(a, b) => Formula::concat(a.normalize(), b.normalize()),
            Formula::Mu(x, b) => Formula::mu(x, b.normalize()),
            Formula::Obs { x, y, body } => Formula::obs(x, y, body.normalize()),
            _ => self.clone(),
        }
    }

    /// Free logic variables (identifiers in predicates and terms not bound
    /// by an enclosing observation).
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let mut add = |e: &Expr, bound: &Vec<String>| {
            for v in e.vars() {
                if !bound.contains(&v) {
                    out.insert(v);
                }
            }
        };
        match self {
            Formula::Pred(e) => add(e, bound),
            Formula::Var(_) => {}
            Formula::Ev(p) => p.terms().into_iter().for_each(|t| {
                if let Term::Is(e) = t {
                    add(e, bound)
                }
            }),
            Formula::NoEv(ps) => ps.iter().flat_map(|p| p.terms()).for_each(|t| {
                if let Term::Is(e) = t {
                    add(e, bound)
                }
            }),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Concat(a, b) | Formula::Chop(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Mu(_, b) => b.collect_free(bound, out),
            Formula::Obs { y, body, .. } => {
                bound.push(y.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Whether the recursion variable `x` occurs free.
    pub fn mentions_rec_var(&self, x: &str) -> bool {
        match self {
            Formula::Var(v) => v == x,
            Formula::Pred(_) | Formula::Ev(_) | Formula::NoEv(_) => false,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Concat(a, b) | Formula::Chop(a, b) => {
                a.mentions_rec_var(x) || b.mentions_rec_var(x)
            }
            Formula::Mu(y, b) => y != x && b.mentions_rec_var(x),
            Formula::Obs { body, .. } => body.mentions_rec_var(x),
        }
    }

    /// Free recursion variables.
    pub fn free_rec_vars(&self) -> BTreeSet<String> {
        fn go(f: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            match f {
                Formula::Var(v) if !bound.contains(v) => {
                    out.insert(v.clone());
                }
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Concat(a, b) | Formula::Chop(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                Formula::Mu(x, b) => {
                    bound.push(x.clone());
                    go(b, bound, out);
                    bound.pop();
                }
                Formula::Obs { body, .. } => go(body, bound, out),
                _ => {}
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Whether a recursion variable occurs inside an observation (forbidden).
    pub fn rec_var_under_obs(&self) -> bool {
        match self {
            Formula::Obs { body, .. } => body.has_rec_var() || body.rec_var_under_obs(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Concat(a, b) | Formula::Chop(a, b) => {
                a.rec_var_under_obs() || b.rec_var_under_obs()
            }
            Formula::Mu(_, b) => b.rec_var_under_obs(),
            _ => false,
        }
    }

    fn has_rec_var(&self) -> bool {
        match self {
            Formula::Var(_) => true,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Concat(a, b) | Formula::Chop(a, b) => {
                a.has_rec_var() || b.has_rec_var()
            }
            Formula::Mu(_, b) => b.has_rec_var(),
            Formula::Obs { body, .. } => body.has_rec_var(),
            _ => false,
        }
    }

    /// Whether the formula contains an observation quantifier.
    pub fn has_obs(&self) -> bool {
        match self {
            Formula::Obs { .. } => true,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Concat(a, b) | Formula::Chop(a, b) => {
                a.has_obs() || b.has_obs()
            }
            Formula::Mu(_, b) => b.has_obs(),
            _ => false,
        }
    }

    /// All predicates and terms, for sampling.
    pub fn exprs(&self) -> Vec<&Expr> {
        let mut out = Vec::new();
        self.collect_exprs(&mut out);
        out
    }

    fn collect_exprs<'a>(&'a self, out: &mut Vec<&'a Expr>) {
        let pat = |p: &'a EvPat, out: &mut Vec<&'a Expr>| {
            for t in p.terms() {
                if let Term::Is(e) = t {
                    out.push(e);
                }
            }
        };
        match self {
            Formula::Pred(e) => out.push(e),
            Formula::Var(_) => {}
            Formula::Ev(p) => pat(p, out),
            Formula::NoEv(ps) => ps.iter().for_each(|p| pat(p, out)),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Concat(a, b) | Formula::Chop(a, b) => {
                a.collect_exprs(out);
                b.collect_exprs(out);
            }
            Formula::Mu(_, b) => b.collect_exprs(out),
            Formula::Obs { body, .. } => body.collect_exprs(out),
        }
    }

    /// All event patterns (including exclusions).
    pub fn patterns(&self) -> Vec<&EvPat> {
        let mut out = Vec::new();
        self.collect_patterns(&mut out);
        out
    }

    fn collect_patterns<'a>(&'a self, out: &mut Vec<&'a EvPat>) {
        match self {
            Formula::Ev(p) => out.push(p),
            Formula::NoEv(ps) => out.extend(ps.iter()),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Concat(a, b) | Formula::Chop(a, b) => {
                a.collect_patterns(out);
                b.collect_patterns(out);
            }
            Formula::Mu(_, b) => b.collect_patterns(out),
            Formula::Obs { body, .. } => body.collect_patterns(out),
            Formula::Pred(_) | Formula::Var(_) => {}
        }
    }

    /// Observed program variables.
    pub fn observed_vars(&self) -> BTreeSet<String> {
        match self {
            Formula::Obs { x, body, .. } => {
                let mut s = body.observed_vars();
                s.insert(x.clone());
                s
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Concat(a, b) | Formula::Chop(a, b) => {
                let mut s = a.observed_vars();
                s.extend(b.observed_vars());
                s
            }
            Formula::Mu(_, b) => b.observed_vars(),
            _ => BTreeSet::new(),
        }
    }

    /// Flattens a top-level chop chain.
    pub fn chop_chain(&self) -> Vec<Formula> {
        match self {
            Formula::Chop(a, b) => {
                let mut v = a.chop_chain();
                v.extend(b.chop_chain());
                v
            }
            _ => vec![self.clone()],
        }
    }
}

impl fmt::Display for NameP {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NameP::Any => write!(f, "_"),
            NameP::Is(n) => write!(f, "{n}"),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Any => write!(f, "_"),
            Term::Is(e) => write!(f, "{e}"),
        }
    }
}

impl fmt::Display for EvPat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvPat::Start(n, t) => write!(f, "start({n},{t})"),
            EvPat::Call(n, t) => write!(f, "call({n},{t})"),
            EvPat::Invoc(n, t) => write!(f, "invoc({n},{t})"),
            EvPat::Push(n, t) => write!(f, "push({n},{t})"),
            EvPat::Pop(n, t) => write!(f, "pop({n},{t})"),
            EvPat::Ret(t) => write!(f, "ret({t})"),
            EvPat::File(op, t) => write!(f, "{}({t})", op.keyword()),
        }
    }
}

impl Formula {
    fn prec(&self) -> u8 {
        match self {
            Formula::Mu(..) | Formula::Obs { .. } => 0,
            Formula::Or(..) => 1,
            Formula::And(..) => 2,
            Formula::Concat(..) | Formula::Chop(..) => 3,
            _ => 4,
        }
    }

    fn fmt_prec(&self, ctx: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.prec();
        let paren = p < ctx;
        if paren {
            write!(f, "(")?;
        }
        match self {
            Formula::Pred(e) => write!(f, "[{e}]")?,
            Formula::Var(x) => write!(f, "{x}")?,
            Formula::Ev(p) => write!(f, "{p}")?,
            Formula::NoEv(ps) if ps.is_empty() => write!(f, "~")?,
            Formula::NoEv(ps) => {
                write!(f, "~[")?;
                for (i, p) in ps.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, "]")?;
            }
            Formula::Or(a, b) => {
                a.fmt_prec(1, f)?;
                write!(f, " \\/ ")?;
                b.fmt_prec(2, f)?;
            }
            Formula::And(a, b) => {
                a.fmt_prec(2, f)?;
                write!(f, " /\\ ")?;
                b.fmt_prec(3, f)?;
            }
            Formula::Concat(a, b) => {
                a.fmt_prec(3, f)?;
                write!(f, " . ")?;
                b.fmt_prec(4, f)?;
            }
            Formula::Chop(a, b) => {
                a.fmt_prec(3, f)?;
                write!(f, " ** ")?;
                b.fmt_prec(4, f)?;
            }
            Formula::Mu(x, b) => {
                write!(f, "mu {x} . ")?;
                b.fmt_prec(0, f)?;
            }
            Formula::Obs { x, y, body } => {
                write!(f, "obs {x} as {y} . ")?;
                body.fmt_prec(0, f)?;
            }
        }
        if paren {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(0, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_law_normalization() {
        let f = Formula::chop(Formula::top(), Formula::tt());
        assert!(f.is_top());
        assert!(!Formula::NoEv(vec![EvPat::Ret(Term::Any)]).is_top());
    }

    #[test]
    fn free_variables_respect_observation() {
        let f = Formula::obs("file", "f", Formula::ev(EvPat::file(FileOp::Open, Term::var("f"))));
        assert!(f.free_vars().is_empty());
        let g = Formula::ev(EvPat::file(FileOp::Open, Term::var("g")));
        assert_eq!(g.free_vars(), ["g".to_string()].into());
    }

    #[test]
    fn rec_var_under_observation_is_detected() {
        let f = Formula::mu("X", Formula::obs("x", "y", Formula::Var("X".into())));
        assert!(f.rec_var_under_obs());
        assert!(!Formula::mu("X", Formula::Var("X".into())).rec_var_under_obs());
    }
}
