//! The trace logic: formulas, membership, inclusion and skolemization.

mod ast;
mod included;
mod member;

pub use ast::{EvPat, Formula, NameP, Term};
pub use included::{included, included_under, witnesses, Verdict};
pub use member::{member, noev_equiv_mu, Binding, ObsEnv};

use crate::expr::Expr;
use std::collections::BTreeMap;
use thiserror::Error;

/// Errors evaluating formulas.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error("unbound logic variable {0}")]
    UnboundLogicVar(String),
    #[error("logic variable {logic_var} observes {program_var}, which is unbound in the observed state")]
    UnboundProgramVar { logic_var: String, program_var: String },
    #[error("unbound recursion variable {0}")]
    UnboundRecVar(String),
    #[error("constant {0} is not fresh")]
    NonFreshConstant(String),
    #[error("{0} binders but {1} constants")]
    ArityMismatch(usize, usize),
}

impl Formula {
    /// Substitutes free occurrences of logic variables (observation binders
    /// shadow). Recursion variables are untouched.
    pub fn subst_free(&self, map: &BTreeMap<String, Expr>) -> Formula {
        let lookup = |x: &str| map.get(x).cloned();
        match self {
            Formula::Pred(e) => Formula::Pred(e.subst(&lookup).fold()),
            Formula::Var(_) => self.clone(),
            Formula::Ev(p) => Formula::Ev(p.subst(&lookup)),
            Formula::NoEv(ps) => Formula::NoEv(ps.iter().map(|p| p.subst(&lookup)).collect()),
            Formula::And(a, b) => Formula::and(a.subst_free(map), b.subst_free(map)),
            Formula::Or(a, b) => Formula::or(a.subst_free(map), b.subst_free(map)),
            Formula::Concat(a, b) => Formula::concat(a.subst_free(map), b.subst_free(map)),
            Formula::Chop(a, b) => Formula::chop(a.subst_free(map), b.subst_free(map)),
            Formula::Mu(x, b) => Formula::mu(x, b.subst_free(map)),
            Formula::Obs { x, y, body } => {
                let mut inner = map.clone();
                inner.remove(y);
                Formula::obs(x, y, body.subst_free(&inner))
            }
        }
    }

    /// Every identifier occurring in predicates and terms, bound or free.
    pub fn all_idents(&self) -> std::collections::BTreeSet<String> {
        let mut out: std::collections::BTreeSet<String> = self.exprs().iter().flat_map(|e| e.vars()).collect();
        fn binders(f: &Formula, out: &mut std::collections::BTreeSet<String>) {
            match f {
                Formula::Obs { y, body, .. } => {
                    out.insert(y.clone());
                    binders(body, out);
                }
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Concat(a, b) | Formula::Chop(a, b) => {
                    binders(a, out);
                    binders(b, out);
                }
                Formula::Mu(_, b) => binders(b, out),
                _ => {}
            }
        }
        binders(self, &mut out);
        out
    }
}

/// `Φ[ȳ \ c̄]`: replaces the logic variables `ys` by constant symbols `cs`,
/// which must not occur in `f`.
pub fn skolemize(f: &Formula, ys: &[String], cs: &[String]) -> Result<Formula, LogicError> {
    if ys.len() != cs.len() {
        return Err(LogicError::ArityMismatch(ys.len(), cs.len()));
    }
    let used = f.all_idents();
    if let Some(c) = cs.iter().find(|c| used.contains(*c)) {
        return Err(LogicError::NonFreshConstant(c.clone()));
    }
    let map: BTreeMap<String, Expr> = ys.iter().cloned().zip(cs.iter().map(|c| Expr::var(c))).collect();
    Ok(f.subst_free(&map))
}
