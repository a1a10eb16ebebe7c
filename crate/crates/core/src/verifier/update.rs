//! Trace updates: symbolic records of the state changes and events of a
//! procedure, their concrete evaluation and their schedule.

use super::VerifyError;
use crate::expr::Expr;
use crate::frontend::Program;
use crate::interp::{run_procedure, InterpError, Limits};
use crate::trace::{event_triple, Event, FileOp, Item, Scope, Trace};
use serde::Serialize;
use std::collections::BTreeSet;
use std::fmt;

/// The identifier of the scope of the procedure under verification.
pub const OID: u64 = 0;

/// Identifiers generated while evaluating `run(m,i,_)` start above
/// `i * RUN_ID_STRIDE`, so that they depend only on `i`.
pub const RUN_ID_STRIDE: u64 = 1000;

/// Whether a procedure run stems from a synchronous call or from scheduling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum RunMode {
    Sync,
    Async,
}

/// One elementary update.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Elem {
    /// An unknown prefix `𝒱`, constrained only by the antecedent.
    Havoc(String),
    Assign(String, Expr),
    Invoc(String, u64),
    /// `call ** push`.
    Start(String, u64),
    Ret(u64),
    Pop(String, u64),
    File(FileOp, Expr),
    /// The complete execution of a procedure in a new scope.
    Run { name: String, id: u64, mode: RunMode },
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elem::Havoc(v) => write!(f, "{v}"),
            Elem::Assign(x, e) => write!(f, "{{{x} := {e}}}"),
            Elem::Invoc(m, i) => write!(f, "{{invoc({m},{i})}}"),
            Elem::Start(m, i) => write!(f, "{{start({m},{i})}}"),
            Elem::Ret(i) => write!(f, "{{ret({i})}}"),
            Elem::Pop(m, i) => write!(f, "{{pop({m},{i})}}"),
            Elem::File(op, e) => write!(f, "{{{}({e})}}", op.keyword()),
            Elem::Run { name, id, mode } => {
                write!(f, "{{run({name},{id},{})}}", if *mode == RunMode::Sync { "sy" } else { "as" })
            }
        }
    }
}

/// A sequence of elementary updates, applied left to right.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Update(pub Vec<Elem>);

impl Update {
    pub fn new() -> Update {
        Update::default()
    }

    pub fn with(&self, e: Elem) -> Update {
        let mut u = self.clone();
        u.0.push(e);
        u
    }

    pub fn concat(&self, other: &Update) -> Update {
        Update(self.0.iter().chain(other.0.iter()).cloned().collect())
    }

    pub fn elems(&self) -> &[Elem] {
        &self.0
    }

    pub fn has_havoc(&self) -> bool {
        self.0.iter().any(|e| matches!(e, Elem::Havoc(_)))
    }
}

impl fmt::Display for Update {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "{{}}");
        }
        self.0.iter().try_for_each(|e| write!(f, "{e}"))
    }
}

/// `schedule(U)`: the invocations `(m,i)` such that
/// `U = U1 {invoc(m,i)} U2 {ret(oId)} U3` with no `run(m,i,as)` in `U3`.
pub fn schedule_update(u: &Update) -> BTreeSet<Scope> {
    let Some(ret) = u.0.iter().rposition(|e| *e == Elem::Ret(OID)) else {
        return BTreeSet::new();
    };
    let tail = &u.0[ret + 1..];
    u.0[..ret]
        .iter()
        .filter_map(|e| match e {
            Elem::Invoc(m, i) => Some((m.clone(), *i)),
            _ => None,
        })
        .filter(|(m, i)| {
            !tail.iter().any(|e| matches!(e, Elem::Run { name, id, mode: RunMode::Async } if name == m && id == i))
        })
        .collect()
}

/// `⟦U⟧_τ`: the suffixes produced by applying `U` to the trace `τ`. Runs
/// execute the procedure bodies with the global semantics.
pub fn eval_update(u: &Update, t: &Trace, program: &Program, limits: &Limits) -> Result<Vec<Trace>, VerifyError> {
    if u.has_havoc() {
        return Err(VerifyError::HavocPresent);
    }
    let mut current = vec![t.clone()];
    for e in &u.0 {
        let mut next = Vec::new();
        for tr in current {
            let s = tr.last_state().ok_or(VerifyError::Interp(InterpError::MalformedConfiguration("empty trace".into())))?.clone();
            let triple = |ev: Event| event_triple(&s, ev);
            let glue = |mut base: Trace, ext: &Trace| -> Result<Trace, VerifyError> {
                base.chop_in_place(ext).map_err(InterpError::from)?;
                Ok(base)
            };
            match e {
                Elem::Havoc(_) => unreachable!("rejected above"),
                Elem::Assign(x, ex) => {
                    let mut tr = tr;
                    tr.0.push(Item::State(s.update(x, s.eval(ex))));
                    next.push(tr);
                }
                Elem::Invoc(m, i) => next.push(glue(tr, &triple(Event::invoc(m, *i)))?),
                Elem::Start(m, i) => {
                    let tr = glue(tr, &triple(Event::call(m, *i)))?;
                    next.push(glue(tr, &triple(Event::push(m, *i)))?);
                }
                Elem::Ret(i) => next.push(glue(tr, &triple(Event::ret(*i)))?),
                Elem::Pop(m, i) => next.push(glue(tr, &triple(Event::pop(m, *i)))?),
                Elem::File(op, ex) => next.push(glue(tr, &triple(Event::File { op: *op, file: s.eval(ex) }))?),
                Elem::Run { name, id, mode } => {
                    let floor = id.saturating_mul(RUN_ID_STRIDE);
                    for suffix in run_procedure(&tr, name, *id, *mode == RunMode::Sync, floor, program, limits)? {
                        next.push(glue(tr.clone(), &suffix)?);
                    }
                }
            }
        }
        if next.len() > limits.max_traces {
            return Err(VerifyError::Interp(InterpError::TooManyTraces(limits.max_traces)));
        }
        current = next;
    }
    Ok(current.into_iter().map(|full| Trace(full.0[t.len() - 1..].to_vec())).collect())
}
