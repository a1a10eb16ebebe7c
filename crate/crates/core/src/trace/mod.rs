//! States, events and finite traces.
//!
//! A trace is a flat sequence of items, each either a state or an event.
//! Traces produced by the interpreter begin and end with a state and every
//! event is flanked by two equal states (an *event triple*). The semantic
//! chop glues two traces that agree on the shared boundary state.

mod json;
mod schematic;
mod scope;

pub use json::{trace_from_json, trace_to_json, JsonError};
pub use schematic::{matches_schematic, EventShape, Segment};
pub use scope::{call_tree, curr_scope, max_call_id, schedule, CallTree, SchedulePolicy};

use crate::expr::Value;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

/// A call scope: procedure name and call identifier.
pub type Scope = (String, u64);

/// Errors raised by trace operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("chop undefined: boundary states differ or operand is not state-delimited")]
    ChopMismatch,
    #[error("no current call scope: the trace has no unmatched push")]
    NoScope,
    #[error("malformed trace: {0}")]
    MalformedTrace(String),
}

/// A program state: a partial map from variable names to values.
///
/// Equality is extensional on the bound variables.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct State(Arc<BTreeMap<String, Value>>);

impl State {
    pub fn new() -> State {
        State::default()
    }

    /// Builds a state from bindings.
    pub fn from_pairs<I, K>(pairs: I) -> State
    where
        I: IntoIterator<Item = (K, Value)>,
        K: Into<String>,
    {
        State(Arc::new(pairs.into_iter().map(|(k, v)| (k.into(), v)).collect()))
    }

    /// The value of `x`, if bound.
    pub fn get(&self, x: &str) -> Option<&Value> {
        self.0.get(x)
    }

    /// `σ[x ↦ v]`: all other bindings are untouched.
    pub fn update(&self, x: &str, v: Value) -> State {
        let mut m = (*self.0).clone();
        m.insert(x.to_string(), v);
        State(Arc::new(m))
    }

    /// Iterates over the bindings in name order.
    pub fn bindings(&self) -> impl Iterator<Item = (&String, &Value)> {
        self.0.iter()
    }

    /// Evaluates a program expression; unbound variables read as `0`.
    pub fn eval(&self, e: &crate::expr::Expr) -> Value {
        e.eval(&|x| Some(self.get(x).cloned().unwrap_or_else(Value::default_int)))
            .expect("program evaluation is total")
    }
}

impl fmt::Debug for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{k}↦{v}")?;
        }
        write!(f, "}}")
    }
}

/// The four file operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FileOp {
    Open,
    Close,
    Read,
    Write,
}

impl FileOp {
    pub const ALL: [FileOp; 4] = [FileOp::Open, FileOp::Close, FileOp::Read, FileOp::Write];

    pub fn keyword(self) -> &'static str {
        match self {
            FileOp::Open => "open",
            FileOp::Close => "close",
            FileOp::Read => "read",
            FileOp::Write => "write",
        }
    }

    pub fn from_keyword(s: &str) -> Option<FileOp> {
        FileOp::ALL.into_iter().find(|op| op.keyword() == s)
    }
}

/// Event markers.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Event {
    Call { name: String, id: u64 },
    Invoc { name: String, id: u64 },
    Ret { id: u64 },
    Push { name: String, id: u64 },
    Pop { name: String, id: u64 },
    File { op: FileOp, file: Value },
}

impl Event {
    pub fn call(name: &str, id: u64) -> Event {
        Event::Call { name: name.to_string(), id }
    }
    pub fn invoc(name: &str, id: u64) -> Event {
        Event::Invoc { name: name.to_string(), id }
    }
    pub fn ret(id: u64) -> Event {
        Event::Ret { id }
    }
    pub fn push(name: &str, id: u64) -> Event {
        Event::Push { name: name.to_string(), id }
    }
    pub fn pop(name: &str, id: u64) -> Event {
        Event::Pop { name: name.to_string(), id }
    }
    pub fn file(op: FileOp, file: &str) -> Event {
        Event::File { op, file: Value::Str(file.to_string()) }
    }

    /// The tag name used in JSON and in rendered traces.
    pub fn tag(&self) -> &'static str {
        match self {
            Event::Call { .. } => "call",
            Event::Invoc { .. } => "invoc",
            Event::Ret { .. } => "ret",
            Event::Push { .. } => "push",
            Event::Pop { .. } => "pop",
            Event::File { op, .. } => op.keyword(),
        }
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::Call { name, id }
            | Event::Invoc { name, id }
            | Event::Push { name, id }
            | Event::Pop { name, id } => write!(f, "{}({name},{id})", self.tag()),
            Event::Ret { id } => write!(f, "ret({id})"),
            Event::File { op, file } => write!(f, "{}({file})", op.keyword()),
        }
    }
}

/// A trace item.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Item {
    State(State),
    Event(Event),
}

impl Item {
    pub fn as_state(&self) -> Option<&State> {
        match self {
            Item::State(s) => Some(s),
            Item::Event(_) => None,
        }
    }

    pub fn as_event(&self) -> Option<&Event> {
        match self {
            Item::Event(e) => Some(e),
            Item::State(_) => None,
        }
    }
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Item::State(s) => write!(f, "{s}"),
            Item::Event(e) => write!(f, "{e}"),
        }
    }
}

/// A finite trace.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Trace(pub Vec<Item>);

impl Trace {
    pub fn empty() -> Trace {
        Trace(Vec::new())
    }

    /// The singleton trace `⟨σ⟩`.
    pub fn singleton(s: State) -> Trace {
        Trace(vec![Item::State(s)])
    }

    /// `⟨σ⟩ ↷ σ'`: a state-update step.
    pub fn step(from: State, to: State) -> Trace {
        Trace(vec![Item::State(from), Item::State(to)])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn items(&self) -> &[Item] {
        &self.0
    }

    /// The first item, if it is a state.
    pub fn first_state(&self) -> Option<&State> {
        self.0.first().and_then(Item::as_state)
    }

    /// `last(τ)`: the final item, if it is a state.
    pub fn last_state(&self) -> Option<&State> {
        self.0.last().and_then(Item::as_state)
    }

    /// Iterates over the events with their item positions.
    pub fn events(&self) -> impl Iterator<Item = (usize, &Event)> {
        self.0.iter().enumerate().filter_map(|(i, it)| it.as_event().map(|e| (i, e)))
    }

    /// The prefix of the first `n` items.
    pub fn prefix(&self, n: usize) -> Trace {
        Trace(self.0[..n.min(self.0.len())].to_vec())
    }

    /// The semantic chop `self ** other`.
    pub fn chop(&self, other: &Trace) -> Result<Trace, TraceError> {
        chop(self, other)
    }

    /// In-place chop, used on hot interpreter paths.
    pub fn chop_in_place(&mut self, other: &Trace) -> Result<(), TraceError> {
        match (self.0.last(), other.0.first()) {
            (Some(Item::State(a)), Some(Item::State(b))) if a == b => {
                self.0.extend_from_slice(&other.0[1..]);
                Ok(())
            }
            _ => Err(TraceError::ChopMismatch),
        }
    }

    /// Whether every event is flanked by two equal states and the trace
    /// begins and ends with a state.
    pub fn is_well_formed(&self) -> bool {
        let it = &self.0;
        if it.is_empty() {
            return true;
        }
        if it[0].as_state().is_none() || it[it.len() - 1].as_state().is_none() {
            return false;
        }
        (0..it.len()).all(|k| match &it[k] {
            Item::State(_) => true,
            Item::Event(_) => match (&it[k - 1], &it[k + 1]) {
                (Item::State(a), Item::State(b)) => a == b,
                _ => false,
            },
        })
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, it) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{it}")?;
        }
        write!(f, "]")
    }
}

/// `τ1 ** τ2`: defined when `τ1` ends with the state that begins `τ2`; the
/// shared state appears once.
pub fn chop(t1: &Trace, t2: &Trace) -> Result<Trace, TraceError> {
    let mut out = t1.clone();
    out.chop_in_place(t2)?;
    Ok(out)
}

/// The event triple `⟨σ⟩ · ev · σ`.
pub fn event_triple(s: &State, ev: Event) -> Trace {
    Trace(vec![Item::State(s.clone()), Item::Event(ev), Item::State(s.clone())])
}
