//! Trace semantics, a fixed-point trace logic, context-aware trace
//! contracts and a modular sequent-calculus verifier for Async, a small
//! imperative language with synchronous and asynchronous procedure calls.
//!
//! * [`frontend`] parses programs and contracts;
//! * [`trace`] holds states, events, traces, call scopes and schedules;
//! * [`interp`] is the two-layer operational semantics;
//! * [`logic`] decides membership and inclusion for trace formulas;
//! * [`contracts`] is the brute-force adherence oracle;
//! * [`verifier`] builds proof trees in the sequent calculus and decides
//!   contract subtyping.

pub mod contracts;
pub mod expr;
pub mod frontend;
pub mod interp;
pub mod logic;
pub mod trace;
pub mod verifier;
