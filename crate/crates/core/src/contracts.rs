//! Context-aware trace contracts: classification and the brute-force
//! adherence oracle over enumerated program traces.

use crate::expr::Expr;
use crate::frontend::{ContractDecl, Program, INIT};
use crate::interp::{enumerate_traces, InterpError, Limits};
use crate::logic::{member, EvPat, Formula, LogicError, ObsEnv, Term};
use crate::trace::{Event, Trace};
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

/// Errors raised by the adherence oracle.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContractError {
    #[error("no contract for procedure {0}")]
    MissingContract(String),
    #[error(transparent)]
    Interp(#[from] InterpError),
    #[error(transparent)]
    Logic(#[from] LogicError),
}

/// Syntactic classification of a contract.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    /// The pre-trace or the post-trace is non-trivial.
    pub context_aware: bool,
    /// The internal behaviour is unrestricted.
    pub state_contract: bool,
}

impl Classification {
    pub fn proper_trace(&self) -> bool {
        !self.state_contract
    }
}

/// Classifies a contract modulo the unit law `⌐ ⟺ ⌐ ** ⟨true⟩`.
pub fn classify(c: &ContractDecl) -> Classification {
    Classification {
        context_aware: !c.assume.is_top() || !c.cont.is_top(),
        state_contract: c.internal.is_top(),
    }
}

/// The contract with its post-trace replaced by `⌐`.
pub fn weak_variant(c: &ContractDecl) -> ContractDecl {
    ContractDecl { cont: Formula::top(), ..c.clone() }
}

fn wrap_obs(binders: &[(String, String)], body: Formula) -> Formula {
    binders.iter().rev().fold(body, |acc, (x, y)| Formula::obs(x, y, acc))
}

/// The trace formula a trace must satisfy to adhere to `c` for procedure `m`
/// and call identifier `i`:
/// `θ'_a ** ℧x̄1 as ȳ1.(⟨q_a⟩ ** start(m,i) ** ⟨q_a⟩ ** θ'_s ** ℧x̄2 as ȳ2.(⟨q_c⟩ ** pop(m,i) ** ⟨q_c⟩ ** θ'_c))`.
pub fn adherence_formula(c: &ContractDecl, m: &str, i: u64) -> Formula {
    let qa = Formula::Pred(c.pre.clone());
    let qc = Formula::Pred(c.post.clone());
    let tail = wrap_obs(
        &c.post_binders,
        Formula::chop_all(vec![qc.clone(), Formula::ev(EvPat::pop(m, Term::int(i as i64))), qc, c.cont.clone()]),
    );
    let middle = wrap_obs(
        &c.pre_binders,
        Formula::chop_all(vec![
            qa.clone(),
            Formula::ev(EvPat::start(m, Term::int(i as i64))),
            qa,
            c.internal.clone(),
            tail,
        ]),
    );
    Formula::chop(c.assume.clone(), middle)
}

/// The clause of a contract a trace violates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Clause {
    PreTrace,
    Internal,
    PostTrace,
    BoundaryPred,
}

impl std::fmt::Display for Clause {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Clause::PreTrace => "pre-trace",
            Clause::Internal => "internal",
            Clause::PostTrace => "post-trace",
            Clause::BoundaryPred => "boundary-pred",
        })
    }
}

/// Positions of the start and pop of scope `(m,i)` in `t`.
struct Anchors {
    /// Item index of the first state of the start pattern (call ** push, or
    /// push alone for scheduled procedures).
    start_begin: usize,
    /// Item index of the state preceding the push.
    push_state: usize,
    /// Item index of the state preceding the pop.
    pop_state: usize,
}

fn anchors(t: &Trace, m: &str, i: u64) -> Option<Anchors> {
    let mut push = None;
    let mut call = None;
    let mut pop = None;
    for (k, e) in t.events() {
        match e {
            Event::Call { name, id } if name == m && *id == i => call = Some(k),
            Event::Push { name, id } if name == m && *id == i => push = Some(k),
            Event::Pop { name, id } if name == m && *id == i => pop = Some(k),
            _ => {}
        }
    }
    let (push, pop) = (push?, pop?);
    let start_begin = match call {
        Some(c) if c + 2 == push => c - 1,
        _ => push - 1,
    };
    Some(Anchors { start_begin, push_state: push - 1, pop_state: pop - 1 })
}

/// The observation environment binding the pre binders at the state in
/// which scope `(m,i)` starts.
fn pre_env(t: &Trace, c: &ContractDecl, a: &Anchors) -> ObsEnv {
    let mut env = ObsEnv::new();
    if let Some(s) = t.items()[a.push_state].as_state() {
        for (x, y) in &c.pre_binders {
            env.observe(y, x, s);
        }
    }
    env
}

/// `τ, i ⊨ C_m`. Pre binders may occur in the pre-trace; they observe the
/// state in which the procedure starts.
pub fn adheres_trace(t: &Trace, i: u64, c: &ContractDecl, m: &str) -> Result<bool, ContractError> {
    let Some(a) = anchors(t, m, i) else {
        return Ok(false);
    };
    Ok(member(t, &adherence_formula(c, m, i), &pre_env(t, c, &a))?)
}

/// The first violated clause, reading the trace left to right.
fn failing_clause(t: &Trace, i: u64, c: &ContractDecl, m: &str) -> Result<Clause, ContractError> {
    let Some(a) = anchors(t, m, i) else {
        return Ok(Clause::Internal);
    };
    let items = t.items();
    let seg = |from: usize, to: usize| Trace(items[from..=to].to_vec());
    let mut env = pre_env(t, c, &a);
    // Scheduled procedures may match start with the push alone.
    let pre_ok = member(&seg(0, a.start_begin), &c.assume, &env)? || member(&seg(0, a.push_state), &c.assume, &env)?;
    if !pre_ok {
        return Ok(Clause::PreTrace);
    }
    let after_push = a.push_state + 2;
    let pred = |e: &Expr, env: &ObsEnv, k: usize| member(&seg(k, k), &Formula::Pred(e.clone()), env);
    if !pred(&c.pre, &env, a.push_state)? {
        return Ok(Clause::BoundaryPred);
    }
    if !member(&seg(after_push, a.pop_state), &c.internal, &env)? {
        return Ok(Clause::Internal);
    }
    if let Some(s) = items[a.pop_state].as_state() {
        for (x, y) in &c.post_binders {
            env.observe(y, x, s);
        }
    }
    if !pred(&c.post, &env, a.pop_state)? {
        return Ok(Clause::BoundaryPred);
    }
    if !member(&seg(a.pop_state + 2, items.len() - 1), &c.cont, &env)? {
        return Ok(Clause::PostTrace);
    }
    // Every clause holds separately; the combined formula still failed.
    Ok(Clause::Internal)
}

/// `idOf(m, τ)`: identifiers of call and invocation events naming `m`.
pub fn id_of(m: &str, t: &Trace) -> Vec<u64> {
    t.events()
        .filter_map(|(_, e)| match e {
            Event::Call { name, id } | Event::Invoc { name, id } if name == m => Some(*id),
            _ => None,
        })
        .collect()
}

/// One adherence verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdherenceVerdict {
    pub trace_index: usize,
    pub call_id: u64,
    pub adherent: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failing_clause: Option<Clause>,
}

/// Verdicts of one procedure against one contract.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProcedureReport {
    pub procedure: String,
    pub verdicts: Vec<AdherenceVerdict>,
}

impl ProcedureReport {
    pub fn adherent(&self) -> bool {
        self.verdicts.iter().all(|v| v.adherent)
    }
}

/// Adherence verdicts for a set of procedures.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AdherenceReport {
    pub procedures: Vec<ProcedureReport>,
}

impl AdherenceReport {
    pub fn adherent(&self) -> bool {
        self.procedures.iter().all(|p| p.adherent())
    }

    /// The first violation, if any.
    pub fn first_violation(&self) -> Option<(&str, &AdherenceVerdict)> {
        self.procedures
            .iter()
            .flat_map(|p| p.verdicts.iter().map(move |v| (p.procedure.as_str(), v)))
            .find(|(_, v)| !v.adherent)
    }
}

/// Checks `m` against `c` on the given traces.
pub fn adheres_on_traces(traces: &[Trace], m: &str, c: &ContractDecl) -> Result<ProcedureReport, ContractError> {
    let mut verdicts = Vec::new();
    for (k, t) in traces.iter().enumerate() {
        for i in id_of(m, t) {
            let adherent = adheres_trace(t, i, c, m)?;
            let failing_clause = if adherent { None } else { Some(failing_clause(t, i, c, m)?) };
            verdicts.push(AdherenceVerdict { trace_index: k, call_id: i, adherent, failing_clause });
        }
    }
    Ok(ProcedureReport { procedure: m.to_string(), verdicts })
}

/// `m ⊨ C_m`: every identifier of `m` in every maximal trace adheres.
pub fn adheres_procedure(program: &Program, m: &str, c: &ContractDecl, limits: &Limits) -> Result<ProcedureReport, ContractError> {
    let traces = enumerate_traces(program, limits)?;
    adheres_on_traces(&traces, m, c)
}

/// `⊨ P`: every procedure, including init, adheres to each of its
/// contracts.
pub fn program_correct(
    program: &Program,
    contracts: &[ContractDecl],
    limits: &Limits,
) -> Result<(bool, AdherenceReport), ContractError> {
    let mut by_name: BTreeMap<&str, Vec<&ContractDecl>> = BTreeMap::new();
    for c in contracts {
        by_name.entry(c.procedure.as_str()).or_default().push(c);
    }
    let mut names = vec![INIT];
    names.extend(program.names());
    if let Some(missing) = names.iter().find(|n| !by_name.contains_key(*n)) {
        return Err(ContractError::MissingContract(missing.to_string()));
    }
    let traces = enumerate_traces(program, limits)?;
    let mut report = AdherenceReport::default();
    for name in names {
        for c in &by_name[name] {
            report.procedures.push(adheres_on_traces(&traces, name, c)?);
        }
    }
    Ok((report.adherent(), report))
}
