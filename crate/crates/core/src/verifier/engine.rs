//! Discharge of local judgments `Γ ⊢ U : Φ`.
//!
//! The abstract engine translates the update into a trace formula — the
//! antecedent's pre-trace for the unknown prefix, event formulas for event
//! updates, a pair of adjacent states for assignments and the internal
//! behaviour of the callee's contract for runs — and decides inclusion in
//! `Φ` under the path conditions. The concrete engine samples initial
//! states and prefixes, executes the update with the real procedure bodies
//! and checks membership.

use super::update::{eval_update, Elem, RunMode, Update, OID};
use super::{VerifyError, VerifyOptions};
use crate::expr::{Expr, Value};
use crate::frontend::{ContractDecl, Program, Stmt, INIT};
use crate::interp::{default_state, InterpError};
use crate::logic::{included_under, member, witnesses, EvPat, Formula, NameP, ObsEnv, Term, Verdict};
use crate::trace::{Event, State, Trace};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

/// Symbolic values of program variables.
pub type Store = BTreeMap<String, Expr>;

/// Which engine discharges local judgments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    Abstract,
    Concrete,
    /// Abstract, falling back to concrete when the abstract check is
    /// inconclusive.
    AbstractThenConcrete,
}

/// Status of a proof leaf.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum LeafStatus {
    Closed {
        engine: String,
        evidence: String,
        /// The evidence relies on a length bound or on sampling.
        bounded: bool,
    },
    Open {
        reason: String,
    },
}

impl LeafStatus {
    pub fn is_closed(&self) -> bool {
        matches!(self, LeafStatus::Closed { .. })
    }

    pub(crate) fn closed(engine: &str, evidence: impl Into<String>, bounded: bool) -> LeafStatus {
        LeafStatus::Closed { engine: engine.into(), evidence: evidence.into(), bounded }
    }

    pub(crate) fn open(reason: impl Into<String>) -> LeafStatus {
        LeafStatus::Open { reason: reason.into() }
    }
}

/// The antecedent of a local judgment: the pre-trace assumed for the
/// unknown prefix, the contracts standing for runs, and path conditions.
#[derive(Clone, Debug)]
pub struct Antecedent {
    pub procedure: String,
    /// Assumption for `𝒱{start(m,oId)}`.
    pub theta_pre: Formula,
    pub initial_store: Store,
    /// Contract used for each `run(_, i, _)`.
    pub runs: BTreeMap<u64, ContractDecl>,
    pub path: Vec<Expr>,
}

/// Skolem constant for the value of `x` when the procedure starts.
pub fn start_symbol(x: &str) -> String {
    format!("{x}@0")
}

/// Skolem constant for the value of `x` after run `i`.
pub fn run_symbol(x: &str, i: u64) -> String {
    format!("{x}@r{i}")
}

/// The store at the start of procedure `m`: known defaults for the init
/// block, fresh constants otherwise.
pub fn initial_store(program: &Program, m: &str) -> Store {
    program
        .init_decls
        .iter()
        .map(|x| {
            let v = if m == INIT { Expr::Lit(Value::default_int()) } else { Expr::var(&start_symbol(x)) };
            (x.clone(), v)
        })
        .collect()
}

/// Evaluates a program expression over the symbolic store.
pub fn sym_eval(store: &Store, e: &Expr) -> Expr {
    e.subst(&|x| Some(store.get(x).cloned().unwrap_or_else(|| Expr::var(&start_symbol(x))))).fold()
}

/// The effect of one update element on the symbolic store.
pub fn step_store(store: &mut Store, e: &Elem, program: &Program) {
    match e {
        Elem::Assign(x, ex) => {
            let v = sym_eval(store, ex);
            store.insert(x.clone(), v);
        }
        Elem::Run { name, id, .. } => {
            for x in program.may_assign(name) {
                store.insert(x.clone(), Expr::var(&run_symbol(&x, *id)));
            }
        }
        _ => {}
    }
}

/// `ȳ ↦ value of x̄` for observation binders.
pub fn binder_subst(binders: &[(String, String)], store: &Store, base: &BTreeMap<String, Expr>) -> BTreeMap<String, Expr> {
    let mut out = base.clone();
    for (x, y) in binders {
        out.insert(y.clone(), store.get(x).cloned().unwrap_or_else(|| Expr::var(&start_symbol(x))));
    }
    out
}

fn ev(p: EvPat) -> Formula {
    Formula::ev(p)
}

fn name(m: &str) -> NameP {
    NameP::Is(m.to_string())
}

/// `θ'_a ** ⟨q_a⟩` of a callee contract, instantiated at the current store.
pub fn pre_obligation(c: &ContractDecl, store: &Store) -> Formula {
    let s1 = binder_subst(&c.pre_binders, store, &BTreeMap::new());
    Formula::chop(c.assume.clone(), Formula::Pred(c.pre.clone())).subst_free(&s1)
}

/// What `run(m,i,mode)` contributes to the trace: the scope's start, the
/// callee's internal behaviour between its boundary predicates, its pop.
pub fn run_fragment(c: &ContractDecl, m: &str, i: u64, mode: RunMode, before: &Store, after: &Store) -> Formula {
    let s1 = binder_subst(&c.pre_binders, before, &BTreeMap::new());
    let s2 = binder_subst(&c.post_binders, after, &s1);
    let id = Term::int(i as i64);
    let start = match mode {
        RunMode::Sync => Formula::chop(ev(EvPat::Call(name(m), id.clone())), ev(EvPat::Push(name(m), id.clone()))),
        RunMode::Async => ev(EvPat::Push(name(m), id.clone())),
    };
    Formula::chop_all(vec![
        start,
        Formula::Pred(c.pre.clone()).subst_free(&s1),
        c.internal.subst_free(&s1),
        Formula::Pred(c.post.clone()).subst_free(&s2),
        ev(EvPat::Pop(name(m), id)),
    ])
}

/// The callee's post-trace, pinned at its pop: the obligation the caller
/// takes over.
pub fn post_obligation(c: &ContractDecl, m: &str, i: u64, before: &Store, after: &Store) -> Formula {
    let s1 = binder_subst(&c.pre_binders, before, &BTreeMap::new());
    let s2 = binder_subst(&c.post_binders, after, &s1);
    Formula::chop_all(vec![
        Formula::top(),
        ev(EvPat::Pop(name(m), Term::int(i as i64))),
        Formula::Pred(c.post.clone()).subst_free(&s2),
        c.cont.subst_free(&s2),
    ])
}

/// `T(U)`: the trace formula over-approximating the traces of `U` under
/// the antecedent.
pub fn translate(ante: &Antecedent, u: &Update, program: &Program) -> Result<Formula, VerifyError> {
    let mut store = ante.initial_store.clone();
    let mut parts = Vec::new();
    let elems = u.elems();
    let mut k = 0;
    if let [Elem::Havoc(_), Elem::Start(m, OID), ..] = elems {
        if *m == ante.procedure {
            parts.push(ante.theta_pre.clone());
            k = 2;
        }
    }
    for e in &elems[k..] {
        let before = store.clone();
        step_store(&mut store, e, program);
        let id = |i: u64| Term::int(i as i64);
        parts.push(match e {
            Elem::Havoc(_) => Formula::top(),
            Elem::Assign(..) => Formula::concat(Formula::tt(), Formula::tt()),
            Elem::Invoc(m, i) => ev(EvPat::Invoc(name(m), id(*i))),
            Elem::Start(m, i) => ev(EvPat::Start(name(m), id(*i))),
            Elem::Ret(i) => ev(EvPat::Ret(id(*i))),
            Elem::Pop(m, i) => ev(EvPat::Pop(name(m), id(*i))),
            Elem::File(op, ex) => ev(EvPat::File(*op, Term::Is(sym_eval(&before, ex)))),
            Elem::Run { name: m, id: i, mode } => {
                let c = ante.runs.get(i).ok_or_else(|| VerifyError::MissingRunJudgment(*i))?;
                run_fragment(c, m, *i, *mode, &before, &store)
            }
        });
    }
    Ok(if parts.is_empty() { Formula::tt() } else { Formula::chop_all(parts) })
}

/// Discharges `Γ ⊢ U : Φ`, where the traces of `U` are optionally extended
/// by `ext` (an assumption about the future of the trace).
pub fn discharge_local(
    ante: &Antecedent,
    u: &Update,
    ext: Option<&Formula>,
    target: &Formula,
    program: &Program,
    opts: &VerifyOptions,
) -> LeafStatus {
    match opts.engine {
        Engine::Abstract => discharge_abstract(ante, u, ext, target, program, opts),
        Engine::Concrete => discharge_concrete(ante, u, ext, target, program, opts),
        Engine::AbstractThenConcrete => match discharge_abstract(ante, u, ext, target, program, opts) {
            LeafStatus::Open { reason } if reason.starts_with(UNKNOWN) => {
                match discharge_concrete(ante, u, ext, target, program, opts) {
                    LeafStatus::Open { reason: r2 } => LeafStatus::open(format!("{reason}; {r2}")),
                    closed => closed,
                }
            }
            other => other,
        },
    }
}

const UNKNOWN: &str = "abstract: inconclusive";

fn discharge_abstract(
    ante: &Antecedent,
    u: &Update,
    ext: Option<&Formula>,
    target: &Formula,
    program: &Program,
    opts: &VerifyOptions,
) -> LeafStatus {
    let lhs = match translate(ante, u, program) {
        Ok(f) => f,
        Err(e) => return LeafStatus::open(format!("{UNKNOWN}: {e}")),
    };
    let lhs = match ext {
        Some(x) => Formula::chop(lhs, x.clone()),
        None => lhs,
    };
    match included_under(&lhs, target, opts.bound, &ante.path) {
        Verdict::IncludedUpToBound { exhaustive } => LeafStatus::closed(
            "abstract",
            if exhaustive { "inclusion holds (exhaustive)".to_string() } else { format!("no counterexample up to {} items", opts.bound) },
            !exhaustive,
        ),
        Verdict::Counterexample { trace, valuation } => {
            let vals: Vec<String> = valuation.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let evs: Vec<String> = trace.events().map(|(_, e)| e.to_string()).collect();
            LeafStatus::open(format!("counterexample [{}] with {{{}}}", evs.join(", "), vals.join(", ")))
        }
        Verdict::Unknown(r) => LeafStatus::open(format!("{UNKNOWN}: {r}")),
    }
}

/// Literals occurring in the program bodies and the given formulas.
fn literals(program: &Program, fs: &[&Formula]) -> BTreeSet<Value> {
    let mut out = BTreeSet::from([Value::Int(0)]);
    let mut visit = |s: &Stmt| match s {
        Stmt::Assign(_, e) | Stmt::If(e, _) | Stmt::File(_, e) => e.literals(&mut out),
        _ => {}
    };
    program.init_body.visit(&mut visit);
    for p in &program.procedures {
        p.body.visit(&mut visit);
    }
    for f in fs {
        for e in f.exprs() {
            e.literals(&mut out);
        }
    }
    out
}

const MAX_SEEDS: usize = 32;
const MAX_WITNESSES: usize = 64;

fn discharge_concrete(
    ante: &Antecedent,
    u: &Update,
    ext: Option<&Formula>,
    target: &Formula,
    program: &Program,
    opts: &VerifyOptions,
) -> LeafStatus {
    let max_events = opts.havoc_len.saturating_sub(1) / 2;
    let mut seeds = vec![default_state(program)];
    if ante.procedure != INIT {
        let domain: Vec<Value> = literals(program, &[&ante.theta_pre, target]).into_iter().collect();
        for x in &program.init_decls {
            seeds = seeds.iter().flat_map(|s| domain.iter().map(move |v| s.update(x, v.clone()))).collect();
            seeds.truncate(MAX_SEEDS);
        }
    }
    let elems = u.elems();
    let havoc_prefix = matches!(elems, [Elem::Havoc(_), Elem::Start(m, OID), ..] if *m == ante.procedure);
    let tail = Update(elems[if havoc_prefix { 2 } else { 0 }..].to_vec());
    let mut instances = 0usize;
    for seed in seeds {
        let env0: Vec<(String, Value)> = program
            .init_decls
            .iter()
            .map(|x| (start_symbol(x), seed.get(x).cloned().unwrap_or_else(Value::default_int)))
            .collect();
        let prefixes = if havoc_prefix {
            witnesses(&ante.theta_pre, &ObsEnv::from_values(env0.clone()), &seed, max_events, MAX_WITNESSES)
        } else {
            vec![Trace::singleton(seed.clone())]
        };
        for prefix in prefixes {
            let suffixes = match eval_update(&tail, &prefix, program, &opts.limits) {
                Ok(s) => s,
                // Prefixes that are not well-scoped are not program histories.
                Err(VerifyError::Interp(InterpError::Trace(_) | InterpError::MalformedConfiguration(_))) => continue,
                Err(e) => return LeafStatus::open(format!("concrete: {e}")),
            };
            for suffix in suffixes {
                let full = prefix.chop(&suffix).expect("suffix starts at the prefix's last state");
                let mut vals = env0.clone();
                vals.extend(run_values(&full, &tail, program));
                let env = ObsEnv::from_values(vals);
                if !ante.path.iter().all(|p| env.eval(p).map(|v| v.is_true()).unwrap_or(false)) {
                    continue;
                }
                let last: State = full.last_state().expect("non-empty").clone();
                let exts = match ext {
                    Some(x) => witnesses(x, &env, &last, max_events, MAX_WITNESSES),
                    None => vec![Trace::singleton(last)],
                };
                for w in exts {
                    let tr = full.chop(&w).expect("extension starts at the last state");
                    instances += 1;
                    match member(&tr, target, &env) {
                        Ok(true) => {}
                        Ok(false) => {
                            let evs: Vec<String> = tr.events().map(|(_, e)| e.to_string()).collect();
                            return LeafStatus::open(format!("concrete counterexample [{}]", evs.join(", ")));
                        }
                        Err(e) => return LeafStatus::open(format!("concrete: {e}")),
                    }
                }
            }
        }
    }
    if instances == 0 {
        return LeafStatus::open("concrete: no sampled instance");
    }
    LeafStatus::closed("concrete", format!("{instances} sampled instances"), true)
}

/// Values of the run constants `x@ri`: the state preceding the pop of
/// scope `i` in a concrete trace.
fn run_values(t: &Trace, u: &Update, program: &Program) -> Vec<(String, Value)> {
    let mut out = Vec::new();
    for e in u.elems() {
        if let Elem::Run { name, id, .. } = e {
            let pos = t.events().find_map(|(k, ev)| match ev {
                Event::Pop { name: n, id: j } if n == name && j == id => Some(k),
                _ => None,
            });
            if let Some(k) = pos {
                let s = t.items()[k - 1].as_state().expect("events are flanked by states");
                for x in program.may_assign(name) {
                    out.push((run_symbol(&x, *id), s.get(&x).cloned().unwrap_or_else(Value::default_int)));
                }
            }
        }
    }
    out
}
