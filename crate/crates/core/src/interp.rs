//! The operational semantics: local small steps, the global composition
//! rules, and exhaustive enumeration of maximal traces.

use crate::expr::Value;
use crate::frontend::{Program, Stmt};
use crate::trace::{event_triple, Event, FileOp, Item, Scope, SchedulePolicy, State, Trace, TraceError};
use std::collections::{BTreeMap, BTreeSet, HashSet};
use thiserror::Error;

/// Default bound on rule applications per branch.
pub const DEFAULT_MAX_STEPS: usize = 10_000;
/// Default bound on the number of maximal traces.
pub const DEFAULT_MAX_TRACES: usize = 10_000;

/// Errors raised by the interpreter.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InterpError {
    #[error("a branch exceeded {0} rule applications; the program may not terminate")]
    BoundExceeded(usize),
    #[error("more than {0} maximal traces")]
    TooManyTraces(usize),
    #[error("malformed configuration: {0}")]
    MalformedConfiguration(String),
    #[error("unknown procedure {0}")]
    UnknownProcedure(String),
    #[error(transparent)]
    Trace(#[from] TraceError),
}

/// Resource limits for enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_steps: usize,
    pub max_traces: usize,
    pub policy: SchedulePolicy,
}

impl Default for Limits {
    fn default() -> Limits {
        Limits { max_steps: DEFAULT_MAX_STEPS, max_traces: DEFAULT_MAX_TRACES, policy: SchedulePolicy::TreeLike }
    }
}

/// A continuation marker `K(s)`, or the empty continuation `K(∘)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Cont {
    Empty,
    Stmt(Stmt),
}

impl Cont {
    /// `K(s'); s` with `∘; s ⇝ s`.
    fn then(self, s: Option<Stmt>) -> Cont {
        match (self, s) {
            (Cont::Empty, None) => Cont::Empty,
            (Cont::Empty, Some(s)) => Cont::Stmt(s),
            (Cont::Stmt(r), None) => Cont::Stmt(r),
            (Cont::Stmt(r), Some(s)) => Cont::Stmt(Stmt::seq(r, s)),
        }
    }

    fn into_stmt(self) -> Option<Stmt> {
        match self {
            Cont::Empty => None,
            Cont::Stmt(s) => Some(s),
        }
    }
}

/// One small step of the local semantics: `val_σ(s)` with the most recent
/// call identifier `id` and the identifier `cid` of the current scope.
pub fn eval_local(s: &Stmt, sigma: &State, id: u64, cid: u64) -> (Trace, Cont) {
    match s {
        Stmt::Skip => (Trace::singleton(sigma.clone()), Cont::Empty),
        Stmt::Assign(x, e) => (Trace::step(sigma.clone(), sigma.update(x, sigma.eval(e))), Cont::Empty),
        Stmt::Return => (event_triple(sigma, Event::ret(cid)), Cont::Empty),
        Stmt::If(e, body) => {
            let k = if sigma.eval(e).is_true() { Cont::Stmt((**body).clone()) } else { Cont::Empty };
            (Trace::singleton(sigma.clone()), k)
        }
        Stmt::Seq(r, rest) => {
            let (t, k) = eval_local(r, sigma, id, cid);
            (t, k.then(Some((**rest).clone())))
        }
        Stmt::SyncCall(m) => (event_triple(sigma, Event::call(m, id + 1)), Cont::Empty),
        Stmt::AsyncCall(m) => (event_triple(sigma, Event::invoc(m, id + 1)), Cont::Empty),
        Stmt::File(op, e) => (event_triple(sigma, Event::File { op: *op, file: sigma.eval(e) }), Cont::Empty),
    }
}

/// Scope bookkeeping maintained alongside a trace: the push/pop stack, the
/// returned identifiers, the call tree and its idle vertices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Book {
    stack: Vec<Scope>,
    returned: HashSet<u64>,
    children: BTreeMap<Scope, Vec<Scope>>,
    idle: BTreeSet<Scope>,
    max_id: u64,
}

impl Book {
    pub fn of_trace(t: &Trace) -> Result<Book, TraceError> {
        let mut b = Book::default();
        for (_, e) in t.events() {
            b.observe(e)?;
        }
        Ok(b)
    }

    fn observe(&mut self, e: &Event) -> Result<(), TraceError> {
        match e {
            Event::Call { name, id } | Event::Invoc { name, id } => {
                let scope = (name.clone(), *id);
                if let Some(parent) = self.stack.last() {
                    self.children.entry(parent.clone()).or_default().push(scope.clone());
                }
                if matches!(e, Event::Invoc { .. }) {
                    self.idle.insert(scope);
                }
                self.max_id = self.max_id.max(*id);
            }
            Event::Push { name, id } => {
                let scope = (name.clone(), *id);
                self.idle.remove(&scope);
                self.stack.push(scope);
            }
            Event::Pop { name, id } => {
                let pos = self
                    .stack
                    .iter()
                    .rposition(|(n, i)| n == name && i == id)
                    .ok_or_else(|| TraceError::MalformedTrace(format!("pop({name},{id}) without push")))?;
                self.stack.remove(pos);
            }
            Event::Ret { id } => {
                self.returned.insert(*id);
            }
            Event::File { .. } => {}
        }
        Ok(())
    }

    pub fn current(&self) -> Option<&Scope> {
        self.stack.last()
    }

    /// `id(τ)`.
    pub fn max_id(&self) -> u64 {
        self.max_id
    }

    /// The schedulable scopes, ordered by identifier.
    pub fn schedule(&self, policy: SchedulePolicy) -> Vec<Scope> {
        let mut out: Vec<Scope> = match policy {
            SchedulePolicy::TreeLike => match self.current() {
                Some(cur) => self
                    .children
                    .get(cur)
                    .map(|cs| cs.iter().filter(|c| self.idle.contains(*c)).cloned().collect())
                    .unwrap_or_default(),
                None => Vec::new(),
            },
            SchedulePolicy::MinId => self.idle.iter().min_by_key(|(_, i)| *i).cloned().into_iter().collect(),
            SchedulePolicy::Nondeterministic => self.idle.iter().cloned().collect(),
        };
        out.sort_by_key(|(_, i)| *i);
        out
    }
}

/// A configuration `τ, K(s)` with its scope bookkeeping.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    pub trace: Trace,
    pub cont: Cont,
    book: Book,
}

/// The composition rule applied by a global step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    Progress,
    Call(Scope),
    Run(Scope),
    Return(Scope),
}

impl Config {
    pub fn new(trace: Trace, cont: Cont) -> Result<Config, InterpError> {
        if trace.last_state().is_none() {
            return Err(InterpError::MalformedConfiguration("trace must end with a state".into()));
        }
        let book = Book::of_trace(&trace)?;
        Ok(Config { trace, cont, book })
    }

    pub fn book(&self) -> &Book {
        &self.book
    }

    fn last(&self) -> &State {
        self.trace.last_state().expect("configurations end with a state")
    }

    fn append(&mut self, t: &Trace) {
        for it in &t.items()[1..] {
            if let Item::Event(e) = it {
                self.book.observe(e).expect("interpreter events are well-scoped");
            }
        }
        self.trace.chop_in_place(t).expect("local steps start in the last state");
    }

    fn push_scope(&mut self, scope: &Scope) {
        let s = self.last().clone();
        self.append(&event_triple(&s, Event::push(&scope.0, scope.1)));
    }

    /// The trailing call event, if the trace ends with a call triple.
    fn trailing_call(&self) -> Option<Scope> {
        let items = self.trace.items();
        match items.len().checked_sub(2).map(|k| &items[k]) {
            Some(Item::Event(Event::Call { name, id })) => Some((name.clone(), *id)),
            _ => None,
        }
    }

    /// Whether the configuration is final: empty continuation and nothing
    /// schedulable.
    pub fn is_final(&self, policy: SchedulePolicy) -> bool {
        self.cont == Cont::Empty && self.book.schedule(policy).is_empty()
    }
}

fn body<'p>(program: &'p Program, m: &str) -> Result<&'p Stmt, InterpError> {
    program.body(m).ok_or_else(|| InterpError::UnknownProcedure(m.to_string()))
}

/// All successors of a configuration under the rules Progress, Call, Run
/// and Return. `suppress_run` disables Run for the scope with that id.
pub fn step_global_with(
    cfg: &Config,
    program: &Program,
    policy: SchedulePolicy,
    suppress_run: Option<u64>,
) -> Result<Vec<(Rule, Config)>, InterpError> {
    let Some(cur) = cfg.book.current().cloned() else {
        return Ok(Vec::new());
    };
    let returned = cfg.book.returned.contains(&cur.1);
    let mut out = Vec::new();
    if let Some(callee) = cfg.trailing_call() {
        // Call: push the callee and prepend its body.
        let mut next = cfg.clone();
        next.push_scope(&callee);
        next.cont = Cont::Stmt(body(program, &callee.0)?.clone()).then(cfg.cont.clone().into_stmt());
        out.push((Rule::Call(callee), next));
        return Ok(out);
    }
    if !returned {
        // Progress.
        if let Cont::Stmt(s) = &cfg.cont {
            let (t, k) = eval_local(s, cfg.last(), cfg.book.max_id, cur.1);
            let mut next = cfg.clone();
            next.append(&t);
            next.cont = k;
            out.push((Rule::Progress, next));
        }
        return Ok(out);
    }
    let sched = cfg.book.schedule(policy);
    if sched.is_empty() {
        // Return: de-schedule the terminated scope.
        let mut next = cfg.clone();
        let s = next.last().clone();
        next.append(&event_triple(&s, Event::pop(&cur.0, cur.1)));
        out.push((Rule::Return(cur), next));
    } else if suppress_run != Some(cur.1) {
        for scope in sched {
            let mut next = cfg.clone();
            next.push_scope(&scope);
            next.cont = Cont::Stmt(body(program, &scope.0)?.clone()).then(cfg.cont.clone().into_stmt());
            out.push((Rule::Run(scope), next));
        }
    }
    Ok(out)
}

/// All successors of a configuration under the tree-like schedule.
pub fn step_global(cfg: &Config, program: &Program) -> Result<Vec<(Rule, Config)>, InterpError> {
    step_global_with(cfg, program, SchedulePolicy::TreeLike, None)
}

/// The default initial state: every declared variable set to `0`.
pub fn default_state(program: &Program) -> State {
    State::from_pairs(program.init_decls.iter().map(|x| (x.clone(), Value::default_int())))
}

/// `call_σd(init,0) ** push_σd((init,0))` with continuation `K(s; return)`.
pub fn initial_config(program: &Program) -> Config {
    let s = default_state(program);
    let mut t = event_triple(&s, Event::call(crate::frontend::INIT, 0));
    t.chop_in_place(&event_triple(&s, Event::push(crate::frontend::INIT, 0))).expect("same state");
    Config::new(t, Cont::Stmt(program.init_body.clone())).expect("well-formed initial configuration")
}

/// Depth-first exploration of all maximal runs from `start`; returns the
/// final configurations accepted by `accept`.
fn explore(
    start: Config,
    program: &Program,
    limits: &Limits,
    suppress_run: Option<u64>,
    accept: &dyn Fn(&Config) -> bool,
) -> Result<Vec<Config>, InterpError> {
    explore_until(start, program, limits, suppress_run, &|_| false, accept)
}

/// Like [`explore`], but configurations satisfying `stop` are accepted
/// without being stepped further.
fn explore_until(
    start: Config,
    program: &Program,
    limits: &Limits,
    suppress_run: Option<u64>,
    stop: &dyn Fn(&Config) -> bool,
    accept: &dyn Fn(&Config) -> bool,
) -> Result<Vec<Config>, InterpError> {
    let mut results = Vec::new();
    let mut stack = vec![(start, 0usize)];
    while let Some((mut cfg, mut steps)) = stack.pop() {
        loop {
            if stop(&cfg) {
                if results.len() >= limits.max_traces {
                    return Err(InterpError::TooManyTraces(limits.max_traces));
                }
                results.push(cfg);
                break;
            }
            let mut succ = step_global_with(&cfg, program, limits.policy, suppress_run)?;
            if succ.is_empty() {
                if accept(&cfg) {
                    if results.len() >= limits.max_traces {
                        return Err(InterpError::TooManyTraces(limits.max_traces));
                    }
                    results.push(cfg);
                }
                break;
            }
            steps += 1;
            if steps > limits.max_steps {
                return Err(InterpError::BoundExceeded(limits.max_steps));
            }
            // Explore the lowest-id choice first.
            let (_, first) = succ.remove(0);
            for (_, other) in succ.into_iter().rev() {
                stack.push((other, steps));
            }
            cfg = first;
        }
    }
    Ok(results)
}

/// `⟦P⟧_d`: all maximal traces of the program from the default state.
pub fn enumerate_traces(program: &Program, limits: &Limits) -> Result<Vec<Trace>, InterpError> {
    let policy = limits.policy;
    let finals = explore(initial_config(program), program, limits, None, &|c| c.is_final(policy))?;
    Ok(finals.into_iter().map(|c| c.trace).collect())
}

fn suffix(full: &Trace, prefix_len: usize) -> Trace {
    Trace(full.items()[prefix_len - 1..].to_vec())
}

/// `⟦s⟧^G_τ`: suffixes `τ'` with `τ, K(s) →* τ ** τ', K(∘)` and an empty
/// schedule.
pub fn eval_global(s: &Stmt, t: &Trace, program: &Program, limits: &Limits) -> Result<Vec<Trace>, InterpError> {
    let policy = limits.policy;
    let start = Config::new(t.clone(), Cont::Stmt(s.clone()))?;
    let finals = explore(start, program, limits, None, &|c| c.is_final(policy))?;
    Ok(finals.iter().map(|c| suffix(&c.trace, t.len())).collect())
}

/// Like [`eval_global`] from an arbitrary continuation (used for `∘`).
pub fn eval_global_cont(cont: Cont, t: &Trace, program: &Program, limits: &Limits) -> Result<Vec<Trace>, InterpError> {
    let policy = limits.policy;
    let start = Config::new(t.clone(), cont)?;
    let finals = explore(start, program, limits, None, &|c| c.is_final(policy))?;
    Ok(finals.iter().map(|c| suffix(&c.trace, t.len())).collect())
}

/// `⟦s⟧^L_τ`: maximal runs that never apply Run for the current scope of
/// `τ`; asynchronous calls of `s` itself stay unresolved.
pub fn eval_local_big(s: &Stmt, t: &Trace, program: &Program, limits: &Limits) -> Result<Vec<Trace>, InterpError> {
    let start = Config::new(t.clone(), Cont::Stmt(s.clone()))?;
    let outer = start.book.current().map(|(_, i)| *i).ok_or(TraceError::NoScope)?;
    let finals = explore(start, program, limits, Some(outer), &|c| c.cont == Cont::Empty)?;
    Ok(finals.iter().map(|c| suffix(&c.trace, t.len())).collect())
}

/// Executes one procedure activation on top of `t`: the call triple (when
/// `sync`), the push of `(m,id)`, the body, the scheduled children of the
/// scope and its pop. Identifiers generated inside are above `id_floor`.
/// Returns the suffixes after `t`.
pub fn run_procedure(
    t: &Trace,
    m: &str,
    id: u64,
    sync: bool,
    id_floor: u64,
    program: &Program,
    limits: &Limits,
) -> Result<Vec<Trace>, InterpError> {
    let s = t.last_state().ok_or_else(|| InterpError::MalformedConfiguration("empty trace".into()))?.clone();
    let mut start = t.clone();
    if sync {
        start.chop_in_place(&event_triple(&s, Event::call(m, id)))?;
    }
    start.chop_in_place(&event_triple(&s, Event::push(m, id)))?;
    let mut cfg = Config::new(start, Cont::Stmt(body(program, m)?.clone()))?;
    cfg.book.max_id = cfg.book.max_id.max(id_floor).max(id);
    let done = |c: &Config| {
        let items = c.trace.items();
        items.len() >= 2
            && matches!(&items[items.len() - 2], Item::Event(Event::Pop { name, id: j }) if name == m && *j == id)
    };
    let finals = explore_until(cfg, program, limits, None, &done, &|_| false)?;
    Ok(finals.iter().map(|c| suffix(&c.trace, t.len())).collect())
}

/// Result of the file-correctness check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FileVerdict {
    pub correct: bool,
    /// Item index of the first violating event.
    pub position: Option<usize>,
}

/// Every read, write and close of a file must be preceded by an open of it
/// with no close in between.
pub fn check_file_correct(t: &Trace) -> FileVerdict {
    let mut open: BTreeSet<Value> = BTreeSet::new();
    for (k, e) in t.events() {
        if let Event::File { op, file } = e {
            let ok = match op {
                FileOp::Open => {
                    open.insert(file.clone());
                    true
                }
                FileOp::Close => open.remove(file),
                FileOp::Read | FileOp::Write => open.contains(file),
            };
            if !ok {
                return FileVerdict { correct: false, position: Some(k) };
            }
        }
    }
    FileVerdict { correct: true, position: None }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{BinOp, Expr};
    use crate::frontend::parse_program;
    use crate::trace::{curr_scope, max_call_id, schedule};

    fn st(pairs: &[(&str, i64)]) -> State {
        State::from_pairs(pairs.iter().map(|(k, v)| (k.to_string(), Value::Int(*v))))
    }

    #[test]
    fn local_steps() {
        let s = st(&[("x", 0)]);
        assert_eq!(eval_local(&Stmt::Skip, &s, 0, 0), (Trace::singleton(s.clone()), Cont::Empty));
        assert_eq!(
            eval_local(&Stmt::SyncCall("m".into()), &s, 3, 0),
            (event_triple(&s, Event::call("m", 4)), Cont::Empty)
        );
        let inc = Stmt::Assign("x".into(), Expr::bin(BinOp::Add, Expr::var("x"), Expr::int(1)));
        assert_eq!(eval_local(&inc, &s, 0, 0), (Trace::step(s.clone(), st(&[("x", 1)])), Cont::Empty));
        let seq = Stmt::seq(Stmt::Skip, Stmt::Return);
        assert_eq!(eval_local(&seq, &s, 0, 7).1, Cont::Stmt(Stmt::Return));
        assert_eq!(eval_local(&Stmt::Return, &s, 0, 7).0, event_triple(&s, Event::ret(7)));
        let iff = Stmt::If(Expr::bool(false), Box::new(Stmt::Skip));
        assert_eq!(eval_local(&iff, &s, 0, 0).1, Cont::Empty);
    }

    #[test]
    fn trivial_program() {
        let p = parse_program("{x; skip}").unwrap();
        let ts = enumerate_traces(&p, &Limits::default()).unwrap();
        assert_eq!(ts.len(), 1);
        let evs: Vec<String> = ts[0].events().map(|(_, e)| e.to_string()).collect();
        assert_eq!(evs, vec!["call(init,0)", "push(init,0)", "ret(0)", "pop(init,0)"]);
        assert_eq!(ts[0].len(), 9);
    }

    #[test]
    fn bookkeeping_agrees_with_trace_functions() {
        let p = parse_program("m(){!m1();!m2();return} m1(){!m3();!m4();return} m2(){return} m3(){return} m4(){return} { m() }").unwrap();
        let mut cfg = initial_config(&p);
        loop {
            let succ = step_global(&cfg, &p).unwrap();
            if let Ok(cur) = curr_scope(&cfg.trace) {
                assert_eq!(cfg.book().current(), Some(&cur));
                let s: BTreeSet<Scope> = cfg.book().schedule(SchedulePolicy::TreeLike).into_iter().collect();
                assert_eq!(s, schedule(&cfg.trace).unwrap());
            }
            assert_eq!(cfg.book().max_id(), max_call_id(&cfg.trace));
            match succ.into_iter().next() {
                Some((_, next)) => cfg = next,
                None => break,
            }
        }
    }

    #[test]
    fn divergence_is_reported() {
        let p = parse_program("m(){ m(); return } { m() }").unwrap();
        let limits = Limits { max_steps: 200, ..Limits::default() };
        assert_eq!(enumerate_traces(&p, &limits), Err(InterpError::BoundExceeded(200)));
    }

    #[test]
    fn trace_cap_is_reported() {
        let p = parse_program("m(){!a();!b();!c();return} a(){return} b(){return} c(){return} { m() }").unwrap();
        let limits = Limits { max_traces: 2, ..Limits::default() };
        assert_eq!(enumerate_traces(&p, &limits), Err(InterpError::TooManyTraces(2)));
    }

    #[test]
    fn file_correctness() {
        let s = State::new();
        let mk = |evs: Vec<Event>| {
            let mut t = Trace::singleton(s.clone());
            evs.into_iter().for_each(|e| t.chop_in_place(&event_triple(&s, e)).unwrap());
            t
        };
        assert_eq!(check_file_correct(&mk(vec![Event::file(FileOp::Write, "a")])), FileVerdict { correct: false, position: Some(1) });
        let t = mk(vec![Event::file(FileOp::Open, "f"), Event::file(FileOp::Close, "f"), Event::file(FileOp::Read, "f")]);
        assert_eq!(check_file_correct(&t).position, Some(5));
        assert!(check_file_correct(&mk(vec![Event::file(FileOp::Open, "f"), Event::file(FileOp::Write, "f")])).correct);
    }

    #[test]
    fn local_big_step_leaves_own_invocations() {
        let p = parse_program("m(){return} { !m() }").unwrap();
        let start = initial_config(&p).trace;
        let ts = eval_local_big(&Stmt::seq(Stmt::AsyncCall("m".into()), Stmt::Return), &start, &p, &Limits::default()).unwrap();
        assert_eq!(ts.len(), 1);
        let evs: Vec<String> = ts[0].events().map(|(_, e)| e.to_string()).collect();
        assert_eq!(evs, vec!["invoc(m,1)", "ret(0)"]);
    }

    #[test]
    fn single_activation() {
        let p = parse_program(include_str!("../../../corpus/example1.async")).unwrap();
        let s = State::from_pairs([("file".to_string(), Value::Str("file1.txt".into()))]);
        let ts = run_procedure(&Trace::singleton(s), "closeF", 2, false, 0, &p, &Limits::default()).unwrap();
        assert_eq!(ts.len(), 1);
        let evs: Vec<String> = ts[0].events().map(|(_, e)| e.to_string()).collect();
        assert_eq!(evs, vec!["push(closeF,2)", "close(\"file1.txt\")", "ret(2)", "pop(closeF,2)"]);
    }
}
