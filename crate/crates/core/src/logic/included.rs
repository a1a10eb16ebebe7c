//! Language inclusion between formulas.
//!
//! Free logic variables and constants are universally quantified; they are
//! case-split over a finite sample of values derived from the literals in
//! the formulas. For each valuation:
//!
//! * formulas without observations whose fixed points are right-linear are
//!   compiled to automata over an alphabet of one state letter plus one
//!   representative per class of events that no pattern can tell apart;
//!   inclusion is then decided exactly by an on-the-fly subset construction
//!   with a shortest counterexample;
//! * other formulas fall back to enumerating traces up to a length bound.
//!
//! Predicates only mention logic variables, so in the automaton case the
//! identity of states is irrelevant and a single state letter suffices.

use super::ast::{EvPat, Formula, NameP, Term};
use super::member::{member, ObsEnv};
use crate::expr::{Expr, Value};
use crate::trace::{event_triple, Event, FileOp, Item, State, Trace};
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

/// Outcome of an inclusion check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// No counterexample exists (`exhaustive`) or none was found up to the
    /// length bound.
    IncludedUpToBound { exhaustive: bool },
    /// A trace of the left language outside the right one, under the given
    /// valuation of free variables.
    Counterexample { trace: Trace, valuation: BTreeMap<String, Value> },
    /// The check could not be performed.
    Unknown(String),
}

impl Verdict {
    pub fn is_included(&self) -> bool {
        matches!(self, Verdict::IncludedUpToBound { .. })
    }
}

/// Maximum number of valuations tried before giving up.
const MAX_VALUATIONS: usize = 4096;
/// Maximum number of traces enumerated by the fallback.
const MAX_ENUMERATED: usize = 200_000;

/// `⟦lhs⟧ ⊆ ⟦rhs⟧` for every valuation of the free variables.
pub fn included(lhs: &Formula, rhs: &Formula, bound: usize) -> Verdict {
    included_under(lhs, rhs, bound, &[])
}

/// Like [`included`], restricted to valuations satisfying every assumption.
pub fn included_under(lhs: &Formula, rhs: &Formula, bound: usize, assumptions: &[Expr]) -> Verdict {
    let lhs = lhs.normalize();
    let rhs = rhs.normalize();
    if lhs == rhs && assumptions.is_empty() {
        return Verdict::IncludedUpToBound { exhaustive: true };
    }
    let mut exprs: Vec<&Expr> = lhs.exprs();
    exprs.extend(rhs.exprs());
    exprs.extend(assumptions.iter());
    if let Some(e) = exprs.iter().find(|e| e.has_var_arith()) {
        return Verdict::Unknown(format!("arithmetic over variables in {e}"));
    }
    let mut vars: BTreeSet<String> = lhs.free_vars();
    vars.extend(rhs.free_vars());
    for a in assumptions {
        vars.extend(a.vars());
    }
    let mut lits = BTreeSet::new();
    exprs.iter().for_each(|e| e.literals(&mut lits));
    let domain = sample_domain(&lits, vars.len());
    let vars: Vec<String> = vars.into_iter().collect();
    let total = domain.len().checked_pow(vars.len() as u32).unwrap_or(usize::MAX);
    if total > MAX_VALUATIONS {
        return Verdict::Unknown(format!("{total} valuations exceed the sampling budget"));
    }
    let regular = is_regular(&lhs) && is_regular(&rhs);
    let mut exhaustive = regular;
    for k in 0..total.max(1) {
        let mut idx = k;
        let valuation: BTreeMap<String, Value> = vars
            .iter()
            .map(|v| {
                let val = domain[idx % domain.len()].clone();
                idx /= domain.len();
                (v.clone(), val)
            })
            .collect();
        let env = ObsEnv::from_values(valuation.clone());
        let holds = assumptions.iter().all(|a| env.eval(a).map(|v| v.is_true()).unwrap_or(false));
        if !holds {
            continue;
        }
        let result = if regular {
            automaton_inclusion(&lhs, &rhs, &env)
        } else {
            enumerate_inclusion(&lhs, &rhs, &env, bound, &lits)
        };
        match result {
            Ok(None) => {}
            Ok(Some(trace)) => return Verdict::Counterexample { trace, valuation },
            Err(Truncated) => exhaustive = false,
        }
        if !regular {
            exhaustive = false;
        }
    }
    Verdict::IncludedUpToBound { exhaustive }
}

/// Values tried for each free variable: integers around every integer
/// literal and zero, string literals plus fresh strings, both booleans.
fn sample_domain(lits: &BTreeSet<Value>, nvars: usize) -> Vec<Value> {
    let mut d = BTreeSet::new();
    d.insert(Value::Int(0));
    d.insert(Value::Bool(true));
    d.insert(Value::Bool(false));
    for l in lits {
        match l {
            Value::Int(k) => {
                for x in [k.saturating_sub(1), *k, k.saturating_add(1)] {
                    d.insert(Value::Int(x));
                }
            }
            other => {
                d.insert(other.clone());
            }
        }
    }
    for i in 0..nvars.clamp(1, 2) {
        d.insert(Value::Str(format!("#{i}")));
    }
    d.into_iter().collect()
}

/// Observation-free, with every fixed point right-linear.
fn is_regular(f: &Formula) -> bool {
    fn tail_only(f: &Formula, x: &str) -> bool {
        match f {
            Formula::Var(_) | Formula::Pred(_) | Formula::Ev(_) | Formula::NoEv(_) => true,
            Formula::Or(a, b) => tail_only(a, x) && tail_only(b, x),
            Formula::Concat(a, b) | Formula::Chop(a, b) => !a.mentions_rec_var(x) && tail_only(b, x),
            Formula::Mu(y, b) => y == x || tail_only(b, x),
            Formula::And(..) | Formula::Obs { .. } => !f.mentions_rec_var(x),
        }
    }
    match f {
        Formula::Obs { .. } => false,
        Formula::Pred(_) | Formula::Var(_) | Formula::Ev(_) | Formula::NoEv(_) => true,
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Concat(a, b) | Formula::Chop(a, b) => {
            is_regular(a) && is_regular(b)
        }
        Formula::Mu(x, b) => tail_only(b, x) && is_regular(b),
    }
}

struct Truncated;

// ------------------------------------------------------------------ alphabet

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Letter {
    S,
    E(Event),
}

/// Representative events: for every event kind, the product of the
/// mentioned names and values with one fresh element each.
fn alphabet(fs: &[&Formula], env: &ObsEnv, extra: &[Value]) -> Vec<Letter> {
    let mut names: BTreeSet<String> = BTreeSet::new();
    let mut values: BTreeSet<Value> = extra.iter().cloned().collect();
    let mut kinds: BTreeSet<&'static str> = BTreeSet::new();
    for f in fs {
        for p in f.patterns() {
            let (n, t) = match p {
                EvPat::Start(n, t) => {
                    kinds.insert("call");
                    kinds.insert("push");
                    (Some(n), t)
                }
                EvPat::Call(n, t) => {
                    kinds.insert("call");
                    (Some(n), t)
                }
                EvPat::Invoc(n, t) => {
                    kinds.insert("invoc");
                    (Some(n), t)
                }
                EvPat::Push(n, t) => {
                    kinds.insert("push");
                    (Some(n), t)
                }
                EvPat::Pop(n, t) => {
                    kinds.insert("pop");
                    (Some(n), t)
                }
                EvPat::Ret(t) => {
                    kinds.insert("ret");
                    (None, t)
                }
                EvPat::File(op, t) => {
                    kinds.insert(op.keyword());
                    (None, t)
                }
            };
            if let Some(NameP::Is(m)) = n {
                names.insert(m.clone());
            }
            if let Term::Is(e) = t {
                if let Ok(v) = env.eval(e) {
                    values.insert(v);
                }
            }
        }
    }
    names.insert("#other".to_string());
    let mut ids: BTreeSet<u64> = values.iter().filter_map(|v| match v {
        Value::Int(i) if *i >= 0 => Some(*i as u64),
        _ => None,
    }).collect();
    ids.insert(ids.iter().max().map_or(0, |m| m + 1) + 1000);
    let mut files = values.clone();
    files.insert(Value::Str("#file".into()));
    let mut out = vec![Letter::S];
    let all_kinds = ["call", "invoc", "push", "pop", "ret", "open", "close", "read", "write"];
    for kind in all_kinds {
        // Unmentioned kinds need a single representative.
        let mentioned = kinds.contains(kind);
        let kn: Vec<String> = if mentioned { names.iter().cloned().collect() } else { vec!["#other".into()] };
        let ki: Vec<u64> = if mentioned { ids.iter().copied().collect() } else { vec![*ids.iter().last().unwrap()] };
        let kf: Vec<Value> = if mentioned { files.iter().cloned().collect() } else { vec![Value::Str("#file".into())] };
        match kind {
            "call" | "invoc" | "push" | "pop" => {
                for n in &kn {
                    for &i in &ki {
                        let e = match kind {
                            "call" => Event::call(n, i),
                            "invoc" => Event::invoc(n, i),
                            "push" => Event::push(n, i),
                            _ => Event::pop(n, i),
                        };
                        out.push(Letter::E(e));
                    }
                }
            }
            "ret" => ki.iter().for_each(|&i| out.push(Letter::E(Event::ret(i)))),
            op => {
                let op = FileOp::from_keyword(op).expect("file keyword");
                kf.iter().for_each(|v| out.push(Letter::E(Event::File { op, file: v.clone() })));
            }
        }
    }
    out
}

fn pattern_kinds(p: &EvPat) -> Vec<&'static str> {
    match p {
        EvPat::Start(..) => vec!["call", "push"],
        EvPat::Call(..) => vec!["call"],
        EvPat::Invoc(..) => vec!["invoc"],
        EvPat::Push(..) => vec!["push"],
        EvPat::Pop(..) => vec!["pop"],
        EvPat::Ret(_) => vec!["ret"],
        EvPat::File(op, _) => vec![op.keyword()],
    }
}

// ----------------------------------------------------------------- automata

#[derive(Clone, Copy)]
struct Frag {
    start: usize,
    accept: usize,
}

struct Nfa {
    letters: Vec<Letter>,
    trans: Vec<Vec<(usize, usize)>>,
    eps: Vec<Vec<usize>>,
    chop_links: Vec<(usize, usize)>,
}

impl Nfa {
    fn new(letters: Vec<Letter>) -> Nfa {
        Nfa { letters, trans: Vec::new(), eps: Vec::new(), chop_links: Vec::new() }
    }

    fn state(&mut self) -> usize {
        self.trans.push(Vec::new());
        self.eps.push(Vec::new());
        self.trans.len() - 1
    }

    fn edge(&mut self, a: usize, letter: usize, b: usize) {
        self.trans[a].push((letter, b));
    }

    fn epsilon(&mut self, a: usize, b: usize) {
        if !self.eps[a].contains(&b) {
            self.eps[a].push(b);
        }
    }

    fn closure(&self, seeds: impl IntoIterator<Item = usize>) -> BTreeSet<usize> {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<usize> = seeds.into_iter().collect();
        while let Some(s) = stack.pop() {
            if seen.insert(s) {
                stack.extend(self.eps[s].iter().copied());
            }
        }
        seen
    }

    fn matches(&self, p: &EvPat, ev: &Event, env: &ObsEnv) -> bool {
        p.matches_event(ev, &|e: &Expr| env.eval(e).map_err(|e| e.to_string())).unwrap_or(false)
    }

    fn build(&mut self, f: &Formula, env: &ObsEnv, rec: &HashMap<String, usize>) -> Frag {
        let start = self.state();
        match f {
            Formula::Pred(e) => {
                let accept = self.state();
                if env.eval(e).map(|v| v.is_true()).unwrap_or(false) {
                    self.edge(start, 0, accept);
                }
                Frag { start, accept }
            }
            Formula::Ev(p) => {
                let (a, b, accept) = (self.state(), self.state(), self.state());
                self.edge(start, 0, a);
                self.edge(b, 0, accept);
                let letters = self.letters.clone();
                for (li, l) in letters.iter().enumerate() {
                    let Letter::E(ev) = l else { continue };
                    if !self.matches(p, ev, env) {
                        continue;
                    }
                    self.edge(a, li, b);
                    if let (EvPat::Start(..), Event::Push { name, id }) = (p, ev) {
                        let call = Letter::E(Event::call(name, *id));
                        if let Some(ci) = letters.iter().position(|x| *x == call) {
                            let (c1, c2) = (self.state(), self.state());
                            self.edge(a, ci, c1);
                            self.edge(c1, 0, c2);
                            self.edge(c2, li, b);
                        }
                    }
                }
                Frag { start, accept }
            }
            Formula::NoEv(ps) => {
                let (lp, mid, accept) = (self.state(), self.state(), self.state());
                self.edge(start, 0, lp);
                self.edge(lp, 0, lp);
                self.edge(mid, 0, lp);
                self.epsilon(lp, accept);
                let letters = self.letters.clone();
                for (li, l) in letters.iter().enumerate() {
                    let Letter::E(ev) = l else { continue };
                    let excluded = ps.iter().any(|p| match (p, ev) {
                        (EvPat::Start(n, t), Event::Call { .. }) => {
                            self.matches(&EvPat::Call(n.clone(), t.clone()), ev, env)
                        }
                        _ => self.matches(p, ev, env),
                    });
                    if !excluded {
                        self.edge(lp, li, mid);
                    }
                }
                Frag { start, accept }
            }
            Formula::Or(a, b) => {
                let fa = self.build(a, env, rec);
                let fb = self.build(b, env, rec);
                let accept = self.state();
                self.epsilon(start, fa.start);
                self.epsilon(start, fb.start);
                self.epsilon(fa.accept, accept);
                self.epsilon(fb.accept, accept);
                Frag { start, accept }
            }
            Formula::Concat(a, b) => {
                let fa = self.build(a, env, rec);
                let fb = self.build(b, env, rec);
                self.epsilon(start, fa.start);
                self.epsilon(fa.accept, fb.start);
                Frag { start, accept: fb.accept }
            }
            Formula::Chop(a, b) => {
                let fa = self.build(a, env, rec);
                let fb = self.build(b, env, rec);
                self.epsilon(start, fa.start);
                self.chop_links.push((fa.accept, fb.start));
                Frag { start, accept: fb.accept }
            }
            Formula::Mu(x, body) => {
                let mut rec2 = rec.clone();
                rec2.insert(x.clone(), start);
                let fb = self.build(body, env, &rec2);
                self.epsilon(start, fb.start);
                Frag { start, accept: fb.accept }
            }
            Formula::Var(x) => {
                let accept = self.state();
                if let Some(&target) = rec.get(x) {
                    self.epsilon(start, target);
                }
                Frag { start, accept }
            }
            Formula::And(a, b) => {
                let mut na = Nfa::new(self.letters.clone());
                let fa = na.build(a, env, &HashMap::new());
                let mut nb = Nfa::new(self.letters.clone());
                let fb = nb.build(b, env, &HashMap::new());
                let da = na.finish(fa);
                let db = nb.finish(fb);
                // Product of the two epsilon-free automata.
                let accept = self.state();
                let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
                let mut queue = VecDeque::new();
                ids.insert((0, 0), start);
                queue.push_back((0usize, 0usize));
                while let Some((p, q)) = queue.pop_front() {
                    let me = ids[&(p, q)];
                    if da.accepting[p] && db.accepting[q] {
                        self.epsilon(me, accept);
                    }
                    for li in 0..self.letters.len() {
                        for &p2 in &da.delta[p][li] {
                            for &q2 in &db.delta[q][li] {
                                let target = match ids.get(&(p2, q2)) {
                                    Some(&t) => t,
                                    None => {
                                        let t = self.state();
                                        ids.insert((p2, q2), t);
                                        queue.push_back((p2, q2));
                                        t
                                    }
                                };
                                self.edge(me, li, target);
                            }
                        }
                    }
                }
                Frag { start, accept }
            }
            Formula::Obs { .. } => unreachable!("observations are handled by enumeration"),
        }
    }

    /// Resolves chop links and removes epsilon moves. State 0 of the result
    /// is the start state.
    fn finish(mut self, frag: Frag) -> EpsFree {
        loop {
            let mut changed = false;
            for (p, q) in self.chop_links.clone() {
                let cl = self.closure([q]);
                let targets: BTreeSet<usize> =
                    cl.iter().flat_map(|&s| self.trans[s].iter().filter(|(l, _)| *l == 0).map(|(_, t)| *t)).collect();
                for t in targets {
                    if !self.eps[p].contains(&t) {
                        self.eps[p].push(t);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        // Renumber so that the start state is 0.
        let n = self.trans.len();
        let mut order: Vec<usize> = vec![frag.start];
        order.extend((0..n).filter(|&s| s != frag.start));
        let mut index = vec![0; n];
        for (k, &s) in order.iter().enumerate() {
            index[s] = k;
        }
        let nl = self.letters.len();
        let mut delta = vec![vec![Vec::new(); nl]; n];
        let mut accepting = vec![false; n];
        for &s in &order {
            let cl = self.closure([s]);
            accepting[index[s]] = cl.contains(&frag.accept);
            for &c in &cl {
                for &(l, t) in &self.trans[c] {
                    let row: &mut Vec<usize> = &mut delta[index[s]][l];
                    if !row.contains(&index[t]) {
                        row.push(index[t]);
                    }
                }
            }
        }
        EpsFree { delta, accepting }
    }
}

/// An epsilon-free automaton (still nondeterministic).
struct EpsFree {
    delta: Vec<Vec<Vec<usize>>>,
    accepting: Vec<bool>,
}

fn compile(f: &Formula, env: &ObsEnv, letters: &[Letter]) -> EpsFree {
    let mut nfa = Nfa::new(letters.to_vec());
    let frag = nfa.build(f, env, &HashMap::new());
    nfa.finish(frag)
}

fn automaton_inclusion(lhs: &Formula, rhs: &Formula, env: &ObsEnv) -> Result<Option<Trace>, Truncated> {
    let letters = alphabet(&[lhs, rhs], env, &[]);
    let a = compile(lhs, env, &letters);
    let b = compile(rhs, env, &letters);
    type Node = (usize, Vec<usize>);
    let start: Node = (0, vec![0]);
    let mut parent: HashMap<Node, Option<(Node, usize)>> = HashMap::new();
    parent.insert(start.clone(), None);
    let mut queue = VecDeque::from([start]);
    while let Some(node) = queue.pop_front() {
        let (p, ref set) = node;
        if a.accepting[p] && !set.iter().any(|&q| b.accepting[q]) {
            // Reconstruct the word.
            let mut word = Vec::new();
            let mut cur = node.clone();
            while let Some(Some((prev, l))) = parent.get(&cur) {
                word.push(l.to_owned());
                cur = prev.clone();
            }
            word.reverse();
            return Ok(Some(realize(&word.iter().map(|&l| letters[l].clone()).collect::<Vec<_>>())));
        }
        for li in 0..letters.len() {
            if a.delta[p][li].is_empty() {
                continue;
            }
            let mut next: Vec<usize> = set.iter().flat_map(|&q| b.delta[q][li].iter().copied()).collect();
            next.sort_unstable();
            next.dedup();
            for &p2 in &a.delta[p][li] {
                let n2 = (p2, next.clone());
                if !parent.contains_key(&n2) {
                    parent.insert(n2.clone(), Some((node.clone(), li)));
                    queue.push_back(n2);
                }
            }
        }
    }
    Ok(None)
}

/// Turns a word into a trace whose states are all the empty state.
fn realize(word: &[Letter]) -> Trace {
    let s = State::new();
    Trace(
        word.iter()
            .map(|l| match l {
                Letter::S => Item::State(s.clone()),
                Letter::E(e) => Item::Event(e.clone()),
            })
            .collect(),
    )
}

// -------------------------------------------------------------- enumeration

fn enumerate_inclusion(
    lhs: &Formula,
    rhs: &Formula,
    env: &ObsEnv,
    bound: usize,
    lits: &BTreeSet<Value>,
) -> Result<Option<Trace>, Truncated> {
    // Observed values can flow into event terms.
    let domain = sample_domain(lits, 1);
    let fs = [lhs, rhs];
    let mentioned: BTreeSet<&'static str> = fs.iter().flat_map(|f| f.patterns()).flat_map(pattern_kinds).collect();
    // Events of unmentioned kinds are indistinguishable: keep one of them.
    let mut other_kept = false;
    let letters: Vec<Event> = alphabet(&fs, env, &domain)
        .into_iter()
        .filter_map(|l| match l {
            Letter::E(e) if mentioned.contains(e.tag()) => Some(e),
            Letter::E(e) if !other_kept => {
                other_kept = true;
                Some(e)
            }
            _ => None,
        })
        .collect();
    // Abstract states over the observed program variables.
    let mut observed: BTreeSet<String> = lhs.observed_vars();
    observed.extend(rhs.observed_vars());
    let mut states = vec![State::new()];
    for x in &observed {
        states = states
            .iter()
            .flat_map(|s| domain.iter().map(move |v| s.update(x, v.clone())))
            .collect();
        if states.len() > 64 {
            states.truncate(64);
        }
    }
    let mut count = 0usize;
    let mut truncated = false;
    // Each step (a state change or an event triple) costs two items of the
    // bound, so that stutter steps do not dominate the search.
    let mut stack: Vec<(Trace, usize)> = states.iter().map(|s| (Trace::singleton(s.clone()), 1)).collect();
    while let Some((t, cost)) = stack.pop() {
        count += 1;
        if count > MAX_ENUMERATED {
            truncated = true;
            break;
        }
        let in_l = member(&t, lhs, env).unwrap_or(false);
        if in_l && !member(&t, rhs, env).unwrap_or(false) {
            return Ok(Some(t));
        }
        if cost + 2 > bound {
            continue;
        }
        let last = t.last_state().cloned().expect("state-terminated");
        for s in &states {
            let mut u = t.clone();
            u.0.push(Item::State(s.clone()));
            stack.push((u, cost + 2));
        }
        for e in &letters {
            let mut u = t.clone();
            u.chop_in_place(&event_triple(&last, e.clone())).expect("same state");
            stack.push((u, cost + 2));
        }
    }
    if truncated {
        Err(Truncated)
    } else {
        Ok(None)
    }
}

/// Members of `f` made of event triples over the fixed state `s` with at
/// most `max_events` events, each matching some pattern of `f`; at most
/// `cap` of them. A sampled under-approximation of `⟦f⟧`.
pub fn witnesses(f: &Formula, env: &ObsEnv, s: &State, max_events: usize, cap: usize) -> Vec<Trace> {
    let pats = f.patterns();
    let eval = |e: &Expr| env.eval(e).map_err(|err| err.to_string());
    let letters: Vec<Event> = alphabet(&[f], env, &[])
        .into_iter()
        .filter_map(|l| match l {
            Letter::E(e) if pats.iter().any(|p| p.excludes(&e, &eval).unwrap_or(false)) => Some(e),
            _ => None,
        })
        .collect();
    let mut out = Vec::new();
    let mut queue = VecDeque::from([(Trace::singleton(s.clone()), 0usize)]);
    while let Some((t, n)) = queue.pop_front() {
        if member(&t, f, env).unwrap_or(false) {
            out.push(t.clone());
            if out.len() >= cap {
                break;
            }
        }
        if n < max_events {
            for e in &letters {
                let mut u = t.clone();
                u.chop_in_place(&event_triple(s, e.clone())).expect("same state");
                queue.push_back((u, n + 1));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(text: &str) -> Formula {
        crate::frontend::parse_formula(text).unwrap()
    }

    #[test]
    fn reflexive() {
        for t in ["~", "~ open(f) ~[close(f)]", "mu X . [true] \\/ ret(_) ** X", "obs x as y . [y == 1]"] {
            assert!(included(&f(t), &f(t), 7).is_included(), "{t}");
        }
    }

    #[test]
    fn exclusion_counterexample() {
        match included(&f("~ open(f) ~"), &f("~[open(f)]"), 9) {
            Verdict::Counterexample { trace, .. } => {
                assert!(trace.events().any(|(_, e)| matches!(e, Event::File { op: FileOp::Open, .. })))
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unit_law() {
        assert_eq!(included(&f("~"), &f("~ ** [true]"), 9), Verdict::IncludedUpToBound { exhaustive: true });
        assert!(included(&f("~ ** [true]"), &f("~"), 9).is_included());
        // Literal concatenation inserts a stutter step.
        assert!(!included(&f("~"), &f("~ . [true]"), 9).is_included());
    }

    #[test]
    fn start_shapes() {
        assert!(included(&f("start(m,1)"), &f("~[start(n,_)]"), 9).is_included());
        assert!(!included(&f("start(m,1)"), &f("~[call(m,_)]"), 9).is_included());
        assert!(included(&f("call(m,1) ** push(m,1)"), &f("start(m,1)"), 9).is_included());
    }

    #[test]
    fn free_variables_are_case_split() {
        assert!(!included(&f("[y > 1]"), &f("[y > 2]"), 5).is_included());
        assert!(included(&f("[y > 2]"), &f("[y > 1]"), 5).is_included());
        assert!(included_under(&f("[true]"), &f("[y > 1]"), 5, &[Expr::bin(crate::expr::BinOp::Gt, Expr::var("y"), Expr::int(3))]).is_included());
    }

    #[test]
    fn conjunction_and_fixed_points() {
        let lhs = f("~[close(_)] /\\ ~ open(a) ~");
        assert!(included(&lhs, &f("~ open(a) ~[close(a)]"), 9).is_included());
        let star = f("mu X . [true] \\/ open(a) ** X");
        assert!(included(&star, &f("~[close(_)]"), 9).is_included());
        assert!(!included(&f("~[close(_)]"), &star, 9).is_included());
    }

    #[test]
    fn arithmetic_over_variables_is_unknown() {
        assert!(matches!(included(&f("[y + 1 > 2]"), &f("~"), 5), Verdict::Unknown(_)));
    }

    #[test]
    fn observation_uses_enumeration() {
        let v = included(&f("obs x as y . [y == 1] ** open(y)"), &f("~ open(1) ~"), 7);
        assert_eq!(v, Verdict::IncludedUpToBound { exhaustive: false });
        assert!(!included(&f("obs x as y . open(y)"), &f("open(1)"), 7).is_included());
    }
}
