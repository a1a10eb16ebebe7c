//! Membership of a concrete trace in a formula's denotation.
//!
//! Every subformula is evaluated to the set of index intervals `[i, j]` of
//! the trace whose sub-trace it denotes. All atoms denote intervals that
//! begin and end at state items, so chop can glue on a shared state and
//! concatenation on adjacent positions. Fixed points are computed by Kleene
//! iteration, which terminates because there are finitely many intervals.

use super::ast::{EvPat, Formula};
use super::LogicError;
use crate::expr::{Expr, Value};
use crate::trace::{Event, Item, State, Trace};
use std::collections::{BTreeMap, HashMap};

/// The value bound to a logic variable by an observation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Binding {
    Value(Value),
    /// The observed program variable was unbound in the observed state; any
    /// use of the logic variable is an error.
    Unbound { program_var: String },
}

/// Observation environment: logic variables (and skolem constants) to the
/// values they denote.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ObsEnv(BTreeMap<String, Binding>);

impl ObsEnv {
    pub fn new() -> ObsEnv {
        ObsEnv::default()
    }

    /// Binds `y` to the value of program variable `x` in `state`.
    pub fn observe(&mut self, y: &str, x: &str, state: &State) {
        let b = match state.get(x) {
            Some(v) => Binding::Value(v.clone()),
            None => Binding::Unbound { program_var: x.to_string() },
        };
        self.0.insert(y.to_string(), b);
    }

    /// Binds `y` directly to a value.
    pub fn bind(&mut self, y: &str, v: Value) {
        self.0.insert(y.to_string(), Binding::Value(v));
    }

    pub fn get(&self, y: &str) -> Option<&Binding> {
        self.0.get(y)
    }

    pub fn from_values<I: IntoIterator<Item = (String, Value)>>(it: I) -> ObsEnv {
        ObsEnv(it.into_iter().map(|(k, v)| (k, Binding::Value(v))).collect())
    }

    /// Evaluates an expression over logic variables.
    pub fn eval(&self, e: &Expr) -> Result<Value, LogicError> {
        e.eval(&|y: &str| match self.0.get(y) {
            Some(Binding::Value(v)) => Some(v.clone()),
            _ => None,
        })
        .map_err(|y| match self.0.get(&y) {
            Some(Binding::Unbound { program_var }) => {
                LogicError::UnboundProgramVar { logic_var: y, program_var: program_var.clone() }
            }
            _ => LogicError::UnboundLogicVar(y),
        })
    }
}

/// A set of intervals `[i, j]` over a trace of `n` items, stored as one
/// bit row per start position.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Intervals {
    n: usize,
    w: usize,
    bits: Vec<u64>,
}

impl Intervals {
    pub(crate) fn empty(n: usize) -> Intervals {
        let w = n.div_ceil(64).max(1);
        Intervals { n, w, bits: vec![0; n * w] }
    }

    pub(crate) fn contains(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && self.bits[i * self.w + j / 64] >> (j % 64) & 1 == 1
    }

    pub(crate) fn insert(&mut self, i: usize, j: usize) {
        self.bits[i * self.w + j / 64] |= 1 << (j % 64);
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.w..(i + 1) * self.w]
    }

    fn ends(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(i).iter().enumerate().flat_map(|(wi, &word)| {
            (0..64).filter(move |b| word >> b & 1 == 1).map(move |b| wi * 64 + b)
        })
    }

    fn or_row_into(&mut self, dst: usize, src: &Intervals, src_row: usize) {
        let w = self.w;
        for (d, s) in self.bits[dst * w..(dst + 1) * w].iter_mut().zip(src.row(src_row)) {
            *d |= *s;
        }
    }

    pub(crate) fn union_with(&mut self, o: &Intervals) {
        self.bits.iter_mut().zip(&o.bits).for_each(|(a, b)| *a |= *b);
    }

    pub(crate) fn intersect_with(&mut self, o: &Intervals) {
        self.bits.iter_mut().zip(&o.bits).for_each(|(a, b)| *a &= *b);
    }

    /// `[i,k] ∈ self`, `[k+1,j] ∈ o` ⇒ `[i,j]`.
    pub(crate) fn concat(&self, o: &Intervals) -> Intervals {
        let mut r = Intervals::empty(self.n);
        for i in 0..self.n {
            let ks: Vec<usize> = self.ends(i).collect();
            for k in ks {
                if k + 1 < self.n {
                    r.or_row_into(i, o, k + 1);
                }
            }
        }
        r
    }

    /// `[i,k] ∈ self`, `[k,j] ∈ o`, item `k` a state ⇒ `[i,j]`.
    pub(crate) fn chop(&self, o: &Intervals, is_state: &[bool]) -> Intervals {
        let mut r = Intervals::empty(self.n);
        for i in 0..self.n {
            let ks: Vec<usize> = self.ends(i).collect();
            for k in ks {
                if is_state[k] {
                    r.or_row_into(i, o, k);
                }
            }
        }
        r
    }

    fn keep_rows(&mut self, keep: &dyn Fn(usize) -> bool) {
        for i in 0..self.n {
            if !keep(i) {
                self.bits[i * self.w..(i + 1) * self.w].iter_mut().for_each(|b| *b = 0);
            }
        }
    }
}

struct Ctx<'a> {
    items: &'a [Item],
    is_state: Vec<bool>,
}

impl<'a> Ctx<'a> {
    fn new(t: &'a Trace) -> Ctx<'a> {
        let items = t.items();
        Ctx { items, is_state: items.iter().map(|it| it.as_state().is_some()).collect() }
    }

    fn n(&self) -> usize {
        self.items.len()
    }

    fn state(&self, i: usize) -> Option<&State> {
        self.items.get(i).and_then(Item::as_state)
    }

    fn event(&self, i: usize) -> Option<&Event> {
        self.items.get(i).and_then(Item::as_event)
    }

    /// Whether the event at `e` is flanked by two equal states.
    fn flanked(&self, e: usize) -> bool {
        e >= 1 && matches!((self.state(e - 1), self.state(e + 1)), (Some(a), Some(b)) if a == b)
    }

    fn matches(&self, p: &EvPat, ev: &Event, env: &ObsEnv) -> Result<bool, LogicError> {
        let err = std::cell::RefCell::new(None);
        let r = p.matches_event(ev, &|e: &Expr| {
            env.eval(e).map_err(|x| {
                *err.borrow_mut() = Some(x);
                String::new()
            })
        });
        match (r, err.into_inner()) {
            (Ok(b), _) => Ok(b),
            (Err(_), Some(e)) => Err(e),
            (Err(m), None) => Err(LogicError::UnboundLogicVar(m)),
        }
    }

    fn excludes(&self, ps: &[EvPat], ev: &Event, env: &ObsEnv) -> Result<bool, LogicError> {
        for p in ps {
            let hit = match (p, ev) {
                (EvPat::Start(n, t), Event::Call { .. }) => {
                    self.matches(&EvPat::Call(n.clone(), t.clone()), ev, env)?
                }
                _ => self.matches(p, ev, env)?,
            };
            if hit {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn eval(&self, f: &Formula, env: &ObsEnv, rec: &mut HashMap<String, Intervals>) -> Result<Intervals, LogicError> {
        let n = self.n();
        let mut r = Intervals::empty(n);
        match f {
            Formula::Pred(e) => {
                if env.eval(e)?.is_true() {
                    (0..n).filter(|&i| self.is_state[i]).for_each(|i| r.insert(i, i));
                }
            }
            Formula::Var(x) => {
                return rec.get(x).cloned().ok_or_else(|| LogicError::UnboundRecVar(x.clone()));
            }
            Formula::Ev(p) => {
                for e in 1..n.saturating_sub(1) {
                    let Some(ev) = self.event(e) else { continue };
                    if !self.flanked(e) || !self.matches(p, ev, env)? {
                        continue;
                    }
                    r.insert(e - 1, e + 1);
                    // A synchronous start is the call triple chopped with the push triple.
                    if let (EvPat::Start(..), Event::Push { name, id }) = (p, ev) {
                        if e >= 3 && self.flanked(e - 2) && self.state(e - 1) == self.state(e + 1) {
                            if let Some(Event::Call { name: cn, id: ci }) = self.event(e - 2) {
                                if cn == name && ci == id {
                                    r.insert(e - 3, e + 1);
                                }
                            }
                        }
                    }
                }
            }
            Formula::NoEv(ps) => {
                let mut excluded = vec![false; n];
                for (k, it) in self.items.iter().enumerate() {
                    if let Item::Event(ev) = it {
                        excluded[k] = self.excludes(ps, ev, env)?;
                    }
                }
                for i in (0..n).filter(|&i| self.is_state[i]) {
                    for j in i..n {
                        if excluded[j] {
                            break;
                        }
                        if self.is_state[j] {
                            r.insert(i, j);
                        }
                    }
                }
            }
            Formula::And(a, b) => {
                r = self.eval(a, env, rec)?;
                r.intersect_with(&self.eval(b, env, rec)?);
            }
            Formula::Or(a, b) => {
                r = self.eval(a, env, rec)?;
                r.union_with(&self.eval(b, env, rec)?);
            }
            Formula::Concat(a, b) => r = self.eval(a, env, rec)?.concat(&self.eval(b, env, rec)?),
            Formula::Chop(a, b) => r = self.eval(a, env, rec)?.chop(&self.eval(b, env, rec)?, &self.is_state),
            Formula::Mu(x, body) => {
                let saved = rec.remove(x);
                let mut cur = Intervals::empty(n);
                loop {
                    rec.insert(x.clone(), cur.clone());
                    let next = self.eval(body, env, rec)?;
                    if next == cur {
                        break;
                    }
                    cur = next;
                }
                rec.remove(x);
                if let Some(s) = saved {
                    rec.insert(x.clone(), s);
                }
                r = cur;
            }
            Formula::Obs { x, y, body } => {
                // Group start positions by the observed value.
                let mut groups: BTreeMap<Option<Value>, Vec<usize>> = BTreeMap::new();
                for i in (0..n).filter(|&i| self.is_state[i]) {
                    let v = self.state(i).and_then(|s| s.get(x)).cloned();
                    groups.entry(v).or_default().push(i);
                }
                for (v, starts) in groups {
                    let mut env2 = env.clone();
                    match v {
                        Some(v) => env2.bind(y, v),
                        None => {
                            env2.0.insert(y.clone(), Binding::Unbound { program_var: x.clone() });
                        }
                    }
                    let mut sub = self.eval(body, &env2, rec)?;
                    let mut keep = vec![false; n];
                    starts.iter().for_each(|&i| keep[i] = true);
                    sub.keep_rows(&|i| keep[i]);
                    r.union_with(&sub);
                }
            }
        }
        Ok(r)
    }
}

/// Whether `t ∈ ⟦f⟧` under the observation environment `env`.
pub fn member(t: &Trace, f: &Formula, env: &ObsEnv) -> Result<bool, LogicError> {
    if t.is_empty() {
        return Ok(false);
    }
    let ctx = Ctx::new(t);
    let r = ctx.eval(f, env, &mut HashMap::new())?;
    Ok(r.contains(0, t.len() - 1))
}

/// Evaluates `⌐[ps]` twice: with the primitive operator, and with the
/// fixed-point encoding `μX.(NoEv ∨ NoEv · X)` where `NoEv` holds on every
/// single item that is not an excluded event. Both components agree on
/// well-formed traces.
pub fn noev_equiv_mu(ps: &[EvPat], t: &Trace) -> Result<(bool, bool), LogicError> {
    let env = ObsEnv::new();
    let primitive = member(t, &Formula::NoEv(ps.to_vec()), &env)?;
    if t.is_empty() {
        return Ok((primitive, false));
    }
    let ctx = Ctx::new(t);
    let n = t.len();
    let mut atom = Intervals::empty(n);
    for (i, it) in t.items().iter().enumerate() {
        let ok = match it {
            Item::State(_) => true,
            Item::Event(ev) => !ctx.excludes(ps, ev, &env)?,
        };
        if ok {
            atom.insert(i, i);
        }
    }
    let mut cur = Intervals::empty(n);
    loop {
        let mut next = atom.clone();
        next.union_with(&atom.concat(&cur));
        if next == cur {
            break;
        }
        cur = next;
    }
    Ok((primitive, cur.contains(0, n - 1)))
}
