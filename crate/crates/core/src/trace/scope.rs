//! Call scopes, call trees and the schedule function.

use super::{Event, Item, Scope, Trace, TraceError};
use std::collections::{BTreeMap, BTreeSet};

/// The current call scope: the most recently pushed scope not yet popped.
pub fn curr_scope(t: &Trace) -> Result<Scope, TraceError> {
    scope_stack(t.items())?.pop().ok_or(TraceError::NoScope)
}

/// Push/pop stack scan over a sequence of items.
fn scope_stack(items: &[Item]) -> Result<Vec<Scope>, TraceError> {
    let mut stack: Vec<Scope> = Vec::new();
    for it in items {
        match it {
            Item::Event(Event::Push { name, id }) => stack.push((name.clone(), *id)),
            Item::Event(Event::Pop { name, id }) => {
                let pos = stack
                    .iter()
                    .rposition(|(n, i)| n == name && i == id)
                    .ok_or_else(|| TraceError::MalformedTrace(format!("pop({name},{id}) without push")))?;
                stack.remove(pos);
            }
            _ => {}
        }
    }
    Ok(stack)
}

/// `id(τ)`: the largest identifier of a call or invoc event, `0` if none.
pub fn max_call_id(t: &Trace) -> u64 {
    t.events()
        .filter_map(|(_, e)| match e {
            Event::Call { id, .. } | Event::Invoc { id, .. } => Some(*id),
            _ => None,
        })
        .max()
        .unwrap_or(0)
}

/// The call tree of a trace: scopes, caller→callee edges (ordered by call
/// id) and the idle scopes (invoked, not yet pushed).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CallTree {
    pub vertices: BTreeSet<Scope>,
    pub edges: BTreeSet<(Scope, Scope)>,
    pub idle: BTreeSet<Scope>,
}

impl CallTree {
    /// Children of a scope, ordered by call id.
    pub fn children(&self, scope: &Scope) -> Vec<Scope> {
        let mut out: Vec<Scope> =
            self.edges.iter().filter(|(p, _)| p == scope).map(|(_, c)| c.clone()).collect();
        out.sort_by_key(|(_, i)| *i);
        out
    }

    /// Vertices ordered by call id.
    pub fn ordered_vertices(&self) -> Vec<Scope> {
        let mut v: Vec<Scope> = self.vertices.iter().cloned().collect();
        v.sort_by_key(|(_, i)| *i);
        v
    }
}

/// Builds the call tree of `t`.
pub fn call_tree(t: &Trace) -> Result<CallTree, TraceError> {
    let mut tree = CallTree::default();
    let mut stack: Vec<Scope> = Vec::new();
    let mut pushed: BTreeMap<Scope, usize> = BTreeMap::new();
    let mut invoked: Vec<Scope> = Vec::new();
    for it in t.items() {
        let Item::Event(ev) = it else { continue };
        match ev {
            Event::Call { name, id } | Event::Invoc { name, id } => {
                let scope = (name.clone(), *id);
                if let Some(parent) = stack.last() {
                    tree.edges.insert((parent.clone(), scope.clone()));
                }
                tree.vertices.insert(scope.clone());
                if matches!(ev, Event::Invoc { .. }) {
                    invoked.push(scope);
                }
            }
            Event::Push { name, id } => {
                stack.push((name.clone(), *id));
                *pushed.entry((name.clone(), *id)).or_default() += 1;
            }
            Event::Pop { name, id } => {
                let pos = stack
                    .iter()
                    .rposition(|(n, i)| n == name && i == id)
                    .ok_or_else(|| TraceError::MalformedTrace(format!("pop({name},{id}) without push")))?;
                stack.remove(pos);
            }
            _ => {}
        }
    }
    tree.idle = invoked.into_iter().filter(|s| !pushed.contains_key(s)).collect();
    Ok(tree)
}

/// Scheduling disciplines. Only the tree-like discipline is the semantics
/// of the language; the others are the alternative instantiations the
/// schedule function admits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SchedulePolicy {
    /// Children of the current scope that are idle.
    #[default]
    TreeLike,
    /// The idle scope with the least identifier.
    MinId,
    /// Every idle scope.
    Nondeterministic,
}

impl SchedulePolicy {
    /// The schedulable scopes of `t` under this policy.
    pub fn schedule(self, t: &Trace) -> Result<BTreeSet<Scope>, TraceError> {
        let tree = call_tree(t)?;
        Ok(match self {
            SchedulePolicy::TreeLike => {
                let cur = curr_scope(t)?;
                tree.children(&cur).into_iter().filter(|c| tree.idle.contains(c)).collect()
            }
            SchedulePolicy::MinId => tree.idle.iter().min_by_key(|(_, i)| *i).cloned().into_iter().collect(),
            SchedulePolicy::Nondeterministic => tree.idle,
        })
    }
}

/// `schedule(τ) = children(currScp(τ), τ) ∩ V_idle(τ)`.
pub fn schedule(t: &Trace) -> Result<BTreeSet<Scope>, TraceError> {
    SchedulePolicy::TreeLike.schedule(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::{event_triple, State};

    /// Chains event triples over one state.
    pub(crate) fn triples(evs: &[Event]) -> Trace {
        let s = State::new();
        let mut t = Trace::singleton(s.clone());
        for e in evs {
            t.chop_in_place(&event_triple(&s, e.clone())).unwrap();
        }
        t
    }

    fn fig3() -> Trace {
        triples(&[
            Event::call("init", 0),
            Event::push("init", 0),
            Event::call("m", 1),
            Event::push("m", 1),
            Event::invoc("m1", 2),
            Event::invoc("m2", 3),
            Event::ret(1),
            Event::push("m1", 2),
            Event::invoc("m3", 4),
            Event::invoc("m4", 5),
            Event::ret(2),
        ])
    }

    fn sc(n: &str, i: u64) -> Scope {
        (n.to_string(), i)
    }

    #[test]
    fn current_scope_of_the_incomplete_execution() {
        assert_eq!(curr_scope(&fig3()), Ok(sc("m1", 2)));
        let t = triples(&[Event::push("a", 1), Event::pop("a", 1), Event::push("b", 2)]);
        assert_eq!(curr_scope(&t), Ok(sc("b", 2)));
        assert_eq!(curr_scope(&Trace::singleton(State::new())), Err(TraceError::NoScope));
    }

    #[test]
    fn most_recent_identifier() {
        assert_eq!(max_call_id(&fig3()), 5);
        assert_eq!(max_call_id(&triples(&[Event::call("init", 0)])), 0);
        assert_eq!(max_call_id(&triples(&[Event::invoc("a", 3), Event::call("b", 7)])), 7);
        assert_eq!(max_call_id(&Trace::singleton(State::new())), 0);
    }

    #[test]
    fn call_tree_of_the_incomplete_execution() {
        let tree = call_tree(&fig3()).unwrap();
        let v: BTreeSet<Scope> =
            [sc("init", 0), sc("m", 1), sc("m1", 2), sc("m2", 3), sc("m3", 4), sc("m4", 5)].into();
        assert_eq!(tree.vertices, v);
        let e: BTreeSet<(Scope, Scope)> = [
            (sc("init", 0), sc("m", 1)),
            (sc("m", 1), sc("m1", 2)),
            (sc("m", 1), sc("m2", 3)),
            (sc("m1", 2), sc("m3", 4)),
            (sc("m1", 2), sc("m4", 5)),
        ]
        .into();
        assert_eq!(tree.edges, e);
        assert_eq!(tree.idle, [sc("m2", 3), sc("m3", 4), sc("m4", 5)].into());
        assert_eq!(schedule(&fig3()).unwrap(), [sc("m3", 4), sc("m4", 5)].into());
    }

    #[test]
    fn single_vertex_tree() {
        let t = triples(&[Event::call("init", 0), Event::push("init", 0)]);
        let tree = call_tree(&t).unwrap();
        assert_eq!(tree.vertices.len(), 1);
        assert!(tree.idle.is_empty());
        assert!(schedule(&t).unwrap().is_empty());
    }

    #[test]
    fn unmatched_pop_is_malformed() {
        let t = triples(&[Event::pop("a", 1)]);
        assert!(matches!(call_tree(&t), Err(TraceError::MalformedTrace(_))));
    }

    #[test]
    fn alternative_policies() {
        let t = fig3();
        assert_eq!(SchedulePolicy::MinId.schedule(&t).unwrap(), [sc("m2", 3)].into());
        assert_eq!(SchedulePolicy::Nondeterministic.schedule(&t).unwrap().len(), 3);
    }
}
