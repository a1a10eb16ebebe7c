//! Properties of traces, chop, call scopes and call trees.

mod common;

use async_cat::frontend::parse_program;
use async_cat::interp::{enumerate_traces, Limits};
use async_cat::trace::{
    call_tree, chop, curr_scope, event_triple, matches_schematic, schedule, Event, EventShape, Item, Scope, Segment, State, Trace,
};
use common::*;
use proptest::prelude::*;
use std::collections::BTreeSet;

/// Splits `t` at two state positions into three chop-able parts.
fn split3(t: &Trace, a: usize, b: usize) -> Option<(Trace, Trace, Trace)> {
    let states: Vec<usize> = t.items().iter().enumerate().filter(|(_, it)| it.as_state().is_some()).map(|(k, _)| k).collect();
    let (i, j) = (states[a % states.len()], states[b % states.len()]);
    let (i, j) = (i.min(j), i.max(j));
    let items = t.items();
    Some((Trace(items[..=i].to_vec()), Trace(items[i..=j].to_vec()), Trace(items[j..].to_vec())))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn chop_is_associative(seed in any::<u64>(), a in 0usize..16, b in 0usize..16) {
        let t = random_trace(&mut rng(seed), 12);
        let (x, y, z) = split3(&t, a, b).unwrap();
        let left = chop(&chop(&x, &y).unwrap(), &z).unwrap();
        let right = chop(&x, &chop(&y, &z).unwrap()).unwrap();
        prop_assert_eq!(&left, &right);
        prop_assert_eq!(left, t);
    }

    #[test]
    fn chop_definedness_is_associative(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>()) {
        let (x, y, z) = (random_trace(&mut rng(s1), 6), random_trace(&mut rng(s2), 6), random_trace(&mut rng(s3), 6));
        let left = chop(&x, &y).and_then(|xy| chop(&xy, &z));
        let right = chop(&y, &z).and_then(|yz| chop(&x, &yz));
        prop_assert_eq!(left.is_ok(), right.is_ok());
        if let (Ok(l), Ok(r)) = (left, right) {
            prop_assert_eq!(l, r);
        }
    }

    #[test]
    fn boundary_singletons_are_units(seed in any::<u64>()) {
        let t = random_trace(&mut rng(seed), 12);
        let first = Trace::singleton(t.first_state().unwrap().clone());
        let last = Trace::singleton(t.last_state().unwrap().clone());
        prop_assert_eq!(chop(&first, &t).unwrap(), t.clone());
        prop_assert_eq!(chop(&t, &last).unwrap(), t);
    }

    #[test]
    fn interpreter_traces_are_well_formed(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = parse_program(&random_program_source(&mut r)).unwrap();
        for t in enumerate_traces(&p, &Limits::default()).unwrap() {
            // Events are flanked by equal states.
            prop_assert!(t.is_well_formed());
            for (k, _) in t.events() {
                prop_assert_eq!(t.items()[k - 1].as_state(), t.items()[k + 1].as_state());
            }
            // Call identifiers are unique.
            let ids: Vec<u64> = t.events().filter_map(|(_, e)| match e {
                Event::Call { id, .. } | Event::Invoc { id, .. } => Some(*id),
                _ => None,
            }).collect();
            let unique: BTreeSet<u64> = ids.iter().copied().collect();
            prop_assert_eq!(ids.len(), unique.len());
            // Maximal traces end with the init pop and nothing schedulable.
            prop_assert_eq!(t.events().last().map(|(_, e)| e.clone()), Some(Event::pop("init", 0)));
            // Idle vertices are leaves; the root is never idle.
            for k in 0..t.len() {
                let tree = call_tree(&t.prefix(k + 1)).unwrap();
                prop_assert!(!tree.idle.contains(&("init".to_string(), 0)));
                for v in &tree.idle {
                    prop_assert!(tree.children(v).is_empty());
                }
            }
        }
    }
}

/// The schematic definition of the current scope: the scope of a final
/// push with no push/pop after it, or — if the trace ends with a matched
/// push/pop pair followed by no push/pop — the current scope before that
/// push.
fn schematic_curr_scope(t: &Trace) -> BTreeSet<Scope> {
    let items = t.items();
    let push = |s: &Scope| EventShape::scoped("push", Some(&s.0), Some(s.1));
    let pop = |s: &Scope| EventShape::scoped("pop", Some(&s.0), Some(s.1));
    let quiet = Segment::NoEv(vec![EventShape::tag("push"), EventShape::tag("pop")]);
    let mut out = BTreeSet::new();
    for (p, e) in t.events() {
        let Event::Push { name, id } = e else { continue };
        let scope: Scope = (name.clone(), *id);
        let rest = Trace(items[p - 1..].to_vec());
        if matches_schematic(&rest, &[Segment::Triple(push(&scope)), quiet.clone()]) {
            out.insert(scope.clone());
        }
        if matches_schematic(&rest, &[Segment::Triple(push(&scope)), Segment::NoEv(vec![]), Segment::Triple(pop(&scope)), quiet.clone()])
            || matches_schematic(&rest, &[Segment::Triple(push(&scope)), Segment::Triple(pop(&scope)), quiet.clone()])
        {
            out.extend(schematic_curr_scope(&Trace(items[..p].to_vec())));
        }
    }
    out
}

/// Every pop closes the innermost open push, as in interpreter traces.
fn well_nested(t: &Trace) -> bool {
    let mut open: Vec<(String, u64)> = Vec::new();
    for (_, e) in t.events() {
        match e {
            Event::Push { name, id } => open.push((name.clone(), *id)),
            Event::Pop { name, id } if open.last() == Some(&(name.clone(), *id)) => {
                open.pop();
            }
            Event::Pop { .. } => return false,
            _ => {}
        }
    }
    true
}

#[test]
fn current_scope_agrees_with_schematic_definition() {
    let s = State::new();
    let alphabet = [Event::push("m", 1), Event::pop("m", 1), Event::push("n", 2)];
    let mut layer = vec![Trace::singleton(s.clone())];
    let mut checked = 0;
    let mut compared = 0;
    let extend = |t: &Trace, next: &mut Vec<Trace>| {
        for e in &alphabet {
            let mut u = t.clone();
            u.chop_in_place(&event_triple(&s, e.clone())).unwrap();
            next.push(u);
        }
    };
    // Up to 5 events: 11 items.
    for _ in 0..=5 {
        let mut next = Vec::new();
        for t in &layer {
            let pushes: Vec<&Event> = t.events().map(|(_, e)| e).filter(|e| matches!(e, Event::Push { .. })).collect();
            let distinct: BTreeSet<String> = pushes.iter().map(|e| e.to_string()).collect();
            let schematic = schematic_curr_scope(t);
            // Outside well-nested traces the two definitions diverge; the
            // interpreter only produces well-nested ones.
            if !well_nested(t) {
                checked += 1;
                extend(t, &mut next);
                continue;
            }
            compared += 1;
            match curr_scope(t) {
                Ok(scope) if distinct.len() == pushes.len() => assert_eq!(schematic, BTreeSet::from([scope]), "{t:?}"),
                Ok(scope) => assert!(schematic.contains(&scope), "{t:?}"),
                Err(_) if distinct.len() == pushes.len() => assert!(schematic.is_empty(), "{t:?}: {schematic:?}"),
                Err(_) => {}
            }
            checked += 1;
            extend(t, &mut next);
        }
        layer = next;
    }
    assert_eq!(checked, 1 + 3 + 9 + 27 + 81 + 243);
    assert!(compared > 100, "{compared}");
}

#[test]
fn schedule_of_example_two_is_empty_at_the_end() {
    let p = parse_program(EXAMPLE2).unwrap();
    for t in enumerate_traces(&p, &Limits::default()).unwrap() {
        // After the final pop there is no current scope.
        assert!(schedule(&t).is_err() || schedule(&t).unwrap().is_empty());
        assert!(matches!(t.items().last(), Some(Item::State(_))));
    }
}
