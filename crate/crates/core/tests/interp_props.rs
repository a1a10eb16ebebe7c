//! Interpreter properties: determinism, prefix closure and composition.

mod common;

use async_cat::frontend::parse_program;
use async_cat::interp::{enumerate_traces, eval_global, eval_global_cont, eval_local, eval_local_big, initial_config, step_global, Cont, Limits};
use async_cat::trace::State;
use async_cat::expr::Value;
use common::*;
use proptest::prelude::*;
use rand::Rng;
use std::collections::BTreeSet;

fn keys(ts: &[async_cat::trace::Trace]) -> BTreeSet<String> {
    ts.iter().map(|t| format!("{t:?}")).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn local_steps_are_deterministic(seed in any::<u64>(), v in 0i64..3, id in 0u64..5) {
        let mut r = rng(seed);
        let s = random_async_stmt(&mut r, &["p0".to_string(), "p1".to_string()]);
        let sigma = State::from_pairs([("file".to_string(), Value::Int(v))]);
        prop_assert_eq!(eval_local(&s, &sigma, id, 0), eval_local(&s, &sigma, id, 0));
        // The local trace starts in the given state.
        let (t, _) = eval_local(&s, &sigma, id, 0);
        prop_assert_eq!(t.first_state(), Some(&sigma));
    }

    #[test]
    fn random_walks_are_prefixes_of_maximal_traces(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = parse_program(&random_program_source(&mut r)).unwrap();
        let maximal = enumerate_traces(&p, &Limits::default()).unwrap();
        let mut cfg = initial_config(&p);
        loop {
            let t = &cfg.trace;
            prop_assert!(maximal.iter().any(|m| m.len() >= t.len() && m.items()[..t.len()] == t.items()[..]));
            let next = step_global(&cfg, &p).unwrap();
            if next.is_empty() {
                prop_assert!(maximal.contains(&cfg.trace));
                break;
            }
            let k = r.gen_range(0..next.len());
            cfg = next.into_iter().nth(k).unwrap().1;
        }
    }

    #[test]
    fn global_semantics_is_local_then_global(seed in any::<u64>()) {
        let mut r = rng(seed);
        let limits = Limits::default();
        let p = parse_program(&random_program_source(&mut r)).unwrap();
        let procs: Vec<String> = p.names().into_iter().map(String::from).collect();
        let s = random_async_stmt(&mut r, &procs);
        let t = initial_config(&p).trace;
        let global = eval_global(&s, &t, &p, &limits).unwrap();
        let mut composed = Vec::new();
        for l in eval_local_big(&s, &t, &p, &limits).unwrap() {
            let mid = t.chop(&l).unwrap();
            for g in eval_global_cont(Cont::Empty, &mid, &p, &limits).unwrap() {
                composed.push(l.chop(&g).unwrap());
            }
        }
        prop_assert!(!global.is_empty());
        prop_assert_eq!(keys(&global), keys(&composed));
    }

    #[test]
    fn enumeration_is_deterministic(seed in any::<u64>()) {
        let p = parse_program(&random_program_source(&mut rng(seed))).unwrap();
        let limits = Limits::default();
        prop_assert_eq!(enumerate_traces(&p, &limits).unwrap(), enumerate_traces(&p, &limits).unwrap());
    }
}
