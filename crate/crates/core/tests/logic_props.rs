//! Trace-logic properties: lattice laws, splitting semantics of the
//! composition operators, observations, fixed points and inclusion.

mod common;

use async_cat::expr::{BinOp, Expr, Value};
use async_cat::logic::{included, member, noev_equiv_mu, EvPat, Formula, ObsEnv, Verdict};
use async_cat::trace::{Item, Trace};
use common::*;
use proptest::prelude::*;
use rand::Rng;

fn holds(t: &Trace, f: &Formula) -> bool {
    member(t, f, &ObsEnv::new()).unwrap()
}

fn sub(t: &Trace, from: usize, to: usize) -> Trace {
    Trace(t.items()[from..=to].to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn lattice_laws(seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = random_trace(&mut r, 10);
        let (f, g, h) = (random_formula(&mut r, 2), random_formula(&mut r, 2), random_formula(&mut r, 2));
        let (mf, mg, mh) = (holds(&t, &f), holds(&t, &g), holds(&t, &h));
        prop_assert_eq!(holds(&t, &Formula::and(f.clone(), g.clone())), mf && mg);
        prop_assert_eq!(holds(&t, &Formula::or(f.clone(), g.clone())), mf || mg);
        prop_assert_eq!(holds(&t, &Formula::and(f.clone(), Formula::or(g.clone(), h.clone()))), mf && (mg || mh));
        prop_assert_eq!(holds(&t, &Formula::or(f.clone(), Formula::and(f.clone(), g.clone()))), mf);
        prop_assert!(holds(&t, &Formula::top()));
    }

    #[test]
    fn composition_is_splitting(seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = random_trace(&mut r, 9);
        let (f, g) = (random_formula(&mut r, 1), random_formula(&mut r, 1));
        let n = t.len();
        let concat = (1..n).any(|k| holds(&sub(&t, 0, k - 1), &f) && holds(&sub(&t, k, n - 1), &g));
        let chop = (0..n).any(|k| matches!(t.items()[k], Item::State(_)) && holds(&sub(&t, 0, k), &f) && holds(&sub(&t, k, n - 1), &g));
        prop_assert_eq!(holds(&t, &Formula::concat(f.clone(), g.clone())), concat);
        prop_assert_eq!(holds(&t, &Formula::chop(f, g)), chop);
    }

    #[test]
    fn observation_binds_the_first_state(seed in any::<u64>(), k in 0i64..3) {
        let mut r = rng(seed);
        let t = random_trace(&mut r, 10);
        let rest = random_formula(&mut r, 2);
        let body = Formula::chop(Formula::Pred(Expr::bin(BinOp::Eq, Expr::var("z"), Expr::int(k))), rest);
        let observed = Formula::obs("x", "z", body.clone());
        let x = t.first_state().unwrap().get("x").cloned().unwrap();
        let env = ObsEnv::from_values([("z".to_string(), x.clone())]);
        prop_assert_eq!(holds(&t, &observed), member(&t, &body, &env).unwrap());
        prop_assert_eq!(holds(&t, &observed) && !matches!(x, Value::Int(v) if v == k), false);
    }

    #[test]
    fn noev_is_its_fixed_point_encoding(seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = random_trace(&mut r, 12);
        let ps: Vec<EvPat> = (0..r.gen_range(0..3)).map(|_| random_pattern(&mut r)).collect();
        let (a, b) = noev_equiv_mu(&ps, &t).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn fixed_points_unfold(seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = random_trace(&mut r, 10);
        let (a, b) = (random_formula(&mut r, 1), random_formula(&mut r, 1));
        let mu = Formula::mu("X", Formula::or(a.clone(), Formula::chop(b.clone(), Formula::Var("X".into()))));
        let unfolded = Formula::or(a, Formula::chop(b, mu.clone()));
        prop_assert_eq!(holds(&t, &mu), holds(&t, &unfolded));
    }

    #[test]
    fn inclusion_verdicts_are_sound(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (f, g) = (random_formula(&mut r, 2), random_formula(&mut r, 2));
        match included(&f, &g, 6) {
            Verdict::Counterexample { trace, .. } => {
                prop_assert!(holds(&trace, &f), "witness outside the left language");
                prop_assert!(!holds(&trace, &g), "witness inside the right language");
            }
            Verdict::IncludedUpToBound { .. } => {
                for _ in 0..20 {
                    let t = random_trace(&mut r, 7);
                    prop_assert!(!holds(&t, &f) || holds(&t, &g), "{} ⊆ {} refuted by {:?}", f, g, t);
                }
            }
            Verdict::Unknown(_) => {}
        }
    }
}
