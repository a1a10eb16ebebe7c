//! Parser and pretty-printer properties.

mod common;

use async_cat::frontend::{parse_contracts, parse_program, pretty_contract, pretty_program, Stmt};
use common::*;
use proptest::prelude::*;

fn round_trip_program(src: &str) {
    let p = parse_program(src).unwrap();
    let text = pretty_program(&p);
    let q = parse_program(&text).unwrap_or_else(|e| panic!("{e}\n{text}"));
    assert_eq!(p, q, "{text}");
    assert_eq!(pretty_program(&q), text);
}

#[test]
fn corpus_programs_round_trip() {
    round_trip_program(EXAMPLE1);
    round_trip_program(EXAMPLE2);
}

#[test]
fn corpus_contracts_round_trip() {
    for c in parse_contracts(EXAMPLE1_CAT).unwrap() {
        let text = pretty_contract(&c);
        let again = parse_contracts(&text).unwrap_or_else(|e| panic!("{e}\n{text}"));
        assert_eq!(again, vec![c]);
    }
}

#[test]
fn bodies_without_a_final_return_are_rejected() {
    assert!(parse_program("m() { skip; } { m(); }").is_err());
    assert!(parse_program("m() { return; skip; return; } { m(); }").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn random_programs_round_trip(seed in any::<u64>()) {
        let src = random_program_source(&mut rng(seed));
        round_trip_program(&src);
    }

    #[test]
    fn every_body_ends_in_its_only_return(seed in any::<u64>()) {
        let p = parse_program(&random_program_source(&mut rng(seed))).unwrap();
        for m in p.names() {
            let body = p.body(m).unwrap();
            prop_assert_eq!(body.last(), &Stmt::Return);
            prop_assert_eq!(body.count_returns(), 1);
        }
    }

    #[test]
    fn random_contracts_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = parse_program(&random_program_source(&mut r)).unwrap();
        let cs = parse_contracts(&random_contracts_source(&mut r, &p)).unwrap();
        let text: String = cs.iter().map(pretty_contract).collect::<Vec<_>>().join("\n");
        prop_assert_eq!(parse_contracts(&text).unwrap(), cs);
    }
}
