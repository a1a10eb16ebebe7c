//! Seeded random generators shared by the integration and acceptance tests.
#![allow(dead_code)]

use async_cat::expr::{Expr, Value};
use async_cat::frontend::{parse_contracts, parse_program, ContractDecl, Program, Stmt};
use async_cat::logic::{EvPat, Formula, NameP, Term};
use async_cat::trace::{event_triple, Event, FileOp, Item, State, Trace};
use async_cat::verifier::{Elem, RunMode, Update, OID};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub const EXAMPLE1: &str = include_str!("../../../../corpus/example1.async");
pub const EXAMPLE1_CAT: &str = include_str!("../../../../corpus/example1.cat");
pub const EXAMPLE2: &str = include_str!("../../../../corpus/example2.async");

pub fn example1() -> (Program, Vec<ContractDecl>) {
    (parse_program(EXAMPLE1).unwrap(), parse_contracts(EXAMPLE1_CAT).unwrap())
}

/// One statement over the single variable `file`; calls target procedures
/// with a larger index only, so every program terminates. File operations
/// mostly come in open/use/close groups; bare uses are rarer.
fn simple_stmt(r: &mut StdRng, callees: &[String]) -> String {
    let k = r.gen_range(0..if callees.is_empty() { 12 } else { 16 });
    match k {
        0 | 1 => format!("file = \"{}\"", ["a", "b"].choose(r).unwrap()),
        2 => "open(file)".into(),
        3 => ["close(file)", "write(file)", "read(file)"].choose(r).unwrap().to_string(),
        4 => "skip".into(),
        5..=8 => format!("open(file); {}; close(file)", ["write(file)", "read(file)", "skip"].choose(r).unwrap()),
        9 | 10 => format!("if (file == \"a\") {{ {} }}", ["open(file); close(file)", "skip", "file = \"b\""].choose(r).unwrap()),
        11 => format!("open(file); if (file == \"b\") {{ write(file) }}; close(file)"),
        12 | 13 => format!("!{}()", callees.choose(r).unwrap()),
        _ => format!("{}()", callees.choose(r).unwrap()),
    }
}

/// A random terminating program: up to 4 procedures, up to 6 statements
/// each, over the variable `file`.
pub fn random_program_source(r: &mut StdRng) -> String {
    let n = r.gen_range(1..=4);
    let names: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
    let mut src = String::new();
    for i in 0..n {
        let k = r.gen_range(1..=5);
        let stmts: Vec<String> = (0..k).map(|_| simple_stmt(r, &names[i + 1..])).collect();
        src.push_str(&format!("{}() {{ {}; return; }}\n", names[i], stmts.join("; ")));
    }
    let mut init = vec!["file".to_string(), format!("file = \"{}\"", ["a", "b"].choose(r).unwrap())];
    for _ in 0..r.gen_range(1..=3) {
        init.push(if r.gen_bool(0.7) { format!("{}()", names.choose(r).unwrap()) } else { simple_stmt(r, &names) });
    }
    src.push_str(&format!("{{ {}; }}\n", init.join("; ")));
    src
}

const ASSUMES: [&str; 3] = ["~", "~ open(f) ~[close(f)]", "~ ~[open(f)]"];
const INTERNALS: [&str; 5] = ["~", "~[close(f)]", "~ close(f) ~", "~[open(f)]", "~ write(f) ~"];
const CONTINUES: [&str; 3] = ["~", "~ close(f) ~", "~[write(f)]"];

fn contract_text(name: &str, assume: &str, internal: &str, cont: &str) -> String {
    format!("contract {name} {{ assume: {assume}; pre: [true] obs(file as f); internal: {internal}; post: [true]; continue: {cont}; }}\n")
}

/// Contracts from trivial-to-moderate templates, one per procedure and one
/// for init, which is trivial: its observation sees the default value.
/// Half of the procedures get a contract guided by their body: a procedure
/// that uses the file before opening it assumes an open file.
pub fn random_contracts_source(r: &mut StdRng, program: &Program) -> String {
    let mut src = contract_text("init", "~", "~", "~");
    for m in program.names() {
        if r.gen_bool(0.5) {
            let assume = if uses_before_open(program.body(m).unwrap()) { ASSUMES[1] } else { ASSUMES[0] };
            src.push_str(&contract_text(m, assume, "~", "~"));
            continue;
        }
        let trivial = r.gen_bool(0.3);
        let pick = |r: &mut StdRng, opts: &[&'static str]| if trivial { opts[0] } else { *opts.choose(r).unwrap() };
        let (a, i, c) = (pick(r, &ASSUMES), pick(r, &INTERNALS), pick(r, &CONTINUES));
        src.push_str(&contract_text(m, a, i, c));
    }
    src
}

/// Whether the first file operation of the body (in program order) is not
/// an open.
fn uses_before_open(body: &Stmt) -> bool {
    let mut first = None;
    body.visit(&mut |s| {
        if let (None, Stmt::File(op, _)) = (&first, s) {
            first = Some(*op);
        }
    });
    first.is_some_and(|op| op != FileOp::Open)
}

/// A random statement without synchronous calls, ending with `return`.
pub fn random_async_stmt(r: &mut StdRng, procs: &[String]) -> Stmt {
    let mut parts = Vec::new();
    for _ in 0..r.gen_range(0..=4) {
        let s = loop {
            let s = simple_stmt(r, procs);
            if !s.ends_with("()") || s.starts_with('!') {
                break s;
            }
        };
        parts.push(s);
    }
    parts.push("return".into());
    let stubs: String = procs.iter().map(|m| format!("{m}() {{ return; }}\n")).collect();
    let src = format!("{stubs}stmt() {{ {}; }} {{ file; }}", parts.join("; "));
    parse_program(&src).unwrap().body("stmt").unwrap().clone()
}

/// A random update in the shape symbolic execution produces: state and
/// event updates, invocations with fresh identifiers and synchronous runs,
/// then the return, then asynchronous runs of some pending invocations.
pub fn random_update(r: &mut StdRng, procs: &[String]) -> Update {
    let mut u = Vec::new();
    let mut next = OID + 1;
    let mut pending = Vec::new();
    for _ in 0..r.gen_range(0..=5) {
        match r.gen_range(0..5) {
            0 => u.push(Elem::Assign("file".into(), Expr::Lit(Value::Str(["a", "b"].choose(r).unwrap().to_string())))),
            1 => u.push(Elem::File(*[FileOp::Open, FileOp::Close, FileOp::Write].choose(r).unwrap(), Expr::var("file"))),
            2 | 3 => {
                let m = procs.choose(r).unwrap().clone();
                u.push(Elem::Invoc(m.clone(), next));
                pending.push((m, next));
                next += 1;
            }
            _ => {
                u.push(Elem::Run { name: procs.choose(r).unwrap().clone(), id: next, mode: RunMode::Sync });
                next += 1;
            }
        }
    }
    u.push(Elem::Ret(OID));
    pending.shuffle(r);
    let k = r.gen_range(0..=pending.len());
    for (m, i) in pending.into_iter().take(k) {
        u.push(Elem::Run { name: m, id: i, mode: RunMode::Async });
    }
    Update(u)
}

/// `call(q,0) ** push(q,0)` from `file = 0`: the start of the procedure
/// under inspection.
pub fn base_trace(q: &str) -> Trace {
    let s = State::from_pairs([("file".to_string(), Value::Int(0))]);
    let mut t = event_triple(&s, Event::call(q, OID));
    t.chop_in_place(&event_triple(&s, Event::push(q, OID))).unwrap();
    t
}

/// A random well-formed trace of event triples and state updates with at
/// most `max_items` items, over a small vocabulary.
pub fn random_trace(r: &mut StdRng, max_items: usize) -> Trace {
    let state = |r: &mut StdRng| State::from_pairs([("x".to_string(), Value::Int(r.gen_range(0..3)))]);
    let mut t = Trace::singleton(state(r));
    while t.len() + 2 <= max_items && r.gen_bool(0.8) {
        let s = t.last_state().unwrap().clone();
        if r.gen_bool(0.25) {
            t.0.push(Item::State(state(r)));
        } else {
            t.chop_in_place(&event_triple(&s, random_event(r))).unwrap();
        }
    }
    t
}

pub fn random_event(r: &mut StdRng) -> Event {
    let file = ["a", "b"].choose(r).unwrap().to_string();
    let m = ["m", "n"].choose(r).unwrap();
    let id = r.gen_range(0..3);
    match r.gen_range(0..7) {
        0 => Event::file(FileOp::Open, &file),
        1 => Event::file(FileOp::Close, &file),
        2 => Event::file(FileOp::Write, &file),
        3 => Event::call(m, id),
        4 => Event::push(m, id),
        5 => Event::ret(id),
        _ => Event::pop(m, id),
    }
}

pub fn random_pattern(r: &mut StdRng) -> EvPat {
    let file = |r: &mut StdRng| if r.gen_bool(0.3) { Term::Any } else { Term::Is(Expr::Lit(Value::Str(["a", "b"].choose(r).unwrap().to_string()))) };
    let name = |r: &mut StdRng| if r.gen_bool(0.3) { NameP::Any } else { NameP::Is(["m", "n"].choose(r).unwrap().to_string()) };
    let id = |r: &mut StdRng| if r.gen_bool(0.5) { Term::Any } else { Term::int(r.gen_range(0..3)) };
    match r.gen_range(0..6) {
        0 => EvPat::File(*[FileOp::Open, FileOp::Close, FileOp::Write].choose(r).unwrap(), file(r)),
        1 => EvPat::Call(name(r), id(r)),
        2 => EvPat::Push(name(r), id(r)),
        3 => EvPat::Ret(id(r)),
        4 => EvPat::Pop(name(r), id(r)),
        _ => EvPat::Start(name(r), id(r)),
    }
}

/// A random closed formula of the given depth.
pub fn random_formula(r: &mut StdRng, depth: usize) -> Formula {
    if depth == 0 || r.gen_bool(0.25) {
        return match r.gen_range(0..4) {
            0 => Formula::obs("x", "y", Formula::Pred(Expr::bin(async_cat::expr::BinOp::Eq, Expr::var("y"), Expr::int(r.gen_range(0..3))))),
            1 => Formula::ev(random_pattern(r)),
            2 => Formula::NoEv((0..r.gen_range(0..3)).map(|_| random_pattern(r)).collect()),
            _ => Formula::tt(),
        };
    }
    let a = random_formula(r, depth - 1);
    let b = random_formula(r, depth - 1);
    match r.gen_range(0..5) {
        0 => Formula::and(a, b),
        1 => Formula::or(a, b),
        2 => Formula::concat(a, b),
        3 => Formula::chop(a, b),
        _ => Formula::mu("X", Formula::or(a, Formula::chop(b, Formula::Var("X".into())))),
    }
}
