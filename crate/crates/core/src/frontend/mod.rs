//! Parsing and validation of programs and contracts.

mod ast;
mod lexer;
mod parser;
mod pretty;

pub use ast::{ContractDecl, ProcDecl, Program, Stmt, INIT};
pub use lexer::{tokenize, Tok, Token};
pub use pretty::{pretty_contract, pretty_program, pretty_stmt};

use crate::logic::Formula;
use parser::Parser;
use std::collections::BTreeSet;
use thiserror::Error;

/// Errors raised while parsing or validating source text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrontendError {
    #[error("syntax error at {line}:{col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("duplicate procedure {0:?}")]
    DuplicateProcedure(String),
    #[error("procedure name {0:?} is reserved")]
    ReservedName(String),
    #[error("call to undeclared procedure {name:?} in {caller}")]
    UnresolvedCall { caller: String, name: String },
    #[error("file operand at {line}:{col} must be a string literal or a variable")]
    NonLiteralFile { line: usize, col: usize },
    #[error("procedure {procedure:?} at {line}:{col} must end with return")]
    MissingReturn { procedure: String, line: usize, col: usize },
    #[error("return in {procedure:?} is only allowed as the final statement")]
    MisplacedReturn { procedure: String },
    #[error("unknown procedure {0:?}")]
    UnknownProcedure(String),
    #[error("contract for {procedure}: {condition} violated by free variables {vars:?}")]
    Scoping { procedure: String, condition: String, vars: Vec<String> },
    #[error("contract for {procedure}: {message}")]
    Contract { procedure: String, message: String },
    #[error("duplicate contract for {0:?}")]
    DuplicateContract(String),
    #[error("formula: {0}")]
    Formula(String),
}

impl FrontendError {
    pub(crate) fn syntax(line: usize, col: usize, message: &str) -> FrontendError {
        FrontendError::Syntax { line, col, message: message.to_string() }
    }
}

/// Parses and validates a program.
pub fn parse_program(text: &str) -> Result<Program, FrontendError> {
    let program = Parser::new(text)?.program()?;
    validate_program(&program)?;
    Ok(program)
}

fn validate_program(p: &Program) -> Result<(), FrontendError> {
    let mut names = BTreeSet::new();
    for d in &p.procedures {
        if d.name == INIT {
            return Err(FrontendError::ReservedName(d.name.clone()));
        }
        if !names.insert(d.name.as_str()) {
            return Err(FrontendError::DuplicateProcedure(d.name.clone()));
        }
    }
    let bodies = p.procedures.iter().map(|d| (d.name.as_str(), &d.body)).chain([(INIT, &p.init_body)]);
    for (caller, body) in bodies {
        if body.count_returns() != 1 || *body.last() != Stmt::Return {
            return Err(FrontendError::MisplacedReturn { procedure: caller.to_string() });
        }
        for callee in body.callees() {
            if !names.contains(callee.as_str()) {
                return Err(FrontendError::UnresolvedCall { caller: caller.to_string(), name: callee });
            }
        }
    }
    Ok(())
}

/// The global lookup table: the body of a declared procedure, including its
/// trailing return. The init block is not a lookup-able procedure.
pub fn lookup<'a>(name: &str, program: &'a Program) -> Result<&'a Stmt, FrontendError> {
    if name == INIT {
        return Err(FrontendError::ReservedName(name.to_string()));
    }
    program.body(name).ok_or_else(|| FrontendError::UnknownProcedure(name.to_string()))
}

/// Parses a single contract block.
pub fn parse_contract(text: &str) -> Result<ContractDecl, FrontendError> {
    let mut p = Parser::new(text)?;
    let c = p.contract()?;
    p.expect_eof()?;
    validate_contract(&c)?;
    Ok(c)
}

/// Parses a file of contract blocks; at most one contract per procedure.
pub fn parse_contracts(text: &str) -> Result<Vec<ContractDecl>, FrontendError> {
    let mut p = Parser::new(text)?;
    let mut out: Vec<ContractDecl> = Vec::new();
    while !p.at_eof() {
        let c = p.contract()?;
        validate_contract(&c)?;
        out.push(c);
    }
    Ok(out)
}

/// Parses a trace formula and checks it is closed w.r.t. recursion
/// variables and has no recursion variable under an observation.
pub fn parse_formula(text: &str) -> Result<Formula, FrontendError> {
    let mut p = Parser::new(text)?;
    let f = p.formula()?;
    p.expect_eof()?;
    check_formula(&f).map_err(FrontendError::Formula)?;
    Ok(f)
}

/// Parses an expression.
pub fn parse_expr(text: &str) -> Result<crate::expr::Expr, FrontendError> {
    let mut p = Parser::new(text)?;
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

fn check_formula(f: &Formula) -> Result<(), String> {
    if let Some(x) = f.free_rec_vars().into_iter().next() {
        return Err(format!("unbound recursion variable {x}"));
    }
    if f.rec_var_under_obs() {
        return Err("recursion variable inside an observation".to_string());
    }
    Ok(())
}

fn validate_contract(c: &ContractDecl) -> Result<(), FrontendError> {
    let procedure = c.procedure.clone();
    let contract_err = |message: String| FrontendError::Contract { procedure: procedure.clone(), message };
    let mut seen = BTreeSet::new();
    for (_, y) in c.pre_binders.iter().chain(&c.post_binders) {
        if !seen.insert(y.clone()) {
            return Err(contract_err(format!("logic variable {y} bound twice")));
        }
    }
    for (clause, f) in [("assume", &c.assume), ("internal", &c.internal), ("continue", &c.cont)] {
        check_formula(f).map_err(|m| contract_err(format!("{clause}: {m}")))?;
    }
    let y1 = c.pre_logic_vars();
    let y12: BTreeSet<String> = y1.union(&c.post_logic_vars()).cloned().collect();
    let check = |condition: &str, free: BTreeSet<String>, allowed: &BTreeSet<String>| {
        let bad: Vec<String> = free.difference(allowed).cloned().collect();
        if bad.is_empty() {
            Ok(())
        } else {
            Err(FrontendError::Scoping { procedure: procedure.clone(), condition: condition.to_string(), vars: bad })
        }
    };
    let mut pre_free = c.assume.free_vars();
    pre_free.extend(c.pre.vars());
    check("pre-trace: fv(assume, pre) ⊆ pre binders", pre_free, &y1)?;
    check("internal: fv(internal) ⊆ pre binders", c.internal.free_vars(), &y1)?;
    let mut post_free = c.cont.free_vars();
    post_free.extend(c.post.vars());
    check("post-trace: fv(post, continue) ⊆ pre and post binders", post_free, &y12)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;
    use crate::logic::{EvPat, Term};
    use crate::trace::FileOp;

    const EXAMPLE1: &str = "do() { open(file); !closeF(); operate(); return; }\n\
        operate() { write(file); return; }\n\
        closeF() { close(file); return; }\n\
        { file; file = \"file1.txt\"; do(); file = \"file2.txt\"; do(); }";

    #[test]
    fn example_one_parses() {
        let p = parse_program(EXAMPLE1).unwrap();
        assert_eq!(p.names(), vec!["do", "operate", "closeF"]);
        assert_eq!(p.init_decls, vec!["file".to_string()]);
        let init = p.init_body.flatten();
        assert_eq!(init.len(), 5);
        assert_eq!(*init[4], Stmt::Return);
        assert_eq!(
            *lookup("closeF", &p).unwrap(),
            Stmt::seq(Stmt::File(FileOp::Close, Expr::var("file")), Stmt::Return)
        );
    }

    #[test]
    fn minimal_program() {
        let p = parse_program("{ skip }").unwrap();
        assert!(p.procedures.is_empty());
        assert_eq!(p.init_body, Stmt::seq(Stmt::Skip, Stmt::Return));
    }

    #[test]
    fn program_errors() {
        assert_eq!(
            parse_program("m(){return} m(){return} { m() }"),
            Err(FrontendError::DuplicateProcedure("m".into()))
        );
        assert!(matches!(parse_program("{ m() }"), Err(FrontendError::UnresolvedCall { .. })));
        assert!(matches!(parse_program("init(){return} { skip }"), Err(FrontendError::ReservedName(_))));
        assert!(matches!(parse_program("m(){ open(1); return } { m() }"), Err(FrontendError::NonLiteralFile { .. })));
        assert!(matches!(parse_program("m(){ skip } { m() }"), Err(FrontendError::MissingReturn { .. })));
        assert!(matches!(parse_program("m(){ return; return } { m() }"), Err(FrontendError::MisplacedReturn { .. })));
        assert!(matches!(parse_program("{ x = }"), Err(FrontendError::Syntax { line: 1, .. })));
    }

    #[test]
    fn lookup_errors() {
        let p = parse_program(EXAMPLE1).unwrap();
        assert!(matches!(lookup("init", &p), Err(FrontendError::ReservedName(_))));
        assert!(matches!(lookup("absent", &p), Err(FrontendError::UnknownProcedure(_))));
    }

    #[test]
    fn contract_with_observation() {
        let c = parse_contract(
            "contract closeF { assume: ~ open(f) ~[close(f)]; pre: [true] obs(file as f);\n\
             internal: close(f) ~[open(f)]; post: [true]; continue: ~; }",
        )
        .unwrap();
        assert_eq!(c.pre_binders, vec![("file".to_string(), "f".to_string())]);
        let open_f = Formula::ev(EvPat::file(FileOp::Open, Term::var("f")));
        let no_close = Formula::NoEv(vec![EvPat::file(FileOp::Close, Term::var("f"))]);
        assert_eq!(c.assume, Formula::chop(Formula::chop(Formula::top(), open_f), no_close));
        assert!(c.cont.is_top());
    }

    #[test]
    fn trivial_contract_defaults() {
        let c = parse_contract("contract init { }").unwrap();
        assert_eq!(c, ContractDecl::trivial("init"));
    }

    #[test]
    fn scoping_violation_is_reported() {
        let err = parse_contract("contract m { internal: open(g); }").unwrap_err();
        match err {
            FrontendError::Scoping { condition, vars, .. } => {
                assert!(condition.starts_with("internal"));
                assert_eq!(vars, vec!["g".to_string()]);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_contract("contract m { pre: [true] obs(x as y, z as y); }"),
            Err(FrontendError::Contract { .. })
        ));
    }

    #[test]
    fn formula_syntax() {
        let f = parse_formula("mu X . [true] \\/ ~[ret(_)] . X").unwrap();
        assert!(matches!(f, Formula::Mu(..)));
        assert!(parse_formula("X").is_err());
        assert!(parse_formula("mu X . obs x as y . X").is_err());
        let g = parse_formula("~[start(m,1), pop(_,_)] ** [x > 1 && y == \"a\"]").unwrap();
        assert_eq!(parse_formula(&g.to_string()).unwrap(), g);
    }
}
