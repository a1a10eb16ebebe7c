//! Abstract syntax of programs and contracts.

use crate::expr::Expr;
use crate::logic::Formula;
use crate::trace::FileOp;
use std::collections::BTreeSet;

/// Statements.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Stmt {
    Skip,
    Assign(String, Expr),
    SyncCall(String),
    AsyncCall(String),
    If(Expr, Box<Stmt>),
    Seq(Box<Stmt>, Box<Stmt>),
    Return,
    /// A file operation; the operand is a string literal or a variable.
    File(FileOp, Expr),
}

impl Stmt {
    pub fn seq(a: Stmt, b: Stmt) -> Stmt {
        Stmt::Seq(Box::new(a), Box::new(b))
    }

    /// Right-associated sequence of a non-empty list.
    pub fn seq_all(stmts: Vec<Stmt>) -> Stmt {
        let mut it = stmts.into_iter().rev();
        let last = it.next().expect("seq_all of an empty list");
        it.fold(last, |acc, s| Stmt::seq(s, acc))
    }

    /// Flattens a sequence into its components.
    pub fn flatten(&self) -> Vec<&Stmt> {
        match self {
            Stmt::Seq(a, b) => {
                let mut v = a.flatten();
                v.extend(b.flatten());
                v
            }
            s => vec![s],
        }
    }

    /// The final statement of a sequence.
    pub fn last(&self) -> &Stmt {
        match self {
            Stmt::Seq(_, b) => b.last(),
            s => s,
        }
    }

    /// Names of procedures called or invoked anywhere in the statement.
    pub fn callees(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |s| {
            if let Stmt::SyncCall(m) | Stmt::AsyncCall(m) = s {
                out.insert(m.clone());
            }
        });
        out
    }

    /// Variables assigned anywhere in the statement.
    pub fn assigned(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |s| {
            if let Stmt::Assign(x, _) = s {
                out.insert(x.clone());
            }
        });
        out
    }

    /// Number of return statements.
    pub fn count_returns(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |s| {
            if matches!(s, Stmt::Return) {
                n += 1
            }
        });
        n
    }

    /// Pre-order traversal.
    pub fn visit(&self, f: &mut dyn FnMut(&Stmt)) {
        f(self);
        match self {
            Stmt::If(_, s) => s.visit(f),
            Stmt::Seq(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            _ => {}
        }
    }

    /// The body without its trailing return (`s'` in `m(){s'; return}`);
    /// `None` when the body is just `return`.
    pub fn strip_return(&self) -> Option<Stmt> {
        match self {
            Stmt::Return => None,
            Stmt::Seq(a, b) => match b.strip_return() {
                None => Some((**a).clone()),
                Some(rest) => Some(Stmt::seq((**a).clone(), rest)),
            },
            s => Some(s.clone()),
        }
    }
}

/// A procedure declaration `m(){ s; return }`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProcDecl {
    pub name: String,
    pub body: Stmt,
}

/// A program: procedures plus the init block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    pub procedures: Vec<ProcDecl>,
    pub init_decls: Vec<String>,
    /// The init body, including the implicit trailing return.
    pub init_body: Stmt,
}

/// Name under which the init block is treated as a procedure.
pub const INIT: &str = "init";

impl Program {
    /// The body of a procedure (including its trailing return).
    pub fn body(&self, name: &str) -> Option<&Stmt> {
        self.procedures.iter().find(|p| p.name == name).map(|p| &p.body)
    }

    /// Names of all procedures, in declaration order.
    pub fn names(&self) -> Vec<&str> {
        self.procedures.iter().map(|p| p.name.as_str()).collect()
    }

    /// Variables a procedure may assign, including everything executed in
    /// its scope by called and invoked procedures (transitively).
    pub fn may_assign(&self, name: &str) -> BTreeSet<String> {
        let mut seen = BTreeSet::new();
        let mut todo = vec![name.to_string()];
        let mut out = BTreeSet::new();
        while let Some(m) = todo.pop() {
            if !seen.insert(m.clone()) {
                continue;
            }
            let body = if m == INIT { Some(&self.init_body) } else { self.body(&m) };
            if let Some(b) = body {
                out.extend(b.assigned());
                todo.extend(b.callees());
            }
        }
        out
    }
}

/// A context-aware trace contract for one procedure.
///
/// Observation binders of the pre-condition are anchored at the state in
/// which the procedure starts and are in scope in every clause; binders of
/// the post-condition are anchored at the state of the procedure's pop and
/// are in scope in the post-condition and the post-trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractDecl {
    pub procedure: String,
    /// `θ'_a`: the pre-trace.
    pub assume: Formula,
    /// `x̄1 as ȳ1`.
    pub pre_binders: Vec<(String, String)>,
    /// `q_a`.
    pub pre: Expr,
    /// `θ'_s`: the internal behaviour.
    pub internal: Formula,
    /// `x̄2 as ȳ2`.
    pub post_binders: Vec<(String, String)>,
    /// `q_c`.
    pub post: Expr,
    /// `θ'_c`: the post-trace.
    pub cont: Formula,
}

impl ContractDecl {
    /// The trivial contract: every clause unrestricted.
    pub fn trivial(procedure: &str) -> ContractDecl {
        ContractDecl {
            procedure: procedure.to_string(),
            assume: Formula::top(),
            pre_binders: Vec::new(),
            pre: Expr::bool(true),
            internal: Formula::top(),
            post_binders: Vec::new(),
            post: Expr::bool(true),
            cont: Formula::top(),
        }
    }

    pub fn pre_logic_vars(&self) -> BTreeSet<String> {
        self.pre_binders.iter().map(|(_, y)| y.clone()).collect()
    }

    pub fn post_logic_vars(&self) -> BTreeSet<String> {
        self.post_binders.iter().map(|(_, y)| y.clone()).collect()
    }
}
