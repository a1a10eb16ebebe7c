//! Pretty-printing back to concrete syntax; `parse ∘ pretty` is the identity
//! on validated ASTs.

use super::ast::{ContractDecl, Program, Stmt};

/// Renders a statement sequence, one statement per line.
pub fn pretty_stmt(s: &Stmt, indent: usize) -> String {
    let pad = "  ".repeat(indent);
    s.flatten()
        .into_iter()
        .map(|s| match s {
            Stmt::If(e, body) => format!("{pad}if ({e}) {{\n{}\n{pad}}}", pretty_stmt(body, indent + 1)),
            other => format!("{pad}{};", atom(other)),
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn atom(s: &Stmt) -> String {
    match s {
        Stmt::Skip => "skip".into(),
        Stmt::Assign(x, e) => format!("{x} = {e}"),
        Stmt::SyncCall(m) => format!("{m}()"),
        Stmt::AsyncCall(m) => format!("!{m}()"),
        Stmt::Return => "return".into(),
        Stmt::File(op, e) => format!("{}({e})", op.keyword()),
        Stmt::If(..) | Stmt::Seq(..) => unreachable!("flattened"),
    }
}

/// Renders a whole program. The implicit trailing return of the init block
/// is omitted.
pub fn pretty_program(p: &Program) -> String {
    let mut out = String::new();
    for d in &p.procedures {
        out.push_str(&format!("{}() {{\n{}\n}}\n", d.name, pretty_stmt(&d.body, 1)));
    }
    out.push_str("{\n");
    for x in &p.init_decls {
        out.push_str(&format!("  {x};\n"));
    }
    if let Some(body) = p.init_body.strip_return() {
        out.push_str(&pretty_stmt(&body, 1));
        out.push('\n');
    }
    out.push_str("}\n");
    out
}

fn binders(b: &[(String, String)]) -> String {
    if b.is_empty() {
        String::new()
    } else {
        let list: Vec<String> = b.iter().map(|(x, y)| format!("{x} as {y}")).collect();
        format!(" obs({})", list.join(", "))
    }
}

/// Renders a contract block.
pub fn pretty_contract(c: &ContractDecl) -> String {
    format!(
        "contract {} {{\n  assume: {};\n  pre: [{}]{};\n  internal: {};\n  post: [{}]{};\n  continue: {};\n}}\n",
        c.procedure,
        c.assume,
        c.pre,
        binders(&c.pre_binders),
        c.internal,
        c.post,
        binders(&c.post_binders),
        c.cont
    )
}
