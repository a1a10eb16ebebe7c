//! `acat`: command-line front end for the async-cat library.
//!
//! Exit codes: 0 ok, 1 semantic violation, 2 unproved, 3 error.

use async_cat::contracts::program_correct;
use async_cat::expr::Expr;
use async_cat::frontend::{parse_contracts, parse_expr, parse_formula, parse_program, pretty_contract, pretty_program, ContractDecl, Program};
use async_cat::interp::{check_file_correct, enumerate_traces, Limits, DEFAULT_MAX_STEPS, DEFAULT_MAX_TRACES};
use async_cat::logic::{member, ObsEnv};
use async_cat::trace::{call_tree, schedule, trace_from_json, trace_to_json, Trace};
use async_cat::verifier::{max_contracts, subtype, verify_procedure, Engine, SplitMode, SubtypeVerdict, VerifyOptions};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const OK: u8 = 0;
const VIOLATION: u8 = 1;
const UNPROVED: u8 = 2;
const ERROR: u8 = 3;

#[derive(Parser)]
#[command(name = "acat", version, about = "Trace semantics, trace contracts and a modular verifier for Async programs")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Maximum number of small steps per execution.
    #[arg(long, global = true, env = "ACAT_MAX_STEPS", default_value_t = DEFAULT_MAX_STEPS)]
    max_steps: usize,
    /// Maximum number of enumerated traces.
    #[arg(long, global = true, env = "ACAT_MAX_TRACES", default_value_t = DEFAULT_MAX_TRACES)]
    max_traces: usize,
    /// Length bound for inclusion checks.
    #[arg(long, global = true, env = "ACAT_BOUND", default_value_t = 12)]
    bound: usize,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
}

impl Global {
    fn limits(&self) -> Limits {
        Limits { max_steps: self.max_steps, max_traces: self.max_traces, ..Limits::default() }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Parse a program (`.async`) or contract file (`.cat`) and pretty-print it.
    Parse { file: PathBuf },
    /// Enumerate all maximal traces and check file correctness.
    Run {
        #[arg(long)]
        program: PathBuf,
        /// Dump every trace in full instead of its SHA-256 digest.
        #[arg(long)]
        dump: bool,
    },
    /// Show the call tree and schedule of a trace prefix.
    Calltree {
        #[arg(long)]
        program: PathBuf,
        /// Which maximal trace (in enumeration order).
        #[arg(long, default_value_t = 0)]
        trace: usize,
        /// Prefix length in items.
        #[arg(long, conflicts_with = "until")]
        items: Option<usize>,
        /// Cut after the first event printed like this, e.g. `ret(2)`.
        #[arg(long)]
        until: Option<String>,
    },
    /// Check whether a JSON trace satisfies a formula.
    CheckMember {
        /// JSON trace file.
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        formula: String,
        /// Values of free logic variables, `y=expr`.
        #[arg(long = "val", value_parser = parse_binding)]
        vals: Vec<(String, Expr)>,
    },
    /// Check contract adherence on all enumerated traces.
    Adhere {
        #[arg(long)]
        program: PathBuf,
        #[arg(long)]
        contracts: PathBuf,
        #[arg(long)]
        procedure: Option<String>,
    },
    /// Build proof trees for the procedures.
    Verify {
        #[arg(long)]
        program: PathBuf,
        #[arg(long)]
        contracts: PathBuf,
        #[arg(long)]
        procedure: Option<String>,
        #[arg(long, value_enum, default_value_t = Discharge::Auto)]
        discharge: Discharge,
        /// Positional split indices for Call/Schedule rules.
        #[arg(long, value_delimiter = ',')]
        split: Option<Vec<usize>>,
        /// Length bound (items) of sampled unknown prefixes.
        #[arg(long, default_value_t = 12)]
        havoc_len: usize,
        /// On acceptance, confirm adherence and file correctness by enumeration.
        #[arg(long)]
        cross_check: bool,
    },
    /// Decide whether contract `first` is more general than contract `second`.
    Subtype {
        #[arg(long)]
        contracts: PathBuf,
        /// Position of the first contract in the file (0-based).
        first: usize,
        /// Position of the second contract in the file (0-based).
        second: usize,
    },
    /// The maximal contracts of each procedure.
    MaxContracts {
        #[arg(long)]
        contracts: PathBuf,
        #[arg(long)]
        procedure: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Discharge {
    Abstract,
    Concrete,
    Auto,
}

fn parse_binding(s: &str) -> Result<(String, Expr), String> {
    let (y, e) = s.split_once('=').ok_or("expected y=expr")?;
    Ok((y.trim().to_string(), parse_expr(e).map_err(|e| e.to_string())?))
}

/// An error with its exit code.
struct Failure(u8, String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Failure {
        Failure(ERROR, e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure(ERROR, format!("{}: {e}", path.display())))
}

fn load_program(path: &Path) -> Result<Program, Failure> {
    Ok(parse_program(&read(path)?)?)
}

fn load_contracts(path: &Path) -> Result<Vec<ContractDecl>, Failure> {
    Ok(parse_contracts(&read(path)?)?)
}

fn digest(t: &Trace) -> String {
    let bytes = Sha256::digest(trace_to_json(t).to_string().as_bytes());
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn print(g: &Global, j: &Json, text: &str) {
    if g.json {
        println!("{}", serde_json::to_string_pretty(j).expect("serializable"));
    } else {
        print!("{text}");
    }
}

fn scopes(set: impl IntoIterator<Item = (String, u64)>) -> Vec<String> {
    set.into_iter().map(|(m, i)| format!("({m},{i})")).collect()
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let g = &cli.global;
    match cli.command {
        Command::Parse { file } => {
            let text = read(&file)?;
            if file.extension().is_some_and(|e| e == "cat") {
                let cs = parse_contracts(&text)?;
                let out: Vec<String> = cs.iter().map(pretty_contract).collect();
                let j = json!({ "contracts": cs.iter().map(|c| c.procedure.clone()).collect::<Vec<_>>() });
                print(g, &j, &format!("{}\n", out.join("\n\n")));
            } else {
                let p = parse_program(&text)?;
                let j = json!({ "procedures": p.names(), "variables": p.init_decls });
                print(g, &j, &format!("{}\n", pretty_program(&p)));
            }
            Ok(OK)
        }
        Command::Run { program, dump } => {
            let p = load_program(&program)?;
            let traces = enumerate_traces(&p, &g.limits())?;
            let mut rows = Vec::new();
            let mut text = format!("{} maximal trace(s)\n", traces.len());
            let mut all_correct = true;
            for (k, t) in traces.iter().enumerate() {
                let v = check_file_correct(t);
                all_correct &= v.correct;
                let mut row = json!({
                    "index": k,
                    "items": t.len(),
                    "events": t.events().count(),
                    "file_correct": v.correct,
                    "violation_position": v.position,
                });
                if dump {
                    row["trace"] = trace_to_json(t);
                } else {
                    row["digest"] = json!(digest(t));
                }
                let status = if v.correct { "file-correct".to_string() } else { format!("file-incorrect at item {}", v.position.unwrap_or(0)) };
                text.push_str(&format!("#{k}: {} items, {status}\n", t.len()));
                rows.push(row);
            }
            // The trace JSON is the primary output of `run`.
            let j = json!({ "count": traces.len(), "file_correct": all_correct, "traces": rows });
            println!("{}", serde_json::to_string_pretty(&j).expect("serializable"));
            if !g.json {
                eprint!("{text}");
            }
            Ok(if all_correct { OK } else { VIOLATION })
        }
        Command::Calltree { program, trace, items, until } => {
            let p = load_program(&program)?;
            let traces = enumerate_traces(&p, &g.limits())?;
            let t = traces.get(trace).ok_or_else(|| Failure(ERROR, format!("only {} trace(s)", traces.len())))?;
            let n = match (items, until) {
                (Some(n), _) => n,
                (None, Some(ev)) => {
                    let pos = t
                        .events()
                        .find(|(_, e)| e.to_string() == ev)
                        .map(|(k, _)| k)
                        .ok_or_else(|| Failure(ERROR, format!("event {ev} does not occur in trace {trace}")))?;
                    pos + 2
                }
                (None, None) => t.len(),
            };
            if n == 0 || n > t.len() {
                return Err(Failure(ERROR, format!("invalid prefix length {n} (trace has {} items)", t.len())));
            }
            let prefix = t.prefix(n);
            let tree = call_tree(&prefix)?;
            let sched = schedule(&prefix)?;
            let vertices = scopes(tree.vertices.iter().cloned());
            let edges: Vec<String> = tree.edges.iter().map(|((a, i), (b, j))| format!("({a},{i}) -> ({b},{j})")).collect();
            let idle = scopes(tree.idle.iter().cloned());
            let sched = scopes(sched);
            let j = json!({ "items": n, "vertices": vertices, "edges": edges, "idle": idle, "schedule": sched });
            let text = format!(
                "V = {{{}}}\nE = {{{}}}\nV_idle = {{{}}}\nschedule = {{{}}}\n",
                vertices.join(", "),
                edges.join(", "),
                idle.join(", "),
                sched.join(", ")
            );
            print(g, &j, &text);
            Ok(OK)
        }
        Command::CheckMember { trace, formula, vals } => {
            let t = trace_from_json(&read(&trace)?)?;
            let f = parse_formula(&formula)?;
            let mut values = Vec::new();
            for (y, e) in vals {
                match e.fold() {
                    Expr::Lit(v) => values.push((y, v)),
                    other => return Err(Failure(ERROR, format!("value of {y} is not a literal: {other}"))),
                }
            }
            let ok = member(&t, &f, &ObsEnv::from_values(values))?;
            print(g, &json!({ "member": ok }), &format!("{}\n", if ok { "member" } else { "not a member" }));
            Ok(if ok { OK } else { VIOLATION })
        }
        Command::Adhere { program, contracts, procedure } => {
            let p = load_program(&program)?;
            let mut cs = load_contracts(&contracts)?;
            let limits = g.limits();
            let report = match procedure {
                Some(m) => {
                    cs.retain(|c| c.procedure == m);
                    if cs.is_empty() {
                        return Err(Failure(ERROR, format!("no contract for {m}")));
                    }
                    let traces = enumerate_traces(&p, &limits)?;
                    let mut r = async_cat::contracts::AdherenceReport::default();
                    for c in &cs {
                        r.procedures.push(async_cat::contracts::adheres_on_traces(&traces, &m, c)?);
                    }
                    r
                }
                None => program_correct(&p, &cs, &limits)?.1,
            };
            println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
            if let Some((m, v)) = report.first_violation() {
                eprintln!("{m} violates its contract in trace {} call {} ({:?})", v.trace_index, v.call_id, v.failing_clause);
                return Ok(VIOLATION);
            }
            Ok(OK)
        }
        Command::Verify { program, contracts, procedure, discharge, split, havoc_len, cross_check } => {
            let p = load_program(&program)?;
            let cs = load_contracts(&contracts)?;
            let opts = VerifyOptions {
                engine: match discharge {
                    Discharge::Abstract => Engine::Abstract,
                    Discharge::Concrete => Engine::Concrete,
                    Discharge::Auto => Engine::AbstractThenConcrete,
                },
                bound: g.bound,
                havoc_len,
                split: split.map_or(SplitMode::Conjunctive, SplitMode::Positional),
                limits: g.limits(),
            };
            let names: Vec<String> = match procedure {
                Some(m) => vec![m],
                None => std::iter::once(async_cat::frontend::INIT.to_string()).chain(p.names().into_iter().map(String::from)).collect(),
            };
            let mut proofs = Vec::new();
            let mut text = String::new();
            let mut accepted = true;
            for m in &names {
                let proof = verify_procedure(&p, &cs, m, &opts)?;
                let ok = proof.accepted();
                accepted &= ok;
                text.push_str(&format!("== {m}: {}\n{}", if ok { "accepted" } else { "OPEN" }, proof.render_text()));
                if let Some(path) = proof.path_to_first_open() {
                    let leaf = path.last().expect("non-empty path");
                    let rules: Vec<&str> = path.iter().map(|n| n.rule.as_str()).collect();
                    text.push_str(&format!(
                        "first open leaf: [{}] via {}\n",
                        leaf.obligation.as_deref().unwrap_or(""),
                        rules.join(" > ")
                    ));
                }
                proofs.push(json!({ "procedure": m, "accepted": ok, "bounded": proof.bounded(), "proof": proof }));
            }
            let mut report = json!({ "accepted": accepted, "proofs": proofs });
            let mut code = if accepted { OK } else { UNPROVED };
            if cross_check && accepted {
                let (adherent, _) = program_correct(&p, &cs, &opts.limits)?;
                let traces = enumerate_traces(&p, &opts.limits)?;
                let file_correct = traces.iter().all(|t| check_file_correct(t).correct);
                report["cross_check"] = json!({ "adherent": adherent, "file_correct": file_correct });
                text.push_str(&format!("cross-check: adherent={adherent} file_correct={file_correct}\n"));
                if !(adherent && file_correct) {
                    code = VIOLATION;
                }
            }
            print(g, &report, &text);
            Ok(code)
        }
        Command::Subtype { contracts, first, second } => {
            let cs = load_contracts(&contracts)?;
            let get = |k: usize| cs.get(k).ok_or_else(|| Failure(ERROR, format!("no contract at position {k}")));
            let v = subtype(get(first)?, get(second)?, g.bound);
            let text = match &v {
                SubtypeVerdict::Proved { bounded } => format!("proved{}\n", if *bounded { " (bounded)" } else { "" }),
                SubtypeVerdict::Disproved { condition, counterexample } => format!("disproved at {condition}: {counterexample}\n"),
                SubtypeVerdict::Unknown { condition, reason } => format!("unknown at {condition}: {reason}\n"),
            };
            print(g, &serde_json::to_value(&v)?, &text);
            Ok(match v {
                SubtypeVerdict::Proved { .. } => OK,
                SubtypeVerdict::Disproved { .. } => VIOLATION,
                SubtypeVerdict::Unknown { .. } => UNPROVED,
            })
        }
        Command::MaxContracts { contracts, procedure } => {
            let cs = load_contracts(&contracts)?;
            let mut names: Vec<String> = cs.iter().map(|c| c.procedure.clone()).collect();
            names.dedup();
            names.sort();
            names.dedup();
            if let Some(m) = &procedure {
                names.retain(|n| n == m);
            }
            let mut j = serde_json::Map::new();
            let mut text = String::new();
            for m in names {
                let own: Vec<ContractDecl> = cs.iter().filter(|c| c.procedure == m).cloned().collect();
                let max = max_contracts(&own, g.bound);
                let positions: Vec<usize> = max.iter().filter_map(|c| cs.iter().position(|d| d == c)).collect();
                text.push_str(&format!("{m}: {} of {} contract(s) maximal\n", max.len(), own.len()));
                for c in &max {
                    text.push_str(&format!("{}\n", pretty_contract(c)));
                }
                j.insert(m, json!(positions));
            }
            print(g, &Json::Object(j), &text);
            Ok(OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
