//! The sequent calculus: symbolic execution of a procedure body into a
//! proof tree whose leaves are local judgments `Γ ⊢ U : Φ`, plus behavioral
//! subtyping of contracts.
//!
//! A procedure proof starts with the Contract rule: the unknown history is
//! the havoc prefix `𝒱{start(m,oId)}`, assumed to satisfy
//! `θ_pre = θ'_a ** ⟨q_a⟩ ** start(m,oId) ** ⟨q_a⟩`, and the body must
//! produce `θ_post = θ_pre ** θ'_s ** ⟨q_c⟩ ** pop(m,oId) ** ⟨q_c⟩`.
//! Observation binders are skolemized: a pre binder observing `x` becomes
//! the constant `x@0`; values after the run of procedure call `i` are the
//! constants `x@ri`.

mod engine;
mod subtype;
mod update;

pub use engine::{
    binder_subst, discharge_local, initial_store, post_obligation, pre_obligation, run_fragment, run_symbol, start_symbol, step_store,
    sym_eval, translate, Antecedent, Engine, LeafStatus, Store,
};
pub use subtype::{max_contracts, subtype, Condition, SubtypeVerdict};
pub use update::{eval_update, schedule_update, Elem, RunMode, Update, OID, RUN_ID_STRIDE};

use crate::expr::{BinOp, Expr};
use crate::frontend::{pretty_stmt, ContractDecl, Program, Stmt, INIT};
use crate::interp::{initial_config, InterpError, Limits};
use crate::logic::{included, member, EvPat, Formula, NameP, ObsEnv, Term, Verdict};
use crate::trace::{FileOp, Scope};
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

/// Errors raised by the verifier.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("no contract for procedure {0}")]
    MissingContract(String),
    #[error("unknown procedure {0}")]
    UnknownProcedure(String),
    #[error("update contains an unknown prefix; it has no concrete evaluation")]
    HavocPresent,
    #[error("no run judgment for call identifier {0}")]
    MissingRunJudgment(u64),
    #[error("the schedule is not empty: {0}")]
    NonEmptySchedule(String),
    #[error("the schedule is empty")]
    EmptySchedule,
    #[error(transparent)]
    Interp(#[from] InterpError),
}

/// How the target formula is split at Call and Schedule rules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SplitMode {
    /// The callee's post-trace becomes an extra conjunct of the target;
    /// the target itself is checked once, at Finish.
    Conjunctive,
    /// The k-th Call/Schedule rule splits the current target's top-level
    /// chop chain at the k-th index (the last index is reused):
    /// `Φ ** θ ** Ψ` with `θ` the indexed segment.
    Positional(Vec<usize>),
}

/// Options for proof search.
#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub engine: Engine,
    /// Length bound for inclusion checks outside the regular fragment.
    pub bound: usize,
    /// Length bound (items) for sampled unknown prefixes in the concrete
    /// engine.
    pub havoc_len: usize,
    pub split: SplitMode,
    pub limits: Limits,
}

impl Default for VerifyOptions {
    fn default() -> VerifyOptions {
        VerifyOptions {
            engine: Engine::AbstractThenConcrete,
            bound: 12,
            havoc_len: 12,
            split: SplitMode::Conjunctive,
            limits: Limits::default(),
        }
    }
}

/// A rule application (or a leaf) in a proof tree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProofNode {
    pub rule: String,
    pub conclusion: String,
    /// For leaves: what the leaf establishes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub obligation: Option<String>,
    pub premises: Vec<ProofNode>,
    #[serde(skip_serializing_if = "Option::is_none", flatten)]
    pub status: Option<LeafStatus>,
}

/// Rule name of discharged local judgments.
pub const LEAF: &str = "leaf";

impl ProofNode {
    fn node(rule: &str, conclusion: String, premises: Vec<ProofNode>) -> ProofNode {
        ProofNode { rule: rule.into(), conclusion, obligation: None, premises, status: None }
    }

    fn leaf(obligation: &str, conclusion: String, status: LeafStatus) -> ProofNode {
        ProofNode { rule: LEAF.into(), conclusion, obligation: Some(obligation.into()), premises: Vec::new(), status: Some(status) }
    }

    /// All leaves, left to right.
    pub fn leaves(&self) -> Vec<&ProofNode> {
        if self.premises.is_empty() {
            return vec![self];
        }
        self.premises.iter().flat_map(|p| p.leaves()).collect()
    }

    /// A proof is accepted iff every leaf is closed.
    pub fn accepted(&self) -> bool {
        self.leaves().iter().all(|l| l.status.as_ref().is_some_and(|s| s.is_closed()))
    }

    pub fn open_leaves(&self) -> Vec<&ProofNode> {
        self.leaves().into_iter().filter(|l| !l.status.as_ref().is_some_and(|s| s.is_closed())).collect()
    }

    /// Whether some closed leaf relies on a bound or on sampling.
    pub fn bounded(&self) -> bool {
        self.leaves().iter().any(|l| matches!(l.status, Some(LeafStatus::Closed { bounded: true, .. })))
    }

    /// Rule names along the last premise of every node.
    pub fn spine(&self) -> Vec<&str> {
        let mut out = vec![self.rule.as_str()];
        let mut cur = self;
        while let Some(p) = cur.premises.last() {
            out.push(p.rule.as_str());
            cur = p;
        }
        out
    }

    /// The chain of rule names from the root to the first open leaf.
    pub fn path_to_first_open(&self) -> Option<Vec<&ProofNode>> {
        if self.premises.is_empty() {
            return (!self.status.as_ref().is_some_and(|s| s.is_closed())).then(|| vec![self]);
        }
        self.premises.iter().find_map(|p| {
            p.path_to_first_open().map(|mut v| {
                v.insert(0, self);
                v
            })
        })
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(|p| p.size()).sum::<usize>()
    }

    /// Indented text rendering.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        self.render_into(0, &mut out);
        out
    }

    fn render_into(&self, depth: usize, out: &mut String) {
        let pad = "  ".repeat(depth);
        match (&self.status, &self.obligation) {
            (Some(st), ob) => {
                let what = ob.as_deref().unwrap_or("");
                let verdict = match st {
                    LeafStatus::Closed { engine, evidence, bounded } => {
                        format!("CLOSED by {engine}{}: {evidence}", if *bounded { " (bounded)" } else { "" })
                    }
                    LeafStatus::Open { reason } => format!("OPEN: {reason}"),
                };
                out.push_str(&format!("{pad}{} [{what}] {verdict}\n{pad}    {}\n", self.rule, self.conclusion));
            }
            _ => out.push_str(&format!("{pad}{}  {}\n", self.rule, self.conclusion)),
        }
        for p in &self.premises {
            p.render_into(depth + 1, out);
        }
    }
}

/// One branch of symbolic execution: the accumulated update and the part
/// of the antecedent it induces.
#[derive(Clone, Debug)]
pub struct Branch {
    pub update: Update,
    pub store: Store,
    pub path: Vec<Expr>,
    /// Contracts standing for the runs in the update.
    pub runs: BTreeMap<u64, ContractDecl>,
    /// Post-trace obligations taken over from callees.
    pub post_obligations: Vec<(String, Formula)>,
    pub next_id: u64,
    /// Positional-split mode: the current target.
    pub target: Option<Formula>,
    pub splits_used: usize,
}

/// Proof search for one procedure against one contract.
pub struct Prover<'a> {
    program: &'a Program,
    /// Contracts of all other procedures.
    gamma: BTreeMap<String, Vec<ContractDecl>>,
    /// Maximal contracts per procedure.
    maximal: BTreeMap<String, Vec<ContractDecl>>,
    opts: &'a VerifyOptions,
    m: String,
    c: ContractDecl,
    sigma1: BTreeMap<String, Expr>,
    theta_pre: Formula,
    init_store: Store,
}

fn name_p(m: &str) -> NameP {
    NameP::Is(m.to_string())
}

fn ev(p: EvPat) -> Formula {
    Formula::ev(p)
}

fn stmts_text(stmts: &[Stmt]) -> String {
    if stmts.is_empty() {
        return "∘".into();
    }
    stmts.iter().map(|s| pretty_stmt(s, 0).replace('\n', " ")).collect::<Vec<_>>().join(" ")
}

fn and_all(fs: Vec<Formula>) -> Formula {
    fs.into_iter().reduce(Formula::and).unwrap_or_else(Formula::top)
}

impl<'a> Prover<'a> {
    /// Prepares the proof of `m ⊨ c` with the contracts of all other
    /// procedures in the antecedent.
    pub fn new(program: &'a Program, contracts: &[ContractDecl], m: &str, c: &ContractDecl, opts: &'a VerifyOptions) -> Prover<'a> {
        let mut gamma: BTreeMap<String, Vec<ContractDecl>> = BTreeMap::new();
        for d in contracts.iter().filter(|d| d.procedure != m) {
            gamma.entry(d.procedure.clone()).or_default().push(d.clone());
        }
        let maximal = gamma
            .iter()
            .map(|(k, cs)| (k.clone(), if cs.len() > 1 { max_contracts(cs, opts.bound) } else { cs.clone() }))
            .collect();
        let init_store = initial_store(program, m);
        let sigma1 = binder_subst(&c.pre_binders, &init_store, &BTreeMap::new());
        let qa = Formula::Pred(c.pre.clone());
        let theta_pre = Formula::chop_all(vec![c.assume.clone(), qa.clone(), ev(EvPat::start(m, Term::int(OID as i64))), qa])
            .subst_free(&sigma1);
        Prover { program, gamma, maximal, opts, m: m.to_string(), c: c.clone(), sigma1, theta_pre, init_store }
    }

    fn antecedent(&self, b: &Branch) -> Antecedent {
        Antecedent {
            procedure: self.m.clone(),
            theta_pre: self.theta_pre.clone(),
            initial_store: self.init_store.clone(),
            runs: b.runs.clone(),
            path: b.path.clone(),
        }
    }

    fn target_text(&self, b: &Branch) -> String {
        let mut s = format!("θ_post({})", self.m);
        for (label, _) in &b.post_obligations {
            s.push_str(&format!(" ∧ {label}"));
        }
        s
    }

    fn discharge(&self, b: &Branch, u: &Update, ext: Option<&Formula>, target: &Formula, label: &str) -> ProofNode {
        let status = discharge_local(&self.antecedent(b), u, ext, target, self.program, self.opts);
        let ext_text = ext.map(|x| format!(" ** {x}")).unwrap_or_default();
        ProofNode::leaf(label, format!("Γ ⊢ {u}{ext_text} : {target}"), status)
    }

    /// The Contract rule: skolemize, assume the pre-trace for the unknown
    /// prefix and symbolically execute the body.
    pub fn prove(&self) -> Result<ProofNode, VerifyError> {
        let body = if self.m == INIT {
            self.program.init_body.clone()
        } else {
            self.program.body(&self.m).ok_or_else(|| VerifyError::UnknownProcedure(self.m.clone()))?.clone()
        };
        let b = Branch {
            update: Update(vec![Elem::Havoc("V".into()), Elem::Start(self.m.clone(), OID)]),
            store: self.init_store.clone(),
            path: vec![sym_eval_pred(&self.c.pre, &self.sigma1)].into_iter().flatten().collect(),
            runs: BTreeMap::new(),
            post_obligations: Vec::new(),
            next_id: OID + 1,
            target: match &self.opts.split {
                SplitMode::Conjunctive => None,
                SplitMode::Positional(_) => Some(self.positional_target()),
            },
            splits_used: 0,
        };
        let mut premises = Vec::new();
        if self.m == INIT {
            // The init block's pre-trace is not established by any caller:
            // check it on the initial configuration.
            let t = initial_config(self.program).trace;
            let status = match member(&t, &self.theta_pre, &ObsEnv::new()) {
                Ok(true) => LeafStatus::closed("membership", "the initial configuration satisfies the pre-trace", false),
                Ok(false) => LeafStatus::open("the initial configuration violates the pre-trace"),
                Err(e) => LeafStatus::open(e.to_string()),
            };
            premises.push(ProofNode::leaf("initial pre-trace", format!("⟨σ_d⟩ : {}", self.theta_pre), status));
        }
        let stmts: Vec<Stmt> = body.flatten().into_iter().cloned().collect();
        premises.push(self.symexec(&stmts, b)?);
        Ok(ProofNode::node("Contract", format!("C^M_{m} ⊢ {m} : C_{m}", m = self.m), premises))
    }

    fn positional_target(&self) -> Formula {
        // Post binders refer to the pop state; they are bound by equations
        // at Finish.
        let at_pop: Store = self.c.post_binders.iter().map(|(x, _)| (x.clone(), Expr::var(&format!("{x}@pop")))).collect();
        let s2 = binder_subst(&self.c.post_binders, &at_pop, &self.sigma1);
        let qc = Formula::Pred(self.c.post.clone());
        Formula::chop_all(vec![
            self.theta_pre.clone(),
            self.c.internal.subst_free(&self.sigma1),
            qc.clone(),
            ev(EvPat::Pop(name_p(&self.m), Term::int(OID as i64))),
            qc,
        ])
        .subst_free(&s2)
    }

    /// Symbolic execution of the remaining statements.
    pub fn symexec(&self, stmts: &[Stmt], b: Branch) -> Result<ProofNode, VerifyError> {
        let concl = format!("Γ ⊢ {} {} :G {}", b.update, stmts_text(stmts), self.target_text(&b));
        let Some((s, rest)) = stmts.split_first() else {
            return self.after_return(b);
        };
        let node = |rule: &str, premises: Vec<ProofNode>| ProofNode::node(rule, concl.clone(), premises);
        match s {
            Stmt::Skip => Ok(node("Skip", vec![self.symexec(rest, b)?])),
            Stmt::Assign(x, e) => {
                let mut nb = b;
                nb.update.0.push(Elem::Assign(x.clone(), e.clone()));
                let v = sym_eval(&nb.store, e);
                nb.store.insert(x.clone(), v);
                Ok(node("Assign", vec![self.symexec(rest, nb)?]))
            }
            Stmt::If(e, body) => {
                let g = sym_eval(&b.store, e);
                let mut then_stmts: Vec<Stmt> = body.flatten().into_iter().cloned().collect();
                then_stmts.extend(rest.iter().cloned());
                let branch = |guard: Expr, stmts: &[Stmt]| -> Result<ProofNode, VerifyError> {
                    if let Expr::Lit(v) = guard.fold() {
                        if !v.is_true() {
                            return Ok(ProofNode::leaf(
                                "infeasible branch",
                                format!("Γ, ⌐⟨{guard}⟩ ⊢ {}", b.update),
                                LeafStatus::closed("path condition", "the guard is false", false),
                            ));
                        }
                    }
                    let mut nb = b.clone();
                    if !matches!(guard.fold(), Expr::Lit(_)) {
                        nb.path.push(guard);
                    }
                    self.symexec(stmts, nb)
                };
                let yes = branch(g.clone(), &then_stmts)?;
                let no = branch(Expr::not(g), rest)?;
                Ok(node("Cond", vec![yes, no]))
            }
            Stmt::Return => {
                let mut nb = b;
                nb.update.0.push(Elem::Ret(OID));
                Ok(node("Return", vec![self.symexec(rest, nb)?]))
            }
            Stmt::AsyncCall(m) => {
                let mut nb = b;
                let i = nb.next_id;
                nb.next_id += 1;
                nb.update.0.push(Elem::Invoc(m.clone(), i));
                Ok(node("AsyncCall", vec![self.symexec(rest, nb)?]))
            }
            Stmt::File(op, e) => {
                let f = sym_eval(&b.store, e);
                let mut premises = Vec::new();
                if *op != FileOp::Open {
                    // The file must be open: opened before and not closed since.
                    let guard = Formula::chop_all(vec![
                        Formula::top(),
                        ev(EvPat::File(FileOp::Open, Term::Is(f.clone()))),
                        Formula::NoEv(vec![EvPat::File(FileOp::Close, Term::Is(f))]),
                    ]);
                    premises.push(self.discharge(&b, &b.update, None, &guard, "file is open"));
                }
                let mut nb = b;
                nb.update.0.push(Elem::File(*op, e.clone()));
                premises.push(self.symexec(rest, nb)?);
                let rule = match op {
                    FileOp::Open => "Open",
                    FileOp::Close => "Close",
                    FileOp::Read => "Read",
                    FileOp::Write => "Write",
                };
                Ok(node(rule, premises))
            }
            Stmt::SyncCall(m) => {
                let premises = self.procedure_premises(&b, m, None, RunMode::Sync, &|nb| self.symexec(rest, nb))?;
                Ok(node("Call", premises))
            }
            Stmt::Seq(..) => unreachable!("statements are flattened"),
        }
    }

    /// Premises shared by Call and the Schedule rules for one callee: per
    /// maximal contract, the pre-trace obligation, (positional mode) the
    /// internal-behaviour inclusion, and the continuation.
    fn procedure_premises(
        &self,
        b: &Branch,
        m: &str,
        id: Option<u64>,
        mode: RunMode,
        cont: &dyn Fn(Branch) -> Result<ProofNode, VerifyError>,
    ) -> Result<Vec<ProofNode>, VerifyError> {
        let Some(contracts) = self.maximal.get(m) else {
            return Ok(vec![ProofNode::leaf(
                "callee contract",
                format!("Γ ⊢ {m} : ?"),
                LeafStatus::open(format!("no contract for {m} in the antecedent")),
            )]);
        };
        let mut premises = Vec::new();
        for c in contracts {
            let mut nb = b.clone();
            let i = id.unwrap_or_else(|| {
                nb.next_id += 1;
                nb.next_id - 1
            });
            let before = nb.store.clone();
            let pre = pre_obligation(c, &before);
            let run = Elem::Run { name: m.to_string(), id: i, mode };
            let mut after = before.clone();
            step_store(&mut after, &run, self.program);
            let post = post_obligation(c, m, i, &before, &after);
            let fragment_internal = {
                let s1 = binder_subst(&c.pre_binders, &before, &BTreeMap::new());
                c.internal.subst_free(&s1)
            };
            match (&self.opts.split, &nb.target) {
                (SplitMode::Positional(idx), Some(target)) => {
                    let chain = target.chop_chain();
                    let k = idx.get(nb.splits_used).or(idx.last()).copied().unwrap_or(0);
                    nb.splits_used += 1;
                    if k >= chain.len() {
                        premises.push(ProofNode::leaf(
                            "split",
                            format!("split {k} of {target}"),
                            LeafStatus::open(format!("split index {k} out of range ({} segments)", chain.len())),
                        ));
                        continue;
                    }
                    let phi = if k == 0 { Formula::top() } else { Formula::chop_all(chain[..k].to_vec()) };
                    let theta = chain[k].clone();
                    let psi = if k + 1 < chain.len() { Formula::chop_all(chain[k + 1..].to_vec()) } else { Formula::top() };
                    premises.push(self.discharge(&nb, &nb.update, None, &Formula::and(phi.clone(), pre.clone()), &format!("pre-trace of {m}")));
                    let incl = included(&fragment_internal, &theta, self.opts.bound);
                    let status = match incl {
                        Verdict::IncludedUpToBound { exhaustive } => {
                            LeafStatus::closed("abstract", "internal behaviour included", !exhaustive)
                        }
                        other => LeafStatus::open(format!("{other:?}")),
                    };
                    premises.push(ProofNode::leaf(&format!("internal behaviour of {m}"), format!("⟦{fragment_internal}⟧ ⊆ ⟦{theta}⟧"), status));
                    nb.target = Some(Formula::chop_all(vec![Formula::and(phi, pre), fragment_internal, Formula::and(psi, post.clone())]));
                }
                _ => premises.push(self.discharge(&nb, &nb.update, None, &pre, &format!("pre-trace of {m}"))),
            }
            nb.update.0.push(run);
            nb.store = after.clone();
            let s1 = binder_subst(&c.pre_binders, &before, &BTreeMap::new());
            let s2 = binder_subst(&c.post_binders, &after, &s1);
            if let Some(q) = sym_eval_pred(&c.post, &s2) {
                nb.path.push(q);
            }
            if !c.cont.is_top() {
                nb.post_obligations.push((format!("post({m},{i})"), post));
            }
            nb.runs.insert(i, c.clone());
            premises.push(cont(nb)?);
        }
        Ok(premises)
    }

    /// After the return: schedule pending invocations, or finish.
    fn after_return(&self, b: Branch) -> Result<ProofNode, VerifyError> {
        let sched = schedule_update(&b.update);
        if sched.is_empty() {
            return self.apply_finish_rule(b);
        }
        self.apply_schedule_rule(b, &sched)
    }

    /// ScheduleD / ScheduleN / actOrder: one premise group per schedulable
    /// invocation (and per maximal contract).
    pub fn apply_schedule_rule(&self, b: Branch, sched: &std::collections::BTreeSet<Scope>) -> Result<ProofNode, VerifyError> {
        if sched.is_empty() {
            return Err(VerifyError::EmptySchedule);
        }
        let concl = format!("Γ ⊢ {} :G {}", b.update, self.target_text(&b));
        let mut premises = Vec::new();
        let mut several_contracts = false;
        for (m, i) in sched {
            several_contracts |= self.gamma.get(m).is_some_and(|cs| cs.len() > 1);
            premises.extend(self.procedure_premises(&b, m, Some(*i), RunMode::Async, &|nb| self.after_return(nb))?);
        }
        let rule = if several_contracts {
            "actOrder"
        } else if sched.len() == 1 {
            "ScheduleD"
        } else {
            "ScheduleN"
        };
        Ok(ProofNode::node(rule, concl, premises))
    }

    /// Finish: nothing is schedulable; the local trace, closed by the pop
    /// and extended by the procedure's own post-trace assumption, must
    /// satisfy the target and every post-trace obligation taken over.
    pub fn apply_finish_rule(&self, b: Branch) -> Result<ProofNode, VerifyError> {
        let sched = schedule_update(&b.update);
        if !sched.is_empty() {
            return Err(VerifyError::NonEmptySchedule(format!("{sched:?}")));
        }
        let concl = format!("Γ ⊢ {} :G {}", b.update, self.target_text(&b));
        let s2 = binder_subst(&self.c.post_binders, &b.store, &self.sigma1);
        let qc = Formula::Pred(self.c.post.clone()).subst_free(&s2);
        let pop = ev(EvPat::Pop(name_p(&self.m), Term::int(OID as i64)));
        let own_cont = self.c.cont.subst_free(&s2);
        let mut b = b;
        let mut conj = Vec::new();
        match &b.target {
            Some(t) => {
                conj.push(Formula::chop(t.clone(), Formula::top()));
                for (x, y) in &self.c.post_binders {
                    let _ = y;
                    let v = b.store.get(x).cloned().unwrap_or_else(|| Expr::var(&start_symbol(x)));
                    b.path.push(Expr::bin(BinOp::Eq, Expr::var(&format!("{x}@pop")), v));
                }
            }
            None => conj.push(Formula::chop_all(vec![
                self.theta_pre.clone(),
                self.c.internal.subst_free(&self.sigma1),
                qc.clone(),
                pop.clone(),
                qc.clone(),
                Formula::top(),
            ])),
        }
        conj.extend(b.post_obligations.iter().map(|(_, f)| f.clone()));
        let ext = if self.m == INIT {
            // Nothing follows the init block's pop: its own post-trace must
            // hold on the final state.
            conj.push(Formula::chop_all(vec![Formula::top(), pop.clone(), qc.clone(), own_cont]));
            qc
        } else {
            Formula::chop(qc, own_cont)
        };
        let u = b.update.with(Elem::Pop(self.m.clone(), OID));
        let leaf = self.discharge(&b, &u, Some(&ext), &and_all(conj), "final");
        Ok(ProofNode::node("Finish", concl, vec![leaf]))
    }
}

/// A boundary predicate instantiated over skolem constants, unless it is
/// trivially true.
fn sym_eval_pred(q: &Expr, subst: &BTreeMap<String, Expr>) -> Option<Expr> {
    let e = q.subst(&|x| subst.get(x).cloned()).fold();
    (e != Expr::bool(true)).then_some(e)
}

/// Builds the proof tree of `m ⊨ C_m` for every contract of `m`, with the
/// contracts of all other procedures in the antecedent. A single contract
/// yields its Contract node; several are grouped under a `Contracts` node.
pub fn verify_procedure(program: &Program, contracts: &[ContractDecl], m: &str, opts: &VerifyOptions) -> Result<ProofNode, VerifyError> {
    if m != INIT && program.body(m).is_none() {
        return Err(VerifyError::UnknownProcedure(m.to_string()));
    }
    let own: Vec<&ContractDecl> = contracts.iter().filter(|c| c.procedure == m).collect();
    if own.is_empty() {
        return Err(VerifyError::MissingContract(m.to_string()));
    }
    let mut proofs = Vec::new();
    for c in &own {
        proofs.push(Prover::new(program, contracts, m, c, opts).prove()?);
    }
    if proofs.len() == 1 {
        return Ok(proofs.pop().expect("one proof"));
    }
    Ok(ProofNode::node("Contracts", format!("C^M_{m} ⊢ {m} : C_{m} (all contracts)"), proofs))
}

/// Verifies the init block and every procedure, in declaration order.
pub fn verify_all(program: &Program, contracts: &[ContractDecl], opts: &VerifyOptions) -> Result<Vec<(String, ProofNode)>, VerifyError> {
    let mut names = vec![INIT.to_string()];
    names.extend(program.names().into_iter().map(String::from));
    names.into_iter().map(|m| verify_procedure(program, contracts, &m, opts).map(|p| (m, p))).collect()
}
