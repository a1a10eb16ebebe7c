//! Behavioral subtyping of contracts and maximal contract sets.

use crate::expr::Expr;
use crate::frontend::ContractDecl;
use crate::logic::{included, Formula, Verdict};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

/// The three conditions of `C1 ⪰ C2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Condition {
    /// `θ'_a1 ** ⟨q_a1⟩ ⊆ θ'_a2 ** ⟨q_a2⟩`.
    L1,
    /// `θ'_s2 ** ⟨q_c2⟩ ⊆ θ'_s1 ** ⟨q_c1⟩`.
    L2,
    /// `θ'_c1 ⊆ θ'_c2`.
    L3,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Outcome of `subtype(C1, C2)`, i.e. of `C1 ⪰ C2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum SubtypeVerdict {
    /// All three inclusions hold; `bounded` if some was only checked up to
    /// the length bound.
    Proved { bounded: bool },
    Disproved { condition: Condition, counterexample: String },
    Unknown { condition: Condition, reason: String },
}

impl SubtypeVerdict {
    pub fn is_proved(&self) -> bool {
        matches!(self, SubtypeVerdict::Proved { .. })
    }
}

/// Observation binders of both contracts are identified by the program
/// variable they observe: `y ↦ x@pre` before, `y ↦ x@post` after.
fn unify_binders(c: &ContractDecl) -> BTreeMap<String, Expr> {
    let mut m = BTreeMap::new();
    for (x, y) in &c.pre_binders {
        m.insert(y.clone(), Expr::var(&format!("{x}@pre")));
    }
    for (x, y) in &c.post_binders {
        m.insert(y.clone(), Expr::var(&format!("{x}@post")));
    }
    m
}

/// Decides whether `c1` is more general than `c2` (`c1 ⪰ c2`).
pub fn subtype(c1: &ContractDecl, c2: &ContractDecl, bound: usize) -> SubtypeVerdict {
    let (s1, s2) = (unify_binders(c1), unify_binders(c2));
    let with = |f: &Formula, q: &Expr, s: &BTreeMap<String, Expr>| Formula::chop(f.clone(), Formula::Pred(q.clone())).subst_free(s);
    let checks = [
        (Condition::L1, with(&c1.assume, &c1.pre, &s1), with(&c2.assume, &c2.pre, &s2)),
        (Condition::L2, with(&c2.internal, &c2.post, &s2), with(&c1.internal, &c1.post, &s1)),
        (Condition::L3, c1.cont.subst_free(&s1), c2.cont.subst_free(&s2)),
    ];
    let mut bounded = false;
    for (condition, lhs, rhs) in checks {
        match included(&lhs, &rhs, bound) {
            Verdict::IncludedUpToBound { exhaustive } => bounded |= !exhaustive,
            Verdict::Counterexample { trace, valuation } => {
                let evs: Vec<String> = trace.events().map(|(_, e)| e.to_string()).collect();
                let vals: Vec<String> = valuation.iter().map(|(k, v)| format!("{k}={v}")).collect();
                return SubtypeVerdict::Disproved {
                    condition,
                    counterexample: format!("[{}] with {{{}}}", evs.join(", "), vals.join(", ")),
                };
            }
            Verdict::Unknown(reason) => return SubtypeVerdict::Unknown { condition, reason },
        }
    }
    SubtypeVerdict::Proved { bounded }
}

/// The maximal elements of a contract set under `⪰`. Pairs with an unknown
/// verdict are incomparable; of mutually more general contracts the first
/// is kept.
pub fn max_contracts(cs: &[ContractDecl], bound: usize) -> Vec<ContractDecl> {
    let n = cs.len();
    let ge: Vec<Vec<bool>> =
        (0..n).map(|i| (0..n).map(|j| i == j || subtype(&cs[i], &cs[j], bound).is_proved()).collect()).collect();
    (0..n)
        .filter(|&i| !(0..n).any(|j| j != i && ge[j][i] && (!ge[i][j] || j < i)))
        .map(|i| cs[i].clone())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_contracts;

    fn one(src: &str) -> ContractDecl {
        parse_contracts(src).unwrap().remove(0)
    }

    #[test]
    fn reflexive_on_case_study() {
        for c in parse_contracts(include_str!("../../../../corpus/example1.cat")).unwrap() {
            assert!(subtype(&c, &c, 8).is_proved(), "{}", c.procedure);
        }
    }

    #[test]
    fn state_contracts() {
        let c1 = one("contract m { assume: ~; pre: [y > 1] obs(x as y); internal: ~; post: [true]; continue: ~; }");
        let c2 = one("contract m { assume: ~; pre: [y > 0] obs(x as y); internal: ~; post: [true]; continue: ~; }");
        assert!(subtype(&c1, &c2, 8).is_proved());
        assert!(matches!(subtype(&c2, &c1, 8), SubtypeVerdict::Disproved { condition: Condition::L1, .. }));
    }

    #[test]
    fn internal_strengthening() {
        let c1 = one("contract m { assume: ~; pre: [true] obs(file as f); internal: ~[close(f)]; post: [true]; continue: ~; }");
        let c2 = one("contract m { assume: ~; pre: [true] obs(file as g); internal: ~; post: [true]; continue: ~; }");
        assert!(matches!(subtype(&c1, &c2, 8), SubtypeVerdict::Disproved { condition: Condition::L2, .. }));
        assert!(subtype(&c2, &c1, 8).is_proved());
    }

    #[test]
    fn maximal_elements() {
        let c1 = one("contract m { assume: ~; pre: [y > 2] obs(x as y); internal: ~; post: [true]; continue: ~; }");
        let c2 = one("contract m { assume: ~; pre: [y > 1] obs(x as y); internal: ~; post: [true]; continue: ~; }");
        let c3 = one("contract m { assume: ~; pre: [y > 0] obs(x as y); internal: ~; post: [true]; continue: ~; }");
        assert_eq!(max_contracts(&[c3.clone(), c1.clone(), c2.clone()], 8), vec![c1.clone()]);
        assert_eq!(max_contracts(&[c1.clone(), c1.clone()], 8), vec![c1.clone()]);
        let other = one("contract m { assume: ~; pre: [true] obs(file as f); internal: ~[close(f)]; post: [true]; continue: ~; }");
        let inc = one("contract m { assume: ~ open(f) ~; pre: [true] obs(file as f); internal: ~[write(f)]; post: [true]; continue: ~; }");
        assert_eq!(max_contracts(&[other.clone(), inc.clone()], 8).len(), 2);
    }
}
