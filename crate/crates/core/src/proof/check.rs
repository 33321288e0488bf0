//! Independent proof checker.

use std::collections::HashSet;

use thiserror::Error;

use super::{CellLit, ProofClause, ProofNode};
use crate::cnf::{Cnf, Lit};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CheckError {
    #[error("node {node}: leaf {clause} is neither a source clause nor an assumption")]
    LeafNotAsserted { node: usize, clause: String },
    #[error("node {node}: operand concludes {found}, not a single literal")]
    NotAUnit { node: usize, found: String },
    #[error("node {node}: unit {lit} does not resolve against {clause}")]
    NothingToResolve {
        node: usize,
        lit: String,
        clause: String,
    },
    #[error("node {node}: resolvent is {expected} but the proof claims {found}")]
    WrongConclusion {
        node: usize,
        expected: String,
        found: String,
    },
    #[error("node {node}: reference to unknown binding a!{name}")]
    UnboundBinding { node: usize, name: u32 },
    #[error("root concludes {0}; expected false or a single literal")]
    BadRoot(String),
}

struct Checker<'a> {
    cnf: &'a Cnf,
    source: HashSet<Vec<Lit>>,
    assumptions: HashSet<Lit>,
    counter: usize,
}

impl Checker<'_> {
    fn leaf_ok(&self, clause: &ProofClause) -> bool {
        let Some(mut lits) = clause
            .0
            .iter()
            .map(|l| l.to_lit(self.cnf))
            .collect::<Option<Vec<Lit>>>()
        else {
            return false;
        };
        lits.sort_unstable();
        lits.dedup();
        if let [l] = lits.as_slice() {
            if self.assumptions.contains(l) {
                return true;
            }
        }
        self.source.contains(&lits)
    }

    fn conclusion(
        &mut self,
        node: &ProofNode,
        scope: &mut Vec<(u32, ProofClause)>,
    ) -> Result<ProofClause, CheckError> {
        let id = self.counter;
        self.counter += 1;
        match node {
            ProofNode::Fact(l) => {
                let c = ProofClause::unit(*l);
                if !self.leaf_ok(&c) {
                    return Err(CheckError::LeafNotAsserted {
                        node: id,
                        clause: c.to_string(),
                    });
                }
                Ok(c)
            }
            ProofNode::Asserted(c) => {
                if !self.leaf_ok(c) {
                    return Err(CheckError::LeafNotAsserted {
                        node: id,
                        clause: c.to_string(),
                    });
                }
                Ok(c.clone())
            }
            ProofNode::Ref(n) => scope
                .iter()
                .rev()
                .find(|(m, _)| m == n)
                .map(|(_, c)| c.clone())
                .ok_or(CheckError::UnboundBinding { node: id, name: *n }),
            ProofNode::Let { bindings, body } => {
                let depth = scope.len();
                for (n, e) in bindings {
                    let c = self.conclusion(e, scope)?;
                    scope.push((*n, c));
                }
                let out = self.conclusion(body, scope);
                scope.truncate(depth);
                out
            }
            ProofNode::UnitResolution {
                main,
                units,
                conclusion,
            } => {
                let mut current: Vec<CellLit> = self.conclusion(main, scope)?.0;
                for u in units {
                    let uc = self.conclusion(u, scope)?;
                    let lit = uc.as_unit().ok_or_else(|| CheckError::NotAUnit {
                        node: id,
                        found: uc.to_string(),
                    })?;
                    let before = current.len();
                    current.retain(|&l| l != lit.negated());
                    if current.len() == before {
                        return Err(CheckError::NothingToResolve {
                            node: id,
                            lit: lit.to_string(),
                            clause: ProofClause(current).to_string(),
                        });
                    }
                }
                let resolvent = ProofClause(current);
                if !resolvent.same_set(conclusion) {
                    return Err(CheckError::WrongConclusion {
                        node: id,
                        expected: resolvent.to_string(),
                        found: conclusion.to_string(),
                    });
                }
                Ok(conclusion.clone())
            }
        }
    }
}

/// Checks `p` against the clauses of `source` plus unit `assumptions`.
///
/// Returns the root conclusion, which is `false` (empty) or a single literal. Node numbers in
/// errors count nodes in the order the checker visits them (pre-order, bindings first).
pub fn check_proof(
    p: &ProofNode,
    source: &Cnf,
    assumptions: &[Lit],
) -> Result<ProofClause, CheckError> {
    let mut checker = Checker {
        cnf: source,
        source: source.clauses().iter().map(|c| c.lits().to_vec()).collect(),
        assumptions: assumptions.iter().copied().collect(),
        counter: 0,
    };
    let root = checker.conclusion(p, &mut Vec::new())?;
    if root.0.len() > 1 {
        return Err(CheckError::BadRoot(root.to_string()));
    }
    Ok(root)
}
