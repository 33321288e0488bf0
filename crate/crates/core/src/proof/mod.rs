//! Unit-resolution proofs over cell literals, in the s-expression form
//! `(unit-resolution (asserted (or c01_05 c02_05)) (asserted (not c01_05)) c02_05)`.

mod check;
mod derive;
mod parse;

use std::fmt;

use crate::cnf::{Cnf, Lit, VarTag};
use crate::grid::CellRef;

pub use check::{check_proof, CheckError};
pub use derive::{derive_weak_proof, WeakProofOutcome, WeakProver};
pub use parse::{canonical_whitespace, parse_proof, ProofSyntaxError};

/// `c{row}_{col}` (unshaded) or its negation (shaded).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellLit {
    pub cell: CellRef,
    pub clear: bool,
}

impl CellLit {
    pub const fn new(cell: CellRef, clear: bool) -> Self {
        CellLit { cell, clear }
    }

    pub fn negated(self) -> Self {
        CellLit::new(self.cell, !self.clear)
    }

    pub fn var_name(self) -> String {
        format!("c{:02}_{:02}", self.cell.row + 1, self.cell.col + 1)
    }

    /// The literal's image in `cnf`, if the cell has a variable there.
    pub fn to_lit(self, cnf: &Cnf) -> Option<Lit> {
        cnf.registry()
            .get(VarTag::CellClear(self.cell))
            .map(|v| v.lit(self.clear))
    }

    pub fn from_lit(cnf: &Cnf, lit: Lit) -> Option<Self> {
        cnf.lit_cell(lit)
            .map(|(cell, clear)| CellLit::new(cell, clear))
    }
}

impl fmt::Display for CellLit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.clear {
            write!(f, "{}", self.var_name())
        } else {
            write!(f, "(not {})", self.var_name())
        }
    }
}

/// A clause as written in a proof. Literal order is kept for printing; comparisons that matter
/// logically go through [`ProofClause::same_set`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ProofClause(pub Vec<CellLit>);

impl ProofClause {
    pub fn unit(lit: CellLit) -> Self {
        ProofClause(vec![lit])
    }

    pub fn is_false(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_unit(&self) -> Option<CellLit> {
        match self.0.as_slice() {
            [l] => Some(*l),
            _ => None,
        }
    }

    pub fn lits(&self) -> &[CellLit] {
        &self.0
    }

    pub fn same_set(&self, other: &ProofClause) -> bool {
        let mut a = self.0.clone();
        let mut b = other.0.clone();
        a.sort_unstable();
        a.dedup();
        b.sort_unstable();
        b.dedup();
        a == b
    }

    pub fn from_clause(cnf: &Cnf, lits: &[Lit]) -> Option<Self> {
        lits.iter()
            .map(|&l| CellLit::from_lit(cnf, l))
            .collect::<Option<Vec<_>>>()
            .map(ProofClause)
    }
}

impl fmt::Display for ProofClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0.as_slice() {
            [] => write!(f, "false"),
            [l] => write!(f, "{l}"),
            lits => {
                write!(f, "(or")?;
                for l in lits {
                    write!(f, " {l}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProofNode {
    /// A bare literal, used when the whole proof is a single unit clause of the formula.
    Fact(CellLit),
    Asserted(ProofClause),
    UnitResolution {
        main: Box<ProofNode>,
        units: Vec<ProofNode>,
        conclusion: ProofClause,
    },
    /// Reference to the binding `a!N`.
    Ref(u32),
    /// Bindings are in scope for later bindings and for the body.
    Let {
        bindings: Vec<(u32, ProofNode)>,
        body: Box<ProofNode>,
    },
}

impl ProofNode {
    /// Canonical single-line text.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        self.write_flat(&mut out);
        out
    }

    fn write_flat(&self, out: &mut String) {
        match self {
            ProofNode::Fact(l) => out.push_str(&l.to_string()),
            ProofNode::Asserted(c) => {
                out.push_str("(asserted ");
                out.push_str(&c.to_string());
                out.push(')');
            }
            ProofNode::UnitResolution {
                main,
                units,
                conclusion,
            } => {
                out.push_str("(unit-resolution ");
                main.write_flat(out);
                for u in units {
                    out.push(' ');
                    u.write_flat(out);
                }
                out.push(' ');
                out.push_str(&conclusion.to_string());
                out.push(')');
            }
            ProofNode::Ref(n) => {
                out.push_str("a!");
                out.push_str(&n.to_string());
            }
            ProofNode::Let { bindings, body } => {
                out.push_str("(let (");
                for (i, (n, e)) in bindings.iter().enumerate() {
                    if i > 0 {
                        out.push(' ');
                    }
                    out.push_str(&format!("(a!{n} "));
                    e.write_flat(out);
                    out.push(')');
                }
                out.push_str(") ");
                body.write_flat(out);
                out.push(')');
            }
        }
    }

    /// Indented multi-line rendering for display. Parses back to the same tree.
    pub fn pretty(&self) -> String {
        let mut out = String::new();
        self.write_pretty(&mut out, 0);
        out
    }

    fn write_pretty(&self, out: &mut String, col: usize) {
        const WIDTH: usize = 78;
        let flat = self.serialize();
        if col + flat.len() <= WIDTH {
            out.push_str(&flat);
            return;
        }
        match self {
            ProofNode::UnitResolution {
                main,
                units,
                conclusion,
            } => {
                let head = "(unit-resolution ";
                out.push_str(head);
                let inner = col + head.len();
                main.write_pretty(out, inner);
                for u in units {
                    newline(out, inner);
                    u.write_pretty(out, inner);
                }
                newline(out, inner);
                out.push_str(&conclusion.to_string());
                out.push(')');
            }
            ProofNode::Let { bindings, body } => {
                out.push_str("(let (");
                let inner = col + 6;
                for (i, (n, e)) in bindings.iter().enumerate() {
                    if i > 0 {
                        newline(out, inner);
                    }
                    let head = format!("(a!{n} ");
                    out.push_str(&head);
                    e.write_pretty(out, inner + head.len());
                    out.push(')');
                }
                out.push(')');
                newline(out, col + 2);
                body.write_pretty(out, col + 2);
                out.push(')');
            }
            _ => out.push_str(&flat),
        }
    }

    /// Asserted clauses and bare facts in textual order; bound subproofs are visited once.
    pub fn leaves(&self) -> Vec<ProofClause> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<ProofClause>) {
        match self {
            ProofNode::Fact(l) => out.push(ProofClause::unit(*l)),
            ProofNode::Asserted(c) => out.push(c.clone()),
            ProofNode::UnitResolution { main, units, .. } => {
                main.collect_leaves(out);
                for u in units {
                    u.collect_leaves(out);
                }
            }
            ProofNode::Ref(_) => {}
            ProofNode::Let { bindings, body } => {
                for (_, e) in bindings {
                    e.collect_leaves(out);
                }
                body.collect_leaves(out);
            }
        }
    }

    /// Every cell named anywhere in the proof, deduplicated, in first-occurrence order.
    pub fn cells(&self) -> Vec<CellRef> {
        let mut out: Vec<CellRef> = Vec::new();
        let mut push = |c: CellRef| {
            if !out.contains(&c) {
                out.push(c);
            }
        };
        fn walk(node: &ProofNode, push: &mut dyn FnMut(CellRef)) {
            match node {
                ProofNode::Fact(l) => push(l.cell),
                ProofNode::Asserted(c) => c.0.iter().for_each(|l| push(l.cell)),
                ProofNode::UnitResolution {
                    main,
                    units,
                    conclusion,
                } => {
                    walk(main, push);
                    units.iter().for_each(|u| walk(u, push));
                    conclusion.0.iter().for_each(|l| push(l.cell));
                }
                ProofNode::Ref(_) => {}
                ProofNode::Let { bindings, body } => {
                    bindings.iter().for_each(|(_, e)| walk(e, push));
                    walk(body, push);
                }
            }
        }
        walk(self, &mut push);
        out
    }

    /// The same proof with every binding reference replaced by its definition.
    pub fn inline(&self) -> ProofNode {
        fn go(node: &ProofNode, scope: &mut Vec<(u32, ProofNode)>) -> ProofNode {
            match node {
                ProofNode::Ref(n) => scope
                    .iter()
                    .rev()
                    .find(|(m, _)| m == n)
                    .map(|(_, e)| e.clone())
                    .unwrap_or(ProofNode::Ref(*n)),
                ProofNode::UnitResolution {
                    main,
                    units,
                    conclusion,
                } => ProofNode::UnitResolution {
                    main: Box::new(go(main, scope)),
                    units: units.iter().map(|u| go(u, scope)).collect(),
                    conclusion: conclusion.clone(),
                },
                ProofNode::Let { bindings, body } => {
                    let depth = scope.len();
                    for (n, e) in bindings {
                        let expanded = go(e, scope);
                        scope.push((*n, expanded));
                    }
                    let out = go(body, scope);
                    scope.truncate(depth);
                    out
                }
                leaf => leaf.clone(),
            }
        }
        go(self, &mut Vec::new())
    }

    /// Whether every resolution node has at least one unit operand, checked structurally.
    pub fn is_unit_resolution_only(&self) -> bool {
        match self {
            ProofNode::UnitResolution { main, units, .. } => {
                !units.is_empty()
                    && main.is_unit_resolution_only()
                    && units.iter().all(ProofNode::is_unit_resolution_only)
            }
            ProofNode::Let { bindings, body } => {
                bindings.iter().all(|(_, e)| e.is_unit_resolution_only())
                    && body.is_unit_resolution_only()
            }
            _ => true,
        }
    }
}

impl fmt::Display for ProofNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

fn newline(out: &mut String, col: usize) {
    out.push('\n');
    out.extend(std::iter::repeat_n(' ', col));
}

pub fn serialize_proof(p: &ProofNode) -> String {
    p.serialize()
}

/// Length in characters of the canonical serialization.
pub fn proof_size(p: &ProofNode) -> usize {
    p.serialize().len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(r: usize, c: usize, clear: bool) -> CellLit {
        CellLit::new(CellRef::new(r - 1, c - 1), clear)
    }

    #[test]
    fn fact_prints_bare() {
        let p = ProofNode::Fact(lit(1, 4, true));
        assert_eq!(p.serialize(), "c01_04");
        assert_eq!(proof_size(&p), 6);
    }

    #[test]
    fn resolution_prints_flat() {
        let p = ProofNode::UnitResolution {
            main: Box::new(ProofNode::Asserted(ProofClause(vec![
                lit(1, 5, true),
                lit(2, 5, true),
            ]))),
            units: vec![ProofNode::Asserted(ProofClause::unit(lit(1, 5, false)))],
            conclusion: ProofClause::unit(lit(2, 5, true)),
        };
        assert_eq!(
            p.serialize(),
            "(unit-resolution (asserted (or c01_05 c02_05)) (asserted (not c01_05)) c02_05)"
        );
    }

    #[test]
    fn false_and_literal_roots_differ_by_token_length() {
        let make = |conclusion| ProofNode::UnitResolution {
            main: Box::new(ProofNode::Asserted(ProofClause(vec![
                lit(1, 5, true),
                lit(2, 5, true),
            ]))),
            units: vec![ProofNode::Asserted(ProofClause::unit(lit(1, 5, false)))],
            conclusion,
        };
        let with_lit = make(ProofClause::unit(lit(2, 5, true)));
        let with_false = make(ProofClause::default());
        assert_eq!(
            proof_size(&with_lit) as i64 - proof_size(&with_false) as i64,
            "c02_05".len() as i64 - "false".len() as i64
        );
    }

    #[test]
    fn same_set_ignores_order() {
        let a = ProofClause(vec![lit(1, 1, true), lit(2, 2, false)]);
        let b = ProofClause(vec![lit(2, 2, false), lit(1, 1, true)]);
        assert!(a.same_set(&b));
        assert!(!a.same_set(&ProofClause::unit(lit(1, 1, true))));
    }
}
