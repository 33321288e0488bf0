//! Unit-resolution proofs read off the implication graph of a propagation conflict.

use std::collections::{HashMap, HashSet};

use super::{CellLit, ProofClause, ProofNode};
use crate::cnf::{Cnf, Lit};
use crate::sat::{Antecedent, Conflict, Propagator, SolveResult, Solver};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeakProofOutcome {
    Proof(ProofNode),
    /// A model of the formula, the established units, and the negated subgoal, indexed by variable.
    NoWeakProof(Vec<bool>),
    /// Unsatisfiable, but propagation alone finds no conflict.
    NonUnitUnsat,
}

/// Propagation state with the established units applied once, reused across subgoals.
#[derive(Clone, Debug)]
pub struct WeakProver<'a> {
    prop: Propagator<'a>,
    base: usize,
    established: Vec<Lit>,
    leaves: HashSet<Lit>,
}

impl<'a> WeakProver<'a> {
    pub fn new(cnf: &'a Cnf, established: &[Lit]) -> Self {
        let mut prop = Propagator::new(cnf);
        for &lit in established {
            prop.assume(lit);
        }
        let base = prop.trail().len();
        WeakProver {
            prop,
            base,
            established: established.to_vec(),
            leaves: established.iter().copied().collect(),
        }
    }

    pub fn cnf(&self) -> &'a Cnf {
        self.prop.cnf()
    }

    pub fn established(&self) -> &[Lit] {
        &self.established
    }

    /// True when the established units alone already conflict.
    pub fn is_inconsistent(&self) -> bool {
        self.prop.conflict().is_some()
    }

    /// Value of `lit` after propagating the established units.
    pub fn value(&self, lit: Lit) -> Option<bool> {
        self.prop.value(lit)
    }

    /// Refutes `!goal` by propagation and returns a proof of `goal`, if one exists.
    ///
    /// When the established units already conflict, the proof concludes `false` without using
    /// the assumption.
    pub fn refute(&mut self, goal: Lit) -> Option<ProofNode> {
        let assumed = !goal;
        if let Some(c) = self.prop.conflict() {
            return Some(build(&self.prop, c, assumed, &self.leaves));
        }
        let conflict = self.prop.assume(assumed);
        let proof = conflict.map(|c| {
            let mut leaves = self.leaves.clone();
            leaves.insert(assumed);
            build(&self.prop, c, assumed, &leaves)
        });
        self.prop.rollback(self.base);
        proof
    }

    /// Like [`WeakProver::refute`], falling back to a complete solver when propagation stalls.
    pub fn derive(&mut self, goal: Lit) -> WeakProofOutcome {
        if let Some(p) = self.refute(goal) {
            return WeakProofOutcome::Proof(p);
        }
        let mut assumptions = self.established.clone();
        assumptions.push(!goal);
        let mut solver = Solver::new(self.cnf());
        match solver.solve(&assumptions) {
            Ok(SolveResult::Sat(model)) => WeakProofOutcome::NoWeakProof(model),
            _ => WeakProofOutcome::NonUnitUnsat,
        }
    }
}

/// Proof of `subgoal` from `weak` and the established units, or the reason there is none.
///
/// Every variable of `weak` must be a cell variable.
pub fn derive_weak_proof(weak: &Cnf, established: &[Lit], subgoal: Lit) -> WeakProofOutcome {
    WeakProver::new(weak, established).derive(subgoal)
}

enum Draft {
    /// Unit supplied as an assumption.
    Leaf(Lit),
    /// Clause of the formula, by index.
    Axiom(usize),
    Res {
        main: usize,
        units: Vec<usize>,
        conclusion: Vec<Lit>,
    },
}

struct Builder<'p, 'a> {
    prop: &'p Propagator<'a>,
    leaves: &'p HashSet<Lit>,
    drafts: Vec<Draft>,
    by_lit: HashMap<Lit, usize>,
    by_clause: HashMap<usize, usize>,
}

impl Builder<'_, '_> {
    fn push(&mut self, d: Draft) -> usize {
        self.drafts.push(d);
        self.drafts.len() - 1
    }

    fn axiom(&mut self, ci: usize) -> usize {
        if let Some(&id) = self.by_clause.get(&ci) {
            return id;
        }
        let id = self.push(Draft::Axiom(ci));
        self.by_clause.insert(ci, id);
        id
    }

    fn leaf(&mut self, lit: Lit) -> usize {
        if let Some(&id) = self.by_lit.get(&lit) {
            return id;
        }
        let id = self.push(Draft::Leaf(lit));
        self.by_lit.insert(lit, id);
        id
    }

    /// Operands refuting every literal of clause `ci` except `keep`, latest trail entry first.
    fn units_against(&mut self, ci: usize, keep: Option<Lit>) -> Vec<usize> {
        let mut falsified: Vec<Lit> = self.prop.cnf().clauses()[ci]
            .lits()
            .iter()
            .filter(|&&l| Some(l) != keep)
            .map(|&l| !l)
            .collect();
        falsified.sort_by_key(|&l| std::cmp::Reverse(self.prop.position(l)));
        falsified.into_iter().map(|l| self.prove(l)).collect()
    }

    /// Node proving the trail literal `lit`.
    fn prove(&mut self, lit: Lit) -> usize {
        if let Some(&id) = self.by_lit.get(&lit) {
            return id;
        }
        if self.leaves.contains(&lit) {
            return self.leaf(lit);
        }
        let entry = *self.prop.entry_of(lit).expect("literal on the trail");
        debug_assert_eq!(entry.lit, lit);
        let id = match entry.antecedent {
            Antecedent::Clause(ci) if self.prop.cnf().clauses()[ci].is_unit() => self.axiom(ci),
            Antecedent::Clause(ci) => {
                let main = self.axiom(ci);
                let units = self.units_against(ci, Some(lit));
                self.push(Draft::Res {
                    main,
                    units,
                    conclusion: vec![lit],
                })
            }
            Antecedent::Assumption => self.leaf(lit),
        };
        self.by_lit.insert(lit, id);
        id
    }
}

fn build(
    prop: &Propagator<'_>,
    conflict: Conflict,
    assumed: Lit,
    leaves: &HashSet<Lit>,
) -> ProofNode {
    let mut b = Builder {
        prop,
        leaves,
        drafts: Vec::new(),
        by_lit: HashMap::new(),
        by_clause: HashMap::new(),
    };
    let (main, units) = match conflict {
        Conflict::Clause(ci) => {
            let main = b.axiom(ci);
            (main, b.units_against(ci, None))
        }
        Conflict::Assumption(a) => {
            let main = b.prove(!a);
            (main, vec![b.leaf(a)])
        }
    };
    let mut root = b.push(Draft::Res {
        main,
        units,
        conclusion: Vec::new(),
    });

    // Discharge the assumption directly when it is used exactly once, at the root.
    let goal_leaf = b.by_lit.get(&assumed).copied();
    let refs = count_refs(&b.drafts, root);
    if let Some(g) = goal_leaf {
        let Draft::Res { main, units, .. } = &b.drafts[root] else {
            unreachable!()
        };
        if refs[g] == 1 && units.contains(&g) {
            let (main, units): (usize, Vec<usize>) =
                (*main, units.iter().copied().filter(|&u| u != g).collect());
            root = if units.is_empty() {
                main
            } else {
                b.push(Draft::Res {
                    main,
                    units,
                    conclusion: vec![!assumed],
                })
            };
        }
    }

    let cnf = prop.cnf();
    if let Draft::Axiom(ci) = b.drafts[root] {
        let clause = &cnf.clauses()[ci];
        if clause.lits() == [!assumed] {
            return ProofNode::Fact(cell_lit(cnf, !assumed));
        }
    }
    emit(&b.drafts, root, cnf)
}

fn count_refs(drafts: &[Draft], root: usize) -> Vec<usize> {
    let mut refs = vec![0usize; drafts.len()];
    let mut visited = vec![false; drafts.len()];
    let mut stack = vec![root];
    refs[root] = 1;
    while let Some(id) = stack.pop() {
        if visited[id] {
            continue;
        }
        visited[id] = true;
        if let Draft::Res { main, units, .. } = &drafts[id] {
            for &c in std::iter::once(main).chain(units) {
                refs[c] += 1;
                stack.push(c);
            }
        }
    }
    refs
}

fn cell_lit(cnf: &Cnf, lit: Lit) -> CellLit {
    CellLit::from_lit(cnf, lit).expect("proofs are built over cell variables only")
}

fn emit(drafts: &[Draft], root: usize, cnf: &Cnf) -> ProofNode {
    let refs = count_refs(drafts, root);
    let shared = |id: usize| refs[id] > 1 && matches!(drafts[id], Draft::Res { .. });

    struct Emitter<'d> {
        drafts: &'d [Draft],
        cnf: &'d Cnf,
        names: HashMap<usize, u32>,
        bindings: Vec<(u32, ProofNode)>,
    }

    impl Emitter<'_> {
        fn node(&mut self, id: usize, shared: &dyn Fn(usize) -> bool, top: bool) -> ProofNode {
            if let Some(&n) = self.names.get(&id) {
                return ProofNode::Ref(n);
            }
            let built = match &self.drafts[id] {
                Draft::Leaf(l) => ProofNode::Asserted(ProofClause::unit(cell_lit(self.cnf, *l))),
                Draft::Axiom(ci) => ProofNode::Asserted(
                    ProofClause::from_clause(self.cnf, self.cnf.clauses()[*ci].lits())
                        .expect("proofs are built over cell variables only"),
                ),
                Draft::Res {
                    main,
                    units,
                    conclusion,
                } => {
                    let main = self.node(*main, shared, false);
                    let units = units.iter().map(|&u| self.node(u, shared, false)).collect();
                    ProofNode::UnitResolution {
                        main: Box::new(main),
                        units,
                        conclusion: ProofClause(
                            conclusion.iter().map(|&l| cell_lit(self.cnf, l)).collect(),
                        ),
                    }
                }
            };
            if !top && shared(id) {
                let n = self.bindings.len() as u32 + 1;
                self.names.insert(id, n);
                self.bindings.push((n, built));
                ProofNode::Ref(n)
            } else {
                built
            }
        }
    }

    let mut e = Emitter {
        drafts,
        cnf,
        names: HashMap::new(),
        bindings: Vec::new(),
    };
    let body = e.node(root, &shared, true);
    if e.bindings.is_empty() {
        body
    } else {
        ProofNode::Let {
            bindings: e.bindings,
            body: Box::new(body),
        }
    }
}
