//! Unit propagation with recorded antecedents.
//!
//! Order is fixed: unit clauses of the formula first (in formula order), then each assumption in
//! turn, each propagated to a fixpoint before the next. Within a fixpoint the queue is FIFO and
//! the clauses containing a falsified literal are visited in formula order.

use crate::cnf::{Cnf, Lit};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Antecedent {
    /// Index of the clause that became unit.
    Clause(usize),
    Assumption,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceEntry {
    pub lit: Lit,
    pub antecedent: Antecedent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Conflict {
    /// Every literal of this clause is false.
    Clause(usize),
    /// This assumption was already false when it was applied.
    Assumption(Lit),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PropagationTrace {
    pub entries: Vec<TraceEntry>,
    pub conflict: Option<Conflict>,
}

/// Incremental propagator over one formula, with checkpoint/rollback of the trail.
#[derive(Clone, Debug)]
pub struct Propagator<'a> {
    cnf: &'a Cnf,
    occurs: Vec<Vec<u32>>,
    values: Vec<Option<bool>>,
    position: Vec<u32>,
    trail: Vec<TraceEntry>,
    qhead: usize,
    conflict: Option<Conflict>,
}

impl<'a> Propagator<'a> {
    /// Creates the propagator and runs the formula's unit clauses to a fixpoint.
    pub fn new(cnf: &'a Cnf) -> Self {
        let n = cnf.num_vars();
        let mut occurs = vec![Vec::new(); 2 * n];
        for (i, clause) in cnf.clauses().iter().enumerate() {
            for lit in clause.lits() {
                occurs[lit.code()].push(i as u32);
            }
        }
        let mut p = Propagator {
            cnf,
            occurs,
            values: vec![None; n],
            position: vec![0; n],
            trail: Vec::new(),
            qhead: 0,
            conflict: None,
        };
        for (i, clause) in cnf.clauses().iter().enumerate() {
            if p.conflict.is_some() {
                break;
            }
            match clause.lits() {
                [] => p.conflict = Some(Conflict::Clause(i)),
                [l] => match p.value(*l) {
                    Some(true) => {}
                    Some(false) => p.conflict = Some(Conflict::Clause(i)),
                    None => p.assign(*l, Antecedent::Clause(i)),
                },
                _ => {}
            }
        }
        if p.conflict.is_none() {
            p.run();
        }
        p
    }

    pub fn cnf(&self) -> &'a Cnf {
        self.cnf
    }

    pub fn value(&self, lit: Lit) -> Option<bool> {
        self.values[lit.var().index()].map(|v| v == lit.is_positive())
    }

    pub fn conflict(&self) -> Option<Conflict> {
        self.conflict
    }

    pub fn trail(&self) -> &[TraceEntry] {
        &self.trail
    }

    /// Trail position of an assigned variable's entry.
    pub fn position(&self, lit: Lit) -> Option<usize> {
        self.values[lit.var().index()].map(|_| self.position[lit.var().index()] as usize)
    }

    pub fn entry_of(&self, lit: Lit) -> Option<&TraceEntry> {
        self.position(lit).map(|p| &self.trail[p])
    }

    fn assign(&mut self, lit: Lit, antecedent: Antecedent) {
        let v = lit.var().index();
        self.values[v] = Some(lit.is_positive());
        self.position[v] = self.trail.len() as u32;
        self.trail.push(TraceEntry { lit, antecedent });
    }

    /// Applies one assumption and propagates. A no-op when the literal already holds.
    pub fn assume(&mut self, lit: Lit) -> Option<Conflict> {
        if self.conflict.is_some() {
            return self.conflict;
        }
        match self.value(lit) {
            Some(true) => None,
            Some(false) => {
                self.conflict = Some(Conflict::Assumption(lit));
                self.conflict
            }
            None => {
                self.assign(lit, Antecedent::Assumption);
                self.run();
                self.conflict
            }
        }
    }

    fn run(&mut self) {
        while self.qhead < self.trail.len() && self.conflict.is_none() {
            let lit = self.trail[self.qhead].lit;
            self.qhead += 1;
            let falsified = (!lit).code();
            for k in 0..self.occurs[falsified].len() {
                let ci = self.occurs[falsified][k] as usize;
                let mut open = None;
                let mut open_count = 0;
                let mut satisfied = false;
                for &l in self.cnf.clauses()[ci].lits() {
                    match self.value(l) {
                        Some(true) => {
                            satisfied = true;
                            break;
                        }
                        Some(false) => {}
                        None => {
                            open_count += 1;
                            open = Some(l);
                        }
                    }
                }
                if satisfied {
                    continue;
                }
                match open_count {
                    0 => {
                        self.conflict = Some(Conflict::Clause(ci));
                        return;
                    }
                    1 => self.assign(open.unwrap(), Antecedent::Clause(ci)),
                    _ => {}
                }
            }
        }
    }

    pub fn checkpoint(&self) -> usize {
        debug_assert!(self.conflict.is_none());
        self.trail.len()
    }

    /// Undoes everything assigned after `mark` and clears any conflict.
    pub fn rollback(&mut self, mark: usize) {
        for entry in &self.trail[mark..] {
            self.values[entry.lit.var().index()] = None;
        }
        self.trail.truncate(mark);
        self.qhead = mark;
        self.conflict = None;
    }

    pub fn to_trace(&self) -> PropagationTrace {
        PropagationTrace {
            entries: self.trail.clone(),
            conflict: self.conflict,
        }
    }
}

/// Exhaustive unit propagation from the formula's units and `assumptions`; no decisions.
pub fn propagate(cnf: &Cnf, assumptions: &[Lit]) -> PropagationTrace {
    let mut p = Propagator::new(cnf);
    for &a in assumptions {
        if p.assume(a).is_some() {
            break;
        }
    }
    p.to_trace()
}

/// Replays a trace: each forced literal's antecedent must have all other literals falsified by
/// earlier entries, and a conflict clause must be fully falsified.
pub fn replay_trace(cnf: &Cnf, assumptions: &[Lit], trace: &PropagationTrace) -> bool {
    use std::collections::HashSet;
    let mut truth: HashSet<Lit> = HashSet::new();
    for entry in &trace.entries {
        if truth.contains(&!entry.lit) {
            return false;
        }
        match entry.antecedent {
            Antecedent::Assumption => {
                if !assumptions.contains(&entry.lit) {
                    return false;
                }
            }
            Antecedent::Clause(ci) => {
                let Some(clause) = cnf.clauses().get(ci) else {
                    return false;
                };
                if !clause.contains(entry.lit) {
                    return false;
                }
                if !clause
                    .lits()
                    .iter()
                    .filter(|&&l| l != entry.lit)
                    .all(|l| truth.contains(&!*l))
                {
                    return false;
                }
            }
        }
        truth.insert(entry.lit);
    }
    match trace.conflict {
        None => true,
        Some(Conflict::Clause(ci)) => cnf
            .clauses()
            .get(ci)
            .is_some_and(|c| c.lits().iter().all(|l| truth.contains(&!*l))),
        Some(Conflict::Assumption(a)) => assumptions.contains(&a) && truth.contains(&!a),
    }
}
