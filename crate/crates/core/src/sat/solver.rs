//! A small CDCL solver: two watched literals, first-UIP learning with local minimization,
//! VSIDS branching with phase saving, Luby restarts, and periodic learnt-clause reduction.
//!
//! Every choice is deterministic (activity ties break toward the lower variable index), so runs
//! are reproducible. Assumptions occupy the first decision levels, which keeps learned clauses
//! valid across calls with different assumptions.

use std::collections::HashSet;

use super::SatError;
use crate::cnf::{Cnf, Lit, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Value {
    True,
    False,
    Unassigned,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Polarity {
    #[default]
    FalseFirst,
    /// Seeded pseudo-random initial phase; used to check results do not depend on the first model.
    Random(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    pub polarity: Polarity,
    pub restarts: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            polarity: Polarity::FalseFirst,
            restarts: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveResult {
    /// A total assignment, indexed by variable.
    Sat(Vec<bool>),
    Unsat,
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveResult::Sat(_))
    }

    pub fn model(&self) -> Option<&[bool]> {
        match self {
            SolveResult::Sat(m) => Some(m),
            SolveResult::Unsat => None,
        }
    }
}

#[derive(Clone, Debug)]
struct StoredClause {
    lits: Vec<Lit>,
    learnt: bool,
    deleted: bool,
    activity: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub decisions: u64,
    pub conflicts: u64,
    pub propagations: u64,
    pub learnt: u64,
}

/// Max-heap of variables keyed by activity.
#[derive(Clone, Debug, Default)]
struct VarOrder {
    heap: Vec<u32>,
    pos: Vec<Option<usize>>,
}

impl VarOrder {
    fn new(n: usize) -> Self {
        VarOrder {
            heap: (0..n as u32).collect(),
            pos: (0..n).map(Some).collect(),
        }
    }

    fn before(act: &[f64], a: u32, b: u32) -> bool {
        let (x, y) = (act[a as usize], act[b as usize]);
        x > y || (x == y && a < b)
    }

    fn contains(&self, v: usize) -> bool {
        self.pos[v].is_some()
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            if !Self::before(act, v, self.heap[parent]) {
                break;
            }
            self.heap[i] = self.heap[parent];
            self.pos[self.heap[i] as usize] = Some(i);
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v as usize] = Some(i);
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        loop {
            let l = 2 * i + 1;
            if l >= self.heap.len() {
                break;
            }
            let r = l + 1;
            let child = if r < self.heap.len() && Self::before(act, self.heap[r], self.heap[l]) {
                r
            } else {
                l
            };
            if !Self::before(act, self.heap[child], v) {
                break;
            }
            self.heap[i] = self.heap[child];
            self.pos[self.heap[i] as usize] = Some(i);
            i = child;
        }
        self.heap[i] = v;
        self.pos[v as usize] = Some(i);
    }

    fn insert(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.heap.push(v as u32);
        let i = self.heap.len() - 1;
        self.pos[v] = Some(i);
        self.up(i, act);
    }

    fn bumped(&mut self, v: usize, act: &[f64]) {
        if let Some(i) = self.pos[v] {
            self.up(i, act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().unwrap();
        self.pos[top as usize] = None;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last as usize] = Some(0);
            self.down(0, act);
        }
        Some(top as usize)
    }
}

#[derive(Clone, Debug)]
pub struct Solver {
    num_vars: usize,
    clauses: Vec<StoredClause>,
    watches: Vec<Vec<u32>>,
    values: Vec<Value>,
    level: Vec<u32>,
    reason: Vec<Option<u32>>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    seen: Vec<bool>,
    activity: Vec<f64>,
    var_inc: f64,
    clause_inc: f64,
    order: VarOrder,
    phase: Vec<bool>,
    max_learnts: f64,
    live_learnts: usize,
    restarts: bool,
    ok: bool,
    pub stats: SolverStats,
}

fn luby(mut x: u64) -> u64 {
    // Luby sequence 1 1 2 1 1 2 4 ...
    let (mut size, mut seq) = (1u64, 0u32);
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    1u64 << seq
}

const VAR_DECAY: f64 = 0.95;
const CLAUSE_DECAY: f64 = 0.999;

impl Solver {
    pub fn new(cnf: &Cnf) -> Self {
        Self::with_config(cnf, SolverConfig::default())
    }

    pub fn with_config(cnf: &Cnf, config: SolverConfig) -> Self {
        let clauses = cnf.clauses().iter().map(|c| c.lits().to_vec());
        Self::from_lits(cnf.num_vars(), clauses, config)
    }

    pub fn from_lits(
        num_vars: usize,
        clauses: impl IntoIterator<Item = Vec<Lit>>,
        config: SolverConfig,
    ) -> Self {
        let phase = match config.polarity {
            Polarity::FalseFirst => vec![false; num_vars],
            Polarity::Random(seed) => {
                let mut x = seed | 1;
                (0..num_vars)
                    .map(|_| {
                        // xorshift64
                        x ^= x << 13;
                        x ^= x >> 7;
                        x ^= x << 17;
                        x & 1 == 1
                    })
                    .collect()
            }
        };
        let mut s = Solver {
            num_vars,
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * num_vars],
            values: vec![Value::Unassigned; num_vars],
            level: vec![0; num_vars],
            reason: vec![None; num_vars],
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            seen: vec![false; num_vars],
            activity: vec![0.0; num_vars],
            var_inc: 1.0,
            clause_inc: 1.0,
            order: VarOrder::new(num_vars),
            phase,
            max_learnts: 0.0,
            live_learnts: 0,
            restarts: config.restarts,
            ok: true,
            stats: SolverStats::default(),
        };
        for lits in clauses {
            s.add_clause(lits);
        }
        s.max_learnts = (s.clauses.len() as f64 / 3.0).max(2000.0);
        s
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    fn value(&self, lit: Lit) -> Value {
        match self.values[lit.var().index()] {
            Value::Unassigned => Value::Unassigned,
            v if lit.is_positive() => v,
            Value::True => Value::False,
            Value::False => Value::True,
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    /// Adds a clause at level 0. Returns false once the formula is known unsatisfiable.
    pub fn add_clause(&mut self, mut lits: Vec<Lit>) -> bool {
        if !self.ok {
            return false;
        }
        self.backtrack(0);
        lits.sort_unstable();
        lits.dedup();
        if lits.windows(2).any(|w| w[0] == !w[1]) {
            return true;
        }
        // drop literals false at level 0, skip satisfied clauses
        if lits.iter().any(|&l| self.value(l) == Value::True) {
            return true;
        }
        lits.retain(|&l| self.value(l) != Value::False);
        match lits.len() {
            0 => {
                self.ok = false;
                false
            }
            1 => {
                self.enqueue(lits[0], None);
                if self.propagate().is_some() {
                    self.ok = false;
                }
                self.ok
            }
            _ => {
                self.attach(lits, false);
                true
            }
        }
    }

    fn attach(&mut self, lits: Vec<Lit>, learnt: bool) -> u32 {
        let idx = self.clauses.len() as u32;
        self.watches[lits[0].code()].push(idx);
        self.watches[lits[1].code()].push(idx);
        self.clauses.push(StoredClause {
            lits,
            learnt,
            deleted: false,
            activity: 0.0,
        });
        idx
    }

    fn enqueue(&mut self, lit: Lit, reason: Option<u32>) {
        let v = lit.var().index();
        debug_assert_eq!(self.values[v], Value::Unassigned);
        self.values[v] = if lit.is_positive() {
            Value::True
        } else {
            Value::False
        };
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(lit);
    }

    /// Watches are keyed by the watched literal; a clause is visited when that literal turns false.
    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[false_lit.code()]);
            let mut i = 0;
            let mut conflict = None;
            while i < ws.len() {
                let cref = ws[i];
                let ci = cref as usize;
                if self.clauses[ci].deleted {
                    ws.swap_remove(i);
                    continue;
                }
                if self.clauses[ci].lits[0] == false_lit {
                    self.clauses[ci].lits.swap(0, 1);
                }
                let first = self.clauses[ci].lits[0];
                if self.value(first) == Value::True {
                    i += 1;
                    continue;
                }
                let len = self.clauses[ci].lits.len();
                let replacement =
                    (2..len).find(|&k| self.value(self.clauses[ci].lits[k]) != Value::False);
                if let Some(k) = replacement {
                    self.clauses[ci].lits.swap(1, k);
                    let new_watch = self.clauses[ci].lits[1];
                    self.watches[new_watch.code()].push(cref);
                    ws.swap_remove(i);
                    continue;
                }
                if self.value(first) == Value::False {
                    conflict = Some(cref);
                    break;
                }
                self.enqueue(first, Some(cref));
                i += 1;
            }
            // watchers not yet visited stay in place
            let rest = std::mem::take(&mut self.watches[false_lit.code()]);
            ws.extend(rest);
            self.watches[false_lit.code()] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.order.bumped(v, &self.activity);
    }

    fn bump_clause(&mut self, ci: usize) {
        let c = &mut self.clauses[ci];
        if !c.learnt {
            return;
        }
        c.activity += self.clause_inc;
        if c.activity > 1e20 {
            for c in self.clauses.iter_mut().filter(|c| c.learnt) {
                c.activity *= 1e-20;
            }
            self.clause_inc *= 1e-20;
        }
    }

    fn analyze(&mut self, confl: u32) -> (Vec<Lit>, u32) {
        let mut learnt: Vec<Lit> = vec![Lit::new(Var(0), true)];
        let mut counter = 0;
        let mut p: Option<Lit> = None;
        let mut index = self.trail.len();
        let mut cref = confl;
        let current = self.decision_level();
        let mut touched = Vec::new();
        loop {
            self.bump_clause(cref as usize);
            let lits = self.clauses[cref as usize].lits.clone();
            let start = usize::from(p.is_some());
            for &q in &lits[start..] {
                let v = q.var().index();
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    touched.push(v);
                    self.bump_var(v);
                    if self.level[v] >= current {
                        counter += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            // next literal on the trail to expand
            loop {
                index -= 1;
                if self.seen[self.trail[index].var().index()] {
                    break;
                }
            }
            let lit = self.trail[index];
            p = Some(lit);
            self.seen[lit.var().index()] = false;
            counter -= 1;
            if counter == 0 {
                break;
            }
            cref = self.reason[lit.var().index()].expect("implied literal has a reason");
            // reason clauses keep the implied literal first
            let lits = &mut self.clauses[cref as usize].lits;
            if lits[0] != lit {
                let pos = lits.iter().position(|&l| l == lit).unwrap();
                lits.swap(0, pos);
            }
        }
        learnt[0] = !p.unwrap();
        // drop literals whose reason is covered by the rest of the clause
        let kept: Vec<Lit> = learnt[1..]
            .iter()
            .copied()
            .filter(|&q| match self.reason[q.var().index()] {
                None => true,
                Some(r) => self.clauses[r as usize].lits.iter().any(|&l| {
                    let v = l.var().index();
                    v != q.var().index() && !self.seen[v] && self.level[v] > 0
                }),
            })
            .collect();
        learnt.truncate(1);
        learnt.extend(kept);
        for v in touched {
            self.seen[v] = false;
        }
        let mut back = 0;
        if learnt.len() > 1 {
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.level[learnt[i].var().index()] > self.level[learnt[max_i].var().index()] {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            back = self.level[learnt[1].var().index()];
        }
        self.var_inc /= VAR_DECAY;
        self.clause_inc /= CLAUSE_DECAY;
        (learnt, back)
    }

    fn backtrack(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let lim = self.trail_lim[level as usize];
        for k in lim..self.trail.len() {
            let lit = self.trail[k];
            let v = lit.var().index();
            self.values[v] = Value::Unassigned;
            self.reason[v] = None;
            self.phase[v] = lit.is_positive();
            self.order.insert(v, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level as usize);
        self.qhead = lim;
    }

    fn locked(&self, ci: usize) -> bool {
        let first = self.clauses[ci].lits[0];
        self.value(first) == Value::True && self.reason[first.var().index()] == Some(ci as u32)
    }

    /// Deletes the less active half of the learnt clauses that are not reasons.
    fn reduce_learnts(&mut self) {
        let mut learnts: Vec<usize> = (0..self.clauses.len())
            .filter(|&i| self.clauses[i].learnt && !self.clauses[i].deleted)
            .collect();
        learnts.sort_by(|&a, &b| {
            self.clauses[a]
                .activity
                .total_cmp(&self.clauses[b].activity)
                .then(a.cmp(&b))
        });
        let half = learnts.len() / 2;
        for &ci in &learnts[..half] {
            if self.clauses[ci].lits.len() > 2 && !self.locked(ci) {
                self.clauses[ci].deleted = true;
                self.live_learnts -= 1;
                self.clauses[ci].lits.shrink_to_fit();
            }
        }
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.order.pop(&self.activity) {
            if self.values[v] == Value::Unassigned {
                return Some(Var(v as u32).lit(self.phase[v]));
            }
        }
        None
    }

    fn check_assumptions(&self, assumptions: &[Lit]) -> Result<(), SatError> {
        let mut seen = HashSet::new();
        for &a in assumptions {
            if a.var().index() >= self.num_vars {
                return Err(SatError::UnknownVariable(a.var().0 + 1));
            }
            if seen.contains(&!a) {
                return Err(SatError::ContradictoryAssumptions(
                    a.to_dimacs().unsigned_abs(),
                ));
            }
            seen.insert(a);
        }
        Ok(())
    }

    pub fn solve(&mut self, assumptions: &[Lit]) -> Result<SolveResult, SatError> {
        self.check_assumptions(assumptions)?;
        if !self.ok {
            return Ok(SolveResult::Unsat);
        }
        self.backtrack(0);
        if self.propagate().is_some() {
            self.ok = false;
            return Ok(SolveResult::Unsat);
        }
        let mut restart_round = 0u64;
        let mut budget = if self.restarts {
            100 * luby(0)
        } else {
            u64::MAX
        };
        let mut conflicts_here = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                conflicts_here += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    return Ok(SolveResult::Unsat);
                }
                let (learnt, back) = self.analyze(confl);
                self.backtrack(back);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], None);
                } else {
                    let asserting = learnt[0];
                    let cref = self.attach(learnt, true);
                    self.clauses[cref as usize].activity = self.clause_inc;
                    self.stats.learnt += 1;
                    self.live_learnts += 1;
                    self.enqueue(asserting, Some(cref));
                }
                continue;
            }
            if conflicts_here >= budget {
                restart_round += 1;
                budget = 100 * luby(restart_round);
                conflicts_here = 0;
                self.backtrack(0);
                continue;
            }
            if self.live_learnts as f64 > self.max_learnts + self.trail.len() as f64 {
                self.reduce_learnts();
                self.max_learnts *= 1.1;
            }
            let level = self.decision_level() as usize;
            let next = if level < assumptions.len() {
                let a = assumptions[level];
                match self.value(a) {
                    Value::True => {
                        self.trail_lim.push(self.trail.len());
                        continue;
                    }
                    Value::False => {
                        self.backtrack(0);
                        return Ok(SolveResult::Unsat);
                    }
                    Value::Unassigned => a,
                }
            } else {
                match self.pick_branch() {
                    Some(l) => {
                        self.stats.decisions += 1;
                        l
                    }
                    None => {
                        let model: Vec<bool> =
                            self.values.iter().map(|&v| v == Value::True).collect();
                        debug_assert!(self.model_satisfies(&model));
                        self.backtrack(0);
                        return Ok(SolveResult::Sat(model));
                    }
                }
            };
            self.trail_lim.push(self.trail.len());
            self.enqueue(next, None);
        }
    }

    fn model_satisfies(&self, model: &[bool]) -> bool {
        self.clauses.iter().filter(|c| !c.learnt).all(|c| {
            c.lits
                .iter()
                .any(|l| model[l.var().index()] == l.is_positive())
        })
    }
}

/// Solves `cnf` under `assumptions` with a fresh solver.
pub fn solve(cnf: &Cnf, assumptions: &[Lit]) -> Result<SolveResult, SatError> {
    Solver::new(cnf).solve(assumptions)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lits(v: &[i64]) -> Vec<Lit> {
        v.iter().map(|&x| Lit::from_dimacs(x).unwrap()).collect()
    }

    fn solver(n: usize, cls: &[&[i64]]) -> Solver {
        Solver::from_lits(n, cls.iter().map(|c| lits(c)), SolverConfig::default())
    }

    #[test]
    fn luby_prefix() {
        let seq: Vec<u64> = (0..15).map(luby).collect();
        assert_eq!(seq, vec![1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]);
    }

    #[test]
    fn classic_two_cnf_is_unsat() {
        let mut s = solver(2, &[&[1, 2], &[1, -2], &[-1, 2], &[-1, -2]]);
        assert_eq!(s.solve(&[]).unwrap(), SolveResult::Unsat);
    }

    #[test]
    fn simple_sat_and_assumptions() {
        let mut s = solver(3, &[&[1, 2], &[-1, 3]]);
        let m = s.solve(&[]).unwrap();
        let m = m.model().unwrap();
        assert!(m[0] || m[1]);
        assert_eq!(s.solve(&lits(&[1, -3])).unwrap(), SolveResult::Unsat);
        assert!(s.solve(&lits(&[1])).unwrap().is_sat());
        assert!(matches!(
            s.solve(&lits(&[1, -1])),
            Err(SatError::ContradictoryAssumptions(1))
        ));
        assert!(matches!(
            s.solve(&lits(&[9])),
            Err(SatError::UnknownVariable(9))
        ));
    }

    #[test]
    fn empty_clause_and_empty_formula() {
        let mut s = Solver::from_lits(1, vec![vec![]], SolverConfig::default());
        assert_eq!(s.solve(&[]).unwrap(), SolveResult::Unsat);
        let mut s = Solver::from_lits(0, Vec::<Vec<Lit>>::new(), SolverConfig::default());
        assert_eq!(s.solve(&[]).unwrap(), SolveResult::Sat(vec![]));
    }

    #[test]
    fn pigeonhole_three_into_two() {
        // p(i,j): pigeon i in hole j, var = 2*i + j + 1
        let v = |i: i64, j: i64| 2 * i + j + 1;
        let mut cls: Vec<Vec<i64>> = (0..3).map(|i| vec![v(i, 0), v(i, 1)]).collect();
        for j in 0..2 {
            for a in 0..3 {
                for b in a + 1..3 {
                    cls.push(vec![-v(a, j), -v(b, j)]);
                }
            }
        }
        let mut s = Solver::from_lits(6, cls.iter().map(|c| lits(c)), SolverConfig::default());
        assert_eq!(s.solve(&[]).unwrap(), SolveResult::Unsat);
    }
}
