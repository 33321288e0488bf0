//! Propositional encodings of a Hitori grid.
//!
//! The weak encoding mentions only the cell-clear variables `c_{i,j}` (true when the cell is
//! unshaded): uniqueness, separation, and the sandwich and unshaded-neighbour lemmas. The strong
//! encoding adds parent links, turn parity, and a root selector so that every model describes a
//! spanning tree of the unshaded cells.

use std::collections::{HashMap, HashSet};
use std::fmt::{self, Write as _};
use std::ops::Not;
use std::sync::Arc;

use thiserror::Error;

use crate::grid::{CellRef, CellStatus, Grid, ShadingState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub u32);

impl Var {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn lit(self, positive: bool) -> Lit {
        Lit::new(self, positive)
    }

    pub fn positive(self) -> Lit {
        Lit::new(self, true)
    }

    pub fn negative(self) -> Lit {
        Lit::new(self, false)
    }
}

/// A variable or its negation, packed as `2 * var + negated`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: Var, positive: bool) -> Self {
        Lit(var.0 << 1 | u32::from(!positive))
    }

    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    pub fn code(self) -> usize {
        self.0 as usize
    }

    pub fn from_code(code: usize) -> Self {
        Lit(code as u32)
    }

    /// Signed 1-based DIMACS form.
    pub fn to_dimacs(self) -> i64 {
        let v = i64::from(self.var().0) + 1;
        if self.is_positive() {
            v
        } else {
            -v
        }
    }

    pub fn from_dimacs(value: i64) -> Option<Self> {
        if value == 0 {
            return None;
        }
        let var = Var(u32::try_from(value.unsigned_abs() - 1).ok()?);
        Some(Lit::new(var, value > 0))
    }
}

impl Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

/// Semantic role of a variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarTag {
    CellClear(CellRef),
    HLink(CellRef, u8),
    VLink(CellRef, u8),
    Parity(CellRef),
    Root,
    /// A variable with no grid meaning (DIMACS input, synthetic tests), named `x{n}`.
    Free(u32),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodeError {
    #[error("bad variable name {0:?}")]
    BadName(String),
    #[error("clause has no human-readable reason")]
    UnknownReason,
}

/// Formats a tag as its external variable name (`c01_04`, `h02_03_1`, `p01_01`, `root`).
pub fn var_name(tag: VarTag) -> String {
    match tag {
        VarTag::CellClear(c) => format!("c{:02}_{:02}", c.row + 1, c.col + 1),
        VarTag::HLink(c, b) => format!("h{:02}_{:02}_{}", c.row + 1, c.col + 1, b),
        VarTag::VLink(c, b) => format!("v{:02}_{:02}_{}", c.row + 1, c.col + 1, b),
        VarTag::Parity(c) => format!("p{:02}_{:02}", c.row + 1, c.col + 1),
        VarTag::Root => "root".to_string(),
        VarTag::Free(n) => format!("x{n}"),
    }
}

/// Inverse of [`var_name`].
pub fn parse_var_name(text: &str) -> Result<VarTag, EncodeError> {
    let bad = || EncodeError::BadName(text.to_string());
    if text == "root" {
        return Ok(VarTag::Root);
    }
    let two = |s: &str| -> Result<usize, EncodeError> {
        if s.len() != 2 || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let v: usize = s.parse().map_err(|_| bad())?;
        v.checked_sub(1).ok_or_else(bad)
    };
    if let Some(n) = text.strip_prefix('x') {
        if !n.is_empty() && n.bytes().all(|b| b.is_ascii_digit()) {
            return n.parse().map(VarTag::Free).map_err(|_| bad());
        }
        return Err(bad());
    }
    let kind = text.chars().next().ok_or_else(bad)?;
    let parts: Vec<&str> = text[1..].split('_').collect();
    match (kind, parts.as_slice()) {
        ('c', [r, c]) => Ok(VarTag::CellClear(CellRef::new(two(r)?, two(c)?))),
        ('p', [r, c]) => Ok(VarTag::Parity(CellRef::new(two(r)?, two(c)?))),
        ('h' | 'v', [r, c, b]) => {
            let bit = match *b {
                "0" => 0,
                "1" => 1,
                _ => return Err(bad()),
            };
            let cell = CellRef::new(two(r)?, two(c)?);
            Ok(if kind == 'h' {
                VarTag::HLink(cell, bit)
            } else {
                VarTag::VLink(cell, bit)
            })
        }
        _ => Err(bad()),
    }
}

/// Bidirectional map between variable ids and tags.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VarRegistry {
    tags: Vec<VarTag>,
    ids: HashMap<VarTag, Var>,
}

impl VarRegistry {
    pub fn register(&mut self, tag: VarTag) -> Var {
        if let Some(&v) = self.ids.get(&tag) {
            return v;
        }
        let v = Var(self.tags.len() as u32);
        self.tags.push(tag);
        self.ids.insert(tag, v);
        v
    }

    pub fn get(&self, tag: VarTag) -> Option<Var> {
        self.ids.get(&tag).copied()
    }

    pub fn tag(&self, var: Var) -> Option<VarTag> {
        self.tags.get(var.index()).copied()
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, VarTag)> + '_ {
        self.tags
            .iter()
            .enumerate()
            .map(|(i, &t)| (Var(i as u32), t))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    Row,
    Column,
    Both,
}

/// Why a clause is in the encoding.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ReasonTag {
    Uniqueness(CellRef, CellRef),
    Separation(CellRef, CellRef),
    Sandwich(CellRef, Axis),
    UnshadedNeighbor(CellRef),
    /// Unit added by a connectivity argument: shading this cell would cut the unshaded cells apart.
    ArticulationPoint(CellRef),
    ParentLink(String),
    Parity(String),
    Root(String),
    Blocking,
    /// The assumed opposite of a subgoal; `clear` is the assumed value of the cell.
    GoalAssumption(CellRef, bool),
    Derived,
}

/// A disjunction of literals. Literals are kept sorted and free of duplicates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Clause {
    lits: Vec<Lit>,
    pub reason: ReasonTag,
}

impl Clause {
    pub fn new(lits: impl IntoIterator<Item = Lit>, reason: ReasonTag) -> Self {
        let mut lits: Vec<Lit> = lits.into_iter().collect();
        lits.sort_unstable();
        lits.dedup();
        debug_assert!(
            lits.windows(2).all(|w| w[0].var() != w[1].var()),
            "tautological clause"
        );
        Clause { lits, reason }
    }

    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.lits.len() == 1
    }

    pub fn contains(&self, lit: Lit) -> bool {
        self.lits.binary_search(&lit).is_ok()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strength {
    Weak,
    Strong,
}

/// A clause list over a shared variable registry.
#[derive(Clone, Debug)]
pub struct Cnf {
    clauses: Vec<Clause>,
    registry: Arc<VarRegistry>,
    strength: Strength,
}

impl Cnf {
    /// Builds a formula outside the Hitori encoders (tests, DIMACS input).
    pub fn from_clauses(registry: VarRegistry, clauses: Vec<Clause>, strength: Strength) -> Self {
        Cnf {
            clauses,
            registry: Arc::new(registry),
            strength,
        }
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn registry(&self) -> &VarRegistry {
        &self.registry
    }

    pub fn strength(&self) -> Strength {
        self.strength
    }

    pub fn num_vars(&self) -> usize {
        self.registry.len()
    }

    /// A copy with extra clauses appended; the registry is shared.
    pub fn with_clauses(&self, extra: impl IntoIterator<Item = Clause>) -> Cnf {
        let mut out = self.clone();
        out.clauses.extend(extra);
        out
    }

    pub fn push(&mut self, clause: Clause) {
        self.clauses.push(clause);
    }

    /// Literal asserting `cell` is unshaded (`clear = true`) or shaded.
    pub fn cell_lit(&self, cell: CellRef, clear: bool) -> Lit {
        let var = self
            .registry
            .get(VarTag::CellClear(cell))
            .expect("cell variable registered");
        var.lit(clear)
    }

    /// The cell and clear-value a CellClear literal asserts.
    pub fn lit_cell(&self, lit: Lit) -> Option<(CellRef, bool)> {
        match self.registry.tag(lit.var())? {
            VarTag::CellClear(c) => Some((c, lit.is_positive())),
            _ => None,
        }
    }

    pub fn cell_vars(&self) -> Vec<Var> {
        self.registry
            .iter()
            .filter(|(_, t)| matches!(t, VarTag::CellClear(_)))
            .map(|(v, _)| v)
            .collect()
    }

    pub fn lit_name(&self, lit: Lit) -> String {
        let name = self
            .registry
            .tag(lit.var())
            .map(var_name)
            .unwrap_or_else(|| format!("x{}", lit.var().0 + 1));
        if lit.is_positive() {
            name
        } else {
            format!("(not {name})")
        }
    }

    /// `c01_04`, `(or c01_02 (not c01_03))`, or `false`.
    pub fn clause_text(&self, clause: &Clause) -> String {
        match clause.lits() {
            [] => "false".to_string(),
            [l] => self.lit_name(*l),
            lits => {
                let names: Vec<String> = lits.iter().map(|&l| self.lit_name(l)).collect();
                format!("(or {})", names.join(" "))
            }
        }
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        for (var, tag) in self.registry.iter() {
            let _ = writeln!(out, "c var {} {}", var.0 + 1, var_name(tag));
        }
        let _ = writeln!(out, "p cnf {} {}", self.num_vars(), self.clauses.len());
        for clause in &self.clauses {
            let _ = writeln!(out, "c reason {:?}", clause.reason);
            for lit in clause.lits() {
                let _ = write!(out, "{} ", lit.to_dimacs());
            }
            out.push_str("0\n");
        }
        out
    }
}

/// Accumulates clauses, dropping repeats of the same literal set with the same reason.
struct ClauseSink {
    clauses: Vec<Clause>,
    seen: HashSet<Clause>,
}

impl ClauseSink {
    fn new() -> Self {
        ClauseSink {
            clauses: Vec::new(),
            seen: HashSet::new(),
        }
    }

    fn add(&mut self, lits: impl IntoIterator<Item = Lit>, reason: ReasonTag) {
        let clause = Clause::new(lits, reason);
        if self.seen.insert(clause.clone()) {
            self.clauses.push(clause);
        }
    }
}

fn register_cells(grid: &Grid) -> VarRegistry {
    let mut reg = VarRegistry::default();
    for cell in grid.cells() {
        reg.register(VarTag::CellClear(cell));
    }
    reg
}

fn sandwich_axis(grid: &Grid, cell: CellRef) -> Option<Axis> {
    let CellRef { row, col } = cell;
    let horizontal = col > 0
        && col + 1 < grid.cols()
        && grid.symbol(CellRef::new(row, col - 1)) == grid.symbol(CellRef::new(row, col + 1));
    let vertical = row > 0
        && row + 1 < grid.rows()
        && grid.symbol(CellRef::new(row - 1, col)) == grid.symbol(CellRef::new(row + 1, col));
    match (horizontal, vertical) {
        (true, true) => Some(Axis::Both),
        (true, false) => Some(Axis::Row),
        (false, true) => Some(Axis::Column),
        (false, false) => None,
    }
}

fn weak_clauses(grid: &Grid, reg: &VarRegistry, sink: &mut ClauseSink) {
    let c = |cell: CellRef| reg.get(VarTag::CellClear(cell)).unwrap();
    for (a, b) in grid.duplicate_pairs() {
        sink.add(
            [c(a).negative(), c(b).negative()],
            ReasonTag::Uniqueness(a, b),
        );
    }
    for (a, b) in grid.adjacent_pairs() {
        sink.add(
            [c(a).positive(), c(b).positive()],
            ReasonTag::Separation(a, b),
        );
    }
    for cell in grid.cells() {
        if let Some(axis) = sandwich_axis(grid, cell) {
            sink.add([c(cell).positive()], ReasonTag::Sandwich(cell, axis));
        }
    }
    if grid.len() == 1 {
        let only = CellRef::new(0, 0);
        sink.add(
            [c(only).positive()],
            ReasonTag::Root(format!("{only} is the only cell, so it must be unshaded")),
        );
    }
    if grid.len() >= 4 {
        for cell in grid.cells() {
            let lits: Vec<Lit> = grid.neighbors(cell).map(|nb| c(nb).positive()).collect();
            sink.add(lits, ReasonTag::UnshadedNeighbor(cell));
        }
    }
}

/// Uniqueness, separation, sandwich units, and unshaded-neighbour clauses over `c_{i,j}` only.
/// A 1x1 grid gets the unit clause for its only cell instead.
pub fn encode_weak(grid: &Grid) -> Cnf {
    let reg = register_cells(grid);
    let mut sink = ClauseSink::new();
    weak_clauses(grid, &reg, &mut sink);
    Cnf {
        clauses: sink.clauses,
        registry: Arc::new(reg),
        strength: Strength::Weak,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Dir {
    Up,
    Down,
    Left,
    Right,
}

impl Dir {
    const ALL: [Dir; 4] = [Dir::Up, Dir::Down, Dir::Left, Dir::Right];

    fn opposite(self) -> Dir {
        match self {
            Dir::Up => Dir::Down,
            Dir::Down => Dir::Up,
            Dir::Left => Dir::Right,
            Dir::Right => Dir::Left,
        }
    }

    fn step(self, grid: &Grid, cell: CellRef) -> Option<CellRef> {
        let CellRef { row, col } = cell;
        match self {
            Dir::Up => (row > 0).then(|| CellRef::new(row - 1, col)),
            Dir::Down => (row + 1 < grid.rows()).then(|| CellRef::new(row + 1, col)),
            Dir::Left => (col > 0).then(|| CellRef::new(row, col - 1)),
            Dir::Right => (col + 1 < grid.cols()).then(|| CellRef::new(row, col + 1)),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Dir::Up => "up",
            Dir::Down => "down",
            Dir::Left => "left",
            Dir::Right => "right",
        }
    }
}

struct LinkVars {
    h1: Var,
    h0: Var,
    v1: Var,
    v0: Var,
    p: Var,
}

impl LinkVars {
    /// Literals whose disjunction says "the link does not point in `dir`".
    /// Codes: h (0,1)=right, (1,0)=left; v (0,1)=up, (1,0)=down.
    fn not_pointing(&self, dir: Dir) -> [Lit; 2] {
        match dir {
            Dir::Right => [self.h1.positive(), self.h0.negative()],
            Dir::Left => [self.h1.negative(), self.h0.positive()],
            Dir::Up => [self.v1.positive(), self.v0.negative()],
            Dir::Down => [self.v1.negative(), self.v0.positive()],
        }
    }
}

/// The weak clauses plus parent-link, parity, and root clauses whose models are exactly the
/// spanning trees of connected shadings. A 1x1 grid yields the weak encoding.
///
/// The root sits on one of the first two cells of the first row (first column when the grid
/// has a single column); the root variable selects the second of them.
pub fn encode_strong(grid: &Grid) -> Cnf {
    if grid.len() < 2 {
        return encode_weak(grid);
    }
    let mut reg = register_cells(grid);
    let links: Vec<LinkVars> = grid
        .cells()
        .map(|cell| LinkVars {
            h1: reg.register(VarTag::HLink(cell, 1)),
            h0: reg.register(VarTag::HLink(cell, 0)),
            v1: reg.register(VarTag::VLink(cell, 1)),
            v0: reg.register(VarTag::VLink(cell, 0)),
            p: reg.register(VarTag::Parity(cell)),
        })
        .collect();
    let root = reg.register(VarTag::Root);
    let c = |cell: CellRef| reg.get(VarTag::CellClear(cell)).unwrap();

    let mut sink = ClauseSink::new();
    weak_clauses(grid, &reg, &mut sink);

    let first = CellRef::new(0, 0);
    let second = if grid.cols() >= 2 {
        CellRef::new(0, 1)
    } else {
        CellRef::new(1, 0)
    };
    // literal true exactly when `cell` is the root, if it can be
    let is_root = |cell: CellRef| -> Option<Lit> {
        if cell == first {
            Some(root.negative())
        } else if cell == second {
            Some(root.positive())
        } else {
            None
        }
    };

    sink.add(
        [root.negative(), c(second).positive()],
        ReasonTag::Root(format!("if the root is {second}, {second} is unshaded")),
    );
    sink.add(
        [root.positive(), c(first).positive()],
        ReasonTag::Root(format!("if the root is {first}, {first} is unshaded")),
    );

    for cell in grid.cells() {
        let lv = &links[grid.index(cell)];
        let here = c(cell);
        sink.add(
            [lv.h1.negative(), lv.h0.negative()],
            ReasonTag::ParentLink(format!("{cell} has no forbidden horizontal link code")),
        );
        sink.add(
            [lv.v1.negative(), lv.v0.negative()],
            ReasonTag::ParentLink(format!("{cell} has no forbidden vertical link code")),
        );
        for h in [lv.h1, lv.h0] {
            for v in [lv.v1, lv.v0] {
                sink.add(
                    [h.negative(), v.negative()],
                    ReasonTag::ParentLink(format!("{cell} has at most one parent link")),
                );
            }
        }
        let mut at_least_one = vec![
            here.negative(),
            lv.h1.positive(),
            lv.h0.positive(),
            lv.v1.positive(),
            lv.v0.positive(),
        ];
        if let Some(r) = is_root(cell) {
            at_least_one.push(r);
            for x in [lv.h1, lv.h0, lv.v1, lv.v0] {
                sink.add(
                    [!r, x.negative()],
                    ReasonTag::Root(format!("the root {cell} has no parent link")),
                );
            }
        }
        sink.add(
            at_least_one,
            ReasonTag::ParentLink(format!("unshaded non-root {cell} has a parent link")),
        );
        for dir in Dir::ALL {
            let [a, b] = lv.not_pointing(dir);
            match dir.step(grid, cell) {
                None => sink.add(
                    [here.negative(), a, b],
                    ReasonTag::ParentLink(format!(
                        "{cell} cannot point {} off the grid",
                        dir.name()
                    )),
                ),
                Some(target) => {
                    sink.add(
                        [here.negative(), a, b, c(target).positive()],
                        ReasonTag::ParentLink(format!(
                            "{cell} may point {} only to an unshaded {target}",
                            dir.name()
                        )),
                    );
                    // short loops; each unordered pair once
                    if matches!(dir, Dir::Right | Dir::Down) {
                        let [ta, tb] = links[grid.index(target)].not_pointing(dir.opposite());
                        sink.add(
                            [here.negative(), c(target).negative(), a, b, ta, tb],
                            ReasonTag::ParentLink(format!(
                                "{cell} and {target} do not point at each other"
                            )),
                        );
                    }
                }
            }
        }
    }

    // Parity: a path A -> X -> B moving `din` into X then `dout` out of X. Notable turns
    // (up-then-right, right-then-up) flip parity between A and X; all other turns keep it.
    for x in grid.cells() {
        let lx = &links[grid.index(x)];
        for din in Dir::ALL {
            let Some(a) = din.opposite().step(grid, x) else {
                continue;
            };
            let la = &links[grid.index(a)];
            for dout in Dir::ALL {
                if dout == din.opposite() || dout.step(grid, x).is_none() {
                    continue;
                }
                let notable = matches!((din, dout), (Dir::Up, Dir::Right) | (Dir::Right, Dir::Up));
                let mut guard = vec![c(a).negative()];
                guard.extend(la.not_pointing(din));
                guard.extend(lx.not_pointing(dout));
                let detail = format!(
                    "path through {x} going {} then {} {} parity with {a}",
                    din.name(),
                    dout.name(),
                    if notable { "flips" } else { "keeps" }
                );
                let (pa, px) = (la.p, lx.p);
                let pairs = if notable {
                    [
                        [pa.positive(), px.positive()],
                        [pa.negative(), px.negative()],
                    ]
                } else {
                    [
                        [pa.positive(), px.negative()],
                        [pa.negative(), px.positive()],
                    ]
                };
                for pair in pairs {
                    let mut lits = guard.clone();
                    lits.extend(pair);
                    sink.add(lits, ReasonTag::Parity(detail.clone()));
                }
            }
        }
    }

    Cnf {
        clauses: sink.clauses,
        registry: Arc::new(reg),
        strength: Strength::Strong,
    }
}

/// Clause excluding the given complete solution: one literal per cell negating its `c` value.
pub fn blocking_clause(cnf: &Cnf, solution: &ShadingState) -> Clause {
    let mut lits = Vec::new();
    for i in 0..solution.rows() * solution.cols() {
        let cell = CellRef::new(i / solution.cols(), i % solution.cols());
        let clear = solution.get(cell) != CellStatus::Shaded;
        lits.push(cnf.cell_lit(cell, !clear));
    }
    Clause::new(lits, ReasonTag::Blocking)
}

/// English sentence describing why a clause holds.
pub fn clause_reason_text(clause: &Clause) -> Result<String, EncodeError> {
    Ok(match &clause.reason {
        ReasonTag::Uniqueness(a, b) => {
            format!("{a} and {b} cannot both be unshaded because they have the same symbol")
        }
        ReasonTag::Separation(a, b) => {
            format!("{a} and {b} cannot both be shaded because they share an edge")
        }
        ReasonTag::Sandwich(cell, axis) => format!(
            "{cell} has identical neighbors in its {}",
            match axis {
                Axis::Row => "row",
                Axis::Column => "column",
                Axis::Both => "row and column",
            }
        ),
        ReasonTag::UnshadedNeighbor(cell) => format!("{cell} must have an unshaded neighbor"),
        ReasonTag::ArticulationPoint(cell) => {
            format!("{cell} must stay unshaded to keep the unshaded cells connected")
        }
        ReasonTag::ParentLink(d) | ReasonTag::Parity(d) | ReasonTag::Root(d) => d.clone(),
        ReasonTag::Blocking => "the solution must differ from the one already found".to_string(),
        ReasonTag::GoalAssumption(cell, clear) => format!(
            "assume {cell} is {}",
            if *clear { "unshaded" } else { "shaded" }
        ),
        ReasonTag::Derived => return Err(EncodeError::UnknownReason),
    })
}

impl fmt::Display for Cnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for clause in &self.clauses {
            writeln!(f, "{}", self.clause_text(clause))?;
        }
        Ok(())
    }
}

/// The complete shading a model assigns to the cell variables.
pub fn shading_from_model(grid: &Grid, cnf: &Cnf, model: &[bool]) -> ShadingState {
    let mut state = ShadingState::for_grid(grid);
    for cell in grid.cells() {
        let var = cnf.cell_lit(cell, true).var();
        state.set(
            cell,
            if model[var.index()] {
                CellStatus::Unshaded
            } else {
                CellStatus::Shaded
            },
        );
    }
    state
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::parse_puzzle;

    const P63: &str = "5 1 3 2 3\n1 3 2 4 3\n4 5 2 3 2\n2 3 5 4 1\n4 2 3 1 2\n";

    fn cell(s: &str) -> CellRef {
        s.parse().unwrap()
    }

    #[test]
    fn sandwich_units_on_figure_one() {
        let g = parse_puzzle(P63).unwrap();
        let cnf = encode_weak(&g);
        let units: Vec<CellRef> = cnf
            .clauses()
            .iter()
            .filter(|c| matches!(c.reason, ReasonTag::Sandwich(..)))
            .map(|c| {
                assert!(c.is_unit());
                cnf.lit_cell(c.lits()[0]).unwrap().0
            })
            .collect();
        let expected: Vec<CellRef> = ["r1c4", "r3c2", "r3c4", "r4c1", "r4c5"]
            .iter()
            .map(|s| cell(s))
            .collect();
        assert_eq!(units, expected);
        let both = cnf
            .clauses()
            .iter()
            .find(|c| c.reason == ReasonTag::Sandwich(cell("r3c4"), Axis::Both));
        assert!(both.is_some());
    }

    #[test]
    fn neighbor_clause_text_for_r1c4() {
        let g = parse_puzzle(P63).unwrap();
        let cnf = encode_weak(&g);
        let clause = cnf
            .clauses()
            .iter()
            .find(|c| c.reason == ReasonTag::UnshadedNeighbor(cell("r1c4")))
            .unwrap();
        assert_eq!(cnf.clause_text(clause), "(or c01_03 c01_05 c02_04)");
    }

    #[test]
    fn separation_count_matches_enumeration() {
        let g = parse_puzzle(P63).unwrap();
        let cnf = encode_weak(&g);
        let sep = cnf
            .clauses()
            .iter()
            .filter(|c| matches!(c.reason, ReasonTag::Separation(..)))
            .count();
        // brute-force: every ordered pair of distinct cells at Manhattan distance 1, halved
        let cells: Vec<CellRef> = g.cells().collect();
        let mut adjacent = 0;
        for a in &cells {
            for b in &cells {
                if a.row.abs_diff(b.row) + a.col.abs_diff(b.col) == 1 {
                    adjacent += 1;
                }
            }
        }
        assert_eq!(sep, adjacent / 2);
        assert_eq!(sep, 40);
    }

    #[test]
    fn two_by_two_distinct() {
        let g = parse_puzzle("1 2\n2 1").unwrap();
        let cnf = encode_weak(&g);
        let count =
            |f: fn(&ReasonTag) -> bool| cnf.clauses().iter().filter(|c| f(&c.reason)).count();
        assert_eq!(count(|r| matches!(r, ReasonTag::Uniqueness(..))), 0);
        assert_eq!(count(|r| matches!(r, ReasonTag::Separation(..))), 4);
        assert_eq!(count(|r| matches!(r, ReasonTag::Sandwich(..))), 0);
        assert_eq!(count(|r| matches!(r, ReasonTag::UnshadedNeighbor(..))), 4);
    }

    #[test]
    fn no_neighbor_lemma_below_four_cells() {
        let g = parse_puzzle("1 1 1").unwrap();
        let cnf = encode_weak(&g);
        assert!(!cnf
            .clauses()
            .iter()
            .any(|c| matches!(c.reason, ReasonTag::UnshadedNeighbor(..))));
    }

    #[test]
    fn weak_mentions_only_cell_vars_and_short_clauses() {
        let g = parse_puzzle(P63).unwrap();
        let cnf = encode_weak(&g);
        assert!(cnf
            .registry()
            .iter()
            .all(|(_, t)| matches!(t, VarTag::CellClear(_))));
        for c in cnf.clauses() {
            match c.reason {
                ReasonTag::UnshadedNeighbor(_) => assert!((2..=4).contains(&c.len())),
                _ => assert!(c.len() <= 2),
            }
        }
    }

    #[test]
    fn strong_var_count() {
        for text in [P63, "1 2\n2 1", "1 2 3", "1\n2\n3", "1 1\n1 2\n3 1"] {
            let g = parse_puzzle(text).unwrap();
            assert_eq!(encode_strong(&g).num_vars(), 6 * g.len() + 1);
        }
        let g = parse_puzzle("7").unwrap();
        assert_eq!(encode_strong(&g).num_vars(), 1);
    }

    #[test]
    fn strong_up_then_right_parity_clause() {
        let g = parse_puzzle(P63).unwrap();
        let cnf = encode_strong(&g);
        // X = (1,1): incoming from below (A = (2,1) points up), X points right
        let x = CellRef::new(1, 1);
        let a = CellRef::new(2, 1);
        let reg = cnf.registry();
        let p = |c| reg.get(VarTag::Parity(c)).unwrap();
        let hits: Vec<&Clause> = cnf
            .clauses()
            .iter()
            .filter(|cl| {
                matches!(&cl.reason, ReasonTag::Parity(d) if d.starts_with(&format!("path through {x} going up then right")))
            })
            .collect();
        assert_eq!(hits.len(), 2);
        // both-true and both-false of the parity pair are excluded: p_X != p_A
        let mut pairs: Vec<(bool, bool)> = hits
            .iter()
            .map(|cl| (cl.contains(p(x).positive()), cl.contains(p(a).positive())))
            .collect();
        pairs.sort();
        assert_eq!(pairs, vec![(false, false), (true, true)]);
    }

    #[test]
    fn names_round_trip() {
        let tags = [
            VarTag::CellClear(CellRef::new(0, 3)),
            VarTag::CellClear(CellRef::new(4, 4)),
            VarTag::HLink(CellRef::new(9, 10), 1),
            VarTag::VLink(CellRef::new(0, 0), 0),
            VarTag::Parity(CellRef::new(98, 98)),
            VarTag::Root,
            VarTag::Free(17),
        ];
        assert_eq!(var_name(tags[0]), "c01_04");
        assert_eq!(var_name(tags[1]), "c05_05");
        for t in tags {
            assert_eq!(parse_var_name(&var_name(t)).unwrap(), t);
        }
        assert_eq!(
            parse_var_name("c02_05").unwrap(),
            VarTag::CellClear(CellRef::new(1, 4))
        );
        for bad in [
            "c2_05", "c00_01", "x01_01", "h01_01_2", "c01-01", "", "c01_01_1",
        ] {
            assert!(parse_var_name(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn reason_texts() {
        let sep = Clause::new([], ReasonTag::Separation(cell("r1c5"), cell("r2c5")));
        assert_eq!(
            clause_reason_text(&sep).unwrap(),
            "r1c5 and r2c5 cannot both be shaded because they share an edge"
        );
        let uniq = Clause::new([], ReasonTag::Uniqueness(cell("r1c7"), cell("r7c7")));
        assert_eq!(
            clause_reason_text(&uniq).unwrap(),
            "r1c7 and r7c7 cannot both be unshaded because they have the same symbol"
        );
        let nb = Clause::new([], ReasonTag::UnshadedNeighbor(cell("r5c3")));
        assert_eq!(
            clause_reason_text(&nb).unwrap(),
            "r5c3 must have an unshaded neighbor"
        );
        let sw = Clause::new([], ReasonTag::Sandwich(cell("r7c7"), Axis::Column));
        assert_eq!(
            clause_reason_text(&sw).unwrap(),
            "r7c7 has identical neighbors in its column"
        );
        assert_eq!(
            clause_reason_text(&Clause::new([], ReasonTag::Derived)),
            Err(EncodeError::UnknownReason)
        );
    }

    #[test]
    fn blocking_clauses() {
        let g = parse_puzzle("7").unwrap();
        let cnf = encode_weak(&g);
        let b = blocking_clause(&cnf, &ShadingState::from_shaded(&g, []));
        assert_eq!(cnf.clause_text(&b), "(not c01_01)");

        let g = parse_puzzle("1 2\n2 1").unwrap();
        let cnf = encode_weak(&g);
        let b = blocking_clause(&cnf, &ShadingState::from_shaded(&g, []));
        assert_eq!(
            cnf.clause_text(&b),
            "(or (not c01_01) (not c01_02) (not c02_01) (not c02_02))"
        );
        assert_eq!(b.reason, ReasonTag::Blocking);

        let g = parse_puzzle(P63).unwrap();
        let cnf = encode_weak(&g);
        let shaded: Vec<CellRef> = ["r1c5", "r2c2", "r2c4", "r3c3", "r5c1", "r5c3", "r5c5"]
            .iter()
            .map(|s| cell(s))
            .collect();
        let b = blocking_clause(&cnf, &ShadingState::from_shaded(&g, shaded.clone()));
        assert_eq!(b.len(), 25);
        let positive: Vec<CellRef> = b
            .lits()
            .iter()
            .filter(|l| l.is_positive())
            .map(|&l| cnf.lit_cell(l).unwrap().0)
            .collect();
        assert_eq!(positive, shaded);
    }

    #[test]
    fn dimacs_header() {
        let g = parse_puzzle("1 2\n2 1").unwrap();
        let cnf = encode_weak(&g);
        let text = cnf.to_dimacs();
        assert!(text.contains("p cnf 4 8\n"));
        assert!(text.contains("c var 1 c01_01\n"));
    }
}
