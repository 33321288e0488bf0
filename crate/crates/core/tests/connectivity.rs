mod fixtures;

use fixtures::{P63, P63_ORDER, P63_SHADED, R2C1_PICTURE};
use hitori_core::cnf::{encode_weak, Cnf, Lit};
use hitori_core::connectivity::{
    articulation_points, components, parse_picture, picture_proof, picture_source, render_picture,
    CellClass, CellGraph, PictureError, PictureVerdict,
};
use hitori_core::grid::{check_solution, parse_puzzle, CellRef, CellStatus, ShadingState, Verdict};
use hitori_core::proof::check_proof;
use proptest::prelude::*;

fn cell(name: &str) -> CellRef {
    name.parse().unwrap()
}

fn established_before(cnf: &Cnf, name: &str) -> Vec<Lit> {
    P63_ORDER
        .iter()
        .take_while(|&&c| c != name)
        .map(|c| cnf.cell_lit(cell(c), !P63_SHADED.contains(c)))
        .collect()
}

#[test]
fn r2c1_picture_matches_fixture() {
    let grid = parse_puzzle(P63).unwrap();
    let weak = encode_weak(&grid);
    let established = established_before(&weak, "r2c1");
    assert_eq!(established.len(), 10);
    let goal = weak.cell_lit(cell("r2c1"), true);
    let p = picture_proof(&grid, &weak, &established, goal).unwrap();
    assert_eq!(p.verdict, PictureVerdict::Disconnected);
    assert!(p.assumed_shaded);
    assert_eq!(render_picture(&p), R2C1_PICTURE);
    assert_eq!(parse_picture(&render_picture(&p)).unwrap(), p.classes());
    assert!(p.components.len() >= 2);
}

#[test]
fn disconnected_pocket_after_published_removals() {
    let removed = [
        "r2c1", "r5c1", "r4c2", "r4c4", "r5c5", "r3c3", "r1c3", "r2c5",
    ]
    .map(cell);
    let g = CellGraph::without(5, 5, removed);
    let comps = components(&g);
    assert_eq!(comps.len(), 2);
    assert_eq!(
        comps[1],
        ["r4c3", "r5c2", "r5c3", "r5c4"].map(cell).to_vec()
    );
}

#[test]
fn picture_refused_when_weak_proof_exists() {
    let grid = parse_puzzle(P63).unwrap();
    let weak = encode_weak(&grid);
    let goal = weak.cell_lit(cell("r1c4"), true);
    assert_eq!(
        picture_proof(&grid, &weak, &[], goal),
        Err(PictureError::PreconditionViolated)
    );
}

#[test]
fn walkthrough_picture_steps_are_all_provable() {
    let grid = parse_puzzle(P63).unwrap();
    let weak = encode_weak(&grid);
    for name in ["r2c1", "r2c2", "r1c1", "r1c3", "r3c1"] {
        let established = established_before(&weak, name);
        let goal = weak.cell_lit(cell(name), !P63_SHADED.contains(&name));
        let p = picture_proof(&grid, &weak, &established, goal)
            .unwrap_or_else(|e| panic!("{name}: {e}"));
        if let PictureVerdict::ArticulationUnsat { refutation, .. } = &p.verdict {
            let source = picture_source(&weak, &p);
            let mut assumptions = established.clone();
            assumptions.push(!goal);
            check_proof(refutation, &source, &assumptions).unwrap();
            assert!(!render_picture(&p).contains('-') || p.components.len() > 1);
        }
    }
}

/// Shading the middle of a 1x3 strip leaves each end as its own component.
#[test]
fn isolated_singleton() {
    let grid = parse_puzzle("1 2 3").unwrap();
    let weak = encode_weak(&grid);
    let goal = weak.cell_lit(cell("r1c2"), true);
    let established = [
        weak.cell_lit(cell("r1c1"), true),
        weak.cell_lit(cell("r1c3"), true),
    ];
    let p = picture_proof(&grid, &weak, &established, goal).unwrap();
    assert!(p.is_disconnected());
    assert_eq!(p.components, vec![vec![cell("r1c1")], vec![cell("r1c3")]]);
    assert_eq!(render_picture(&p), ". x -");
}

fn brute_cuts(g: &CellGraph) -> Vec<CellRef> {
    let base = components(g).len();
    g.vertices()
        .filter(|&v| {
            let mut h = g.clone();
            h.remove(v);
            components(&h).len() > base
        })
        .collect()
}

fn subgraph() -> impl Strategy<Value = CellGraph> {
    (1usize..=8, 1usize..=8)
        .prop_flat_map(|(r, c)| {
            (
                Just(r),
                Just(c),
                prop::collection::vec(any::<bool>(), r * c),
            )
        })
        .prop_map(|(r, c, keep)| {
            let removed: Vec<CellRef> = (0..r * c)
                .filter(|&i| !keep[i])
                .map(|i| CellRef::new(i / c, i % c))
                .collect();
            CellGraph::without(r, c, removed)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn articulation_points_match_removal_oracle(g in subgraph()) {
        prop_assert_eq!(articulation_points(&g), brute_cuts(&g));
    }

    #[test]
    fn components_partition_vertices(g in subgraph()) {
        let comps = components(&g);
        let total: usize = comps.iter().map(Vec::len).sum();
        prop_assert_eq!(total, g.vertex_count());
        for w in comps.windows(2) {
            prop_assert!(w[0][0] < w[1][0]);
        }
    }
}

/// All complete shadings of a small grid that satisfy every weak clause and the given literals.
fn weak_models(cnf: &Cnf, rows: usize, cols: usize, fixed: &[Lit]) -> Vec<ShadingState> {
    let n = rows * cols;
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        let value = |l: Lit| ((mask >> l.var().index()) & 1 == 1) == l.is_positive();
        if !fixed.iter().all(|&l| value(l)) {
            continue;
        }
        if !cnf
            .clauses()
            .iter()
            .all(|c| c.lits().iter().any(|&l| value(l)))
        {
            continue;
        }
        let mut s = ShadingState::unknown(rows, cols);
        for i in 0..n {
            let c = CellRef::new(i / cols, i % cols);
            let clear = value(cnf.cell_lit(c, true));
            s.set(
                c,
                if clear {
                    CellStatus::Unshaded
                } else {
                    CellStatus::Shaded
                },
            );
        }
        out.push(s);
    }
    out
}

fn small_grid() -> impl Strategy<Value = (usize, usize, Vec<u32>)> {
    (2usize..=4, 2usize..=4)
        .prop_filter("at most 16 cells", |(r, c)| r * c <= 16)
        .prop_flat_map(|(r, c)| (Just(r), Just(c), prop::collection::vec(1u32..=3, r * c)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn disconnected_verdicts_are_sound((r, c, syms) in small_grid(), pick in any::<prop::sample::Index>()) {
        let text: String = syms
            .chunks(c)
            .map(|row| row.iter().map(u32::to_string).collect::<Vec<_>>().join(" "))
            .collect::<Vec<_>>()
            .join("\n");
        let grid = parse_puzzle(&text).unwrap();
        let weak = encode_weak(&grid);
        let target = grid.cell_at(pick.index(r * c));
        for clear in [true, false] {
            let goal = weak.cell_lit(target, clear);
            if let Ok(p) = picture_proof(&grid, &weak, &[], goal) {
                // No weak model under the assumption is a valid Hitori shading.
                for m in weak_models(&weak, r, c, &[!goal]) {
                    prop_assert_ne!(check_solution(&grid, &m).unwrap(), Verdict::Valid);
                }
                let classes = p.classes();
                for cell in &p.forced_shaded {
                    prop_assert_eq!(classes[cell.row][cell.col], CellClass::Forced);
                }
            }
        }
    }
}
