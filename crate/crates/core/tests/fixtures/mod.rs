//! Shared data for integration tests.
#![allow(dead_code)]

/// The 5x5 example grid.
pub const P63: &str = "5 1 3 2 3\n1 3 2 4 3\n4 5 2 3 2\n2 3 5 4 1\n4 2 3 1 2\n";

/// Its unique solution.
pub const P63_SHADED: &[&str] = &["r1c5", "r2c2", "r2c4", "r3c3", "r5c1", "r5c3", "r5c5"];

/// Cells forced unshaded by sitting between two equal symbols.
pub const P63_SANDWICH: &[&str] = &["r1c4", "r3c2", "r3c4", "r4c1", "r4c5"];

/// Order in which the published walkthrough decides the cells.
pub const P63_ORDER: &[&str] = &[
    "r1c4", "r3c2", "r3c4", "r4c1", "r4c5", "r1c2", "r2c3", "r3c3", "r4c3", "r5c4", "r2c1", "r2c2",
    "r1c1", "r1c3", "r1c5", "r2c5", "r5c3", "r5c2", "r5c5", "r4c4", "r2c4", "r3c5", "r4c2", "r3c1",
    "r5c1",
];

/// Connectivity picture for r2c1 at step 11.
pub const R2C1_PICTURE: &str = ". . x . .\nx . . . x\n. . X . .\n. x - x .\nx - - - x";

/// Clauses of the published r1c2 proof other than the assumption.
pub const R1C2_LEAVES: &[&str] = &[
    "(or (not c02_02) (not c02_05))",
    "(or c01_02 c02_02)",
    "(or (not c01_03) (not c01_05))",
    "(or c01_02 c01_03)",
    "(or c01_05 c02_05)",
];

/// Demonstration proofs over larger grids.
pub const DEMOS: &[&str] = &[
    r"(let ((a!1 (unit-resolution (asserted (or (not c01_07) (not c07_07)))
    (asserted c07_07)
    (not c01_07))))
    (unit-resolution a!1 (asserted c01_07) false))",
    r"(unit-resolution (unit-resolution (asserted (or c04_03 c05_02 c05_04 c06_03))
    (asserted (not c04_03))
    (asserted (not c05_02))
    (asserted (not c05_04))
    c06_03)
    (asserted (not c06_03))
false)",
];

/// Proof texts as printed for the 5x5 example, in solving order: (cell, unshaded, text).
pub const STEPS: &[(&str, bool, &str)] = &[
    ("r1c4", true, r"c01_04"),
    (
        "r1c2",
        true,
        r"(let ((a!1 (unit-resolution (asserted (or (not c02_02) (not c02_05)))
          (unit-resolution (asserted (or c01_02 c02_02))
                          (asserted (not c01_02))
                          c02_02)
          (not c02_05)))
      (a!2 (unit-resolution (asserted (or (not c01_03) (not c01_05)))
          (unit-resolution (asserted (or c01_02 c01_03))
                          (asserted (not c01_02))
                          c01_03)
          (not c01_05))))
  (unit-resolution (asserted (or c01_05 c02_05)) a!1 a!2 false))",
    ),
    (
        "r2c3",
        true,
        r"(let ((a!1 (unit-resolution (asserted (or (not c01_03) (not c01_05)))
                            (unit-resolution (asserted (or c01_03 c02_03))
                                             (asserted (not c02_03))
                                             c01_03)
                            (not c01_05)))
      (a!2 (unit-resolution (asserted (or (not c02_02) (not c02_05)))
                            (unit-resolution (asserted (or c02_02 c02_03))
                                             (asserted (not c02_03))
                                             c02_02)
                            (not c02_05))))
  (unit-resolution (asserted (or c01_05 c02_05)) a!1 a!2 false))",
    ),
    (
        "r3c3",
        false,
        r"(let ((a!1 (unit-resolution (asserted (or (not c02_03) (not c03_03)))
                            (asserted c02_03)
                            (not c03_03))))
  (unit-resolution a!1 (asserted c03_03) false))",
    ),
    (
        "r4c3",
        true,
        r"(unit-resolution (asserted (or c03_03 c04_03)) (asserted (not c03_03)) c04_03)",
    ),
    (
        "r5c4",
        true,
        r"(let ((a!1 (unit-resolution (asserted (or (not c02_04) (not c04_04)))
                            (unit-resolution (asserted (or c04_04 c05_04))
                                             (asserted (not c05_04))
                                             c04_04)
                            (not c02_04)))
      (a!2 (unit-resolution (asserted (or (not c01_03) (not c05_03)))
                            (unit-resolution (asserted (or c05_03 c05_04))
                                             (asserted (not c05_04))
                                             c05_03)
                            (not c01_03))))
  (unit-resolution (asserted (or (not c01_05) (not c02_05)))
                   (unit-resolution (asserted (or c02_04 c02_05)) a!1 c02_05)
                   (unit-resolution (asserted (or c01_03 c01_05 c02_04))
                                    a!2
                                    a!1
                                    c01_05)
                   false))",
    ),
    (
        "r1c5",
        false,
        r"(let ((a!1 (unit-resolution (asserted (or (not c01_03) (not c01_05)))
                            (asserted c01_03)
                            (not c01_05))))
  (unit-resolution a!1 (asserted c01_05) false))",
    ),
    (
        "r2c5",
        true,
        r"(unit-resolution (asserted (or c01_05 c02_05)) (asserted (not c01_05)) c02_05)",
    ),
    (
        "r5c3",
        false,
        r"(let ((a!1 (unit-resolution (asserted (or (not c01_03) (not c05_03)))
                            (asserted c01_03)
                            (not c05_03))))
  (unit-resolution a!1 (asserted c05_03) false))",
    ),
    (
        "r5c2",
        true,
        r"(unit-resolution (asserted (or c05_02 c05_03)) (asserted (not c05_03)) c05_02)",
    ),
    (
        "r5c5",
        false,
        r"(let ((a!1 (unit-resolution (asserted (or (not c05_02) (not c05_05)))
                            (asserted c05_02)
                            (not c05_05))))
  (unit-resolution a!1 (asserted c05_05) false))",
    ),
    (
        "r4c4",
        true,
        r"(unit-resolution (unit-resolution (asserted (or c04_04 c05_03 c05_05))
                                  (asserted (not c05_03))
                                  (asserted (not c05_05))
                                  c04_04)
                 (asserted (not c04_04)) false)",
    ),
    (
        "r2c4",
        false,
        r"(let ((a!1 (unit-resolution (asserted (or (not c02_04) (not c04_04)))
                            (asserted c04_04)
                            (not c02_04))))
  (unit-resolution a!1 (asserted c02_04) false))",
    ),
    (
        "r3c5",
        true,
        r"(unit-resolution (unit-resolution (asserted (or c01_05 c02_04 c03_05))
                                  (asserted (not c01_05))
                                  (asserted (not c02_04))
                                  c03_05)
                 (asserted (not c03_05)) false)",
    ),
    (
        "r4c2",
        true,
        r"(let ((a!1 (unit-resolution (unit-resolution (asserted (or c04_02 c05_01 c05_03))
                                             (asserted (not c05_03))
                                             (or c04_02 c05_01))
                            (asserted (not c04_02))
                            c05_01))
      (a!2 (unit-resolution (unit-resolution (asserted (or c02_02
                                                           c03_01
                                                           c03_03
                                                           c04_02))
                                             (asserted (not c02_02))
                                             (asserted (not c03_03))
                                             (or c03_01 c04_02))
                            (asserted (not c04_02))
                            c03_01)))
  (unit-resolution (asserted (or (not c03_01) (not c05_01))) a!1 a!2 false))",
    ),
    (
        "r5c1",
        false,
        r"(let ((a!1 (unit-resolution (asserted (or (not c03_01) (not c05_01)))
                            (asserted c03_01)
                            (not c05_01))))
  (unit-resolution a!1 (asserted c05_01) false))",
    ),
];
