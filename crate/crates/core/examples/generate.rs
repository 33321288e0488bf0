//! Generate unique-solution puzzles, optionally writing them to a directory.
//!
//! `cargo run -p hitori-core --release --example generate ROWS COLS [SEEDS] [OUT_DIR]`

use hitori_core::generate::generate;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let rows: usize = args.first().map_or(6, |s| s.parse().unwrap());
    let cols: usize = args.get(1).map_or(rows, |s| s.parse().unwrap());
    let seeds: u64 = args.get(2).map_or(1, |s| s.parse().unwrap());
    let out = args.get(3);
    for seed in 0..seeds {
        let g = generate(rows, cols, seed).unwrap();
        let text = g.grid.to_text();
        match out {
            Some(dir) => {
                let path = format!("{dir}/gen{rows}x{cols}-s{seed}.txt");
                std::fs::write(&path, format!("{text}\n")).unwrap();
                println!("wrote {path}");
            }
            None => println!("seed {seed}:\n{text}\n"),
        }
    }
}
