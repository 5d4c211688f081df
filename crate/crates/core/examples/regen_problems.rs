//! Regenerates the bundled problem documents under `problems/`. Run from
//! anywhere in the workspace:
//!
//! ```text
//! cargo run -p twoshell --example regen_problems
//! ```

use std::fs;
use std::path::Path;

use twoshell::{
    beam_problem, knapsack_instance, paraboloids_problem, serialize_problem, BeamParameters,
};

fn main() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../problems");
    fs::create_dir_all(&root).expect("create problems directory");

    let mut bundle = vec![
        paraboloids_problem(None).expect("example1 builds"),
        paraboloids_problem(Some((0.0, 6.0))).expect("example1_relaxed builds"),
        beam_problem(&BeamParameters::default()).expect("beam builds"),
    ];
    for seed in 1..=5 {
        bundle.push(knapsack_instance(15, seed).expect("knapsack instance builds"));
    }

    for p in &bundle {
        let path = root.join(format!("{}.json", p.name()));
        fs::write(&path, serialize_problem(p)).expect("write problem document");
        println!("wrote {}", path.display());
    }
}
