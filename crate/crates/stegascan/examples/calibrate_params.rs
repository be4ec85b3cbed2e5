//! Sweep the importance ratios (n, k) over a seeded corpus and rank the
//! pairs by F1 against the ground-truth flip masks.
//!
//! ```bash
//! cargo run --example calibrate_params
//! ```

use std::path::PathBuf;

use stegascan::cli::{cmd_calibrate, CalibrateArgs};

fn main() -> stegascan::Result<()> {
    let out = PathBuf::from("target/example-output/calibrate_params");
    let outcome = cmd_calibrate(&CalibrateArgs {
        output_dir: out.clone(),
        seed: 0,
        lattice: "1,2,3".into(),
        trials: 1,
        tau_min: stegascan::DEFAULT_TAU_MIN,
    })?;

    println!("rank  n     k     F1      mean edge error");
    for (rank, row) in outcome.rows.iter().enumerate() {
        println!(
            "{:<5} {:<5} {:<5} {:.4}  {:.2}",
            rank + 1,
            row.n,
            row.k,
            row.f1,
            row.mean_edge_error
        );
    }
    println!(
        "recommended: (n, k) = ({}, {}); full CSV in {}",
        outcome.recommended.n,
        outcome.recommended.k,
        out.join("calibrate.csv").display()
    );
    Ok(())
}
