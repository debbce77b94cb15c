//! Cart-pole with per-heuristic scale-range ensembles: angle shaping,
//! angular-speed shaping, and the global ensemble over all demons.
//!
//! Desk-scale demo (8 runs); configs/cart_pole.toml holds the full setup.
//!
//! Run with: cargo run --release --example cart_pole_ensembles

use horde_shaping::harness::{compare_policies, run_experiment, ExperimentConfig};

fn main() {
    let cfg = ExperimentConfig::from_toml(
        r#"
environment = "cart_pole"
gamma = 0.99
alpha = 0.1
beta = 0.001
lambda = 0.7
runs = 8
episodes = 1000
eval_interval = 50
master_seed = 1

[[potentials]]
kind = "cp_angle"
scales = [1.0, 10.0, 100.0, 1000.0, 10000.0]

[[potentials]]
kind = "cp_angular_speed"
scales = [1.0, 10.0, 100.0, 1000.0, 10000.0]

[[ensembles]]
name = "E1C"
members = ["cp_angle@1", "cp_angle@10", "cp_angle@100", "cp_angle@1000", "cp_angle@10000"]
voting = "rank"

[[ensembles]]
name = "E2C"
members = ["cp_angular_speed@1", "cp_angular_speed@10", "cp_angular_speed@100", "cp_angular_speed@1000", "cp_angular_speed@10000"]
voting = "rank"

[[ensembles]]
name = "EC"
members = ["base",
  "cp_angle@1", "cp_angle@10", "cp_angle@100", "cp_angle@1000", "cp_angle@10000",
  "cp_angular_speed@1", "cp_angular_speed@10", "cp_angular_speed@100", "cp_angular_speed@1000", "cp_angular_speed@10000"]
voting = "rank"
"#,
    )
    .unwrap();
    let result = run_experiment(&cfg, None).unwrap();

    println!("mean evaluation return per checkpoint (0 = balanced 1000 steps):");
    for id in ["base", "mean:cp_angle", "mean:cp_angular_speed", "E1C", "E2C", "EC"] {
        let curve = result.curve(id).unwrap();
        let marks: Vec<String> = curve.mean_curve().iter().map(|v| format!("{v:5.2}")).collect();
        println!("{id:>22} {}", marks.join(" "));
    }
    println!();
    for ens in ["E1C", "E2C", "EC"] {
        let row = compare_policies(&result, ens, "base").unwrap();
        println!(
            "{ens:>4} vs base: mean {:6.2} vs {:6.2}, two-sided p = {:.4}",
            row.mean_a, row.mean_b, row.p
        );
    }
}
