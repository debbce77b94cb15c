//! Scale robustness in mountain car: ensembles over a narrow and a broad
//! range of shaping scales against the ensemble of tuned components, with
//! the per-range mean reference series no single demon attains.
//!
//! Desk-scale demo (12 runs); configs/mountain_car.toml holds the full
//! setup.
//!
//! Run with: cargo run --release --example mountain_car_scale_ranges

use horde_shaping::harness::{
    compare_policies, mean_of_scale_range, run_experiment, ExperimentConfig,
};

fn main() {
    let cfg = ExperimentConfig::from_toml(
        r#"
environment = "mountain_car"
gamma = 0.99
alpha = 0.1
beta = 0.0001
lambda = 0.4
runs = 12
episodes = 100
eval_interval = 5
master_seed = 1

[[potentials]]
kind = "mc_position"
scales = [1.0, 10.0, 20.0, 40.0, 60.0, 80.0, 100.0, 1000.0, 10000.0]

[[potentials]]
kind = "mc_height"
scales = [1.0, 10.0, 20.0, 40.0, 60.0, 80.0, 100.0, 1000.0, 10000.0]

[[potentials]]
kind = "mc_speed"
scales = [1.0, 10.0, 20.0, 40.0, 60.0, 80.0, 100.0, 1000.0, 10000.0]

[[ensembles]]
name = "E2"
members = ["mc_position@40", "mc_height@20", "mc_speed@40"]
voting = "rank"

[[ensembles]]
name = "EC1"
members = ["base",
  "mc_position@20", "mc_position@40", "mc_position@60", "mc_position@80", "mc_position@100",
  "mc_height@20", "mc_height@40", "mc_height@60", "mc_height@80", "mc_height@100",
  "mc_speed@20", "mc_speed@40", "mc_speed@60", "mc_speed@80", "mc_speed@100"]
voting = "rank"

[[ensembles]]
name = "EC2"
members = ["base",
  "mc_position@1", "mc_position@10", "mc_position@100", "mc_position@1000", "mc_position@10000",
  "mc_height@1", "mc_height@10", "mc_height@100", "mc_height@1000", "mc_height@10000",
  "mc_speed@1", "mc_speed@10", "mc_speed@100", "mc_speed@1000", "mc_speed@10000"]
voting = "rank"
"#,
    )
    .unwrap();
    let result = run_experiment(&cfg, None).unwrap();

    let narrow = [20.0, 40.0, 60.0, 80.0, 100.0];
    let broad = [1.0, 10.0, 100.0, 1000.0, 10000.0];
    println!("per-range mean reference series (no single demon attains these):");
    for kind in ["mc_position", "mc_height", "mc_speed"] {
        for (range_name, range) in [("narrow", &narrow), ("broad", &broad)] {
            let series = mean_of_scale_range(&result.curves, kind, range).unwrap();
            let sums: f64 = series.per_run_sums().iter().sum::<f64>()
                / series.per_run_sums().len() as f64;
            println!("  {kind:>12} x {range_name:6}: mean sum {sums:9.0}");
        }
    }
    println!();
    for (a, b) in [("EC1", "E2"), ("EC2", "E2"), ("EC1", "base"), ("EC2", "base")] {
        let row = compare_policies(&result, a, b).unwrap();
        println!(
            "{a:>4} vs {b:<4}: mean {:8.0} vs {:8.0}, two-sided p = {:.3}",
            row.mean_a, row.mean_b, row.p
        );
    }
}
