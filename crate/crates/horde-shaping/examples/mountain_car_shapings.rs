//! Mountain car with single shapings and their tuned ensembles: the base
//! learner against position/height/speed shaping and the two- and
//! three-member rank-voting ensembles.
//!
//! Desk-scale demo (16 runs). configs/mountain_car.toml holds the full
//! setup used by the acceptance suite.
//!
//! Run with: cargo run --release --example mountain_car_shapings

use horde_shaping::harness::{compare_policies, run_experiment, ExperimentConfig};

fn main() {
    let cfg = ExperimentConfig::from_toml(
        r#"
environment = "mountain_car"
gamma = 0.99
alpha = 0.1
beta = 0.0001
lambda = 0.4
runs = 16
episodes = 100
eval_interval = 5
master_seed = 1

[[potentials]]
kind = "mc_position"
scales = [40.0]

[[potentials]]
kind = "mc_height"
scales = [20.0]

[[potentials]]
kind = "mc_speed"
scales = [40.0]

[[ensembles]]
name = "E1"
members = ["mc_position@40", "mc_height@20"]
voting = "rank"

[[ensembles]]
name = "E2"
members = ["mc_position@40", "mc_height@20", "mc_speed@40"]
voting = "rank"
"#,
    )
    .unwrap();
    let result = run_experiment(&cfg, None).unwrap();

    println!("mean evaluation return per checkpoint (episodes 5..100):");
    for curve in &result.curves {
        let marks: Vec<String> = curve.mean_curve().iter().map(|v| format!("{v:6.0}")).collect();
        println!("{:>16} {}", curve.policy, marks.join(" "));
    }
    println!();
    for (a, b) in [
        ("mc_speed@40", "base"),
        ("E2", "mc_speed@40"),
        ("E1", "mc_position@40"),
    ] {
        let row = compare_policies(&result, a, b).unwrap();
        println!(
            "{a} vs {b}: mean {:.0} vs {:.0}, two-sided p = {:.3}",
            row.mean_a, row.mean_b, row.p
        );
    }
}
