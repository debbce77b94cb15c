//! Grid-search the shaping scale for each mountain-car potential over the
//! union of the narrow and broad scale ranges. This is how the tuned
//! scales in configs/mountain_car.toml were derived (at runs = 100).
//!
//! Run with: cargo run --release --example tune_scales [runs]

use horde_shaping::harness::{demon_id, run_experiment, ExperimentConfig};

fn main() {
    let runs: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(16);
    let scales = "[1.0, 10.0, 20.0, 40.0, 60.0, 80.0, 100.0, 1000.0, 10000.0]";
    let cfg = ExperimentConfig::from_toml(&format!(
        r#"
environment = "mountain_car"
gamma = 0.99
alpha = 0.1
beta = 0.0001
lambda = 0.4
runs = {runs}
episodes = 100
eval_interval = 5
master_seed = 1

[[potentials]]
kind = "mc_position"
scales = {scales}

[[potentials]]
kind = "mc_height"
scales = {scales}

[[potentials]]
kind = "mc_speed"
scales = {scales}
"#
    ))
    .unwrap();
    eprintln!("running {} demons x {runs} runs ...", cfg.demon_channels().unwrap().len());
    let result = run_experiment(&cfg, None).unwrap();

    let base = result
        .summaries
        .iter()
        .find(|s| s.policy == "base")
        .unwrap();
    println!("{:>16}  {:10.1} +- {:6.1}", "base", base.mean_sum_return, base.stderr);
    for group in &cfg.potentials {
        let best = group
            .scales
            .iter()
            .map(|&c| {
                let id = demon_id(&group.label(), c);
                let s = result.summaries.iter().find(|s| s.policy == id).unwrap();
                (c, s.mean_sum_return, s.stderr)
            })
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        println!(
            "{:>16}  best scale {:>7}  mean sum {:10.1} +- {:6.1}",
            group.kind.name(),
            best.0,
            best.1,
            best.2
        );
    }
}
