//! Latent deployment: learn demons off-policy, snapshot them to disk, and
//! execute the reloaded greedy/ensemble policies later without the horde.
//!
//! Run with: cargo run --release --example demon_snapshots

use horde_shaping::envs::MountainCar;
use horde_shaping::gtd::{Demon, DemonSnapshot};
use horde_shaping::harness::build_coder;
use horde_shaping::harness::ExperimentConfig;
use horde_shaping::horde::{evaluate_policy, BehaviorPolicy, EvalPolicy, Horde};
use horde_shaping::rng;
use horde_shaping::shaping::DemonShaping;
use horde_shaping::voting::VotingScheme;
use std::io::BufReader;

fn main() {
    let cfg = ExperimentConfig::from_toml(
        r#"
environment = "mountain_car"
gamma = 0.99
alpha = 0.1
beta = 0.0001
lambda = 0.4
runs = 1
episodes = 40
eval_interval = 5
master_seed = 3

[[potentials]]
kind = "mc_position"
scales = [40.0]

[[potentials]]
kind = "mc_speed"
scales = [40.0]
"#,
    )
    .unwrap();
    let env = MountainCar::new(2000, 0.99);
    let coder = build_coder(&cfg).unwrap();
    let demons: Vec<Demon> = cfg
        .demon_channels()
        .unwrap()
        .into_iter()
        .map(|(id, ch)| Demon::new(id, coder.total_dim(), cfg.params(), ch))
        .collect();
    let mut horde = Horde::new(coder, demons, cfg.gamma).unwrap();
    let behavior = BehaviorPolicy::uniform(3);
    let mut rng_env = rng::stream(3, 0, "env");
    let mut rng_behavior = rng::stream(3, 0, "behavior");
    for _ in 0..40 {
        horde
            .run_episode(&env, &behavior, &mut rng_env, &mut rng_behavior)
            .unwrap();
    }

    // write snapshots, then revive the demons from disk
    let dir = std::env::temp_dir().join("horde-snapshots-demo");
    std::fs::create_dir_all(&dir).unwrap();
    let mut revived = Vec::new();
    for demon in horde.demons() {
        let path = dir.join(format!("{}.snapshot", demon.id().replace('@', "_at_")));
        let mut file = std::fs::File::create(&path).unwrap();
        demon.write_snapshot(&mut file).unwrap();
        let snap = DemonSnapshot::read(&mut BufReader::new(std::fs::File::open(&path).unwrap()))
            .unwrap();
        println!("wrote and reloaded {} ({} weights)", path.display(), snap.dim);
        revived.push(
            Demon::from_weights(snap.id, snap.theta, snap.w, cfg.params(), DemonShaping::Base)
                .unwrap(),
        );
    }

    let coder = build_coder(&cfg).unwrap();
    for demon in &revived {
        let outcome = evaluate_policy(
            &EvalPolicy::Demon(demon),
            &env,
            &coder,
            &mut rng::stream(3, 0, "eval"),
        )
        .unwrap();
        println!("{:>16} greedy rollout: return {}", demon.id(), outcome.base_return);
    }
    let outcome = evaluate_policy(
        &EvalPolicy::Ensemble {
            members: revived.iter().collect(),
            scheme: VotingScheme::Rank,
        },
        &env,
        &coder,
        &mut rng::stream(3, 0, "eval"),
    )
    .unwrap();
    println!("{:>16} rank-vote rollout: return {}", "ensemble", outcome.base_return);
    std::fs::remove_dir_all(&dir).ok();
}
