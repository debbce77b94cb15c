//! Potential-based shaping preserves optimal policies: shape a gridworld's
//! rewards with random potentials and watch the greedy policy stay fixed
//! while the values shift by exactly -phi(s).
//!
//! Run with: cargo run --example policy_preservation

use horde_shaping::envs::gridworld_build;
use horde_shaping::oracle::{shape_tabular, value_iteration};
use horde_shaping::rng;
use rand::Rng;

fn main() {
    let mdp = gridworld_build(5, 5, (4, 4), -1.0, 0.95).unwrap();
    let base = value_iteration(&mdp, 1e-12).unwrap();
    println!(
        "5x5 gridworld solved in {} sweeps; V*(start) = {:.4}",
        base.iterations,
        base.q.state_value(0)
    );

    let mut rng = rng::stream(7, 0, "demo");
    let mut preserved = 0;
    for trial in 1..=10 {
        let phi: Vec<f64> = (0..mdp.n_states()).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let shaped_q = value_iteration(&shape_tabular(&mdp, &phi).unwrap(), 1e-12)
            .unwrap()
            .q;
        let same = (0..mdp.n_states()).all(|s| shaped_q.greedy_set(s) == base.q.greedy_set(s));
        let max_shift_error = (0..mdp.n_states())
            .flat_map(|s| (0..mdp.n_actions()).map(move |a| (s, a)))
            .map(|(s, a)| (shaped_q.get(s, a) - (base.q.get(s, a) - phi[s])).abs())
            .fold(0.0f64, f64::max);
        println!(
            "trial {trial:2}: greedy policy preserved = {same}, max |Q' - (Q* - phi)| = {max_shift_error:.2e}"
        );
        preserved += same as usize;
    }
    println!("{preserved}/10 random potentials preserved every greedy action set");
}
