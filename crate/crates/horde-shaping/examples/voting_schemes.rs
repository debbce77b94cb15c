//! Majority and rank voting over demon Q-values, and how the ensemble
//! breaks preference ties.
//!
//! Run with: cargo run --example voting_schemes

use horde_shaping::rng;
use horde_shaping::voting::{ensemble_action, majority_votes, rank_votes};

fn main() {
    // three demons scoring three actions; the third demon disagrees
    let q = vec![
        vec![-5.0, -3.0, -4.0],
        vec![-120.0, -80.0, -95.0], // same ordering, wildly different scale
        vec![0.2, 0.1, 0.4],
    ];
    println!("member Q-values:");
    for (i, row) in q.iter().enumerate() {
        println!("  demon {i}: {row:?}");
    }
    let maj = majority_votes(&q);
    let rank = rank_votes(&q);
    println!("majority votes: {:?}", maj.votes());
    println!("rank votes:     {:?}", rank.votes());

    let mut rng = rng::stream(42, 0, "ties");
    println!(
        "ensemble actions: majority -> {}, rank -> {}",
        ensemble_action(&maj, &mut rng),
        ensemble_action(&rank, &mut rng)
    );

    // a genuine tie: each demon prefers a different action
    let tied = majority_votes(&[
        vec![1.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.0],
        vec![0.0, 0.0, 1.0],
    ]);
    let mut counts = [0usize; 3];
    for _ in 0..9000 {
        counts[ensemble_action(&tied, &mut rng)] += 1;
    }
    println!("preference tie {:?} over 9000 draws: {counts:?}", tied.votes());
}
