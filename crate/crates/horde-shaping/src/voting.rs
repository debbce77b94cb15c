//! Ensemble policies by vote aggregation over member Q-values.
//!
//! Votes are cast on action *preferences*, not value magnitudes, so members
//! with wildly different reward scales contribute equally. The ensemble acts
//! greedily on the accumulated preference table, breaking ties uniformly at
//! random from the provided stream.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VotingScheme {
    /// Each member casts one vote for its greedy action.
    Majority,
    /// Each member ranks all n actions from n-1 (best) down to 0.
    Rank,
}

impl std::fmt::Display for VotingScheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VotingScheme::Majority => write!(f, "majority"),
            VotingScheme::Rank => write!(f, "rank"),
        }
    }
}

/// Accumulated per-action preference values P(s, .).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreferenceTable {
    votes: Vec<u32>,
}

impl PreferenceTable {
    pub fn votes(&self) -> &[u32] {
        &self.votes
    }

    pub fn action_count(&self) -> usize {
        self.votes.len()
    }
}

/// Majority voting: every member contributes 1 to its greedy action (ties
/// toward the lowest action index) and 0 elsewhere.
pub fn majority_votes(member_q: &[Vec<f64>]) -> PreferenceTable {
    let n = member_q.first().map_or(0, Vec::len);
    let mut votes = vec![0u32; n];
    for q in member_q {
        debug_assert_eq!(q.len(), n);
        let mut best = 0usize;
        let mut best_q = f64::NEG_INFINITY;
        for (a, &v) in q.iter().enumerate() {
            if v > best_q {
                best_q = v;
                best = a;
            }
        }
        votes[best] += 1;
    }
    PreferenceTable { votes }
}

/// Rank voting: every member assigns n-1 down to 0 by descending Q-value;
/// equal values rank by ascending action index.
pub fn rank_votes(member_q: &[Vec<f64>]) -> PreferenceTable {
    let n = member_q.first().map_or(0, Vec::len);
    let mut votes = vec![0u32; n];
    let mut order: Vec<usize> = Vec::with_capacity(n);
    for q in member_q {
        debug_assert_eq!(q.len(), n);
        order.clear();
        order.extend(0..n);
        // stable sort by descending Q keeps equal values in ascending
        // action order
        order.sort_by(|&a, &b| q[b].partial_cmp(&q[a]).expect("finite Q-values"));
        for (pos, &a) in order.iter().enumerate() {
            votes[a] += (n - 1 - pos) as u32;
        }
    }
    PreferenceTable { votes }
}

/// Casts votes under the chosen scheme.
pub fn votes(scheme: VotingScheme, member_q: &[Vec<f64>]) -> PreferenceTable {
    match scheme {
        VotingScheme::Majority => majority_votes(member_q),
        VotingScheme::Rank => rank_votes(member_q),
    }
}

/// Greedy action on the preference table; ties are broken uniformly at
/// random. The stream is consulted only when a tie exists.
pub fn ensemble_action(table: &PreferenceTable, rng: &mut ChaCha8Rng) -> usize {
    let best = *table.votes.iter().max().expect("nonempty preference table");
    let tied: Vec<usize> = table
        .votes
        .iter()
        .enumerate()
        .filter(|&(_, &v)| v == best)
        .map(|(a, _)| a)
        .collect();
    if tied.len() == 1 {
        tied[0]
    } else {
        tied[rng.gen_range(0..tied.len())]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use proptest::prelude::*;

    #[test]
    fn single_demon_majority() {
        let p = majority_votes(&[vec![-5.0, -3.0, -4.0]]);
        assert_eq!(p.votes(), &[0, 1, 0]);
    }

    #[test]
    fn majority_counts_argmaxes() {
        let p = majority_votes(&[
            vec![1.0, 0.0, 0.0],
            vec![2.0, 1.0, 0.0],
            vec![0.0, 0.0, 3.0],
        ]);
        assert_eq!(p.votes(), &[2, 0, 1]);
    }

    #[test]
    fn unanimous_majority() {
        let q = vec![vec![0.0, 9.0, 1.0]; 7];
        let p = majority_votes(&q);
        assert_eq!(p.votes(), &[0, 7, 0]);
    }

    #[test]
    fn single_demon_ranks() {
        let p = rank_votes(&[vec![0.1, 0.5, 0.3]]);
        assert_eq!(p.votes(), &[0, 2, 1]);
    }

    #[test]
    fn rank_votes_sum_members() {
        let p = rank_votes(&[
            vec![0.1, 0.5, 0.3],
            vec![5.0, 4.0, 3.0],
            vec![-2.0, -1.0, -1.5],
        ]);
        assert_eq!(p.votes(), &[2, 5, 2]);
    }

    #[test]
    fn equal_q_ranks_by_action_index() {
        let p = rank_votes(&[vec![1.0, 1.0, 1.0]]);
        assert_eq!(p.votes(), &[2, 1, 0]);
    }

    #[test]
    fn unique_argmax_is_deterministic() {
        let p = PreferenceTable {
            votes: vec![2, 5, 2],
        };
        for seed in 0..20 {
            let mut rng = rng::stream(seed, 0, "tie");
            assert_eq!(ensemble_action(&p, &mut rng), 1);
        }
    }

    #[test]
    fn two_way_tie_splits_evenly() {
        let p = PreferenceTable {
            votes: vec![3, 3, 0],
        };
        let mut rng = rng::stream(5, 0, "tie");
        let mut counts = [0usize; 3];
        for _ in 0..4000 {
            counts[ensemble_action(&p, &mut rng)] += 1;
        }
        assert_eq!(counts[2], 0);
        assert!(counts[0] > 1800 && counts[1] > 1800);
    }

    #[test]
    fn uniform_table_is_uniform_by_chi_square() {
        // chi-square over 10^4 draws against the uniform law on 3 actions;
        // 9.21 is the 0.99 quantile at 2 degrees of freedom
        let p = PreferenceTable {
            votes: vec![4, 4, 4],
        };
        let mut rng = rng::stream(6, 0, "chi");
        let n = 10_000usize;
        let mut counts = [0f64; 3];
        for _ in 0..n {
            counts[ensemble_action(&p, &mut rng)] += 1.0;
        }
        let expected = n as f64 / 3.0;
        let chi2: f64 = counts.iter().map(|c| (c - expected).powi(2) / expected).sum();
        assert!(chi2 < 9.21, "chi-square {chi2} too large for uniform ties");
    }

    proptest! {
        /// Majority votes per demon sum to 1; rank votes are a permutation
        /// of 0..n-1 per demon.
        #[test]
        fn vote_budgets_hold(qs in prop::collection::vec(
            prop::collection::vec(-100i32..100, 4),
            1..8,
        )) {
            let member_q: Vec<Vec<f64>> = qs
                .iter()
                .map(|q| q.iter().map(|&v| v as f64).collect())
                .collect();
            let demons = member_q.len() as u32;
            let maj = majority_votes(&member_q);
            prop_assert_eq!(maj.votes().iter().sum::<u32>(), demons);
            let rank = rank_votes(&member_q);
            let expected: u32 = demons * 6; // ranks 0+1+2+3 per demon
            prop_assert_eq!(rank.votes().iter().sum::<u32>(), expected);
        }

        /// Applying a strictly increasing transform to any member's Q-values
        /// leaves both vote tables unchanged. Transforms are dyadic-exact so
        /// floating point cannot perturb orderings.
        #[test]
        fn monotone_transform_invariance(
            qs in prop::collection::vec(
                prop::collection::vec(-64i32..=64, 4),
                1..6,
            ),
            shifts in prop::collection::vec((-3i32..=3, -16i32..=16, prop::bool::ANY), 6),
        ) {
            let member_q: Vec<Vec<f64>> = qs
                .iter()
                .map(|q| q.iter().map(|&v| v as f64 / 4.0).collect())
                .collect();
            let transformed: Vec<Vec<f64>> = member_q
                .iter()
                .enumerate()
                .map(|(d, q)| {
                    let (exp, off, cube) = shifts[d % shifts.len()];
                    q.iter()
                        .map(|&v| {
                            let v = if cube { v * v * v } else { v };
                            v * (2.0f64).powi(exp) + off as f64
                        })
                        .collect()
                })
                .collect();
            prop_assert_eq!(majority_votes(&member_q), majority_votes(&transformed));
            prop_assert_eq!(rank_votes(&member_q), rank_votes(&transformed));
        }
    }
}
