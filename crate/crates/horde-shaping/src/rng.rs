//! Deterministic named RNG streams.
//!
//! Every run draws from independent streams derived from one master seed, so
//! that evaluation rollouts can never perturb the learning stream and adding
//! a policy to a config leaves every other policy's draws untouched.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Derives the stream named `domain` for run `run` under `master_seed`.
pub fn stream(master_seed: u64, run: u64, domain: &str) -> ChaCha8Rng {
    let mut state = master_seed ^ fnv1a64(domain.as_bytes()).rotate_left(17) ^ run.wrapping_mul(0xa24b_aed4_963e_e407);
    let mut seed = [0u8; 32];
    for chunk in seed.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(seed)
}

/// Stream used to evaluate one policy at one checkpoint of one run.
///
/// Keyed by policy id so evaluation order and the surrounding policy set
/// cannot influence the draws a given policy sees.
pub fn eval_stream(master_seed: u64, run: u64, checkpoint: usize, policy_id: &str) -> ChaCha8Rng {
    stream(
        master_seed,
        run,
        &format!("eval:{checkpoint}:{policy_id}"),
    )
}
