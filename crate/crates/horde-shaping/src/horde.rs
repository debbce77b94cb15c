//! Latent learning orchestration: one uniform behavior stream feeds every
//! demon its own shaped reward, one transition at a time.
//!
//! The behavior policy never consults any demon, so the experience stream is
//! identical whatever the horde contains. Within a transition each demon
//! update reads only shared features and its own state; results are
//! therefore independent of demon update order.

use crate::envs::{ContinuousState, Environment, Transition};
use crate::error::{Error, Result};
use crate::gtd::Demon;
use crate::shaping::{build_reward_vector, DemonShaping};
use crate::tilecoding::{SparseFeatures, TileCoder};
use crate::voting::{self, VotingScheme};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// The fixed behavior policy: uniform over all actions.
#[derive(Clone, Copy, Debug)]
pub struct BehaviorPolicy {
    action_count: usize,
}

impl BehaviorPolicy {
    pub fn uniform(action_count: usize) -> Self {
        assert!(action_count >= 1);
        BehaviorPolicy { action_count }
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> usize {
        rng.gen_range(0..self.action_count)
    }

    pub fn prob(&self, _action: usize) -> f64 {
        1.0 / self.action_count as f64
    }
}

#[derive(Clone, Copy, Debug)]
pub struct EpisodeRecord {
    pub steps: usize,
    pub base_return: f64,
}

/// A horde: shared tile coder plus the demons learning from one stream.
pub struct Horde {
    coder: TileCoder,
    demons: Vec<Demon>,
    channels: Vec<DemonShaping>,
    gamma: f64,
}

impl Horde {
    pub fn new(coder: TileCoder, demons: Vec<Demon>, gamma: f64) -> Result<Self> {
        if demons.is_empty() {
            return Err(Error::config("demons", "horde needs at least one demon"));
        }
        for d in &demons {
            if d.total_dim() != coder.total_dim() {
                return Err(Error::DimensionMismatch {
                    expected: coder.total_dim(),
                    got: d.total_dim(),
                });
            }
        }
        let channels = demons.iter().map(|d| d.shaping().clone()).collect();
        Ok(Horde {
            coder,
            demons,
            channels,
            gamma,
        })
    }

    pub fn coder(&self) -> &TileCoder {
        &self.coder
    }

    pub fn demons(&self) -> &[Demon] {
        &self.demons
    }

    pub fn demon(&self, id: &str) -> Option<&Demon> {
        self.demons.iter().find(|d| d.id() == id)
    }

    /// Samples one behavior action, steps the environment, and updates every
    /// demon with its own shaped-reward component.
    pub fn learn_step(
        &mut self,
        env: &dyn Environment,
        behavior: &BehaviorPolicy,
        state: &ContinuousState,
        step_index: usize,
        rng_behavior: &mut ChaCha8Rng,
    ) -> Result<Transition> {
        let action = behavior.sample(rng_behavior);
        let t = env.step(state, action, step_index)?;
        let rewards = build_reward_vector(&t, &self.channels, self.gamma)?;

        let actions = self.coder.action_count();
        let phis_at_state: Vec<SparseFeatures> =
            (0..actions).map(|a| self.coder.encode(&t.state, a)).collect();
        let phis_at_next: Vec<SparseFeatures> = if t.terminal {
            Vec::new()
        } else {
            (0..actions)
                .map(|a| self.coder.encode(&t.next_state, a))
                .collect()
        };

        let prob = behavior.prob(action);
        for (demon, &reward) in self.demons.iter_mut().zip(&rewards.components) {
            demon.gq_step_from_features(
                &phis_at_state,
                action,
                &phis_at_next,
                reward,
                t.terminal,
                prob,
            )?;
        }
        Ok(t)
    }

    /// Runs one learning episode to termination (the environment's step
    /// budget bounds the loop). Traces reset at the episode start.
    pub fn run_episode(
        &mut self,
        env: &dyn Environment,
        behavior: &BehaviorPolicy,
        rng_env: &mut ChaCha8Rng,
        rng_behavior: &mut ChaCha8Rng,
    ) -> Result<EpisodeRecord> {
        for demon in self.demons.iter_mut() {
            demon.begin_episode();
        }
        let mut state = env.reset(rng_env);
        let mut base_return = 0.0;
        let mut steps = 0usize;
        loop {
            let t = self.learn_step(env, behavior, &state, steps, rng_behavior)?;
            base_return += t.reward;
            steps += 1;
            // terminal ends the task; the step budget merely truncates
            if t.terminal || steps >= env.spec().max_steps {
                break;
            }
            state = t.next_state;
        }
        Ok(EpisodeRecord { steps, base_return })
    }
}

/// A frozen policy to execute during evaluation.
pub enum EvalPolicy<'a> {
    /// A single demon acting greedily (ties toward the lowest action index).
    Demon(&'a Demon),
    /// A voted ensemble over member demons.
    Ensemble {
        members: Vec<&'a Demon>,
        scheme: VotingScheme,
    },
}

#[derive(Clone, Copy, Debug)]
pub struct EvalOutcome {
    /// Undiscounted sum of base rewards.
    pub base_return: f64,
    pub steps: usize,
}

/// Executes one greedy evaluation episode. No demon state changes; the
/// stream is consumed only for the environment reset and vote tie-breaks.
pub fn evaluate_policy(
    policy: &EvalPolicy<'_>,
    env: &dyn Environment,
    coder: &TileCoder,
    rng_eval: &mut ChaCha8Rng,
) -> Result<EvalOutcome> {
    let actions = coder.action_count();
    let mut state = env.reset(rng_eval);
    let mut base_return = 0.0;
    let mut steps = 0usize;
    let mut member_q: Vec<Vec<f64>> = match policy {
        EvalPolicy::Ensemble { members, .. } => vec![vec![0.0; actions]; members.len()],
        EvalPolicy::Demon(_) => Vec::new(),
    };
    loop {
        let phis: Vec<SparseFeatures> = (0..actions).map(|a| coder.encode(&state, a)).collect();
        let action = match policy {
            EvalPolicy::Demon(demon) => {
                let mut best = 0usize;
                let mut best_q = f64::NEG_INFINITY;
                for (a, phi) in phis.iter().enumerate() {
                    let q = demon.q_from_features(phi);
                    if q > best_q {
                        best_q = q;
                        best = a;
                    }
                }
                best
            }
            EvalPolicy::Ensemble { members, scheme } => {
                for (qs, demon) in member_q.iter_mut().zip(members.iter()) {
                    for (a, phi) in phis.iter().enumerate() {
                        qs[a] = demon.q_from_features(phi);
                    }
                }
                let table = voting::votes(*scheme, &member_q);
                voting::ensemble_action(&table, rng_eval)
            }
        };
        let t = env.step(&state, action, steps)?;
        base_return += t.reward;
        steps += 1;
        if t.terminal || steps >= env.spec().max_steps {
            break;
        }
        state = t.next_state;
    }
    Ok(EvalOutcome { base_return, steps })
}
