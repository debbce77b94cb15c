//! Episodic benchmark environments behind one generative-MDP interface.
//!
//! Dynamics are pure functions of (state, action, RNG stream): the episode
//! loop owns the state, so a fixed seed reproduces trajectories bit for bit.

mod cart_pole;
mod gridworld;
mod mountain_car;

pub use cart_pole::CartPole;
pub use gridworld::gridworld_build;
pub use mountain_car::MountainCar;

use crate::error::Result;
use rand_chacha::ChaCha8Rng;

pub const MAX_STATE_DIM: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnvId {
    MountainCar,
    CartPole,
    Gridworld,
}

impl std::fmt::Display for EnvId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EnvId::MountainCar => write!(f, "mountain_car"),
            EnvId::CartPole => write!(f, "cart_pole"),
            EnvId::Gridworld => write!(f, "gridworld"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct EnvSpec {
    pub id: EnvId,
    pub state_dim: usize,
    pub action_count: usize,
    pub max_steps: usize,
    pub gamma: f64,
}

impl EnvSpec {
    pub fn validate(&self) -> Result<()> {
        use crate::error::Error;
        if self.action_count < 2 {
            return Err(Error::config("action_count", "must be at least 2"));
        }
        if self.max_steps < 1 {
            return Err(Error::config("max_steps", "must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::config("gamma", "must lie in [0, 1]"));
        }
        Ok(())
    }
}

/// A point in a continuous state space (at most [`MAX_STATE_DIM`] coordinates).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContinuousState {
    coords: [f64; MAX_STATE_DIM],
    dim: usize,
}

impl ContinuousState {
    pub fn new(coords: &[f64]) -> Self {
        assert!(coords.len() <= MAX_STATE_DIM);
        let mut buf = [0.0; MAX_STATE_DIM];
        buf[..coords.len()].copy_from_slice(coords);
        ContinuousState {
            coords: buf,
            dim: coords.len(),
        }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.dim]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// One environment step: the unit of experience every demon shares.
#[derive(Clone, Copy, Debug)]
pub struct Transition {
    pub state: ContinuousState,
    pub action: usize,
    /// Base reward R(s, a, s').
    pub reward: f64,
    pub next_state: ContinuousState,
    pub terminal: bool,
    pub step_index: usize,
}

/// Generative interface shared by the continuous benchmark tasks.
pub trait Environment {
    fn spec(&self) -> &EnvSpec;

    /// Per-dimension (lo, hi) normalization bounds for feature coding.
    fn coding_bounds(&self) -> Vec<(f64, f64)>;

    fn reset(&self, rng: &mut ChaCha8Rng) -> ContinuousState;

    /// Advances one step. `step_index` counts completed steps this episode;
    /// the episode terminates when the task ends or the step budget fills.
    fn step(&self, state: &ContinuousState, action: usize, step_index: usize)
        -> Result<Transition>;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn env_spec_invariants() {
        let spec = MountainCar::default().spec().clone();
        assert!(spec.validate().is_ok());
        assert!(EnvSpec { action_count: 1, ..spec.clone() }.validate().is_err());
        assert!(EnvSpec { max_steps: 0, ..spec.clone() }.validate().is_err());
        assert!(EnvSpec { gamma: 1.5, ..spec }.validate().is_err());
    }

    #[test]
    fn state_exposes_exactly_its_coordinates() {
        let s = ContinuousState::new(&[1.0, -2.0]);
        assert_eq!(s.dim(), 2);
        assert_eq!(s.coords(), &[1.0, -2.0]);
    }
}
