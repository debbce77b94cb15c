//! Mountain car: drive an underpowered car out of a valley.
//!
//! Standard benchmark dynamics. State is (position, velocity); the three
//! actions map to throttle -1, 0, +1. Reward is -1 on every step; an episode
//! ends at the goal position 0.6 or after the step budget elapses.

use super::{ContinuousState, EnvId, EnvSpec, Environment, Transition};
use crate::error::{Error, Result};
use rand_chacha::ChaCha8Rng;

pub const POSITION_RANGE: (f64, f64) = (-1.2, 0.6);
pub const VELOCITY_RANGE: (f64, f64) = (-0.07, 0.07);
pub const START_POSITION: f64 = -0.5;

#[derive(Clone, Debug)]
pub struct MountainCar {
    spec: EnvSpec,
}

impl MountainCar {
    pub fn new(max_steps: usize, gamma: f64) -> Self {
        MountainCar {
            spec: EnvSpec {
                id: EnvId::MountainCar,
                state_dim: 2,
                action_count: 3,
                max_steps,
                gamma,
            },
        }
    }
}

impl Default for MountainCar {
    fn default() -> Self {
        MountainCar::new(2000, 0.99)
    }
}

impl Environment for MountainCar {
    fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    fn coding_bounds(&self) -> Vec<(f64, f64)> {
        vec![POSITION_RANGE, VELOCITY_RANGE]
    }

    fn reset(&self, _rng: &mut ChaCha8Rng) -> ContinuousState {
        ContinuousState::new(&[START_POSITION, 0.0])
    }

    fn step(
        &self,
        state: &ContinuousState,
        action: usize,
        step_index: usize,
    ) -> Result<Transition> {
        if action >= self.spec.action_count {
            return Err(Error::InvalidAction {
                action,
                action_count: self.spec.action_count,
            });
        }
        let [x, v] = [state.coords()[0], state.coords()[1]];
        let throttle = action as f64 - 1.0;

        let mut v_next = (v + 0.001 * throttle - 0.0025 * (3.0 * x).cos())
            .clamp(VELOCITY_RANGE.0, VELOCITY_RANGE.1);
        let x_next = (x + v_next).clamp(POSITION_RANGE.0, POSITION_RANGE.1);
        if x_next == POSITION_RANGE.0 {
            // inelastic left wall
            v_next = 0.0;
        }

        // reaching the goal is the only true terminal; exhausting the step
        // budget truncates the episode without ending the task, so the
        // learner keeps bootstrapping through the final state
        let terminal = x_next >= POSITION_RANGE.1;
        Ok(Transition {
            state: *state,
            action,
            reward: -1.0,
            next_state: ContinuousState::new(&[x_next, v_next]),
            terminal,
            step_index,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn reset_is_fixed_start() {
        let env = MountainCar::default();
        let mut rng = rng::stream(0, 0, "env");
        let s = env.reset(&mut rng);
        assert_eq!(s.coords(), &[-0.5, 0.0]);
        // stateless: repeated resets give the same state
        assert_eq!(env.reset(&mut rng).coords(), &[-0.5, 0.0]);
    }

    #[test]
    fn forward_throttle_from_start() {
        // hand evaluation: v' = 0.001 - 0.0025*cos(-1.5), x' = -0.5 + v'
        let env = MountainCar::default();
        let s = ContinuousState::new(&[-0.5, 0.0]);
        let t = env.step(&s, 2, 0).unwrap();
        assert!((t.next_state.coords()[1] - 0.00082315699583074275).abs() < 1e-15);
        assert!((t.next_state.coords()[0] - -0.49917684300416926).abs() < 1e-15);
        assert_eq!(t.reward, -1.0);
        assert!(!t.terminal);
    }

    #[test]
    fn goal_boundary_terminates() {
        let env = MountainCar::default();
        let t = env
            .step(&ContinuousState::new(&[0.599, 0.07]), 2, 10)
            .unwrap();
        assert_eq!(t.next_state.coords()[0], 0.6);
        assert!(t.terminal);
    }

    #[test]
    fn left_wall_zeroes_velocity() {
        let env = MountainCar::default();
        let t = env
            .step(&ContinuousState::new(&[-1.2, -0.07]), 0, 0)
            .unwrap();
        assert_eq!(t.next_state.coords(), &[-1.2, 0.0]);
    }

    #[test]
    fn step_budget_does_not_mark_terminal() {
        // the budget truncates episodes at the loop level; only the goal is
        // a terminal state
        let env = MountainCar::new(5, 1.0);
        let t = env.step(&ContinuousState::new(&[-0.5, 0.0]), 1, 4).unwrap();
        assert!(!t.terminal);
    }

    #[test]
    fn invalid_action_is_rejected() {
        let env = MountainCar::default();
        assert!(env.step(&ContinuousState::new(&[-0.5, 0.0]), 3, 0).is_err());
    }

    #[test]
    fn states_stay_in_range_under_any_actions() {
        let env = MountainCar::default();
        let mut s = ContinuousState::new(&[-0.5, 0.0]);
        let mut k = 0usize;
        for i in 0..2000 {
            let a = [0, 2, 2, 0, 1][k % 5];
            k += 1;
            let t = env.step(&s, a, i).unwrap();
            let c = t.next_state.coords();
            assert!((POSITION_RANGE.0..=POSITION_RANGE.1).contains(&c[0]));
            assert!((VELOCITY_RANGE.0..=VELOCITY_RANGE.1).contains(&c[1]));
            if t.terminal {
                break;
            }
            s = t.next_state;
        }
    }
}
