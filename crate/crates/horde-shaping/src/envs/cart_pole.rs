//! Cart-pole: balance a pole on a moving cart.
//!
//! Classical formulation with explicit Euler integration (tau = 0.02).
//! State order is (pole angle, pole angular velocity, cart position, cart
//! velocity). The pole drops when |angle| exceeds pi/4, which costs -1 and
//! ends the episode; balancing for the full step budget ends it at reward 0.
//! The track is bounded in [-4, 4] with soft walls: the cart stops there
//! instead of failing.

use super::{ContinuousState, EnvId, EnvSpec, Environment, Transition};
use crate::error::{Error, Result};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::FRAC_PI_4;

pub const TRACK_RANGE: (f64, f64) = (-4.0, 4.0);
pub const DROP_ANGLE: f64 = FRAC_PI_4;

const GRAVITY: f64 = 9.8;
const CART_MASS: f64 = 1.0;
const POLE_MASS: f64 = 0.1;
const TOTAL_MASS: f64 = CART_MASS + POLE_MASS;
const POLE_HALF_LENGTH: f64 = 0.5;
const FORCE_MAG: f64 = 10.0;
const TAU: f64 = 0.02;
const START_SPREAD: f64 = 0.05;

#[derive(Clone, Debug)]
pub struct CartPole {
    spec: EnvSpec,
}

impl CartPole {
    pub fn new(max_steps: usize, gamma: f64) -> Self {
        CartPole {
            spec: EnvSpec {
                id: EnvId::CartPole,
                state_dim: 4,
                action_count: 2,
                max_steps,
                gamma,
            },
        }
    }
}

impl Default for CartPole {
    fn default() -> Self {
        CartPole::new(1000, 0.99)
    }
}

impl Environment for CartPole {
    fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    fn coding_bounds(&self) -> Vec<(f64, f64)> {
        vec![
            (-DROP_ANGLE, DROP_ANGLE),
            (-4.0, 4.0),
            TRACK_RANGE,
            (-4.0, 4.0),
        ]
    }

    fn reset(&self, rng: &mut ChaCha8Rng) -> ContinuousState {
        let mut coords = [0.0; 4];
        for c in coords.iter_mut() {
            *c = rng.gen_range(-START_SPREAD..=START_SPREAD);
        }
        ContinuousState::new(&coords)
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
        let c = state.coords();
        let (angle, angular_vel, x, x_vel) = (c[0], c[1], c[2], c[3]);
        let force = if action == 1 { FORCE_MAG } else { -FORCE_MAG };

        let cos_a = angle.cos();
        let sin_a = angle.sin();
        let temp = (force + POLE_MASS * POLE_HALF_LENGTH * angular_vel * angular_vel * sin_a)
            / TOTAL_MASS;
        let angular_acc = (GRAVITY * sin_a - cos_a * temp)
            / (POLE_HALF_LENGTH * (4.0 / 3.0 - POLE_MASS * cos_a * cos_a / TOTAL_MASS));
        let x_acc = temp - POLE_MASS * POLE_HALF_LENGTH * angular_acc * cos_a / TOTAL_MASS;

        let angle_next = angle + TAU * angular_vel;
        let angular_vel_next = angular_vel + TAU * angular_acc;
        let mut x_next = x + TAU * x_vel;
        let mut x_vel_next = x_vel + TAU * x_acc;
        if x_next <= TRACK_RANGE.0 || x_next >= TRACK_RANGE.1 {
            // soft wall: the cart stops, nothing fails
            x_next = x_next.clamp(TRACK_RANGE.0, TRACK_RANGE.1);
            x_vel_next = 0.0;
        }

        let dropped = angle_next.abs() > DROP_ANGLE;
        let terminal = dropped || step_index + 1 >= self.spec.max_steps;
        Ok(Transition {
            state: *state,
            action,
            reward: if dropped { -1.0 } else { 0.0 },
            next_state: ContinuousState::new(&[angle_next, angular_vel_next, x_next, x_vel_next]),
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
    fn reset_draws_within_spread_and_is_seeded() {
        let env = CartPole::default();
        let s1 = env.reset(&mut rng::stream(9, 0, "env"));
        let s2 = env.reset(&mut rng::stream(9, 0, "env"));
        assert_eq!(s1, s2);
        assert!(s1.coords().iter().all(|&c| c.abs() <= START_SPREAD));
        let s3 = env.reset(&mut rng::stream(10, 0, "env"));
        assert_ne!(s1, s3);
    }

    #[test]
    fn euler_step_from_equilibrium() {
        // hand evaluation of one explicit Euler step under rightward force:
        // temp = 10/1.1, aa = -temp / (0.5*(4/3 - 0.1/1.1)), xa = temp + 0.05*(-aa)/1.1
        let env = CartPole::default();
        let t = env
            .step(&ContinuousState::new(&[0.0, 0.0, 0.0, 0.0]), 1, 0)
            .unwrap();
        let c = t.next_state.coords();
        assert_eq!(c[0], 0.0); // angle integrates the old angular velocity
        assert!((c[1] - -0.29268292682926828).abs() < 1e-15);
        assert_eq!(c[2], 0.0);
        assert!((c[3] - 0.1951219512195122).abs() < 1e-15);
        assert_eq!(t.reward, 0.0);
        assert!(!t.terminal);
    }

    #[test]
    fn drop_penalizes_and_terminates() {
        let env = CartPole::default();
        // angular velocity large enough to push the angle past pi/4
        let s = ContinuousState::new(&[0.75, 2.0, 0.0, 0.0]);
        let t = env.step(&s, 0, 3).unwrap();
        assert!(t.next_state.coords()[0].abs() > DROP_ANGLE);
        assert_eq!(t.reward, -1.0);
        assert!(t.terminal);
    }

    #[test]
    fn balancing_the_full_budget_ends_at_zero_return() {
        let env = CartPole::new(1000, 1.0);
        let mut rng = rng::stream(3, 0, "env");
        let mut s = env.reset(&mut rng);
        let mut total = 0.0;
        for i in 0..1000 {
            // crude balancing controller: push against the fall
            let a = if s.coords()[0] + 0.4 * s.coords()[1] > 0.0 { 1 } else { 0 };
            let t = env.step(&s, a, i).unwrap();
            total += t.reward;
            if t.terminal {
                assert_eq!(i, 999, "controller should balance the full budget");
                break;
            }
            s = t.next_state;
        }
        assert_eq!(total, 0.0);
    }

    #[test]
    fn soft_wall_stops_the_cart() {
        let env = CartPole::default();
        let s = ContinuousState::new(&[0.0, 0.0, 3.999, 3.0]);
        let t = env.step(&s, 1, 0).unwrap();
        assert_eq!(t.next_state.coords()[2], 4.0);
        assert_eq!(t.next_state.coords()[3], 0.0);
        assert!(!t.terminal);
    }

    #[test]
    fn episode_return_is_minus_one_or_zero() {
        let env = CartPole::default();
        for seed in 0..20 {
            let mut rng = rng::stream(seed, 0, "env");
            let mut s = env.reset(&mut rng);
            let mut total = 0.0;
            for i in 0..1000 {
                let a = rng.gen_range(0..2);
                let t = env.step(&s, a, i).unwrap();
                total += t.reward;
                if t.terminal {
                    break;
                }
                s = t.next_state;
            }
            assert!(total == 0.0 || total == -1.0);
        }
    }
}
