//! An off-policy reinforcement-learning engine that learns an ensemble of
//! reward-shaped control policies in parallel from one fixed-behavior
//! experience stream, and derives an ensemble policy by voting.
//!
//! The pieces:
//!
//! - [`envs`] — mountain car, cart-pole, and a tabular gridworld behind one
//!   generative interface.
//! - [`tilecoding`] — sparse binary state-action features for linear values.
//! - [`shaping`] — potential functions and scaled shaping rewards.
//! - [`gtd`] — Greedy-GQ(lambda) demons: convergent off-policy learners.
//! - [`horde`] — many demons sharing one uniform-behavior stream.
//! - [`voting`] — majority and rank voting over demon Q-values.
//! - [`oracle`] — exact tabular references (value iteration, tabular
//!   Q-learning) for verifying policy preservation.
//! - [`harness`] — seeded multi-run experiments, Welch significance tests,
//!   and bit-stable CSV outputs.
//!
//! See the crate examples for runnable entry points into each capability,
//! or the `horde` binary for the config-driven CLI.

pub mod envs;
pub mod error;
pub mod gtd;
pub mod harness;
pub mod horde;
pub mod oracle;
pub mod rng;
pub mod shaping;
pub mod sparse;
pub mod tilecoding;
pub mod voting;

pub use error::{Error, Result};
