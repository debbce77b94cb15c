//! Potential functions and scaled potential-based shaping rewards.
//!
//! A potential assigns a desirability to each state; the shaping reward on a
//! transition is the scaled discounted difference of potentials,
//! `c * (gamma * phi(s') - phi(s))`. Summed along any trajectory the shaping
//! contributions telescope, which is why shaping never changes which policies
//! are optimal.

use crate::envs::{ContinuousState, Transition};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_4;

/// Mountain-car hill profile used by the height potential.
fn mc_height(x: f64) -> f64 {
    (3.0 * x).sin()
}

/// Angular-velocity normalization bound (rad/s) for the cart-pole speed
/// potential; rates are clipped to this magnitude before normalizing.
pub const CP_ANGULAR_SPEED_MAX: f64 = 4.0;

/// Built-in potential functions over the benchmark state spaces.
///
/// Mountain-car potentials map into [0, 1], cart-pole potentials into
/// [-1, 0]; every referenced coordinate is clipped to its normalization
/// bounds first, so evaluation is total.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    /// Encourage progress toward the goal: normalized position.
    McPosition,
    /// Encourage height (potential energy): normalized sin(3x).
    McHeight,
    /// Encourage kinetic energy: squared normalized velocity. Normalizing the
    /// signed velocity onto [0, 1] puts rest at 0.25.
    McSpeed,
    /// Variant of [`PotentialKind::McSpeed`] that normalizes the speed
    /// magnitude instead, putting rest at 0.
    McSpeedZeroRest,
    /// Discourage angles far from equilibrium: negative squared normalized
    /// angle.
    CpAngle,
    /// Discourage fast pole rotation: negative squared normalized angular
    /// velocity.
    CpAngularSpeed,
}

impl PotentialKind {
    pub fn state_dim(self) -> usize {
        match self {
            PotentialKind::McPosition
            | PotentialKind::McHeight
            | PotentialKind::McSpeed
            | PotentialKind::McSpeedZeroRest => 2,
            PotentialKind::CpAngle | PotentialKind::CpAngularSpeed => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PotentialKind::McPosition => "mc_position",
            PotentialKind::McHeight => "mc_height",
            PotentialKind::McSpeed => "mc_speed",
            PotentialKind::McSpeedZeroRest => "mc_speed_zero_rest",
            PotentialKind::CpAngle => "cp_angle",
            PotentialKind::CpAngularSpeed => "cp_angular_speed",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "mc_position" => Ok(PotentialKind::McPosition),
            "mc_height" => Ok(PotentialKind::McHeight),
            "mc_speed" => Ok(PotentialKind::McSpeed),
            "mc_speed_zero_rest" => Ok(PotentialKind::McSpeedZeroRest),
            "cp_angle" => Ok(PotentialKind::CpAngle),
            "cp_angular_speed" => Ok(PotentialKind::CpAngularSpeed),
            other => Err(Error::Parse(format!("unknown potential kind `{other}`"))),
        }
    }
}

/// A potential function together with its scaling factor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PotentialSpec {
    pub kind: PotentialKind,
    pub scale: f64,
}

impl PotentialSpec {
    pub fn new(kind: PotentialKind, scale: f64) -> Result<Self> {
        if !scale.is_finite() || scale < 0.0 {
            return Err(Error::Parse(format!(
                "potential scale must be finite and non-negative, got {scale}"
            )));
        }
        Ok(PotentialSpec { kind, scale })
    }
}

/// Evaluates the unscaled potential of `state`.
pub fn potential(spec: &PotentialSpec, state: &ContinuousState) -> Result<f64> {
    let dim = spec.kind.state_dim();
    if state.dim() != dim {
        return Err(Error::PotentialMismatch {
            kind: spec.kind.name().to_string(),
            state_dim: state.dim(),
        });
    }
    let c = state.coords();
    Ok(match spec.kind {
        PotentialKind::McPosition => (c[0].clamp(-1.2, 0.6) + 1.2) / 1.8,
        PotentialKind::McHeight => (mc_height(c[0].clamp(-1.2, 0.6)) + 1.0) / 2.0,
        PotentialKind::McSpeed => {
            let v = (c[1].clamp(-0.07, 0.07) + 0.07) / 0.14;
            v * v
        }
        PotentialKind::McSpeedZeroRest => {
            let v = c[1].clamp(-0.07, 0.07).abs() / 0.07;
            v * v
        }
        PotentialKind::CpAngle => {
            let a = c[0].abs().min(FRAC_PI_4) / FRAC_PI_4;
            -(a * a)
        }
        PotentialKind::CpAngularSpeed => {
            let v = c[1].abs().min(CP_ANGULAR_SPEED_MAX) / CP_ANGULAR_SPEED_MAX;
            -(v * v)
        }
    })
}

/// Scaled shaping reward for one transition, `c * (gamma * phi_next - phi)`.
pub fn shaping_reward(phi: f64, phi_next: f64, gamma: f64, scale: f64) -> f64 {
    scale * (gamma * phi_next - phi)
}

/// The reward channel one demon learns from.
#[derive(Clone, Debug, PartialEq)]
pub enum DemonShaping {
    /// The unshaped base reward.
    Base,
    Shaped(PotentialSpec),
}

impl DemonShaping {
    /// The shaped reward this channel sees for `t`.
    pub fn reward(&self, t: &Transition, gamma: f64) -> Result<f64> {
        match self {
            DemonShaping::Base => Ok(t.reward),
            DemonShaping::Shaped(spec) => {
                let phi = potential(spec, &t.state)?;
                let phi_next = potential(spec, &t.next_state)?;
                Ok(t.reward + shaping_reward(phi, phi_next, gamma, spec.scale))
            }
        }
    }
}

/// Per-demon shaped rewards for one shared transition.
#[derive(Clone, Debug)]
pub struct ShapedRewardVector {
    pub base: f64,
    pub components: Vec<f64>,
}

/// Evaluates every demon's reward channel on `t`.
pub fn build_reward_vector(
    t: &Transition,
    channels: &[DemonShaping],
    gamma: f64,
) -> Result<ShapedRewardVector> {
    let components = channels
        .iter()
        .map(|ch| ch.reward(t, gamma))
        .collect::<Result<Vec<f64>>>()?;
    Ok(ShapedRewardVector {
        base: t.reward,
        components,
    })
}

/// A potential table over discrete states, for shaping tabular MDPs.
///
/// Loadable from a line-oriented text format: a `potential` header, a
/// `states N` line, then `index value` pairs (missing indices default to 0,
/// `#` comments allowed).
#[derive(Clone, Debug, PartialEq)]
pub struct TabularPotential {
    values: Vec<f64>,
}

impl TabularPotential {
    pub fn new(values: Vec<f64>) -> Self {
        TabularPotential { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut values: Option<Vec<f64>> = None;
        let mut saw_header = false;
        for raw in text.lines() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if line == "potential" {
                saw_header = true;
                continue;
            }
            let mut parts = line.split_whitespace();
            let first = parts.next().unwrap();
            if first == "states" {
                let n: usize = parts
                    .next()
                    .ok_or_else(|| Error::Parse("missing state count".into()))?
                    .parse()
                    .map_err(|e| Error::Parse(format!("bad state count: {e}")))?;
                values = Some(vec![0.0; n]);
                continue;
            }
            let table = values
                .as_mut()
                .ok_or_else(|| Error::Parse("`states N` must precede entries".into()))?;
            let idx: usize = first
                .parse()
                .map_err(|e| Error::Parse(format!("bad state index `{first}`: {e}")))?;
            let val: f64 = parts
                .next()
                .ok_or_else(|| Error::Parse(format!("missing value for state {idx}")))?
                .parse()
                .map_err(|e| Error::Parse(format!("bad value for state {idx}: {e}")))?;
            if idx >= table.len() {
                return Err(Error::Parse(format!(
                    "state index {idx} out of range ({} states)",
                    table.len()
                )));
            }
            if !val.is_finite() {
                return Err(Error::Parse(format!("non-finite potential for state {idx}")));
            }
            table[idx] = val;
        }
        if !saw_header {
            return Err(Error::Parse("missing `potential` header line".into()));
        }
        values
            .map(TabularPotential::new)
            .ok_or_else(|| Error::Parse("missing `states N` line".into()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        TabularPotential::parse(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::{Environment, MountainCar};
    use rand::Rng;

    fn mc_state(x: f64, v: f64) -> ContinuousState {
        ContinuousState::new(&[x, v])
    }

    fn cp_state(angle: f64, rate: f64) -> ContinuousState {
        ContinuousState::new(&[angle, rate, 0.0, 0.0])
    }

    fn spec(kind: PotentialKind) -> PotentialSpec {
        PotentialSpec::new(kind, 1.0).unwrap()
    }

    #[test]
    fn position_normalization_endpoints() {
        let p = spec(PotentialKind::McPosition);
        assert_eq!(potential(&p, &mc_state(-1.2, 0.0)).unwrap(), 0.0);
        assert!((potential(&p, &mc_state(0.6, 0.0)).unwrap() - 1.0).abs() < 1e-15);
        let mid = potential(&p, &mc_state(-0.5, 0.0)).unwrap();
        assert!((mid - 0.3888888888888889).abs() < 1e-15);
    }

    #[test]
    fn speed_potential_maps_rest_to_a_quarter() {
        let p = spec(PotentialKind::McSpeed);
        assert!((potential(&p, &mc_state(0.0, 0.0)).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(potential(&p, &mc_state(0.0, 0.07)).unwrap(), 1.0);
        let alt = spec(PotentialKind::McSpeedZeroRest);
        assert_eq!(potential(&alt, &mc_state(0.0, 0.0)).unwrap(), 0.0);
        assert_eq!(potential(&alt, &mc_state(0.0, -0.07)).unwrap(), 1.0);
    }

    #[test]
    fn equilibrium_angle_has_maximal_potential() {
        let p = spec(PotentialKind::CpAngle);
        assert_eq!(potential(&p, &cp_state(0.0, 0.0)).unwrap(), 0.0);
        assert_eq!(potential(&p, &cp_state(FRAC_PI_4, 0.0)).unwrap(), -1.0);
        // beyond the drop angle the normalization clips
        assert_eq!(potential(&p, &cp_state(1.0, 0.0)).unwrap(), -1.0);
    }

    #[test]
    fn builtin_potentials_are_bounded() {
        let mut rng = crate::rng::stream(11, 0, "potential-bounds");
        for _ in 0..2000 {
            let x = rng.gen_range(-1.2..=0.6);
            let v = rng.gen_range(-0.07..=0.07);
            for kind in [
                PotentialKind::McPosition,
                PotentialKind::McHeight,
                PotentialKind::McSpeed,
                PotentialKind::McSpeedZeroRest,
            ] {
                let val = potential(&spec(kind), &mc_state(x, v)).unwrap();
                assert!((0.0..=1.0).contains(&val), "{kind:?} out of range: {val}");
            }
            let angle = rng.gen_range(-2.0..=2.0);
            let rate = rng.gen_range(-12.0..=12.0);
            for kind in [PotentialKind::CpAngle, PotentialKind::CpAngularSpeed] {
                let val = potential(&spec(kind), &cp_state(angle, rate)).unwrap();
                assert!((-1.0..=0.0).contains(&val), "{kind:?} out of range: {val}");
            }
        }
    }

    #[test]
    fn kind_environment_mismatch_is_rejected() {
        let p = spec(PotentialKind::CpAngle);
        assert!(potential(&p, &mc_state(0.0, 0.0)).is_err());
        let p = spec(PotentialKind::McHeight);
        assert!(potential(&p, &cp_state(0.0, 0.0)).is_err());
    }

    #[test]
    fn shaping_reward_direct_cases() {
        assert_eq!(shaping_reward(0.0, 0.0, 0.99, 3.0), 0.0);
        assert_eq!(shaping_reward(0.4, 0.4, 1.0, 2.0), 0.0);
        assert!((shaping_reward(0.5, 0.6, 0.99, 1.0) - 0.094).abs() < 1e-15);
    }

    #[test]
    fn shaping_reward_is_linear_in_scale() {
        let mut rng = crate::rng::stream(12, 0, "scale-linearity");
        for _ in 0..500 {
            let phi = rng.gen_range(-2.0..2.0);
            let phi_next = rng.gen_range(-2.0..2.0);
            let gamma = rng.gen_range(0.0..1.0);
            let c = rng.gen_range(0.0..100.0);
            let scaled = shaping_reward(phi, phi_next, gamma, c);
            let unit = shaping_reward(phi, phi_next, gamma, 1.0);
            assert_eq!(scaled, c * unit);
        }
    }

    #[test]
    fn reward_vector_composes_potential_and_difference() {
        // derived by composing the position potential with the shaping
        // difference on the first forward step from the start state
        let env = MountainCar::default();
        let t = env.step(&mc_state(-0.5, 0.0), 2, 0).unwrap();
        let channels = vec![DemonShaping::Shaped(
            PotentialSpec::new(PotentialKind::McPosition, 10.0).unwrap(),
        )];
        let v = build_reward_vector(&t, &channels, 0.99).unwrap();
        let phi_s = (-0.5 + 1.2) / 1.8;
        let phi_n = (t.next_state.coords()[0] + 1.2) / 1.8;
        let expected = -1.0 + 10.0 * (0.99 * phi_n - phi_s);
        assert!((v.components[0] - expected).abs() < 1e-12);
        assert!((v.components[0] - -1.0343615254118195).abs() < 1e-9);
    }

    #[test]
    fn zero_scale_components_equal_base_reward() {
        let env = MountainCar::default();
        let t = env.step(&mc_state(-0.5, 0.0), 0, 0).unwrap();
        let channels = vec![
            DemonShaping::Base,
            DemonShaping::Shaped(PotentialSpec::new(PotentialKind::McPosition, 0.0).unwrap()),
            DemonShaping::Shaped(PotentialSpec::new(PotentialKind::McHeight, 0.0).unwrap()),
        ];
        let v = build_reward_vector(&t, &channels, 0.99).unwrap();
        assert_eq!(v.base, -1.0);
        assert!(v.components.iter().all(|&r| r == -1.0));
    }

    #[test]
    fn base_only_vector_is_the_reward() {
        let env = MountainCar::default();
        let t = env.step(&mc_state(-0.5, 0.0), 1, 0).unwrap();
        let v = build_reward_vector(&t, &[DemonShaping::Base], 0.99).unwrap();
        assert_eq!(v.components, vec![-1.0]);
    }

    #[test]
    fn shaping_telescopes_along_trajectories() {
        let mut rng = crate::rng::stream(13, 0, "telescope");
        for _ in 0..100 {
            let kind = [
                PotentialKind::McPosition,
                PotentialKind::McHeight,
                PotentialKind::McSpeed,
            ][rng.gen_range(0..3)];
            let p = PotentialSpec::new(kind, rng.gen_range(0.0..50.0)).unwrap();
            let gamma: f64 = rng.gen_range(0.5..1.0);
            let len = rng.gen_range(2..200);
            let states: Vec<ContinuousState> = (0..len)
                .map(|_| mc_state(rng.gen_range(-1.2..0.6), rng.gen_range(-0.07..0.07)))
                .collect();
            let mut sum = 0.0;
            let mut discount = 1.0;
            for w in states.windows(2) {
                let f = shaping_reward(
                    potential(&p, &w[0]).unwrap(),
                    potential(&p, &w[1]).unwrap(),
                    gamma,
                    p.scale,
                );
                sum += discount * f;
                discount *= gamma;
            }
            let expected = p.scale
                * (discount * potential(&p, states.last().unwrap()).unwrap()
                    - potential(&p, &states[0]).unwrap());
            assert!(
                (sum - expected).abs() < 1e-9,
                "telescoping violated: {sum} vs {expected}"
            );
        }
    }

    #[test]
    fn tabular_potential_fixture_parsing() {
        let text = "potential\nstates 4\n0 0.5\n2 -1.25\n# comment\n3 2\n";
        let p = TabularPotential::parse(text).unwrap();
        assert_eq!(p.values(), &[0.5, 0.0, -1.25, 2.0]);
        assert!(TabularPotential::parse("states 2\n0 1\n").is_err());
        assert!(TabularPotential::parse("potential\nstates 2\n5 1\n").is_err());
    }
}
