//! One demon: a Greedy-GQ(lambda) learner over sparse linear features.
//!
//! Each demon maximizes its own (possibly shaped) reward off-policy. The
//! update keeps two weight vectors: the value parameters `theta` and the
//! gradient-correction weights `w` that keep off-policy bootstrapping
//! convergent. Eligibility traces use the Watkins convention: the inherited
//! trace survives a step only when the taken action was greedy under the
//! current value estimate, which makes the lambda = 0 case collapse exactly
//! to the two-timescale TDC update.

use crate::error::{Error, Result};
use crate::shaping::DemonShaping;
use crate::sparse::SparseVec;
use crate::tilecoding::{SparseFeatures, TileCoder};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DemonParams {
    /// Step size for the value weights theta.
    pub alpha: f64,
    /// Step size for the correction weights w.
    pub beta: f64,
    /// Trace decay in [0, 1].
    pub lambda: f64,
    /// Discount factor in [0, 1].
    pub gamma: f64,
}

impl DemonParams {
    /// Validates the ranges a learning configuration must satisfy. Test
    /// constructions (e.g. beta = 0 for exact reductions) may bypass this.
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(Error::config("alpha", "must be positive and finite"));
        }
        if !(self.beta > 0.0) || !self.beta.is_finite() {
            return Err(Error::config("beta", "must be positive and finite"));
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::config("lambda", "must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::config("gamma", "must lie in [0, 1]"));
        }
        Ok(())
    }
}

/// TD error `delta = r + gamma * q_next_greedy - q_sa`, with the bootstrap
/// cut at terminal transitions.
pub fn td_error(q_sa: f64, q_next_greedy: f64, reward: f64, gamma: f64, terminal: bool) -> f64 {
    let bootstrap = if terminal { 0.0 } else { gamma * q_next_greedy };
    reward + bootstrap - q_sa
}

#[derive(Clone, Debug)]
pub struct Demon {
    id: String,
    theta: Vec<f64>,
    w: Vec<f64>,
    trace: SparseVec,
    params: DemonParams,
    shaping: DemonShaping,
}

impl Demon {
    pub fn new(
        id: impl Into<String>,
        total_dim: usize,
        params: DemonParams,
        shaping: DemonShaping,
    ) -> Self {
        Demon {
            id: id.into(),
            theta: vec![0.0; total_dim],
            w: vec![0.0; total_dim],
            trace: SparseVec::new(),
            params,
            shaping,
        }
    }

    /// Builds a demon from explicit weights, e.g. a loaded snapshot.
    pub fn from_weights(
        id: impl Into<String>,
        theta: Vec<f64>,
        w: Vec<f64>,
        params: DemonParams,
        shaping: DemonShaping,
    ) -> Result<Self> {
        if theta.len() != w.len() {
            return Err(Error::DimensionMismatch {
                expected: theta.len(),
                got: w.len(),
            });
        }
        Ok(Demon {
            id: id.into(),
            theta,
            w,
            trace: SparseVec::new(),
            params,
            shaping,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    pub fn params(&self) -> &DemonParams {
        &self.params
    }

    pub fn shaping(&self) -> &DemonShaping {
        &self.shaping
    }

    pub fn total_dim(&self) -> usize {
        self.theta.len()
    }

    /// Clears the eligibility trace; call at every episode start.
    pub fn begin_episode(&mut self) {
        self.trace.clear();
    }

    pub fn trace_len(&self) -> usize {
        self.trace.len()
    }

    /// Linear value of pre-encoded features under the current theta.
    pub fn q_from_features(&self, features: &SparseFeatures) -> f64 {
        debug_assert_eq!(features.total_dim(), self.theta.len());
        features
            .active()
            .iter()
            .map(|&i| self.theta[i as usize])
            .sum()
    }

    /// Q-values for every action of `state` under the current weights.
    pub fn q_values(&self, coder: &TileCoder, state: &crate::envs::ContinuousState) -> Vec<f64> {
        (0..coder.action_count())
            .map(|a| self.q_from_features(&coder.encode(state, a)))
            .collect()
    }

    /// Greedy action under the current weights; ties break toward the lowest
    /// action index.
    pub fn greedy_action(
        &self,
        coder: &TileCoder,
        state: &crate::envs::ContinuousState,
    ) -> (usize, Vec<f64>) {
        let q = self.q_values(coder, state);
        (argmax_lowest(&q), q)
    }

    /// The two-timescale TDC update for a single transition with a
    /// precomputed TD error:
    /// `theta += alpha * (delta * phi - gamma * (phi' w^T phi))` and
    /// `w += beta * (delta - phi^T w) * phi`.
    pub fn tdc_update(
        &mut self,
        phi: &SparseFeatures,
        phi_next: &SparseFeatures,
        delta: f64,
    ) -> Result<()> {
        self.check_dim(phi)?;
        self.check_dim(phi_next)?;
        if !delta.is_finite() {
            return Err(Error::NonFinite {
                id: self.id.clone(),
                what: "TD error",
            });
        }
        let mut unit_trace = SparseVec::new();
        unit_trace.add_unit_at(phi.active());
        apply_updates(
            &mut self.theta,
            &mut self.w,
            &unit_trace,
            phi,
            Some(phi_next),
            delta,
            self.params.alpha,
            self.params.beta,
            self.params.gamma,
            0.0,
            &self.id,
        )
    }

    /// One Greedy-GQ(lambda) step on a shared transition, from pre-encoded
    /// features (one entry per action at both states).
    ///
    /// `behavior_prob` is the behavior policy's probability of the taken
    /// action; the Watkins trace cut replaces importance weighting, so the
    /// value is validated but does not enter the arithmetic.
    #[allow(clippy::too_many_arguments)]
    pub fn gq_step_from_features(
        &mut self,
        phis_at_state: &[SparseFeatures],
        taken: usize,
        phis_at_next: &[SparseFeatures],
        reward: f64,
        terminal: bool,
        behavior_prob: f64,
    ) -> Result<()> {
        if !(behavior_prob > 0.0) {
            return Err(Error::InvalidBehaviorProb(behavior_prob));
        }
        let phi = &phis_at_state[taken];
        self.check_dim(phi)?;

        // greediness of the taken action, assessed under the current theta
        let mut q_max = f64::NEG_INFINITY;
        for features in phis_at_state {
            let q = self.q_from_features(features);
            if q > q_max {
                q_max = q;
            }
        }
        let q_taken = self.q_from_features(phi);
        let taken_was_greedy = q_taken == q_max;

        // greedy action features and value at the next state
        let (phi_next, q_next_greedy) = if terminal {
            (None, 0.0)
        } else {
            let mut best = 0usize;
            let mut best_q = f64::NEG_INFINITY;
            for (a, features) in phis_at_next.iter().enumerate() {
                let q = self.q_from_features(features);
                if q > best_q {
                    best_q = q;
                    best = a;
                }
            }
            (Some(&phis_at_next[best]), best_q)
        };

        let delta = td_error(q_taken, q_next_greedy, reward, self.params.gamma, terminal);
        if !delta.is_finite() {
            return Err(Error::NonFinite {
                id: self.id.clone(),
                what: "TD error",
            });
        }

        // e <- phi + gamma * lambda * e_prev * [taken was greedy]
        if taken_was_greedy {
            self.trace.scale(self.params.gamma * self.params.lambda);
        } else {
            self.trace.clear();
        }
        self.trace.add_unit_at(phi.active());

        apply_updates(
            &mut self.theta,
            &mut self.w,
            &self.trace,
            phi,
            phi_next,
            delta,
            self.params.alpha,
            self.params.beta,
            self.params.gamma,
            self.params.lambda,
            &self.id,
        )
    }

    /// Convenience wrapper that encodes the transition itself.
    pub fn gq_step(
        &mut self,
        coder: &TileCoder,
        t: &crate::envs::Transition,
        shaped_reward: f64,
        behavior_prob: f64,
    ) -> Result<()> {
        let phis_at_state: Vec<SparseFeatures> = (0..coder.action_count())
            .map(|a| coder.encode(&t.state, a))
            .collect();
        let phis_at_next: Vec<SparseFeatures> = if t.terminal {
            Vec::new()
        } else {
            (0..coder.action_count())
                .map(|a| coder.encode(&t.next_state, a))
                .collect()
        };
        self.gq_step_from_features(
            &phis_at_state,
            t.action,
            &phis_at_next,
            shaped_reward,
            t.terminal,
            behavior_prob,
        )
    }

    fn check_dim(&self, features: &SparseFeatures) -> Result<()> {
        if features.total_dim() != self.theta.len() {
            return Err(Error::DimensionMismatch {
                expected: self.theta.len(),
                got: features.total_dim(),
            });
        }
        Ok(())
    }

    /// Writes the snapshot format parsed by [`DemonSnapshot::read`]:
    /// a header, `id` and `dim` lines, then one `theta i v` / `w i v` line
    /// per nonzero weight, terminated by `end`. Values print in Rust's
    /// shortest round-trip notation, so loading restores exact bits.
    pub fn write_snapshot(&self, out: &mut impl std::io::Write) -> std::io::Result<()> {
        writeln!(out, "demon-snapshot v1")?;
        writeln!(out, "id {}", self.id)?;
        writeln!(out, "dim {}", self.theta.len())?;
        for (name, vec) in [("theta", &self.theta), ("w", &self.w)] {
            for (i, &v) in vec.iter().enumerate() {
                if v != 0.0 {
                    writeln!(out, "{name} {i} {v}")?;
                }
            }
        }
        writeln!(out, "end")
    }
}

/// A demon's learned weights, as stored in snapshot files.
#[derive(Clone, Debug, PartialEq)]
pub struct DemonSnapshot {
    pub id: String,
    pub dim: usize,
    pub theta: Vec<f64>,
    pub w: Vec<f64>,
}

impl DemonSnapshot {
    pub fn read(input: &mut impl std::io::BufRead) -> Result<Self> {
        let mut lines = String::new();
        input
            .read_to_string(&mut lines)
            .map_err(|e| Error::Parse(format!("snapshot read failed: {e}")))?;
        Self::parse(&lines)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some("demon-snapshot v1") => {}
            other => {
                return Err(Error::Parse(format!(
                    "bad snapshot header: {other:?}"
                )))
            }
        }
        let mut id = None;
        let mut dim = None;
        let mut theta = Vec::new();
        let mut w = Vec::new();
        for line in lines {
            let mut parts = line.split_whitespace();
            match parts.next() {
                Some("id") => id = Some(parts.collect::<Vec<_>>().join(" ")),
                Some("dim") => {
                    let n: usize = parts
                        .next()
                        .ok_or_else(|| Error::Parse("missing dim value".into()))?
                        .parse()
                        .map_err(|e| Error::Parse(format!("bad dim: {e}")))?;
                    theta = vec![0.0; n];
                    w = vec![0.0; n];
                    dim = Some(n);
                }
                Some(name @ ("theta" | "w")) => {
                    let n = dim.ok_or_else(|| Error::Parse("`dim` must precede weights".into()))?;
                    let i: usize = parts
                        .next()
                        .ok_or_else(|| Error::Parse(format!("missing {name} index")))?
                        .parse()
                        .map_err(|e| Error::Parse(format!("bad {name} index: {e}")))?;
                    let v: f64 = parts
                        .next()
                        .ok_or_else(|| Error::Parse(format!("missing {name} value")))?
                        .parse()
                        .map_err(|e| Error::Parse(format!("bad {name} value: {e}")))?;
                    if i >= n {
                        return Err(Error::Parse(format!("{name} index {i} out of range {n}")));
                    }
                    if name == "theta" {
                        theta[i] = v;
                    } else {
                        w[i] = v;
                    }
                }
                Some("end") => break,
                Some(other) => {
                    return Err(Error::Parse(format!("unknown snapshot line `{other}`")))
                }
                None => continue,
            }
        }
        Ok(DemonSnapshot {
            id: id.ok_or_else(|| Error::Parse("missing snapshot id".into()))?,
            dim: dim.ok_or_else(|| Error::Parse("missing snapshot dim".into()))?,
            theta,
            w,
        })
    }
}

fn argmax_lowest(values: &[f64]) -> usize {
    let mut best = 0usize;
    let mut best_v = f64::NEG_INFINITY;
    for (i, &v) in values.iter().enumerate() {
        if v > best_v {
            best_v = v;
            best = i;
        }
    }
    best
}

/// Shared update kernel:
/// `theta += alpha * (delta * e - gamma * (1 - lambda) * (e^T w) * phi')`,
/// `w     += beta  * (delta * e - (phi^T w) * phi)`.
/// Dot products are taken before either vector mutates.
#[allow(clippy::too_many_arguments)]
fn apply_updates(
    theta: &mut [f64],
    w: &mut [f64],
    trace: &SparseVec,
    phi: &SparseFeatures,
    phi_next: Option<&SparseFeatures>,
    delta: f64,
    alpha: f64,
    beta: f64,
    gamma: f64,
    lambda: f64,
    id: &str,
) -> Result<()> {
    let e_dot_w = trace.dot(w);
    let phi_dot_w: f64 = phi.active().iter().map(|&i| w[i as usize]).sum();
    if !e_dot_w.is_finite() || !phi_dot_w.is_finite() {
        return Err(Error::NonFinite {
            id: id.to_string(),
            what: "correction term",
        });
    }

    for (i, e_i) in trace.iter() {
        theta[i as usize] += alpha * delta * e_i;
    }
    if let Some(phi_next) = phi_next {
        let coef = alpha * gamma * (1.0 - lambda) * e_dot_w;
        for &i in phi_next.active() {
            theta[i as usize] -= coef;
        }
    }

    for (i, e_i) in trace.iter() {
        w[i as usize] += beta * delta * e_i;
    }
    for &i in phi.active() {
        w[i as usize] -= beta * phi_dot_w;
    }
    Ok(())
}
