//! Exact tabular references: value iteration and tabular Q-learning on small
//! MDPs, plus potential-based shaping of tabular rewards.
//!
//! Terminal states are modeled as absorbing self-loops with zero base reward
//! and are sampled like any other state, so shaped and unshaped optimal
//! values relate exactly by `Q'(s,a) = Q*(s,a) - phi(s)` — including at the
//! absorbing states themselves. This is the reference against which the
//! policy-preservation property is checked.
//!
//! Gridworld instances and potential tables load from a line-oriented text
//! format for reproducible fixtures; see [`load_gridworld`] and
//! [`crate::shaping::TabularPotential`].

use crate::error::{Error, Result};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Decimal rounding used when comparing greedy argmax sets.
const ARGMAX_ROUND: f64 = 1e9;

/// Explicit finite MDP: sparse transition rows of (next state, probability,
/// reward).
#[derive(Clone, Debug)]
pub struct TabularMdp {
    n_states: usize,
    n_actions: usize,
    /// rows[s * n_actions + a] = list of (s', p, r)
    rows: Vec<Vec<(usize, f64, f64)>>,
    pub gamma: f64,
    pub terminal: Vec<bool>,
}

impl TabularMdp {
    pub fn new(
        n_states: usize,
        n_actions: usize,
        rows: Vec<Vec<(usize, f64, f64)>>,
        gamma: f64,
        terminal: Vec<bool>,
    ) -> Result<Self> {
        assert_eq!(rows.len(), n_states * n_actions);
        assert_eq!(terminal.len(), n_states);
        let mdp = TabularMdp {
            n_states,
            n_actions,
            rows,
            gamma,
            terminal,
        };
        mdp.check_stochastic()?;
        Ok(mdp)
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn row(&self, s: usize, a: usize) -> &[(usize, f64, f64)] {
        &self.rows[s * self.n_actions + a]
    }

    fn check_stochastic(&self) -> Result<()> {
        for s in 0..self.n_states {
            for a in 0..self.n_actions {
                let sum: f64 = self.row(s, a).iter().map(|&(_, p, _)| p).sum();
                if (sum - 1.0).abs() > 1e-9 {
                    return Err(Error::NonStochasticRow {
                        state: s,
                        action: a,
                        sum,
                    });
                }
            }
        }
        Ok(())
    }

    /// Samples (s', r) for taking `a` in `s`.
    pub fn sample(&self, s: usize, a: usize, rng: &mut ChaCha8Rng) -> (usize, f64) {
        let row = self.row(s, a);
        if row.len() == 1 {
            return (row[0].0, row[0].2);
        }
        let mut u: f64 = rng.gen();
        for &(s2, p, r) in row {
            if u < p {
                return (s2, r);
            }
            u -= p;
        }
        let &(s2, _, r) = row.last().expect("nonempty transition row");
        (s2, r)
    }
}

/// Dense Q(s, a) table.
#[derive(Clone, Debug)]
pub struct TabularQ {
    n_states: usize,
    n_actions: usize,
    q: Vec<f64>,
}

impl TabularQ {
    pub fn zeros(n_states: usize, n_actions: usize) -> Self {
        TabularQ {
            n_states,
            n_actions,
            q: vec![0.0; n_states * n_actions],
        }
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn get(&self, s: usize, a: usize) -> f64 {
        self.q[s * self.n_actions + a]
    }

    pub fn set(&mut self, s: usize, a: usize, v: f64) {
        self.q[s * self.n_actions + a] = v;
    }

    pub fn state_value(&self, s: usize) -> f64 {
        (0..self.n_actions)
            .map(|a| self.get(s, a))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// The set of greedy-optimal actions after rounding values at 1e-9, so
    /// floating-point noise cannot split an exact tie.
    pub fn greedy_set(&self, s: usize) -> Vec<usize> {
        let rounded: Vec<i64> = (0..self.n_actions)
            .map(|a| (self.get(s, a) * ARGMAX_ROUND).round() as i64)
            .collect();
        let best = *rounded.iter().max().expect("at least one action");
        rounded
            .iter()
            .enumerate()
            .filter(|&(_, &v)| v == best)
            .map(|(a, _)| a)
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct ValueIterationResult {
    pub q: TabularQ,
    /// Sup-norm Bellman residual after each sweep.
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

/// Solves for Q* by repeated Bellman-optimality sweeps until the sup-norm
/// residual drops below `tol`.
pub fn value_iteration(mdp: &TabularMdp, tol: f64) -> Result<ValueIterationResult> {
    assert!(tol > 0.0, "tolerance must be positive");
    mdp.check_stochastic()?;
    let mut q = TabularQ::zeros(mdp.n_states(), mdp.n_actions());
    let mut residuals = Vec::new();
    let max_sweeps = 1_000_000usize;
    for sweep in 0..max_sweeps {
        let mut residual = 0.0f64;
        let mut next = q.clone();
        for s in 0..mdp.n_states() {
            for a in 0..mdp.n_actions() {
                let backed: f64 = mdp
                    .row(s, a)
                    .iter()
                    .map(|&(s2, p, r)| p * (r + mdp.gamma * q.state_value(s2)))
                    .sum();
                residual = residual.max((backed - q.get(s, a)).abs());
                next.set(s, a, backed);
            }
        }
        q = next;
        residuals.push(residual);
        if residual < tol {
            return Ok(ValueIterationResult {
                q,
                residuals,
                iterations: sweep + 1,
            });
        }
    }
    Err(Error::Stats(format!(
        "value iteration failed to reach tol {tol} within {max_sweeps} sweeps"
    )))
}

/// Tabular Q-learning under a uniform behavior policy.
///
/// Samples step-capped segments from uniformly random start states and
/// bootstraps through every state (absorbing states included), matching the
/// convention of [`value_iteration`].
pub fn tabular_q_learning(
    mdp: &TabularMdp,
    steps: usize,
    alpha: f64,
    segment_len: usize,
    rng: &mut ChaCha8Rng,
) -> TabularQ {
    let mut q = TabularQ::zeros(mdp.n_states(), mdp.n_actions());
    let mut s = rng.gen_range(0..mdp.n_states());
    let mut in_segment = 0usize;
    for _ in 0..steps {
        if in_segment >= segment_len {
            s = rng.gen_range(0..mdp.n_states());
            in_segment = 0;
        }
        let a = rng.gen_range(0..mdp.n_actions());
        let (s2, r) = mdp.sample(s, a, rng);
        let delta = r + mdp.gamma * q.state_value(s2) - q.get(s, a);
        q.set(s, a, q.get(s, a) + alpha * delta);
        s = s2;
        in_segment += 1;
    }
    q
}

/// Applies potential-based shaping to every reward entry:
/// `r'(s,a,s') = r + gamma * phi(s') - phi(s)`. Dynamics are untouched.
pub fn shape_tabular(mdp: &TabularMdp, phi: &[f64]) -> Result<TabularMdp> {
    if phi.len() != mdp.n_states() {
        return Err(Error::DimensionMismatch {
            expected: mdp.n_states(),
            got: phi.len(),
        });
    }
    if let Some(bad) = phi.iter().find(|v| !v.is_finite()) {
        return Err(Error::Parse(format!("non-finite potential entry {bad}")));
    }
    let mut rows = Vec::with_capacity(mdp.n_states() * mdp.n_actions());
    for s in 0..mdp.n_states() {
        for a in 0..mdp.n_actions() {
            rows.push(
                mdp.row(s, a)
                    .iter()
                    .map(|&(s2, p, r)| (s2, p, r + mdp.gamma * phi[s2] - phi[s]))
                    .collect(),
            );
        }
    }
    TabularMdp::new(
        mdp.n_states(),
        mdp.n_actions(),
        rows,
        mdp.gamma,
        mdp.terminal.clone(),
    )
}

/// Parses a gridworld description.
///
/// Line-oriented schema (order-free, `#` comments allowed):
/// ```text
/// gridworld
/// width 5
/// height 5
/// goal 4 4
/// step_reward -1
/// gamma 0.95
/// ```
pub fn parse_gridworld(text: &str) -> Result<TabularMdp> {
    let mut width = None;
    let mut height = None;
    let mut goal = None;
    let mut step_reward = None;
    let mut gamma = None;
    let mut saw_header = false;
    for raw in text.lines() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let key = parts.next().unwrap();
        let mut num = |name: &str| -> Result<f64> {
            parts
                .next()
                .ok_or_else(|| Error::Parse(format!("missing value for `{name}`")))?
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("bad value for `{name}`: {e}")))
        };
        match key {
            "gridworld" => saw_header = true,
            "width" => width = Some(num("width")? as usize),
            "height" => height = Some(num("height")? as usize),
            "goal" => {
                let x = num("goal x")? as usize;
                let y = num("goal y")? as usize;
                goal = Some((x, y));
            }
            "step_reward" => step_reward = Some(num("step_reward")?),
            "gamma" => gamma = Some(num("gamma")?),
            other => return Err(Error::Parse(format!("unknown gridworld key `{other}`"))),
        }
    }
    if !saw_header {
        return Err(Error::Parse("missing `gridworld` header line".into()));
    }
    let missing = |name: &str| Error::Parse(format!("missing `{name}`"));
    crate::envs::gridworld_build(
        width.ok_or_else(|| missing("width"))?,
        height.ok_or_else(|| missing("height"))?,
        goal.ok_or_else(|| missing("goal"))?,
        step_reward.ok_or_else(|| missing("step_reward"))?,
        gamma.ok_or_else(|| missing("gamma"))?,
    )
}

/// Reads a gridworld fixture file; see [`parse_gridworld`] for the schema.
pub fn load_gridworld(path: &std::path::Path) -> Result<TabularMdp> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_gridworld(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::gridworld_build;
    use crate::rng;

    fn chain(n: usize, gamma: f64) -> TabularMdp {
        // states 0..n-1, action 0 moves left (or stays), action 1 moves right;
        // state n-1 is the absorbing goal
        let mut rows = Vec::new();
        for s in 0..n {
            for a in 0..2 {
                let row = if s == n - 1 {
                    vec![(s, 1.0, 0.0)]
                } else {
                    let s2 = if a == 1 { s + 1 } else { s.saturating_sub(1) };
                    vec![(s2, 1.0, -1.0)]
                };
                rows.push(row);
            }
        }
        let mut terminal = vec![false; n];
        terminal[n - 1] = true;
        TabularMdp::new(n, 2, rows, gamma, terminal).unwrap()
    }

    #[test]
    fn absorbing_state_has_zero_value() {
        let mdp = chain(1, 0.9);
        let res = value_iteration(&mdp, 1e-10).unwrap();
        assert_eq!(res.q.get(0, 0), 0.0);
        assert_eq!(res.q.get(0, 1), 0.0);
    }

    #[test]
    fn two_state_chain_one_step_cost() {
        let mdp = chain(2, 1.0);
        let res = value_iteration(&mdp, 1e-10).unwrap();
        assert!((res.q.get(0, 1) - -1.0).abs() < 1e-9);
    }

    #[test]
    fn non_stochastic_row_is_rejected() {
        let rows = vec![vec![(0, 0.5, 0.0)]];
        assert!(TabularMdp::new(1, 1, rows, 0.9, vec![true]).is_err());
    }

    #[test]
    fn residuals_contract() {
        let mdp = gridworld_build(5, 5, (4, 4), -1.0, 0.95).unwrap();
        let res = value_iteration(&mdp, 1e-10).unwrap();
        for w in res.residuals.windows(2) {
            assert!(
                w[1] <= mdp.gamma * w[0] + 1e-12,
                "residual sequence must contract: {} -> {}",
                w[0],
                w[1]
            );
        }
    }

    #[test]
    fn q_learning_zero_alpha_is_inert() {
        let mdp = chain(3, 0.9);
        let q = tabular_q_learning(&mdp, 500, 0.0, 50, &mut rng::stream(1, 0, "ql"));
        for s in 0..3 {
            for a in 0..2 {
                assert_eq!(q.get(s, a), 0.0);
            }
        }
    }

    #[test]
    fn q_learning_converges_to_value_iteration_on_chain() {
        let mdp = chain(2, 1.0);
        let vi = value_iteration(&mdp, 1e-12).unwrap();
        let ql = tabular_q_learning(&mdp, 20_000, 0.5, 20, &mut rng::stream(2, 0, "ql"));
        for s in 0..2 {
            for a in 0..2 {
                assert!(
                    (ql.get(s, a) - vi.q.get(s, a)).abs() < 1e-3,
                    "Q({s},{a}): {} vs {}",
                    ql.get(s, a),
                    vi.q.get(s, a)
                );
            }
        }
    }

    #[test]
    fn shaping_with_zero_potential_is_identity() {
        let mdp = chain(3, 0.9);
        let shaped = shape_tabular(&mdp, &[0.0; 3]).unwrap();
        for s in 0..3 {
            for a in 0..2 {
                assert_eq!(mdp.row(s, a), shaped.row(s, a));
            }
        }
    }

    #[test]
    fn constant_potential_at_gamma_one_is_identity() {
        let mdp = chain(3, 1.0);
        let shaped = shape_tabular(&mdp, &[5.5; 3]).unwrap();
        for s in 0..3 {
            for a in 0..2 {
                let r0 = mdp.row(s, a)[0].2;
                let r1 = shaped.row(s, a)[0].2;
                assert!((r0 - r1).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn shaped_q_learning_preserves_greedy_policy() {
        let mdp = chain(4, 0.95);
        let phi = [0.7, -1.3, 2.2, 0.4];
        let shaped = shape_tabular(&mdp, &phi).unwrap();
        let base_vi = value_iteration(&mdp, 1e-12).unwrap();
        let ql = tabular_q_learning(&shaped, 60_000, 0.5, 20, &mut rng::stream(5, 0, "ql"));
        for s in 0..3 {
            let best = (0..2)
                .max_by(|&a, &b| ql.get(s, a).partial_cmp(&ql.get(s, b)).unwrap())
                .unwrap();
            assert_eq!(vec![best], base_vi.q.greedy_set(s));
        }
    }

    #[test]
    fn gridworld_fixture_round_trip() {
        let text = "# fixture\ngridworld\nwidth 5\nheight 5\ngoal 4 4\nstep_reward -1\ngamma 0.95\n";
        let parsed = parse_gridworld(text).unwrap();
        let built = gridworld_build(5, 5, (4, 4), -1.0, 0.95).unwrap();
        assert_eq!(parsed.n_states(), built.n_states());
        for s in 0..parsed.n_states() {
            for a in 0..parsed.n_actions() {
                assert_eq!(parsed.row(s, a), built.row(s, a));
            }
        }
    }

    #[test]
    fn unknown_fixture_key_is_an_error() {
        assert!(parse_gridworld("gridworld\nwidth 2\nheight 2\ngoal 1 1\nstep_reward -1\ngamma 0.9\nbogus 3\n").is_err());
    }
}
