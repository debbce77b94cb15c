//! Experiment harness: seeded multi-run orchestration, learning curves,
//! significance tests, and bit-stable CSV emission.
//!
//! A run is a pure function of (config, master seed, run index); runs fan
//! out across a worker pool and are collected in run order, so outputs are
//! byte-identical whatever the worker count.

pub mod config;
pub mod outputs;
pub mod stats;

pub use config::{demon_id, EnsembleSpec, EnvironmentId, ExperimentConfig, PotentialGroup, BASE_ID};

use crate::error::{Error, Result};
use crate::gtd::Demon;
use crate::horde::{evaluate_policy, BehaviorPolicy, EvalPolicy, Horde};
use crate::rng;
use crate::tilecoding::{TileCoder, TileCoderSpec};
use rayon::prelude::*;

/// Per-policy evaluation returns for every run and checkpoint.
#[derive(Clone, Debug)]
pub struct LearningCurve {
    pub policy: String,
    /// Episode number of each checkpoint (eval_interval, 2*eval_interval, ...).
    pub episodes: Vec<usize>,
    /// returns[run][checkpoint]: undiscounted base return of the evaluation
    /// episode.
    pub returns: Vec<Vec<f64>>,
    /// steps[run][checkpoint]: evaluation episode length (fractional for
    /// averaged reference series).
    pub steps: Vec<Vec<f64>>,
}

impl LearningCurve {
    /// Summed evaluation return per run — the "(sum) performance" samples
    /// the significance tests compare.
    pub fn per_run_sums(&self) -> Vec<f64> {
        self.returns.iter().map(|r| r.iter().sum()).collect()
    }

    /// Mean return across runs at each checkpoint.
    pub fn mean_curve(&self) -> Vec<f64> {
        let runs = self.returns.len() as f64;
        (0..self.episodes.len())
            .map(|k| self.returns.iter().map(|r| r[k]).sum::<f64>() / runs)
            .collect()
    }

    /// Mean return per run over the last quarter of checkpoints.
    pub fn per_run_final_quarter_means(&self) -> Vec<f64> {
        let k = self.episodes.len();
        let start = k - (k / 4).max(1);
        self.returns
            .iter()
            .map(|r| r[start..].iter().sum::<f64>() / (k - start) as f64)
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct PolicySummary {
    pub policy: String,
    pub mean_sum_return: f64,
    pub stderr: f64,
    pub n: usize,
}

#[derive(Clone, Debug)]
pub struct ComparisonRow {
    pub policy_a: String,
    pub policy_b: String,
    pub mean_a: f64,
    pub mean_b: f64,
    pub t: f64,
    pub df: f64,
    pub p: f64,
}

#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    /// Demon and ensemble curves in config order, then one `mean:<group>`
    /// reference series per multi-scale potential group.
    pub curves: Vec<LearningCurve>,
    pub summaries: Vec<PolicySummary>,
    /// Welch tests on per-run summed returns for every unordered pair of
    /// real (non-reference) policies.
    pub comparisons: Vec<ComparisonRow>,
}

impl ExperimentResult {
    pub fn curve(&self, policy: &str) -> Result<&LearningCurve> {
        self.curves
            .iter()
            .find(|c| c.policy == policy)
            .ok_or_else(|| Error::MissingPolicy {
                id: policy.to_string(),
            })
    }
}

/// Builds the tile coder an experiment uses.
pub fn build_coder(cfg: &ExperimentConfig) -> Result<TileCoder> {
    let env = cfg.build_env();
    TileCoder::new(TileCoderSpec {
        bins_per_dim: cfg.bins,
        tilings: cfg.tilings,
        bounds: env.coding_bounds(),
        action_count: env.spec().action_count,
    })
}

/// Runs the full experiment: `runs` seeded independent runs, each learning
/// for `episodes` episodes and evaluating every demon and ensemble at every
/// checkpoint.
pub fn run_experiment(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<ExperimentResult> {
    run_experiment_with_progress(cfg, workers, None)
}

pub fn run_experiment_with_progress(
    cfg: &ExperimentConfig,
    workers: Option<usize>,
    progress: Option<&(dyn Fn(usize, usize) + Sync)>,
) -> Result<ExperimentResult> {
    cfg.validate()?;
    let channels = cfg.demon_channels()?;
    let policy_ids: Vec<String> = channels
        .iter()
        .map(|(id, _)| id.clone())
        .chain(cfg.ensembles.iter().map(|e| e.name.clone()))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::Stats(format!("worker pool: {e}")))?;

    let per_run: Vec<Result<Vec<Vec<(f64, f64)>>>> = pool.install(|| {
        (0..cfg.runs)
            .into_par_iter()
            .map(|run| {
                let out = run_single(cfg, &channels, run as u64);
                if let Some(cb) = progress {
                    cb(run, cfg.runs);
                }
                out
            })
            .collect()
    });

    let mut curves: Vec<LearningCurve> = policy_ids
        .iter()
        .map(|id| LearningCurve {
            policy: id.clone(),
            episodes: (1..=cfg.checkpoints()).map(|k| k * cfg.eval_interval).collect(),
            returns: Vec::with_capacity(cfg.runs),
            steps: Vec::with_capacity(cfg.runs),
        })
        .collect();
    for run_result in per_run {
        let per_policy = run_result?;
        for (curve, evals) in curves.iter_mut().zip(per_policy) {
            let (returns, steps) = evals.into_iter().unzip();
            curve.returns.push(returns);
            curve.steps.push(steps);
        }
    }

    let real_policies = curves.len();
    for group in &cfg.potentials {
        if group.scales.len() >= 2 {
            let reference = mean_of_scale_range(&curves, &group.label(), &group.scales)?;
            curves.push(reference);
        }
    }

    let summaries = curves
        .iter()
        .map(|c| {
            let sums = c.per_run_sums();
            PolicySummary {
                policy: c.policy.clone(),
                mean_sum_return: stats::mean(&sums),
                stderr: if sums.len() > 1 {
                    stats::standard_error(&sums)
                } else {
                    0.0
                },
                n: sums.len(),
            }
        })
        .collect();

    let mut comparisons = Vec::new();
    if cfg.runs >= 2 {
        for i in 0..real_policies {
            for j in (i + 1)..real_policies {
                comparisons.push(compare_curves(&curves[i], &curves[j])?);
            }
        }
    }

    Ok(ExperimentResult {
        config: cfg.clone(),
        curves,
        summaries,
        comparisons,
    })
}

/// One seeded run: learn, checkpoint, evaluate every policy.
/// Returns evals[policy][checkpoint] = (return, steps).
fn run_single(
    cfg: &ExperimentConfig,
    channels: &[(String, crate::shaping::DemonShaping)],
    run: u64,
) -> Result<Vec<Vec<(f64, f64)>>> {
    let env = cfg.build_env();
    let coder = build_coder(cfg)?;
    let demons: Vec<Demon> = channels
        .iter()
        .map(|(id, ch)| Demon::new(id.clone(), coder.total_dim(), cfg.params(), ch.clone()))
        .collect();
    let mut horde = Horde::new(coder, demons, cfg.gamma)?;
    let behavior = BehaviorPolicy::uniform(env.spec().action_count);

    let mut rng_env = rng::stream(cfg.master_seed, run, "env");
    let mut rng_behavior = rng::stream(cfg.master_seed, run, "behavior");

    let n_policies = channels.len() + cfg.ensembles.len();
    let mut evals: Vec<Vec<(f64, f64)>> =
        vec![Vec::with_capacity(cfg.checkpoints()); n_policies];

    for episode in 1..=cfg.episodes {
        horde.run_episode(env.as_ref(), &behavior, &mut rng_env, &mut rng_behavior)?;
        if episode % cfg.eval_interval != 0 {
            continue;
        }
        let checkpoint = episode / cfg.eval_interval;
        for (slot, (id, _)) in channels.iter().enumerate() {
            let demon = horde.demon(id).expect("configured demon exists");
            let mut rng_eval = rng::eval_stream(cfg.master_seed, run, checkpoint, id);
            let outcome = evaluate_policy(
                &EvalPolicy::Demon(demon),
                env.as_ref(),
                horde.coder(),
                &mut rng_eval,
            )?;
            evals[slot].push((outcome.base_return, outcome.steps as f64));
        }
        for (ei, ens) in cfg.ensembles.iter().enumerate() {
            let members: Vec<&Demon> = ens
                .members
                .iter()
                .map(|id| horde.demon(id).expect("validated member"))
                .collect();
            let mut rng_eval = rng::eval_stream(cfg.master_seed, run, checkpoint, &ens.name);
            let outcome = evaluate_policy(
                &EvalPolicy::Ensemble {
                    members,
                    scheme: ens.voting,
                },
                env.as_ref(),
                horde.coder(),
                &mut rng_eval,
            )?;
            evals[channels.len() + ei].push((outcome.base_return, outcome.steps as f64));
        }
    }
    Ok(evals)
}

/// Synthetic reference series: the per-checkpoint arithmetic mean across one
/// potential group's demons (within each run). No single demon attains this
/// curve; it summarizes the group's spread of performance.
pub fn mean_of_scale_range(
    curves: &[LearningCurve],
    label: &str,
    scales: &[f64],
) -> Result<LearningCurve> {
    if scales.is_empty() {
        return Err(Error::Stats("empty scale range".into()));
    }
    let members: Vec<&LearningCurve> = scales
        .iter()
        .map(|&s| {
            let id = demon_id(label, s);
            curves
                .iter()
                .find(|c| c.policy == id)
                .ok_or(Error::MissingPolicy { id })
        })
        .collect::<Result<_>>()?;
    let runs = members[0].returns.len();
    let checkpoints = members[0].episodes.len();
    let m = members.len() as f64;
    let mut returns = vec![vec![0.0; checkpoints]; runs];
    let mut steps = vec![vec![0.0; checkpoints]; runs];
    for member in &members {
        for r in 0..runs {
            for k in 0..checkpoints {
                returns[r][k] += member.returns[r][k] / m;
                steps[r][k] += member.steps[r][k] / m;
            }
        }
    }
    Ok(LearningCurve {
        policy: format!("mean:{label}"),
        episodes: members[0].episodes.clone(),
        returns,
        steps,
    })
}

/// Welch test on two policies' per-run summed evaluation returns.
pub fn compare_curves(a: &LearningCurve, b: &LearningCurve) -> Result<ComparisonRow> {
    let sums_a = a.per_run_sums();
    let sums_b = b.per_run_sums();
    if sums_a.len() != sums_b.len() {
        return Err(Error::Stats(format!(
            "run counts differ: {} vs {}",
            sums_a.len(),
            sums_b.len()
        )));
    }
    let w = stats::welch_t_test(&sums_a, &sums_b)?;
    Ok(ComparisonRow {
        policy_a: a.policy.clone(),
        policy_b: b.policy.clone(),
        mean_a: stats::mean(&sums_a),
        mean_b: stats::mean(&sums_b),
        t: w.t,
        df: w.df,
        p: w.p,
    })
}

/// Looks up two policies in a result and compares them.
pub fn compare_policies(
    result: &ExperimentResult,
    policy_a: &str,
    policy_b: &str,
) -> Result<ComparisonRow> {
    compare_curves(result.curve(policy_a)?, result.curve(policy_b)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config() -> ExperimentConfig {
        ExperimentConfig::from_toml(
            r#"
environment = "mountain_car"
gamma = 0.99
alpha = 0.1
beta = 0.0001
lambda = 0.4
runs = 2
episodes = 10
eval_interval = 5
master_seed = 11
max_steps = 250

[[potentials]]
kind = "mc_position"
scales = [0.0, 20.0]

[[ensembles]]
name = "pair"
members = ["base", "mc_position@20"]
voting = "rank"
"#,
        )
        .unwrap()
    }

    #[test]
    fn checkpoint_schedule_shape() {
        let result = run_experiment(&tiny_config(), Some(1)).unwrap();
        // demons + ensemble + one reference mean series
        assert_eq!(result.curves.len(), 3 + 1 + 1);
        for curve in &result.curves {
            assert_eq!(curve.returns.len(), 2, "{}", curve.policy);
            for r in &curve.returns {
                assert_eq!(r.len(), 2, "{}", curve.policy);
            }
        }
        assert_eq!(result.curve("pair").unwrap().episodes, vec![5, 10]);
    }

    #[test]
    fn zero_scale_demon_is_bit_identical_to_base() {
        let result = run_experiment(&tiny_config(), Some(1)).unwrap();
        let base = result.curve("base").unwrap();
        let zero = result.curve("mc_position@0").unwrap();
        assert_eq!(base.returns, zero.returns);
        let row = compare_policies(&result, "base", "mc_position@0").unwrap();
        assert_eq!(row.p, 1.0);
    }

    #[test]
    fn self_comparison_is_null() {
        let result = run_experiment(&tiny_config(), Some(1)).unwrap();
        let row = compare_policies(&result, "pair", "pair").unwrap();
        assert_eq!(row.p, 1.0);
    }

    #[test]
    fn missing_policy_is_reported() {
        let result = run_experiment(&tiny_config(), Some(1)).unwrap();
        assert!(compare_policies(&result, "base", "nope").is_err());
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let r1 = run_experiment(&tiny_config(), Some(1)).unwrap();
        let r2 = run_experiment(&tiny_config(), Some(2)).unwrap();
        for (a, b) in r1.curves.iter().zip(&r2.curves) {
            assert_eq!(a.policy, b.policy);
            assert_eq!(a.returns, b.returns);
            assert_eq!(a.steps, b.steps);
        }
    }

    #[test]
    fn diverging_demon_aborts_the_run_with_its_id() {
        // an absurd step size overflows theta; the failure must surface
        // with the demon's id rather than poisoning the outputs
        let mut cfg = tiny_config();
        cfg.alpha = 1e12;
        let err = run_experiment(&cfg, Some(1)).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("non-finite"), "{msg}");
        assert!(msg.contains("base") || msg.contains("mc_position"), "{msg}");
    }

    #[test]
    fn mean_series_of_singleton_is_that_demon() {
        let result = run_experiment(&tiny_config(), Some(1)).unwrap();
        let single = mean_of_scale_range(&result.curves, "mc_position", &[20.0]).unwrap();
        assert_eq!(single.returns, result.curve("mc_position@20").unwrap().returns);
    }

    #[test]
    fn mean_series_averages_constant_curves() {
        let mk = |name: &str, v: f64| LearningCurve {
            policy: name.to_string(),
            episodes: vec![5, 10],
            returns: vec![vec![v, v]; 3],
            steps: vec![vec![-v, -v]; 3],
        };
        let curves = vec![mk("g@1", -10.0), mk("g@2", -20.0)];
        let mean = mean_of_scale_range(&curves, "g", &[1.0, 2.0]).unwrap();
        assert_eq!(mean.policy, "mean:g");
        assert!(mean.returns.iter().flatten().all(|&v| v == -15.0));
    }
}
