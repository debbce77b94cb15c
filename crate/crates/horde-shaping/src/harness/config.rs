//! Experiment configuration: one structured TOML document.
//!
//! Unknown keys are hard errors — a silently ignored hyperparameter typo is
//! the classic way a reproduction goes wrong.

use crate::envs::{CartPole, EnvId, Environment, MountainCar};
use crate::error::{Error, Result};
use crate::gtd::DemonParams;
use crate::shaping::{DemonShaping, PotentialKind, PotentialSpec};
use crate::voting::VotingScheme;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvironmentId {
    MountainCar,
    CartPole,
}

impl EnvironmentId {
    pub fn env_id(self) -> EnvId {
        match self {
            EnvironmentId::MountainCar => EnvId::MountainCar,
            EnvironmentId::CartPole => EnvId::CartPole,
        }
    }

    pub fn default_max_steps(self) -> usize {
        match self {
            EnvironmentId::MountainCar => 2000,
            EnvironmentId::CartPole => 1000,
        }
    }

    pub fn state_dim(self) -> usize {
        match self {
            EnvironmentId::MountainCar => 2,
            EnvironmentId::CartPole => 4,
        }
    }
}

/// One family of shaped demons: a potential kind across a list of scales.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialGroup {
    pub kind: PotentialKind,
    pub scales: Vec<f64>,
    /// Label prefix for demon ids (defaults to the kind name). Lets the same
    /// kind appear in several groups, e.g. a tuned scale and a sweep range.
    pub group: Option<String>,
}

impl PotentialGroup {
    pub fn label(&self) -> String {
        self.group.clone().unwrap_or_else(|| self.kind.name().to_string())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSpec {
    pub name: String,
    /// Demon ids; each must resolve to a configured demon.
    pub members: Vec<String>,
    pub voting: VotingScheme,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub environment: EnvironmentId,
    pub gamma: f64,
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
    pub runs: usize,
    pub episodes: usize,
    /// Evaluate every `eval_interval` episodes.
    pub eval_interval: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub max_steps: Option<usize>,
    #[serde(default = "default_bins")]
    pub bins: usize,
    #[serde(default = "default_tilings")]
    pub tilings: usize,
    #[serde(default = "default_true")]
    pub include_base: bool,
    #[serde(default)]
    pub output_dir: Option<String>,
    #[serde(default)]
    pub potentials: Vec<PotentialGroup>,
    #[serde(default)]
    pub ensembles: Vec<EnsembleSpec>,
}

fn default_bins() -> usize {
    10
}

fn default_tilings() -> usize {
    10
}

fn default_true() -> bool {
    true
}

/// The demon id for a potential group member: `<label>@<scale>`.
pub fn demon_id(label: &str, scale: f64) -> String {
    format!("{label}@{scale}")
}

/// The base learner's policy id.
pub const BASE_ID: &str = "base";

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::config("<config>", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Learner step sizes, normalized per active feature: with binary tile
    /// features, `tilings` weights move on every update, so the configured
    /// step sizes divide by the tiling count (raw steps of 0.1 across 10
    /// tilings overshoot the TD target and diverge).
    pub fn params(&self) -> DemonParams {
        let norm = self.tilings as f64;
        DemonParams {
            alpha: self.alpha / norm,
            beta: self.beta / norm,
            lambda: self.lambda,
            gamma: self.gamma,
        }
    }

    pub fn max_steps(&self) -> usize {
        self.max_steps
            .unwrap_or_else(|| self.environment.default_max_steps())
    }

    pub fn build_env(&self) -> Box<dyn Environment + Sync> {
        match self.environment {
            EnvironmentId::MountainCar => Box::new(MountainCar::new(self.max_steps(), self.gamma)),
            EnvironmentId::CartPole => Box::new(CartPole::new(self.max_steps(), self.gamma)),
        }
    }

    /// The demon reward channels in evaluation order: base first (when
    /// included), then each potential group's scales in order.
    pub fn demon_channels(&self) -> Result<Vec<(String, DemonShaping)>> {
        let mut out = Vec::new();
        if self.include_base {
            out.push((BASE_ID.to_string(), DemonShaping::Base));
        }
        for (gi, group) in self.potentials.iter().enumerate() {
            let label = group.label();
            for &scale in &group.scales {
                let spec = PotentialSpec::new(group.kind, scale)
                    .map_err(|e| Error::config(format!("potentials[{gi}]"), e.to_string()))?;
                out.push((demon_id(&label, scale), DemonShaping::Shaped(spec)));
            }
        }
        Ok(out)
    }

    pub fn checkpoints(&self) -> usize {
        self.episodes / self.eval_interval
    }

    pub fn validate(&self) -> Result<()> {
        self.params().validate()?;
        if self.runs < 1 {
            return Err(Error::config("runs", "must be at least 1"));
        }
        if self.episodes < 1 {
            return Err(Error::config("episodes", "must be at least 1"));
        }
        if self.eval_interval < 1 {
            return Err(Error::config("eval_interval", "must be at least 1"));
        }
        if self.checkpoints() == 0 {
            return Err(Error::config(
                "eval_interval",
                "must not exceed the episode count",
            ));
        }
        if self.bins < 1 || self.tilings < 1 {
            return Err(Error::config("bins/tilings", "must be at least 1"));
        }
        if let Some(ms) = self.max_steps {
            if ms < 1 {
                return Err(Error::config("max_steps", "must be at least 1"));
            }
        }

        let mut ids = Vec::new();
        for (gi, group) in self.potentials.iter().enumerate() {
            let key = format!("potentials[{gi}]");
            if group.scales.is_empty() {
                return Err(Error::config(format!("{key}.scales"), "must be non-empty"));
            }
            if group.kind.state_dim() != self.environment.state_dim() {
                return Err(Error::config(
                    format!("{key}.kind"),
                    format!(
                        "potential `{}` does not apply to environment `{:?}`",
                        group.kind.name(),
                        self.environment
                    ),
                ));
            }
            let label = group.label();
            if label.is_empty() || label.contains(',') || label.contains('@') {
                return Err(Error::config(
                    format!("{key}.group"),
                    "labels must be non-empty and free of ',' and '@'",
                ));
            }
            for &scale in &group.scales {
                if !scale.is_finite() || scale < 0.0 {
                    return Err(Error::config(
                        format!("{key}.scales"),
                        format!("scales must be finite and non-negative, got {scale}"),
                    ));
                }
                let id = demon_id(&label, scale);
                if ids.contains(&id) {
                    return Err(Error::config(
                        format!("{key}.scales"),
                        format!("duplicate demon id `{id}`"),
                    ));
                }
                ids.push(id);
            }
        }
        if self.include_base {
            ids.push(BASE_ID.to_string());
        }
        if ids.is_empty() {
            return Err(Error::config(
                "potentials",
                "at least one demon required (a potential group or the base learner)",
            ));
        }

        for (ei, ens) in self.ensembles.iter().enumerate() {
            let key = format!("ensembles[{ei}]");
            if ens.name.is_empty() || ens.name.contains(',') {
                return Err(Error::config(
                    format!("{key}.name"),
                    "must be non-empty and comma-free",
                ));
            }
            if ens.members.is_empty() {
                return Err(Error::config(format!("{key}.members"), "must be non-empty"));
            }
            if ids.contains(&ens.name) || self.ensembles[..ei].iter().any(|e| e.name == ens.name) {
                return Err(Error::config(
                    format!("{key}.name"),
                    format!("policy id `{}` is already taken", ens.name),
                ));
            }
            for m in &ens.members {
                if !ids.contains(m) {
                    return Err(Error::config(
                        format!("{key}.members"),
                        format!("member `{m}` does not resolve to a configured demon"),
                    ));
                }
            }
        }
        Ok(())
    }
}
