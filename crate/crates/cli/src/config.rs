//! Experiment configuration files (TOML).
//!
//! A file is parsed into [`ExperimentConfig`], then [`ExperimentConfig::resolve`]
//! fills every environment-dependent default and checks cross-field
//! consistency. The resolved form is what gets echoed into output headers.

use std::fmt;
use std::path::Path;

use qpg_core::analysis::StateSampler;
use qpg_core::ansatz::Entangler;
use qpg_core::envs::{
    CartPole, CartPoleVersion, ContextualBandit, Environment, FeatureEncoder, FrozenLake, LakeRewards, RewardScheme,
    CARTPOLE_BOUNDS, STANDARD_4X4,
};
use qpg_core::qsim::parse_bits;
use qpg_core::rng;
use qpg_core::{EvalMode, Hyperparams, ModelConfig, Policy, PostProcessing, RawVqcPolicy, RestrictedSoftmaxPolicy, ThetaInit};
use serde::{Deserialize, Serialize};

/// A rejected configuration, with the offending field.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl fmt::Display) -> Self {
        Self {
            field: field.into(),
            message: message.to_string(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.field, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

type CfgResult<T> = std::result::Result<T, ConfigError>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    pub environment: EnvironmentConfig,
    pub model: ModelSection,
    #[serde(default)]
    pub policy: PolicySection,
    #[serde(default)]
    pub training: TrainingSection,
    #[serde(default)]
    pub analysis: AnalysisSection,
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EnvironmentConfig {
    Cartpole(CartPoleSection),
    Bandit(BanditSection),
    Frozenlake(LakeSection),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CartPoleSection {
    #[serde(default = "default_version")]
    pub version: String,
    /// Scaling bounds for (x, ẋ, φ, φ̇).
    #[serde(default = "default_bounds")]
    pub bounds: Vec<f64>,
}

fn default_version() -> String {
    "v0".into()
}

fn default_bounds() -> Vec<f64> {
    CARTPOLE_BOUNDS.to_vec()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BanditSection {
    pub states: usize,
    pub actions: usize,
    /// `blocks`, `random` or `explicit` (then `optimal` lists the map).
    #[serde(default = "default_map")]
    pub map: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimal: Option<Vec<usize>>,
    #[serde(default = "default_reward")]
    pub reward: String,
}

fn default_map() -> String {
    "blocks".into()
}

fn default_reward() -> String {
    "accuracy01".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LakeSection {
    /// Rows separated by `/` or newlines.
    #[serde(default = "default_lake")]
    pub map: String,
    #[serde(default)]
    pub slippery: bool,
    #[serde(default = "default_step_penalty")]
    pub step_penalty: f64,
    #[serde(default = "default_hole_penalty")]
    pub hole_penalty: f64,
    #[serde(default = "default_goal_reward")]
    pub goal_reward: f64,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
}

fn default_lake() -> String {
    STANDARD_4X4.replace('\n', "/")
}

fn default_step_penalty() -> f64 {
    LakeRewards::default().step_penalty
}

fn default_hole_penalty() -> f64 {
    LakeRewards::default().hole_penalty
}

fn default_goal_reward() -> f64 {
    LakeRewards::default().goal_reward
}

fn default_horizon() -> usize {
    FrozenLake::DEFAULT_HORIZON
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub qubits: usize,
    pub depth: usize,
    #[serde(default = "default_entangler")]
    pub entangler: String,
    #[serde(default = "yes")]
    pub hadamard: bool,
}

fn default_entangler() -> String {
    "cz".into()
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicySection {
    /// `raw` or `rsm`.
    #[serde(default = "default_kind")]
    pub kind: String,
    /// RAW only: `global`, `msb`, `parity:<q>` or `table:<path>`.
    #[serde(default = "default_postfn")]
    pub postfn: String,
    /// `exact` or `shots:<count>`.
    #[serde(default = "default_eval")]
    pub eval: String,
    /// RSM only.
    #[serde(default = "one")]
    pub beta: f64,
    #[serde(default)]
    pub weight_init: f64,
    /// RSM only: `all` or a bitstring (qubit n-1 first) selecting Z factors.
    #[serde(default = "default_observable")]
    pub observable: String,
}

impl Default for PolicySection {
    fn default() -> Self {
        Self {
            kind: default_kind(),
            postfn: default_postfn(),
            eval: default_eval(),
            beta: 1.0,
            weight_init: 0.0,
            observable: default_observable(),
        }
    }
}

fn default_kind() -> String {
    "raw".into()
}

fn default_postfn() -> String {
    "global".into()
}

fn default_eval() -> String {
    "exact".into()
}

fn default_observable() -> String {
    "all".into()
}

fn one() -> f64 {
    1.0
}

/// Unset fields take environment-dependent defaults in [`ExperimentConfig::resolve`].
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainingSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub episodes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub batch_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lr_theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lr_lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lr_weights: Option<f64>,
    /// `uniform` or `normal:<std>`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSection {
    /// `normal:<std>`, `uniform`, `uniform:<low>:<high>` or `enumerate`.
    #[serde(default = "default_states")]
    pub states: String,
    #[serde(default = "hundred")]
    pub param_sets: usize,
    #[serde(default = "hundred")]
    pub samples: usize,
    #[serde(default = "default_sizes")]
    pub data_sizes: Vec<u64>,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        Self {
            states: default_states(),
            param_sets: 100,
            samples: 100,
            data_sizes: default_sizes(),
        }
    }
}

fn default_states() -> String {
    "normal:0.5".into()
}

fn hundred() -> usize {
    100
}

fn default_sizes() -> Vec<u64> {
    vec![1_000, 10_000, 100_000, 1_000_000, 10_000_000]
}

/// A post-processing function named on the command line or in a config.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PostFnSpec {
    Global,
    Msb,
    Parity(usize),
    Table(String),
}

impl PostFnSpec {
    pub fn parse(s: &str) -> CfgResult<Self> {
        let s = s.trim();
        let lower = s.to_ascii_lowercase();
        match lower.as_str() {
            "global" | "global-recursive" => return Ok(PostFnSpec::Global),
            "msb" | "msb-local" => return Ok(PostFnSpec::Msb),
            _ => {}
        }
        if let Some(q) = lower.strip_prefix("parity:") {
            let q = q
                .parse()
                .map_err(|_| ConfigError::new("postfn", format!("bad parity width `{q}`")))?;
            return Ok(PostFnSpec::Parity(q));
        }
        if s.len() > 6 && lower.starts_with("table:") {
            return Ok(PostFnSpec::Table(s[6..].to_string()));
        }
        Err(ConfigError::new(
            "postfn",
            format!("unknown post-processing `{s}` (expected global, msb, parity:<q> or table:<path>)"),
        ))
    }

    /// Builds the function. Tables carry their own size; `n` and `m` are then
    /// only checked when given.
    pub fn build(&self, n: Option<usize>, m: Option<usize>) -> CfgResult<PostProcessing> {
        let need = |v: Option<usize>, what: &str| v.ok_or_else(|| ConfigError::new(what, "required for this postfn"));
        let f = match self {
            PostFnSpec::Global => PostProcessing::global_recursive(need(n, "qubits")?, need(m, "actions")?),
            PostFnSpec::Msb => PostProcessing::msb_local(need(n, "qubits")?),
            PostFnSpec::Parity(q) => PostProcessing::q_local_parity(need(n, "qubits")?, *q),
            PostFnSpec::Table(path) => {
                let file = std::fs::File::open(path).map_err(|e| ConfigError::new("postfn", format!("{path}: {e}")))?;
                PostProcessing::read_table(std::io::BufReader::new(file))
            }
        }
        .map_err(|e| ConfigError::new("postfn", e))?;
        if let Some(n) = n {
            if f.n_qubits() != n {
                return Err(ConfigError::new(
                    "postfn",
                    format!("{f} acts on {} qubits, expected {n}", f.n_qubits()),
                ));
            }
        }
        if let Some(m) = m {
            if f.num_actions() != m {
                return Err(ConfigError::new(
                    "postfn",
                    format!("{f} has {} actions but the environment has {m}", f.num_actions()),
                ));
            }
        }
        Ok(f)
    }
}

fn parse_eval(s: &str) -> CfgResult<EvalMode> {
    let lower = s.trim().to_ascii_lowercase();
    if lower == "exact" {
        return Ok(EvalMode::Exact);
    }
    match lower.strip_prefix("shots:").map(str::parse::<usize>) {
        Some(Ok(k)) if k > 0 => Ok(EvalMode::Shots(k)),
        _ => Err(ConfigError::new("policy.eval", format!("expected exact or shots:<positive count>, got `{s}`"))),
    }
}

fn parse_init(s: &str) -> CfgResult<ThetaInit> {
    let lower = s.trim().to_ascii_lowercase();
    if lower == "uniform" {
        return Ok(ThetaInit::Uniform);
    }
    match lower.strip_prefix("normal:").map(str::parse::<f64>) {
        Some(Ok(std)) if std > 0.0 && std.is_finite() => Ok(ThetaInit::Normal { std }),
        _ => Err(ConfigError::new("training.init", format!("expected uniform or normal:<std>, got `{s}`"))),
    }
}

fn parse_f64(field: &str, s: &str) -> CfgResult<f64> {
    s.parse()
        .map_err(|_| ConfigError::new(field, format!("`{s}` is not a number")))
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> CfgResult<Self> {
        let raw: Self = toml::from_str(text).map_err(|e| ConfigError::new("", e.message().trim()).with_span(text, e.span()))?;
        raw.resolve()
    }

    pub fn load(path: &Path) -> CfgResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::new("", format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Fills defaults and validates every field and cross-field constraint.
    pub fn resolve(mut self) -> CfgResult<Self> {
        if self.seeds.is_empty() {
            return Err(ConfigError::new("seeds", "at least one seed is required"));
        }
        let cartpole = matches!(self.environment, EnvironmentConfig::Cartpole(_));
        let base = if cartpole {
            Hyperparams::cartpole(1000)
        } else {
            Hyperparams::discrete(500, 1)
        };
        let t = &mut self.training;
        t.episodes.get_or_insert(base.episodes);
        t.batch_size.get_or_insert(base.batch_size);
        t.gamma.get_or_insert(base.gamma);
        t.lr_theta.get_or_insert(base.lr_theta);
        t.lr_lambda.get_or_insert(base.lr_lambda);
        t.lr_weights.get_or_insert(base.lr_weights);
        t.init.get_or_insert_with(|| if cartpole { "normal:0.1".into() } else { "uniform".into() });
        if let EnvironmentConfig::Bandit(b) = &mut self.environment {
            if b.optimal.is_some() {
                b.map = "explicit".into();
            }
        }
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> CfgResult<()> {
        let model = self.model_config()?;
        let env = self.environment()?;
        let encoder = self.encoder()?;
        if encoder.num_features() != model.n_qubits {
            return Err(ConfigError::new(
                "model.qubits",
                format!(
                    "the environment encodes {} features but the model has {} qubits",
                    encoder.num_features(),
                    model.n_qubits
                ),
            ));
        }
        let policy = self.policy()?;
        if policy.num_actions() != env.num_actions() {
            return Err(ConfigError::new(
                "policy",
                format!("policy has {} actions, environment has {}", policy.num_actions(), env.num_actions()),
            ));
        }
        self.hyperparams()?;
        self.theta_init()?;
        self.state_sampler()?;
        if self.analysis.param_sets == 0 {
            return Err(ConfigError::new("analysis.param_sets", "must be positive"));
        }
        if self.analysis.samples == 0 {
            return Err(ConfigError::new("analysis.samples", "must be positive"));
        }
        Ok(())
    }

    pub fn model_config(&self) -> CfgResult<ModelConfig> {
        let entangler: Entangler = self
            .model
            .entangler
            .parse()
            .map_err(|e| ConfigError::new("model.entangler", e))?;
        let model = ModelConfig::new(self.model.qubits, self.model.depth).map_err(|e| ConfigError::new("model", e))?;
        Ok(model.with_entangler(entangler).with_initial_hadamard(self.model.hadamard))
    }

    /// A fresh environment. Random bandit maps are drawn from the first seed.
    pub fn environment(&self) -> CfgResult<Box<dyn Environment>> {
        Ok(match &self.environment {
            EnvironmentConfig::Cartpole(c) => {
                let version: CartPoleVersion = c
                    .version
                    .parse()
                    .map_err(|e| ConfigError::new("environment.version", e))?;
                Box::new(CartPole::new(version))
            }
            EnvironmentConfig::Bandit(_) => Box::new(self.bandit()?.expect("bandit section")),
            EnvironmentConfig::Frozenlake(l) => {
                let rewards = LakeRewards {
                    step_penalty: l.step_penalty,
                    hole_penalty: l.hole_penalty,
                    goal_reward: l.goal_reward,
                };
                let map = l.map.replace('/', "\n");
                Box::new(
                    FrozenLake::new(&map, l.slippery, rewards, l.horizon)
                        .map_err(|e| ConfigError::new("environment", e))?,
                )
            }
        })
    }

    /// The bandit, when the environment is one.
    pub fn bandit(&self) -> CfgResult<Option<ContextualBandit>> {
        let EnvironmentConfig::Bandit(b) = &self.environment else {
            return Ok(None);
        };
        let scheme: RewardScheme = b
            .reward
            .parse()
            .map_err(|e| ConfigError::new("environment.reward", e))?;
        let err = |e| ConfigError::new("environment", e);
        let env = match (b.map.as_str(), &b.optimal) {
            ("explicit", Some(map)) => {
                if map.len() != b.states {
                    return Err(ConfigError::new(
                        "environment.optimal",
                        format!("{} entries for {} states", map.len(), b.states),
                    ));
                }
                ContextualBandit::new(map.clone(), b.actions, scheme).map_err(err)?
            }
            ("explicit", None) => return Err(ConfigError::new("environment.optimal", "required when map = \"explicit\"")),
            ("blocks", None) => ContextualBandit::blocks(b.states, b.actions, scheme).map_err(err)?,
            ("random", None) => {
                let mut r = rng::stream(self.seeds[0], 9);
                ContextualBandit::random_uniform(b.states, b.actions, scheme, &mut r).map_err(err)?
            }
            (_, Some(_)) => return Err(ConfigError::new("environment.optimal", "only allowed with map = \"explicit\"")),
            (other, None) => {
                return Err(ConfigError::new(
                    "environment.map",
                    format!("unknown map `{other}` (expected blocks, random or explicit)"),
                ))
            }
        };
        Ok(Some(env))
    }

    pub fn encoder(&self) -> CfgResult<FeatureEncoder> {
        match &self.environment {
            EnvironmentConfig::Cartpole(c) => {
                if c.bounds.len() != 4 || c.bounds.iter().any(|b| !(*b > 0.0 && b.is_finite())) {
                    return Err(ConfigError::new("environment.bounds", "expected four positive finite bounds"));
                }
                Ok(FeatureEncoder::Continuous { bounds: c.bounds.clone() })
            }
            _ => {
                let space = self.environment()?.state_space();
                FeatureEncoder::for_space(space, self.model.qubits).map_err(|e| ConfigError::new("model.qubits", e))
            }
        }
    }

    pub fn policy(&self) -> CfgResult<Box<dyn Policy>> {
        let model = self.model_config()?;
        let actions = self.environment()?.num_actions();
        let p = &self.policy;
        match p.kind.to_ascii_lowercase().as_str() {
            "raw" => {
                let f = PostFnSpec::parse(&p.postfn)?.build(Some(model.n_qubits), Some(actions))?;
                let mode = parse_eval(&p.eval)?;
                Ok(Box::new(RawVqcPolicy::new(model, f, mode).map_err(|e| ConfigError::new("policy", e))?))
            }
            "rsm" => {
                let n = model.n_qubits;
                let mask = if p.observable.eq_ignore_ascii_case("all") {
                    (1usize << n) - 1
                } else {
                    let (mask, len) = parse_bits(&p.observable).map_err(|e| ConfigError::new("policy.observable", e))?;
                    if len != n {
                        return Err(ConfigError::new(
                            "policy.observable",
                            format!("{len} bits for a {n}-qubit model"),
                        ));
                    }
                    mask
                };
                if !p.beta.is_finite() {
                    return Err(ConfigError::new("policy.beta", "must be finite"));
                }
                if !p.weight_init.is_finite() {
                    return Err(ConfigError::new("policy.weight_init", "must be finite"));
                }
                let policy = RestrictedSoftmaxPolicy::new(model, mask, p.beta, actions)
                    .map_err(|e| ConfigError::new("policy", e))?
                    .with_weight_init(p.weight_init);
                Ok(Box::new(policy))
            }
            other => Err(ConfigError::new("policy.kind", format!("unknown kind `{other}` (expected raw or rsm)"))),
        }
    }

    pub fn hyperparams(&self) -> CfgResult<Hyperparams> {
        let t = &self.training;
        let h = Hyperparams {
            lr_theta: t.lr_theta.unwrap_or_default(),
            lr_lambda: t.lr_lambda.unwrap_or_default(),
            lr_weights: t.lr_weights.unwrap_or_default(),
            gamma: t.gamma.unwrap_or_default(),
            batch_size: t.batch_size.unwrap_or_default(),
            episodes: t.episodes.unwrap_or_default(),
        };
        h.validate().map_err(|e| ConfigError::new("training", e))?;
        Ok(h)
    }

    pub fn theta_init(&self) -> CfgResult<ThetaInit> {
        parse_init(self.training.init.as_deref().unwrap_or("uniform"))
    }

    pub fn state_sampler(&self) -> CfgResult<StateSampler> {
        let field = "analysis.states";
        let s = self.analysis.states.trim().to_ascii_lowercase();
        if s == "uniform" {
            return Ok(StateSampler::uniform_angles());
        }
        if s == "enumerate" {
            let Some(env) = self.bandit()? else {
                let space = self.environment()?.state_space();
                let qpg_core::envs::StateSpace::Discrete { count } = space else {
                    return Err(ConfigError::new(field, "enumerate needs a discrete environment"));
                };
                return StateSampler::enumerate(&self.encoder()?, count).map_err(|e| ConfigError::new(field, e));
            };
            return StateSampler::enumerate(&self.encoder()?, env.num_states()).map_err(|e| ConfigError::new(field, e));
        }
        if let Some(std) = s.strip_prefix("normal:") {
            let std = parse_f64(field, std)?;
            if !(std > 0.0 && std.is_finite()) {
                return Err(ConfigError::new(field, "normal std must be positive"));
            }
            return Ok(StateSampler::Normal { std });
        }
        if let Some(range) = s.strip_prefix("uniform:") {
            let (lo, hi) = range
                .split_once(':')
                .ok_or_else(|| ConfigError::new(field, "expected uniform:<low>:<high>"))?;
            let (low, high) = (parse_f64(field, lo)?, parse_f64(field, hi)?);
            if !(low < high && low.is_finite() && high.is_finite()) {
                return Err(ConfigError::new(field, format!("empty range [{low}, {high})")));
            }
            return Ok(StateSampler::Uniform { low, high });
        }
        Err(ConfigError::new(
            field,
            format!("unknown sampler `{s}` (expected normal:<std>, uniform, uniform:<low>:<high> or enumerate)"),
        ))
    }

    /// Resolved configuration as TOML.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// The resolved configuration as `# `-prefixed lines.
    pub fn header(&self) -> String {
        comment_block(&self.to_toml())
    }
}

/// Prefixes every line with `# `.
pub fn comment_block(text: &str) -> String {
    text.lines()
        .map(|l| if l.is_empty() { "#\n".to_string() } else { format!("# {l}\n") })
        .collect()
}

impl ConfigError {
    fn with_span(mut self, text: &str, span: Option<std::ops::Range<usize>>) -> Self {
        if let Some(span) = span {
            let line = text[..span.start.min(text.len())].matches('\n').count() + 1;
            self.field = format!("line {line}");
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CARTPOLE: &str = r#"
seeds = [1, 2]

[environment]
kind = "cartpole"

[model]
qubits = 4
depth = 1
"#;

    #[test]
    fn cartpole_defaults() {
        let c = ExperimentConfig::from_toml_str(CARTPOLE).unwrap();
        let h = c.hyperparams().unwrap();
        assert_eq!(h, Hyperparams::cartpole(1000));
        assert_eq!(c.theta_init().unwrap(), ThetaInit::Normal { std: 0.1 });
        assert_eq!(c.policy().unwrap().num_actions(), 2);
        assert_eq!(c.encoder().unwrap(), FeatureEncoder::cartpole());
    }

    #[test]
    fn resolved_config_round_trips() {
        let c = ExperimentConfig::from_toml_str(CARTPOLE).unwrap();
        let again = ExperimentConfig::from_toml_str(&c.to_toml()).unwrap();
        assert_eq!(c, again);
        assert!(c.header().lines().all(|l| l.starts_with('#')));
    }

    #[test]
    fn rejects_action_mismatch() {
        let text = r#"
[environment]
kind = "bandit"
states = 8
actions = 4

[model]
qubits = 3
depth = 1

[policy]
postfn = "msb"
"#;
        let e = ExperimentConfig::from_toml_str(text).unwrap_err();
        assert_eq!(e.field, "postfn");
    }

    #[test]
    fn rejects_width_mismatch() {
        let e = ExperimentConfig::from_toml_str(&CARTPOLE.replace("qubits = 4", "qubits = 3")).unwrap_err();
        assert_eq!(e.field, "model.qubits");
    }

    #[test]
    fn rejects_unknown_keys() {
        let e = ExperimentConfig::from_toml_str(&CARTPOLE.replace("depth = 1", "depth = 1\nwidth = 2")).unwrap_err();
        assert!(e.message.contains("width"), "{e}");
    }

    #[test]
    fn bandit_and_lake() {
        let bandit = r#"
[environment]
kind = "bandit"
states = 4
actions = 2
optimal = [0, 1, 1, 0]
reward = "pm1"

[model]
qubits = 2
depth = 1

[policy]
kind = "rsm"
beta = 2.0
"#;
        let c = ExperimentConfig::from_toml_str(bandit).unwrap();
        assert_eq!(c.bandit().unwrap().unwrap().optimal_map(), &[0, 1, 1, 0]);
        assert_eq!(c.theta_init().unwrap(), ThetaInit::Uniform);
        assert_eq!(c.hyperparams().unwrap().lr_theta, 0.1);

        let lake = r#"
[environment]
kind = "frozenlake"

[model]
qubits = 4
depth = 2

[policy]
postfn = "global"
"#;
        let c = ExperimentConfig::from_toml_str(lake).unwrap();
        assert_eq!(c.environment().unwrap().num_actions(), 4);
        assert!(matches!(c.state_sampler().unwrap(), StateSampler::Normal { .. }));
    }

    #[test]
    fn postfn_specs() {
        assert_eq!(PostFnSpec::parse("parity:2").unwrap(), PostFnSpec::Parity(2));
        assert_eq!(PostFnSpec::parse("table:a/B.txt").unwrap(), PostFnSpec::Table("a/B.txt".into()));
        assert!(PostFnSpec::parse("nope").is_err());
        assert!(PostFnSpec::Global.build(Some(3), None).is_err());
    }
}
