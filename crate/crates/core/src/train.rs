//! REINFORCE with Adam/AMSGrad updates.

use std::io::Write;

use rand::RngCore;
use rayon::prelude::*;

use crate::envs::{Environment, FeatureEncoder};
use crate::error::{Error, Result};
use crate::io::fmt_f64;
use crate::policy::{ParamBlock, Policy, ThetaInit};
use crate::rng;

/// Width of the trailing window in learning-curve logs.
pub const AVG_WINDOW: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hyperparams {
    pub lr_theta: f64,
    pub lr_lambda: f64,
    pub lr_weights: f64,
    pub gamma: f64,
    /// Trajectories per update.
    pub batch_size: usize,
    pub episodes: usize,
}

impl Hyperparams {
    /// Rates used for CartPole.
    pub fn cartpole(episodes: usize) -> Self {
        Self {
            lr_theta: 0.01,
            lr_lambda: 0.1,
            lr_weights: 0.1,
            gamma: 0.99,
            batch_size: 1,
            episodes,
        }
    }

    /// Rates used for the discrete environments: 0.1 everywhere.
    pub fn discrete(episodes: usize, batch_size: usize) -> Self {
        Self {
            lr_theta: 0.1,
            lr_lambda: 0.1,
            lr_weights: 0.1,
            gamma: 0.99,
            batch_size,
            episodes,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::Hyperparam(format!("gamma {} outside [0, 1]", self.gamma)));
        }
        for (name, lr) in [("lr_theta", self.lr_theta), ("lr_lambda", self.lr_lambda), ("lr_weights", self.lr_weights)] {
            if !(lr >= 0.0 && lr.is_finite()) {
                return Err(Error::Hyperparam(format!("{name} must be a finite non-negative number, got {lr}")));
            }
        }
        if self.batch_size == 0 {
            return Err(Error::Hyperparam("batch_size must be positive".into()));
        }
        Ok(())
    }

    fn rate(&self, block: ParamBlock) -> f64 {
        match block {
            ParamBlock::Theta => self.lr_theta,
            ParamBlock::Lambda => self.lr_lambda,
            ParamBlock::Weights => self.lr_weights,
        }
    }

    /// Per-coordinate learning rates following the policy's block layout.
    pub fn rates_for(&self, policy: &dyn Policy) -> Vec<f64> {
        policy
            .blocks()
            .into_iter()
            .flat_map(|(b, n)| std::iter::repeat_n(self.rate(b), n))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Transition {
    pub features: Vec<f64>,
    pub action: usize,
    pub reward: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trajectory {
    pub steps: Vec<Transition>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn total_reward(&self) -> f64 {
        self.steps.iter().map(|s| s.reward).sum()
    }

    pub fn rewards(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.reward).collect()
    }
}

/// `G_t = r_t + γ·G_{t+1}`.
pub fn discounted_returns(rewards: &[f64], gamma: f64) -> Result<Vec<f64>> {
    if rewards.is_empty() {
        return Err(Error::Empty("reward sequence"));
    }
    let mut out = vec![0.0; rewards.len()];
    let mut acc = 0.0;
    for (t, r) in rewards.iter().enumerate().rev() {
        acc = r + gamma * acc;
        out[t] = acc;
    }
    Ok(out)
}

/// Plays one episode under `params`.
pub fn run_episode(
    env: &mut dyn Environment,
    encoder: &FeatureEncoder,
    policy: &dyn Policy,
    params: &[f64],
    rng: &mut dyn RngCore,
) -> Result<Trajectory> {
    let mut obs = env.reset(rng);
    let mut traj = Trajectory::default();
    for _ in 0..env.horizon() {
        let features = encoder.encode(&obs)?;
        let action = policy.sample_action(&features, params, rng)?;
        let step = env.step(action, rng)?;
        traj.steps.push(Transition {
            features,
            action,
            reward: step.reward,
        });
        obs = step.observation;
        if step.done {
            break;
        }
    }
    Ok(traj)
}

pub fn collect_batch(
    env: &mut dyn Environment,
    encoder: &FeatureEncoder,
    policy: &dyn Policy,
    params: &[f64],
    batch_size: usize,
    rng: &mut dyn RngCore,
) -> Result<Vec<Trajectory>> {
    (0..batch_size).map(|_| run_episode(env, encoder, policy, params, rng)).collect()
}

/// `(1/B) Σ_τ Σ_t ∇ln π(a_t|s_t)·G_t`, an ascent direction.
///
/// Steps are evaluated in parallel, each with its own rng stream derived from
/// one draw of `rng`; the sum is taken in trajectory order.
pub fn reinforce_gradient(
    batch: &[Trajectory],
    policy: &dyn Policy,
    params: &[f64],
    gamma: f64,
    rng: &mut dyn RngCore,
) -> Result<Vec<f64>> {
    if batch.is_empty() {
        return Err(Error::Empty("trajectory batch"));
    }
    let base = rng.next_u64();
    let mut jobs = Vec::new();
    for traj in batch {
        if traj.is_empty() {
            continue;
        }
        let returns = discounted_returns(&traj.rewards(), gamma)?;
        for (step, g) in traj.steps.iter().zip(returns) {
            jobs.push((step, g));
        }
    }
    let terms = jobs
        .par_iter()
        .enumerate()
        .map(|(i, (step, g))| {
            if *g == 0.0 {
                return Ok(None);
            }
            let mut r = rng::stream(base, i as u64);
            let grad = policy.log_prob_grad(&step.features, step.action, params, &mut r)?;
            Ok(Some(grad.into_iter().map(|x| x * g).collect::<Vec<f64>>()))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut total = vec![0.0; params.len()];
    for term in terms.into_iter().flatten() {
        total.iter_mut().zip(&term).for_each(|(t, x)| *t += x);
    }
    let b = batch.len() as f64;
    total.iter_mut().for_each(|t| *t /= b);
    Ok(total)
}

/// `(1/B) Σ_τ Σ_t ln π(a_t|s_t)·G_t` with the trajectories held fixed.
pub fn surrogate_objective(batch: &[Trajectory], policy: &dyn Policy, params: &[f64], gamma: f64) -> Result<f64> {
    if batch.is_empty() {
        return Err(Error::Empty("trajectory batch"));
    }
    let mut total = 0.0;
    for traj in batch.iter().filter(|t| !t.is_empty()) {
        let returns = discounted_returns(&traj.rewards(), gamma)?;
        for (step, g) in traj.steps.iter().zip(returns) {
            total += policy.exact_action_probs(&step.features, params)?[step.action].ln() * g;
        }
    }
    Ok(total / batch.len() as f64)
}

/// Adam with the AMSGrad running maximum of the second moment.
#[derive(Clone, Debug, PartialEq)]
pub struct AdamAmsgrad {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    v_max: Vec<f64>,
    t: u64,
}

impl AdamAmsgrad {
    pub fn new(len: usize) -> Self {
        Self {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            m: vec![0.0; len],
            v: vec![0.0; len],
            v_max: vec![0.0; len],
            t: 0,
        }
    }

    pub fn steps(&self) -> u64 {
        self.t
    }

    pub fn max_second_moment(&self) -> &[f64] {
        &self.v_max
    }

    /// Moves `params` along `grad` (ascent), coordinate `i` at rate `rates[i]`.
    pub fn step(&mut self, params: &mut [f64], grad: &[f64], rates: &[f64]) -> Result<()> {
        let n = self.m.len();
        for (what, got) in [("parameters", params.len()), ("gradient", grad.len()), ("learning rates", rates.len())] {
            if got != n {
                return Err(Error::Dimension { what, expected: n, got });
            }
        }
        self.t += 1;
        let bc1 = 1.0 - self.beta1.powi(self.t as i32);
        let bc2 = 1.0 - self.beta2.powi(self.t as i32);
        for i in 0..n {
            let g = grad[i];
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g;
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g * g;
            self.v_max[i] = self.v_max[i].max(self.v[i]);
            let denom = self.v_max[i].sqrt() / bc2.sqrt() + self.eps;
            params[i] += rates[i] / bc1 * self.m[i] / denom;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvePoint {
    /// 1-based.
    pub episode: usize,
    pub reward: f64,
    /// Mean reward of the last (up to) 20 episodes.
    pub avg20: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainOutcome {
    pub curve: Vec<CurvePoint>,
    pub params: Vec<f64>,
}

/// Trailing means over `window` entries (fewer at the start).
pub fn trailing_mean(values: &[f64], window: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut sum = 0.0;
    for i in 0..values.len() {
        sum += values[i];
        if i >= window {
            sum -= values[i - window];
        }
        out.push(sum / (i + 1).min(window) as f64);
    }
    out
}

pub fn train_run(
    env: &mut dyn Environment,
    encoder: &FeatureEncoder,
    policy: &dyn Policy,
    hyper: &Hyperparams,
    init: ThetaInit,
    seed: u64,
) -> Result<TrainOutcome> {
    train_run_observed(env, encoder, policy, hyper, init, seed, &mut |_, _| Ok(()))
}

/// Like [`train_run`]; `observer(episodes_done, params)` runs after every
/// episode with the parameters the next episode will use.
pub fn train_run_observed(
    env: &mut dyn Environment,
    encoder: &FeatureEncoder,
    policy: &dyn Policy,
    hyper: &Hyperparams,
    init: ThetaInit,
    seed: u64,
    observer: &mut dyn FnMut(usize, &[f64]) -> Result<()>,
) -> Result<TrainOutcome> {
    hyper.validate()?;
    if encoder.num_features() != policy.num_features() {
        return Err(Error::Dimension {
            what: "encoder output vs policy features",
            expected: policy.num_features(),
            got: encoder.num_features(),
        });
    }
    if env.num_actions() != policy.num_actions() {
        return Err(Error::Dimension {
            what: "environment actions vs policy actions",
            expected: policy.num_actions(),
            got: env.num_actions(),
        });
    }
    let mut init_rng = rng::stream(seed, 0);
    let mut rollout_rng = rng::stream(seed, 1);
    let mut grad_rng = rng::stream(seed, 2);
    let mut params = policy.init_params(init, &mut init_rng);
    let rates = hyper.rates_for(policy);
    let mut opt = AdamAmsgrad::new(params.len());
    let mut rewards = Vec::with_capacity(hyper.episodes);
    let mut batch = Vec::with_capacity(hyper.batch_size);
    for episode in 0..hyper.episodes {
        let traj = run_episode(env, encoder, policy, &params, &mut rollout_rng)?;
        rewards.push(traj.total_reward());
        batch.push(traj);
        if batch.len() == hyper.batch_size {
            let grad = reinforce_gradient(&batch, policy, &params, hyper.gamma, &mut grad_rng)?;
            opt.step(&mut params, &grad, &rates)?;
            batch.clear();
        }
        observer(episode + 1, &params)?;
    }
    let avg = trailing_mean(&rewards, AVG_WINDOW);
    let curve = rewards
        .iter()
        .zip(avg)
        .enumerate()
        .map(|(i, (&reward, avg20))| CurvePoint {
            episode: i + 1,
            reward,
            avg20,
        })
        .collect();
    Ok(TrainOutcome { curve, params })
}

/// Area under the avg20 curve (sum over episodes).
pub fn curve_area(curve: &[CurvePoint]) -> f64 {
    curve.iter().map(|p| p.avg20).sum()
}

/// First episode whose avg20 reaches `threshold`.
pub fn first_reaching(curve: &[CurvePoint], threshold: f64) -> Option<usize> {
    curve.iter().find(|p| p.avg20 >= threshold).map(|p| p.episode)
}

pub fn write_curve_csv<W: Write>(out: &mut W, curve: &[CurvePoint]) -> std::io::Result<()> {
    writeln!(out, "episode,reward,avg20")?;
    for p in curve {
        writeln!(out, "{},{},{}", p.episode, fmt_f64(p.reward), fmt_f64(p.avg20))?;
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AggregatePoint {
    pub episode: usize,
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
}

/// Mean and spread of avg20 across runs, episode by episode.
pub fn aggregate_curves(curves: &[Vec<CurvePoint>]) -> Result<Vec<AggregatePoint>> {
    let first = curves.first().ok_or(Error::Empty("learning curves"))?;
    if let Some(c) = curves.iter().find(|c| c.len() != first.len()) {
        return Err(Error::Dimension {
            what: "learning curve length",
            expected: first.len(),
            got: c.len(),
        });
    }
    let k = curves.len() as f64;
    Ok((0..first.len())
        .map(|i| {
            let mean = curves.iter().map(|c| c[i].avg20).sum::<f64>() / k;
            let var = curves.iter().map(|c| (c[i].avg20 - mean).powi(2)).sum::<f64>() / k;
            AggregatePoint {
                episode: first[i].episode,
                mean,
                std: var.sqrt(),
            }
        })
        .collect())
}

pub fn write_aggregate_csv<W: Write>(out: &mut W, points: &[AggregatePoint]) -> std::io::Result<()> {
    writeln!(out, "episode,mean,std")?;
    for p in points {
        writeln!(out, "{},{},{}", p.episode, fmt_f64(p.mean), fmt_f64(p.std))?;
    }
    Ok(())
}
