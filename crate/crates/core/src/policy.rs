//! Policies built on the variational circuit.
//!
//! [`RawVqcPolicy`] reads the action straight off a computational-basis
//! measurement through a [`PostProcessing`] map, so `π(a|s)` is the total
//! probability of the bitstrings decoding to `a`. [`RestrictedSoftmaxPolicy`]
//! measures one Pauli-Z string `O` and applies a softmax over `β·w_a·⟨O⟩`.
//!
//! Both implement [`Policy`] over a flat parameter vector laid out as
//! θ block, λ block, then (softmax only) the weight block.

use rand::{Rng, RngCore};
use rayon::prelude::*;

use crate::ansatz::{shift_plan, Circuit, ModelConfig, ParamSet};
use crate::decode::PostProcessing;
use crate::error::{Error, Result};
use crate::qsim::BasisSampler;

/// Lower clamp of `π(a|s)` in the log-gradient denominator.
pub const PROB_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalMode {
    /// Exact statevector probabilities.
    Exact,
    /// Estimates from this many measurement shots.
    Shots(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamBlock {
    Theta,
    Lambda,
    Weights,
}

/// How to draw the variational angles of a fresh parameter vector.
/// Scaling factors always start at 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ThetaInit {
    /// Uniform on (-π, π].
    Uniform,
    /// `N(0, std)`.
    Normal { std: f64 },
}

pub trait Policy: Send + Sync {
    fn num_actions(&self) -> usize;

    /// Length of the feature vector the policy consumes.
    fn num_features(&self) -> usize;

    /// Block sizes in flat-vector order.
    fn blocks(&self) -> Vec<(ParamBlock, usize)>;

    fn num_params(&self) -> usize {
        self.blocks().iter().map(|(_, n)| n).sum()
    }

    fn init_params(&self, init: ThetaInit, rng: &mut dyn RngCore) -> Vec<f64>;

    /// `π(·|s)`.
    fn action_probs(&self, features: &[f64], params: &[f64], rng: &mut dyn RngCore) -> Result<Vec<f64>>;

    fn sample_action(&self, features: &[f64], params: &[f64], rng: &mut dyn RngCore) -> Result<usize>;

    /// `∇_Θ ln π(a|s)` in flat parameter order.
    fn log_prob_grad(&self, features: &[f64], action: usize, params: &[f64], rng: &mut dyn RngCore) -> Result<Vec<f64>>;

    /// `π(·|s)` without sampling noise.
    fn exact_action_probs(&self, features: &[f64], params: &[f64]) -> Result<Vec<f64>>;
}

fn check_len(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::Dimension { what, expected, got });
    }
    Ok(())
}

fn check_action(action: usize, num_actions: usize) -> Result<()> {
    if action >= num_actions {
        return Err(Error::InvalidAction { action, num_actions });
    }
    Ok(())
}

fn init_theta(config: &ModelConfig, init: ThetaInit, rng: &mut dyn RngCore) -> ParamSet {
    match init {
        ThetaInit::Uniform => ParamSet::init_uniform(config, rng),
        ThetaInit::Normal { std } => ParamSet::init_normal(config, std, rng),
    }
}

/// Policy reading actions from measured bitstrings.
#[derive(Clone, Debug)]
pub struct RawVqcPolicy {
    circuit: Circuit,
    postfn: PostProcessing,
    mode: EvalMode,
}

impl RawVqcPolicy {
    pub fn new(model: ModelConfig, postfn: PostProcessing, mode: EvalMode) -> Result<Self> {
        if postfn.n_qubits() != model.n_qubits {
            return Err(Error::Dimension {
                what: "post-processing register width",
                expected: model.n_qubits,
                got: postfn.n_qubits(),
            });
        }
        if let EvalMode::Shots(0) = mode {
            return Err(Error::ZeroShots);
        }
        Ok(Self {
            circuit: Circuit::build(&model)?,
            postfn,
            mode,
        })
    }

    pub fn model(&self) -> &ModelConfig {
        self.circuit.config()
    }

    pub fn postfn(&self) -> &PostProcessing {
        &self.postfn
    }

    pub fn mode(&self) -> EvalMode {
        self.mode
    }

    fn split(&self, params: &[f64]) -> Result<ParamSet> {
        ParamSet::from_flat(self.circuit.config(), params)
    }

    fn aggregate(&self, basis_probs: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.postfn.num_actions()];
        for (b, p) in basis_probs.iter().enumerate() {
            out[self.postfn.decode_unchecked(b)] += p;
        }
        out
    }

    fn shot_estimate(&self, params: &ParamSet, features: &[f64], shots: usize, rng: &mut dyn RngCore) -> Result<Vec<f64>> {
        let state = self.circuit.prepare(params, features)?;
        let mut counts = vec![0usize; self.postfn.num_actions()];
        for b in state.sample_bitstrings(shots, rng)? {
            counts[self.postfn.decode_unchecked(b)] += 1;
        }
        Ok(counts.into_iter().map(|c| c as f64 / shots as f64).collect())
    }

    fn probs_for(&self, params: &ParamSet, features: &[f64], rng: &mut dyn RngCore) -> Result<Vec<f64>> {
        match self.mode {
            EvalMode::Exact => Ok(self.aggregate(&self.circuit.prepare(params, features)?.probabilities())),
            EvalMode::Shots(k) => self.shot_estimate(params, features, k, rng),
        }
    }

    /// `∂π(a|s)/∂Θ_k` for every action (outer index k), exact.
    pub fn action_prob_jacobian(&self, features: &[f64], params: &[f64]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        let p = self.split(params)?;
        let (probs, jac) = self.circuit.probability_jacobian(&p, features)?;
        Ok((self.aggregate(&probs), jac.iter().map(|row| self.aggregate(row)).collect()))
    }
}

impl Policy for RawVqcPolicy {
    fn num_actions(&self) -> usize {
        self.postfn.num_actions()
    }

    fn num_features(&self) -> usize {
        self.circuit.config().n_qubits
    }

    fn blocks(&self) -> Vec<(ParamBlock, usize)> {
        let c = self.circuit.config();
        vec![(ParamBlock::Theta, c.num_theta()), (ParamBlock::Lambda, c.num_lambda())]
    }

    fn init_params(&self, init: ThetaInit, rng: &mut dyn RngCore) -> Vec<f64> {
        init_theta(self.circuit.config(), init, rng).to_flat()
    }

    fn action_probs(&self, features: &[f64], params: &[f64], rng: &mut dyn RngCore) -> Result<Vec<f64>> {
        self.probs_for(&self.split(params)?, features, rng)
    }

    fn exact_action_probs(&self, features: &[f64], params: &[f64]) -> Result<Vec<f64>> {
        let p = self.split(params)?;
        Ok(self.aggregate(&self.circuit.prepare(&p, features)?.probabilities()))
    }

    fn sample_action(&self, features: &[f64], params: &[f64], rng: &mut dyn RngCore) -> Result<usize> {
        let p = self.split(params)?;
        match self.mode {
            EvalMode::Exact => {
                let probs = self.aggregate(&self.circuit.prepare(&p, features)?.probabilities());
                Ok(BasisSampler::new(&probs).draw(rng))
            }
            EvalMode::Shots(_) => {
                let state = self.circuit.prepare(&p, features)?;
                let b = state.sample_bitstrings(1, rng)?[0];
                Ok(self.postfn.decode_unchecked(b))
            }
        }
    }

    fn log_prob_grad(&self, features: &[f64], action: usize, params: &[f64], rng: &mut dyn RngCore) -> Result<Vec<f64>> {
        check_action(action, self.num_actions())?;
        let p = self.split(params)?;
        let config = self.circuit.config();
        match self.mode {
            EvalMode::Exact => {
                let (probs, jac) = self.action_prob_jacobian(features, params)?;
                if probs[action] <= 0.0 {
                    return Err(Error::ZeroProbability { action });
                }
                let denom = probs[action].max(PROB_FLOOR);
                Ok(jac.iter().map(|row| row[action] / denom).collect())
            }
            EvalMode::Shots(k) => {
                let denom = self.shot_estimate(&p, features, k, rng)?[action].max(PROB_FLOOR);
                let mut grad = Vec::with_capacity(p.len());
                for idx in 0..p.len() {
                    let plan = shift_plan(config, &p, features, idx)?;
                    let d = plan.evaluate(|v| Ok(vec![self.shot_estimate(v, features, k, rng)?[action]]))?;
                    grad.push(d[0] / denom);
                }
                Ok(grad)
            }
        }
    }
}

/// Softmax over `β·w_a·⟨O⟩` with a single Pauli-Z string observable.
#[derive(Clone, Debug)]
pub struct RestrictedSoftmaxPolicy {
    circuit: Circuit,
    z_mask: usize,
    beta: f64,
    num_actions: usize,
    weight_init: f64,
}

impl RestrictedSoftmaxPolicy {
    /// Observable `Z` on every qubit whose bit is set in `z_mask` (identity elsewhere).
    pub fn new(model: ModelConfig, z_mask: usize, beta: f64, num_actions: usize) -> Result<Self> {
        if num_actions == 0 {
            return Err(Error::InvalidPostProcessing("softmax policy needs at least one action".into()));
        }
        if z_mask >> model.n_qubits != 0 {
            return Err(Error::QubitIndex {
                index: usize::BITS as usize - 1 - z_mask.leading_zeros() as usize,
                n_qubits: model.n_qubits,
            });
        }
        Ok(Self {
            circuit: Circuit::build(&model)?,
            z_mask,
            beta,
            num_actions,
            weight_init: 0.0,
        })
    }

    /// Observable `Z^{⊗n}`.
    pub fn full_parity(model: ModelConfig, beta: f64, num_actions: usize) -> Result<Self> {
        let mask = (1usize << model.n_qubits) - 1;
        Self::new(model, mask, beta, num_actions)
    }

    /// Constant every weight starts at.
    pub fn with_weight_init(mut self, w: f64) -> Self {
        self.weight_init = w;
        self
    }

    pub fn model(&self) -> &ModelConfig {
        self.circuit.config()
    }

    pub fn z_mask(&self) -> usize {
        self.z_mask
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    fn split<'a>(&self, params: &'a [f64]) -> Result<(ParamSet, &'a [f64])> {
        let nc = self.circuit.config().num_params();
        check_len("softmax parameter vector", nc + self.num_actions, params.len())?;
        Ok((ParamSet::from_flat(self.circuit.config(), &params[..nc])?, &params[nc..]))
    }

    /// `⟨O⟩_{s,Θ}`.
    pub fn expectation(&self, features: &[f64], params: &ParamSet) -> Result<f64> {
        Ok(self.circuit.prepare(params, features)?.expectation_z_mask(self.z_mask))
    }

    fn softmax(&self, expectation: f64, weights: &[f64]) -> Vec<f64> {
        let logits: Vec<f64> = weights.iter().map(|w| self.beta * w * expectation).collect();
        let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
        let z: f64 = exps.iter().sum();
        exps.into_iter().map(|e| e / z).collect()
    }
}

impl Policy for RestrictedSoftmaxPolicy {
    fn num_actions(&self) -> usize {
        self.num_actions
    }

    fn num_features(&self) -> usize {
        self.circuit.config().n_qubits
    }

    fn blocks(&self) -> Vec<(ParamBlock, usize)> {
        let c = self.circuit.config();
        vec![
            (ParamBlock::Theta, c.num_theta()),
            (ParamBlock::Lambda, c.num_lambda()),
            (ParamBlock::Weights, self.num_actions),
        ]
    }

    fn init_params(&self, init: ThetaInit, rng: &mut dyn RngCore) -> Vec<f64> {
        let mut flat = init_theta(self.circuit.config(), init, rng).to_flat();
        flat.extend(std::iter::repeat_n(self.weight_init, self.num_actions));
        flat
    }

    fn action_probs(&self, features: &[f64], params: &[f64], _rng: &mut dyn RngCore) -> Result<Vec<f64>> {
        self.exact_action_probs(features, params)
    }

    fn exact_action_probs(&self, features: &[f64], params: &[f64]) -> Result<Vec<f64>> {
        let (p, w) = self.split(params)?;
        Ok(self.softmax(self.expectation(features, &p)?, w))
    }

    fn sample_action(&self, features: &[f64], params: &[f64], rng: &mut dyn RngCore) -> Result<usize> {
        let probs = self.exact_action_probs(features, params)?;
        Ok(BasisSampler::new(&probs).draw(rng))
    }

    /// θ/λ block: `β·∇⟨O⟩·(w_a − Σ_a' π(a')w_a')`; weight block: `β·⟨O⟩·(δ_{a,x} − π(x))`.
    fn log_prob_grad(&self, features: &[f64], action: usize, params: &[f64], _rng: &mut dyn RngCore) -> Result<Vec<f64>> {
        check_action(action, self.num_actions)?;
        let (p, w) = self.split(params)?;
        let config = self.circuit.config();
        let expectation = self.expectation(features, &p)?;
        let probs = self.softmax(expectation, w);
        let mean_w: f64 = probs.iter().zip(w).map(|(pi, wi)| pi * wi).sum();
        let bracket = self.beta * (w[action] - mean_w);
        let mut grad = if bracket == 0.0 {
            vec![0.0; p.len()]
        } else {
            (0..p.len())
                .into_par_iter()
                .map(|idx| {
                    let plan = shift_plan(config, &p, features, idx)?;
                    let d = plan.evaluate(|v| Ok(vec![self.expectation(features, v)?]))?;
                    Ok(bracket * d[0])
                })
                .collect::<Result<Vec<_>>>()?
        };
        for (x, px) in probs.iter().enumerate() {
            let delta = if x == action { 1.0 } else { 0.0 };
            grad.push(self.beta * expectation * (delta - px));
        }
        Ok(grad)
    }
}

/// `((-1)^a ⟨Z^{mask}⟩ + 1) / 2`, the two-action policy of a Pauli-Z string.
pub fn z_string_policy(expectation: f64, action: usize) -> f64 {
    let sign = if action.is_multiple_of(2) { 1.0 } else { -1.0 };
    (sign * expectation + 1.0) / 2.0
}

/// Draws `trials` actions and returns the empirical action frequencies.
pub fn empirical_action_law(
    policy: &dyn Policy,
    features: &[f64],
    params: &[f64],
    trials: usize,
    rng: &mut dyn RngCore,
) -> Result<Vec<f64>> {
    let mut counts = vec![0usize; policy.num_actions()];
    for _ in 0..trials {
        counts[policy.sample_action(features, params, rng)?] += 1;
    }
    Ok(counts.into_iter().map(|c| c as f64 / trials as f64).collect())
}

/// Random features uniform on `[-range, range)`.
pub fn random_features<R: Rng + ?Sized>(n: usize, range: f64, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-range..range)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use std::f64::consts::PI;

    fn model(n: usize, d: usize) -> ModelConfig {
        ModelConfig::new(n, d).unwrap()
    }

    fn random_params(policy: &dyn Policy, seed: u64) -> Vec<f64> {
        let mut r = rng::seeded(seed);
        let mut p = policy.init_params(ThetaInit::Uniform, &mut r);
        let blocks = policy.blocks();
        let nt = blocks[0].1;
        for v in p[nt..].iter_mut() {
            *v = r.gen_range(-1.5..1.5);
        }
        p
    }

    #[test]
    fn zero_params_point_mass() {
        let m = model(3, 1).with_initial_hadamard(false);
        let pol = RawVqcPolicy::new(m, PostProcessing::global_recursive(3, 4).unwrap(), EvalMode::Exact).unwrap();
        let params = vec![0.0; pol.num_params()];
        let probs = pol.exact_action_probs(&[0.5, 0.1, -0.3], &params).unwrap();
        assert_eq!(probs, vec![1.0, 0.0, 0.0, 0.0]);
        let mut r = rng::seeded(0);
        for _ in 0..20 {
            assert_eq!(pol.sample_action(&[0.5, 0.1, -0.3], &params, &mut r).unwrap(), 0);
        }
    }

    #[test]
    fn parity_policy_matches_z_string() {
        let m = model(3, 2);
        let pol = RawVqcPolicy::new(m, PostProcessing::global_recursive(3, 2).unwrap(), EvalMode::Exact).unwrap();
        let circuit = Circuit::build(&m).unwrap();
        for seed in 0..5 {
            let params = random_params(&pol, seed);
            let f = random_features(3, PI, &mut rng::seeded(seed + 50));
            let probs = pol.exact_action_probs(&f, &params).unwrap();
            let state = circuit.prepare(&ParamSet::from_flat(&m, &params).unwrap(), &f).unwrap();
            let z = state.expectation_z_mask(0b111);
            for (a, p) in probs.iter().enumerate() {
                assert!((p - z_string_policy(z, a)).abs() < 1e-12);
            }
            assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn shots_estimate_is_close() {
        let m = model(3, 1);
        let postfn = PostProcessing::global_recursive(3, 4).unwrap();
        let exact = RawVqcPolicy::new(m, postfn.clone(), EvalMode::Exact).unwrap();
        let shots = RawVqcPolicy::new(m, postfn, EvalMode::Shots(100_000)).unwrap();
        let params = random_params(&exact, 3);
        let f = [0.2, -0.7, 1.1];
        let p = exact.exact_action_probs(&f, &params).unwrap();
        let q = shots.action_probs(&f, &params, &mut rng::seeded(1)).unwrap();
        for (a, b) in p.iter().zip(&q) {
            // 3σ ≤ 3·sqrt(1/(4·1e5)) ≈ 0.0047
            assert!((a - b).abs() < 0.01);
        }
        assert!(RawVqcPolicy::new(m, PostProcessing::msb_local(3).unwrap(), EvalMode::Shots(0)).is_err());
    }

    #[test]
    fn sampling_law_matches_probabilities() {
        let m = model(2, 1);
        for mode in [EvalMode::Exact, EvalMode::Shots(1)] {
            let pol = RawVqcPolicy::new(m, PostProcessing::global_recursive(2, 4).unwrap(), mode).unwrap();
            let params = random_params(&pol, 12);
            let f = [0.4, -0.9];
            let p = pol.exact_action_probs(&f, &params).unwrap();
            let law = empirical_action_law(&pol, &f, &params, 100_000, &mut rng::seeded(8)).unwrap();
            for (a, b) in p.iter().zip(&law) {
                let sigma = (a * (1.0 - a) / 1e5).sqrt();
                assert!((a - b).abs() <= 3.0 * sigma + 1e-12, "{mode:?}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn sample_action_is_reproducible() {
        let m = model(3, 1);
        let pol = RawVqcPolicy::new(m, PostProcessing::global_recursive(3, 2).unwrap(), EvalMode::Exact).unwrap();
        let params = random_params(&pol, 1);
        let f = [0.1, 0.2, 0.3];
        let run = |seed| {
            let mut r = rng::seeded(seed);
            (0..30).map(|_| pol.sample_action(&f, &params, &mut r).unwrap()).collect::<Vec<_>>()
        };
        assert_eq!(run(4), run(4));
    }

    fn finite_difference<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], h: f64) -> Vec<f64> {
        (0..x.len())
            .map(|k| {
                let mut up = x.to_vec();
                up[k] += h;
                let mut dn = x.to_vec();
                dn[k] -= h;
                (f(&up) - f(&dn)) / (2.0 * h)
            })
            .collect()
    }

    #[test]
    fn raw_log_grad_matches_finite_differences() {
        let m = model(3, 2);
        let pol = RawVqcPolicy::new(m, PostProcessing::global_recursive(3, 4).unwrap(), EvalMode::Exact).unwrap();
        let mut r = rng::seeded(21);
        let params = random_params(&pol, 21);
        let f = random_features(3, PI, &mut r);
        for a in 0..4 {
            let g = pol.log_prob_grad(&f, a, &params, &mut r).unwrap();
            let fd = finite_difference(|x| pol.exact_action_probs(&f, x).unwrap()[a].ln(), &params, 1e-5);
            for (x, y) in g.iter().zip(&fd) {
                assert!((x - y).abs() < 1e-5, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn raw_log_grad_zero_feature_and_score_identity() {
        let m = model(3, 1);
        let pol = RawVqcPolicy::new(m, PostProcessing::global_recursive(3, 2).unwrap(), EvalMode::Exact).unwrap();
        let params = random_params(&pol, 2);
        let f = [0.0, 0.8, -0.4];
        let mut r = rng::seeded(0);
        let probs = pol.exact_action_probs(&f, &params).unwrap();
        let mut total = vec![0.0; params.len()];
        for (a, pa) in probs.iter().enumerate() {
            let g = pol.log_prob_grad(&f, a, &params, &mut r).unwrap();
            // λ entries 0 and 1 scale feature 0
            let nt = m.num_theta();
            assert_eq!(g[nt], 0.0);
            assert_eq!(g[nt + 1], 0.0);
            total.iter_mut().zip(&g).for_each(|(t, gi)| *t += pa * gi);
        }
        assert!(total.iter().all(|t| t.abs() < 1e-8));
    }

    #[test]
    fn raw_log_grad_errors() {
        let m = model(2, 1).with_initial_hadamard(false);
        let pol = RawVqcPolicy::new(m, PostProcessing::msb_local(2).unwrap(), EvalMode::Exact).unwrap();
        let params = vec![0.0; pol.num_params()];
        let mut r = rng::seeded(0);
        assert_eq!(
            pol.log_prob_grad(&[0.0, 0.0], 1, &params, &mut r),
            Err(Error::ZeroProbability { action: 1 })
        );
        assert!(pol.log_prob_grad(&[0.0, 0.0], 2, &params, &mut r).is_err());
        assert!(pol.exact_action_probs(&[0.0], &params).is_err());
        assert!(RawVqcPolicy::new(m, PostProcessing::msb_local(3).unwrap(), EvalMode::Exact).is_err());
    }

    #[test]
    fn rsm_probability_examples() {
        let m = model(3, 1).with_initial_hadamard(false);
        let pol = RestrictedSoftmaxPolicy::full_parity(m, 1.0, 4).unwrap();
        let mut params = random_params(&pol, 5);
        let nc = m.num_params();
        params[nc..].iter_mut().for_each(|w| *w = 0.7);
        let p = pol.exact_action_probs(&[0.3, 0.1, 0.9], &params).unwrap();
        assert!(p.iter().all(|x| (x - 0.25).abs() < 1e-12));

        let pol0 = RestrictedSoftmaxPolicy::full_parity(m, 0.0, 4).unwrap();
        let params = random_params(&pol0, 6);
        let p = pol0.exact_action_probs(&[0.3, 0.1, 0.9], &params).unwrap();
        assert!(p.iter().all(|x| (x - 0.25).abs() < 1e-12));

        // zero circuit parameters leave |000⟩, so ⟨O⟩ = 1 and the logits are β·w
        let beta = 1.7;
        let pol = RestrictedSoftmaxPolicy::full_parity(m, beta, 3).unwrap();
        let mut params = vec![0.0; pol.num_params()];
        params[nc..].copy_from_slice(&[0.5, -0.2, 1.0]);
        let p = pol.exact_action_probs(&[0.3, 0.1, 0.9], &params).unwrap();
        let z: f64 = [0.5f64, -0.2, 1.0].iter().map(|w| (beta * w).exp()).sum();
        for (pi, w) in p.iter().zip([0.5f64, -0.2, 1.0]) {
            assert!((pi - (beta * w).exp() / z).abs() < 1e-12);
        }
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rsm_log_grad_matches_finite_differences() {
        let m = model(3, 2);
        let pol = RestrictedSoftmaxPolicy::full_parity(m, 2.0, 4).unwrap();
        let mut r = rng::seeded(77);
        let params = random_params(&pol, 77);
        let f = random_features(3, PI, &mut r);
        for a in 0..4 {
            let g = pol.log_prob_grad(&f, a, &params, &mut r).unwrap();
            let fd = finite_difference(|x| pol.exact_action_probs(&f, x).unwrap()[a].ln(), &params, 1e-5);
            for (x, y) in g.iter().zip(&fd) {
                assert!((x - y).abs() < 1e-5, "{x} vs {y}");
            }
            let nc = m.num_params();
            assert!(g[nc..].iter().sum::<f64>().abs() < 1e-12);
        }
    }

    #[test]
    fn rsm_equal_weights_kill_circuit_gradient() {
        let m = model(2, 1);
        let pol = RestrictedSoftmaxPolicy::full_parity(m, 1.0, 3).unwrap().with_weight_init(0.4);
        let params = pol.init_params(ThetaInit::Uniform, &mut rng::seeded(1));
        let g = pol.log_prob_grad(&[0.2, 0.3], 1, &params, &mut rng::seeded(2)).unwrap();
        assert!(g[..m.num_params()].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn local_and_q_local_match_z_strings() {
        let n = 4;
        let m = model(n, 1);
        let circuit = Circuit::build(&m).unwrap();
        for q in 1..=n {
            let pol = RawVqcPolicy::new(m, PostProcessing::q_local_parity(n, q).unwrap(), EvalMode::Exact).unwrap();
            let local = RawVqcPolicy::new(m, PostProcessing::msb_local(n).unwrap(), EvalMode::Exact).unwrap();
            let params = random_params(&pol, q as u64);
            let f = random_features(n, PI, &mut rng::seeded(q as u64 + 9));
            let state = circuit.prepare(&ParamSet::from_flat(&m, &params).unwrap(), &f).unwrap();
            let mask = ((1usize << q) - 1) << (n - q);
            let probs = pol.exact_action_probs(&f, &params).unwrap();
            let lp = local.exact_action_probs(&f, &params).unwrap();
            for a in 0..2 {
                assert!((probs[a] - z_string_policy(state.expectation_z_mask(mask), a)).abs() < 1e-12);
                assert!((lp[a] - z_string_policy(state.expectation_z_mask(1 << (n - 1)), a)).abs() < 1e-12);
            }
        }
    }
}
