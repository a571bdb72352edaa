//! Fisher-information diagnostics and the softmax accuracy bound.

use std::f64::consts::PI;
use std::io::Write;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, RngCore};
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::envs::{ContextualBandit, FeatureEncoder, Observation};
use crate::error::{Error, Result};
use crate::io::fmt_f64;
use crate::policy::{Policy, ThetaInit};
use crate::rng;
use crate::train::{train_run, Hyperparams};

/// Eigenvalues below this count as zero.
pub const NEAR_ZERO: f64 = 1e-7;
/// Negative eigenvalues down to `-PSD_SLACK` are float noise and clamp to 0.
pub const PSD_SLACK: f64 = 1e-10;
/// Lower edges of the spectrum histogram; the last bucket is open.
pub const BUCKET_EDGES: [f64; 7] = [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0];

/// Distribution of feature vectors fed to the policy.
#[derive(Clone, Debug, PartialEq)]
pub enum StateSampler {
    /// Each entry `N(0, std)`.
    Normal { std: f64 },
    /// Each entry uniform on `[low, high)`.
    Uniform { low: f64, high: f64 },
    /// Uniform choice among fixed feature vectors.
    Finite(Vec<Vec<f64>>),
}

impl StateSampler {
    /// `N(0, 0.5)` entries, close to what a CartPole agent sees.
    pub fn cartpole_mimic() -> Self {
        StateSampler::Normal { std: 0.5 }
    }

    /// Entries uniform on `[-π, π)`.
    pub fn uniform_angles() -> Self {
        StateSampler::Uniform { low: -PI, high: PI }
    }

    /// Every state of a discrete environment, encoded.
    pub fn enumerate(encoder: &FeatureEncoder, num_states: usize) -> Result<Self> {
        (0..num_states)
            .map(|s| encoder.encode(&Observation::Discrete(s)))
            .collect::<Result<Vec<_>>>()
            .map(StateSampler::Finite)
    }

    pub fn sample(&self, n_features: usize, rng: &mut dyn RngCore) -> Result<Vec<f64>> {
        match self {
            StateSampler::Normal { std } => {
                let d = Normal::new(0.0, *std).map_err(|e| Error::Hyperparam(format!("state sampler: {e}")))?;
                Ok((0..n_features).map(|_| d.sample(rng)).collect())
            }
            StateSampler::Uniform { low, high } => {
                if low.partial_cmp(high) != Some(std::cmp::Ordering::Less) {
                    return Err(Error::Hyperparam(format!("empty state range [{low}, {high})")));
                }
                Ok((0..n_features).map(|_| rng.gen_range(*low..*high)).collect())
            }
            StateSampler::Finite(states) => {
                if states.is_empty() {
                    return Err(Error::Empty("finite state sampler"));
                }
                let s = &states[rng.gen_range(0..states.len())];
                if s.len() != n_features {
                    return Err(Error::Dimension {
                        what: "sampled feature vector",
                        expected: n_features,
                        got: s.len(),
                    });
                }
                Ok(s.clone())
            }
        }
    }
}

/// Distribution of full parameter vectors: every entry uniform on (-π, π].
pub fn sample_uniform_params(num_params: usize, rng: &mut dyn RngCore) -> Vec<f64> {
    (0..num_params).map(|_| -rng.gen_range(-PI..PI)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalFim {
    pub matrix: DMatrix<f64>,
    pub samples: usize,
}

impl EmpiricalFim {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    pub fn max_asymmetry(&self) -> f64 {
        let m = &self.matrix;
        (m - m.transpose()).amax()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.matrix.clone()).eigenvalues.min()
    }

    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        for row in self.matrix.row_iter() {
            let line: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }
}

/// `(1/k) Σ ∇ln π(a|s) ∇ln π(a|s)ᵀ` with `s` from `states` and `a ~ π(·|s)`.
///
/// Samples are drawn in parallel from per-sample streams derived from one
/// draw of `rng` and summed in sample order.
pub fn empirical_fim(
    policy: &dyn Policy,
    params: &[f64],
    states: &StateSampler,
    k: usize,
    rng: &mut dyn RngCore,
) -> Result<EmpiricalFim> {
    if k == 0 {
        return Err(Error::Empty("FIM sample count"));
    }
    let p = policy.num_params();
    if params.len() != p {
        return Err(Error::Dimension {
            what: "parameter vector",
            expected: p,
            got: params.len(),
        });
    }
    let base = rng.next_u64();
    let grads = (0..k)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(base, i as u64);
            let s = states.sample(policy.num_features(), &mut r)?;
            let a = policy.sample_action(&s, params, &mut r)?;
            policy.log_prob_grad(&s, a, params, &mut r)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut matrix = DMatrix::zeros(p, p);
    for g in grads {
        let v = nalgebra::DVector::from_vec(g);
        matrix.ger(1.0, &v, &v, 1.0);
    }
    matrix /= k as f64;
    Ok(EmpiricalFim { matrix, samples: k })
}

/// One empirical FIM per uniformly drawn parameter vector.
pub fn sample_fims(
    policy: &dyn Policy,
    states: &StateSampler,
    param_sets: usize,
    samples_per_set: usize,
    rng: &mut dyn RngCore,
) -> Result<Vec<EmpiricalFim>> {
    (0..param_sets)
        .map(|_| {
            let params = sample_uniform_params(policy.num_params(), rng);
            empirical_fim(policy, &params, states, samples_per_set, rng)
        })
        .collect()
}

/// Rescales all matrices by one constant so their mean trace is the dimension.
pub fn normalize_fims(fims: &[EmpiricalFim]) -> Result<Vec<DMatrix<f64>>> {
    let first = fims.first().ok_or(Error::Empty("FIM list"))?;
    let p = first.dim() as f64;
    let mean_trace = fims.iter().map(|f| f.trace()).sum::<f64>() / fims.len() as f64;
    if !mean_trace.is_finite() || mean_trace <= 0.0 {
        return Err(Error::Numerical(format!("cannot normalize FIMs with mean trace {mean_trace}")));
    }
    Ok(fims.iter().map(|f| &f.matrix * (p / mean_trace)).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumStats {
    /// Ascending, pooled over all matrices, small negatives clamped to 0.
    pub eigenvalues: Vec<f64>,
    /// Share of eigenvalues below [`NEAR_ZERO`].
    pub near_zero_fraction: f64,
    /// Counts per bucket of [`BUCKET_EDGES`].
    pub buckets: Vec<usize>,
}

impl SpectrumStats {
    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "bucket_low,bucket_high,count")?;
        for (i, c) in self.buckets.iter().enumerate() {
            let high = BUCKET_EDGES.get(i + 1).map_or("inf".to_string(), |&h| fmt_f64(h));
            writeln!(out, "{},{},{}", fmt_f64(BUCKET_EDGES[i]), high, c)?;
        }
        Ok(())
    }
}

pub fn spectrum_stats(matrices: &[DMatrix<f64>]) -> Result<SpectrumStats> {
    if matrices.is_empty() {
        return Err(Error::Empty("matrix list"));
    }
    let mut eigenvalues = Vec::new();
    for m in matrices {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("non-finite FIM entry".into()));
        }
        for ev in SymmetricEigen::new(m.clone()).eigenvalues.iter() {
            if *ev < -PSD_SLACK {
                return Err(Error::Numerical(format!("eigenvalue {ev} below -{PSD_SLACK}")));
            }
            eigenvalues.push(ev.max(0.0));
        }
    }
    eigenvalues.sort_by(f64::total_cmp);
    let near = eigenvalues.iter().filter(|&&e| e < NEAR_ZERO).count();
    let mut buckets = vec![0usize; BUCKET_EDGES.len()];
    for &e in &eigenvalues {
        let i = BUCKET_EDGES.iter().rposition(|&lo| e >= lo).unwrap_or(0);
        buckets[i] += 1;
    }
    Ok(SpectrumStats {
        near_zero_fraction: near as f64 / eigenvalues.len() as f64,
        eigenvalues,
        buckets,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EffDimPoint {
    pub data_size: u64,
    pub eff_dim: f64,
    /// `eff_dim / |Θ|`.
    pub normalized: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EffDimReport {
    pub num_params: usize,
    pub points: Vec<EffDimPoint>,
}

impl EffDimReport {
    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "data_size,eff_dim,normalized")?;
        for p in &self.points {
            writeln!(out, "{},{},{}", p.data_size, fmt_f64(p.eff_dim), fmt_f64(p.normalized))?;
        }
        Ok(())
    }
}

fn kappa(n: u64) -> f64 {
    let n = n as f64;
    n / (2.0 * PI * n.ln())
}

fn log_det_spd(m: DMatrix<f64>) -> Result<f64> {
    let chol = m
        .cholesky()
        .ok_or_else(|| Error::Numerical("I + κF̂ is not positive definite".into()))?;
    Ok(2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>())
}

/// Effective dimension from already normalized matrices `F̂_i`:
/// `2·(ln mean_i √det(I + κ F̂_i)) / ln κ` with `κ = n / (2π ln n)`.
pub fn effective_dimension_normalized(fhat: &[DMatrix<f64>], data_sizes: &[u64]) -> Result<EffDimReport> {
    let first = fhat.first().ok_or(Error::Empty("FIM list"))?;
    let p = first.nrows();
    let mut points = Vec::with_capacity(data_sizes.len());
    for &n in data_sizes {
        let k = kappa(n);
        if n < 3 || k.is_nan() || k <= 1.0 {
            return Err(Error::Hyperparam(format!(
                "data size {n} too small: n/(2π ln n) must exceed 1"
            )));
        }
        let halves = fhat
            .par_iter()
            .map(|f| Ok(0.5 * log_det_spd(DMatrix::identity(p, p) + f * k)?))
            .collect::<Result<Vec<f64>>>()?;
        let max = halves.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + halves.iter().map(|h| (h - max).exp()).sum::<f64>().ln();
        let eff_dim = 2.0 * (lse - (fhat.len() as f64).ln()) / k.ln();
        points.push(EffDimPoint {
            data_size: n,
            eff_dim,
            normalized: eff_dim / p as f64,
        });
    }
    Ok(EffDimReport { num_params: p, points })
}

/// Normalizes `fims` then evaluates [`effective_dimension_normalized`].
pub fn effective_dimension(fims: &[EmpiricalFim], data_sizes: &[u64]) -> Result<EffDimReport> {
    effective_dimension_normalized(&normalize_fims(fims)?, data_sizes)
}

/// Best accuracy of a single-observable softmax policy on a uniform
/// environment with `m` actions: `(2/M) Σ_{k≤M/2} 1/k` for even `M`,
/// `(H_{(M-1)/2} + H_{(M+1)/2}) / M` for odd `M`.
pub fn accuracy_bound(m: usize) -> Result<f64> {
    if m < 2 {
        return Err(Error::Hyperparam(format!("accuracy bound needs at least 2 actions, got {m}")));
    }
    let harmonic = |k: usize| (1..=k).map(|i| 1.0 / i as f64).sum::<f64>();
    Ok((harmonic(m / 2) + harmonic(m.div_ceil(2))) / m as f64)
}

/// Exact accuracy of `params` on every state of `env`.
pub fn bandit_accuracy(env: &ContextualBandit, encoder: &FeatureEncoder, policy: &dyn Policy, params: &[f64]) -> Result<f64> {
    env.accuracy(|s| policy.exact_action_probs(&encoder.encode(&Observation::Discrete(s))?, params))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub bound: f64,
    pub slack: f64,
    /// `(seed, final exact accuracy)`.
    pub accuracies: Vec<(u64, f64)>,
}

impl BoundReport {
    pub fn compliant(&self) -> bool {
        self.accuracies.iter().all(|&(_, a)| a <= self.bound + self.slack)
    }

    pub fn exceeding(&self, threshold: f64) -> usize {
        self.accuracies.iter().filter(|&&(_, a)| a > threshold).count()
    }
}

/// Allowed excess over the bound before a run counts as a violation.
pub const BOUND_SLACK: f64 = 0.02;

/// Trains `policy` once per seed on the uniform bandit `env` and records the
/// exact accuracy of each final parameter vector.
pub fn bound_compliance_experiment(
    env: &ContextualBandit,
    policy: &dyn Policy,
    hyper: &Hyperparams,
    init: ThetaInit,
    seeds: &[u64],
) -> Result<BoundReport> {
    if !env.is_uniform() {
        return Err(Error::InvalidEnvironment("bound check needs equal-size optimal-action preimages".into()));
    }
    let encoder = FeatureEncoder::for_space(crate::envs::Environment::state_space(env), policy.num_features())?;
    let accuracies = seeds
        .par_iter()
        .map(|&seed| {
            let mut e = env.clone();
            let out = train_run(&mut e, &encoder, policy, hyper, init, seed)?;
            Ok((seed, bandit_accuracy(env, &encoder, policy, &out.params)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundReport {
        bound: accuracy_bound(crate::envs::Environment::num_actions(env))?,
        slack: BOUND_SLACK,
        accuracies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::ModelConfig;
    use crate::decode::PostProcessing;
    use crate::envs::RewardScheme;
    use crate::policy::{EvalMode, RawVqcPolicy, RestrictedSoftmaxPolicy};

    fn raw(n: usize, d: usize, postfn: PostProcessing) -> RawVqcPolicy {
        RawVqcPolicy::new(ModelConfig::new(n, d).unwrap(), postfn, EvalMode::Exact).unwrap()
    }

    #[test]
    fn constant_policy_has_zero_fim() {
        let pol = RestrictedSoftmaxPolicy::full_parity(ModelConfig::new(2, 1).unwrap(), 0.0, 3).unwrap();
        let mut r = rng::seeded(0);
        let params = sample_uniform_params(pol.num_params(), &mut r);
        let fim = empirical_fim(&pol, &params, &StateSampler::uniform_angles(), 50, &mut r).unwrap();
        assert!(fim.matrix.iter().all(|&v| v == 0.0));
        let stats = spectrum_stats(&[fim.matrix]).unwrap();
        assert_eq!(stats.near_zero_fraction, 1.0);
    }

    #[test]
    fn single_sample_is_rank_one() {
        let pol = raw(3, 1, PostProcessing::global_recursive(3, 2).unwrap());
        let mut r = rng::seeded(1);
        let params = sample_uniform_params(pol.num_params(), &mut r);
        let fim = empirical_fim(&pol, &params, &StateSampler::uniform_angles(), 1, &mut r).unwrap();
        let ev = SymmetricEigen::new(fim.matrix.clone()).eigenvalues;
        let big = ev.iter().filter(|&&e| e.abs() > 1e-10 * fim.trace().max(1.0)).count();
        assert!(big <= 1);
    }

    #[test]
    fn fim_matches_exact_enumeration() {
        let pol = raw(2, 1, PostProcessing::global_recursive(2, 2).unwrap());
        let encoder = FeatureEncoder::BinaryDiscrete { n_qubits: 2 };
        let states = StateSampler::enumerate(&encoder, 4).unwrap();
        let StateSampler::Finite(list) = &states else { unreachable!() };
        let mut r = rng::seeded(2);
        let params = sample_uniform_params(pol.num_params(), &mut r);
        let p = pol.num_params();

        // exact: average over states, weight actions by their probability
        let mut exact = DMatrix::zeros(p, p);
        let mut second = DMatrix::zeros(p, p);
        for s in list {
            let probs = pol.exact_action_probs(s, &params).unwrap();
            for (a, pa) in probs.iter().enumerate() {
                if *pa == 0.0 {
                    continue;
                }
                let g = nalgebra::DVector::from_vec(pol.log_prob_grad(s, a, &params, &mut r).unwrap());
                let outer = &g * g.transpose();
                exact += &outer * (pa / 4.0);
                second += outer.map(|v| v * v) * (pa / 4.0);
            }
        }
        let k = 20_000;
        let fim = empirical_fim(&pol, &params, &states, k, &mut r).unwrap();
        let var_sum: f64 = (second - exact.map(|v| v * v)).sum();
        let err = (&fim.matrix - &exact).norm();
        assert!(err <= 2.0 * (var_sum / k as f64).sqrt(), "{err}");
    }

    #[test]
    fn fim_is_symmetric_psd() {
        let pol = raw(3, 2, PostProcessing::global_recursive(3, 4).unwrap());
        let fims = sample_fims(&pol, &StateSampler::cartpole_mimic(), 3, 40, &mut rng::seeded(3)).unwrap();
        for f in &fims {
            assert!(f.max_asymmetry() <= 1e-12);
            assert!(f.min_eigenvalue() >= -PSD_SLACK);
        }
        let normalized = normalize_fims(&fims).unwrap();
        let mean: f64 = normalized.iter().map(|m| m.trace()).sum::<f64>() / 3.0;
        assert!((mean - pol.num_params() as f64).abs() < 1e-9);
    }

    #[test]
    fn spectrum_of_scaled_identity() {
        let stats = spectrum_stats(&[DMatrix::identity(5, 5) * 1.25]).unwrap();
        assert!(stats.eigenvalues.iter().all(|&e| (e - 1.25).abs() < 1e-12));
        assert_eq!(stats.buckets, vec![0, 0, 5, 0, 0, 0, 0]);
        assert_eq!(stats.near_zero_fraction, 0.0);
        let stats = spectrum_stats(&[DMatrix::identity(2, 2) * 10.0, DMatrix::zeros(2, 2)]).unwrap();
        assert_eq!(stats.buckets, vec![2, 0, 0, 0, 0, 0, 2]);
        assert_eq!(stats.near_zero_fraction, 0.5);

        let mut bad = DMatrix::zeros(2, 2);
        bad[(0, 0)] = f64::NAN;
        assert!(spectrum_stats(&[bad]).is_err());
        assert!(spectrum_stats(&[DMatrix::identity(2, 2) * -1.0]).is_err());

        let mut out = Vec::new();
        spectrum_stats(&[DMatrix::identity(1, 1)]).unwrap().write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("bucket_low,bucket_high,count\n0,0.5,0\n0.5,1,0\n1,1.5,1\n"));
        assert!(text.ends_with("3,inf,0\n"));
    }

    #[test]
    fn effective_dimension_closed_forms() {
        let zero = vec![DMatrix::zeros(6, 6); 3];
        let rep = effective_dimension_normalized(&zero, &[1000, 100_000]).unwrap();
        assert!(rep.points.iter().all(|p| p.eff_dim.abs() < 1e-12));

        let p = 6;
        let ident = vec![DMatrix::identity(p, p); 4];
        let n = 100_000u64;
        let rep = effective_dimension_normalized(&ident, &[n]).unwrap();
        let k = kappa(n);
        let closed = p as f64 * (1.0 + k).ln() / k.ln();
        assert!((rep.points[0].eff_dim - closed).abs() < 1e-9);
        assert!((rep.points[0].eff_dim - p as f64).abs() / (p as f64) < 0.05);
        assert!(rep.points[0].normalized <= 1.0 + 1e-3);

        // identity FIMs at any scale normalize to the identity
        let fims: Vec<EmpiricalFim> = (0..3)
            .map(|_| EmpiricalFim {
                matrix: DMatrix::identity(p, p) * 0.3,
                samples: 1,
            })
            .collect();
        let scaled = effective_dimension(&fims, &[n]).unwrap();
        assert!((scaled.points[0].eff_dim - rep.points[0].eff_dim).abs() < 1e-12);

        let zero_fims = vec![EmpiricalFim { matrix: DMatrix::zeros(2, 2), samples: 1 }];
        assert!(effective_dimension(&zero_fims, &[n]).is_err());
        assert!(effective_dimension_normalized(&ident, &[2]).is_err());
        assert!(effective_dimension_normalized(&ident, &[10]).is_err());
    }

    #[test]
    fn effective_dimension_grows_with_data() {
        let pol = raw(3, 1, PostProcessing::global_recursive(3, 2).unwrap());
        let fims = sample_fims(&pol, &StateSampler::cartpole_mimic(), 10, 50, &mut rng::seeded(4)).unwrap();
        let rep = effective_dimension(&fims, &[5_000, 50_000, 1_000_000]).unwrap();
        for w in rep.points.windows(2) {
            assert!(w[1].normalized > w[0].normalized);
        }
        assert!(rep.points.iter().all(|p| p.normalized > 0.0 && p.normalized <= 1.0));
    }

    #[test]
    fn bound_values() {
        assert_eq!(accuracy_bound(4).unwrap(), 0.75);
        assert_eq!(accuracy_bound(2).unwrap(), 1.0);
        assert!((accuracy_bound(8).unwrap() - 25.0 / 48.0).abs() < 1e-15);
        assert!((accuracy_bound(3).unwrap() - (1.0 + 1.5) / 3.0).abs() < 1e-15);
        assert!(accuracy_bound(1).is_err());
        let mut prev = accuracy_bound(2).unwrap();
        for m in (4..=1024).step_by(2) {
            let b = accuracy_bound(m).unwrap();
            assert!(b < prev);
            prev = b;
        }
        assert!(prev < 0.02);
    }

    #[test]
    fn bound_dominates_best_softmax_orderings() {
        // for fixed weights, action a at its best scalar input gets
        // sup_x softmax(x·w)_a; averaging these bounds the accuracy
        let mut r = rng::seeded(6);
        for m in [4usize, 8] {
            let bound = accuracy_bound(m).unwrap();
            for _ in 0..20 {
                let w: Vec<f64> = (0..m).map(|_| r.gen_range(-2.0..2.0)).collect();
                let mut best = vec![0.0f64; m];
                for step in -4000..=4000 {
                    let x = step as f64 * 0.05;
                    let logits: Vec<f64> = w.iter().map(|wi| x * wi).collect();
                    let mx = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                    let z: f64 = logits.iter().map(|l| (l - mx).exp()).sum();
                    for a in 0..m {
                        best[a] = best[a].max((logits[a] - mx).exp() / z);
                    }
                }
                let acc = best.iter().sum::<f64>() / m as f64;
                assert!(acc <= bound + 1e-12, "M={m}: {acc} > {bound}");
            }
        }
    }

    #[test]
    fn untrained_rsm_is_uniform() {
        let env = ContextualBandit::blocks(8, 4, RewardScheme::Accuracy01).unwrap();
        let pol = RestrictedSoftmaxPolicy::full_parity(ModelConfig::new(3, 2).unwrap(), 1.0, 4).unwrap();
        let encoder = FeatureEncoder::BinaryDiscrete { n_qubits: 3 };
        let params = pol.init_params(ThetaInit::Uniform, &mut rng::seeded(0));
        assert!((bandit_accuracy(&env, &encoder, &pol, &params).unwrap() - 0.25).abs() < 1e-15);

        let hyper = Hyperparams::discrete(0, 1);
        let rep = bound_compliance_experiment(&env, &pol, &hyper, ThetaInit::Uniform, &[1, 2]).unwrap();
        assert!(rep.compliant());
        assert!(rep.accuracies.iter().all(|&(_, a)| (a - 0.25).abs() < 1e-15));

        let skew = ContextualBandit::new(vec![0, 0, 0, 1, 2, 3, 3, 3], 4, RewardScheme::Accuracy01).unwrap();
        assert!(bound_compliance_experiment(&skew, &pol, &hyper, ThetaInit::Uniform, &[1]).is_err());
    }
}
