//! Shared fixtures for the benchmarks.

use std::f64::consts::PI;

use qpg_core::analysis::sample_uniform_params;
use qpg_core::policy::random_features;
use qpg_core::rng;
use qpg_core::{EvalMode, ModelConfig, Policy, PostProcessing, RawVqcPolicy};

/// RAW policy with the global recursive decoder, plus one parameter vector and
/// one feature vector drawn from `seed`.
pub fn raw_fixture(n: usize, depth: usize, actions: usize, seed: u64) -> (RawVqcPolicy, Vec<f64>, Vec<f64>) {
    let model = ModelConfig::new(n, depth).expect("valid model");
    let postfn = PostProcessing::global_recursive(n, actions).expect("valid decoder");
    let policy = RawVqcPolicy::new(model, postfn, EvalMode::Exact).expect("matching widths");
    let mut r = rng::seeded(seed);
    let params = sample_uniform_params(policy.num_params(), &mut r);
    let features = random_features(n, PI, &mut r);
    (policy, params, features)
}
