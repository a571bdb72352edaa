use qpg_core::analysis::{normalize_fims, sample_fims, spectrum_stats, StateSampler};
use qpg_core::rng;
use qpg_core::{EvalMode, ModelConfig, PostProcessing, RawVqcPolicy};

fn near_zero(postfn: PostProcessing, depth: usize) -> f64 {
    let n = postfn.n_qubits();
    let policy = RawVqcPolicy::new(ModelConfig::new(n, depth).unwrap(), postfn, EvalMode::Exact).unwrap();
    let fims = sample_fims(&policy, &StateSampler::uniform_angles(), 10, 100, &mut rng::seeded(21)).unwrap();
    for f in &fims {
        assert!(f.max_asymmetry() <= 1e-12);
        assert!(f.min_eigenvalue() >= -1e-10);
    }
    spectrum_stats(&normalize_fims(&fims).unwrap()).unwrap().near_zero_fraction
}

// flat directions are structural, so the fractions are exact rank deficits
#[test]
fn six_qubit_depth_two_zero_fractions() {
    let global = near_zero(PostProcessing::global_recursive(6, 2).unwrap(), 2);
    let three = near_zero(PostProcessing::q_local_parity(6, 3).unwrap(), 2);
    let one = near_zero(PostProcessing::msb_local(6).unwrap(), 2);
    assert_eq!(global, 0.0);
    assert!((three - 12.0 / 60.0).abs() < 1e-12, "{three}");
    assert!((one - 20.0 / 60.0).abs() < 1e-12, "{one}");
}

#[test]
fn four_qubit_global_has_full_rank() {
    assert_eq!(near_zero(PostProcessing::global_recursive(4, 2).unwrap(), 1), 0.0);
}
