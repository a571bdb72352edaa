//! Quantum policy gradients with classically post-processed measurements.
//!
//! A variational circuit prepares a state from environment features, the state
//! is measured in the computational basis, and a classical post-processing
//! function turns the measured bitstring into an action. The crate covers the
//! simulator, the circuit family, the post-processing functions and their
//! globality analysis, the policies and their gradients, benchmark
//! environments, REINFORCE training and Fisher-information diagnostics.

pub mod analysis;
pub mod ansatz;
pub mod decode;
pub mod envs;
pub mod error;
pub mod io;
pub mod policy;
pub mod qsim;
pub mod rng;
pub mod train;

pub use ansatz::{Entangler, ModelConfig, ParamSet};
pub use decode::{GlobalityReport, PostProcessing, Ratio};
pub use error::{Error, Result};
pub use qsim::Statevector;
pub use envs::{CartPole, CartPoleVersion, ContextualBandit, Environment, FeatureEncoder, FrozenLake, Observation, RewardScheme};
pub use policy::{EvalMode, Policy, RawVqcPolicy, RestrictedSoftmaxPolicy, ThetaInit};
pub use train::{Hyperparams, TrainOutcome};
