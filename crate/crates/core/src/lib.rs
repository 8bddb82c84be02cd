//! Numerical laboratory for measuring the algorithmic stability of SGD and
//! proximal SGD, and for evaluating closed-form generalization-error bounds
//! against measured generalization gaps.
//!
//! The crate is organized around the experimental pipeline:
//!
//! * [`data`]: datasets (LIBSVM ingestion, synthetic Gaussian generation,
//!   label corruption) and replace-one-sample perturbed pairs;
//! * [`models`]: per-sample losses (logistic, least squares, a tiny tanh
//!   MLP), their gradients and smoothness/Lipschitz constants;
//! * [`proxreg`]: strongly convex regularizers with proximal mappings and
//!   the gradient mapping;
//! * [`optim`]: SGD / proximal SGD with decaying step schedules, coupled
//!   runs on perturbed dataset pairs, and path-perturbed runs;
//! * [`estimators`]: Monte Carlo estimators of stochastic-gradient
//!   variance, iterate stability, uniform-stability probes and
//!   generalization gaps;
//! * [`bounds`]: closed-form bound evaluators with assumption checking.
//!
//! Everything is deterministic given explicit seeds; see [`seeds`] for the
//! hierarchical seed-derivation scheme used by the estimators and the
//! experiment harness.

pub mod bounds;
pub mod data;
pub mod estimators;
pub mod linalg;
pub mod models;
pub mod optim;
pub mod proxreg;
pub mod seeds;

pub use data::{Dataset, LabelNoiseSpec, PerturbedPair, Sample};
pub use models::{Constants, LossModel};
pub use optim::{CoupledRunResult, RunOptions, SamplePath, StepSchedule, Trajectory};
pub use proxreg::Regularizer;
