//! Gaussian single-index models `y = f(⟨w*, x⟩) + ζ` under a shifted input
//! mean, and the two-stage spherical SGD learner: one large batched step on
//! shifted data to leave the equator, then online SGD on centered data.

mod algorithm;
mod gradient;
mod instance;

pub use algorithm::{run_algorithm1, default_step1_budget, Algorithm1Outcome, ParametricConfig, SignPolicy};
pub use gradient::{
    empirical_spherical_gradient, per_sample_spherical_gradients, population_spherical_gradient,
    SphericalState,
};
pub use instance::{sample_batch, SingleIndexInstance};
