//! Learning under randomly shifted inputs.
//!
//! A numerical laboratory for single-index Gaussian models and sparse Boolean
//! functions (juntas) whose input distribution has been shifted by a random
//! mean. The modules are layered bottom-up:
//!
//! - [`hermite`]: normalized Hermite polynomials, Gauss–Hermite quadrature,
//!   shifted Hermite coefficients, the information exponent and Monte-Carlo
//!   small-ball estimates of the first shifted coefficient.
//! - [`single_index`]: shifted Gaussian single-index data and the two-stage
//!   spherical SGD learner with empirical and population gradients.
//! - [`semiparametric`]: the shared-direction ReLU network trained by a
//!   discretized gradient flow with bias coupling for shifted inputs.
//! - [`boolean`]: exact Fourier–Walsh analysis of juntas under shifted
//!   Rademacher product measures.
//! - [`junta`]: layerwise SGD with the covariance loss, exact second-layer
//!   representations and a jointly trained baseline.
//! - [`harness`]: experiment specs, seeded sweeps and CSV/JSONL persistence.
//!
//! All randomness flows from explicit `u64` seeds through [`rng::SeedStream`].

pub mod boolean;
pub mod error;
pub mod harness;
pub mod hermite;
pub mod junta;
pub mod linalg;
pub mod rng;
pub mod semiparametric;
pub mod single_index;

pub use error::{LabError, Result};
