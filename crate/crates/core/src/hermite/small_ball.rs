use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{LabError, Result};
use crate::rng::{streams, SeedStream};

use super::coefficients::first_coefficient_map;
use super::link::LinkFunction;
use super::quadrature::QuadratureRule;

/// Monte-Carlo estimate of `P_{μ~N(0,1)}(|F_1(μ)| ≤ λ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallBallEstimate {
    pub lambda: f64,
    pub estimate: f64,
    /// Binomial standard error `√(p̂(1-p̂)/n)`.
    pub std_error: f64,
    pub n_samples: usize,
    pub seed: u64,
}

/// Plain Monte Carlo over `μ`; no importance sampling, so `λ < 1e-4` is
/// unreliable at `n_samples ≤ 1e6`.
pub fn small_ball_probability(
    f: &LinkFunction,
    lambda: f64,
    n_samples: usize,
    seed: u64,
    rule: &QuadratureRule,
) -> Result<SmallBallEstimate> {
    if n_samples < 100 {
        return Err(LabError::Precondition(format!("n_samples = {n_samples} < 100")));
    }
    if lambda <= 0.0 {
        return Err(LabError::Config("lambda must be positive".into()));
    }
    if lambda < 1e-4 && n_samples <= 1_000_000 {
        log::warn!("lambda = {lambda:e} is below the reliable range of plain Monte Carlo");
    }
    let mut rng = SeedStream::new(seed).stream(streams::MC);
    let hits = (0..n_samples)
        .filter(|_| {
            let mu: f64 = rng.sample(StandardNormal);
            first_coefficient_map(f, mu, rule).value.abs() <= lambda
        })
        .count();
    let p = hits as f64 / n_samples as f64;
    Ok(SmallBallEstimate {
        lambda,
        estimate: p,
        std_error: (p * (1.0 - p) / n_samples as f64).sqrt(),
        n_samples,
        seed,
    })
}
