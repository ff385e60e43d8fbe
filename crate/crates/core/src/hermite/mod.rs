//! Hermite analysis of link functions under Gaussian shifts.
//!
//! Hermite polynomials here are the probabilists' ones normalized to unit
//! norm in `L²(γ)`, so `{H_k}` is an orthonormal basis and
//! `f̂_μ(k) = E[f(z + μ) H_k(z)]` for `z ~ N(0, 1)`.

mod coefficients;
mod link;
mod poly;
mod quadrature;
mod small_ball;

pub use coefficients::{
    first_coefficient_map, hermite_coefficient, hermite_spectrum, information_exponent,
    F1Estimate, HermiteSpectrum, DEFAULT_ZERO_TOL, STEIN_TOL,
};
pub use link::{LinkFunction, Nonlinearity, LIPSCHITZ_WINDOW};
pub use poly::{hermite_derivative, hermite_eval, hermite_values, MAX_HERMITE_ORDER};
pub use quadrature::{
    gauss_hermite_rule, gauss_legendre, QuadratureRule, DEFAULT_ORDER, MAX_RULE_ORDER,
};
pub use small_ball::{small_ball_probability, SmallBallEstimate};

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-x / std::f64::consts::SQRT_2)
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}
