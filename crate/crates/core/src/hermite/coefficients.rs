use crate::error::{LabError, Result};

use super::link::LinkFunction;
use super::poly::hermite_values;
use super::quadrature::{gauss_hermite_rule, QuadratureRule, MAX_RULE_ORDER};

/// Coefficients below this magnitude count as zero for the information
/// exponent; exact zero is meaningless in floating point.
pub const DEFAULT_ZERO_TOL: f64 = 1e-9;

/// Allowed disagreement between the two Stein routes for `F_1`.
pub const STEIN_TOL: f64 = 1e-4;

/// Truncated Hermite expansion of a (possibly shifted) link.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteSpectrum {
    pub coeffs: Vec<f64>,
    pub truncation_k: usize,
    pub shift_mu: f64,
}

impl HermiteSpectrum {
    /// `Σ_{k≥1} f̂(k)²`, the captured variance.
    pub fn tail_energy(&self) -> f64 {
        self.coeffs.iter().skip(1).map(|c| c * c).sum()
    }
}

fn effective_rule(f: &LinkFunction, mu: f64, rule: &QuadratureRule) -> Option<QuadratureRule> {
    if f.kinks().is_empty() {
        None
    } else {
        Some(rule.piecewise(&f.kinks_shifted(mu)))
    }
}

fn check_order(k: usize, rule: &QuadratureRule) -> Result<()> {
    if rule.order() < 2 * k + 8 {
        return Err(LabError::Precondition(format!(
            "rule order {} is below 2k+8 = {} for k = {k}",
            rule.order(),
            2 * k + 8
        )));
    }
    Ok(())
}

/// `f̂_μ(k) = E[f(z + μ) H_k(z)]`.
///
/// When the link has kinks the rule is re-panelled at the shifted kink
/// locations before summing.
pub fn hermite_coefficient(f: &LinkFunction, k: usize, mu: f64, rule: &QuadratureRule) -> Result<f64> {
    Ok(hermite_spectrum(f, k, mu, rule)?.coeffs[k])
}

/// `f̂_μ(0..=K)` from a single pass over the nodes.
pub fn hermite_spectrum(f: &LinkFunction, truncation_k: usize, mu: f64, rule: &QuadratureRule) -> Result<HermiteSpectrum> {
    check_order(truncation_k, rule)?;
    let adapted = effective_rule(f, mu, rule);
    let rule = adapted.as_ref().unwrap_or(rule);
    let mut coeffs = vec![0.0; truncation_k + 1];
    for (&x, &w) in rule.nodes().iter().zip(rule.weights()) {
        let fx = w * f.eval(x + mu);
        if fx == 0.0 {
            continue;
        }
        for (c, h) in coeffs.iter_mut().zip(hermite_values(truncation_k, x)?) {
            *c += fx * h;
        }
    }
    Ok(HermiteSpectrum {
        coeffs,
        truncation_k,
        shift_mu: mu,
    })
}

/// `F_1(μ)` computed by both Stein routes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct F1Estimate {
    /// `E[f(z + μ) z]`, the reported value.
    pub value: f64,
    /// `E[f'(z + μ)]` when a derivative is available.
    pub derivative_route: Option<f64>,
    pub discrepancy: Option<f64>,
    /// Gauss–Hermite order the final value was computed with.
    pub order_used: usize,
}

impl F1Estimate {
    pub fn consistent(&self) -> bool {
        self.discrepancy.is_none_or(|d| d <= STEIN_TOL)
    }
}

fn f1_routes(f: &LinkFunction, mu: f64, rule: &QuadratureRule) -> F1Estimate {
    let adapted = effective_rule(f, mu, rule);
    let r = adapted.as_ref().unwrap_or(rule);
    let value = r.expectation(|z| f.eval(z + mu) * z);
    let derivative_route = f
        .has_derivative()
        .then(|| r.expectation(|z| f.derivative(z + mu).expect("checked")));
    F1Estimate {
        value,
        derivative_route,
        discrepancy: derivative_route.map(|d| (d - value).abs()),
        order_used: rule.order(),
    }
}

/// First shifted Hermite coefficient `F_1(μ)`.
///
/// With a derivative available the Stein identity `E[f(z+μ)z] = E[f'(z+μ)]`
/// gives an independent second route. A disagreement above [`STEIN_TOL`]
/// triggers one retry at doubled order, then a warning.
pub fn first_coefficient_map(f: &LinkFunction, mu: f64, rule: &QuadratureRule) -> F1Estimate {
    let est = f1_routes(f, mu, rule);
    if est.consistent() {
        return est;
    }
    let doubled = (rule.order() * 2).min(MAX_RULE_ORDER);
    let est = if doubled > rule.order() {
        match gauss_hermite_rule(doubled) {
            Ok(r) => f1_routes(f, mu, &r),
            Err(_) => est,
        }
    } else {
        est
    };
    if !est.consistent() {
        log::warn!(
            "Stein routes for {} at mu={mu} disagree by {:.3e}",
            f.label(),
            est.discrepancy.unwrap_or(f64::NAN)
        );
    }
    est
}

/// Smallest `k ∈ 1..=K` with `|f̂(k)| > tol`, or `None`.
pub fn information_exponent(f: &LinkFunction, rule: &QuadratureRule, truncation_k: usize, tol: f64) -> Result<Option<usize>> {
    if tol <= 0.0 {
        return Err(LabError::Config("tolerance must be positive".into()));
    }
    let spec = hermite_spectrum(f, truncation_k, 0.0, rule)?;
    Ok(spec.coeffs.iter().enumerate().skip(1).find(|(_, c)| c.abs() > tol).map(|(k, _)| k))
}
