use ndarray::{Array1, Array2};

use crate::error::{LabError, Result};
use crate::hermite::{gauss_hermite_rule, hermite_spectrum, DEFAULT_ORDER};
use crate::linalg::{normalize, project_tangent};

use super::instance::SingleIndexInstance;

/// Unit-norm iterate on the sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalState {
    pub theta: Array1<f64>,
    pub step_index: usize,
}

impl SphericalState {
    /// Normalizes `theta`.
    pub fn new(theta: Array1<f64>) -> Self {
        Self {
            theta: normalize(theta),
            step_index: 0,
        }
    }

    /// `θ ← (θ - rate·g)/‖θ - rate·g‖`.
    pub fn step(&mut self, rate: f64, grad: &Array1<f64>) {
        let mut t = self.theta.clone();
        t.scaled_add(-rate, grad);
        self.theta = normalize(t);
        self.step_index += 1;
    }
}

/// `(2/n) Σ f'_μ(⟨θ,x̃⟩)(f_μ(⟨θ,x̃⟩) - y) (I - θθᵀ) x̃`, the spherical gradient
/// of the batch MSE against the shifted link.
///
/// `centered_inputs` are the `x̃ = x - α` rows.
pub fn empirical_spherical_gradient(
    state: &SphericalState,
    link: &crate::hermite::LinkFunction,
    centered_inputs: &Array2<f64>,
    labels: &Array1<f64>,
    mu_guess: f64,
) -> Result<Array1<f64>> {
    if !link.has_derivative() {
        return Err(LabError::UnsupportedLink(link.label().to_string()));
    }
    let n = centered_inputs.nrows();
    if n == 0 || labels.len() != n {
        return Err(LabError::Config("inputs and labels must be nonempty and aligned".into()));
    }
    let proj = centered_inputs.dot(&state.theta);
    let weights: Array1<f64> = proj
        .iter()
        .zip(labels)
        .map(|(&p, &y)| {
            let u = p + mu_guess;
            link.derivative(u).expect("checked above") * (link.eval(u) - y)
        })
        .collect();
    let ambient = centered_inputs.t().dot(&weights) * (2.0 / n as f64);
    Ok(project_tangent(state.theta.view(), ambient.view()))
}

/// Per-sample terms of [`empirical_spherical_gradient`], one row each;
/// their mean is the batch gradient. Used for standard errors.
pub fn per_sample_spherical_gradients(
    state: &SphericalState,
    link: &crate::hermite::LinkFunction,
    centered_inputs: &Array2<f64>,
    labels: &Array1<f64>,
    mu_guess: f64,
) -> Result<Array2<f64>> {
    if !link.has_derivative() {
        return Err(LabError::UnsupportedLink(link.label().to_string()));
    }
    let mut out = centered_inputs.clone();
    for (mut row, &y) in out.rows_mut().into_iter().zip(labels) {
        let u = row.dot(&state.theta) + mu_guess;
        let c = 2.0 * link.derivative(u).expect("checked above") * (link.eval(u) - y);
        let t = project_tangent(state.theta.view(), row.view());
        row.assign(&(t * c));
    }
    Ok(out)
}

/// `-2 (Σ_{k≥1} k f̂_μ(k) f̂_{μ*}(k) m^{k-1}) (I - θθᵀ) w*`.
pub fn population_spherical_gradient(
    state: &SphericalState,
    inst: &SingleIndexInstance,
    mu: f64,
    mu_star: f64,
    spectrum_k: usize,
) -> Result<Array1<f64>> {
    let rule = gauss_hermite_rule(DEFAULT_ORDER.max(2 * spectrum_k + 8))?;
    let a = hermite_spectrum(&inst.link, spectrum_k, mu, &rule)?;
    let b = hermite_spectrum(&inst.link, spectrum_k, mu_star, &rule)?;
    let m = inst.overlap(&state.theta);
    let scalar: f64 = (1..=spectrum_k)
        .map(|k| k as f64 * a.coeffs[k] * b.coeffs[k] * m.powi(k as i32 - 1))
        .sum();
    Ok(project_tangent(state.theta.view(), inst.signal_wstar.view()) * (-2.0 * scalar))
}
