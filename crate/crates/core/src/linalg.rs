//! Small vector helpers shared by the sphere-constrained learners.

use ndarray::{Array1, ArrayView1};
use rand::Rng;
use rand_distr::StandardNormal;

/// Uniform draw from the unit sphere in `R^d`.
pub fn random_unit_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Array1<f64> {
    loop {
        let v: Array1<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let n = v.dot(&v).sqrt();
        if n > 1e-300 {
            return v / n;
        }
    }
}

pub fn standard_normal_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Array1<f64> {
    (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

pub fn norm(v: ArrayView1<f64>) -> f64 {
    v.dot(&v).sqrt()
}

/// Rescale to unit norm. Panics on the zero vector.
pub fn normalize(v: Array1<f64>) -> Array1<f64> {
    let n = norm(v.view());
    assert!(n > 0.0, "cannot normalize the zero vector");
    v / n
}

/// Tangential projection `(I - θθᵀ) v` for unit `θ`.
pub fn project_tangent(theta: ArrayView1<f64>, v: ArrayView1<f64>) -> Array1<f64> {
    let c = theta.dot(&v);
    &v - &(&theta * c)
}
