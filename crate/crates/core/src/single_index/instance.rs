use ndarray::{Array1, Array2, Axis};
use rand_distr::{Distribution, StandardNormal};

use crate::error::{LabError, Result};
use crate::hermite::LinkFunction;
use crate::linalg::{norm, random_unit_vector, standard_normal_vector};
use crate::rng::{streams, SeedStream};

/// `y = f(⟨w*, x⟩) + ζ` with `x ~ N(α, I_d)` (or `N(0, I_d)` unshifted).
#[derive(Debug, Clone)]
pub struct SingleIndexInstance {
    pub dimension_d: usize,
    pub signal_wstar: Array1<f64>,
    pub shift_alpha: Array1<f64>,
    pub link: LinkFunction,
    pub noise_sigma: f64,
}

impl SingleIndexInstance {
    pub fn new(signal_wstar: Array1<f64>, shift_alpha: Array1<f64>, link: LinkFunction, noise_sigma: f64) -> Result<Self> {
        let d = signal_wstar.len();
        if d == 0 || shift_alpha.len() != d {
            return Err(LabError::Config(format!(
                "dimension mismatch: w* has {d} entries, alpha has {}",
                shift_alpha.len()
            )));
        }
        if (norm(signal_wstar.view()) - 1.0).abs() > 1e-12 {
            return Err(LabError::Config("w* must have unit norm".into()));
        }
        if !(noise_sigma >= 0.0) {
            return Err(LabError::Config(format!("noise_sigma must be nonnegative, got {noise_sigma}")));
        }
        Ok(Self {
            dimension_d: d,
            signal_wstar,
            shift_alpha,
            link,
            noise_sigma,
        })
    }

    /// `w*` uniform on the sphere; `α ~ N(0, I_d)` when `shifted`, else 0.
    pub fn random(d: usize, link: LinkFunction, shifted: bool, noise_sigma: f64, seed: u64) -> Result<Self> {
        let root = SeedStream::new(seed);
        let w = random_unit_vector(d, &mut root.stream(streams::INIT));
        let alpha = if shifted {
            standard_normal_vector(d, &mut root.stream(streams::SHIFT))
        } else {
            Array1::zeros(d)
        };
        Self::new(w, alpha, link, noise_sigma)
    }

    /// Same target with a different shift.
    pub fn with_shift(&self, shift_alpha: Array1<f64>) -> Result<Self> {
        Self::new(self.signal_wstar.clone(), shift_alpha, self.link.clone(), self.noise_sigma)
    }

    /// `μ* = ⟨w*, α⟩`.
    pub fn mu_star(&self) -> f64 {
        self.signal_wstar.dot(&self.shift_alpha)
    }

    pub fn overlap(&self, theta: &Array1<f64>) -> f64 {
        theta.dot(&self.signal_wstar)
    }

    /// Noiseless `f(⟨w*, x⟩)` per row.
    pub fn clean_labels(&self, inputs: &Array2<f64>) -> Array1<f64> {
        inputs.dot(&self.signal_wstar).mapv(|v| self.link.eval(v))
    }

    /// Removes the shift: `x̃ = x - α`.
    pub fn center(&self, inputs: &Array2<f64>) -> Array2<f64> {
        inputs - &self.shift_alpha.view().insert_axis(Axis(0))
    }
}

/// `n` i.i.d. inputs and noisy labels; deterministic given the seed.
pub fn sample_batch(inst: &SingleIndexInstance, n: usize, shifted: bool, seed: u64) -> Result<(Array2<f64>, Array1<f64>)> {
    let root = SeedStream::new(seed);
    sample_batch_with(inst, n, shifted, &mut root.stream(streams::DATA), &mut root.stream(streams::NOISE))
}

pub(crate) fn sample_batch_with<R: rand::Rng + ?Sized>(
    inst: &SingleIndexInstance,
    n: usize,
    shifted: bool,
    data: &mut R,
    noise: &mut R,
) -> Result<(Array2<f64>, Array1<f64>)> {
    if n == 0 {
        return Err(LabError::Config("batch size must be at least 1".into()));
    }
    let d = inst.dimension_d;
    let mut x = Array2::from_shape_fn((n, d), |_| StandardNormal.sample(data));
    if shifted {
        x += &inst.shift_alpha.view().insert_axis(Axis(0));
    }
    let mut y = inst.clean_labels(&x);
    if inst.noise_sigma > 0.0 {
        for v in y.iter_mut() {
            let z: f64 = StandardNormal.sample(noise);
            *v += inst.noise_sigma * z;
        }
    }
    Ok((x, y))
}
