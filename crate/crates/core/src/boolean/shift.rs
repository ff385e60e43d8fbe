use ndarray::Array2;
use rand::Rng;

use crate::error::{LabError, Result};
use crate::rng::{streams, SeedStream};

/// Queried coordinates with `|μ_i| ≥ 1 - DEGENERACY_MARGIN` are rejected.
pub const DEGENERACY_MARGIN: f64 = 1e-9;

/// Largest shift magnitude covered by the first-order guarantees.
pub const MAX_ETA: f64 = 0.75;

/// Product measure `⊗_i Rad((μ_i + 1)/2)`, so `E[x_i] = μ_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductShift {
    mu: Vec<f64>,
    eta_bound: f64,
}

impl ProductShift {
    /// Uses `max |μ_i|` as the bound; entries must lie in `(-1, 1)`.
    pub fn new(mu: Vec<f64>) -> Result<Self> {
        if let Some(m) = mu.iter().find(|m| !(m.abs() < 1.0)) {
            return Err(LabError::Config(format!("shift entry {m} outside (-1, 1)")));
        }
        let eta_bound = mu.iter().fold(0.0f64, |e, m| e.max(m.abs()));
        Ok(Self { mu, eta_bound })
    }

    pub fn with_bound(mu: Vec<f64>, eta_bound: f64) -> Result<Self> {
        if !(0.0..=MAX_ETA).contains(&eta_bound) {
            return Err(LabError::Config(format!("eta bound {eta_bound} outside [0, {MAX_ETA}]")));
        }
        let mut s = Self::new(mu)?;
        if s.eta_bound > eta_bound {
            return Err(LabError::Config(format!(
                "max |mu| = {} exceeds the bound {eta_bound}",
                s.eta_bound
            )));
        }
        s.eta_bound = eta_bound;
        Ok(s)
    }

    pub fn zero(d: usize) -> Self {
        Self {
            mu: vec![0.0; d],
            eta_bound: 0.0,
        }
    }

    /// `μ ~ Unif[-η, η]^d`.
    pub fn uniform<R: Rng + ?Sized>(d: usize, eta: f64, rng: &mut R) -> Result<Self> {
        let mu = (0..d)
            .map(|_| if eta > 0.0 { rng.random_range(-eta..=eta) } else { 0.0 })
            .collect();
        Self::with_bound(mu, eta)
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn eta_bound(&self) -> f64 {
        self.eta_bound
    }

    pub fn dimension(&self) -> usize {
        self.mu.len()
    }

    pub(crate) fn check_nondegenerate(&self, coords: &[usize]) -> Result<()> {
        for &i in coords {
            let m = *self
                .mu
                .get(i)
                .ok_or_else(|| LabError::Config(format!("coordinate {i} outside the shift dimension")))?;
            if m.abs() >= 1.0 - DEGENERACY_MARGIN {
                return Err(LabError::DegenerateShift(format!("|mu_{i}| = {} is too close to 1", m.abs())));
            }
        }
        Ok(())
    }
}

/// `n` i.i.d. draws from the product measure, one row per sample.
pub fn sample_shifted(shift: &ProductShift, n: usize, seed: u64) -> Array2<f64> {
    let mut rng = SeedStream::new(seed).stream(streams::DATA);
    sample_with(shift, n, &mut rng)
}

pub(crate) fn sample_with<R: Rng + ?Sized>(shift: &ProductShift, n: usize, rng: &mut R) -> Array2<f64> {
    let d = shift.dimension();
    let probs: Vec<f64> = shift.mu.iter().map(|m| 0.5 * (1.0 + m)).collect();
    Array2::from_shape_fn((n, d), |(_, j)| if rng.random::<f64>() < probs[j] { 1.0 } else { -1.0 })
}
