use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::rng::{streams, SeedStream};

use super::fourier::{first_order_shifted_closed_form, influence};
use super::junta::BooleanJunta;
use super::shift::{ProductShift, MAX_ETA};

/// One `(j, ε)` cell of the small-coefficient sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prop31Row {
    pub j: usize,
    pub epsilon: f64,
    pub estimate: f64,
    pub std_error: f64,
}

/// Monte Carlo over `μ ~ Unif[-η, η]^d` of
/// `P(|f̂_μ({j})| < ε η^{k-1} √Inf_j(f))` for every `j` in the support.
///
/// Only the support coordinates of `μ` matter, so only those are drawn. Draw
/// `i` uses its own child seed, making results independent of scheduling.
pub fn prop31_sweep(
    f: &BooleanJunta,
    eta: f64,
    epsilon_grid: &[f64],
    n_mu: usize,
    seed: u64,
) -> Result<Vec<Prop31Row>> {
    if !(eta > 0.0 && eta <= MAX_ETA) {
        return Err(LabError::Config(format!("eta = {eta} outside (0, {MAX_ETA}]")));
    }
    if n_mu == 0 {
        return Err(LabError::Config("n_mu must be positive".into()));
    }
    let k = f.k();
    let d = f.dimension();
    let root = SeedStream::new(seed);
    // |f̂_μ({j})| per draw, per support position
    let draws: Vec<Vec<f64>> = (0..n_mu as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = root.child(i).stream(streams::SHIFT);
            let mut mu = vec![0.0; d];
            for &j in f.support() {
                mu[j] = rng.random_range(-eta..=eta);
            }
            let shift = ProductShift::with_bound(mu, eta)?;
            f.support()
                .iter()
                .map(|&j| Ok(first_order_shifted_closed_form(f, j, &shift)?.value.abs()))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;

    let scale = eta.powi(k as i32 - 1);
    let mut rows = Vec::with_capacity(k * epsilon_grid.len());
    for (pos, &j) in f.support().iter().enumerate() {
        let inf = influence(f, j).sqrt();
        for &eps in epsilon_grid {
            let thr = eps * scale * inf;
            let hits = draws.iter().filter(|v| v[pos] < thr).count();
            let p = hits as f64 / n_mu as f64;
            rows.push(Prop31Row {
                j,
                epsilon: eps,
                estimate: p,
                std_error: (p * (1.0 - p) / n_mu as f64).sqrt(),
            });
        }
    }
    Ok(rows)
}

/// Exact value of the sweep probability for `f = x_a x_b` at either support
/// coordinate: `E_u[min(1, ε/√(1-u²))]` with `u ~ Unif[-η, η]`.
pub fn pair_product_small_coefficient(epsilon: f64, eta: f64) -> f64 {
    // the min switches to 1 once |u| > √(1-ε²)
    let u0 = if epsilon < 1.0 { (1.0 - epsilon * epsilon).sqrt() } else { 0.0 };
    (epsilon * eta.min(u0).asin() + (eta - u0).max(0.0)) / eta
}

/// Least-squares slope of `log y` against `log x`, skipping non-positive pairs.
/// `None` with fewer than two usable points.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0)
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}
