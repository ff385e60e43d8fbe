use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::boolean::{fourier_coefficient_exact, sample_with, BooleanJunta, ProductShift};
use crate::error::{LabError, Result};
use crate::rng::{streams, SeedStream};

use super::net::TwoLayerNet;

/// Rows drawn per chunk when streaming a large first-layer batch.
const CHUNK: usize = 4096;

/// How the covariance loss centers `f` and the predictor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Centering {
    /// Batch means (an implementable online rule).
    #[default]
    Batch,
    /// Exact `E_μ[f]` and `E_μ[x] = μ`; an oracle for tests.
    Population,
}

/// Convex loss for the second phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SecondLoss {
    #[default]
    Squared,
    Covariance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LayerwiseConfig {
    pub width_n: usize,
    pub batch_b: usize,
    pub first_rate_gamma: f64,
    /// `None` selects `𝓑 / (A √T)`.
    pub second_rate_xi: Option<f64>,
    pub init_kappa: f64,
    pub bias_range_l: f64,
    pub second_steps_t: usize,
    /// Fresh samples per second-layer step.
    pub second_batch: usize,
    /// `None` selects `10 κ R √N`.
    pub grad_bound_a: Option<f64>,
    pub ball_radius_b2: f64,
    pub centering: Centering,
    pub seed: u64,
}

impl Default for LayerwiseConfig {
    fn default() -> Self {
        Self {
            width_n: 64,
            batch_b: 3_000_000,
            first_rate_gamma: 2.0,
            second_rate_xi: None,
            init_kappa: 1.0,
            bias_range_l: 2.0,
            second_steps_t: 100_000,
            second_batch: 16,
            grad_bound_a: None,
            ball_radius_b2: default_ball_radius(0.1, 0.5, 2),
            centering: Centering::Batch,
            seed: 0,
        }
    }
}

impl LayerwiseConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("first_rate_gamma", self.first_rate_gamma),
            ("init_kappa", self.init_kappa),
            ("bias_range_l", self.bias_range_l),
            ("ball_radius_b2", self.ball_radius_b2),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(LabError::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.bias_range_l < self.init_kappa {
            return Err(LabError::Config(format!(
                "bias_range_l = {} must be at least init_kappa = {}",
                self.bias_range_l, self.init_kappa
            )));
        }
        if self.width_n == 0 || self.batch_b < 2 || self.second_steps_t == 0 || self.second_batch == 0 {
            return Err(LabError::Config("width, batch sizes and step count must be positive (batch_b ≥ 2)".into()));
        }
        if let Some(xi) = self.second_rate_xi {
            if !(xi > 0.0) {
                return Err(LabError::Config(format!("second_rate_xi must be positive, got {xi}")));
            }
        }
        if let Some(a) = self.grad_bound_a {
            if !(a > 0.0) {
                return Err(LabError::Config(format!("grad_bound_a must be positive, got {a}")));
            }
        }
        Ok(())
    }

    /// Clip level `A`, given the target bound `R`.
    pub fn grad_bound(&self, bound_r: f64) -> f64 {
        self.grad_bound_a
            .unwrap_or_else(|| default_grad_bound(self.init_kappa, bound_r, self.width_n))
    }

    pub fn second_rate(&self, bound_r: f64) -> f64 {
        self.second_rate_xi.unwrap_or_else(|| {
            self.ball_radius_b2 / (self.grad_bound(bound_r) * (self.second_steps_t as f64).sqrt())
        })
    }
}

/// `A = 10 κ R √N`.
pub fn default_grad_bound(kappa: f64, bound_r: f64, width: usize) -> f64 {
    10.0 * kappa * bound_r * (width as f64).sqrt()
}

/// `𝓑 = ε^{-1} η^{-(k+1)}` with unit constant.
pub fn default_ball_radius(epsilon: f64, eta: f64, k: usize) -> f64 {
    1.0 / (epsilon * eta.powi(k as i32 + 1))
}

/// Batch size `2 ζ^{-2} κ² R² log(N d / ε)` for entrywise accuracy `ζ`.
pub fn concentration_batch(zeta: f64, kappa: f64, bound_r: f64, width: usize, d: usize, eps: f64) -> usize {
    (2.0 * kappa * kappa * bound_r * bound_r / (zeta * zeta) * ((width * d) as f64 / eps).ln()).ceil() as usize
}

/// Batch average of `-(f - f_mean)(pred - pred_mean)`.
pub fn covariance_loss(fvals: &[f64], preds: &[f64], f_mean: f64, pred_mean: f64) -> f64 {
    assert_eq!(fvals.len(), preds.len());
    if fvals.is_empty() {
        return 0.0;
    }
    -fvals
        .iter()
        .zip(preds)
        .map(|(f, p)| (f - f_mean) * (p - pred_mean))
        .sum::<f64>()
        / fvals.len() as f64
}

/// Gradient of the batch-centered covariance loss in all parameters.
///
/// With batch means `Σ(f - f̄) = 0`, so the predictor mean drops out and the
/// gradient is `-(1/n) Σ (f - f̄) ∂N`.
pub fn covariance_loss_gradient(net: &TwoLayerNet, x: ArrayView2<f64>, fvals: &Array1<f64>) -> (Array2<f64>, Array1<f64>, Array1<f64>) {
    let n = x.nrows() as f64;
    let fbar = fvals.mean().unwrap_or(0.0);
    let r = fvals.mapv(|f| -(f - fbar) / n);
    let z = net.preactivations(x);
    let h = z.mapv(|v| v.max(0.0));
    let da = h.t().dot(&r);
    let mut g = z.mapv(|v| if v > 0.0 { 1.0 } else { 0.0 });
    g *= &net.a;
    g *= &r.view().insert_axis(Axis(1));
    let db = g.sum_axis(Axis(0));
    let dw = g.t().dot(&x);
    (dw, da, db)
}

/// `α_j = κ f̂_μ({j}) √(1 - μ_j²)`: the negated covariance-loss gradient in
/// `w_ij` at the layerwise initialization, identical for every neuron.
pub fn first_layer_population_gradient(f: &BooleanJunta, shift: &ProductShift, j: usize, kappa: f64) -> Result<f64> {
    if f.position(j).is_none() {
        return Ok(0.0);
    }
    let c = fourier_coefficient_exact(f, &[j], shift)?;
    let m = shift.mu()[j];
    Ok(kappa * c * (1.0 - m * m).sqrt())
}

pub fn first_layer_population_gradients(f: &BooleanJunta, shift: &ProductShift, kappa: f64) -> Result<Array1<f64>> {
    (0..f.dimension())
        .map(|j| first_layer_population_gradient(f, shift, j, kappa))
        .collect()
}

/// Exact `E_μ[f]` by enumeration over the support.
pub fn junta_mean(f: &BooleanJunta, shift: &ProductShift) -> f64 {
    let mu: Vec<f64> = f.support().iter().map(|&j| shift.mu()[j]).collect();
    f.table()
        .iter()
        .enumerate()
        .map(|(b, v)| {
            let s = f.pattern_signs(b);
            v * s.iter().zip(&mu).map(|(s, m)| 0.5 * (1.0 + s * m)).product::<f64>()
        })
        .sum()
}

/// Batch estimate of the `α` vector (same sign convention as
/// [`first_layer_population_gradient`]) from `cfg.batch_b` samples on the
/// data stream of `cfg.seed`. Streams in chunks, so `B` may be large.
pub fn first_layer_empirical_gradient(f: &BooleanJunta, shift: &ProductShift, cfg: &LayerwiseConfig) -> Result<Array1<f64>> {
    cfg.validate()?;
    if shift.dimension() != f.dimension() {
        return Err(LabError::Config("shift and junta dimensions differ".into()));
    }
    let d = f.dimension();
    let mut rng = SeedStream::new(cfg.seed).stream(streams::DATA);
    let mut sum_fx = Array1::<f64>::zeros(d);
    let mut sum_x = Array1::<f64>::zeros(d);
    let mut sum_f = 0.0;
    let mut left = cfg.batch_b;
    let (f_pop, mu) = (junta_mean(f, shift), Array1::from(shift.mu().to_vec()));
    while left > 0 {
        let m = left.min(CHUNK);
        let x = sample_with(shift, m, &mut rng);
        let fv: Array1<f64> = x.rows().into_iter().map(|r| f.eval(r)).collect();
        match cfg.centering {
            Centering::Batch => {
                sum_fx += &x.t().dot(&fv);
                sum_x += &x.sum_axis(Axis(0));
                sum_f += fv.sum();
            }
            Centering::Population => {
                let xc = &x - &mu;
                sum_fx += &xc.t().dot(&(fv - f_pop));
            }
        }
        left -= m;
    }
    let n = cfg.batch_b as f64;
    let cov = match cfg.centering {
        Centering::Batch => sum_fx / n - sum_x * (sum_f / n / n),
        Centering::Population => sum_fx / n,
    };
    Ok(cov * cfg.init_kappa)
}

/// One covariance-loss SGD step on `W` from the layerwise initialization,
/// then `b_i ~ Unif[-L, L]` on the bias stream.
pub fn first_layer_step(net: &TwoLayerNet, f: &BooleanJunta, shift: &ProductShift, cfg: &LayerwiseConfig) -> Result<TwoLayerNet> {
    if !net.is_layerwise_init(cfg.init_kappa) {
        return Err(LabError::Precondition(
            "first-layer step needs W = 0, a = κ, b = κ".into(),
        ));
    }
    if net.dimension() != f.dimension() {
        return Err(LabError::Config("network and junta dimensions differ".into()));
    }
    let g = first_layer_empirical_gradient(f, shift, cfg)?;
    let row = g * cfg.first_rate_gamma;
    let mut out = net.clone();
    for mut r in out.w.rows_mut() {
        r.assign(&row);
    }
    let mut rng = SeedStream::new(cfg.seed).stream(streams::BIAS);
    let l = cfg.bias_range_l;
    out.b = Array1::from_shape_fn(net.width(), |_| rng.random_range(-l..=l));
    Ok(out)
}

/// Result of projected, clipped SGD on a convex objective.
#[derive(Debug, Clone)]
pub struct ConvexSgdOutcome {
    pub average: Array1<f64>,
    pub last: Array1<f64>,
    /// Block means of the per-step losses, at most 1000 entries.
    pub loss_trace: Vec<f64>,
    /// Mean of all per-step losses.
    pub mean_loss: f64,
}

/// `a ← Π_𝓑(a - rate · clip_A(g))` from `a = 0`, tracking the running average.
pub fn projected_sgd<G>(dim: usize, steps: usize, rate: f64, clip: f64, radius: f64, mut grad: G) -> ConvexSgdOutcome
where
    G: FnMut(&Array1<f64>, usize) -> (f64, Array1<f64>),
{
    let mut a = Array1::<f64>::zeros(dim);
    let mut avg = Array1::<f64>::zeros(dim);
    let block = steps.div_ceil(1000).max(1);
    let mut trace = Vec::with_capacity(steps / block + 1);
    let (mut acc, mut acc_n, mut total) = (0.0, 0usize, 0.0);
    for t in 0..steps {
        let (loss, mut g) = grad(&a, t);
        avg.scaled_add(1.0 / steps as f64, &a);
        total += loss;
        acc += loss;
        acc_n += 1;
        if acc_n == block {
            trace.push(acc / block as f64);
            acc = 0.0;
            acc_n = 0;
        }
        let gn = g.dot(&g).sqrt();
        if gn > clip {
            g *= clip / gn;
        }
        a.scaled_add(-rate, &g);
        let an = a.dot(&a).sqrt();
        if an > radius {
            a *= radius / an;
        }
    }
    if acc_n > 0 {
        trace.push(acc / acc_n as f64);
    }
    ConvexSgdOutcome {
        average: avg,
        last: a,
        loss_trace: trace,
        mean_loss: total / steps.max(1) as f64,
    }
}

#[derive(Debug, Clone)]
pub struct SecondLayerOutcome {
    /// Network carrying the averaged second layer.
    pub net: TwoLayerNet,
    pub last_iterate: Array1<f64>,
    pub loss_trace: Vec<f64>,
    pub rate: f64,
    pub grad_bound: f64,
}

/// Trains `a` only, from `a = 0`, on fresh batches from `D_μ`.
pub fn second_layer_train(
    net: &TwoLayerNet,
    f: &BooleanJunta,
    shift: &ProductShift,
    cfg: &LayerwiseConfig,
    loss: SecondLoss,
) -> Result<SecondLayerOutcome> {
    cfg.validate()?;
    if loss == SecondLoss::Covariance && cfg.second_batch < 2 {
        return Err(LabError::Config("covariance loss needs second_batch ≥ 2".into()));
    }
    let rate = cfg.second_rate(f.bound());
    let clip = cfg.grad_bound(f.bound());
    let mut rng = SeedStream::new(cfg.seed).stream(streams::STEP2);
    let nb = cfg.second_batch;
    let outcome = projected_sgd(net.width(), cfg.second_steps_t, rate, clip, cfg.ball_radius_b2, |a, _| {
        let x = sample_with(shift, nb, &mut rng);
        let fv: Array1<f64> = x.rows().into_iter().map(|r| f.eval(r)).collect();
        let h = net.hidden(x.view());
        let p = h.dot(a);
        match loss {
            SecondLoss::Squared => {
                let r = &p - &fv;
                let l = r.dot(&r) / nb as f64;
                (l, h.t().dot(&r) * (2.0 / nb as f64))
            }
            SecondLoss::Covariance => {
                let fbar = fv.mean().unwrap_or(0.0);
                let pbar = p.mean().unwrap_or(0.0);
                let l = covariance_loss(fv.as_slice().unwrap(), p.as_slice().unwrap(), fbar, pbar);
                let fc = fv.mapv(|v| v - fbar);
                (l, h.t().dot(&fc) * (-1.0 / nb as f64))
            }
        }
    });
    let mut trained = net.clone();
    trained.a = outcome.average;
    Ok(SecondLayerOutcome {
        net: trained,
        last_iterate: outcome.last,
        loss_trace: outcome.loss_trace,
        rate,
        grad_bound: clip,
    })
}

/// Monte Carlo test MSE on `n` fresh samples from the test stream of `seed`.
pub fn test_mse(net: &TwoLayerNet, f: &BooleanJunta, shift: &ProductShift, n: usize, seed: u64) -> f64 {
    let mut rng = SeedStream::new(seed).stream(streams::TEST);
    let mut total = 0.0;
    let mut left = n;
    while left > 0 {
        let m = left.min(CHUNK);
        let x = sample_with(shift, m, &mut rng);
        let fv: Array1<f64> = x.rows().into_iter().map(|r| f.eval(r)).collect();
        let r = net.forward(x.view()) - fv;
        total += r.dot(&r);
        left -= m;
    }
    total / n as f64
}

/// Exact `E_μ[(N - f)²]` when `W` vanishes off the support.
pub fn population_mse_exact(net: &TwoLayerNet, f: &BooleanJunta, shift: &ProductShift) -> Result<f64> {
    let support = f.support();
    for (j, col) in net.w.columns().into_iter().enumerate() {
        if !support.contains(&j) && col.iter().any(|&v| v != 0.0) {
            return Err(LabError::Precondition(format!("W has weight on off-support coordinate {j}")));
        }
    }
    let k = f.k();
    let mut x = Array2::<f64>::zeros((1 << k, f.dimension()));
    let mut weights = vec![1.0; 1 << k];
    for b in 0..1usize << k {
        for (p, s) in f.pattern_signs(b).into_iter().enumerate() {
            x[[b, support[p]]] = s;
            weights[b] *= 0.5 * (1.0 + s * shift.mu()[support[p]]);
        }
    }
    let pred = net.forward(x.view());
    Ok(pred
        .iter()
        .zip(f.table())
        .zip(&weights)
        .map(|((p, v), w)| w * (p - v) * (p - v))
        .sum())
}

/// Everything produced by the layerwise pipeline.
#[derive(Debug, Clone)]
pub struct LayerwiseOutcome {
    pub net: TwoLayerNet,
    pub alpha_hat: Array1<f64>,
    pub test_mse: f64,
    pub loss_trace: Vec<f64>,
}

/// First-layer step, bias resampling, then second-layer training; test MSE on
/// `test_size` fresh samples.
pub fn run_layerwise(
    f: &BooleanJunta,
    shift: &ProductShift,
    cfg: &LayerwiseConfig,
    loss: SecondLoss,
    test_size: usize,
) -> Result<LayerwiseOutcome> {
    let init = TwoLayerNet::layerwise_init(cfg.width_n, f.dimension(), cfg.init_kappa);
    let net = first_layer_step(&init, f, shift, cfg)?;
    let alpha_hat = net.w.row(0).to_owned() / cfg.first_rate_gamma;
    let second = second_layer_train(&net, f, shift, cfg, loss)?;
    let test_mse = test_mse(&second.net, f, shift, test_size, cfg.seed);
    Ok(LayerwiseOutcome {
        net: second.net,
        alpha_hat,
        test_mse,
        loss_trace: second.loss_trace,
    })
}
