use ndarray::linalg::general_mat_mul;
use ndarray::{Array1, Array2, Axis, Zip};
use serde::{Deserialize, Serialize};

use crate::boolean::{sample_with, BooleanJunta, ProductShift};
use crate::error::{LabError, Result};
use crate::rng::{streams, SeedStream};

use super::net::TwoLayerNet;

/// Joint online mini-batch SGD on the squared loss.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct JointConfig {
    pub batch: usize,
    pub rate: f64,
    pub max_epochs: usize,
    /// Fresh mini-batches per epoch.
    pub steps_per_epoch: usize,
    /// Fresh test samples drawn every epoch.
    pub test_size: usize,
    /// Stop once the test error drops below this value.
    pub threshold: Option<f64>,
}

impl Default for JointConfig {
    fn default() -> Self {
        Self {
            batch: 64,
            rate: 0.05,
            max_epochs: 400,
            steps_per_epoch: 100,
            test_size: 10_000,
            threshold: Some(1e-2),
        }
    }
}

impl JointConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch == 0 || self.steps_per_epoch == 0 || self.test_size == 0 {
            return Err(LabError::Config("batch, steps_per_epoch and test_size must be positive".into()));
        }
        if !(self.rate > 0.0 && self.rate.is_finite()) {
            return Err(LabError::Config(format!("rate must be positive, got {}", self.rate)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochError {
    pub epoch: usize,
    pub test_error: f64,
}

#[derive(Debug, Clone)]
pub struct JointOutcome {
    pub net: TwoLayerNet,
    pub trace: Vec<EpochError>,
    /// First epoch whose test error fell below the threshold.
    pub epochs_to_threshold: Option<usize>,
}

/// Trains `W`, `a` and `b` jointly; test MSE on a fresh sample after every
/// epoch. Training data and test data use separate streams of `seed`.
pub fn joint_sgd_train(
    net: &TwoLayerNet,
    f: &BooleanJunta,
    shift: &ProductShift,
    cfg: &JointConfig,
    seed: u64,
) -> Result<JointOutcome> {
    cfg.validate()?;
    if net.dimension() != f.dimension() || shift.dimension() != f.dimension() {
        return Err(LabError::Config("network, junta and shift dimensions differ".into()));
    }
    let root = SeedStream::new(seed);
    let mut data_rng = root.stream(streams::DATA);
    let mut test_rng = root.stream(streams::TEST);
    let mut net = net.clone();
    let (n, d, bsz) = (net.width(), net.dimension(), cfg.batch);
    let mut z = Array2::<f64>::zeros((bsz, n));
    let mut h = Array2::<f64>::zeros((bsz, n));
    let mut dw = Array2::<f64>::zeros((n, d));
    let mut trace = Vec::new();
    let mut hit = None;
    for epoch in 1..=cfg.max_epochs {
        for _ in 0..cfg.steps_per_epoch {
            let x = sample_with(shift, bsz, &mut data_rng);
            let y: Array1<f64> = x.rows().into_iter().map(|r| f.eval(r)).collect();
            general_mat_mul(1.0, &x, &net.w.t(), 0.0, &mut z);
            z += &net.b;
            Zip::from(&mut h).and(&z).for_each(|h, &z| *h = z.max(0.0));
            let r = (h.dot(&net.a) - &y) * (2.0 / bsz as f64);
            let da = h.t().dot(&r);
            // reuse z as the back-propagated pre-activation gradient
            Zip::from(z.rows_mut()).and(&r).for_each(|mut row, &ri| {
                Zip::from(&mut row).and(&net.a).for_each(|zv, &ai| {
                    *zv = if *zv > 0.0 { ri * ai } else { 0.0 };
                });
            });
            let db = z.sum_axis(Axis(0));
            general_mat_mul(1.0, &z.t(), &x, 0.0, &mut dw);
            net.w.scaled_add(-cfg.rate, &dw);
            net.a.scaled_add(-cfg.rate, &da);
            net.b.scaled_add(-cfg.rate, &db);
        }
        let err = test_error(&net, f, shift, cfg.test_size, &mut test_rng);
        if !err.is_finite() {
            return Err(LabError::Precondition(format!("training diverged at epoch {epoch}")));
        }
        trace.push(EpochError { epoch, test_error: err });
        if let Some(t) = cfg.threshold {
            if err < t {
                hit = Some(epoch);
                break;
            }
        }
    }
    Ok(JointOutcome {
        net,
        trace,
        epochs_to_threshold: hit,
    })
}

fn test_error<R: rand::Rng + ?Sized>(net: &TwoLayerNet, f: &BooleanJunta, shift: &ProductShift, size: usize, rng: &mut R) -> f64 {
    const CHUNK: usize = 2000;
    let mut total = 0.0;
    let mut left = size;
    while left > 0 {
        let m = left.min(CHUNK);
        let x = sample_with(shift, m, rng);
        let y: Array1<f64> = x.rows().into_iter().map(|r| f.eval(r)).collect();
        let r = net.forward(x.view()) - y;
        total += r.dot(&r);
        left -= m;
    }
    total / size as f64
}
