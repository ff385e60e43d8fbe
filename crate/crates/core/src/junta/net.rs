use std::fs;
use std::path::{Path, PathBuf};

use ndarray::{s, Array1, Array2, ArrayView2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// `N(x) = Σ_i a_i ReLU(⟨w_i, x⟩ + b_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoLayerNet {
    pub(crate) w: Array2<f64>,
    pub(crate) a: Array1<f64>,
    pub(crate) b: Array1<f64>,
}

impl TwoLayerNet {
    pub fn new(w: Array2<f64>, a: Array1<f64>, b: Array1<f64>) -> Result<Self> {
        let n = w.nrows();
        if a.len() != n || b.len() != n {
            return Err(LabError::Config(format!(
                "width mismatch: W has {n} rows, a has {}, b has {}",
                a.len(),
                b.len()
            )));
        }
        if !(w.iter().chain(a.iter()).chain(b.iter()).all(|v| v.is_finite())) {
            return Err(LabError::Config("non-finite network parameter".into()));
        }
        Ok(Self { w, a, b })
    }

    /// `W = 0`, `a = κ`, `b = κ`: every neuron active on every input.
    pub fn layerwise_init(width: usize, d: usize, kappa: f64) -> Self {
        Self {
            w: Array2::zeros((width, d)),
            a: Array1::from_elem(width, kappa),
            b: Array1::from_elem(width, kappa),
        }
    }

    /// Centered uniform with scale `1/√fan_in` per layer.
    pub fn uniform_init<R: Rng + ?Sized>(width: usize, d: usize, rng: &mut R) -> Self {
        let s1 = 1.0 / (d as f64).sqrt();
        let s2 = 1.0 / (width as f64).sqrt();
        let w = Array2::from_shape_fn((width, d), |_| rng.random_range(-s1..=s1));
        let b = Array1::from_shape_fn(width, |_| rng.random_range(-s1..=s1));
        let a = Array1::from_shape_fn(width, |_| rng.random_range(-s2..=s2));
        Self { w, a, b }
    }

    pub fn width(&self) -> usize {
        self.w.nrows()
    }

    pub fn dimension(&self) -> usize {
        self.w.ncols()
    }

    pub fn first_layer(&self) -> &Array2<f64> {
        &self.w
    }

    pub fn second_layer(&self) -> &Array1<f64> {
        &self.a
    }

    pub fn biases(&self) -> &Array1<f64> {
        &self.b
    }

    pub fn set_second_layer(&mut self, a: Array1<f64>) {
        assert_eq!(a.len(), self.width());
        self.a = a;
    }

    pub fn set_biases(&mut self, b: Array1<f64>) {
        assert_eq!(b.len(), self.width());
        self.b = b;
    }

    /// Pre-activations `X Wᵀ + b`, one row per input.
    pub fn preactivations(&self, x: ArrayView2<f64>) -> Array2<f64> {
        let mut z = x.dot(&self.w.t());
        z += &self.b;
        z
    }

    pub fn hidden(&self, x: ArrayView2<f64>) -> Array2<f64> {
        self.preactivations(x).mapv_into(|v| v.max(0.0))
    }

    pub fn forward(&self, x: ArrayView2<f64>) -> Array1<f64> {
        self.hidden(x).dot(&self.a)
    }

    pub(crate) fn is_layerwise_init(&self, kappa: f64) -> bool {
        self.w.iter().all(|&v| v == 0.0)
            && self.a.iter().all(|&v| v == kappa)
            && self.b.iter().all(|&v| v == kappa)
    }

    /// Writes `<stem>.bin` (little-endian f64: W row-major, then a, then b)
    /// and `<stem>.json` with the shapes.
    pub fn save(&self, stem: &Path) -> Result<(PathBuf, PathBuf)> {
        let (bin, json) = (with_suffix(stem, ".bin"), with_suffix(stem, ".json"));
        if let Some(dir) = stem.parent() {
            fs::create_dir_all(dir)?;
        }
        let mut bytes = Vec::with_capacity(8 * (self.w.len() + 2 * self.width()));
        for v in self.w.iter().chain(self.a.iter()).chain(self.b.iter()) {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        fs::write(&bin, bytes)?;
        let sidecar = CheckpointShapes {
            dtype: "f64-le".into(),
            arrays: vec![
                ArrayShape::new("W", vec![self.width(), self.dimension()]),
                ArrayShape::new("a", vec![self.width()]),
                ArrayShape::new("b", vec![self.width()]),
            ],
        };
        fs::write(&json, serde_json::to_string_pretty(&sidecar)?)?;
        Ok((bin, json))
    }

    pub fn load(stem: &Path) -> Result<Self> {
        let sidecar: CheckpointShapes = serde_json::from_str(&fs::read_to_string(with_suffix(stem, ".json"))?)?;
        if sidecar.dtype != "f64-le" || sidecar.arrays.len() != 3 || sidecar.arrays[0].shape.len() != 2 {
            return Err(LabError::Parse("unrecognized checkpoint sidecar".into()));
        }
        let (n, d) = (sidecar.arrays[0].shape[0], sidecar.arrays[0].shape[1]);
        let bytes = fs::read(with_suffix(stem, ".bin"))?;
        if bytes.len() != 8 * (n * d + 2 * n) {
            return Err(LabError::Parse(format!("checkpoint holds {} bytes, expected {}", bytes.len(), 8 * (n * d + 2 * n))));
        }
        let flat: Vec<f64> = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect();
        let all = Array1::from(flat);
        let w = all.slice(s![..n * d]).to_owned().into_shape_with_order((n, d)).expect("shape checked");
        let a = all.slice(s![n * d..n * d + n]).to_owned();
        let b = all.slice(s![n * d + n..]).to_owned();
        Self::new(w, a, b)
    }

    /// Mean squared error against target values.
    pub fn mse(&self, x: ArrayView2<f64>, y: &Array1<f64>) -> f64 {
        let p = self.forward(x);
        (&p - y).mapv(|v| v * v).mean().unwrap_or(0.0)
    }

    /// Mean over rows of the squared loss gradient, `(dW, da, db)`.
    pub fn squared_loss_gradient(&self, x: ArrayView2<f64>, y: &Array1<f64>) -> (Array2<f64>, Array1<f64>, Array1<f64>) {
        let z = self.preactivations(x);
        let h = z.mapv(|v| v.max(0.0));
        let r = (h.dot(&self.a) - y) * (2.0 / x.nrows() as f64);
        let da = h.t().dot(&r);
        let mut g = z.mapv(|v| if v > 0.0 { 1.0 } else { 0.0 });
        g *= &self.a;
        g *= &r.view().insert_axis(Axis(1));
        let db = g.sum_axis(Axis(0));
        let dw = g.t().dot(&x);
        (dw, da, db)
    }
}

/// `stem` plus a suffix; unlike `with_extension`, dots in the stem survive.
fn with_suffix(stem: &Path, suffix: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

#[derive(Debug, Serialize, Deserialize)]
struct CheckpointShapes {
    dtype: String,
    arrays: Vec<ArrayShape>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ArrayShape {
    name: String,
    shape: Vec<usize>,
}

impl ArrayShape {
    fn new(name: &str, shape: Vec<usize>) -> Self {
        Self {
            name: name.into(),
            shape,
        }
    }
}
