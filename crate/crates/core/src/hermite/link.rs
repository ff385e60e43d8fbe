use std::fmt;
use std::sync::Arc;

use crate::error::{LabError, Result};

use super::poly::{hermite_derivative, hermite_eval, MAX_HERMITE_ORDER};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Polynomial links are not globally Lipschitz; their constant is the
/// supremum of `|f'|` on `|x| ≤ LIPSCHITZ_WINDOW`.
pub const LIPSCHITZ_WINDOW: f64 = 5.0;

/// Witnesses `(ε, δ, c)` with `|f'(c+s) - f'(c-s)| > ε` for all `δ/2 < s < δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nonlinearity {
    pub epsilon: f64,
    pub delta: f64,
    pub c: f64,
}

/// A scalar target `f` together with the metadata the learners need.
#[derive(Clone)]
pub struct LinkFunction {
    label: String,
    eval: ScalarFn,
    derivative: Option<ScalarFn>,
    lipschitz_l: f64,
    nonlinearity: Option<Nonlinearity>,
    /// Points where `f` or `f'` is not smooth.
    kinks: Vec<f64>,
}

impl fmt::Debug for LinkFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LinkFunction")
            .field("label", &self.label)
            .field("lipschitz_l", &self.lipschitz_l)
            .field("has_derivative", &self.derivative.is_some())
            .field("nonlinearity", &self.nonlinearity)
            .field("kinks", &self.kinks)
            .finish()
    }
}

impl LinkFunction {
    /// Arbitrary link. Nonlinearity witnesses are searched for when a
    /// derivative is supplied.
    pub fn custom<F, D>(label: impl Into<String>, eval: F, derivative: Option<D>, lipschitz_l: f64) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let derivative: Option<ScalarFn> = derivative.map(|d| Arc::new(d) as ScalarFn);
        let nonlinearity = derivative.as_ref().and_then(|d| find_nonlinearity(d.as_ref()));
        Self {
            label: label.into(),
            eval: Arc::new(eval),
            derivative,
            lipschitz_l,
            nonlinearity,
            kinks: Vec::new(),
        }
    }

    pub fn linear() -> Self {
        Self::custom("linear", |x| x, Some(|_| 1.0), 1.0)
    }

    /// `ReLU`; the derivative is the a.e. indicator `1{x > 0}`.
    pub fn relu() -> Self {
        let mut f = Self::custom("relu", |x: f64| x.max(0.0), Some(|x: f64| if x > 0.0 { 1.0 } else { 0.0 }), 1.0);
        f.kinks = vec![0.0];
        f
    }

    pub fn sigmoid() -> Self {
        fn s(x: f64) -> f64 {
            1.0 / (1.0 + (-x).exp())
        }
        Self::custom("sigmoid", s, Some(|x| s(x) * (1.0 - s(x))), 0.25)
    }

    /// Normalized Hermite polynomial `H_k` as a link.
    pub fn hermite(k: usize) -> Result<Self> {
        if k > MAX_HERMITE_ORDER {
            return Err(LabError::UnsupportedOrder {
                order: k,
                max: MAX_HERMITE_ORDER,
            });
        }
        let deriv = move |x: f64| hermite_derivative(k, x).expect("order checked");
        let l = window_sup(&deriv);
        Ok(Self::custom(
            format!("hermite:{k}"),
            move |x| hermite_eval(k, x).expect("order checked"),
            Some(deriv),
            l.max(f64::MIN_POSITIVE),
        ))
    }

    /// `c0 + c1 x + c2 x² + ...`
    pub fn poly(coeffs: Vec<f64>) -> Self {
        let label = format!(
            "poly:{}",
            coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
        );
        let dcoeffs: Vec<f64> = coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| i as f64 * c)
            .collect();
        let deriv = move |x: f64| horner(&dcoeffs, x);
        let l = window_sup(&deriv);
        Self::custom(label, move |x| horner(&coeffs, x), Some(deriv), l.max(f64::MIN_POSITIVE))
    }

    /// Parses `relu`, `sigmoid`, `linear`, `hermite:k` or `poly:c0,c1,...`.
    pub fn from_name(name: &str) -> Result<Self> {
        let name = name.trim();
        match name {
            "relu" => return Ok(Self::relu()),
            "sigmoid" => return Ok(Self::sigmoid()),
            "linear" => return Ok(Self::linear()),
            _ => {}
        }
        if let Some(k) = name.strip_prefix("hermite:") {
            let k: usize = k
                .parse()
                .map_err(|_| LabError::Parse(format!("bad Hermite order in `{name}`")))?;
            return Self::hermite(k);
        }
        if let Some(list) = name.strip_prefix("poly:") {
            let coeffs = list
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| LabError::Parse(format!("bad polynomial coefficients in `{name}`")))?;
            if coeffs.is_empty() {
                return Err(LabError::Parse("empty polynomial".into()));
            }
            return Ok(Self::poly(coeffs));
        }
        Err(LabError::Parse(format!("unknown link `{name}`")))
    }

    /// Declares points where `f` or `f'` is not smooth, so quadrature can
    /// split there.
    pub fn with_kinks(mut self, kinks: Vec<f64>) -> Self {
        self.kinks = kinks;
        self
    }

    /// The shifted link `f_μ(x) = f(x + μ)`.
    pub fn shifted(&self, mu: f64) -> Self {
        let eval = Arc::clone(&self.eval);
        let derivative = self.derivative.as_ref().map(|d| {
            let d = Arc::clone(d);
            Arc::new(move |x: f64| d(x + mu)) as ScalarFn
        });
        Self {
            label: format!("{}@{mu}", self.label),
            eval: Arc::new(move |x| eval(x + mu)),
            derivative,
            lipschitz_l: self.lipschitz_l,
            nonlinearity: self.nonlinearity.map(|n| Nonlinearity { c: n.c - mu, ..n }),
            kinks: self.kinks.iter().map(|k| k - mu).collect(),
        }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    /// `f'(x)`, or `None` when no derivative was supplied.
    #[inline]
    pub fn derivative(&self, x: f64) -> Option<f64> {
        self.derivative.as_ref().map(|d| d(x))
    }

    pub fn has_derivative(&self) -> bool {
        self.derivative.is_some()
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz_l
    }

    pub fn nonlinearity(&self) -> Option<Nonlinearity> {
        self.nonlinearity
    }

    pub fn kinks(&self) -> &[f64] {
        &self.kinks
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Breakpoints of `z ↦ f(z + μ)`.
    pub fn kinks_shifted(&self, mu: f64) -> Vec<f64> {
        self.kinks.iter().map(|k| k - mu).collect()
    }
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

fn window_sup(g: &dyn Fn(f64) -> f64) -> f64 {
    let steps = 2000;
    (0..=steps)
        .map(|i| -LIPSCHITZ_WINDOW + 2.0 * LIPSCHITZ_WINDOW * i as f64 / steps as f64)
        .map(|x| g(x).abs())
        .fold(0.0, f64::max)
}

/// Grid search for `(ε, δ, c)` with `c ∈ [-1, 1]` and `δ = 1`.
fn find_nonlinearity(deriv: &(dyn Fn(f64) -> f64 + Send + Sync)) -> Option<Nonlinearity> {
    let delta = 1.0;
    let mut best: Option<(f64, f64)> = None;
    // centre first so ties resolve toward c = 0
    let order = (0..=20).flat_map(|i| if i == 0 { vec![0] } else { vec![i, -i] });
    for ci in order {
        let c = ci as f64 * 0.05;
        let eps = (1..20)
            .map(|si| delta / 2.0 + delta / 2.0 * si as f64 / 20.0)
            .map(|s| (deriv(c + s) - deriv(c - s)).abs())
            .fold(f64::INFINITY, f64::min);
        if best.is_none_or(|(e, _)| eps > e + 1e-12) {
            best = Some((eps, c));
        }
    }
    best.filter(|&(e, _)| e > 1e-8).map(|(e, c)| Nonlinearity {
        epsilon: e / 2.0,
        delta,
        c,
    })
}
