use std::f64::consts::PI;

use crate::error::{LabError, Result};

use super::normal_pdf;

pub const DEFAULT_ORDER: usize = 64;
pub const MAX_RULE_ORDER: usize = 256;

/// Half-width of the truncated domain used by piecewise rules; the
/// Gaussian mass beyond it is below 1e-32.
const PIECEWISE_HALF_WIDTH: f64 = 12.0;
const PANEL_WIDTH: f64 = 1.0;
const PANEL_POINTS: usize = 16;

/// Nodes and weights for expectations against the standard Gaussian `γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    order: usize,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Gauss–Hermite order this rule was built from.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `E[g(z)]` for `z ~ N(0, 1)`.
    pub fn expectation<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * g(x))
            .sum()
    }

    /// Composite Gauss–Legendre rule against `γ` on `[-12, 12]`, with panel
    /// boundaries at every breakpoint.
    ///
    /// Integrands that are only piecewise smooth (kinks or jumps at known
    /// points) converge slowly under a global Gauss–Hermite rule; splitting at
    /// the breakpoints restores spectral accuracy on each panel. The `order`
    /// of `self` is carried over for precondition checks.
    pub fn piecewise(&self, breakpoints: &[f64]) -> QuadratureRule {
        let (gl_nodes, gl_weights) = gauss_legendre(PANEL_POINTS);
        let mut cuts: Vec<f64> = breakpoints
            .iter()
            .copied()
            .filter(|b| b.is_finite() && b.abs() < PIECEWISE_HALF_WIDTH)
            .collect();
        cuts.push(-PIECEWISE_HALF_WIDTH);
        cuts.push(PIECEWISE_HALF_WIDTH);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();

        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for pair in cuts.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            let panels = ((hi - lo) / PANEL_WIDTH).ceil().max(1.0) as usize;
            let h = (hi - lo) / panels as f64;
            for p in 0..panels {
                let a = lo + p as f64 * h;
                let half = 0.5 * h;
                let mid = a + half;
                for (t, w) in gl_nodes.iter().zip(&gl_weights) {
                    let x = mid + half * t;
                    nodes.push(x);
                    weights.push(half * w * normal_pdf(x));
                }
            }
        }
        QuadratureRule {
            nodes,
            weights,
            order: self.order,
        }
    }
}

/// Gauss–Hermite rule normalized to the standard Gaussian measure.
///
/// Nodes are the eigenvalues of the Jacobi matrix of the probabilists'
/// recurrence (zero diagonal, off-diagonal `√k`), isolated by Sturm-sequence
/// bisection and polished with Newton steps on `H_n`. Weights are the
/// Christoffel numbers `1 / Σ_{k<n} H_k(x)²` of the orthonormal family, which
/// stay accurate in relative terms even for the far-tail nodes.
pub fn gauss_hermite_rule(order: usize) -> Result<QuadratureRule> {
    if !(2..=MAX_RULE_ORDER).contains(&order) {
        return Err(LabError::Config(format!(
            "quadrature order {order} outside [2, {MAX_RULE_ORDER}]"
        )));
    }
    let n = order;
    let bound = 2.0 * ((n - 1) as f64).sqrt() + 1.0;
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        // i-th smallest eigenvalue: smallest x with count(< x) > i
        let (mut lo, mut hi) = (-bound, bound);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if sturm_count(n, mid) > i {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let mut x = 0.5 * (lo + hi);
        for _ in 0..3 {
            let (h_n, h_n1, _) = orthonormal_values(n, x);
            let deriv = (n as f64).sqrt() * h_n1;
            if deriv == 0.0 {
                break;
            }
            let step = h_n / deriv;
            if !step.is_finite() || step.abs() > (hi - lo).abs() + 1e-12 {
                break;
            }
            x -= step;
        }
        let (_, _, sum_sq) = orthonormal_values(n, x);
        nodes.push(x);
        weights.push(1.0 / sum_sq);
    }
    // exact symmetry
    for i in 0..n / 2 {
        let x = 0.5 * (nodes[n - 1 - i] - nodes[i]);
        let w = 0.5 * (weights[i] + weights[n - 1 - i]);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        order,
    })
}

/// Number of Jacobi-matrix eigenvalues below `x`.
fn sturm_count(n: usize, x: f64) -> usize {
    let mut count = 0;
    let mut q = -x;
    if q < 0.0 {
        count += 1;
    }
    for k in 1..n {
        let denom = if q == 0.0 { f64::EPSILON } else { q };
        q = -x - k as f64 / denom;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// `(H_n(x), H_{n-1}(x), Σ_{k<n} H_k(x)²)` for the orthonormal family.
fn orthonormal_values(n: usize, x: f64) -> (f64, f64, f64) {
    let mut prev = 0.0;
    let mut cur = 1.0;
    let mut sum_sq = 0.0;
    for k in 0..n {
        sum_sq += cur * cur;
        let next = (x * cur - (k as f64).sqrt() * prev) / ((k + 1) as f64).sqrt();
        prev = cur;
        cur = next;
    }
    (cur, prev, sum_sq)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = ((2.0 * jf - 1.0) * z * p2 - (jf - 1.0) * p3) / jf;
            }
            pp = nf * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}
