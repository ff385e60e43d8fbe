use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};

use crate::error::{LabError, Result};
use crate::linalg::norm;

/// `N(x) = K^{-1/2} Σ_i c_i σ(s_i⟨θ, x⟩ + τ_i)`: every unit shares the direction `θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SharedDirectionNet {
    pub width_k: usize,
    pub second_layer_c: Array1<f64>,
    pub biases_tau: Array1<f64>,
    pub signs_s: Array1<f64>,
    pub direction_theta: Array1<f64>,
}

/// Euclidean gradient of the regularized loss in `(c, θ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LossGradient {
    pub grad_c: Array1<f64>,
    pub grad_theta: Array1<f64>,
}

impl SharedDirectionNet {
    pub fn new(c: Array1<f64>, tau: Array1<f64>, s: Array1<f64>, theta: Array1<f64>) -> Result<Self> {
        let k = c.len();
        if k == 0 || tau.len() != k || s.len() != k {
            return Err(LabError::Config(format!(
                "width mismatch: c={}, tau={}, s={}",
                c.len(),
                tau.len(),
                s.len()
            )));
        }
        if s.iter().any(|&v| v != 1.0 && v != -1.0) {
            return Err(LabError::Config("signs must be exactly ±1".into()));
        }
        if (norm(theta.view()) - 1.0).abs() > 1e-12 {
            return Err(LabError::Config("theta must have unit norm".into()));
        }
        if c.iter().chain(&tau).chain(&theta).any(|v| !v.is_finite()) {
            return Err(LabError::Config("network parameters must be finite".into()));
        }
        Ok(Self {
            width_k: k,
            second_layer_c: c,
            biases_tau: tau,
            signs_s: s,
            direction_theta: theta,
        })
    }

    pub fn dimension(&self) -> usize {
        self.direction_theta.len()
    }

    /// `s_i⟨θ, α⟩ + τ_i`, constant along a coupled flow.
    pub fn coupled_bias(&self, alpha: ArrayView1<f64>) -> Array1<f64> {
        &self.signs_s * self.direction_theta.dot(&alpha) + &self.biases_tau
    }

    /// Pre-activations, one row per input.
    pub fn preactivations(&self, x: ArrayView2<f64>) -> Array2<f64> {
        let proj = x.dot(&self.direction_theta);
        let mut z = proj.insert_axis(Axis(1)) * &self.signs_s.view().insert_axis(Axis(0));
        z += &self.biases_tau.view().insert_axis(Axis(0));
        z
    }

    pub fn forward(&self, x: ArrayView2<f64>) -> Array1<f64> {
        let h = self.preactivations(x).mapv(|v| v.max(0.0));
        h.dot(&self.second_layer_c) / (self.width_k as f64).sqrt()
    }

    /// `(1/n) Σ (N(x_j) − y_j)² + β‖c‖₂`.
    pub fn empirical_loss(&self, x: ArrayView2<f64>, y: ArrayView1<f64>, beta: f64) -> f64 {
        let r = self.forward(x) - &y;
        r.dot(&r) / y.len() as f64 + beta * norm(self.second_layer_c.view())
    }

    /// Gradient of [`Self::empirical_loss`]. The θ part differentiates through the
    /// coupled biases `τ = const − s⟨θ, α⟩`, so inputs enter as `x − α`; with
    /// `α = 0` this is the plain gradient at fixed `τ`. ReLU'(0) is taken as 0.
    pub fn loss_gradient(&self, x: ArrayView2<f64>, y: ArrayView1<f64>, beta: f64, alpha: ArrayView1<f64>) -> LossGradient {
        let n = y.len() as f64;
        let scale = 1.0 / (self.width_k as f64).sqrt();
        let z = self.preactivations(x);
        let h = z.mapv(|v| v.max(0.0));
        let r = h.dot(&self.second_layer_c) * scale - &y;

        let mut grad_c = h.t().dot(&r) * (2.0 * scale / n);
        let cn = norm(self.second_layer_c.view());
        if cn > 0.0 && beta > 0.0 {
            grad_c.scaled_add(beta / cn, &self.second_layer_c);
        }

        // per-sample weight Σ_i c_i s_i 1[z_ij > 0]
        let cs = &self.second_layer_c * &self.signs_s;
        let gate = z.mapv(|v| if v > 0.0 { 1.0 } else { 0.0 });
        let w = gate.dot(&cs) * &r * (2.0 * scale / n);
        let mut grad_theta = x.t().dot(&w);
        let wsum = w.sum();
        if wsum != 0.0 {
            grad_theta.scaled_add(-wsum, &alpha);
        }
        LossGradient { grad_c, grad_theta }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_unit_vector, standard_normal_vector};
    use crate::rng::SeedStream;
    use ndarray::array;

    #[test]
    fn forward_by_hand() {
        let net = SharedDirectionNet::new(array![1.0, 2.0], array![0.5, -1.0], array![1.0, -1.0], array![1.0, 0.0]).unwrap();
        // x = (2, 7): z = (2.5, -3) → h = (2.5, 0)
        let out = net.forward(array![[2.0, 7.0], [-1.0, 0.0]].view());
        let r2 = 2f64.sqrt();
        assert!((out[0] - 2.5 / r2).abs() < 1e-15);
        // x = (-1, 0): z = (-0.5, 0) → 0
        assert_eq!(out[1], 0.0);
    }

    #[test]
    fn validation() {
        let e = array![1.0, 0.0];
        assert!(SharedDirectionNet::new(array![1.0], array![0.0], array![0.5], e.clone()).is_err());
        assert!(SharedDirectionNet::new(array![1.0], array![0.0, 1.0], array![1.0], e.clone()).is_err());
        assert!(SharedDirectionNet::new(array![1.0], array![0.0], array![1.0], array![1.0, 1.0]).is_err());
        assert!(SharedDirectionNet::new(array![f64::NAN], array![0.0], array![1.0], e).is_err());
    }

    fn random_net(k: usize, d: usize, seed: u64) -> SharedDirectionNet {
        let mut rng = SeedStream::new(seed).stream(0);
        let c = standard_normal_vector(k, &mut rng);
        let tau = standard_normal_vector(k, &mut rng);
        let s = standard_normal_vector(k, &mut rng).mapv(|v| if v >= 0.0 { 1.0 } else { -1.0 });
        SharedDirectionNet::new(c, tau, s, random_unit_vector(d, &mut rng)).unwrap()
    }

    fn coupled_loss(net: &SharedDirectionNet, x: &Array2<f64>, y: &Array1<f64>, beta: f64, alpha: &Array1<f64>, theta: &Array1<f64>, c: &Array1<f64>) -> f64 {
        let inv = net.coupled_bias(alpha.view());
        let mut m = net.clone();
        m.direction_theta = theta.clone();
        m.second_layer_c = c.clone();
        m.biases_tau = &inv - &(&net.signs_s * theta.dot(alpha));
        m.empirical_loss(x.view(), y.view(), beta)
    }

    #[test]
    fn gradient_matches_central_differences() {
        let (k, d, n, beta) = (6, 5, 40, 1e-2);
        let h = 1e-6;
        let mut checked = 0;
        for point in 0..40u64 {
            if checked == 10 {
                break;
            }
            let net = random_net(k, d, 100 + point);
            let mut rng = SeedStream::new(200 + point).stream(0);
            let alpha = if point % 2 == 0 { Array1::zeros(d) } else { standard_normal_vector(d, &mut rng) };
            let x = standard_normal_vector(n * d, &mut rng).into_shape_with_order((n, d)).unwrap();
            let y = standard_normal_vector(n, &mut rng);
            // resample points with a pre-activation within reach of a kink
            let z = net.preactivations(x.view());
            if z.iter().any(|v| v.abs() < 1e-3) {
                continue;
            }
            let g = net.loss_gradient(x.view(), y.view(), beta, alpha.view());
            let th = &net.direction_theta;
            let c = &net.second_layer_c;
            let mut fd_c = Array1::zeros(k);
            for i in 0..k {
                let mut cp = c.clone();
                let mut cm = c.clone();
                cp[i] += h;
                cm[i] -= h;
                fd_c[i] = (coupled_loss(&net, &x, &y, beta, &alpha, th, &cp) - coupled_loss(&net, &x, &y, beta, &alpha, th, &cm)) / (2.0 * h);
            }
            let mut fd_t = Array1::zeros(d);
            for j in 0..d {
                let mut tp = th.clone();
                let mut tm = th.clone();
                tp[j] += h;
                tm[j] -= h;
                fd_t[j] = (coupled_loss(&net, &x, &y, beta, &alpha, &tp, c) - coupled_loss(&net, &x, &y, beta, &alpha, &tm, c)) / (2.0 * h);
            }
            let rel = |a: &Array1<f64>, b: &Array1<f64>| norm((a - b).view()) / norm(b.view()).max(1e-12);
            assert!(rel(&g.grad_c, &fd_c) < 1e-5, "c: {} vs {}", g.grad_c, fd_c);
            assert!(rel(&g.grad_theta, &fd_t) < 1e-5, "theta: {} vs {}", g.grad_theta, fd_t);
            checked += 1;
        }
        assert_eq!(checked, 10);
    }
}
