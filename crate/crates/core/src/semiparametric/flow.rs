use ndarray::{Array1, ArrayView1, ArrayView2};
use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::linalg::{normalize, project_tangent, random_unit_vector, standard_normal_vector};
use crate::rng::{streams, SeedStream};
use crate::single_index::{sample_batch, SingleIndexInstance};

use super::net::SharedDirectionNet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FlowConfig {
    pub reg_beta: f64,
    /// `c` is frozen while `t < T′`.
    pub freeze_time_tprime: f64,
    pub horizon_t: f64,
    pub dt: f64,
    pub sparsity_k0: usize,
    pub init_radius_rho: f64,
    pub seed: u64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            reg_beta: 1e-3,
            freeze_time_tprime: 20.0,
            horizon_t: 100.0,
            dt: 0.05,
            sparsity_k0: 4,
            init_radius_rho: 1.0,
            seed: 0,
        }
    }
}

impl FlowConfig {
    pub fn validate(&self, width_k: usize) -> Result<()> {
        if !(self.dt > 0.0 && self.dt < self.horizon_t && self.horizon_t.is_finite()) {
            return Err(LabError::Config(format!(
                "need 0 < dt < horizon_t, got dt={} horizon_t={}",
                self.dt, self.horizon_t
            )));
        }
        if !(self.reg_beta >= 0.0 && self.freeze_time_tprime >= 0.0) {
            return Err(LabError::Config("reg_beta and freeze_time_tprime must be nonnegative".into()));
        }
        if !(self.init_radius_rho > 0.0 && self.init_radius_rho.is_finite()) {
            return Err(LabError::Config("init_radius_rho must be positive".into()));
        }
        if self.sparsity_k0 == 0 || self.sparsity_k0 > width_k {
            return Err(LabError::Config(format!(
                "sparsity_k0 must lie in [1, {width_k}], got {}",
                self.sparsity_k0
            )));
        }
        Ok(())
    }

    /// Number of Euler steps, `round(T / dt)`.
    pub fn steps(&self) -> usize {
        (self.horizon_t / self.dt).round() as usize
    }
}

/// `max(8, ⌈√(n/d²)⌉)`.
pub fn default_width(n: usize, d: usize) -> usize {
    let k = ((n as f64) / (d as f64 * d as f64)).sqrt().ceil() as usize;
    k.max(8)
}

/// Draws `s`, `τ̃`, `θ_0`, `c_0` in that order from the INIT stream, then sets
/// `τ_0 = τ̃ − s⟨θ_0, α⟩`.
pub fn init_network(d: usize, k: usize, cfg: &FlowConfig, alpha: ArrayView1<f64>) -> Result<SharedDirectionNet> {
    cfg.validate(k)?;
    if d == 0 || alpha.len() != d {
        return Err(LabError::Config(format!("alpha has {} entries, expected {d}", alpha.len())));
    }
    let mut rng = SeedStream::new(cfg.seed).stream(streams::INIT);
    let s: Array1<f64> = (0..k).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
    let tau_tilde = standard_normal_vector(k, &mut rng);
    let theta = random_unit_vector(d, &mut rng);
    let support = sample(&mut rng, k, cfg.sparsity_k0);
    let dir = random_unit_vector(cfg.sparsity_k0, &mut rng);
    let mut c = Array1::zeros(k);
    for (j, i) in support.iter().enumerate() {
        c[i] = cfg.init_radius_rho * dir[j];
    }
    let tau = &tau_tilde - &(&s * theta.dot(&alpha));
    SharedDirectionNet::new(c, tau, s, theta)
}

/// One explicit Euler step of the coupled flow at time `t`.
///
/// `θ` moves along the spherical gradient and is renormalized, `c` moves only
/// once `t ≥ T′`, and `τ` is reset so that `s⟨θ, α⟩ + τ` is unchanged.
pub fn flow_step(
    net: &SharedDirectionNet,
    x: ArrayView2<f64>,
    y: ArrayView1<f64>,
    cfg: &FlowConfig,
    t: f64,
    alpha: ArrayView1<f64>,
) -> SharedDirectionNet {
    let g = net.loss_gradient(x, y, cfg.reg_beta, alpha);
    let mut next = net.clone();
    let sg = project_tangent(net.direction_theta.view(), g.grad_theta.view());
    let moved = &net.direction_theta - &(sg * cfg.dt);
    next.direction_theta = normalize(moved);
    if t >= cfg.freeze_time_tprime {
        next.second_layer_c.scaled_add(-cfg.dt, &g.grad_c);
    }
    let invariant = net.coupled_bias(alpha);
    next.biases_tau = &invariant - &(&net.signs_s * next.direction_theta.dot(&alpha));
    next
}

#[derive(Debug, Clone)]
pub struct Algorithm2Outcome {
    pub theta_final: Array1<f64>,
    pub net: SharedDirectionNet,
    /// `⟨θ_t, w*⟩` at `t = 0, dt, …, T`.
    pub overlap_trace: Vec<f64>,
    /// Largest drift of `s⟨θ_t, α⟩ + τ_t` from its initial value.
    pub conservation_error: f64,
    pub train_loss: f64,
}

/// Runs the flow from `net` over a fixed batch, calling `observe(step, net)`
/// after initialization and after every step.
pub fn run_flow<F>(
    mut net: SharedDirectionNet,
    x: ArrayView2<f64>,
    y: ArrayView1<f64>,
    cfg: &FlowConfig,
    alpha: ArrayView1<f64>,
    mut observe: F,
) -> Result<SharedDirectionNet>
where
    F: FnMut(usize, &SharedDirectionNet),
{
    cfg.validate(net.width_k)?;
    if x.ncols() != net.dimension() || alpha.len() != net.dimension() || x.nrows() != y.len() || y.is_empty() {
        return Err(LabError::Config("batch shape does not match the network".into()));
    }
    observe(0, &net);
    for step in 0..cfg.steps() {
        net = flow_step(&net, x, y, cfg, step as f64 * cfg.dt, alpha);
        if !net.second_layer_c.iter().chain(&net.direction_theta).all(|v| v.is_finite()) {
            return Err(LabError::Precondition(format!("flow diverged at step {}; reduce dt", step + 1)));
        }
        observe(step + 1, &net);
    }
    Ok(net)
}

/// Full-batch coupled flow on `n` shifted samples drawn with `cfg.seed`.
pub fn run_algorithm2(inst: &SingleIndexInstance, k: usize, cfg: &FlowConfig, n: usize) -> Result<Algorithm2Outcome> {
    let alpha = inst.shift_alpha.view();
    let net0 = init_network(inst.dimension_d, k, cfg, alpha)?;
    let (x, y) = sample_batch(inst, n, true, cfg.seed)?;
    let start = net0.coupled_bias(alpha);
    let mut overlap_trace = Vec::with_capacity(cfg.steps() + 1);
    let mut conservation_error: f64 = 0.0;
    let net = run_flow(net0, x.view(), y.view(), cfg, alpha, |_, m| {
        overlap_trace.push(inst.overlap(&m.direction_theta));
        let drift = (&m.coupled_bias(alpha) - &start).fold(0.0f64, |a, v| a.max(v.abs()));
        conservation_error = conservation_error.max(drift);
    })?;
    let train_loss = net.empirical_loss(x.view(), y.view(), cfg.reg_beta);
    Ok(Algorithm2Outcome {
        theta_final: net.direction_theta.clone(),
        net,
        overlap_trace,
        conservation_error,
        train_loss,
    })
}

/// Mean squared error against the noiseless target on fresh shifted inputs.
pub fn network_test_mse(net: &SharedDirectionNet, inst: &SingleIndexInstance, n: usize, seed: u64) -> Result<f64> {
    let clean = SingleIndexInstance { noise_sigma: 0.0, ..inst.clone() };
    let (x, y) = sample_batch(&clean, n, true, SeedStream::new(seed).child(streams::TEST).seed())?;
    let r = net.forward(x.view()) - &y;
    Ok(r.dot(&r) / n as f64)
}

/// `|⟨θ_T, w*⟩|` difference between runs at `dt` and `dt/2`.
pub fn dt_halving_gap(inst: &SingleIndexInstance, k: usize, cfg: &FlowConfig, n: usize) -> Result<f64> {
    let full = run_algorithm2(inst, k, cfg, n)?;
    let half = run_algorithm2(inst, k, &FlowConfig { dt: cfg.dt / 2.0, ..cfg.clone() }, n)?;
    Ok((inst.overlap(&full.theta_final) - inst.overlap(&half.theta_final)).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite::LinkFunction;
    use crate::linalg::norm;
    use ndarray::Array2;

    fn gaussian_alpha(d: usize, seed: u64) -> Array1<f64> {
        standard_normal_vector(d, &mut SeedStream::new(seed).stream(streams::SHIFT))
    }

    #[test]
    fn init_examples() {
        let cfg = FlowConfig { sparsity_k0: 3, init_radius_rho: 0.7, seed: 11, ..Default::default() };
        let alpha = gaussian_alpha(9, 1);
        let plain = init_network(9, 10, &cfg, Array1::zeros(9).view()).unwrap();
        let shifted = init_network(9, 10, &cfg, alpha.view()).unwrap();
        assert_eq!(plain.direction_theta, shifted.direction_theta);
        assert_eq!(plain.signs_s, shifted.signs_s);
        // the unshifted biases are τ̃ itself
        let recovered = shifted.coupled_bias(alpha.view());
        for (a, b) in recovered.iter().zip(&plain.biases_tau) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!((norm(shifted.second_layer_c.view()) - 0.7).abs() < 1e-14);
        assert_eq!(shifted.second_layer_c.iter().filter(|v| **v != 0.0).count(), 3);
        assert_eq!(init_network(9, 10, &cfg, alpha.view()).unwrap(), shifted);
    }

    #[test]
    fn effective_biases_are_standard_normal() {
        let alpha = gaussian_alpha(6, 2) * 3.0;
        let mut vals = Vec::new();
        for seed in 0..2000 {
            let cfg = FlowConfig { seed, ..Default::default() };
            vals.extend(init_network(6, 8, &cfg, alpha.view()).unwrap().coupled_bias(alpha.view()));
        }
        let n = vals.len() as f64;
        let mean = vals.iter().sum::<f64>() / n;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let kurt = vals.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
        assert!(mean.abs() < 4.0 / n.sqrt(), "mean {mean}");
        assert!((var - 1.0).abs() < 0.05, "var {var}");
        assert!((kurt - 3.0).abs() < 0.3, "fourth moment {kurt}");
    }

    #[test]
    fn config_validation() {
        let alpha = Array1::zeros(4);
        let bad = [
            FlowConfig { dt: 0.0, ..Default::default() },
            FlowConfig { dt: 200.0, ..Default::default() },
            FlowConfig { sparsity_k0: 9, ..Default::default() },
            FlowConfig { sparsity_k0: 0, ..Default::default() },
            FlowConfig { init_radius_rho: 0.0, ..Default::default() },
            FlowConfig { reg_beta: -1.0, ..Default::default() },
        ];
        for cfg in bad {
            assert!(init_network(4, 8, &cfg, alpha.view()).is_err(), "{cfg:?}");
        }
        assert!(init_network(4, 8, &FlowConfig::default(), Array1::zeros(3).view()).is_err());
        assert_eq!(default_width(100, 10), 8);
        assert_eq!(default_width(1_000_000, 10), 100);
        assert_eq!(FlowConfig::default().steps(), 2000);
    }

    fn small_problem(shifted: bool, seed: u64) -> (SingleIndexInstance, Array2<f64>, Array1<f64>) {
        let inst = SingleIndexInstance::random(6, LinkFunction::relu(), shifted, 0.1, seed).unwrap();
        let (x, y) = sample_batch(&inst, 300, true, seed).unwrap();
        (inst, x, y)
    }

    #[test]
    fn step_examples() {
        let (inst, x, y) = small_problem(true, 3);
        let alpha = inst.shift_alpha.view();
        let cfg = FlowConfig { freeze_time_tprime: 1.0, ..Default::default() };
        let net = init_network(6, 8, &cfg, alpha).unwrap();
        let frozen = flow_step(&net, x.view(), y.view(), &cfg, 0.5, alpha);
        assert_eq!(frozen.second_layer_c, net.second_layer_c);
        assert_ne!(frozen.direction_theta, net.direction_theta);
        assert!((norm(frozen.direction_theta.view()) - 1.0).abs() < 1e-14);
        let before = net.coupled_bias(alpha);
        let after = frozen.coupled_bias(alpha);
        assert!((&before - &after).iter().all(|v| v.abs() < 1e-14));
        let live = flow_step(&net, x.view(), y.view(), &cfg, 1.0, alpha);
        assert_ne!(live.second_layer_c, net.second_layer_c);

        let (inst0, x0, y0) = small_problem(false, 3);
        let zero = inst0.shift_alpha.view();
        let net0 = init_network(6, 8, &cfg, zero).unwrap();
        let moved = flow_step(&net0, x0.view(), y0.view(), &cfg, 2.0, zero);
        assert_eq!(moved.biases_tau, net0.biases_tau);
    }

    /// Shifted data with coupling against centered data with the shifted link.
    #[test]
    fn equivalence_oracle() {
        let link = LinkFunction::hermite(3).unwrap();
        let inst = SingleIndexInstance::random(10, link, true, 0.05, 21).unwrap();
        let control = SingleIndexInstance::new(
            inst.signal_wstar.clone(),
            Array1::zeros(10),
            inst.link.shifted(inst.mu_star()),
            inst.noise_sigma,
        )
        .unwrap();
        let cfg = FlowConfig { horizon_t: 10.0, freeze_time_tprime: 5.0, seed: 4, ..Default::default() };
        let k = 8;
        let run = |i: &SingleIndexInstance| {
            let alpha = i.shift_alpha.view();
            let (x, y) = sample_batch(i, 400, true, cfg.seed).unwrap();
            let mut thetas = Vec::new();
            run_flow(init_network(10, k, &cfg, alpha).unwrap(), x.view(), y.view(), &cfg, alpha, |_, m| {
                thetas.push(m.direction_theta.clone())
            })
            .unwrap();
            thetas
        };
        let a = run(&inst);
        let b = run(&control);
        assert_eq!(a.len(), 201);
        for (ta, tb) in a.iter().zip(&b) {
            assert!(norm((ta - tb).view()) < 1e-10);
        }
        let out = run_algorithm2(&inst, k, &cfg, 400).unwrap();
        assert!(out.conservation_error < 1e-12, "{}", out.conservation_error);
        assert_eq!(out.overlap_trace.len(), 201);
    }

    #[test]
    fn linear_link_is_learned() {
        for seed in 0..3 {
            let inst = SingleIndexInstance::random(8, LinkFunction::linear(), true, 0.0, 1000 + seed).unwrap();
            let cfg = FlowConfig { horizon_t: 200.0, seed, ..Default::default() };
            let out = run_algorithm2(&inst, 16, &cfg, 2000).unwrap();
            assert!(inst.overlap(&out.theta_final).abs() >= 0.95);
            assert!(network_test_mse(&out.net, &inst, 10_000, seed).unwrap() <= 1e-2);
        }
    }

    #[test]
    fn fitted_network_matches_shifted_link() {
        let inst = SingleIndexInstance::random(5, LinkFunction::hermite(2).unwrap(), true, 0.0, 8).unwrap();
        let mu = inst.mu_star();
        let alpha = inst.shift_alpha.view();
        let cfg = FlowConfig { horizon_t: 300.0, freeze_time_tprime: 0.0, reg_beta: 0.0, seed: 2, ..Default::default() };
        let mut net = init_network(5, 32, &cfg, alpha).unwrap();
        let tau_tilde = net.coupled_bias(alpha);
        net.direction_theta = inst.signal_wstar.clone();
        net.biases_tau = &tau_tilde - &(&net.signs_s * net.direction_theta.dot(&alpha));
        let (x, y) = sample_batch(&inst, 3000, true, 9).unwrap();
        let net = run_flow(net, x.view(), y.view(), &cfg, alpha, |_, _| {}).unwrap();
        let (xt, _) = sample_batch(&inst, 5000, true, 10).unwrap();
        let pred = net.forward(xt.view());
        let target = inst.center(&xt).dot(&inst.signal_wstar).mapv(|u| inst.link.eval(u + mu));
        let r = &pred - &target;
        assert!(r.dot(&r) / 5000.0 <= 0.1);
    }

    #[test]
    fn halving_dt_barely_moves_the_answer() {
        let inst = SingleIndexInstance::random(8, LinkFunction::linear(), true, 0.0, 1001).unwrap();
        let cfg = FlowConfig { horizon_t: 40.0, seed: 1, ..Default::default() };
        assert!(dt_halving_gap(&inst, 16, &cfg, 1000).unwrap() < 1e-2);
    }
}
