use ndarray::{Array1, Array2};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::hermite::{gauss_hermite_rule, hermite_coefficient, DEFAULT_ORDER};
use crate::linalg::{normalize, project_tangent, random_unit_vector};
use crate::rng::{streams, SeedStream};

use super::gradient::{empirical_spherical_gradient, SphericalState};
use super::instance::{sample_batch_with, SingleIndexInstance};

/// Which of `θ_0 ± ηV` Step 1 keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SignPolicy {
    Plus,
    Minus,
    /// Lower loss on a held-out shifted batch.
    #[default]
    BestOfBoth,
}

impl std::str::FromStr for SignPolicy {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" => Ok(Self::Plus),
            "minus" => Ok(Self::Minus),
            "best-of-both" => Ok(Self::BestOfBoth),
            other => Err(LabError::Parse(format!("unknown sign policy `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ParametricConfig {
    pub n_step1: usize,
    pub n_step2: usize,
    /// `None` selects `√(f̂_μ(1) f̂_{μ*}(1) / (90 L⁶))` from estimates.
    pub eta_step1: Option<f64>,
    /// `None` selects `log(d)^{-3/2}`.
    pub eta_step2: Option<f64>,
    pub seed: u64,
    pub step1_sign_policy: SignPolicy,
    /// Held-out batch for `best-of-both`; `None` reuses `n_step1`.
    pub holdout_n: Option<usize>,
}

impl Default for ParametricConfig {
    fn default() -> Self {
        Self {
            n_step1: 1000,
            n_step2: 1000,
            eta_step1: None,
            eta_step2: None,
            seed: 0,
            step1_sign_policy: SignPolicy::BestOfBoth,
            holdout_n: None,
        }
    }
}

impl ParametricConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_step1 == 0 || self.n_step2 == 0 {
            return Err(LabError::Config("n_step1 and n_step2 must be at least 1".into()));
        }
        for (name, v) in [("eta_step1", self.eta_step1), ("eta_step2", self.eta_step2)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(LabError::Config(format!("{name} must be positive, got {v}")));
                }
            }
        }
        if self.holdout_n == Some(0) {
            return Err(LabError::Config("holdout_n must be positive".into()));
        }
        Ok(())
    }

    pub fn step2_rate(&self, d: usize) -> f64 {
        self.eta_step2.unwrap_or_else(|| (d as f64).ln().powf(-1.5))
    }
}

/// `⌈d ln² d⌉`.
pub fn default_step1_budget(d: usize) -> usize {
    let d = d as f64;
    (d * d.ln().powi(2)).ceil() as usize
}

#[derive(Debug, Clone)]
pub struct Algorithm1Outcome {
    pub theta_final: Array1<f64>,
    /// `m(θ_0)`, `m(θ_1)`, then one entry per Step-2 update.
    pub overlap_trace: Vec<f64>,
    pub mu_guess: f64,
    pub step1_rate: f64,
    /// `+1` when `θ_0 + ηV` was kept, `-1` for `θ_0 - ηV`.
    pub step1_sign: i8,
    /// Estimate of `|f̂_μ(1) f̂_{μ*}(1)|` from the Step-1 batch.
    pub f1_product_estimate: f64,
}

impl Algorithm1Outcome {
    pub fn initial_overlap(&self) -> f64 {
        self.overlap_trace[0]
    }

    pub fn post_step1_overlap(&self) -> f64 {
        self.overlap_trace[1]
    }

    pub fn final_overlap(&self) -> f64 {
        *self.overlap_trace.last().expect("trace is never empty")
    }
}

/// `|f̂_{μ*}(1)|` from `E[y x̃] = f̂_{μ*}(1) w*`, via the unbiased
/// U-statistic for `‖E[y x̃]‖²`.
fn first_coefficient_norm(centered: &Array2<f64>, labels: &Array1<f64>) -> f64 {
    let n = labels.len() as f64;
    if n < 2.0 {
        return 0.0;
    }
    let sum = centered.t().dot(labels);
    let diag: f64 = centered
        .rows()
        .into_iter()
        .zip(labels)
        .map(|(r, y)| y * y * r.dot(&r))
        .sum();
    ((sum.dot(&sum) - diag) / (n * (n - 1.0))).max(0.0).sqrt()
}

fn shifted_loss(inst: &SingleIndexInstance, theta: &Array1<f64>, x: &Array2<f64>, y: &Array1<f64>) -> f64 {
    let p = x.dot(theta);
    p.iter()
        .zip(y)
        .map(|(&u, &v)| (inst.link.eval(u) - v).powi(2))
        .sum::<f64>()
        / y.len() as f64
}

/// Step 1 from `θ_0` on one shifted batch, then `n_step2` online steps
/// on unshifted samples. All randomness after the instance comes from
/// `cfg.seed`, so two instances differing only in `α` see the same `θ_0`
/// and the same centered Gaussian draws.
pub fn run_algorithm1(inst: &SingleIndexInstance, cfg: &ParametricConfig) -> Result<Algorithm1Outcome> {
    cfg.validate()?;
    if !inst.link.has_derivative() {
        return Err(LabError::UnsupportedLink(inst.link.label().to_string()));
    }
    let d = inst.dimension_d;
    let root = SeedStream::new(cfg.seed);
    let theta0 = random_unit_vector(d, &mut root.stream(streams::INIT));
    let m0 = inst.overlap(&theta0);
    if m0.abs() > (d as f64).powf(-0.25) {
        log::debug!("initial overlap {m0:.4} exceeds d^(-1/4)");
    }
    let mut trace = Vec::with_capacity(cfg.n_step2 + 2);
    trace.push(m0);

    // Step 1
    let (x, y) = sample_batch_with(inst, cfg.n_step1, true, &mut root.stream(streams::DATA), &mut root.stream(streams::NOISE))?;
    let xc = inst.center(&x);
    let mu = theta0.dot(&inst.shift_alpha);
    let state0 = SphericalState::new(theta0.clone());
    let v = empirical_spherical_gradient(&state0, &inst.link, &xc, &y, mu)?;
    let rule = gauss_hermite_rule(DEFAULT_ORDER)?;
    let f1_mu = hermite_coefficient(&inst.link, 1, mu, &rule)?;
    let product = f1_mu.abs() * first_coefficient_norm(&xc, &y);
    let rate = cfg
        .eta_step1
        .unwrap_or_else(|| (product / (90.0 * inst.link.lipschitz().powi(6))).sqrt());
    let candidate = |sign: f64| {
        let mut t = theta0.clone();
        t.scaled_add(sign * rate, &v);
        normalize(t)
    };
    let sign = match cfg.step1_sign_policy {
        SignPolicy::Plus => 1.0,
        SignPolicy::Minus => -1.0,
        SignPolicy::BestOfBoth => {
            let child = root.child(streams::HOLDOUT);
            let (hx, hy) = sample_batch_with(
                inst,
                cfg.holdout_n.unwrap_or(cfg.n_step1),
                true,
                &mut child.stream(streams::DATA),
                &mut child.stream(streams::NOISE),
            )?;
            let lp = shifted_loss(inst, &candidate(1.0), &hx, &hy);
            let lm = shifted_loss(inst, &candidate(-1.0), &hx, &hy);
            if lp < lm {
                1.0
            } else {
                -1.0
            }
        }
    };
    let mut theta = candidate(sign);
    trace.push(inst.overlap(&theta));

    // Step 2
    let eta2 = cfg.step2_rate(d);
    let step2 = root.child(streams::STEP2);
    let (mut data, mut noise) = (step2.stream(streams::DATA), step2.stream(streams::NOISE));
    let mut xt = Array1::<f64>::zeros(d);
    for _ in 0..cfg.n_step2 {
        xt.mapv_inplace(|_| StandardNormal.sample(&mut data));
        let zeta: f64 = StandardNormal.sample(&mut noise);
        let yt = inst.link.eval(xt.dot(&inst.signal_wstar)) + inst.noise_sigma * zeta;
        let u = xt.dot(&theta);
        let c = 2.0 * inst.link.derivative(u).expect("checked above") * (inst.link.eval(u) - yt);
        let g = project_tangent(theta.view(), xt.view());
        theta.scaled_add(-eta2 * c, &g);
        theta = normalize(theta);
        trace.push(inst.overlap(&theta));
    }
    Ok(Algorithm1Outcome {
        theta_final: theta,
        overlap_trace: trace,
        mu_guess: mu,
        step1_rate: rate,
        step1_sign: if sign > 0.0 { 1 } else { -1 },
        f1_product_estimate: product,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite::LinkFunction;
    use crate::linalg::norm;

    #[test]
    fn linear_link_recovers_signal() {
        let inst = SingleIndexInstance::random(16, LinkFunction::linear(), true, 0.0, 11).unwrap();
        let cfg = ParametricConfig { n_step1: 400, n_step2: 3000, eta_step2: Some(0.01), seed: 2, ..Default::default() };
        let out = run_algorithm1(&inst, &cfg).unwrap();
        assert!(out.final_overlap().abs() >= 0.99, "{}", out.final_overlap());
        assert!((norm(out.theta_final.view()) - 1.0).abs() < 1e-12);
        assert_eq!(out.overlap_trace.len(), 3002);
    }

    #[test]
    fn brute_force_in_two_dimensions() {
        // the loss minimizer over a fine grid of the circle is the signal
        let inst = SingleIndexInstance::random(2, LinkFunction::linear(), false, 0.0, 5).unwrap();
        let cfg = ParametricConfig { n_step1: 50, n_step2: 2000, eta_step2: Some(0.02), seed: 6, ..Default::default() };
        let out = run_algorithm1(&inst, &cfg).unwrap();
        let (x, y) = crate::single_index::sample_batch(&inst, 2000, false, 7).unwrap();
        let best = (0..3600)
            .map(|i| {
                let t = i as f64 * std::f64::consts::PI / 1800.0;
                let th = ndarray::array![t.cos(), t.sin()];
                (th.clone(), shifted_loss(&inst, &th, &x, &y))
            })
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap()
            .0;
        assert!(best.dot(&out.theta_final) > 0.999);
    }

    #[test]
    fn initial_overlap_is_small() {
        let d = 64;
        let inst = SingleIndexInstance::random(d, LinkFunction::linear(), false, 0.0, 1).unwrap();
        let small = (0..200)
            .filter(|&s| {
                let cfg = ParametricConfig { n_step1: 1, n_step2: 1, eta_step1: Some(1e-9), seed: s, ..Default::default() };
                run_algorithm1(&inst, &cfg).unwrap().initial_overlap().abs() <= (d as f64).powf(-0.25)
            })
            .count();
        assert!(small >= 190, "{small}");
    }

    #[test]
    fn sign_policies_are_mirror_images() {
        let inst = SingleIndexInstance::random(12, LinkFunction::relu(), true, 0.1, 3).unwrap();
        let base = ParametricConfig { n_step1: 300, n_step2: 1, eta_step1: Some(2.0), seed: 4, ..Default::default() };
        let plus = run_algorithm1(&inst, &ParametricConfig { step1_sign_policy: SignPolicy::Plus, ..base.clone() }).unwrap();
        let minus = run_algorithm1(&inst, &ParametricConfig { step1_sign_policy: SignPolicy::Minus, ..base.clone() }).unwrap();
        let best = run_algorithm1(&inst, &base).unwrap();
        assert_eq!(plus.step1_sign, 1);
        assert_eq!(minus.step1_sign, -1);
        let chosen = if best.step1_sign > 0 { &plus } else { &minus };
        assert_eq!(best.post_step1_overlap(), chosen.post_step1_overlap());
        assert_eq!("best-of-both".parse::<SignPolicy>().unwrap(), SignPolicy::BestOfBoth);
    }

    #[test]
    fn step1_rate_and_budget() {
        assert_eq!(default_step1_budget(64), 1107);
        let inst = SingleIndexInstance::random(8, LinkFunction::sigmoid(), true, 0.0, 9).unwrap();
        let cfg = ParametricConfig { n_step1: 5000, n_step2: 1, seed: 1, ..Default::default() };
        let out = run_algorithm1(&inst, &cfg).unwrap();
        let rule = gauss_hermite_rule(DEFAULT_ORDER).unwrap();
        let exact = (hermite_coefficient(&inst.link, 1, out.mu_guess, &rule).unwrap()
            * hermite_coefficient(&inst.link, 1, inst.mu_star(), &rule).unwrap())
        .abs();
        assert!((out.f1_product_estimate - exact).abs() < 0.1 * exact + 0.01, "{} vs {exact}", out.f1_product_estimate);
        assert!((out.step1_rate - (out.f1_product_estimate / (90.0 * 0.25f64.powi(6))).sqrt()).abs() < 1e-12);
        assert!(ParametricConfig { n_step2: 0, ..Default::default() }.validate().is_err());
    }
}
