use std::time::Instant;

use ndarray::Array1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boolean::{loglog_slope, pair_product_small_coefficient, prop31_sweep, BooleanJunta, ProductShift};
use crate::error::{LabError, Result};
use crate::hermite::{gauss_hermite_rule, normal_cdf, small_ball_probability, LinkFunction};
use crate::junta::{joint_sgd_train, run_layerwise, EpochError, JointConfig, LayerwiseConfig, SecondLoss, TwoLayerNet};
use crate::rng::{streams, SeedStream};
use crate::semiparametric::{default_width, network_test_mse, run_algorithm2, FlowConfig};
use crate::single_index::{run_algorithm1, default_step1_budget, ParametricConfig, SignPolicy, SingleIndexInstance};

/// Median of a nonempty slice; the mean of the two middle values for even length.
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of an empty slice");
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Median where `None` (censored) ranks above every observed value.
/// Returns `None` when the median itself is censored.
pub fn censored_median(values: &[Option<f64>]) -> Option<f64> {
    let v: Vec<f64> = values.iter().map(|x| x.unwrap_or(f64::INFINITY)).collect();
    let m = median(&v);
    m.is_finite().then_some(m)
}

fn junta_from_monomials(d: usize, monomials: &[Vec<usize>]) -> Result<BooleanJunta> {
    let terms: Vec<&[usize]> = monomials.iter().map(|m| m.as_slice()).collect();
    BooleanJunta::sum_of_monomials(d, &terms)
}

fn stride<T: Copy>(trace: &[T], every: usize) -> Vec<(usize, T)> {
    let every = every.max(1);
    let mut out: Vec<(usize, T)> = trace.iter().copied().enumerate().step_by(every).collect();
    if (trace.len() - 1) % every != 0 {
        out.push((trace.len() - 1, trace[trace.len() - 1]));
    }
    out
}

// ---------------------------------------------------------------- smallball

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SmallBallParams {
    pub links: Vec<String>,
    pub lambdas: Vec<f64>,
    pub n_samples: usize,
    pub quadrature_order: usize,
}

impl Default for SmallBallParams {
    fn default() -> Self {
        Self {
            links: vec!["hermite:2".into(), "hermite:3".into(), "relu".into(), "linear".into()],
            lambdas: vec![0.05, 0.1, 0.25, 0.5, 1.0],
            n_samples: 100_000,
            quadrature_order: 64,
        }
    }
}

impl SmallBallParams {
    pub fn fast(self) -> Self {
        Self { n_samples: 10_000, ..self }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallBallRow {
    pub link: String,
    pub lambda: f64,
    pub seed: u64,
    pub estimate: f64,
    pub std_error: f64,
    pub n_samples: usize,
    /// `P(|F₁(μ)| ≤ λ)` in closed form, where one is known.
    pub oracle: Option<f64>,
}

/// Exact small-ball probability for `μ ~ N(0, 1)`: `F₁ = √2 μ` (H₂),
/// `√(3/2) μ²` (H₃), `Φ(μ)` (ReLU) and `1` (linear).
pub fn small_ball_oracle(link: &str, lambda: f64) -> Option<f64> {
    match link {
        "hermite:2" => Some(2.0 * normal_cdf(lambda / 2f64.sqrt()) - 1.0),
        "hermite:3" => Some(2.0 * normal_cdf((lambda * (2.0f64 / 3.0).sqrt()).sqrt()) - 1.0),
        "relu" => Some(lambda.min(1.0)),
        // F1 ≡ 1, so λ = 1 sits on the boundary and is left to roundoff
        "linear" if lambda != 1.0 => Some(if lambda > 1.0 { 1.0 } else { 0.0 }),
        _ => None,
    }
}

pub fn run_smallball_sweep(params: &SmallBallParams, seed: u64) -> Result<Vec<SmallBallRow>> {
    let rule = gauss_hermite_rule(params.quadrature_order)?;
    let mut rows = Vec::new();
    for name in &params.links {
        let link = LinkFunction::from_name(name)?;
        for (i, &lambda) in params.lambdas.iter().enumerate() {
            // one child stream per λ keeps rows independent
            let cell_seed = SeedStream::new(seed).child(i as u64).seed();
            let e = small_ball_probability(&link, lambda, params.n_samples, cell_seed, &rule)?;
            rows.push(SmallBallRow {
                link: name.clone(),
                lambda,
                seed,
                estimate: e.estimate,
                std_error: e.std_error,
                n_samples: e.n_samples,
                oracle: small_ball_oracle(name, lambda),
            });
        }
    }
    Ok(rows)
}

// ---------------------------------------------------------------- parametric

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParametricParams {
    pub link: String,
    pub d: usize,
    /// `None` selects `⌈d ln² d⌉`.
    pub n_step1: Option<usize>,
    pub n_step2: usize,
    pub eta_step1: Option<f64>,
    pub eta_step2: Option<f64>,
    pub noise_sigma: f64,
    pub sign_policy: SignPolicy,
    pub holdout_n: Option<usize>,
    /// Instance `seed + offset` fixes `w*` and `α` for run seed `seed`.
    pub instance_seed_offset: u64,
    pub success_overlap: f64,
    pub trace_stride: usize,
}

impl Default for ParametricParams {
    fn default() -> Self {
        Self {
            link: "hermite:3".into(),
            d: 64,
            n_step1: None,
            n_step2: 50_000,
            eta_step1: Some(0.1),
            eta_step2: Some(1e-4),
            noise_sigma: 0.1,
            sign_policy: SignPolicy::BestOfBoth,
            holdout_n: None,
            instance_seed_offset: 1000,
            success_overlap: 0.8,
            trace_stride: 500,
        }
    }
}

impl ParametricParams {
    pub fn fast(self) -> Self {
        Self { n_step2: 20_000, ..self }
    }

    pub fn config(&self, seed: u64) -> ParametricConfig {
        ParametricConfig {
            n_step1: self.n_step1.unwrap_or_else(|| default_step1_budget(self.d)),
            n_step2: self.n_step2,
            eta_step1: self.eta_step1,
            eta_step2: self.eta_step2,
            seed,
            step1_sign_policy: self.sign_policy,
            holdout_n: self.holdout_n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmResult {
    pub mu_star: f64,
    pub initial_overlap: f64,
    pub post_step1_overlap: f64,
    pub final_overlap: f64,
    pub step1_sign: i8,
    /// `(step, m)` pairs every `trace_stride` entries.
    pub overlap_trace: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedRun {
    pub seed: u64,
    pub shifted: ArmResult,
    pub control: ArmResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftAdvantage {
    pub runs: Vec<PairedRun>,
    pub median_post_step1_shifted: f64,
    pub median_post_step1_control: f64,
    pub median_final_shifted: f64,
    pub median_final_control: f64,
    /// Runs with final `m ≥ success_overlap`.
    pub successes_shifted: usize,
    pub successes_control: usize,
    /// Success rate among shifted runs with `m(θ_0) > 0`.
    pub conditional_success_shifted: Option<f64>,
    pub mean_paired_final_difference: f64,
}

fn arm(inst: &SingleIndexInstance, cfg: &ParametricConfig, stride_by: usize) -> Result<ArmResult> {
    let out = run_algorithm1(inst, cfg)?;
    Ok(ArmResult {
        mu_star: inst.mu_star(),
        initial_overlap: out.initial_overlap(),
        post_step1_overlap: out.post_step1_overlap(),
        final_overlap: out.final_overlap(),
        step1_sign: out.step1_sign,
        overlap_trace: stride(&out.overlap_trace, stride_by),
    })
}

/// One paired cell: the shifted instance and its `α = 0` twin share `w*`,
/// `θ_0` and every Gaussian draw.
pub fn parametric_pair(params: &ParametricParams, seed: u64) -> Result<PairedRun> {
    let link = LinkFunction::from_name(&params.link)?;
    let inst = SingleIndexInstance::random(params.d, link, true, params.noise_sigma, params.instance_seed_offset + seed)?;
    let twin = inst.with_shift(Array1::zeros(params.d))?;
    let cfg = params.config(seed);
    Ok(PairedRun {
        seed,
        shifted: arm(&inst, &cfg, params.trace_stride)?,
        control: arm(&twin, &cfg, params.trace_stride)?,
    })
}

pub fn summarize_shift_advantage(runs: Vec<PairedRun>, success_overlap: f64) -> Result<ShiftAdvantage> {
    if runs.is_empty() {
        return Err(LabError::Config("no runs to summarize".into()));
    }
    let col = |f: &dyn Fn(&PairedRun) -> f64| runs.iter().map(f).collect::<Vec<f64>>();
    let positive: Vec<&PairedRun> = runs.iter().filter(|r| r.shifted.initial_overlap > 0.0).collect();
    let conditional = (!positive.is_empty()).then(|| {
        positive.iter().filter(|r| r.shifted.final_overlap >= success_overlap).count() as f64 / positive.len() as f64
    });
    let diffs = col(&|r| r.shifted.final_overlap - r.control.final_overlap);
    Ok(ShiftAdvantage {
        median_post_step1_shifted: median(&col(&|r| r.shifted.post_step1_overlap.abs())),
        median_post_step1_control: median(&col(&|r| r.control.post_step1_overlap.abs())),
        median_final_shifted: median(&col(&|r| r.shifted.final_overlap.abs())),
        median_final_control: median(&col(&|r| r.control.final_overlap.abs())),
        successes_shifted: runs.iter().filter(|r| r.shifted.final_overlap >= success_overlap).count(),
        successes_control: runs.iter().filter(|r| r.control.final_overlap >= success_overlap).count(),
        conditional_success_shifted: conditional,
        mean_paired_final_difference: diffs.iter().sum::<f64>() / diffs.len() as f64,
        runs,
    })
}

/// Paired runs of the two-stage learner with `α ~ N(0, I_d)` against `α = 0`.
pub fn compare_shift_advantage(params: &ParametricParams, seeds: &[u64]) -> Result<ShiftAdvantage> {
    let runs = seeds
        .par_iter()
        .map(|&s| parametric_pair(params, s))
        .collect::<Result<Vec<_>>>()?;
    summarize_shift_advantage(runs, params.success_overlap)
}

// ---------------------------------------------------------------- semiparam

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SemiparamParams {
    pub link: String,
    pub d: usize,
    /// `None` selects `4 d²`.
    pub n: Option<usize>,
    /// `None` selects `max(8, ⌈√(n/d²)⌉)`.
    pub width: Option<usize>,
    pub noise_sigma: f64,
    /// `seed` is overwritten by the run seed.
    pub flow: FlowConfig,
    pub test_size: usize,
    pub instance_seed_offset: u64,
    /// Also run the `α = 0` arm.
    pub control: bool,
    pub trace_stride: usize,
}

impl Default for SemiparamParams {
    fn default() -> Self {
        Self {
            link: "hermite:2".into(),
            d: 32,
            n: None,
            width: None,
            noise_sigma: 0.0,
            flow: FlowConfig { horizon_t: 40.0, ..FlowConfig::default() },
            test_size: 10_000,
            instance_seed_offset: 1000,
            control: true,
            trace_stride: 20,
        }
    }
}

impl SemiparamParams {
    pub fn fast(self) -> Self {
        Self { d: 16, ..self }
    }

    pub fn sample_size(&self) -> usize {
        self.n.unwrap_or(4 * self.d * self.d)
    }

    pub fn width_k(&self) -> usize {
        self.width.unwrap_or_else(|| default_width(self.sample_size(), self.d))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemiparamRun {
    pub seed: u64,
    pub shifted: bool,
    pub d: usize,
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub initial_overlap: f64,
    /// `|⟨θ_T, w*⟩|`; the model is symmetric under `(θ, s) → (−θ, −s)`.
    pub final_overlap: f64,
    pub test_mse: f64,
    pub conservation_error: f64,
    pub overlap_trace: Vec<(usize, f64)>,
}

pub fn semiparam_runs(params: &SemiparamParams, seed: u64) -> Result<Vec<SemiparamRun>> {
    let link = LinkFunction::from_name(&params.link)?;
    let inst = SingleIndexInstance::random(params.d, link, true, params.noise_sigma, params.instance_seed_offset + seed)?;
    let mut arms = vec![(true, inst.clone())];
    if params.control {
        arms.push((false, inst.with_shift(Array1::zeros(params.d))?));
    }
    let cfg = FlowConfig { seed, ..params.flow.clone() };
    let (n, k) = (params.sample_size(), params.width_k());
    arms.into_iter()
        .map(|(shifted, inst)| {
            let out = run_algorithm2(&inst, k, &cfg, n)?;
            Ok(SemiparamRun {
                seed,
                shifted,
                d: params.d,
                n,
                k,
                initial_overlap: out.overlap_trace[0],
                final_overlap: inst.overlap(&out.theta_final).abs(),
                test_mse: network_test_mse(&out.net, &inst, params.test_size, seed)?,
                conservation_error: out.conservation_error,
                overlap_trace: stride(&out.overlap_trace, params.trace_stride),
            })
        })
        .collect()
}

// ---------------------------------------------------------------- prop31

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Prop31Params {
    pub d: usize,
    /// The target is the sum of these monomials (0-based coordinates).
    pub monomials: Vec<Vec<usize>>,
    pub eta: f64,
    pub epsilon_grid: Vec<f64>,
    pub n_mu: usize,
}

impl Default for Prop31Params {
    fn default() -> Self {
        Self {
            d: 2,
            monomials: vec![vec![0, 1]],
            eta: 0.5,
            epsilon_grid: vec![0.025, 0.05, 0.1, 0.2, 0.4],
            n_mu: 10_000,
        }
    }
}

impl Prop31Params {
    pub fn fast(self) -> Self {
        Self { n_mu: 2_000, ..self }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prop31Record {
    pub seed: u64,
    pub j: usize,
    pub epsilon: f64,
    pub estimate: f64,
    pub std_error: f64,
    /// Exact value when the target is a single product of two coordinates.
    pub closed_form: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prop31Output {
    pub rows: Vec<Prop31Record>,
    /// `(seed, j, slope)` of log-estimate against log-ε.
    pub slopes: Vec<(u64, usize, Option<f64>)>,
}

pub fn run_prop31(params: &Prop31Params, seed: u64) -> Result<Prop31Output> {
    let f = junta_from_monomials(params.d, &params.monomials)?;
    let pair = params.monomials.len() == 1 && params.monomials[0].len() == 2;
    let rows: Vec<Prop31Record> = prop31_sweep(&f, params.eta, &params.epsilon_grid, params.n_mu, seed)?
        .into_iter()
        .map(|r| Prop31Record {
            seed,
            j: r.j,
            epsilon: r.epsilon,
            estimate: r.estimate,
            std_error: r.std_error,
            closed_form: pair.then(|| pair_product_small_coefficient(r.epsilon, params.eta)),
        })
        .collect();
    let slopes = f
        .support()
        .iter()
        .map(|&j| {
            let (x, y): (Vec<f64>, Vec<f64>) = rows.iter().filter(|r| r.j == j).map(|r| (r.epsilon, r.estimate)).unzip();
            (seed, j, loglog_slope(&x, &y))
        })
        .collect();
    Ok(Prop31Output { rows, slopes })
}

// ---------------------------------------------------------------- joint SGD

/// The staircase-like target `x₁ + x₁x₂x₃ + x₁⋯x₆`.
pub fn figure1_monomials() -> Vec<Vec<usize>> {
    vec![vec![0], vec![0, 1, 2], (0..6).collect()]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Figure1Params {
    pub d_list: Vec<usize>,
    pub eta_list: Vec<f64>,
    pub monomials: Vec<Vec<usize>>,
    pub width: usize,
    pub batch: usize,
    pub rate: f64,
    pub threshold: f64,
    pub max_epochs: usize,
    pub steps_per_epoch: usize,
    pub test_size: usize,
}

impl Default for Figure1Params {
    fn default() -> Self {
        Self {
            d_list: vec![50, 70, 86, 100, 120, 150, 175],
            eta_list: vec![0.0, 0.1, 0.25, 0.5],
            monomials: figure1_monomials(),
            width: 512,
            batch: 64,
            rate: 0.0075,
            threshold: 1e-2,
            max_epochs: 300,
            steps_per_epoch: 100,
            test_size: 10_000,
        }
    }
}

impl Figure1Params {
    pub fn fast(self) -> Self {
        Self { d_list: vec![30, 50, 70], ..self }
    }

    pub fn joint_config(&self) -> JointConfig {
        JointConfig {
            batch: self.batch,
            rate: self.rate,
            max_epochs: self.max_epochs,
            steps_per_epoch: self.steps_per_epoch,
            test_size: self.test_size,
            threshold: Some(self.threshold),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointCell {
    pub d: usize,
    pub eta: f64,
    pub seed: u64,
    pub epochs_to_threshold: Option<usize>,
    pub censored: bool,
    pub epochs_run: usize,
    pub final_test_error: f64,
    pub trace: Vec<EpochError>,
    #[serde(skip)]
    pub net: Option<TwoLayerNet>,
}

/// One joint-SGD run: `μ ~ Unif[−η, η]^d` from the SHIFT stream and the
/// uniform `1/√fan_in` initialization from the INIT stream of `seed`.
pub fn joint_cell(monomials: &[Vec<usize>], d: usize, eta: f64, width: usize, cfg: &JointConfig, seed: u64) -> Result<JointCell> {
    let f = junta_from_monomials(d, monomials)?;
    let root = SeedStream::new(seed);
    let shift = ProductShift::uniform(d, eta, &mut root.stream(streams::SHIFT))?;
    let net = TwoLayerNet::uniform_init(width, d, &mut root.stream(streams::INIT));
    let out = joint_sgd_train(&net, &f, &shift, cfg, seed)?;
    let last = out.trace.last().map(|e| e.test_error).unwrap_or(f64::NAN);
    Ok(JointCell {
        d,
        eta,
        seed,
        epochs_to_threshold: out.epochs_to_threshold,
        censored: cfg.threshold.is_some() && out.epochs_to_threshold.is_none(),
        epochs_run: out.trace.len(),
        final_test_error: last,
        trace: out.trace,
        net: Some(out.net),
    })
}

/// Every `(d, η, seed)` cell, in grid order.
pub fn figure1_grid(params: &Figure1Params, seeds: &[u64]) -> Vec<(usize, f64, u64)> {
    let mut cells = Vec::new();
    for &d in &params.d_list {
        for &eta in &params.eta_list {
            for &s in seeds {
                cells.push((d, eta, s));
            }
        }
    }
    cells
}

pub fn run_figure1(params: &Figure1Params, seeds: &[u64]) -> Result<Vec<JointCell>> {
    let cfg = params.joint_config();
    figure1_grid(params, seeds)
        .into_par_iter()
        .map(|(d, eta, s)| {
            let mut c = joint_cell(&params.monomials, d, eta, params.width, &cfg, s)?;
            c.net = None;
            Ok(c)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Figure1Summary {
    pub d: usize,
    pub eta: f64,
    pub runs: usize,
    pub censored: usize,
    /// `None` when the median run is censored.
    pub median_epochs: Option<f64>,
}

pub fn summarize_figure1(cells: &[JointCell]) -> Vec<Figure1Summary> {
    let mut keys: Vec<(usize, f64)> = Vec::new();
    for c in cells {
        if !keys.iter().any(|k| k.0 == c.d && k.1 == c.eta) {
            keys.push((c.d, c.eta));
        }
    }
    keys.into_iter()
        .map(|(d, eta)| {
            let group: Vec<&JointCell> = cells.iter().filter(|c| c.d == d && c.eta == eta).collect();
            let epochs: Vec<Option<f64>> = group.iter().map(|c| c.epochs_to_threshold.map(|e| e as f64)).collect();
            Figure1Summary {
                d,
                eta,
                runs: group.len(),
                censored: group.iter().filter(|c| c.censored).count(),
                median_epochs: censored_median(&epochs),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JuntaJointParams {
    pub d: usize,
    pub monomials: Vec<Vec<usize>>,
    pub eta_list: Vec<f64>,
    pub width: usize,
    pub joint: JointConfig,
    pub save_checkpoints: bool,
}

impl Default for JuntaJointParams {
    fn default() -> Self {
        Self {
            d: 50,
            monomials: figure1_monomials(),
            eta_list: vec![0.0, 0.5],
            width: 512,
            joint: JointConfig { rate: 0.0075, max_epochs: 300, ..JointConfig::default() },
            save_checkpoints: false,
        }
    }
}

impl JuntaJointParams {
    pub fn fast(self) -> Self {
        Self {
            d: 30,
            joint: JointConfig { max_epochs: self.joint.max_epochs.min(100), ..self.joint },
            ..self
        }
    }
}

// ---------------------------------------------------------------- layerwise

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JuntaLayerwiseParams {
    pub d: usize,
    pub monomials: Vec<Vec<usize>>,
    pub eta: f64,
    /// Second arm with the same budget, normally `η = 0`.
    pub control_eta: Option<f64>,
    /// `seed` is overwritten by the run seed.
    pub layerwise: LayerwiseConfig,
    pub loss: SecondLoss,
    pub test_size: usize,
    pub success_mse: f64,
    pub save_checkpoints: bool,
}

impl Default for JuntaLayerwiseParams {
    fn default() -> Self {
        Self {
            d: 50,
            monomials: vec![vec![0, 1]],
            eta: 0.5,
            control_eta: Some(0.0),
            layerwise: LayerwiseConfig::default(),
            loss: SecondLoss::Squared,
            test_size: 10_000,
            success_mse: 0.05,
            save_checkpoints: false,
        }
    }
}

impl JuntaLayerwiseParams {
    pub fn fast(self) -> Self {
        Self {
            layerwise: LayerwiseConfig {
                batch_b: 500_000,
                second_steps_t: 20_000,
                ..self.layerwise
            },
            ..self
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerwiseRun {
    pub seed: u64,
    pub eta: f64,
    pub test_mse: f64,
    pub success: bool,
    /// `min_{j ∈ S} |μ_j|`, which drives the separation of projections.
    pub min_abs_mu_support: f64,
    pub alpha_hat_support: Vec<f64>,
    #[serde(skip)]
    pub net: Option<TwoLayerNet>,
}

pub fn layerwise_run(params: &JuntaLayerwiseParams, eta: f64, seed: u64) -> Result<LayerwiseRun> {
    let f = junta_from_monomials(params.d, &params.monomials)?;
    let shift = ProductShift::uniform(params.d, eta, &mut SeedStream::new(seed).stream(streams::SHIFT))?;
    let cfg = LayerwiseConfig { seed, ..params.layerwise.clone() };
    let out = run_layerwise(&f, &shift, &cfg, params.loss, params.test_size)?;
    let min_mu = f.support().iter().map(|&j| shift.mu()[j].abs()).fold(f64::INFINITY, f64::min);
    Ok(LayerwiseRun {
        seed,
        eta,
        test_mse: out.test_mse,
        success: out.test_mse <= params.success_mse,
        min_abs_mu_support: min_mu,
        alpha_hat_support: f.support().iter().map(|&j| out.alpha_hat[j]).collect(),
        net: Some(out.net),
    })
}

/// The main arm and the optional control for one seed.
pub fn layerwise_runs(params: &JuntaLayerwiseParams, seed: u64) -> Result<Vec<LayerwiseRun>> {
    let mut etas = vec![params.eta];
    etas.extend(params.control_eta);
    etas.into_iter().map(|eta| layerwise_run(params, eta, seed)).collect()
}

/// Elapsed seconds of `f`, alongside its value.
pub(crate) fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed().as_secs_f64())
}
