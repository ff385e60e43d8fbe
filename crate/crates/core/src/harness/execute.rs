use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::error::Result;

use super::output::{opt_field, write_jsonl, CsvWriter};
use super::runners::*;
use super::spec::{ExperimentKind, ExperimentSpec, RunRecord};

/// Seeds kept by the `--fast` profile.
pub const FAST_SEEDS: usize = 5;

/// What a CLI invocation produced.
#[derive(Debug, Clone)]
pub struct ExecutionReport {
    pub spec: ExperimentSpec,
    pub spec_hash: String,
    pub records: Vec<RunRecord>,
    pub files: Vec<PathBuf>,
    /// `(seed, message)` for every cell that returned an error.
    pub failures: Vec<(u64, String)>,
}

impl ExecutionReport {
    pub fn all_completed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn to_object<P: Serialize>(p: &P) -> Result<serde_json::Map<String, Value>> {
    match serde_json::to_value(p)? {
        Value::Object(m) => Ok(m),
        _ => unreachable!("parameter structs serialize to objects"),
    }
}

/// Fills in defaults and applies the `--fast` profile, so the hash covers
/// every value a run actually used.
pub fn effective_spec(spec: &ExperimentSpec, fast: bool) -> Result<ExperimentSpec> {
    spec.validate()?;
    let mut out = spec.clone();
    macro_rules! apply {
        ($ty:ty) => {{
            let p: $ty = spec.typed_parameters()?;
            out.parameters = to_object(&if fast { p.fast() } else { p })?;
        }};
    }
    match spec.kind {
        ExperimentKind::Smallball => apply!(SmallBallParams),
        ExperimentKind::Parametric => apply!(ParametricParams),
        ExperimentKind::Semiparam => apply!(SemiparamParams),
        ExperimentKind::Prop31 => apply!(Prop31Params),
        ExperimentKind::Figure1 => apply!(Figure1Params),
        ExperimentKind::JuntaLayerwise => apply!(JuntaLayerwiseParams),
        ExperimentKind::JuntaJoint => apply!(JuntaJointParams),
    }
    if fast {
        out.seeds.truncate(FAST_SEEDS);
    }
    Ok(out)
}

struct Sink<'a> {
    dir: &'a Path,
    hash: &'a str,
    files: Vec<PathBuf>,
    records: Vec<RunRecord>,
    failures: Vec<(u64, String)>,
}

impl Sink<'_> {
    fn csv(&mut self, name: &str, columns: &[&str], rows: Vec<Vec<String>>) -> Result<PathBuf> {
        let mut w = CsvWriter::create(self.dir.join(name), self.hash, columns)?;
        for r in &rows {
            w.row(r)?;
        }
        let p = w.finish()?;
        self.files.push(p.clone());
        Ok(p)
    }

    fn record(&mut self, seed: u64, metrics: BTreeMap<String, f64>, trace_paths: Vec<PathBuf>, wall_time_s: f64) {
        self.records.push(RunRecord {
            spec_hash: self.hash.to_string(),
            seed,
            metrics,
            trace_paths,
            wall_time_s,
        });
    }

    fn fail(&mut self, seed: u64, err: impl ToString) {
        let msg = err.to_string();
        log::error!("cell with seed {seed} failed: {msg}");
        self.failures.push((seed, msg));
    }
}

fn metrics<const N: usize>(pairs: [(&str, f64); N]) -> BTreeMap<String, f64> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn trace_rows(trace: &[(usize, f64)]) -> Vec<Vec<String>> {
    trace.iter().map(|(i, v)| vec![i.to_string(), v.to_string()]).collect()
}

fn opt_f(v: Option<f64>) -> f64 {
    v.unwrap_or(f64::NAN)
}

/// `<kind>_spec.json`: the effective spec plus what the parameters leave implicit.
/// JSON has no comment syntax, so hash and version are fields here.
fn metadata(spec: &ExperimentSpec, hash: &str) -> Value {
    let mut meta = serde_json::json!({
        "spec_hash": hash,
        "version": super::spec::ARTIFACT_VERSION,
        "spec": spec,
    });
    if matches!(spec.kind, ExperimentKind::Figure1 | ExperimentKind::JuntaJoint) {
        meta["initialization"] = "W, b ~ U(-1/sqrt(d), 1/sqrt(d)); a ~ U(-1/sqrt(width), 1/sqrt(width))".into();
    }
    meta
}

/// Runs every cell of `spec` and writes tables, traces and records under
/// `out_dir` (or the spec's own `output_dir`).
pub fn execute(spec: &ExperimentSpec, fast: bool, out_dir: Option<&Path>) -> Result<ExecutionReport> {
    let spec = effective_spec(spec, fast)?;
    let hash = spec.spec_hash();
    let dir = out_dir.map(Path::to_path_buf).unwrap_or_else(|| spec.output_dir.clone());
    std::fs::create_dir_all(&dir)?;
    log::info!("{} spec {hash} with {} seeds into {}", spec.kind, spec.seeds.len(), dir.display());
    let mut sink = Sink {
        dir: &dir,
        hash: &hash,
        files: Vec::new(),
        records: Vec::new(),
        failures: Vec::new(),
    };
    let seeds = spec.seeds.clone();
    let kind = spec.kind;
    match kind {
        ExperimentKind::Smallball => {
            let p: SmallBallParams = spec.typed_parameters()?;
            let results: Vec<_> = seeds.par_iter().map(|&s| (s, timed(|| run_smallball_sweep(&p, s)))).collect();
            let mut rows = Vec::new();
            for (s, (res, wall)) in results {
                match res {
                    Ok(cells) => {
                        let mut m = BTreeMap::new();
                        for c in &cells {
                            m.insert(format!("{}@{}/estimate", c.link, c.lambda), c.estimate);
                            m.insert(format!("{}@{}/std_error", c.link, c.lambda), c.std_error);
                            rows.push(vec![
                                c.link.clone(),
                                c.lambda.to_string(),
                                s.to_string(),
                                c.estimate.to_string(),
                                c.std_error.to_string(),
                                c.n_samples.to_string(),
                                opt_field(c.oracle),
                            ]);
                        }
                        sink.record(s, m, vec![], wall);
                    }
                    Err(e) => sink.fail(s, e),
                }
            }
            sink.csv("smallball.csv", &["link", "lambda", "seed", "estimate", "std_error", "n_samples", "oracle"], rows)?;
        }
        ExperimentKind::Parametric => {
            let p: ParametricParams = spec.typed_parameters()?;
            let results: Vec<_> = seeds.par_iter().map(|&s| (s, timed(|| parametric_pair(&p, s)))).collect();
            let mut runs = Vec::new();
            let mut rows = Vec::new();
            for (s, (res, wall)) in results {
                match res {
                    Ok(run) => {
                        let mut paths = Vec::new();
                        for (arm, r) in [("shifted", &run.shifted), ("control", &run.control)] {
                            rows.push(vec![
                                s.to_string(),
                                arm.into(),
                                r.mu_star.to_string(),
                                r.initial_overlap.to_string(),
                                r.post_step1_overlap.to_string(),
                                r.final_overlap.to_string(),
                                r.step1_sign.to_string(),
                            ]);
                            paths.push(sink.csv(&format!("traces/parametric/{arm}_seed{s}.csv"), &["step", "overlap"], trace_rows(&r.overlap_trace))?);
                        }
                        let m = metrics([
                            ("shifted/post_step1_overlap", run.shifted.post_step1_overlap),
                            ("shifted/final_overlap", run.shifted.final_overlap),
                            ("control/post_step1_overlap", run.control.post_step1_overlap),
                            ("control/final_overlap", run.control.final_overlap),
                            ("mu_star", run.shifted.mu_star),
                        ]);
                        sink.record(s, m, paths, wall);
                        runs.push(run);
                    }
                    Err(e) => sink.fail(s, e),
                }
            }
            sink.csv(
                "parametric.csv",
                &["seed", "arm", "mu_star", "initial_overlap", "post_step1_overlap", "final_overlap", "step1_sign"],
                rows,
            )?;
            if !runs.is_empty() {
                let s = summarize_shift_advantage(runs, p.success_overlap)?;
                let row = vec![
                    s.runs.len().to_string(),
                    s.median_post_step1_shifted.to_string(),
                    s.median_post_step1_control.to_string(),
                    s.median_final_shifted.to_string(),
                    s.median_final_control.to_string(),
                    s.successes_shifted.to_string(),
                    s.successes_control.to_string(),
                    opt_field(s.conditional_success_shifted),
                    s.mean_paired_final_difference.to_string(),
                ];
                sink.csv(
                    "parametric_summary.csv",
                    &[
                        "runs",
                        "median_post_step1_shifted",
                        "median_post_step1_control",
                        "median_final_shifted",
                        "median_final_control",
                        "successes_shifted",
                        "successes_control",
                        "conditional_success_shifted",
                        "mean_paired_final_difference",
                    ],
                    vec![row],
                )?;
            }
        }
        ExperimentKind::Semiparam => {
            let p: SemiparamParams = spec.typed_parameters()?;
            let results: Vec<_> = seeds.par_iter().map(|&s| (s, timed(|| semiparam_runs(&p, s)))).collect();
            let mut lines = Vec::new();
            for (s, (res, wall)) in results {
                match res {
                    Ok(runs) => {
                        let mut m = BTreeMap::new();
                        let mut paths = Vec::new();
                        for r in &runs {
                            let arm = if r.shifted { "shifted" } else { "control" };
                            m.insert(format!("{arm}/final_overlap"), r.final_overlap);
                            m.insert(format!("{arm}/test_mse"), r.test_mse);
                            m.insert(format!("{arm}/conservation_error"), r.conservation_error);
                            paths.push(sink.csv(&format!("traces/semiparam/{arm}_seed{s}.csv"), &["step", "overlap"], trace_rows(&r.overlap_trace))?);
                            lines.push(serde_json::json!({
                                "seed": r.seed, "arm": arm, "d": r.d, "n": r.n, "K": r.k,
                                "final_overlap": r.final_overlap, "test_mse": r.test_mse,
                            }));
                        }
                        sink.record(s, m, paths, wall);
                    }
                    Err(e) => sink.fail(s, e),
                }
            }
            sink.files.push(write_jsonl(&dir.join("semiparam_runs.jsonl"), &hash, &lines)?);
        }
        ExperimentKind::Prop31 => {
            let p: Prop31Params = spec.typed_parameters()?;
            let results: Vec<_> = seeds.iter().map(|&s| (s, timed(|| run_prop31(&p, s)))).collect();
            let mut rows = Vec::new();
            let mut slope_rows = Vec::new();
            for (s, (res, wall)) in results {
                match res {
                    Ok(out) => {
                        let mut m = BTreeMap::new();
                        for r in &out.rows {
                            m.insert(format!("j{}@{}/estimate", r.j, r.epsilon), r.estimate);
                            rows.push(vec![
                                s.to_string(),
                                r.j.to_string(),
                                r.epsilon.to_string(),
                                r.estimate.to_string(),
                                r.std_error.to_string(),
                                opt_field(r.closed_form),
                            ]);
                        }
                        for (seed, j, slope) in &out.slopes {
                            m.insert(format!("j{j}/loglog_slope"), opt_f(*slope));
                            slope_rows.push(vec![seed.to_string(), j.to_string(), opt_field(*slope)]);
                        }
                        sink.record(s, m, vec![], wall);
                    }
                    Err(e) => sink.fail(s, e),
                }
            }
            sink.csv("prop31.csv", &["seed", "j", "epsilon", "estimate", "std_error", "closed_form"], rows)?;
            sink.csv("prop31_slopes.csv", &["seed", "j", "loglog_slope"], slope_rows)?;
        }
        ExperimentKind::Figure1 | ExperimentKind::JuntaJoint => {
            let (monomials, width, cfg, grid, save, name) = if kind == ExperimentKind::Figure1 {
                let p: Figure1Params = spec.typed_parameters()?;
                let grid = figure1_grid(&p, &seeds);
                (p.monomials.clone(), p.width, p.joint_config(), grid, false, "figure1")
            } else {
                let p: JuntaJointParams = spec.typed_parameters()?;
                let grid = p.eta_list.iter().flat_map(|&eta| seeds.iter().map(move |&s| (p.d, eta, s))).collect();
                (p.monomials.clone(), p.width, p.joint.clone(), grid, p.save_checkpoints, "junta-joint")
            };
            let results: Vec<_> = grid
                .par_iter()
                .map(|&(d, eta, s)| ((d, eta, s), timed(|| joint_cell(&monomials, d, eta, width, &cfg, s))))
                .collect();
            let mut rows = Vec::new();
            let mut cells = Vec::new();
            for ((d, eta, s), (res, wall)) in results {
                match res {
                    Ok(mut c) => {
                        let stem = format!("d{d}_eta{eta}_seed{s}");
                        let trace: Vec<(usize, f64)> = c.trace.iter().map(|e| (e.epoch, e.test_error)).collect();
                        let mut paths = vec![sink.csv(&format!("traces/{name}/{stem}.csv"), &["epoch", "test_error"], trace_rows(&trace))?];
                        if save {
                            if let Some(net) = &c.net {
                                let (bin, json) = net.save(&dir.join("checkpoints").join(format!("{name}_{stem}")))?;
                                sink.files.extend([bin.clone(), json.clone()]);
                                paths.extend([bin, json]);
                            }
                        }
                        c.net = None;
                        rows.push(vec![
                            d.to_string(),
                            eta.to_string(),
                            s.to_string(),
                            opt_field(c.epochs_to_threshold),
                            c.censored.to_string(),
                            c.epochs_run.to_string(),
                            c.final_test_error.to_string(),
                        ]);
                        let m = metrics([
                            ("d", d as f64),
                            ("eta", eta),
                            ("epochs_to_threshold", opt_f(c.epochs_to_threshold.map(|e| e as f64))),
                            ("censored", if c.censored { 1.0 } else { 0.0 }),
                            ("final_test_error", c.final_test_error),
                        ]);
                        sink.record(s, m, paths, wall);
                        cells.push(c);
                    }
                    Err(e) => sink.fail(s, e),
                }
            }
            sink.csv(
                &format!("{name}.csv"),
                &["d", "eta", "seed", "epochs_to_threshold", "censored", "epochs_run", "final_test_error"],
                rows,
            )?;
            let summary = summarize_figure1(&cells)
                .into_iter()
                .map(|r| {
                    vec![
                        r.d.to_string(),
                        r.eta.to_string(),
                        r.runs.to_string(),
                        r.censored.to_string(),
                        opt_field(r.median_epochs),
                        r.median_epochs.is_none().to_string(),
                    ]
                })
                .collect();
            sink.csv(
                &format!("{name}_summary.csv"),
                &["d", "eta", "runs", "censored_runs", "median_epochs", "median_censored"],
                summary,
            )?;
        }
        ExperimentKind::JuntaLayerwise => {
            let p: JuntaLayerwiseParams = spec.typed_parameters()?;
            let results: Vec<_> = seeds.par_iter().map(|&s| (s, timed(|| layerwise_runs(&p, s)))).collect();
            let mut rows = Vec::new();
            for (s, (res, wall)) in results {
                match res {
                    Ok(runs) => {
                        let mut m = BTreeMap::new();
                        let mut paths = Vec::new();
                        for r in &runs {
                            m.insert(format!("eta{}/test_mse", r.eta), r.test_mse);
                            if p.save_checkpoints {
                                if let Some(net) = &r.net {
                                    let (bin, json) = net.save(&dir.join("checkpoints").join(format!("layerwise_eta{}_seed{s}", r.eta)))?;
                                    sink.files.extend([bin.clone(), json.clone()]);
                                    paths.extend([bin, json]);
                                }
                            }
                            let alpha: Vec<String> = r.alpha_hat_support.iter().map(|a| a.to_string()).collect();
                            rows.push(vec![
                                s.to_string(),
                                r.eta.to_string(),
                                r.test_mse.to_string(),
                                r.success.to_string(),
                                r.min_abs_mu_support.to_string(),
                                alpha.join(" "),
                            ]);
                        }
                        sink.record(s, m, paths, wall);
                    }
                    Err(e) => sink.fail(s, e),
                }
            }
            sink.csv(
                "junta-layerwise.csv",
                &["seed", "eta", "test_mse", "success", "min_abs_mu_support", "alpha_hat_support"],
                rows,
            )?;
        }
    }
    let meta_path = dir.join(format!("{kind}_spec.json"));
    std::fs::write(&meta_path, serde_json::to_string_pretty(&metadata(&spec, &hash))?)?;
    sink.files.push(meta_path);
    let records_path = dir.join(format!("{kind}_records.jsonl"));
    sink.files.push(write_jsonl(&records_path, &hash, &sink.records)?);
    let Sink { files, records, failures, .. } = sink;
    Ok(ExecutionReport {
        spec,
        spec_hash: hash,
        records,
        files,
        failures,
    })
}
