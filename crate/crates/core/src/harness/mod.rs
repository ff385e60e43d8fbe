//! Experiment specs, seeded sweeps and CSV/JSONL persistence.
//!
//! A run is an [`ExperimentSpec`] (kind, parameters, seeds). [`execute`]
//! fills in defaults, optionally applies the `--fast` profile, runs every
//! cell and writes long-format CSV tables, per-cell traces and one
//! [`RunRecord`] per cell. Every file starts with a
//! `# spec_hash=... version=...` comment line.
//!
//! The pure runners (for example [`run_figure1`] or
//! [`compare_shift_advantage`]) return typed results and touch no files.

mod execute;
mod output;
mod runners;
mod spec;

pub use execute::{effective_spec, execute, ExecutionReport, FAST_SEEDS};
pub use output::{header_line, opt_field, parse_header, read_jsonl, write_jsonl, CsvTable, CsvWriter};
pub use runners::{
    censored_median, compare_shift_advantage, figure1_grid, figure1_monomials, joint_cell, layerwise_run,
    layerwise_runs, median, parametric_pair, run_figure1, run_prop31, run_smallball_sweep, semiparam_runs,
    small_ball_oracle, summarize_figure1, summarize_shift_advantage, ArmResult, Figure1Params, Figure1Summary,
    JointCell, JuntaJointParams, JuntaLayerwiseParams, LayerwiseRun, PairedRun, ParametricParams, Prop31Output,
    Prop31Params, Prop31Record, SemiparamParams, SemiparamRun, ShiftAdvantage, SmallBallParams, SmallBallRow,
};
pub use spec::{ExperimentKind, ExperimentSpec, RunRecord, ARTIFACT_VERSION};
