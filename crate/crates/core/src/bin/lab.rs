use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use shiftlab::harness::{execute, ExperimentKind, ExperimentSpec};

#[derive(Parser)]
#[command(name = "lab", version, about = "Run shiftlab experiments from a JSON config")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    /// JSON experiment config
    #[arg(long)]
    config: PathBuf,
    /// Use the reduced desk-scale profile
    #[arg(long)]
    fast: bool,
    /// Output directory, overriding the config
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated seeds, overriding the config
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
}

#[derive(Subcommand)]
enum Command {
    Smallball(RunArgs),
    Parametric(RunArgs),
    Semiparam(RunArgs),
    Prop31(RunArgs),
    Figure1(RunArgs),
    JuntaLayerwise(RunArgs),
    JuntaJoint(RunArgs),
}

fn run(kind: ExperimentKind, args: RunArgs) -> shiftlab::Result<bool> {
    let text = std::fs::read_to_string(&args.config)?;
    let mut value: serde_json::Value = serde_json::from_str(&text)?;
    // the subcommand names the kind, so configs may omit it
    if let Some(obj) = value.as_object_mut() {
        obj.entry("kind").or_insert_with(|| serde_json::json!(kind));
        if let Some(seeds) = &args.seeds {
            obj.insert("seeds".into(), serde_json::json!(seeds));
        }
    }
    let spec: ExperimentSpec = serde_json::from_value(value)?;
    if spec.kind != kind {
        return Err(shiftlab::LabError::Config(format!(
            "config is for `{}` but the subcommand is `{kind}`",
            spec.kind
        )));
    }
    spec.validate()?;
    let report = execute(&spec, args.fast, args.out.as_deref())?;
    for f in &report.files {
        println!("{}", f.display());
    }
    for (seed, msg) in &report.failures {
        eprintln!("seed {seed}: {msg}");
    }
    Ok(report.all_completed())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let (kind, args) = match cli.command {
        Command::Smallball(a) => (ExperimentKind::Smallball, a),
        Command::Parametric(a) => (ExperimentKind::Parametric, a),
        Command::Semiparam(a) => (ExperimentKind::Semiparam, a),
        Command::Prop31(a) => (ExperimentKind::Prop31, a),
        Command::Figure1(a) => (ExperimentKind::Figure1, a),
        Command::JuntaLayerwise(a) => (ExperimentKind::JuntaLayerwise, a),
        Command::JuntaJoint(a) => (ExperimentKind::JuntaJoint, a),
    };
    match run(kind, args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
