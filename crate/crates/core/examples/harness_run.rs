//! Runs an experiment spec end to end and lists the files it wrote.
use serde_json::json;
use shiftlab::harness::{execute, CsvTable, ExperimentKind, ExperimentSpec};

fn main() -> shiftlab::Result<()> {
    let spec = ExperimentSpec::new(ExperimentKind::Prop31, json!({ "n_mu": 2000 }), vec![0, 1, 2])?;
    let out = std::env::temp_dir().join("shiftlab-harness-example");
    let report = execute(&spec, false, Some(&out))?;
    println!("spec hash {}", report.spec_hash);
    for f in &report.files {
        println!("wrote {}", f.display());
    }
    let table = CsvTable::read(&out.join("prop31.csv"))?;
    println!("{} rows, columns {:?}", table.rows.len(), table.columns);
    assert!(report.all_completed());
    Ok(())
}
