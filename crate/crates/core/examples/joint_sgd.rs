//! Joint SGD on x1 + x1x2x3 + x1...x6 under shifted inputs.
//!
//! `cargo run --release --example joint_sgd -- 50 0.5 0` trains one cell
//! (d, eta, seed) and prints the test error every 25 epochs.
use shiftlab::harness::{figure1_monomials, joint_cell, Figure1Params};

fn main() -> shiftlab::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: &str| args.get(i).cloned().unwrap_or_else(|| default.to_string());
    let d: usize = arg(0, "30").parse().expect("d");
    let eta: f64 = arg(1, "0.5").parse().expect("eta");
    let seed: u64 = arg(2, "0").parse().expect("seed");
    let params = Figure1Params::default();
    let cfg = params.joint_config();
    let cell = joint_cell(&figure1_monomials(), d, eta, params.width, &cfg, seed)?;
    for e in cell.trace.iter().filter(|e| e.epoch % 25 == 0) {
        println!("epoch {:>4}: test error {:.5}", e.epoch, e.test_error);
    }
    match cell.epochs_to_threshold {
        Some(n) => println!("reached {} after {n} epochs", params.threshold),
        None => println!("censored after {} epochs at {:.4}", cell.epochs_run, cell.final_test_error),
    }
    Ok(())
}
