//! Gradient flow of the shared-direction network with coupled biases on
//! shifted Gaussian data.
use shiftlab::hermite::LinkFunction;
use shiftlab::semiparametric::{default_width, network_test_mse, run_algorithm2, FlowConfig};
use shiftlab::single_index::SingleIndexInstance;

fn main() -> shiftlab::Result<()> {
    let d = 16;
    let n = 4 * d * d;
    let k = default_width(n, d);
    let cfg = FlowConfig::default();
    for seed in 0..3 {
        let inst = SingleIndexInstance::random(d, LinkFunction::hermite(2)?, true, 0.0, 1000 + seed)?;
        let out = run_algorithm2(&inst, k, &FlowConfig { seed, ..cfg.clone() }, n)?;
        println!(
            "seed {seed}: mu* = {:.2}, |m| {:.3} -> {:.3}, test MSE {:.4}, bias drift {:.1e}",
            inst.mu_star(),
            out.overlap_trace[0].abs(),
            out.overlap_trace.last().unwrap().abs(),
            network_test_mse(&out.net, &inst, 5000, seed)?,
            out.conservation_error
        );
    }
    Ok(())
}
