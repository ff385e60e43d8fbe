//! Layerwise training on x1 x2 in d = 50: one large-batch covariance step on
//! the first layer, then convex SGD on the second.
use shiftlab::boolean::{BooleanJunta, ProductShift};
use shiftlab::junta::{run_layerwise, LayerwiseConfig, SecondLoss};
use shiftlab::rng::{streams, SeedStream};

fn main() -> shiftlab::Result<()> {
    let d = 50;
    let f = BooleanJunta::sum_of_monomials(d, &[&[0, 1]])?;
    // smaller budget than the defaults keeps this example quick
    let cfg = LayerwiseConfig { batch_b: 500_000, second_steps_t: 30_000, seed: 1, ..Default::default() };
    for eta in [0.0, 0.5] {
        let shift = ProductShift::uniform(d, eta, &mut SeedStream::new(1).stream(streams::SHIFT))?;
        let out = run_layerwise(&f, &shift, &cfg, SecondLoss::Squared, 10_000)?;
        println!(
            "eta = {eta}: alpha_hat on the support {:.4?}, largest elsewhere {:.4}, test MSE {:.4}",
            &out.alpha_hat.as_slice().unwrap()[..2],
            out.alpha_hat.iter().skip(2).fold(0.0f64, |m, a| m.max(a.abs())),
            out.test_mse
        );
    }
    Ok(())
}
