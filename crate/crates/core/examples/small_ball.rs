//! Monte Carlo small-ball probabilities P(|F1(mu)| <= lambda) under mu ~ N(0,1).
use shiftlab::harness::{run_smallball_sweep, SmallBallParams};

fn main() -> shiftlab::Result<()> {
    let params = SmallBallParams { n_samples: 20_000, ..Default::default() };
    println!("{:<10} {:>6} {:>9} {:>8} {:>9}", "link", "lambda", "estimate", "se", "oracle");
    for r in run_smallball_sweep(&params, 7)? {
        let oracle = r.oracle.map(|o| format!("{o:.4}")).unwrap_or_else(|| "-".into());
        println!("{:<10} {:>6} {:>9.4} {:>8.4} {:>9}", r.link, r.lambda, r.estimate, r.std_error, oracle);
    }
    Ok(())
}
