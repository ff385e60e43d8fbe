//! Paired runs of the two-stage spherical SGD learner on H3, with and
//! without a random input shift.
use shiftlab::harness::{compare_shift_advantage, ParametricParams};

fn main() -> shiftlab::Result<()> {
    let params = ParametricParams { d: 32, n_step2: 20_000, ..Default::default() };
    let s = compare_shift_advantage(&params, &[0, 1, 2, 3, 4, 5])?;
    println!("seed  mu*     |m| after step 1 (shifted, control)  final m (shifted, control)");
    for r in &s.runs {
        println!(
            "{:>4} {:>6.2}   {:>6.3} {:>6.3}                         {:>6.3} {:>6.3}",
            r.seed,
            r.shifted.mu_star,
            r.shifted.post_step1_overlap.abs(),
            r.control.post_step1_overlap.abs(),
            r.shifted.final_overlap,
            r.control.final_overlap
        );
    }
    println!("median |m| after step 1: {:.3} vs {:.3}", s.median_post_step1_shifted, s.median_post_step1_control);
    Ok(())
}
