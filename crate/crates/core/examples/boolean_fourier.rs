//! Fourier expansion of a junta in the shifted character basis, and how often
//! a first-order coefficient is small.
use shiftlab::boolean::{influence, shifted_spectrum, BooleanJunta, ProductShift};
use shiftlab::harness::{run_prop31, Prop31Params};

fn main() -> shiftlab::Result<()> {
    let f = BooleanJunta::sum_of_monomials(4, &[&[0], &[0, 1, 2]])?;
    let shift = ProductShift::new(vec![0.3, -0.2, 0.4, 0.0])?;
    let spec = shifted_spectrum(&f, &shift)?;
    for (mask, c) in spec.iter().enumerate() {
        let set: Vec<usize> = (0..f.k()).filter(|&p| mask & f.bit(p) != 0).map(|p| f.support()[p]).collect();
        println!("S = {set:?}: {c:+.5}");
    }
    println!("influence of x1 under the uniform measure: {}", influence(&f, 0));

    let out = run_prop31(&Prop31Params::default().fast(), 0)?;
    for r in out.rows.iter().filter(|r| r.j == 0) {
        println!("eps {:<6} P(small) = {:.4} +- {:.4} (closed form {:?})", r.epsilon, r.estimate, r.std_error, r.closed_form);
    }
    println!("log-log slopes: {:?}", out.slopes);
    Ok(())
}
