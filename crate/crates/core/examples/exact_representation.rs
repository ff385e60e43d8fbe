//! Exact ReLU representation of a 3-junta along the first-layer direction.
use rand::Rng;
use shiftlab::boolean::{BooleanJunta, ProductShift};
use shiftlab::junta::{first_layer_population_gradients, min_separation, represent_exact};
use shiftlab::rng::SeedStream;

fn main() -> shiftlab::Result<()> {
    let f = BooleanJunta::sum_of_monomials(3, &[&[0], &[0, 1, 2]])?;
    let shift = ProductShift::new(vec![0.4, -0.3, 0.2])?;
    let alphas: Vec<f64> = first_layer_population_gradients(&f, &shift, 1.0)?.to_vec();
    println!("alphas {alphas:.4?}, min separation {:.4}", min_separation(&alphas));
    let mut rng = SeedStream::new(5).stream(0);
    let l = 3.0;
    let biases: Vec<f64> = (0..256).map(|_| rng.random_range(-l..=l)).collect();
    let rep = represent_exact(&f, &alphas, 2.0, &biases, l)?;
    for (pos, &b) in rep.order.iter().enumerate() {
        println!(
            "pattern {:?}: v = {:+.4}, f = {:+}, network = {:+.12}",
            f.pattern_signs(b),
            rep.values[pos],
            f.table()[b],
            rep.eval(rep.values[pos], &biases)
        );
    }
    println!("max |a*| = {:.3}", rep.max_abs_weight);
    Ok(())
}
