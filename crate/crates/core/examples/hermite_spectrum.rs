//! Hermite coefficients of shifted links and the information exponent.
use shiftlab::hermite::{
    first_coefficient_map, gauss_hermite_rule, hermite_spectrum, information_exponent, LinkFunction, DEFAULT_ZERO_TOL,
};

fn main() -> shiftlab::Result<()> {
    let rule = gauss_hermite_rule(64)?;
    for name in ["hermite:3", "relu", "sigmoid"] {
        let link = LinkFunction::from_name(name)?;
        let ie = information_exponent(&link, &rule, 10, DEFAULT_ZERO_TOL)?;
        let shifted = information_exponent(&link.shifted(0.5), &rule, 10, DEFAULT_ZERO_TOL)?;
        println!("{name}: information exponent {ie:?}, after a 0.5 shift {shifted:?}");
        let coeffs = hermite_spectrum(&link, 6, 0.5, &rule)?.coeffs;
        println!("  coefficients at mu = 0.5: {coeffs:.4?}");
    }
    // F1(mu) for H3 is sqrt(3/2) mu^2: small only near mu = 0
    let h3 = LinkFunction::hermite(3)?;
    for mu in [-1.0, -0.25, 0.0, 0.25, 1.0] {
        let e = first_coefficient_map(&h3, mu, &rule);
        println!("F1(H3, {mu:>5}) = {:.6}", e.value);
    }
    Ok(())
}
