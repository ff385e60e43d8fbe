use crate::error::Result;

use super::junta::{fill_signs, BooleanJunta};
use super::shift::ProductShift;

/// `χ_{S,μ}(x) = Π_{i∈S} (x_i - μ_i) / √(1 - μ_i²)`.
pub fn chi_basis(set: &[usize], shift: &ProductShift, x: &[f64]) -> Result<f64> {
    shift.check_nondegenerate(set)?;
    let mu = shift.mu();
    Ok(set
        .iter()
        .map(|&i| (x[i] - mu[i]) / (1.0 - mu[i] * mu[i]).sqrt())
        .product())
}

/// `f̂_μ(S) = E_{D_μ}[f χ_{S,μ}]` by exact enumeration.
///
/// Sets that leave the support give exactly zero: the off-support factor is
/// independent of `f` and centered.
pub fn fourier_coefficient_exact(f: &BooleanJunta, set: &[usize], shift: &ProductShift) -> Result<f64> {
    shift.check_nondegenerate(set)?;
    shift.check_nondegenerate(f.support())?;
    let mut mask = 0usize;
    for &i in set {
        match f.position(i) {
            Some(p) => mask |= f.bit(p),
            None => return Ok(0.0),
        }
    }
    let k = f.k();
    let mu: Vec<f64> = f.support().iter().map(|&j| shift.mu()[j]).collect();
    let sd: Vec<f64> = mu.iter().map(|m| (1.0 - m * m).sqrt()).collect();
    let mut signs = vec![0.0; k];
    let mut total = 0.0;
    for (b, &fv) in f.table().iter().enumerate() {
        fill_signs(b, k, &mut signs);
        let mut weight = 1.0;
        let mut chi = 1.0;
        for p in 0..k {
            weight *= 0.5 * (1.0 + mu[p] * signs[p]);
            if mask & f.bit(p) != 0 {
                chi *= (signs[p] - mu[p]) / sd[p];
            }
        }
        total += weight * fv * chi;
    }
    Ok(total)
}

/// All `2^k` shifted coefficients `f̂_μ(S)`, `S ⊆ T`, indexed by subset mask.
///
/// A tensor-product change of basis, one coordinate at a time: for each
/// coordinate the pair `(f|x=-1, f|x=+1)` becomes `(E[·], E[· χ_i])`.
pub fn shifted_spectrum(f: &BooleanJunta, shift: &ProductShift) -> Result<Vec<f64>> {
    shift.check_nondegenerate(f.support())?;
    let k = f.k();
    let mut v = f.table().to_vec();
    for pos in 0..k {
        let bit = f.bit(pos);
        let m = shift.mu()[f.support()[pos]];
        let sd = (1.0 - m * m).sqrt();
        let (pm, pp) = (0.5 * (1.0 - m), 0.5 * (1.0 + m));
        let (cm, cp) = ((-1.0 - m) / sd, (1.0 - m) / sd);
        for b in 0..v.len() {
            if b & bit == 0 {
                let (lo, hi) = (v[b], v[b | bit]);
                v[b] = pm * lo + pp * hi;
                v[b | bit] = pm * lo * cm + pp * hi * cp;
            }
        }
    }
    Ok(v)
}

/// Outcome of the first-order closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstOrder {
    pub value: f64,
    /// `j` is outside the support, so the coefficient vanishes identically.
    pub structural_zero: bool,
}

/// `f̂_μ({j}) = √(1-μ_j²) Σ_{S∋j} f̂(S) Π_{i∈S∖j} μ_i` from the uniform-measure
/// coefficients.
pub fn first_order_shifted_closed_form(f: &BooleanJunta, j: usize, shift: &ProductShift) -> Result<FirstOrder> {
    let Some(pos) = f.position(j) else {
        return Ok(FirstOrder {
            value: 0.0,
            structural_zero: true,
        });
    };
    shift.check_nondegenerate(&[j])?;
    let k = f.k();
    let bit_j = f.bit(pos);
    let mu: Vec<f64> = f.support().iter().map(|&i| shift.mu()[i]).collect();
    let sum: f64 = f
        .standard_coefficients()
        .iter()
        .enumerate()
        .filter(|(m, _)| m & bit_j != 0)
        .map(|(m, c)| {
            let rest: f64 = (0..k)
                .filter(|&p| p != pos && m & f.bit(p) != 0)
                .map(|p| mu[p])
                .product();
            c * rest
        })
        .sum();
    Ok(FirstOrder {
        value: (1.0 - mu[pos] * mu[pos]).sqrt() * sum,
        structural_zero: false,
    })
}

/// `Inf_j(f) = Σ_{S∋j} f̂(S)²`.
pub fn influence(f: &BooleanJunta, j: usize) -> f64 {
    let Some(pos) = f.position(j) else {
        return 0.0;
    };
    let bit = f.bit(pos);
    f.standard_coefficients()
        .iter()
        .enumerate()
        .filter(|(m, _)| m & bit != 0)
        .map(|(_, c)| c * c)
        .sum()
}
