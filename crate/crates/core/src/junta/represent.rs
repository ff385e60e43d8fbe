use crate::boolean::BooleanJunta;
use crate::error::{LabError, Result};

/// Minimum spacing between sorted projection values.
pub const SEPARATION_TOL: f64 = 1e-12;

/// Exact ReLU representation of a junta along one projection.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactRepresentation {
    /// Pool index chosen for each gap, in increasing order of projection value.
    pub selected: Vec<usize>,
    /// Output weights, aligned with `selected`.
    pub a_star: Vec<f64>,
    /// Support patterns (table indices) sorted by `v_s`.
    pub order: Vec<usize>,
    /// Sorted projection values `v_s = γ Σ α_j s_j`.
    pub values: Vec<f64>,
    pub max_abs_weight: f64,
}

impl ExactRepresentation {
    /// `Σ_m a*_m ReLU(v - b_m)`.
    pub fn eval(&self, v: f64, biases: &[f64]) -> f64 {
        self.selected
            .iter()
            .zip(&self.a_star)
            .map(|(&i, a)| a * (v - biases[i]).max(0.0))
            .sum()
    }
}

/// Projection values `γ Σ_j α_j s_j` per support pattern, in table order.
pub fn projection_values(f: &BooleanJunta, alphas: &[f64], gamma: f64) -> Vec<f64> {
    (0..f.table().len())
        .map(|b| gamma * f.pattern_signs(b).iter().zip(alphas).map(|(s, a)| s * a).sum::<f64>())
        .collect()
}

/// `min_{s≠t} |Σ α_j (s_j - t_j)|` over support patterns.
pub fn min_separation(alphas: &[f64]) -> f64 {
    let k = alphas.len();
    let mut v: Vec<f64> = (0..1usize << k)
        .map(|b| {
            (0..k)
                .map(|p| if b >> (k - 1 - p) & 1 == 1 { alphas[p] } else { -alphas[p] })
                .sum()
        })
        .collect();
    v.sort_by(f64::total_cmp);
    v.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
}

/// Solves `M a* = F` with `M_{n,m} = ReLU(v_n - b_m)`, one pool bias per gap
/// `(v_{m-1}, v_m)`, `v_0 = -L`.
///
/// `alphas` are aligned with the support. From each gap the smallest pool
/// bias is taken, which maximizes the diagonal of the triangular system.
pub fn represent_exact(
    f: &BooleanJunta,
    alphas: &[f64],
    gamma: f64,
    biases: &[f64],
    bias_range_l: f64,
) -> Result<ExactRepresentation> {
    if alphas.len() != f.k() {
        return Err(LabError::Config(format!("{} alphas for a support of size {}", alphas.len(), f.k())));
    }
    let raw = projection_values(f, alphas, gamma);
    let mut order: Vec<usize> = (0..raw.len()).collect();
    order.sort_by(|&i, &j| raw[i].total_cmp(&raw[j]));
    let values: Vec<f64> = order.iter().map(|&i| raw[i]).collect();
    if let Some(w) = values.windows(2).find(|w| w[1] - w[0] < SEPARATION_TOL) {
        return Err(LabError::DegenerateShift(format!(
            "projection values {} and {} are not separated",
            w[0], w[1]
        )));
    }
    let mut selected = Vec::with_capacity(values.len());
    for (m, &hi) in values.iter().enumerate() {
        let lo = if m == 0 { -bias_range_l } else { values[m - 1] };
        let pick = biases
            .iter()
            .enumerate()
            .filter(|(_, &b)| b > lo && b < hi)
            .min_by(|x, y| x.1.total_cmp(y.1))
            .map(|(i, _)| i)
            .ok_or_else(|| LabError::InsufficientWidth(format!("no bias in the gap ({lo}, {hi})")))?;
        selected.push(pick);
    }
    // forward substitution on the lower-triangular system
    let mut a_star = vec![0.0; values.len()];
    for n in 0..values.len() {
        let partial: f64 = (0..n).map(|m| a_star[m] * (values[n] - biases[selected[m]])).sum();
        let diag = values[n] - biases[selected[n]];
        a_star[n] = (f.table()[order[n]] - partial) / diag;
    }
    let max_abs_weight = a_star.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    Ok(ExactRepresentation {
        selected,
        a_star,
        order,
        values,
        max_abs_weight,
    })
}
