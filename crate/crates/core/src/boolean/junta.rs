use ndarray::ArrayView1;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Hard cap on the support size; enumerations are `O(k 2^k)`.
pub const MAX_SUPPORT: usize = 20;

/// On-disk junta format: `{d, support, table}` with `table` listing the
/// `2^k` values in lexicographic sign order (`-1 < +1`, first support
/// coordinate most significant). Coordinates are 0-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JuntaSpec {
    pub d: usize,
    pub support: Vec<usize>,
    pub table: Vec<f64>,
}

/// A `k`-sparse function `f: {±1}^d → R`.
///
/// Pattern index `b` assigns `+1` to `support[i]` iff bit `k-1-i` of `b` is
/// set. Subsets of the support use the same bit layout, so mask `m` holds
/// `support[i]` iff bit `k-1-i` is set.
#[derive(Debug, Clone, PartialEq)]
pub struct BooleanJunta {
    dimension_d: usize,
    support: Vec<usize>,
    table: Vec<f64>,
    bound_r: f64,
    /// Standard (uniform-measure) coefficients, indexed by subset mask.
    standard: Vec<f64>,
}

impl BooleanJunta {
    pub fn new(d: usize, support: Vec<usize>, table: Vec<f64>) -> Result<Self> {
        let k = support.len();
        if k > MAX_SUPPORT {
            return Err(LabError::Config(format!("support size {k} exceeds {MAX_SUPPORT}")));
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(LabError::Config("support must be sorted and distinct".into()));
        }
        if support.last().is_some_and(|&j| j >= d) {
            return Err(LabError::Config(format!("support coordinate out of range for d = {d}")));
        }
        if table.len() != 1 << k {
            return Err(LabError::Config(format!(
                "truth table has {} entries, expected 2^{k}",
                table.len()
            )));
        }
        if table.iter().any(|v| !v.is_finite()) {
            return Err(LabError::Config("truth table entries must be finite".into()));
        }
        let bound_r = table.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let standard = walsh_transform(&table, k);
        Ok(Self {
            dimension_d: d,
            support,
            table,
            bound_r,
            standard,
        })
    }

    /// Tabulates `g(signs)` where `signs[i]` is the value at `support[i]`.
    pub fn from_fn<G: Fn(&[f64]) -> f64>(d: usize, support: Vec<usize>, g: G) -> Result<Self> {
        let k = support.len();
        let mut signs = vec![0.0; k];
        let table = (0..1usize << k)
            .map(|b| {
                fill_signs(b, k, &mut signs);
                g(&signs)
            })
            .collect();
        Self::new(d, support, table)
    }

    /// Sum of monomials `Σ_t Π_{i ∈ terms[t]} x_i` over global coordinates.
    pub fn sum_of_monomials(d: usize, terms: &[&[usize]]) -> Result<Self> {
        let mut support: Vec<usize> = terms.iter().flat_map(|t| t.iter().copied()).collect();
        support.sort_unstable();
        support.dedup();
        let pos: Vec<Vec<usize>> = terms
            .iter()
            .map(|t| t.iter().map(|j| support.binary_search(j).expect("present")).collect())
            .collect();
        Self::from_fn(d, support, |s| pos.iter().map(|t| t.iter().map(|&p| s[p]).product::<f64>()).sum())
    }

    pub fn from_spec(spec: &JuntaSpec) -> Result<Self> {
        Self::new(spec.d, spec.support.clone(), spec.table.clone())
    }

    pub fn to_spec(&self) -> JuntaSpec {
        JuntaSpec {
            d: self.dimension_d,
            support: self.support.clone(),
            table: self.table.clone(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension_d
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn k(&self) -> usize {
        self.support.len()
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    /// `max |f|`.
    pub fn bound(&self) -> f64 {
        self.bound_r
    }

    /// Standard coefficients `f̂(S)` by subset mask.
    pub fn standard_coefficients(&self) -> &[f64] {
        &self.standard
    }

    /// Position of a global coordinate inside the support.
    pub fn position(&self, j: usize) -> Option<usize> {
        self.support.binary_search(&j).ok()
    }

    /// Bit for `support[pos]` in pattern and subset indices.
    pub fn bit(&self, pos: usize) -> usize {
        1 << (self.k() - 1 - pos)
    }

    /// Pattern index of `x` restricted to the support; only support
    /// coordinates are read.
    pub fn pattern_index(&self, x: ArrayView1<f64>) -> usize {
        self.support
            .iter()
            .fold(0usize, |b, &j| (b << 1) | usize::from(x[j] > 0.0))
    }

    pub fn eval(&self, x: ArrayView1<f64>) -> f64 {
        self.table[self.pattern_index(x)]
    }

    /// Signs at the support for pattern `b`.
    pub fn pattern_signs(&self, b: usize) -> Vec<f64> {
        let mut s = vec![0.0; self.k()];
        fill_signs(b, self.k(), &mut s);
        s
    }

    /// `E_uniform[f²]`.
    pub fn mean_square(&self) -> f64 {
        self.table.iter().map(|v| v * v).sum::<f64>() / self.table.len() as f64
    }
}

pub(crate) fn fill_signs(b: usize, k: usize, out: &mut [f64]) {
    for (i, s) in out.iter_mut().enumerate() {
        *s = if (b >> (k - 1 - i)) & 1 == 1 { 1.0 } else { -1.0 };
    }
}

/// `f̂(m) = 2^{-k} Σ_b f(b) Π_{i ∈ m} s_i(b)` with bit-1 meaning `+1`.
fn walsh_transform(table: &[f64], k: usize) -> Vec<f64> {
    let mut v = table.to_vec();
    for p in 0..k {
        let bit = 1 << p;
        for b in 0..v.len() {
            if b & bit == 0 {
                let (lo, hi) = (v[b], v[b | bit]);
                v[b] = lo + hi;
                v[b | bit] = hi - lo;
            }
        }
    }
    let scale = 1.0 / (1usize << k) as f64;
    v.iter_mut().for_each(|c| *c *= scale);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn lexicographic_table_order() {
        // f = x0 on support {0}: table [-1, +1]
        let f = BooleanJunta::from_fn(3, vec![0], |s| s[0]).unwrap();
        assert_eq!(f.table(), &[-1.0, 1.0]);
        let g = BooleanJunta::from_fn(4, vec![1, 3], |s| s[0] + 10.0 * s[1]).unwrap();
        assert_eq!(g.table(), &[-11.0, 9.0, -9.0, 11.0]);
        assert_eq!(g.eval(array![0.0, 1.0, 0.0, -1.0].view()), -9.0);
    }

    #[test]
    fn evaluation_ignores_off_support() {
        let f = BooleanJunta::sum_of_monomials(5, &[&[0, 2]]).unwrap();
        let a = array![1.0, 1.0, -1.0, 1.0, 1.0];
        let b = array![1.0, -1.0, -1.0, -1.0, -1.0];
        assert_eq!(f.eval(a.view()), f.eval(b.view()));
    }

    #[test]
    fn parseval_on_uniform() {
        let f = BooleanJunta::new(6, vec![0, 2, 5], vec![0.3, -1.0, 2.0, 0.5, 0.0, 1.5, -0.7, 0.1]).unwrap();
        let energy: f64 = f.standard_coefficients().iter().map(|c| c * c).sum();
        assert!((energy - f.mean_square()).abs() < 1e-12);
    }

    #[test]
    fn monomial_coefficients() {
        let f = BooleanJunta::sum_of_monomials(10, &[&[0], &[0, 1, 2]]).unwrap();
        let c = f.standard_coefficients();
        assert_eq!(f.k(), 3);
        assert!((c[0b100] - 1.0).abs() < 1e-15);
        assert!((c[0b111] - 1.0).abs() < 1e-15);
        assert!(c.iter().enumerate().all(|(m, v)| m == 0b100 || m == 0b111 || v.abs() < 1e-15));
    }

    #[test]
    fn validation() {
        assert!(BooleanJunta::new(4, vec![2, 1], vec![0.0; 4]).is_err());
        assert!(BooleanJunta::new(4, vec![1, 1], vec![0.0; 4]).is_err());
        assert!(BooleanJunta::new(2, vec![0, 2], vec![0.0; 4]).is_err());
        assert!(BooleanJunta::new(4, vec![0, 1], vec![0.0; 3]).is_err());
        let spec = JuntaSpec {
            d: 4,
            support: vec![1, 3],
            table: vec![1.0, -1.0, -1.0, 1.0],
        };
        let f = BooleanJunta::from_spec(&spec).unwrap();
        assert_eq!(f.to_spec(), spec);
        assert_eq!(f.bound(), 1.0);
    }
}
