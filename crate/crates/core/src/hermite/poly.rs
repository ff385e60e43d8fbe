use crate::error::{LabError, Result};

/// Highest order the three-term recurrence is trusted for.
pub const MAX_HERMITE_ORDER: usize = 60;

/// Normalized Hermite polynomial `H_k(x)`.
///
/// Uses `H_{k+1}(x) = (x H_k(x) - √k H_{k-1}(x)) / √(k+1)`, which keeps the
/// values at the scale of `e^{x²/4}` instead of the factorial growth of the
/// unnormalized recurrence.
pub fn hermite_eval(k: usize, x: f64) -> Result<f64> {
    if k > MAX_HERMITE_ORDER {
        return Err(LabError::UnsupportedOrder {
            order: k,
            max: MAX_HERMITE_ORDER,
        });
    }
    Ok(recurrence(k, x).0)
}

/// `H_0(x), ..., H_k(x)` in one pass.
pub fn hermite_values(k: usize, x: f64) -> Result<Vec<f64>> {
    if k > MAX_HERMITE_ORDER {
        return Err(LabError::UnsupportedOrder {
            order: k,
            max: MAX_HERMITE_ORDER,
        });
    }
    let mut out = Vec::with_capacity(k + 1);
    out.push(1.0);
    if k >= 1 {
        out.push(x);
    }
    for j in 1..k {
        let next = (x * out[j] - (j as f64).sqrt() * out[j - 1]) / ((j + 1) as f64).sqrt();
        out.push(next);
    }
    Ok(out)
}

/// `H_k'(x) = √k H_{k-1}(x)`.
pub fn hermite_derivative(k: usize, x: f64) -> Result<f64> {
    if k == 0 {
        return Ok(0.0);
    }
    Ok((k as f64).sqrt() * hermite_eval(k - 1, x)?)
}

/// Returns `(H_k(x), H_{k-1}(x))`.
fn recurrence(k: usize, x: f64) -> (f64, f64) {
    if k == 0 {
        return (1.0, 0.0);
    }
    let (mut prev, mut cur) = (1.0, x);
    for j in 1..k {
        let next = (x * cur - (j as f64).sqrt() * prev) / ((j + 1) as f64).sqrt();
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn low_orders_match_closed_forms() {
        for &x in &[-2.5, -1.0, 0.0, 0.3, 1.7] {
            assert_eq!(hermite_eval(1, x).unwrap(), x);
            assert_abs_diff_eq!(
                hermite_eval(2, x).unwrap(),
                (x * x - 1.0) / 2f64.sqrt(),
                epsilon = 1e-14
            );
            assert_abs_diff_eq!(
                hermite_eval(3, x).unwrap(),
                (x * x * x - 3.0 * x) / 6f64.sqrt(),
                epsilon = 1e-13
            );
        }
        assert_abs_diff_eq!(hermite_eval(2, 0.0).unwrap(), -1.0 / 2f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(hermite_eval(3, 1.0).unwrap(), -2.0 / 6f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn values_agree_with_single_evaluation() {
        let all = hermite_values(12, 0.77).unwrap();
        for (k, v) in all.iter().enumerate() {
            assert_abs_diff_eq!(*v, hermite_eval(k, 0.77).unwrap(), epsilon = 1e-14);
        }
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let h = 1e-6;
        for k in 0..8 {
            let fd = (hermite_eval(k, 0.4 + h).unwrap() - hermite_eval(k, 0.4 - h).unwrap()) / (2.0 * h);
            assert_abs_diff_eq!(hermite_derivative(k, 0.4).unwrap(), fd, epsilon = 1e-7);
        }
    }

    #[test]
    fn order_cap_is_enforced() {
        assert!(hermite_eval(60, 1.0).is_ok());
        assert!(matches!(
            hermite_eval(61, 1.0),
            Err(LabError::UnsupportedOrder { order: 61, .. })
        ));
    }
}
