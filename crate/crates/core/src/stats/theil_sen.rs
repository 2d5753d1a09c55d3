use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Median of all pairwise slopes `(y_j - y_i) / (x_j - x_i)` over pairs with
/// distinct `x`. Even counts average the two middle slopes.
pub fn theil_sen(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Mismatch(alloc::format!("theil_sen: {} x values vs {} y values", x.len(), y.len())));
    }
    let n = x.len();
    let mut slopes = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let dx = x[j] - x[i];
            if dx != 0.0 {
                slopes.push((y[j] - y[i]) / dx);
            }
        }
    }
    let m = slopes.len();
    if m == 0 {
        return Err(Error::Insufficient("theil_sen needs two distinct x values".into()));
    }
    let (_, &mut upper, _) = slopes.select_nth_unstable_by(m / 2, f64::total_cmp);
    if m % 2 == 1 {
        return Ok(upper);
    }
    // The lower middle is the largest element left of the partition point.
    let lower = slopes[..m / 2].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(0.5 * (lower + upper))
}
