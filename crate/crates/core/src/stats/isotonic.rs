use alloc::vec::Vec;

use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Order {
    Increasing,
    Decreasing,
}

struct Block {
    wy: f64,
    w: f64,
    y: f64,
    len: usize,
}

impl Block {
    fn value(&self) -> f64 {
        if self.w > 0.0 {
            self.wy / self.w
        } else {
            self.y / self.len as f64
        }
    }
}

/// Weighted least-squares monotone fit by pool-adjacent-violators.
///
/// Weights default to one. A pooled block with zero total weight takes the
/// unweighted mean of its members.
pub fn isotonic_fit(y: &[f64], weights: Option<&[f64]>, order: Order) -> Result<Vec<f64>> {
    if let Some(w) = weights {
        if w.len() != y.len() {
            return Err(Error::Mismatch(alloc::format!("isotonic_fit: {} values vs {} weights", y.len(), w.len())));
        }
        if w.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(domain!("isotonic_fit: weights must be finite and nonnegative"));
        }
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(domain!("isotonic_fit: values must be finite"));
    }
    let sign = match order {
        Order::Increasing => 1.0,
        Order::Decreasing => -1.0,
    };

    let mut blocks: Vec<Block> = Vec::with_capacity(y.len());
    for (i, &v) in y.iter().enumerate() {
        let v = sign * v;
        let w = weights.map_or(1.0, |w| w[i]);
        blocks.push(Block { wy: w * v, w, y: v, len: 1 });
        while blocks.len() > 1 {
            let last = blocks.len() - 1;
            if blocks[last - 1].value() <= blocks[last].value() {
                break;
            }
            let b = blocks.pop().unwrap();
            let a = blocks.last_mut().unwrap();
            a.wy += b.wy;
            a.w += b.w;
            a.y += b.y;
            a.len += b.len;
        }
    }

    let mut out = Vec::with_capacity(y.len());
    for b in &blocks {
        let v = sign * b.value();
        out.extend(core::iter::repeat_n(v, b.len));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pools_single_violation() {
        let fit = isotonic_fit(&[3.0, 1.0, 2.0], None, Order::Increasing).unwrap();
        assert_eq!(fit, [2.0, 2.0, 2.0]);
    }

    #[test]
    fn decreasing_mirror() {
        let fit = isotonic_fit(&[1.0, 3.0, 2.0], None, Order::Decreasing).unwrap();
        assert_eq!(fit, [2.0, 2.0, 2.0]);
    }

    #[test]
    fn weighted_pool() {
        let fit = isotonic_fit(&[2.0, 0.0], Some(&[3.0, 1.0]), Order::Increasing).unwrap();
        assert_eq!(fit, [1.5, 1.5]);
    }

    #[test]
    fn zero_weight_block_uses_plain_mean() {
        let fit = isotonic_fit(&[2.0, 0.0], Some(&[0.0, 0.0]), Order::Increasing).unwrap();
        assert_eq!(fit, [1.0, 1.0]);
    }
}
