//! Kernel-weighted local quadratic fits of link capability on resource.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalFit {
    pub center: f64,
    pub bandwidth: f64,
    pub widened: bool,
    /// Fitted level at the center.
    pub level: f64,
    /// First derivative, the link-rate.
    pub slope: f64,
    /// Second derivative, the curvature.
    pub curvature: f64,
}

fn tricube(u: f64) -> f64 {
    let a = libm::fabs(u);
    if a >= 1.0 {
        0.0
    } else {
        let t = 1.0 - a * a * a;
        t * t * t
    }
}

/// Solves the 3x3 normal equations; `None` when singular.
#[allow(clippy::needless_range_loop)]
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(libm::fabs(*v)));
    if scale == 0.0 {
        return None;
    }
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| libm::fabs(a[i][col]).total_cmp(&libm::fabs(a[j][col])))?;
        if libm::fabs(a[pivot][col]) <= 1e-12 * scale {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let s: f64 = (row + 1..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

fn fit_at(r: &[f64], y: &[f64], center: f64, h: f64) -> Option<[f64; 3]> {
    let mut xtx = [[0.0; 3]; 3];
    let mut xty = [0.0; 3];
    let mut support = 0usize;
    for (ri, yi) in r.iter().zip(y) {
        // Scaled offsets keep the normal equations well conditioned.
        let u = (ri - center) / h;
        let w = tricube(u);
        if w == 0.0 {
            continue;
        }
        support += 1;
        let x = [1.0, u, 0.5 * u * u];
        for i in 0..3 {
            for j in 0..3 {
                xtx[i][j] += w * x[i] * x[j];
            }
            xty[i] += w * x[i] * yi;
        }
    }
    if support < 3 {
        return None;
    }
    solve3(xtx, xty).map(|b| [b[0], b[1] / h, b[2] / (h * h)])
}

/// Weighted least squares of `y` on `(R - c, (R - c)^2 / 2)` with tricube
/// weights of half-width `fraction * range(R)`. A rank-deficient fit is
/// retried once at double the bandwidth.
pub fn local_quadratic(r: &[f64], y: &[f64], center: f64, fraction: f64) -> Result<LocalFit> {
    if r.len() != y.len() {
        return Err(Error::Mismatch(alloc::format!("{} resources vs {} values", r.len(), y.len())));
    }
    if r.len() < 3 {
        return Err(Error::Insufficient("local quadratic needs at least three checkpoints".into()));
    }
    let (lo, hi) = r.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
    let h = fraction * (hi - lo);
    if !(h > 0.0) {
        return Err(Error::RankDeficient);
    }
    let (beta, bandwidth, widened) = match fit_at(r, y, center, h) {
        Some(b) => (b, h, false),
        None => (fit_at(r, y, center, 2.0 * h).ok_or(Error::RankDeficient)?, 2.0 * h, true),
    };
    Ok(LocalFit { center, bandwidth, widened, level: beta[0], slope: beta[1], curvature: beta[2] })
}

/// Evaluation points: every checkpoint resource plus the midpoint of the range.
pub fn evaluation_points(r: &[f64]) -> Vec<f64> {
    let mut pts = r.to_vec();
    if let (Some(first), Some(last)) = (r.first(), r.last()) {
        pts.push(0.5 * (first + last));
    }
    pts
}
