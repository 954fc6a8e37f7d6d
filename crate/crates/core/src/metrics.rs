//! Reconstruction quality: relative error and single-window SSIM.

use num_complex::Complex64;

use crate::linalg::{norm, CVector};
use crate::{Error, Result};

/// `‖Ê − E‖ / ‖E‖`. With `phase_aware`, the minimum over a global phase
/// rotation of `Ê`, attained at `e^{jc} = ÊᴴE / |ÊᴴE|`.
pub fn relative_error(estimate: &CVector, truth: &CVector, phase_aware: bool) -> Result<f64> {
    if estimate.len() != truth.len() {
        return Err(Error::dims(format!(
            "estimate of length {} vs truth of length {}",
            estimate.len(),
            truth.len()
        )));
    }
    let denom = norm(truth);
    if !(denom > 0.0) {
        return Err(Error::invalid("relative error undefined for a zero ground truth"));
    }
    let aligned = if phase_aware {
        let inner: Complex64 = estimate.iter().zip(truth.iter()).map(|(a, b)| a.conj() * b).sum();
        if inner.norm() > 0.0 {
            estimate * (inner / inner.norm())
        } else {
            estimate.clone()
        }
    } else {
        estimate.clone()
    };
    Ok(norm(&(aligned - truth)) / denom)
}

/// SSIM stabilization constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsimOptions {
    pub c1: f64,
    pub c2: f64,
}

impl SsimOptions {
    /// `c1 = (0.01 L)²`, `c2 = (0.03 L)²` for dynamic range `L`.
    pub fn for_range(dynamic_range: f64) -> Result<Self> {
        let l = dynamic_range;
        Self::new((0.01 * l).powi(2), (0.03 * l).powi(2))
    }

    /// Constants with `L = max` of the ground-truth magnitudes.
    pub fn for_truth(truth: &[f64]) -> Result<Self> {
        let l = truth.iter().copied().fold(0.0, f64::max);
        Self::for_range(l)
    }

    pub fn new(c1: f64, c2: f64) -> Result<Self> {
        if !(c1 > 0.0) || !(c2 > 0.0) {
            return Err(Error::invalid(format!("SSIM constants must be > 0, got c1={c1}, c2={c2}")));
        }
        Ok(Self { c1, c2 })
    }
}

/// Single global window SSIM between two equally sized images, clamped to
/// `[0, 1]`.
pub fn ssim(a: &[f64], b: &[f64], opts: &SsimOptions) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::dims(format!("SSIM shapes differ: {} vs {}", a.len(), b.len())));
    }
    if a.is_empty() {
        return Err(Error::invalid("SSIM of empty images"));
    }
    let n = a.len() as f64;
    let mu_a = a.iter().sum::<f64>() / n;
    let mu_b = b.iter().sum::<f64>() / n;
    let (mut var_a, mut var_b, mut cov) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - mu_a, y - mu_b);
        var_a += dx * dx;
        var_b += dy * dy;
        cov += dx * dy;
    }
    var_a /= n;
    var_b /= n;
    cov /= n;
    let num = (2.0 * mu_a * mu_b + opts.c1) * (2.0 * cov + opts.c2);
    let den = (mu_a * mu_a + mu_b * mu_b + opts.c1) * (var_a + var_b + opts.c2);
    Ok((num / den).clamp(0.0, 1.0))
}

/// SSIM of recovered vs. true field magnitudes with constants from the truth.
pub fn field_ssim(estimate: &CVector, truth: &CVector) -> Result<f64> {
    let a: Vec<f64> = estimate.iter().map(|z| z.norm()).collect();
    let b: Vec<f64> = truth.iter().map(|z| z.norm()).collect();
    let opts = SsimOptions::for_truth(&b)?;
    ssim(&a, &b, &opts)
}
