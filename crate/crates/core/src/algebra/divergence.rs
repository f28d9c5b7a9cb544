use super::USeries;
use crate::error::{Error, Result};

/// Growth diagnostics of a coefficient sequence. Advisory only: a finite
/// prefix never certifies divergence.
#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceReport {
    /// Indices of the nonzero coefficients used, in increasing order.
    pub support: Vec<u32>,
    /// `|c_k| / |c_{k'}|` for consecutive support indices `k < k'`.
    pub ratios: Vec<f64>,
    /// Least-squares slope of `ln|c_k|` against `k ln k`.
    pub gevrey_slope: f64,
}

/// Ratio test and Gevrey-slope fit along the lattice `k0 + stride * l`, where
/// `k0` is the first nonzero index.
pub fn ratio_divergence_estimate(s: &USeries, support_stride: u32) -> Result<DivergenceReport> {
    let stride = support_stride.max(1);
    let coeffs = s.coeffs();
    let start = coeffs.iter().position(|c| !c.is_zero());
    let support: Vec<u32> = match start {
        None => Vec::new(),
        Some(k0) => (k0..coeffs.len())
            .step_by(stride as usize)
            .filter(|&k| !coeffs[k].is_zero())
            .map(|k| k as u32)
            .collect(),
    };
    if support.len() < 4 {
        return Err(Error::InsufficientSupport { found: support.len() });
    }
    let logs: Vec<f64> = support.iter().map(|&k| coeffs[k as usize].ln_abs()).collect();
    let ratios = logs.windows(2).map(|w| (w[0] - w[1]).exp()).collect();
    let xs: Vec<f64> = support.iter().map(|&k| if k == 0 { 0.0 } else { k as f64 * (k as f64).ln() }).collect();
    Ok(DivergenceReport { support, ratios, gevrey_slope: slope(&xs, &logs) })
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}
