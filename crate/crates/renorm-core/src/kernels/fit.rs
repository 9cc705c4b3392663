//! Log-log power-law fits.

use serde::{Deserialize, Serialize};

use super::KernelError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// Fitted slope of log|value| against log r.
    pub exponent: f64,
    pub intercept: f64,
    /// Max |log|value| − fit| over the window.
    pub residual: f64,
    pub window: (f64, f64),
}

/// Least-squares fit of log|value| = intercept + exponent·log r.
pub fn decay_fit(points: &[(f64, f64)]) -> Result<DecayFit, KernelError> {
    let mut radii: Vec<f64> = points.iter().map(|p| p.0).collect();
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    if radii.len() < 4 || points.iter().any(|&(r, v)| r <= 0.0 || v == 0.0 || !v.is_finite()) {
        return Err(KernelError::InsufficientData(points.len()));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.abs().ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let residual = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - exponent * x).abs()).fold(0.0, f64::max);
    Ok(DecayFit { exponent, intercept, residual, window: (radii[0], radii[radii.len() - 1]) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let pts: Vec<(f64, f64)> = (2..12).map(|r| (r as f64, (r as f64).powf(-7.0))).collect();
        let f = decay_fit(&pts).unwrap();
        assert!((f.exponent + 7.0).abs() < 1e-9);
        assert!(f.residual < 1e-9);
    }

    #[test]
    fn too_few_radii() {
        assert!(decay_fit(&[(1.0, 1.0), (2.0, 0.5), (3.0, 0.2)]).is_err());
    }
}
