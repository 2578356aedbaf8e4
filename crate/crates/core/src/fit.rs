//! Least-squares power laws `v ≈ C nᵖ` on log–log axes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub constant: f64,
    /// `max |v_i / (C n_i^p) − 1|`
    pub max_rel_residual: f64,
    pub points: usize,
}

/// Fits `v = C nᵖ` by ordinary least squares on `(ln n, ln v)`. Needs at
/// least `min_points` points with positive coordinates and two distinct
/// abscissae.
pub fn power_law_fit(series: &[(f64, f64)], min_points: usize) -> Result<PowerLawFit> {
    let pts: Vec<(f64, f64)> = series.iter().filter(|(n, v)| *n > 0.0 && *v > 0.0).map(|(n, v)| (n.ln(), v.ln())).collect();
    let needed = min_points.max(2);
    if pts.len() < needed || pts.len() != series.len() {
        return Err(Error::DegenerateFit { needed, got: pts.len() });
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit { needed, got: 1 });
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let exponent = sxy / sxx;
    let constant = (my - exponent * mx).exp();
    let max_rel_residual = series.iter().map(|(n, v)| (v / (constant * n.powf(exponent)) - 1.0).abs()).fold(0.0, f64::max);
    Ok(PowerLawFit { exponent, constant, max_rel_residual, points: pts.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_laws() {
        let lin: Vec<_> = [20.0, 30.0, 40.0, 50.0].iter().map(|&n| (n, n)).collect();
        let f = power_law_fit(&lin, 4).unwrap();
        assert!((f.exponent - 1.0).abs() < 1e-12 && (f.constant - 1.0).abs() < 1e-10);
        let root: Vec<_> = [20.0, 30.0, 40.0, 50.0].iter().map(|&n: &f64| (n, 3.0 * n.sqrt())).collect();
        let f = power_law_fit(&root, 4).unwrap();
        assert!((f.exponent - 0.5).abs() < 1e-12 && (f.constant - 3.0).abs() < 1e-10);
        assert!(f.max_rel_residual < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(power_law_fit(&[(1.0, 1.0), (2.0, 2.0), (3.0, 3.0)], 4), Err(Error::DegenerateFit { needed: 4, got: 3 })));
        assert!(power_law_fit(&[(5.0, 1.0)], 1).is_err());
        assert!(power_law_fit(&[(5.0, 1.0), (6.0, -1.0)], 2).is_err());
    }
}
