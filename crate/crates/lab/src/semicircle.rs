use serde::{Deserialize, Serialize};
use xhermite_core::Real;

/// `G(t) = 1/2 + (t√(1−t²) + arcsin t)/π`, clamped outside `[−1, 1]`.
pub fn semicircle_cdf(t: f64) -> f64 {
    if t <= -1.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        0.5 + (t * (1.0 - t * t).sqrt() + t.asin()) / std::f64::consts::PI
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SemicircleReport {
    pub n: usize,
    pub m: usize,
    /// Always `"sqrt(2(m+n))"`.
    pub scaling: String,
    pub scale: f64,
    pub ks_distance: f64,
    /// `(t_i, F_emp(t_i), G(t_i))` at each scaled zero.
    pub points: Vec<(f64, f64, f64)>,
}

/// Kolmogorov–Smirnov distance between the regular zeros scaled by
/// `1/√(2(m+n))` and the semicircle law.
pub fn semicircle_report<T: Real>(regular: &[T], n: usize, m: usize) -> SemicircleReport {
    let scale = (2.0 * (m + n) as f64).sqrt();
    let mut t: Vec<f64> = regular.iter().map(|x| x.to_f64() / scale).collect();
    t.sort_by(f64::total_cmp);
    let k = t.len() as f64;
    let mut ks = 0.0f64;
    let mut points = Vec::with_capacity(t.len());
    for (i, &ti) in t.iter().enumerate() {
        let g = semicircle_cdf(ti);
        let (lo, hi) = (i as f64 / k, (i + 1) as f64 / k);
        ks = ks.max((hi - g).abs()).max((g - lo).abs());
        points.push((ti, hi, g));
    }
    SemicircleReport { n, m, scaling: "sqrt(2(m+n))".into(), scale, ks_distance: ks, points }
}

#[cfg(test)]
mod tests {
    use super::*;
    use xhermite_core::zeros::classical_hermite_zeros;

    #[test]
    fn cdf_values() {
        assert_eq!(semicircle_cdf(0.0), 0.5);
        assert_eq!(semicircle_cdf(-2.0), 0.0);
        assert!((semicircle_cdf(1.0 - 1e-12) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn classical_baseline() {
        let x = classical_hermite_zeros::<f64>(60, 53);
        let r = semicircle_report(&x, 60, 0);
        assert!(r.ks_distance < 0.08, "{}", r.ks_distance);
        let single = semicircle_report(&[0.0], 1, 0);
        assert_eq!(single.ks_distance, 0.5);
    }
}
