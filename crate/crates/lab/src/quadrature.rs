//! Gauss–Hermite quadrature and the orthogonality check for `P_n`.

use serde::{Deserialize, Serialize};
use xhermite_core::hermite::{exceptional_hermite, generalized_hermite};
use xhermite_core::zeros::classical_hermite_zeros;
use xhermite_core::{Error, Partition, Real, Result};

/// Nodes and Christoffel weights for `∫ f e^{−x²}`, with
/// `λ_i = 1 / Σ_{k<N} p_k(x_i)²` over the orthonormal Hermite polynomials
/// (three-term recurrence, so no large factorials appear).
pub fn gauss_hermite<T: Real>(points: usize, precision_bits: usize) -> (Vec<T>, Vec<T>) {
    let nodes = classical_hermite_zeros::<T>(points, precision_bits);
    let p0 = T::one() / T::pi().sqrt().sqrt();
    let weights = nodes
        .iter()
        .map(|x| {
            let (mut prev, mut cur) = (T::zero(), p0.clone());
            let mut sum = cur.clone() * cur.clone();
            for k in 0..points - 1 {
                let kf = T::from_i64(k as i64);
                let k1 = T::from_i64(k as i64 + 1);
                let next = x.clone() * (T::from_i64(2) / k1.clone()).sqrt() * cur.clone() - (kf / k1).sqrt() * prev;
                prev = cur;
                cur = next;
                sum = sum + cur.clone() * cur.clone();
            }
            T::one() / sum
        })
        .collect();
    (nodes, weights)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrthogonalityRow {
    pub n1: usize,
    pub n2: usize,
    pub quad_points: usize,
    /// `⟨P_{n1}, P_{n2}⟩ / (‖P_{n1}‖ ‖P_{n2}‖)` under `e^{−x²}/H²`.
    pub normalized: f64,
}

pub fn default_quad_points(n1: usize, n2: usize) -> usize {
    (4 * (n1 + n2)).max(200)
}

pub fn orthogonality_check<T: Real>(lambda: &Partition, n1: usize, n2: usize, quad_points: usize, precision_bits: usize) -> Result<OrthogonalityRow> {
    if n1 == n2 {
        return Err(Error::InvalidArgument("n1 = n2".into()));
    }
    if quad_points < 200 {
        return Err(Error::InvalidArgument(format!("quad_points {quad_points} < 200")));
    }
    let h = generalized_hermite(lambda)?;
    let p1 = exceptional_hermite(lambda, n1)?;
    let p2 = exceptional_hermite(lambda, n2)?;
    let (nodes, weights) = gauss_hermite::<T>(quad_points, precision_bits);
    let (mut a, mut b, mut c) = (T::zero(), T::zero(), T::zero());
    for (x, w) in nodes.iter().zip(&weights) {
        let hv = h.eval_real(x);
        let r = w.clone() / (hv.clone() * hv);
        let (u, v) = (p1.eval_real(x), p2.eval_real(x));
        a = a + r.clone() * u.clone() * v.clone();
        b = b + r.clone() * u.clone() * u;
        c = c + r * v.clone() * v;
    }
    Ok(OrthogonalityRow { n1, n2, quad_points, normalized: (a / (b * c).sqrt()).abs().to_f64() })
}

/// Three pairs of admissible degrees for `λ`.
pub fn default_pairs(lambda: &Partition) -> Vec<(usize, usize)> {
    let d: Vec<usize> = lambda.degree_set(lambda.size() + 40).into_iter().collect();
    vec![(d[1], d[2]), (d[2], d[4]), (d[0], d[7])]
}

#[cfg(test)]
mod tests {
    use super::*;
    use xhermite_core::Mp;

    #[test]
    fn weights_integrate_moments() {
        let (x, w) = gauss_hermite::<Mp<128>>(20, 128);
        let m0 = w.iter().fold(Mp::<128>::from_i64(0), |a, b| a + b.clone());
        assert!((m0.to_f64() - std::f64::consts::PI.sqrt()).abs() < 1e-15);
        // ∫ x⁴ e^{−x²} = 3√π/4
        let m4 = x.iter().zip(&w).fold(Mp::<128>::from_i64(0), |a, (x, w)| a + w.clone() * x.powi(4));
        assert!((m4.to_f64() - 0.75 * std::f64::consts::PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn orthogonality_examples() {
        let r = orthogonality_check::<Mp<128>>(&Partition::empty(), 2, 3, 200, 128).unwrap();
        assert!(r.normalized < 1e-12);
        let r = orthogonality_check::<Mp<192>>(&Partition::double(1), 3, 4, 200, 192).unwrap();
        assert!(r.normalized < 1e-8, "{r:?}");
        assert!(orthogonality_check::<f64>(&Partition::empty(), 2, 2, 200, 53).is_err());
        assert_eq!(default_pairs(&Partition::double(1)), vec![(3, 4), (4, 6), (0, 9)]);
    }
}
