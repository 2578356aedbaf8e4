//! Classical, generalized and exceptional Hermite polynomials, built
//! exactly over the integers.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::poly::poly_determinant;
use crate::ExactPoly;

/// Physicists' Hermite polynomial `H_k` from `H_{k+1} = 2x H_k − 2k H_{k−1}`.
pub fn hermite(k: usize) -> ExactPoly {
    hermite_sequence(k).pop().expect("sequence is nonempty")
}

/// `[H_0, …, H_k]`
pub fn hermite_sequence(k: usize) -> Vec<ExactPoly> {
    let two_x = ExactPoly::from_i64s(&[0, 2]);
    let mut out = vec![ExactPoly::one()];
    if k >= 1 {
        out.push(two_x.clone());
    }
    for j in 1..k {
        let next = &(&two_x * &out[j]) - &out[j - 1].scale(&BigInt::from(2 * j as i64));
        out.push(next);
    }
    out
}

/// Wronskian `det[ps[j]^{(i)}]`. The empty Wronskian is the constant 1.
pub fn wronskian(ps: &[ExactPoly]) -> ExactPoly {
    let k = ps.len();
    let mut columns: Vec<Vec<ExactPoly>> = Vec::with_capacity(k);
    for p in ps {
        let mut col = Vec::with_capacity(k);
        let mut d = p.clone();
        for _ in 0..k {
            col.push(d.clone());
            d = d.derivative();
        }
        columns.push(col);
    }
    let rows: Vec<Vec<ExactPoly>> = (0..k).map(|i| (0..k).map(|j| columns[j][i].clone()).collect()).collect();
    poly_determinant(&rows)
}

fn hermite_family(lambda: &Partition, extra: Option<usize>) -> Vec<ExactPoly> {
    let mut idx = lambda.hermite_indices();
    idx.extend(extra);
    let top = idx.iter().copied().max().unwrap_or(0);
    let seq = hermite_sequence(top);
    idx.into_iter().map(|i| seq[i].clone()).collect()
}

/// `H_λ = Wr[H_{λ_r}, …, H_{λ_1+r−1}]`, of degree `|λ|`.
pub fn generalized_hermite(lambda: &Partition) -> Result<ExactPoly> {
    let h = wronskian(&hermite_family(lambda, None));
    check_degree(&h, lambda.size())?;
    Ok(h)
}

/// `P_n = Wr[H_{λ_r}, …, H_{λ_1+r−1}, H_{n−|λ|+r}]` for `n ∈ N_λ`.
pub fn exceptional_hermite(lambda: &Partition, n: usize) -> Result<ExactPoly> {
    if !lambda.is_admissible(n) {
        return Err(Error::InadmissibleDegree { n, parts: lambda.parts().to_vec() });
    }
    let extra = n + lambda.len() - lambda.size();
    let p = wronskian(&hermite_family(lambda, Some(extra)));
    check_degree(&p, n)?;
    Ok(p)
}

fn check_degree(p: &ExactPoly, expected: usize) -> Result<()> {
    if p.degree() == Some(expected) {
        Ok(())
    } else {
        Err(Error::DegreeMismatch { expected, got: p.degree_i64() })
    }
}

/// Left side of the exceptional Hermite equation with denominators cleared:
///
/// `H·P″ + (−2x·H − 2H′)·P′ + (H″ + 2x·H′ + c·H)·P`
///
/// where `c` is `eigen_constant`. The exact identity holds with
/// [`exceptional_eigen_constant`].
pub fn exceptional_ode_residual(h: &ExactPoly, p: &ExactPoly, eigen_constant: i64) -> ExactPoly {
    let x = ExactPoly::x();
    let two = BigInt::from(2);
    let h1 = h.derivative();
    let h2 = h1.derivative();
    let p1 = p.derivative();
    let p2 = p1.derivative();
    let m_coeff = &(&x * h).scale(&-two.clone()) - &h1.scale(&two);
    let n_coeff = &(&h2 + &(&x * &h1).scale(&two)) + &h.scale(&BigInt::from(eigen_constant));
    &(&(h * &p2) + &(&m_coeff * &p1)) + &(&n_coeff * p)
}

/// Constant `2n − 2|λ|` in the zero-order coefficient of the equation for `P_n`.
pub fn exceptional_eigen_constant(lambda: &Partition, n: usize) -> i64 {
    2 * n as i64 - 2 * lambda.size() as i64
}

/// Sign-change scan of `p` over `[-a, a]` on `samples` equispaced points,
/// evaluated exactly over the rationals `k·a/samples`. Returns `true` when
/// every sample is strictly positive.
pub fn positive_on_scan(p: &ExactPoly, half_width: i64, samples: i64) -> bool {
    // p(k a / s) > 0  ⇔  s^d p(k a / s) > 0; homogenize to stay in ℤ.
    let d = p.degree().unwrap_or(0);
    let s = BigInt::from(samples);
    (-samples..=samples).all(|k| {
        let num = BigInt::from(k * half_width);
        let mut acc = BigInt::from(0);
        let mut spow = BigInt::from(1);
        let coeffs = p.coeffs();
        // Horner on the homogenized form Σ a_j num^j s^(d-j)
        for j in (0..=d).rev() {
            acc = acc * &num + &coeffs.get(j).cloned().unwrap_or_default() * &spow;
            spow *= &s;
        }
        acc > BigInt::from(0)
    })
}

/// `H_ν H′_{ν+1} − H′_ν H_{ν+1}` with integer coefficients.
pub fn hermite_pair_wronskian(nu: usize) -> ExactPoly {
    let seq = hermite_sequence(nu + 1);
    wronskian(&[seq[nu].clone(), seq[nu + 1].clone()])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> ExactPoly {
        ExactPoly::from_i64s(c)
    }

    #[test]
    fn hermite_examples() {
        assert_eq!(hermite(0), p(&[1]));
        assert_eq!(hermite(1), p(&[0, 2]));
        assert_eq!(hermite(3), p(&[0, -12, 0, 8]));
    }

    #[test]
    fn hermite_classical_ode() {
        for k in 0..40usize {
            let h = hermite(k);
            let x = ExactPoly::x();
            let lhs = &(&h.nth_derivative(2) - &(&x * &h.derivative()).scale(&BigInt::from(2))) + &h.scale(&BigInt::from(2 * k as i64));
            assert!(lhs.is_zero(), "k = {k}");
            assert_eq!(h.leading().cloned(), Some(BigInt::from(2).pow(k as u32)));
            let parity = if k % 2 == 0 { h.clone() } else { -&h };
            assert_eq!(h.reflect(), parity);
        }
    }

    #[test]
    fn wronskian_examples() {
        assert_eq!(wronskian(&[hermite(1), hermite(2)]), p(&[4, 0, 8]));
        let q = p(&[3, -1, 7]);
        assert_eq!(wronskian(std::slice::from_ref(&q)), q);
        assert_eq!(wronskian(&[hermite(1), hermite(2), hermite(3)]), p(&[0, 192, 0, 128]));
        assert_eq!(wronskian(&[]), p(&[1]));
    }

    #[test]
    fn wronskian_multilinear_in_inputs() {
        let a = hermite(2);
        let b = hermite(5);
        let base = wronskian(&[a.clone(), b.clone()]);
        let scaled = wronskian(&[a.scale(&BigInt::from(-7)), b]);
        assert_eq!(scaled, base.scale(&BigInt::from(-7)));
    }

    #[test]
    fn generalized_examples() {
        let g = |parts: &[i64]| generalized_hermite(&Partition::new(parts).unwrap()).unwrap();
        assert_eq!(g(&[1, 1]), p(&[4, 0, 8]));
        assert_eq!(g(&[]), p(&[1]));
        assert_eq!(g(&[2, 2]), p(&[24, 0, 0, 0, 32]));
    }

    #[test]
    fn exceptional_examples() {
        let lam = Partition::new(&[1, 1]).unwrap();
        assert_eq!(exceptional_hermite(&lam, 3).unwrap(), p(&[0, 192, 0, 128]));
        for k in 0..8 {
            assert_eq!(exceptional_hermite(&Partition::empty(), k).unwrap(), hermite(k));
        }
        assert!(matches!(exceptional_hermite(&lam, 2), Err(Error::InadmissibleDegree { n: 2, .. })));
        assert!(matches!(exceptional_hermite(&lam, 1), Err(Error::InadmissibleDegree { n: 1, .. })));
    }

    #[test]
    fn exceptional_ode_holds_exactly() {
        for parts in [&[][..], &[1, 1], &[2, 2], &[3, 3], &[2, 1], &[2, 2, 1, 1], &[3]] {
            let lam = Partition::new(parts).unwrap();
            let h = generalized_hermite(&lam).unwrap();
            for n in lam.degree_set(lam.size() + 14) {
                let pn = exceptional_hermite(&lam, n).unwrap();
                let res = exceptional_ode_residual(&h, &pn, exceptional_eigen_constant(&lam, n));
                assert!(res.is_zero(), "λ={lam} n={n}");
            }
        }
    }

    #[test]
    fn printed_ode_constant_leaves_a_residual() {
        // With 2n − |λ| instead of 2n − 2|λ| the residual is |λ|·H·P_n.
        let lam = Partition::double(1);
        let h = generalized_hermite(&lam).unwrap();
        let pn = exceptional_hermite(&lam, 5).unwrap();
        let res = exceptional_ode_residual(&h, &pn, 2 * 5 - 2);
        assert_eq!(res, (&h * &pn).scale(&BigInt::from(2)));
    }

    #[test]
    fn even_partitions_give_positive_h() {
        for parts in [&[1, 1][..], &[2, 2], &[3, 3], &[2, 2, 1, 1], &[4, 4]] {
            let lam = Partition::new(parts).unwrap();
            let h = generalized_hermite(&lam).unwrap();
            let half = ((2.0 * lam.size() as f64).sqrt() + 1.0).ceil() as i64;
            assert!(positive_on_scan(&h, half, 400), "λ={lam}");
            assert!(h.is_squarefree());
        }
        // (2,1) is not even and H_(2,1) changes sign
        let h = generalized_hermite(&Partition::new(&[2, 1]).unwrap()).unwrap();
        assert!(!positive_on_scan(&h, 4, 400));
    }

    #[test]
    fn pair_wronskian_matches_generalized() {
        for nu in 1..8usize {
            assert_eq!(hermite_pair_wronskian(nu), generalized_hermite(&Partition::double(nu as u32)).unwrap());
        }
    }
}
