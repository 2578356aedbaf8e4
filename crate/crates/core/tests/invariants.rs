//! Property tests for structural invariants.

use proptest::prelude::*;
use xhermite_core::energy::{scaled_hessian, PartitionedHessian};
use xhermite_core::fit::power_law_fit;
use xhermite_core::gersgorin::localization_report;
use xhermite_core::hermite::{exceptional_eigen_constant, exceptional_hermite, exceptional_ode_residual, generalized_hermite, hermite, wronskian};
use xhermite_core::linalg::{symmetric_eigenvalues, Matrix};
use xhermite_core::{ExactPoly, Partition};

fn arb_even_partition() -> impl Strategy<Value = Partition> {
    proptest::collection::vec(1i64..4, 0..=2).prop_map(|mut v| {
        v.sort_unstable_by(|a, b| b.cmp(a));
        let parts: Vec<i64> = v.iter().flat_map(|&p| [p, p]).collect();
        Partition::new(&parts).unwrap()
    })
}

/// Symmetric with trace-zero symmetric 2×2 leading blocks.
fn arb_hessian_shape() -> impl Strategy<Value = (usize, usize, Vec<f64>)> {
    (1usize..3, 1usize..4).prop_flat_map(|(m, n)| {
        let d = 2 * m + n;
        (Just(m), Just(n), proptest::collection::vec(-5.0f64..5.0, d * d))
    })
}

fn assemble(m: usize, n: usize, raw: &[f64]) -> Matrix<f64> {
    let d = 2 * m + n;
    let mut a = Matrix::from_fn(d, d, |i, j| raw[i.min(j) * d + i.max(j)]);
    for k in 0..m {
        let i = 2 * k;
        a[(i + 1, i + 1)] = -a[(i, i)];
    }
    a
}

/// `det(A − tI)` by Laplace expansion; fine for `d ≤ 6`.
fn char_poly_at(a: &Matrix<f64>, t: f64) -> f64 {
    fn det(rows: Vec<Vec<f64>>) -> f64 {
        if rows.len() == 1 {
            return rows[0][0];
        }
        (0..rows.len())
            .map(|j| {
                let minor = rows[1..].iter().map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, v)| *v).collect()).collect();
                let s = if j % 2 == 0 { 1.0 } else { -1.0 };
                s * rows[0][j] * det(minor)
            })
            .sum()
    }
    det((0..a.rows()).map(|i| (0..a.cols()).map(|j| a[(i, j)] - if i == j { t } else { 0.0 }).collect()).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eigenvalues_are_characteristic_roots((m, n, raw) in arb_hessian_shape()) {
        let a = assemble(m, n, &raw);
        let ev = symmetric_eigenvalues(&a).unwrap();
        let trace: f64 = (0..a.rows()).map(|i| a[(i, i)]).sum();
        prop_assert!((ev.iter().sum::<f64>() - trace).abs() < 1e-9);
        let scale = a.max_abs().max(1.0);
        for &t in &ev {
            let p = char_poly_at(&a, t);
            prop_assert!(p.abs() <= 1e-9 * scale.powi(a.rows() as i32), "p({t}) = {p}");
        }
    }

    #[test]
    fn gersgorin_sets_contain_spectrum((m, n, raw) in arb_hessian_shape(), k in 0.25f64..4.0) {
        let h = PartitionedHessian::new(&assemble(m, n, &raw), m, n).unwrap();
        let rep = localization_report(&scaled_hessian(&h, k)).unwrap();
        prop_assert!(rep.all_contained(), "{:?}", rep);
    }

    #[test]
    fn scaling_preserves_spectrum((m, n, raw) in arb_hessian_shape(), k in 0.1f64..10.0) {
        let h = PartitionedHessian::new(&assemble(m, n, &raw), m, n).unwrap();
        let a = h.eigenvalues().unwrap();
        let b = scaled_hessian(&h, k).eigenvalues().unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-9 * h.entries.max_abs().max(1.0));
        }
    }

    #[test]
    fn exceptional_ode_is_exact(lambda in arb_even_partition(), extra in 0usize..8) {
        let n = lambda.degree_set(lambda.size() + lambda.parts().first().copied().unwrap_or(0) as usize + extra)
            .into_iter().last().unwrap();
        let h = generalized_hermite(&lambda).unwrap();
        let p = exceptional_hermite(&lambda, n).unwrap();
        prop_assert_eq!(p.degree(), Some(n));
        prop_assert!(exceptional_ode_residual(&h, &p, exceptional_eigen_constant(&lambda, n)).is_zero());
    }

    #[test]
    fn wronskian_is_alternating(a in 0usize..6, b in 0usize..6) {
        let x = wronskian(&[hermite(a), hermite(b)]);
        let y = wronskian(&[hermite(b), hermite(a)]);
        prop_assert_eq!(&x, &-&y);
        if a == b {
            prop_assert!(x.is_zero());
        }
    }

    #[test]
    fn generalized_hermite_has_no_real_zeros(lambda in arb_even_partition()) {
        let h: ExactPoly = generalized_hermite(&lambda).unwrap();
        prop_assert_eq!(h.degree(), Some(2 * lambda.parts().iter().step_by(2).map(|&p| p as usize).sum::<usize>()));
        prop_assert!(xhermite_core::hermite::positive_on_scan(&h, 20, 400) || xhermite_core::hermite::positive_on_scan(&-&h, 20, 400));
    }

    #[test]
    fn power_law_recovers_exponent(p in -2.0f64..2.0, c in 0.1f64..10.0) {
        let s: Vec<(f64, f64)> = [10.0, 20.0, 35.0, 60.0].iter().map(|&n: &f64| (n, c * n.powf(p))).collect();
        let f = power_law_fit(&s, 4).unwrap();
        prop_assert!((f.exponent - p).abs() < 1e-10 && (f.constant / c - 1.0).abs() < 1e-9);
    }
}
