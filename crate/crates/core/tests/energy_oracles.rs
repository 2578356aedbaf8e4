//! The analytic energy derivatives against finite differences, the
//! complex-energy identity, and eigenvalues against nalgebra.

use approx::assert_relative_eq;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xhermite_core::energy::{complex_log_energy, gradient, hessian, log_energy, Configuration, PartitionedHessian};
use xhermite_core::hermite::generalized_hermite;
use xhermite_core::optimality::{reduced_hessian, WeightSpec};
use xhermite_core::zeros::{h_roots, HRoots, Pipeline};
use xhermite_core::{Mp128, Mp192, Partition, Real};

fn random_config(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Configuration<Mp128> {
    let r = |rng: &mut ChaCha8Rng, a: f64, b: f64| Mp128::from_f64(rng.gen_range(a..b));
    Configuration {
        xi: (0..m).map(|_| r(rng, -2.0, 2.0)).collect(),
        eta: (0..m).map(|_| r(rng, 0.2, 2.0)).collect(),
        x: (0..n).map(|i| r(rng, -3.0 + i as f64, -2.2 + i as f64)).collect(),
    }
}

fn hw(lambda: &Partition) -> HRoots<Mp128> {
    h_roots(lambda, 128).unwrap()
}

#[test]
fn gradient_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let lambda = Partition::double(1);
    let hw = hw(&lambda);
    let step = Mp128::from_f64(1e-12);
    for _ in 0..5 {
        let cfg = random_config(&mut rng, 2, 4);
        let g = gradient(&cfg, &hw).unwrap();
        let v = cfg.to_vec();
        for i in 0..v.len() {
            let (mut p, mut q) = (v.clone(), v.clone());
            p[i] = p[i].clone() + step.clone();
            q[i] = q[i].clone() - step.clone();
            let fp = log_energy(&Configuration::from_vec(&p, 2), &hw).unwrap();
            let fq = log_energy(&Configuration::from_vec(&q, 2), &hw).unwrap();
            let fd = ((fp - fq) / (step.clone() * Mp128::from_i64(2))).to_f64();
            assert_relative_eq!(g[i].to_f64(), fd, max_relative = 1e-10, epsilon = 1e-12);
        }
    }
}

#[test]
fn hessian_matches_differenced_gradient() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for lambda in [Partition::double(1), Partition::double(2)] {
        let hw = hw(&lambda);
        let m = lambda.size();
        let cfg = random_config(&mut rng, m, 3);
        let h = hessian(&cfg, &hw).unwrap();
        let v = cfg.to_vec();
        let step = Mp128::from_f64(1e-5);
        for j in 0..v.len() {
            let (mut p, mut q) = (v.clone(), v.clone());
            p[j] = p[j].clone() + step.clone();
            q[j] = q[j].clone() - step.clone();
            let gp = gradient(&Configuration::from_vec(&p, m), &hw).unwrap();
            let gq = gradient(&Configuration::from_vec(&q, m), &hw).unwrap();
            for i in 0..v.len() {
                let fd = ((gp[i].clone() - gq[i].clone()) / (step.clone() * Mp128::from_i64(2))).to_f64();
                assert_relative_eq!(h[(i, j)].to_f64(), fd, max_relative = 1e-5, epsilon = 1e-8);
            }
        }
        for k in 0..m {
            assert_eq!(h[(2 * k, 2 * k)].to_f64(), -h[(2 * k + 1, 2 * k + 1)].to_f64());
        }
    }
}

#[test]
fn energy_is_real_part_of_holomorphic_energy() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let lambda = Partition::double(2);
    let h = generalized_hermite(&lambda).unwrap();
    let hw = hw(&lambda);
    for _ in 0..20 {
        let cfg = random_config(&mut rng, 4, 5);
        let f = log_energy(&cfg, &hw).unwrap().to_f64();
        let fc = complex_log_energy(&cfg, &h).unwrap();
        assert_relative_eq!(f, fc.re.to_f64(), max_relative = 1e-25);
    }
}

#[test]
fn pipeline_eigenvalues_match_nalgebra() {
    let pl = Pipeline::<Mp192>::build(&Partition::double(1), 20, 192).unwrap();
    let cfg = Configuration::from_zero_set(&pl.zeros);
    let h = PartitionedHessian::new(&hessian(&cfg, &pl.hw).unwrap(), 2, 20).unwrap();
    let ours = h.eigenvalues().unwrap();
    let a = h.unscaled();
    let na = nalgebra::DMatrix::from_fn(a.rows(), a.cols(), |i, j| a[(i, j)]);
    let mut theirs: Vec<f64> = na.symmetric_eigenvalues().iter().copied().collect();
    theirs.sort_by(f64::total_cmp);
    let scale = a.max_abs();
    for (x, y) in ours.iter().zip(&theirs) {
        assert!((x - y).abs() <= 1e-10 * scale, "{x} vs {y}");
    }
}

#[test]
fn reduced_hessian_is_regular_block_of_full_hessian() {
    let pl = Pipeline::<Mp192>::build(&Partition::double(1), 24, 192).unwrap();
    let cfg = Configuration::from_zero_set(&pl.zeros);
    let full = hessian(&cfg, &pl.hw).unwrap().to_f64();
    let reduced = reduced_hessian(&pl.zeros.regular, &WeightSpec::modified_w1(&pl)).unwrap().to_f64();
    let off = 2 * pl.m();
    for i in 0..pl.n {
        for j in 0..pl.n {
            assert_relative_eq!(reduced[(i, j)], full[(off + i, off + j)], max_relative = 1e-8);
        }
    }
}

#[test]
fn m1n_derivative_approaches_minus_two() {
    let grid: Vec<Mp192> = (0..400).map(|i| Mp192::from_f64(-10.0 + 20.0 * i as f64 / 399.0)).collect();
    let mut last = f64::INFINITY;
    for n in [20, 30, 40, 50, 60] {
        let pl = Pipeline::<Mp192>::build(&Partition::double(1), n, 192).unwrap();
        let ws = WeightSpec::modified_w1(&pl);
        let sup = grid.iter().map(|x| (ws.m_prime(x).unwrap().to_f64() + 2.0).abs()).fold(0.0, f64::max);
        assert!(sup < last, "n={n}: {sup} ≥ {last}");
        last = sup;
    }
}
