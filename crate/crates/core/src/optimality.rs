//! The reduced real problem: regular zeros as maximizers of
//! `E(x) = Σ log w(x_i) + Σ_{i<j} log (x_i − x_j)²` for the classical,
//! exceptional and modified weights, with `M = (log w)′`:
//!
//! - classical `w = e^{−x²}`: `M = −2x`;
//! - exceptional `w = e^{−x²}/H²`: `M = −2x − 2H′/H`;
//! - modified `w₁ = w·P_m²`: `M₁ = M + 2P_m′/P_m`, where `P_m = ∏(x − z_k)`
//!   over the exceptional zeros.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::energy::LogSum;
use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigenvalues, Matrix};
use crate::partition::Partition;
use crate::scalar::{Complex, Real};
use crate::zeros::{HRoots, Pipeline};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightKind {
    ClassicalHermite,
    Exceptional,
    ModifiedW1,
}

#[derive(Clone, Debug)]
pub struct WeightSpec<T: Real> {
    pub kind: WeightKind,
    pub lambda: Partition,
    pub n: usize,
    pub exceptional_zeros: Vec<Complex<T>>,
    pub hw: HRoots<T>,
}

impl<T: Real> WeightSpec<T> {
    pub fn classical(n: usize) -> Self {
        WeightSpec {
            kind: WeightKind::ClassicalHermite,
            lambda: Partition::empty(),
            n,
            exceptional_zeros: Vec::new(),
            hw: HRoots { roots: Vec::new(), leading: 1.into() },
        }
    }

    pub fn exceptional(pl: &Pipeline<T>) -> Self {
        WeightSpec {
            kind: WeightKind::Exceptional,
            lambda: pl.lambda.clone(),
            n: pl.n,
            exceptional_zeros: Vec::new(),
            hw: pl.hw.clone(),
        }
    }

    pub fn modified_w1(pl: &Pipeline<T>) -> Self {
        WeightSpec {
            kind: WeightKind::ModifiedW1,
            lambda: pl.lambda.clone(),
            n: pl.n,
            exceptional_zeros: pl.zeros.exceptional.clone(),
            hw: pl.hw.clone(),
        }
    }

    fn poles(&self) -> &[Complex<T>] {
        match self.kind {
            WeightKind::ClassicalHermite => &[],
            _ => &self.hw.roots,
        }
    }

    fn zeros(&self) -> &[Complex<T>] {
        match self.kind {
            WeightKind::ModifiedW1 => &self.exceptional_zeros,
            _ => &[],
        }
    }

    fn guard(&self, x: &T) -> Result<()> {
        let floor = T::from_f64(2f64.powf(-(T::BITS as f64) / 4.0));
        let xc = Complex::from_real(x.clone());
        if self.poles().iter().chain(self.zeros()).any(|p| (xc.clone() - p.clone()).abs() < floor) {
            return Err(Error::PoleProximity);
        }
        Ok(())
    }

    /// `Σ_p 1/(x − p)^k` over poles (sign −) and zeros (sign +), real part.
    fn power_sum(&self, x: &T, k: u32) -> T {
        let xc = Complex::from_real(x.clone());
        let term = |p: &Complex<T>| {
            let r = (xc.clone() - p.clone()).recip();
            if k == 1 {
                r.re
            } else {
                r.sqr().re
            }
        };
        let zs = self.zeros().iter().fold(T::zero(), |a, p| a + term(p));
        let ps = self.poles().iter().fold(T::zero(), |a, p| a + term(p));
        zs - ps
    }

    /// `log w(x)`, up to the additive constant `−2 log|c|` of `H = c∏(x − w)`.
    pub fn log_w(&self, x: &T) -> Result<T> {
        self.guard(x)?;
        let mut s = LogSum::new();
        let mut inv = LogSum::new();
        let xc = Complex::from_real(x.clone());
        for z in self.zeros() {
            s.push((xc.clone() - z.clone()).norm_sqr());
        }
        for w in self.poles() {
            inv.push((xc.clone() - w.clone()).norm_sqr());
        }
        Ok(-(x.clone() * x.clone()) + s.finish() - inv.finish())
    }

    /// `M(x) = (log w)′(x)`.
    pub fn m(&self, x: &T) -> Result<T> {
        self.guard(x)?;
        let two = T::from_i64(2);
        Ok(-(two.clone() * x.clone()) + two * self.power_sum(x, 1))
    }

    /// `M′(x) = −2 − 2Σ_k (1/(x − z_k)² − 1/(x − w_k)²)`, pairs combined
    /// into real parts.
    pub fn m_prime(&self, x: &T) -> Result<T> {
        self.guard(x)?;
        let two = T::from_i64(2);
        Ok(-two.clone() - two * self.power_sum(x, 2))
    }
}

/// `M_{1,n}′(x)`; any weight kind is accepted and uses its own `M′`.
pub fn m1n_derivative<T: Real>(ws: &WeightSpec<T>, x: &T) -> Result<T> {
    ws.m_prime(x)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ApproxVerdict {
    /// `min(−M′)` over the grid; convexity of `log(1/w)` needs `≥ 0`.
    pub min_neg_m_prime: f64,
    pub convex: bool,
    /// `log w(x) + K log|x|` at `|x| = 10, 20, 40` (both signs).
    pub tail: Vec<(f64, f64)>,
    pub moments_finite: bool,
    /// Boundary conditions are vacuous on ℝ.
    pub boundary_skipped: bool,
    pub pass: bool,
}

/// Checks of Definition-style hypotheses on a uniform grid of
/// `grid_size` points over `[a, b]`, with `None` ends clipped to `±10`.
/// Moments are judged by the decay of `w(x)|x|^K`, `K = 2(m + n) + 2`,
/// at `|x| = 10, 20, 40`.
pub fn is_approximating<T: Real>(ws: &WeightSpec<T>, interval: (Option<f64>, Option<f64>), grid_size: usize) -> Result<ApproxVerdict> {
    if grid_size < 100 {
        return Err(Error::InvalidArgument(format!("grid_size {grid_size} < 100")));
    }
    let lo = interval.0.unwrap_or(-10.0);
    let hi = interval.1.unwrap_or(10.0);
    let mut min_neg = f64::INFINITY;
    for i in 0..grid_size {
        let x = T::from_f64(lo + (hi - lo) * i as f64 / (grid_size - 1) as f64);
        min_neg = min_neg.min(-ws.m_prime(&x)?.to_f64());
    }
    let k = (2 * (ws.lambda.size() + ws.n) + 2) as f64;
    let mut tail = Vec::new();
    let mut decreasing = true;
    for sign in [-1.0, 1.0] {
        let mut last = f64::INFINITY;
        for r in [10.0, 20.0, 40.0] {
            let x = sign * r;
            let v = ws.log_w(&T::from_f64(x))?.to_f64() + k * r.ln();
            decreasing &= v < last;
            last = v;
            tail.push((x, v));
        }
    }
    let moments_finite = decreasing && tail.iter().all(|&(x, v)| x.abs() < 40.0 || v < -100.0);
    let boundary_skipped = interval.0.is_none() && interval.1.is_none();
    let convex = min_neg >= 0.0;
    Ok(ApproxVerdict { min_neg_m_prime: min_neg, convex, tail, moments_finite, boundary_skipped, pass: convex && moments_finite })
}

fn check_distinct<T: Real>(x: &[T]) -> Result<()> {
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            if x[i] == x[j] {
                return Err(Error::CoincidentPoints { i, j });
            }
        }
    }
    Ok(())
}

/// `E(x) = Σ log w(x_i) + Σ_{i<j} log (x_i − x_j)²`, with every
/// logarithmic term gathered into one running product.
pub fn reduced_energy<T: Real>(ws: &WeightSpec<T>, x: &[T]) -> Result<T> {
    check_distinct(x)?;
    let mut logs = LogSum::new();
    let mut gauss = T::zero();
    for i in 0..x.len() {
        ws.guard(&x[i])?;
        gauss = gauss + x[i].clone() * x[i].clone();
        let xc = Complex::from_real(x[i].clone());
        for z in ws.zeros() {
            logs.push((xc.clone() - z.clone()).norm_sqr());
        }
        for w in ws.poles() {
            logs.push(T::one() / (xc.clone() - w.clone()).norm_sqr());
        }
        for j in i + 1..x.len() {
            let d = x[i].clone() - x[j].clone();
            logs.push(d.clone() * d);
        }
    }
    Ok(logs.finish() - gauss)
}

/// `∂E/∂x_i = M(x_i) + Σ_{j≠i} 2/(x_i − x_j)`.
pub fn reduced_gradient<T: Real>(ws: &WeightSpec<T>, x: &[T]) -> Result<Vec<T>> {
    check_distinct(x)?;
    let two = T::from_i64(2);
    (0..x.len())
        .map(|i| {
            let s = (0..x.len()).filter(|&j| j != i).fold(T::zero(), |a, j| a + two.clone() / (x[i].clone() - x[j].clone()));
            Ok(ws.m(&x[i])? + s)
        })
        .collect()
}

/// `h_ij = 2/(x_i − x_j)²`, `h_ii = M′(x_i) − Σ_{j≠i} 2/(x_i − x_j)²`.
pub fn reduced_hessian<T: Real>(x: &[T], ws: &WeightSpec<T>) -> Result<Matrix<T>> {
    check_distinct(x)?;
    let n = x.len();
    let two = T::from_i64(2);
    let mut h = Matrix::zeros(n, n);
    for i in 0..n {
        let mut diag = ws.m_prime(&x[i])?;
        for j in 0..n {
            if j != i {
                let d = x[i].clone() - x[j].clone();
                let c = two.clone() / (d.clone() * d);
                h[(i, j)] = c.clone();
                diag = diag - c;
            }
        }
        h[(i, i)] = diag;
    }
    Ok(h)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MaximumVerdict {
    pub stationarity_max: f64,
    pub hessian_max_eigenvalue: f64,
    pub trials: usize,
    pub failures: usize,
    pub seed: u64,
}

impl MaximumVerdict {
    pub fn pass(&self, stationarity_tol: f64) -> bool {
        self.stationarity_max <= stationarity_tol && self.hessian_max_eigenvalue < 0.0 && self.failures == 0
    }
}

/// Stationarity, negative definiteness, and `trials` seeded Gaussian
/// perturbations at log-uniform scales in `[10⁻³, 10⁻¹]`, each of which
/// must strictly lower `E`. A zero `scale_override` is the degenerate case
/// where equality is accepted.
pub fn verify_unique_maximum<T: Real>(ws: &WeightSpec<T>, x: &[T], trials: usize, seed: u64) -> Result<MaximumVerdict> {
    verify_with_scales(ws, x, trials, seed, None)
}

pub fn verify_with_scales<T: Real>(
    ws: &WeightSpec<T>,
    x: &[T],
    trials: usize,
    seed: u64,
    scale_override: Option<f64>,
) -> Result<MaximumVerdict> {
    let g = reduced_gradient(ws, x)?;
    let stationarity_max = g.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max);
    let h = reduced_hessian(x, ws)?.to_f64();
    let hessian_max_eigenvalue = symmetric_eigenvalues(&h)?.last().copied().unwrap_or(f64::NEG_INFINITY);
    let e0 = reduced_energy(ws, x)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    for _ in 0..trials {
        let scale = scale_override.unwrap_or_else(|| 10f64.powf(rng.gen_range(-3.0..=-1.0)));
        let y: Vec<T> = x
            .iter()
            .map(|xi| {
                let d: f64 = rng.sample(StandardNormal);
                xi.clone() + T::from_f64(scale * d)
            })
            .collect();
        let e = match reduced_energy(ws, &y) {
            Ok(e) => e,
            Err(Error::CoincidentPoints { .. }) => continue,
            Err(err) => return Err(err),
        };
        let worse = if scale == 0.0 { e > e0 } else { e >= e0 };
        if worse {
            failures += 1;
        }
    }
    Ok(MaximumVerdict { stationarity_max, hessian_max_eigenvalue, trials, failures, seed })
}

/// Normalized residual at `x` of
/// `q″ + (M + 2P_m′/P_m) q′ + (P_m″/P_m + (P_m′/P_m)(−2x − 2H′/H) + H″/H + 2xH′/H + c) q`
/// for `q = ∏(x − x_i)` over the regular zeros, with `c = 2n`.
pub fn qn_ode_residual<T: Real>(pl: &Pipeline<T>, x: &T) -> Result<T> {
    qn_ode_residual_with_constant(pl, x, 2 * pl.n as i64)
}

/// As [`qn_ode_residual`] with an explicit zero-order constant `c`. The
/// equation is divided by `q` and each term is a logarithmic-derivative
/// sum; the residual is normalized by the largest term.
pub fn qn_ode_residual_with_constant<T: Real>(pl: &Pipeline<T>, x: &T, c: i64) -> Result<T> {
    let ws = WeightSpec::modified_w1(pl);
    ws.guard(x)?;
    let xc = Complex::from_real(x.clone());
    let sums = |pts: &mut dyn Iterator<Item = Complex<T>>| {
        let (mut s1, mut s2) = (Complex::zero(), Complex::zero());
        for p in pts {
            let r = (xc.clone() - p).recip();
            s2 += r.sqr();
            s1 += r;
        }
        (s1.re, s2.re)
    };
    let (q1, q2) = sums(&mut pl.zeros.regular.iter().map(|v| Complex::from_real(v.clone())));
    let (p1, p2) = sums(&mut pl.zeros.exceptional.iter().cloned());
    let (h1, h2) = sums(&mut pl.hw.roots.iter().cloned());
    let two = T::from_i64(2);
    let base = -(two.clone() * x.clone()) - two.clone() * h1.clone();
    let terms = [
        q1.clone() * q1.clone() - q2,
        (base.clone() + two.clone() * p1.clone()) * q1,
        p1.clone() * p1.clone() - p2,
        p1 * base,
        h1.clone() * h1.clone() - h2,
        two * x.clone() * h1,
        T::from_i64(c),
    ];
    let total = terms.iter().fold(T::zero(), |a, t| a + t.clone());
    let scale = terms.iter().fold(T::zero(), |a, t| a.max_of(t.abs()));
    Ok(total.abs() / scale)
}
