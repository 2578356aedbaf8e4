//! The weighted log-energy `F` of a configuration of `m` complex and `n`
//! real points, its holomorphic counterpart `F_c`, gradient and Hessian.
//!
//! With `u` running over all points and `w(z) = |e^{−z²}| / |H(z)|²`,
//!
//! `F = Σ log w(u_a) + Σ_{a<b} log |u_a − u_b|²  =  Re F_c`.
//!
//! Derivatives are taken through `g_a = ∂F_c/∂u_a`; for a complex point
//! `∂ξ F = Re g`, `∂η F = −Im g`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gersgorin::{is_strictly_block_diagonally_dominant, BlockPartition, Dominance};
use crate::linalg::{symmetric_eigenvalues, Matrix};
use crate::scalar::{Complex, Real};
use crate::zeros::{HRoots, ZeroSet};
use crate::ExactPoly;

/// `2m + n` real coordinates `(ξ_1, η_1, …, ξ_m, η_m, x_1, …, x_n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Configuration<T> {
    pub xi: Vec<T>,
    pub eta: Vec<T>,
    pub x: Vec<T>,
}

impl<T: Real> Configuration<T> {
    pub fn from_zero_set(z: &ZeroSet<T>) -> Self {
        Configuration {
            xi: z.exceptional.iter().map(|c| c.re.clone()).collect(),
            eta: z.exceptional.iter().map(|c| c.im.clone()).collect(),
            x: z.regular.clone(),
        }
    }

    pub fn m(&self) -> usize {
        self.xi.len()
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn dim(&self) -> usize {
        2 * self.m() + self.n()
    }

    /// All points as complex numbers, exceptional first.
    pub fn points(&self) -> Vec<Complex<T>> {
        let mut u: Vec<Complex<T>> = self.xi.iter().zip(&self.eta).map(|(a, b)| Complex::new(a.clone(), b.clone())).collect();
        u.extend(self.x.iter().map(|x| Complex::from_real(x.clone())));
        u
    }

    pub fn to_vec(&self) -> Vec<T> {
        let mut v = Vec::with_capacity(self.dim());
        for k in 0..self.m() {
            v.push(self.xi[k].clone());
            v.push(self.eta[k].clone());
        }
        v.extend(self.x.iter().cloned());
        v
    }

    pub fn from_vec(v: &[T], m: usize) -> Self {
        Configuration {
            xi: (0..m).map(|k| v[2 * k].clone()).collect(),
            eta: (0..m).map(|k| v[2 * k + 1].clone()).collect(),
            x: v[2 * m..].to_vec(),
        }
    }
}

/// Sum of logarithms accumulated as a product, taking a logarithm only
/// when the running product leaves `[2^-e, 2^e]`, with `e = 300` for
/// hardware floats and `e = 10⁵` for types with a wide exponent.
pub(crate) struct LogSum<T> {
    acc: T,
    prod: T,
    hi: T,
    lo: T,
}

impl<T: Real> LogSum<T> {
    pub(crate) fn new() -> Self {
        let (hi, lo) = if T::BITS <= 64 {
            (T::from_f64(2f64.powi(300)), T::from_f64(2f64.powi(-300)))
        } else {
            let h = T::from_f64(2f64.powi(1000)).powi(100);
            (h.clone(), T::one() / h)
        };
        LogSum { acc: T::zero(), prod: T::one(), hi, lo }
    }

    pub(crate) fn push(&mut self, v: T) {
        self.prod = self.prod.clone() * v;
        if self.prod > self.hi || self.prod < self.lo {
            self.acc = self.acc.clone() + self.prod.ln();
            self.prod = T::one();
        }
    }

    pub(crate) fn finish(self) -> T {
        self.acc + self.prod.ln()
    }
}

fn check_points<T: Real>(u: &[Complex<T>], hw: &HRoots<T>) -> Result<()> {
    for a in 0..u.len() {
        for b in a + 1..u.len() {
            if (u[a].clone() - u[b].clone()).norm_sqr().is_zero() {
                return Err(Error::CoincidentPoints { i: a, j: b });
            }
        }
        if hw.roots.iter().any(|w| (u[a].clone() - w.clone()).norm_sqr().is_zero()) {
            return Err(Error::PointAtPoleOfW { index: a });
        }
    }
    Ok(())
}

/// `F`, evaluated in the log domain.
pub fn log_energy<T: Real>(cfg: &Configuration<T>, hw: &HRoots<T>) -> Result<T> {
    let u = cfg.points();
    check_points(&u, hw)?;
    let mut pairs = LogSum::new();
    let mut poles = LogSum::new();
    let mut gauss = T::zero();
    for a in 0..u.len() {
        gauss = gauss + u[a].sqr().re;
        for b in a + 1..u.len() {
            pairs.push((u[a].clone() - u[b].clone()).norm_sqr());
        }
        for w in &hw.roots {
            poles.push((u[a].clone() - w.clone()).norm_sqr());
        }
    }
    let c = T::from_bigint(&hw.leading).abs().ln();
    let npts = T::from_i64(u.len() as i64);
    Ok(-gauss - T::from_i64(2) * npts * c + pairs.finish() - poles.finish())
}

/// `F_c = −Σu² − 2Σ log H(u) + 2Σ_{a<b} log(u_a − u_b)`, principal branch
/// per term. The real part is accumulated like [`log_energy`]; the
/// imaginary part is a sum of arguments.
pub fn complex_log_energy<T: Real>(cfg: &Configuration<T>, h: &ExactPoly) -> Result<Complex<T>> {
    let u = cfg.points();
    let two = T::from_i64(2);
    let mut sq = Complex::zero();
    let mut modulus = LogSum::new();
    let mut arg = T::zero();
    let mut hvals = Vec::with_capacity(u.len());
    for a in 0..u.len() {
        let hv = h.eval_complex(&u[a]);
        if hv.norm_sqr().is_zero() {
            return Err(Error::PointAtPoleOfW { index: a });
        }
        hvals.push(hv);
    }
    let mut hmod = LogSum::new();
    for a in 0..u.len() {
        sq += u[a].sqr();
        hmod.push(hvals[a].norm_sqr());
        arg = arg - two.clone() * hvals[a].im.atan2(&hvals[a].re);
        for b in a + 1..u.len() {
            let d = u[a].clone() - u[b].clone();
            let r = d.norm_sqr();
            if r.is_zero() {
                return Err(Error::CoincidentPoints { i: a, j: b });
            }
            modulus.push(r);
            arg = arg + two.clone() * d.im.atan2(&d.re);
        }
    }
    // ln|·|² summed, so 2 log|·| terms come out with coefficient 1.
    let re = -sq.re + modulus.finish() - hmod.finish();
    Ok(Complex::new(re, arg - sq.im))
}

/// `g_a = −2u_a − 2Σ_l 1/(u_a − w_l) + 2Σ_{b≠a} 1/(u_a − u_b)`.
fn holomorphic_gradient<T: Real>(u: &[Complex<T>], hw: &HRoots<T>) -> Vec<Complex<T>> {
    let two = T::from_i64(2);
    (0..u.len())
        .map(|a| {
            let mut s = Complex::zero();
            for b in 0..u.len() {
                if b != a {
                    s += (u[a].clone() - u[b].clone()).recip();
                }
            }
            for w in &hw.roots {
                s -= (u[a].clone() - w.clone()).recip();
            }
            (s - u[a].clone()).scale(&two)
        })
        .collect()
}

/// `∇F` in the coordinate order of [`Configuration::to_vec`].
pub fn gradient<T: Real>(cfg: &Configuration<T>, hw: &HRoots<T>) -> Result<Vec<T>> {
    let u = cfg.points();
    check_points(&u, hw)?;
    let g = holomorphic_gradient(&u, hw);
    let m = cfg.m();
    let mut out = Vec::with_capacity(cfg.dim());
    for gk in &g[..m] {
        out.push(gk.re.clone());
        out.push(-gk.im.clone());
    }
    out.extend(g[m..].iter().map(|gi| gi.re.clone()));
    Ok(out)
}

/// Hessian of `F`, assembled entry by entry:
///
/// - `f_aa = −2 + 2Σ_l 1/(u_a − w_l)² − 2Σ_{b≠a} 1/(u_a − u_b)²` gives the
///   diagonal blocks `[[Re f, −Im f], [−Im f, −Re f]]` (and `Re f` for a
///   real point);
/// - `c_ab = 2/(u_a − u_b)²` gives the coupling blocks
///   `[[Re c, −Im c], [−Im c, −Re c]]`, truncated to the rows/columns of
///   real points.
pub fn hessian<T: Real>(cfg: &Configuration<T>, hw: &HRoots<T>) -> Result<Matrix<T>> {
    let u = cfg.points();
    check_points(&u, hw)?;
    let m = cfg.m();
    if let Some(k) = cfg.eta.iter().position(|e| e.is_zero()) {
        return Err(Error::RealExceptionalZero { index: k });
    }
    let two = T::from_i64(2);
    let dim = cfg.dim();
    let mut h = Matrix::zeros(dim, dim);
    // First row/col index of point a and whether it is complex.
    let slot = |a: usize| if a < m { (2 * a, true) } else { (2 * m + (a - m), false) };
    for a in 0..u.len() {
        let mut f = Complex::from_real(-two.clone());
        for w in &hw.roots {
            f += (u[a].clone() - w.clone()).recip().sqr().scale(&two);
        }
        for b in 0..u.len() {
            if b != a {
                f -= (u[a].clone() - u[b].clone()).recip().sqr().scale(&two);
            }
        }
        let (i, ci) = slot(a);
        h[(i, i)] = f.re.clone();
        if ci {
            h[(i, i + 1)] = -f.im.clone();
            h[(i + 1, i)] = -f.im.clone();
            h[(i + 1, i + 1)] = -f.re.clone();
        }
        for b in a + 1..u.len() {
            let c = (u[a].clone() - u[b].clone()).recip().sqr().scale(&two);
            let (j, cj) = slot(b);
            let (re, im) = (c.re.clone(), c.im.clone());
            h[(i, j)] = re.clone();
            h[(j, i)] = re.clone();
            if cj {
                h[(i, j + 1)] = -im.clone();
                h[(j + 1, i)] = -im.clone();
            }
            if ci {
                h[(i + 1, j)] = -im.clone();
                h[(j, i + 1)] = -im.clone();
            }
            if ci && cj {
                h[(i + 1, j + 1)] = -re.clone();
                h[(j + 1, i + 1)] = -re;
            }
        }
    }
    Ok(h)
}

/// A Hessian (possibly similarity-scaled) rounded to double precision,
/// with `m` leading 2×2 blocks and `n` trailing 1×1 blocks.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PartitionedHessian {
    pub entries: Matrix<f64>,
    pub m: usize,
    pub n: usize,
    pub scaling_k: f64,
}

impl PartitionedHessian {
    pub fn new<T: Real>(h: &Matrix<T>, m: usize, n: usize) -> Result<Self> {
        if h.rows() != 2 * m + n || !h.is_square() {
            return Err(Error::PartitionMismatch { dim: h.rows() });
        }
        Ok(PartitionedHessian { entries: h.to_f64(), m, n, scaling_k: 1.0 })
    }

    pub fn dim(&self) -> usize {
        2 * self.m + self.n
    }

    pub fn partition(&self) -> BlockPartition {
        BlockPartition::for_hessian(self.m, self.n)
    }

    fn is_exceptional(&self, i: usize) -> bool {
        i < 2 * self.m
    }

    /// The symmetric matrix this one is similar to, `D Ĥ D⁻¹`.
    pub fn unscaled(&self) -> Matrix<f64> {
        let k = self.scaling_k;
        let e = &self.entries;
        Matrix::from_fn(e.rows(), e.cols(), |i, j| match (self.is_exceptional(i), self.is_exceptional(j)) {
            (true, false) => e[(i, j)] / k,
            (false, true) => e[(i, j)] * k,
            _ => e[(i, j)],
        })
    }

    /// Eigenvalues, ascending; computed on the symmetric representative.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        symmetric_eigenvalues(&self.unscaled())
    }
}

/// `Ĥ = D⁻¹ H D` with `D = diag(1,…,1, K,…,K)` (`K` on the regular
/// coordinates). Scalings compose.
pub fn scaled_hessian(h: &PartitionedHessian, k: f64) -> PartitionedHessian {
    let e = &h.entries;
    let entries = Matrix::from_fn(e.rows(), e.cols(), |i, j| match (h.is_exceptional(i), h.is_exceptional(j)) {
        (true, false) => e[(i, j)] * k,
        (false, true) => e[(i, j)] / k,
        _ => e[(i, j)],
    });
    PartitionedHessian { entries, m: h.m, n: h.n, scaling_k: h.scaling_k * k }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ScalingMethod {
    /// `K = 2^t`, scanned `t = 0, 1, −1, 2, −2, …, ±20`.
    Grid,
    /// Geometric midpoint of the exact feasible interval.
    Interval,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScalingSearch {
    pub k: Option<f64>,
    pub method: Option<ScalingMethod>,
    /// Open interval of `K` for which `Ĥ` is dominant, when nonempty.
    pub feasible: Option<(f64, f64)>,
    pub dominance: Option<Dominance>,
}

/// Searches a diagonal scaling `K` that makes `Ĥ` strictly block
/// diagonally dominant. Powers of two are tried first; if none works the
/// feasible set, which is an interval because each block-row margin is
/// monotone in `K`, is computed exactly.
pub fn find_scaling_k(h: &PartitionedHessian) -> ScalingSearch {
    let part = h.partition();
    let base = scaled_hessian(h, 1.0 / h.scaling_k);
    let feasible = feasible_interval(&base);
    let try_k = |k: f64| {
        let s = scaled_hessian(&base, k);
        is_strictly_block_diagonally_dominant(&s.entries, &part).ok().filter(|d| d.dominant)
    };
    for t in std::iter::once(0).chain((1..=20).flat_map(|t| [t, -t])) {
        let k = 2f64.powi(t);
        if let Some(d) = try_k(k) {
            return ScalingSearch { k: Some(k), method: Some(ScalingMethod::Grid), feasible, dominance: Some(d) };
        }
    }
    if let Some((lo, hi)) = feasible {
        let k = (lo * hi).sqrt();
        if let Some(d) = try_k(k) {
            return ScalingSearch { k: Some(k), method: Some(ScalingMethod::Interval), feasible, dominance: Some(d) };
        }
    }
    ScalingSearch { k: None, method: None, feasible, dominance: None }
}

/// Exceptional block rows need `K < (‖A_II⁻¹‖⁻¹ − Σ_exc ‖A_IJ‖) / Σ_reg ‖A_IJ‖`,
/// regular rows `K > Σ_exc ‖A_iJ‖ / (|h_ii| − Σ_reg |h_ij|)`.
fn feasible_interval(h: &PartitionedHessian) -> Option<(f64, f64)> {
    let part = h.partition();
    let norms = crate::gersgorin::block_norms(&h.entries, &part).ok()?;
    let nb = part.len();
    let m = h.m;
    let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
    for i in 0..nb {
        let diag = crate::gersgorin::inv_block_norm_reciprocal(&part.block(&h.entries, i, i)).ok()?;
        let exc: f64 = (0..m).filter(|&j| j != i).map(|j| norms[(i, j)]).sum();
        let reg: f64 = (m..nb).filter(|&j| j != i).map(|j| norms[(i, j)]).sum();
        if i < m {
            let room = diag - exc;
            if room <= 0.0 {
                return None;
            }
            if reg > 0.0 {
                hi = hi.min(room / reg);
            }
        } else {
            let room = diag - reg;
            if room <= 0.0 {
                return None;
            }
            lo = lo.max(exc / room);
        }
    }
    (lo < hi).then_some((lo, hi))
}
