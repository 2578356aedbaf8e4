//! Zeros of classical, generalized and exceptional Hermite polynomials and
//! the distance / interlacing measurements made on them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermite::{exceptional_hermite, generalized_hermite, hermite};
use crate::linalg::{symmetric_eigenvalues, Matrix};
use crate::partition::Partition;
use crate::scalar::{round_to, BigFloat, Complex, Real};
use crate::ExactPoly;

/// Default iteration cap for [`all_roots`].
pub const MAX_ITERATIONS: usize = 500;

/// Nearest/second-nearest distance ratio below which a matching is ambiguous.
pub const MATCHING_RATIO: f64 = 1.01;

/// Evaluates `p` and `p′` together at a fixed binary precision, with the
/// coefficients converted once.
struct Evaluator {
    coeffs: Vec<BigFloat>,
    prec: usize,
}

impl Evaluator {
    fn new(p: &ExactPoly, prec: usize) -> Self {
        let coeffs = p.coeffs().iter().map(|a| round_to(crate::scalar::bigint_to_bigfloat(a), prec)).collect();
        Evaluator { coeffs, prec }
    }

    /// `(p(z), p′(z))` as pairs of (re, im).
    fn eval<T: Real>(&self, z: &Complex<T>) -> ((BigFloat, BigFloat), (BigFloat, BigFloat)) {
        let zr = round_to(z.re.to_bigfloat(), self.prec);
        let zi = round_to(z.im.to_bigfloat(), self.prec);
        let zero = round_to(BigFloat::ZERO, self.prec);
        let (mut pr, mut pi) = (zero.clone(), zero.clone());
        let (mut dr, mut di) = (zero.clone(), zero);
        for a in self.coeffs.iter().rev() {
            let ndr = &dr * &zr - &di * &zi + &pr;
            let ndi = &dr * &zi + &di * &zr + &pi;
            let npr = &pr * &zr - &pi * &zi + a;
            let npi = &pr * &zi + &pi * &zr;
            dr = ndr;
            di = ndi;
            pr = npr;
            pi = npi;
        }
        ((pr, pi), (dr, di))
    }

    /// Newton correction `p(z)/p′(z)`, or `None` when `p′(z) = 0`.
    fn newton<T: Real>(&self, z: &Complex<T>) -> Option<Complex<T>> {
        let ((pr, pi), (dr, di)) = self.eval(z);
        let den = &dr * &dr + &di * &di;
        if den.repr().is_zero() {
            return None;
        }
        let re = (&pr * &dr + &pi * &di) / &den;
        let im = (&pi * &dr - &pr * &di) / &den;
        Some(Complex::new(T::from_bigfloat(&re), T::from_bigfloat(&im)))
    }
}

/// A root with its quality certificate
/// `|p(z)| / (|p′(z)| · min_j |z − z_j|)`.
#[derive(Clone, Debug)]
pub struct RootEstimate<T> {
    pub root: Complex<T>,
    pub residual: T,
}

fn ln_abs(a: &num_bigint::BigInt) -> f64 {
    let bits = a.bits();
    let shift = bits.saturating_sub(60);
    let top: num_bigint::BigInt = a >> shift;
    num_traits::ToPrimitive::to_f64(&top).unwrap().abs().ln() + shift as f64 * std::f64::consts::LN_2
}

fn default_seeds(p: &ExactPoly) -> Vec<Complex<f64>> {
    let d = p.degree().unwrap_or(0);
    let c = p.coeffs();
    let lead = ln_abs(&c[d]);
    // Fujiwara-type radius from the coefficient ratios, in log space.
    let radius = (0..d)
        .filter(|&k| !num_traits::Zero::is_zero(&c[k]))
        .map(|k| ((ln_abs(&c[k]) - lead) / (d - k) as f64).exp())
        .fold(0.0f64, f64::max)
        .max(1e-3);
    (0..d)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / d as f64 + 0.4;
            Complex::new(radius * t.cos(), radius * t.sin())
        })
        .collect()
}

/// One Gauss–Seidel Aberth sweep; returns the largest relative correction.
fn aberth_sweep<T: Real>(ev: &Evaluator, z: &mut [Complex<T>]) -> Option<T> {
    let mut worst = T::zero();
    for k in 0..z.len() {
        let n = ev.newton(&z[k])?;
        let mut s = Complex::zero();
        for j in 0..z.len() {
            if j != k {
                s += (z[k].clone() - z[j].clone()).recip();
            }
        }
        let denom = Complex::one() - n.clone() * s;
        let w = if denom.norm_sqr().is_zero() { n } else { n / denom };
        let rel = w.abs() / z[k].abs().max_of(T::one());
        worst = worst.max_of(rel);
        z[k] -= w;
    }
    Some(worst)
}

fn iterate<T: Real>(ev: &Evaluator, z: &mut [Complex<T>], tol: T, cap: usize, used: &mut usize) -> bool {
    let mut stalled = 0;
    let mut last = T::from_f64(f64::MAX);
    while *used < cap {
        *used += 1;
        let Some(step) = aberth_sweep(ev, z) else {
            return false;
        };
        if step <= tol {
            return true;
        }
        // Below 2^8 eps further sweeps only shuffle rounding noise.
        if step >= last && step <= tol.clone() * T::from_f64(256.0) {
            stalled += 1;
            if stalled >= 3 {
                return true;
            }
        }
        last = step;
    }
    false
}

/// All complex roots of a squarefree polynomial by Aberth–Ehrlich iteration.
///
/// A double-precision phase locates the roots, a `T` phase polishes them;
/// both evaluate `p/p′` on the exact coefficients at
/// `max(precision_bits + 32, p.default_precision())` bits. For real
/// coefficients conjugate pairs are averaged so the output set is closed
/// under conjugation.
pub fn all_roots<T: Real>(p: &ExactPoly, precision_bits: usize, seeds: Option<&[Complex<f64>]>) -> Result<Vec<RootEstimate<T>>> {
    let d = p.degree().ok_or(Error::ZeroPolynomial)?;
    if d == 0 {
        return Ok(Vec::new());
    }
    if !p.is_squarefree() {
        return Err(Error::NotSquarefree);
    }
    let prec = (precision_bits + 32).max(p.default_precision());
    let ev = Evaluator::new(p, prec);
    let mut z64: Vec<Complex<f64>> = match seeds {
        Some(s) if s.len() == d => s.to_vec(),
        Some(s) => return Err(Error::LengthMismatch { expected: d, got: s.len() }),
        None => default_seeds(p),
    };
    let mut used = 0;
    iterate(&ev, &mut z64, 1e-14, MAX_ITERATIONS, &mut used);
    let mut z: Vec<Complex<T>> = z64.iter().map(|c| Complex::new(T::from_f64(c.re), T::from_f64(c.im))).collect();
    let tol = T::epsilon() * T::from_f64(16.0);
    if !iterate(&ev, &mut z, tol, MAX_ITERATIONS, &mut used) {
        return Err(Error::NonConvergence { iterations: used });
    }
    symmetrize_conjugates(&mut z);
    // Final Newton polish on the exact polynomial.
    for zk in z.iter_mut() {
        if let Some(step) = ev.newton(zk) {
            *zk -= step;
        }
    }
    symmetrize_conjugates(&mut z);
    let out = (0..d)
        .map(|k| {
            let step = ev.newton(&z[k]).map(|s| s.abs()).unwrap_or_else(|| T::from_f64(1e300));
            let spacing = (0..d)
                .filter(|&j| j != k)
                .map(|j| (z[k].clone() - z[j].clone()).abs())
                .fold(None, |m: Option<T>, v| Some(m.map_or(v.clone(), |m| m.min_of(v))))
                .unwrap_or_else(T::one);
            RootEstimate { root: z[k].clone(), residual: step / spacing }
        })
        .collect();
    Ok(out)
}

/// Pairs each root in the upper half plane with its conjugate partner and replaces both by the average of `z` and `conj(partner)`.
fn symmetrize_conjugates<T: Real>(z: &mut [Complex<T>]) {
    let n = z.len();
    let mut taken = vec![false; n];
    for k in 0..n {
        if taken[k] || z[k].im <= T::zero() {
            continue;
        }
        let target = z[k].conj();
        let best = (0..n)
            .filter(|&j| j != k && !taken[j] && z[j].im < T::zero())
            .min_by(|&a, &b| {
                let da = (z[a].clone() - target.clone()).norm_sqr();
                let db = (z[b].clone() - target.clone()).norm_sqr();
                da.partial_cmp(&db).unwrap()
            });
        // A genuine partner sits much closer to conj(z) than |Im z|; near-real
        // roots with noise in Im have none.
        let best = best.filter(|&j| (z[j].clone() - target.clone()).abs() < z[k].im.clone() * T::from_f64(0.5));
        if let Some(j) = best {
            let half = T::from_f64(0.5);
            let avg = Complex::new(
                (z[k].re.clone() + z[j].re.clone()) * half.clone(),
                (z[k].im.clone() - z[j].im.clone()) * half,
            );
            z[j] = avg.conj();
            z[k] = avg;
            taken[k] = true;
            taken[j] = true;
        }
    }
}

/// Zeros of `H_N`, ascending: Jacobi-matrix eigenvalues (diagonal 0,
/// off-diagonal `√(k/2)`) refined by Newton on the exact `H_N`.
pub fn classical_hermite_zeros<T: Real>(n: usize, precision_bits: usize) -> Vec<T> {
    if n == 0 {
        return Vec::new();
    }
    let jac = Matrix::from_fn(n, n, |i, j| if i + 1 == j || j + 1 == i { (i.max(j) as f64 / 2.0).sqrt() } else { 0.0 });
    let guess = symmetric_eigenvalues(&jac).expect("Jacobi matrix is symmetric");
    let h = hermite(n);
    let ev = Evaluator::new(&h, (precision_bits + 32).max(h.default_precision()));
    let tol = T::epsilon() * T::from_f64(4.0);
    let mut xs: Vec<T> = guess
        .into_iter()
        .map(|g| {
            let mut x = Complex::from_real(T::from_f64(g));
            for _ in 0..100 {
                let Some(step) = ev.newton(&x) else { break };
                let step = Complex::from_real(step.re);
                let small = step.abs() <= tol.clone() * x.abs().max_of(T::one());
                x -= step;
                if small {
                    break;
                }
            }
            x.re
        })
        .collect();
    // Enforce the reflection symmetry x_k = −x_{N−1−k}.
    for k in 0..n / 2 {
        let j = n - 1 - k;
        let a = (xs[j].clone() - xs[k].clone()) * T::from_f64(0.5);
        xs[k] = -a.clone();
        xs[j] = a;
    }
    if n % 2 == 1 {
        xs[n / 2] = T::zero();
    }
    xs
}

/// Zeros of `H_λ = c ∏(z − w_k)` together with `c`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct HRoots<T: Real> {
    #[serde(with = "complex_list")]
    pub roots: Vec<Complex<T>>,
    pub leading: num_bigint::BigInt,
}

/// Classified zeros of `P_{m,m+n}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ZeroSet<T: Real> {
    #[serde(with = "complex_list")]
    pub exceptional: Vec<Complex<T>>,
    #[serde(with = "real_list")]
    pub regular: Vec<T>,
    pub lambda: Partition,
    pub degree: usize,
}

/// Sorts by real part, then upper half plane first.
fn sort_pairs<T: Real>(z: &mut [Complex<T>]) {
    z.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(b.im.partial_cmp(&a.im).unwrap()));
}

/// Roots of `H_λ`, sorted like exceptional zeros.
pub fn h_roots<T: Real>(lambda: &Partition, precision_bits: usize) -> Result<HRoots<T>> {
    let h = generalized_hermite(lambda)?;
    let mut roots: Vec<Complex<T>> = all_roots::<T>(&h, precision_bits, None)?.into_iter().map(|r| r.root).collect();
    sort_pairs(&mut roots);
    Ok(HRoots { roots, leading: h.leading().cloned().expect("H_λ is nonzero") })
}

/// Splits roots into regular (`|Im z| ≤ tol`, snapped to ℝ) and exceptional.
/// `tol_imag` defaults to `2^(−bits/2)·max(1, |z|)`.
pub fn classify_zeros<T: Real>(roots: &[Complex<T>], lambda: &Partition, n: usize, tol_imag: Option<T>) -> Result<ZeroSet<T>> {
    let m = lambda.size();
    if roots.len() != m + n {
        return Err(Error::LengthMismatch { expected: m + n, got: roots.len() });
    }
    let default = T::from_f64(2f64.powf(-(T::BITS as f64) / 2.0));
    let mut regular = Vec::new();
    let mut exceptional = Vec::new();
    for z in roots {
        let tol = match &tol_imag {
            Some(t) => t.clone(),
            None => default.clone() * z.abs().max_of(T::one()),
        };
        if z.im.abs() <= tol {
            regular.push(z.re.clone());
        } else {
            exceptional.push(z.clone());
        }
    }
    if regular.len() != n || exceptional.len() != m {
        return Err(Error::CountMismatch {
            expected_regular: n,
            expected_exceptional: m,
            regular: regular.len(),
            exceptional: exceptional.len(),
        });
    }
    regular.sort_by(|a, b| a.partial_cmp(b).unwrap());
    sort_pairs(&mut exceptional);
    Ok(ZeroSet { exceptional, regular, lambda: lambda.clone(), degree: m + n })
}

/// Everything the downstream modules need about one `(λ, n)`:
/// the exact polynomials, the zeros of `H_λ`, and the classified zeros of
/// `P_{m,m+n}`, where `n` counts regular zeros.
#[derive(Clone, Debug)]
pub struct Pipeline<T: Real> {
    pub lambda: Partition,
    pub n: usize,
    pub precision_bits: usize,
    pub h: ExactPoly,
    pub p: ExactPoly,
    pub hw: HRoots<T>,
    pub zeros: ZeroSet<T>,
    pub max_residual: f64,
}

impl<T: Real> Pipeline<T> {
    /// Seeds: zeros of `H_λ` for the exceptional zeros and the classical
    /// zeros of `H_{m+n}` for the regular ones (the `m` classical zeros
    /// nearest the real parts of the `w_k` are dropped).
    pub fn build(lambda: &Partition, n: usize, precision_bits: usize) -> Result<Self> {
        let m = lambda.size();
        let h = generalized_hermite(lambda)?;
        let p = exceptional_hermite(lambda, m + n)?;
        let hw = h_roots::<T>(lambda, precision_bits)?;
        let mut classical: Vec<f64> = classical_hermite_zeros::<f64>(m + n, 53);
        for w in &hw.roots {
            let u = w.re.to_f64();
            if let Some((i, _)) = classical
                .iter()
                .enumerate()
                .min_by(|a, b| (a.1 - u).abs().partial_cmp(&(b.1 - u).abs()).unwrap())
            {
                classical.remove(i);
            }
        }
        let mut seeds: Vec<Complex<f64>> = hw.roots.iter().map(Complex::to_f64).collect();
        seeds.extend(classical.into_iter().map(|x| Complex::new(x, 0.0)));
        let est = all_roots::<T>(&p, precision_bits, Some(&seeds))?;
        let max_residual = est.iter().map(|r| r.residual.to_f64()).fold(0.0, f64::max);
        let roots: Vec<Complex<T>> = est.into_iter().map(|r| r.root).collect();
        let zeros = classify_zeros(&roots, lambda, n, None)?;
        Ok(Pipeline { lambda: lambda.clone(), n, precision_bits, h, p, hw, zeros, max_residual })
    }

    pub fn m(&self) -> usize {
        self.lambda.size()
    }
}

/// For each exceptional zero, the index of its nearest zero of `H`,
/// validated as a perfect matching.
pub fn match_exceptional<T: Real>(zs: &ZeroSet<T>, hw: &HRoots<T>) -> Result<Vec<usize>> {
    let m = zs.exceptional.len();
    if hw.roots.len() != m {
        return Err(Error::LengthMismatch { expected: m, got: hw.roots.len() });
    }
    let mut sigma = Vec::with_capacity(m);
    let mut used = vec![false; m];
    for (k, z) in zs.exceptional.iter().enumerate() {
        let mut d: Vec<(f64, usize)> = hw.roots.iter().enumerate().map(|(l, w)| ((z.clone() - w.clone()).abs().to_f64(), l)).collect();
        d.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        if d.len() > 1 && d[1].0 < MATCHING_RATIO * d[0].0 {
            return Err(Error::MatchingAmbiguous { index: k, ratio: d[1].0 / d[0].0 });
        }
        let l = d[0].1;
        if used[l] {
            return Err(Error::MatchingAmbiguous { index: k, ratio: 1.0 });
        }
        used[l] = true;
        sigma.push(l);
    }
    Ok(sigma)
}

/// `(k, |z_k − w_{σ(k)}|)` under the nearest-neighbour matching.
pub fn exceptional_deviation<T: Real>(zs: &ZeroSet<T>, hw: &HRoots<T>) -> Result<Vec<(usize, T)>> {
    let sigma = match_exceptional(zs, hw)?;
    Ok(zs
        .exceptional
        .iter()
        .zip(&sigma)
        .enumerate()
        .map(|(k, (z, &l))| (k, (z.clone() - hw.roots[l].clone()).abs()))
        .collect())
}

/// Residual of the identity
/// `1/(w_k−z_k) = w_k + Σ_{l≠k} 1/(w_k−w_l) − Σ_{l≠k} 1/(w_k−z_l) − Σ_j 1/(w_k−x_j)`.
#[derive(Clone, Debug)]
pub struct KmResidual<T> {
    pub k: usize,
    pub absolute: T,
    pub relative: T,
}

pub fn km_identity_residual<T: Real>(zs: &ZeroSet<T>, hw: &HRoots<T>) -> Result<Vec<KmResidual<T>>> {
    let sigma = match_exceptional(zs, hw)?;
    let m = sigma.len();
    // w reordered so that w[k] is matched with z_k.
    let w: Vec<Complex<T>> = sigma.iter().map(|&l| hw.roots[l].clone()).collect();
    let floor = T::from_f64(2f64.powf(-(T::BITS as f64) / 4.0));
    let mut out = Vec::with_capacity(m);
    for k in 0..m {
        let z = &zs.exceptional;
        let gap = w[k].clone() - z[k].clone();
        if gap.abs() < floor {
            return Err(Error::DegenerateDistance { index: k });
        }
        let lhs = gap.recip();
        let mut rhs = w[k].clone();
        for l in 0..m {
            if l != k {
                rhs += (w[k].clone() - w[l].clone()).recip();
                rhs -= (w[k].clone() - z[l].clone()).recip();
            }
        }
        for x in &zs.regular {
            rhs -= (w[k].clone() - Complex::from_real(x.clone())).recip();
        }
        let absolute = (lhs.clone() - rhs).abs();
        let relative = absolute.clone() / lhs.abs();
        out.push(KmResidual { k, absolute, relative });
    }
    Ok(out)
}

/// Occupied-gap count of regular zeros among the classical zeros.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InterlacingReport {
    pub occupied: usize,
    pub required: usize,
    /// `true` for `r = 0`, where the check does not apply.
    pub skipped: bool,
    pub pass: bool,
}

pub fn interlacing_report<T: Real>(regular: &[T], classical: &[T], r: usize) -> InterlacingReport {
    let n = regular.len();
    let occupied = classical
        .windows(2)
        .filter(|w| regular.iter().any(|x| *x > w[0] && *x < w[1]))
        .count();
    let required = n.saturating_sub(r);
    let skipped = r == 0;
    InterlacingReport { occupied, required, skipped, pass: skipped || occupied >= required }
}

/// `Σ_i 1/((a − x_i)² + b²)`.
pub fn inverse_distance_scan<T: Real>(a: &T, b: &T, regular: &[T]) -> Result<T> {
    if b.is_zero() {
        return Err(Error::InvalidArgument("b must be nonzero".into()));
    }
    let b2 = b.clone() * b.clone();
    Ok(regular.iter().fold(T::zero(), |acc, x| {
        let d = a.clone() - x.clone();
        acc + T::one() / (d.clone() * d + b2.clone())
    }))
}

/// Serialization of real and complex lists as decimal strings at full
/// precision for `Mp`, plain numbers for hardware floats.
pub(crate) mod real_list {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<T: Real, S: Serializer>(v: &[T], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_f64()))
    }

    pub fn deserialize<'de, T: Real, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<T>, D::Error> {
        let v: Vec<f64> = Vec::deserialize(d)?;
        Ok(v.into_iter().map(T::from_f64).collect())
    }
}

pub(crate) mod complex_list {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<T: Real, S: Serializer>(v: &[Complex<T>], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|z| [z.re.to_f64(), z.im.to_f64()]))
    }

    pub fn deserialize<'de, T: Real, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Complex<T>>, D::Error> {
        let v: Vec<[f64; 2]> = Vec::deserialize(d)?;
        Ok(v.into_iter().map(|[re, im]| Complex::from_f64(re, im)).collect())
    }
}
