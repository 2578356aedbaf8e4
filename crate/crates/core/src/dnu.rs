//! The `λ = (ν, ν)` family, where `H_λ` is (a multiple of) the
//! Christoffel–Darboux diagonal
//! `d_ν = h_ν h′_{ν+1} − h′_ν h_{ν+1} = √(2/(ν+1)) Σ_{k≤ν} h_k²`
//! of the orthonormal Hermite functions `h_k = H_k / √(√π 2^k k!)`.
//!
//! Every orthonormal scale has the form `√q · π^{e/4}` with `q` rational,
//! so identities among the `h_k` reduce to exact identities among integer
//! polynomials once the scales are grouped by rational ratio.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::energy::{find_scaling_k, hessian, scaled_hessian, Configuration, PartitionedHessian, ScalingSearch};
use crate::error::{Error, Result};
use crate::fit::{power_law_fit, PowerLawFit};
use crate::gersgorin::{is_strictly_block_diagonally_dominant, Dominance};
use crate::hermite::{generalized_hermite, hermite_pair_wronskian, hermite_sequence, positive_on_scan};
use crate::partition::Partition;
use crate::scalar::{Complex, Mp, Real};
use crate::zeros::{exceptional_deviation, Pipeline};
use crate::ExactPoly;

/// `√radicand · π^{pi_quarters/4}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Surd {
    pub radicand: BigRational,
    pub pi_quarters: i32,
}

impl Surd {
    pub fn sqrt_of(q: BigRational) -> Self {
        Surd { radicand: q, pi_quarters: 0 }
    }

    pub fn mul(&self, o: &Surd) -> Surd {
        Surd { radicand: &self.radicand * &o.radicand, pi_quarters: self.pi_quarters + o.pi_quarters }
    }

    /// `self / o` when it is rational.
    pub fn rational_ratio(&self, o: &Surd) -> Option<BigRational> {
        if self.pi_quarters != o.pi_quarters || o.radicand.is_zero() {
            return None;
        }
        let q = &self.radicand / &o.radicand;
        let (n, d) = (q.numer().clone(), q.denom().clone());
        if n.is_negative() {
            return None;
        }
        let (sn, sd) = (n.sqrt(), d.sqrt());
        (&sn * &sn == n && &sd * &sd == d).then(|| BigRational::new(sn, sd))
    }

    pub fn eval<T: Real>(&self) -> T {
        let q = T::from_bigint(self.radicand.numer()) / T::from_bigint(self.radicand.denom());
        let mut v = q.sqrt();
        let quarter = T::pi().sqrt().sqrt();
        let e = self.pi_quarters;
        for _ in 0..e.unsigned_abs() {
            v = if e > 0 { v * quarter.clone() } else { v / quarter.clone() };
        }
        v
    }
}

/// `Σ coef_i · poly_i ≡ 0`, decided exactly: terms are grouped into classes
/// of rationally dependent scales, and each class must cancel over ℚ[x].
/// (Distinct classes are linearly independent over ℚ[x] for the scales
/// produced here, which differ by square roots of non-squares or powers
/// of π.)
pub fn surd_combination_is_zero(terms: &[(Surd, ExactPoly)]) -> bool {
    let mut classes: Vec<(Surd, Vec<(BigRational, ExactPoly)>)> = Vec::new();
    for (s, p) in terms {
        if p.is_zero() || s.radicand.is_zero() {
            continue;
        }
        match classes.iter_mut().find_map(|(rep, members)| s.rational_ratio(rep).map(|r| (r, members))) {
            Some((r, members)) => members.push((r, p.clone())),
            None => classes.push((s.clone(), vec![(BigRational::one(), p.clone())])),
        }
    }
    classes.iter().all(|(_, members)| {
        let lcm = members.iter().fold(BigInt::one(), |l, (r, _)| num_integer::Integer::lcm(&l, r.denom()));
        let sum = members.iter().fold(ExactPoly::zero(), |acc, (r, p)| {
            let k = r.numer() * (&lcm / r.denom());
            &acc + &p.scale(&k)
        });
        sum.is_zero()
    })
}

fn factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::one(), |a, j| a * BigInt::from(j))
}

fn ratio(n: BigInt, d: BigInt) -> BigRational {
    BigRational::new(n, d)
}

/// Scale of `h_k` relative to `H_k`: `1/√(√π 2^k k!)`.
pub fn orthonormal_scale(k: usize) -> Surd {
    Surd { radicand: ratio(BigInt::one(), BigInt::from(2).pow(k as u32) * factorial(k)), pi_quarters: -1 }
}

/// `d_ν = scale · D_ν` with `D_ν` over the integers.
#[derive(Clone, Debug)]
pub struct DnuPoly {
    pub nu: usize,
    pub exact_part: ExactPoly,
    pub scale: Surd,
    /// `D_ν / H_{(ν,ν)}`, checked constant.
    pub hermite_ratio: Option<BigRational>,
    pub even: bool,
    pub positive: bool,
    pub squarefree: bool,
    /// Largest relative deviation between `scale·D_ν` and the CD sum on
    /// `2ν + 5` points of `[−3, 3]`.
    pub cd_max_rel_dev: f64,
}

impl DnuPoly {
    pub fn eval<T: Real>(&self, z: &Complex<T>) -> Complex<T> {
        self.exact_part.eval_complex(z).scale(&self.scale.eval())
    }
}

pub fn dnu(nu: usize) -> DnuPoly {
    let d = hermite_pair_wronskian(nu);
    let scale = orthonormal_scale(nu).mul(&orthonormal_scale(nu + 1));
    let g = generalized_hermite(&Partition::double(nu as u32)).expect("(ν,ν) is a valid partition");
    let hermite_ratio = match (d.leading(), g.leading()) {
        (Some(a), Some(b)) if d.degree() == g.degree() => {
            let r = ratio(a.clone(), b.clone());
            (d.scale(r.denom()) == g.scale(r.numer())).then_some(r)
        }
        _ => None,
    };
    let even = d.reflect() == d;
    let half = ((4 * nu + 2) as f64).sqrt().ceil() as i64 + 1;
    let positive = positive_on_scan(&d, half, 200);
    let squarefree = d.is_squarefree();

    type M = Mp<128>;
    let hs = hermite_sequence(nu);
    let gamma_ratio = M::from_f64(2.0) / M::from_i64(nu as i64 + 1);
    let sd = scale.eval::<M>();
    let pts = 2 * nu + 5;
    let cd_max_rel_dev = (0..pts)
        .map(|j| {
            let x = M::from_f64(-3.0 + 6.0 * j as f64 / (pts - 1) as f64);
            let det = d.eval_real(&x) * sd.clone();
            let sum = hs.iter().enumerate().fold(M::zero(), |acc, (k, hk)| {
                let v = hk.eval_real(&x) * orthonormal_scale(k).eval::<M>();
                acc + v.clone() * v
            });
            let cd = gamma_ratio.sqrt() * sum;
            ((det - cd.clone()) / cd).abs().to_f64()
        })
        .fold(0.0, f64::max);
    DnuPoly { nu, exact_part: d, scale, hermite_ratio, even, positive, squarefree, cd_max_rel_dev }
}

/// `h_ν D″ − (2x h_ν + 2h′_ν) D′ + 4x h′_ν D ≡ 0`, homogeneous in `h_ν`, so
/// checked with `H_ν` in place of `h_ν`.
pub fn dnu_ode_check(nu: usize) -> bool {
    let d = hermite_pair_wronskian(nu);
    let h = hermite_sequence(nu).pop().unwrap();
    let h1 = h.derivative();
    let x = ExactPoly::x();
    let two = BigInt::from(2);
    let t1 = &h * &d.nth_derivative(2);
    let t2 = &(&(&x * &h).scale(&two) + &h1.scale(&two)) * &d.derivative();
    let t3 = &(&x * &h1).scale(&BigInt::from(4)) * &d;
    (&(&t1 - &t2) + &t3).is_zero()
}

/// The two identities
/// `2x h_ν h_{ν+1} = √(2(ν+1)) (h_ν² + h_{ν+1}²) − d_ν` and
/// `h′_ν h_{ν+1} = √(2(ν+1)) h_ν² − d_ν`, decided exactly.
pub fn product_identities_check(nu: usize) -> (bool, bool) {
    let seq = hermite_sequence(nu + 1);
    let (hn, hn1) = (&seq[nu], &seq[nu + 1]);
    let (sn, sn1) = (orthonormal_scale(nu), orthonormal_scale(nu + 1));
    let root = Surd::sqrt_of(ratio(BigInt::from(2 * (nu + 1)), BigInt::one()));
    let d = dnu(nu);
    let x2 = ExactPoly::from_i64s(&[0, 2]);
    let neg = |p: &ExactPoly| -p;
    let first = [
        (sn.mul(&sn1), &(&x2 * hn) * hn1),
        (root.mul(&sn).mul(&sn), neg(&(hn * hn))),
        (root.mul(&sn1).mul(&sn1), neg(&(hn1 * hn1))),
        (d.scale.clone(), d.exact_part.clone()),
    ];
    let second = [
        (sn.mul(&sn1), &hn.derivative() * hn1),
        (root.mul(&sn).mul(&sn), neg(&(hn * hn))),
        (d.scale.clone(), d.exact_part.clone()),
    ];
    (surd_combination_is_zero(&first), surd_combination_is_zero(&second))
}

/// `r_{m,n}(z) = −(8(z² + 1 − √((ν+1)/2) (2h_ν² + h_{ν+1}²)/d_ν) + 2n)`,
/// exactly as displayed.
pub fn r_mn<T: Real>(nu: usize, n: usize, z: &Complex<T>) -> Result<Complex<T>> {
    let seq = hermite_sequence(nu + 1);
    let d = dnu(nu);
    let dv = d.exact_part.eval_extended(z, T::BITS);
    if dv.contains_zero() {
        return Err(Error::PoleOfDnu);
    }
    let dz = dv.value::<T>().scale(&d.scale.eval());
    let hn = seq[nu].eval_complex(z).scale(&orthonormal_scale(nu).eval());
    let hn1 = seq[nu + 1].eval_complex(z).scale(&orthonormal_scale(nu + 1).eval());
    let c = (T::from_i64(nu as i64 + 1) / T::from_i64(2)).sqrt();
    let frac = (hn.sqr().scale(&T::from_i64(2)) + hn1.sqr()) / dz;
    let inner = z.sqr() + Complex::one() - frac.scale(&c);
    Ok(-(inner.scale(&T::from_i64(8)) + Complex::from_real(T::from_i64(2 * n as i64))))
}

/// One exceptional block compared with `r_{m,n}` at its zero.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RmnRow {
    pub k: usize,
    pub h11: f64,
    pub h12: f64,
    pub re_r: f64,
    pub im_r: f64,
    /// `|h11 − Re r| / |h11|`
    pub rel_dev_re: f64,
    /// `|h12 − Im r| / max(|h12|, 10⁻³⁰⁰)`
    pub rel_dev_im: f64,
}

pub fn r_mn_crosscheck_rows<T: Real>(pl: &Pipeline<T>, h: &PartitionedHessian) -> Result<Vec<RmnRow>> {
    let nu = pl.lambda.parts().first().copied().unwrap_or(0) as usize;
    pl.zeros
        .exceptional
        .iter()
        .enumerate()
        .map(|(k, z)| {
            let r = r_mn(nu, pl.n, z)?.to_f64();
            let (h11, h12) = (h.entries[(2 * k, 2 * k)], h.entries[(2 * k, 2 * k + 1)]);
            Ok(RmnRow {
                k,
                h11,
                h12,
                re_r: r.re,
                im_r: r.im,
                rel_dev_re: (h11 - r.re).abs() / h11.abs(),
                rel_dev_im: (h12 - r.im).abs() / h12.abs().max(1e-300),
            })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SaddleVerdict {
    pub nu: usize,
    pub n: usize,
    pub scaling: ScalingSearch,
    /// (i) `Ĥ` strictly block diagonally dominant for the found `K`.
    pub dominant: bool,
    pub dominance: Option<Dominance>,
    /// (ii) `max_i h_{2m+i,2m+i}`; negative passes.
    pub max_regular_diagonal: f64,
    pub regular_negative: bool,
    /// (iii) `max_l h_{2l−1,2l−1}`; negative passes, with `h_{2l,2l} = −h_{2l−1,2l−1}`.
    pub max_exceptional_diagonal: f64,
    pub exceptional_negative: bool,
    pub trace_zero: bool,
}

impl SaddleVerdict {
    pub fn pass(&self) -> bool {
        self.dominant && self.regular_negative && self.exceptional_negative && self.trace_zero
    }
}

pub fn saddle_check_pipeline<T: Real>(pl: &Pipeline<T>) -> Result<(SaddleVerdict, PartitionedHessian)> {
    pl.lambda.require_even()?;
    let nu = pl.lambda.parts().first().copied().unwrap_or(0) as usize;
    let cfg = Configuration::from_zero_set(&pl.zeros);
    let exact = hessian(&cfg, &pl.hw)?;
    let m = pl.m();
    let trace_zero = (0..m).all(|k| exact[(2 * k, 2 * k)] == -exact[(2 * k + 1, 2 * k + 1)].clone());
    let h = PartitionedHessian::new(&exact, m, pl.n)?;
    let scaling = find_scaling_k(&h);
    let dominance = match scaling.k {
        Some(k) => Some(is_strictly_block_diagonally_dominant(&scaled_hessian(&h, k).entries, &h.partition())?),
        None => None,
    };
    let max_regular_diagonal = (0..pl.n).map(|i| h.entries[(2 * m + i, 2 * m + i)]).fold(f64::NEG_INFINITY, f64::max);
    let max_exceptional_diagonal = (0..m).map(|k| h.entries[(2 * k, 2 * k)]).fold(f64::NEG_INFINITY, f64::max);
    let verdict = SaddleVerdict {
        nu,
        n: pl.n,
        dominant: dominance.as_ref().is_some_and(|d| d.dominant),
        dominance,
        scaling,
        max_regular_diagonal,
        regular_negative: max_regular_diagonal < 0.0,
        max_exceptional_diagonal,
        exceptional_negative: max_exceptional_diagonal < 0.0,
        trace_zero,
    };
    Ok((verdict, h))
}

pub fn saddle_check<T: Real>(nu: usize, n: usize, precision_bits: usize) -> Result<SaddleVerdict> {
    let pl = Pipeline::<T>::build(&Partition::double(nu as u32), n, precision_bits)?;
    Ok(saddle_check_pipeline(&pl)?.0)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DistanceRow {
    pub n: usize,
    pub min_dist: f64,
    pub max_dist: f64,
    /// `min_dist · √n · ln n`
    pub lower_const: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DistanceFit {
    pub nu: usize,
    pub rows: Vec<DistanceRow>,
    /// Fit of `max_dist` against `n`.
    pub upper: PowerLawFit,
    /// Fit of `lower_const` against `n`; a nonnegative exponent means the
    /// constants do not decay.
    pub lower: PowerLawFit,
    pub upper_slope_ok: bool,
    pub lower_bound_ok: bool,
}

/// Slope window for the `c/√n` law.
pub const UPPER_SLOPE_WINDOW: (f64, f64) = (-0.65, -0.35);

pub fn distance_rows<T: Real>(pipelines: &[Pipeline<T>]) -> Result<Vec<DistanceRow>> {
    pipelines
        .iter()
        .map(|pl| {
            let dev = exceptional_deviation(&pl.zeros, &pl.hw)?;
            let ds: Vec<f64> = dev.iter().map(|(_, d)| d.to_f64()).collect();
            let min_dist = ds.iter().copied().fold(f64::INFINITY, f64::min);
            let max_dist = ds.iter().copied().fold(0.0, f64::max);
            let nf = pl.n as f64;
            Ok(DistanceRow { n: pl.n, min_dist, max_dist, lower_const: min_dist * nf.sqrt() * nf.ln() })
        })
        .collect()
}

pub fn distance_bound_fit<T: Real>(nu: usize, n_grid: &[usize], precision_bits: usize) -> Result<DistanceFit> {
    let lam = Partition::double(nu as u32);
    let pls = n_grid.iter().map(|&n| Pipeline::<T>::build(&lam, n, precision_bits)).collect::<Result<Vec<_>>>()?;
    distance_fit_from_rows(nu, distance_rows(&pls)?)
}

pub fn distance_fit_from_rows(nu: usize, rows: Vec<DistanceRow>) -> Result<DistanceFit> {
    let upper = power_law_fit(&rows.iter().map(|r| (r.n as f64, r.max_dist)).collect::<Vec<_>>(), 2)?;
    let lower = power_law_fit(&rows.iter().map(|r| (r.n as f64, r.lower_const)).collect::<Vec<_>>(), 2)?;
    let upper_slope_ok = upper.exponent >= UPPER_SLOPE_WINDOW.0 && upper.exponent <= UPPER_SLOPE_WINDOW.1;
    let lower_bound_ok = rows.iter().all(|r| r.lower_const > 0.0) && lower.exponent >= 0.0;
    Ok(DistanceFit { nu, rows, upper, lower, upper_slope_ok, lower_bound_ok })
}
