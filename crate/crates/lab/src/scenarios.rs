//! Per-`n` scenario evaluation. Each scenario fills one section of an
//! [`NReport`]; a failing scenario records its error and the others that
//! do not depend on it still run.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use xhermite_core::dnu::{dnu, dnu_ode_check, r_mn_crosscheck_rows, product_identities_check, saddle_check_pipeline, RmnRow, SaddleVerdict};
use xhermite_core::energy::{
    complex_log_energy, find_scaling_k, gradient, hessian, log_energy, scaled_hessian, Configuration, PartitionedHessian, ScalingSearch,
};
use xhermite_core::gersgorin::{inv_block_norm_reciprocal, localization_report, GersgorinReport};
use xhermite_core::hermite::{exceptional_eigen_constant, exceptional_hermite, exceptional_ode_residual, generalized_hermite};
use xhermite_core::linalg::Matrix;
use xhermite_core::optimality::{
    is_approximating, m1n_derivative, qn_ode_residual, qn_ode_residual_with_constant, verify_unique_maximum, ApproxVerdict, MaximumVerdict, WeightSpec,
};
use xhermite_core::zeros::{
    classical_hermite_zeros, exceptional_deviation, interlacing_report, inverse_distance_scan, km_identity_residual, InterlacingReport, Pipeline,
    MATCHING_RATIO,
};
use xhermite_core::{Complex, ExactPoly, Partition, Real, Result};

use crate::config::Scenario;
use crate::semicircle::{semicircle_report, SemicircleReport};
use crate::tolerances::Tolerances;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConstructSection {
    pub degree: usize,
    pub h: ExactPoly,
    pub p: ExactPoly,
    pub eigen_constant: i64,
    /// The cleared equation with `eigen_constant` is the zero polynomial.
    pub ode_exact: bool,
    /// `2·degree − |λ|`, the form that does not hold for nonempty `λ`.
    pub alternative_constant: i64,
    pub alternative_exact: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ZeroRow {
    pub kind: String,
    pub re: f64,
    pub im: f64,
    /// Newton step `|P/P′|` at the zero.
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ZerosSection {
    pub max_residual: f64,
    pub zeros: Vec<ZeroRow>,
    pub matching_ratio: f64,
    /// `|z_k − w_k|` in exceptional-zero order.
    pub deviation: Vec<f64>,
    pub km_relative: Vec<f64>,
    pub km_max_relative: Option<f64>,
    pub interlacing: InterlacingReport,
    /// `Σ 1/(x_i² + 1)`.
    pub inverse_distance_scan: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HessianSection {
    pub dim: usize,
    pub block_sizes: Vec<usize>,
    pub gradient_max: f64,
    pub energy: f64,
    pub energy_complex: (f64, f64),
    pub energy_identity_rel: f64,
    pub fd_step: f64,
    /// `max |h − fd| / max(|h|, 10⁻⁸ max|H|)` over all entries.
    pub fd_max_rel_dev: f64,
    pub trace_zero_exact: bool,
    pub symmetric_exact: bool,
    pub min_entry: f64,
    pub max_entry: f64,
    /// `‖A_kk⁻¹‖⁻¹` per exceptional block.
    pub inv_block_norm_reciprocal: Vec<f64>,
    /// `Σ_{J≠k} ‖A_kJ‖` per exceptional block row, unscaled.
    pub exceptional_off_row_sums: Vec<f64>,
    #[serde(skip)]
    pub matrix: Option<Matrix<f64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GersgorinSection {
    pub scaling: ScalingSearch,
    /// `K` used for the report: the one found, or 1.
    pub k_used: f64,
    pub report: GersgorinReport,
    pub all_contained: bool,
    pub g_r_negative: bool,
    pub max_abs_g_r: f64,
    pub g_e_band: f64,
    pub min_abs_eigenvalue: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DnuSection {
    pub nu: usize,
    pub even: bool,
    pub positive: bool,
    pub squarefree: bool,
    pub hermite_ratio: Option<String>,
    pub cd_max_rel_dev: f64,
    pub ode_exact: bool,
    pub product_identities: (bool, bool),
    pub r_mn: Vec<RmnRow>,
    pub r_mn_max_rel_dev: f64,
    pub saddle: SaddleVerdict,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OptimalitySection {
    pub approximating: ApproxVerdict,
    /// `(x, M₁′(x))` on 400 points of `[−10, 10]`.
    pub m1n_grid: Vec<(f64, f64)>,
    pub m1n_max: f64,
    pub maximum: MaximumVerdict,
    pub qn_points: usize,
    pub qn_max_residual: f64,
    /// Same points with constant `2n − m`.
    pub qn_alternative_min_residual: f64,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct NReport {
    pub n: usize,
    pub degree: usize,
    pub construct: Option<ConstructSection>,
    pub zeros: Option<ZerosSection>,
    pub hessian: Option<HessianSection>,
    pub gersgorin: Option<GersgorinSection>,
    pub dnu: Option<DnuSection>,
    pub optimality: Option<OptimalitySection>,
    pub semicircle: Option<SemicircleReport>,
    pub errors: BTreeMap<String, String>,
    /// Regular zeros, kept for sweep-level computations.
    #[serde(skip)]
    pub regular: Vec<f64>,
}

pub const PERTURBATION_TRIALS: usize = 1000;
pub const QN_POINTS: usize = 50;
pub const M1N_GRID: usize = 400;

fn construct(lambda: &Partition, degree: usize) -> Result<ConstructSection> {
    let h = generalized_hermite(lambda)?;
    let p = exceptional_hermite(lambda, degree)?;
    let eigen_constant = exceptional_eigen_constant(lambda, degree);
    let alternative_constant = 2 * degree as i64 - lambda.size() as i64;
    Ok(ConstructSection {
        degree,
        ode_exact: exceptional_ode_residual(&h, &p, eigen_constant).is_zero(),
        alternative_exact: exceptional_ode_residual(&h, &p, alternative_constant).is_zero(),
        h,
        p,
        eigen_constant,
        alternative_constant,
    })
}

fn newton_residual<T: Real>(p: &ExactPoly, dp: &ExactPoly, z: &Complex<T>) -> f64 {
    let d = dp.eval_complex(z);
    if d.norm_sqr().is_zero() {
        return f64::INFINITY;
    }
    (p.eval_complex(z) / d).abs().to_f64()
}

fn zeros<T: Real>(pl: &Pipeline<T>) -> Result<ZerosSection> {
    let dp = pl.p.derivative();
    let mut rows: Vec<ZeroRow> = pl
        .zeros
        .exceptional
        .iter()
        .map(|z| ZeroRow { kind: "exceptional".into(), re: z.re.to_f64(), im: z.im.to_f64(), residual: newton_residual(&pl.p, &dp, z) })
        .collect();
    rows.extend(pl.zeros.regular.iter().map(|x| ZeroRow {
        kind: "regular".into(),
        re: x.to_f64(),
        im: 0.0,
        residual: newton_residual(&pl.p, &dp, &Complex::from_real(x.clone())),
    }));
    let deviation = exceptional_deviation(&pl.zeros, &pl.hw)?.into_iter().map(|(_, d)| d.to_f64()).collect();
    let km_relative: Vec<f64> = km_identity_residual(&pl.zeros, &pl.hw)?.iter().map(|r| r.relative.to_f64()).collect();
    let classical = classical_hermite_zeros::<T>(pl.m() + pl.n, pl.precision_bits);
    Ok(ZerosSection {
        max_residual: pl.max_residual,
        zeros: rows,
        matching_ratio: MATCHING_RATIO,
        deviation,
        km_max_relative: km_relative.iter().copied().reduce(f64::max),
        km_relative,
        interlacing: interlacing_report(&pl.zeros.regular, &classical, pl.lambda.len()),
        inverse_distance_scan: inverse_distance_scan(&T::zero(), &T::one(), &pl.zeros.regular)?.to_f64(),
    })
}

fn hessian_section<T: Real>(pl: &Pipeline<T>, tol: &Tolerances) -> Result<(HessianSection, PartitionedHessian)> {
    let cfg = Configuration::from_zero_set(&pl.zeros);
    let m = pl.m();
    let g = gradient(&cfg, &pl.hw)?;
    let f = log_energy(&cfg, &pl.hw)?;
    let fc = complex_log_energy(&cfg, &pl.h)?;
    let exact = hessian(&cfg, &pl.hw)?;
    let dim = cfg.dim();

    let step = T::from_f64(tol.fd_step);
    let v = cfg.to_vec();
    let h64 = exact.to_f64();
    let floor = 1e-8 * h64.max_abs();
    let mut fd_max = 0.0f64;
    for j in 0..dim {
        let (mut p, mut q) = (v.clone(), v.clone());
        p[j] = p[j].clone() + step.clone();
        q[j] = q[j].clone() - step.clone();
        let gp = gradient(&Configuration::from_vec(&p, m), &pl.hw)?;
        let gq = gradient(&Configuration::from_vec(&q, m), &pl.hw)?;
        for i in 0..dim {
            let fd = ((gp[i].clone() - gq[i].clone()) / (step.clone() * T::from_i64(2))).to_f64();
            fd_max = fd_max.max((h64[(i, j)] - fd).abs() / h64[(i, j)].abs().max(floor));
        }
    }

    let ph = PartitionedHessian::new(&exact, m, pl.n)?;
    let part = ph.partition();
    let norms = xhermite_core::gersgorin::block_norms(&ph.entries, &part)?;
    let nb = part.len();
    let mut inv = Vec::with_capacity(m);
    let mut off = Vec::with_capacity(m);
    for k in 0..m {
        inv.push(inv_block_norm_reciprocal(&part.block(&ph.entries, k, k))?);
        off.push((0..nb).filter(|&j| j != k).map(|j| norms[(k, j)]).sum());
    }
    let f64f = f.to_f64();
    let sec = HessianSection {
        dim,
        block_sizes: part.sizes().to_vec(),
        gradient_max: g.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max),
        energy: f64f,
        energy_complex: (fc.re.to_f64(), fc.im.to_f64()),
        energy_identity_rel: ((f - fc.re.clone()).abs() / fc.re.abs().max_of(T::one())).to_f64(),
        fd_step: tol.fd_step,
        fd_max_rel_dev: fd_max,
        trace_zero_exact: (0..m).all(|k| exact[(2 * k, 2 * k)] == -exact[(2 * k + 1, 2 * k + 1)].clone()),
        symmetric_exact: (0..dim).all(|i| (0..i).all(|j| exact[(i, j)] == exact[(j, i)])),
        min_entry: h64.row_major().iter().copied().fold(f64::INFINITY, f64::min),
        max_entry: h64.row_major().iter().copied().fold(f64::NEG_INFINITY, f64::max),
        inv_block_norm_reciprocal: inv,
        exceptional_off_row_sums: off,
        matrix: Some(h64),
    };
    Ok((sec, ph))
}

fn gersgorin_section(h: &PartitionedHessian) -> Result<GersgorinSection> {
    let scaling = find_scaling_k(h);
    let k_used = scaling.k.unwrap_or(1.0);
    let report = localization_report(&scaled_hessian(h, k_used))?;
    Ok(GersgorinSection {
        scaling,
        k_used,
        all_contained: report.all_contained(),
        g_r_negative: report.g_r_negative(),
        max_abs_g_r: report.max_abs_g_r(),
        g_e_band: report.g_e_band(),
        min_abs_eigenvalue: report.min_abs_eigenvalue(),
        report,
    })
}

/// `Some(ν)` when `λ = (ν, ν)`.
pub fn double_part(lambda: &Partition) -> Option<usize> {
    match lambda.parts() {
        [a, b] if a == b => Some(*a as usize),
        _ => None,
    }
}

fn dnu_section<T: Real>(pl: &Pipeline<T>) -> Result<DnuSection> {
    let nu = double_part(&pl.lambda)
        .ok_or_else(|| xhermite_core::Error::InvalidArgument(format!("partition {:?} is not of the form (ν, ν)", pl.lambda.parts())))?;
    let d = dnu(nu);
    let (saddle, h) = saddle_check_pipeline(pl)?;
    let r_mn = r_mn_crosscheck_rows(pl, &h)?;
    Ok(DnuSection {
        nu,
        even: d.even,
        positive: d.positive,
        squarefree: d.squarefree,
        hermite_ratio: d.hermite_ratio.map(|r| r.to_string()),
        cd_max_rel_dev: d.cd_max_rel_dev,
        ode_exact: dnu_ode_check(nu),
        product_identities: product_identities_check(nu),
        r_mn_max_rel_dev: r_mn.iter().map(|r| r.rel_dev_re.max(r.rel_dev_im)).fold(0.0, f64::max),
        r_mn,
        saddle,
    })
}

fn optimality_section<T: Real>(pl: &Pipeline<T>, seed: u64) -> Result<OptimalitySection> {
    let ws = WeightSpec::modified_w1(pl);
    let approximating = is_approximating(&ws, (None, None), M1N_GRID)?;
    let m1n_grid = (0..M1N_GRID)
        .map(|i| {
            let x = -10.0 + 20.0 * i as f64 / (M1N_GRID - 1) as f64;
            Ok((x, m1n_derivative(&ws, &T::from_f64(x))?.to_f64()))
        })
        .collect::<Result<Vec<_>>>()?;
    let maximum = verify_unique_maximum(&ws, &pl.zeros.regular, PERTURBATION_TRIALS, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let span = pl.zeros.regular.last().map(|x| x.to_f64()).unwrap_or(1.0);
    let (mut qmax, mut qalt) = (0.0f64, f64::INFINITY);
    let alt = 2 * pl.n as i64 - pl.m() as i64;
    for _ in 0..QN_POINTS {
        let x = T::from_f64(rng.gen_range(-span..span));
        qmax = qmax.max(qn_ode_residual(pl, &x)?.to_f64());
        qalt = qalt.min(qn_ode_residual_with_constant(pl, &x, alt)?.to_f64());
    }
    Ok(OptimalitySection {
        approximating,
        m1n_max: m1n_grid.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max),
        m1n_grid,
        maximum,
        qn_points: QN_POINTS,
        qn_max_residual: qmax,
        qn_alternative_min_residual: qalt,
    })
}

fn record<S>(errors: &mut BTreeMap<String, String>, s: Scenario, r: Result<S>) -> Option<S> {
    r.map_err(|e| errors.insert(s.name().into(), e.to_string())).ok()
}

/// Evaluates the requested scenarios for one `n`.
pub fn evaluate_n<T: Real>(lambda: &Partition, n: usize, bits: usize, want: &BTreeSet<Scenario>, tol: &Tolerances, seed: u64) -> NReport {
    let degree = lambda.size() + n;
    let mut rep = NReport { n, degree, ..NReport::default() };
    let mut errors = BTreeMap::new();
    if want.contains(&Scenario::Construct) {
        rep.construct = record(&mut errors, Scenario::Construct, construct(lambda, degree));
    }
    if want.contains(&Scenario::Zeros) {
        let pl = record(&mut errors, Scenario::Zeros, Pipeline::<T>::build(lambda, n, bits));
        if let Some(pl) = pl {
            rep.regular = pl.zeros.regular.iter().map(Real::to_f64).collect();
            rep.zeros = record(&mut errors, Scenario::Zeros, zeros(&pl));
            if want.contains(&Scenario::Hessian) {
                if let Some((sec, ph)) = record(&mut errors, Scenario::Hessian, hessian_section(&pl, tol)) {
                    rep.hessian = Some(sec);
                    if want.contains(&Scenario::Gersgorin) {
                        rep.gersgorin = record(&mut errors, Scenario::Gersgorin, gersgorin_section(&ph));
                    }
                }
            }
            if want.contains(&Scenario::Dnu) {
                rep.dnu = record(&mut errors, Scenario::Dnu, dnu_section(&pl));
            }
            if want.contains(&Scenario::Optimality) {
                rep.optimality = record(&mut errors, Scenario::Optimality, optimality_section(&pl, seed));
            }
            if want.contains(&Scenario::Semicircle) {
                rep.semicircle = Some(semicircle_report(&pl.zeros.regular, n, lambda.size()));
            }
        }
    }
    rep.errors = errors;
    rep
}
