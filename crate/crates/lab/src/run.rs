//! Orchestration: per-`n` evaluation in parallel, then sweep-level fits,
//! the summary of verdicts, and the report bundle.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use xhermite_core::dnu::{distance_fit_from_rows, DistanceFit, DistanceRow};
use xhermite_core::fit::PowerLawFit;
use xhermite_core::{Mp, Partition, Real};

use crate::config::{Scenario, ScenarioConfig, Validated};
use crate::fits::{asymptotic_fit, Model};
use crate::quadrature::{default_pairs, default_quad_points, orthogonality_check, OrthogonalityRow};
use crate::report::{num, opt, BundleWriter};
use crate::scenarios::{double_part, evaluate_n, NReport};
use crate::tolerances::Tolerances;

/// Runs `$f::<Mp<tier>>(args…)` for a validated precision tier.
macro_rules! at_tier {
    ($bits:expr, $f:ident($($a:expr),* $(,)?)) => {
        match $bits {
            128 => $f::<Mp<128>>($($a),*),
            192 => $f::<Mp<192>>($($a),*),
            256 => $f::<Mp<256>>($($a),*),
            384 => $f::<Mp<384>>($($a),*),
            _ => $f::<Mp<512>>($($a),*),
        }
    };
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub max_abs_g_r: Option<f64>,
    pub g_e_band: Option<f64>,
    pub inv_block_min: Option<f64>,
    pub off_row_max: Option<f64>,
    pub inverse_distance_scan: Option<f64>,
    pub min_dist: Option<f64>,
    pub max_dist: Option<f64>,
    pub ks_distance: Option<f64>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SweepSection {
    pub rows: Vec<SweepRow>,
    pub fits: BTreeMap<String, PowerLawFit>,
    pub distance: Option<DistanceFit>,
    pub ks_non_increasing: Option<bool>,
    pub orthogonality: Vec<OrthogonalityRow>,
    pub errors: BTreeMap<String, String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Report,
    Skipped,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Claim {
    pub id: String,
    pub claim: String,
    pub verdict: Verdict,
    pub tolerance: String,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Summary {
    pub partition: Vec<u32>,
    pub n_values: Vec<usize>,
    pub precision_bits: usize,
    pub seed: u64,
    pub claims: Vec<Claim>,
    /// `n → scenario → error` for scenarios that did not complete.
    pub errors: BTreeMap<usize, BTreeMap<String, String>>,
}

pub struct Bundle {
    pub config: Validated,
    pub per_n: Vec<NReport>,
    pub sweep: Option<SweepSection>,
    pub summary: Summary,
    pub files: Vec<String>,
}

fn fit_series(sec: &mut SweepSection, name: &str, series: Vec<(f64, f64)>) {
    match asymptotic_fit(&series, Model::PowerLaw) {
        Ok(f) => {
            sec.fits.insert(name.into(), f);
        }
        Err(e) => {
            sec.errors.insert(name.into(), e.to_string());
        }
    }
}

fn orthogonality_rows<T: Real>(lambda: &Partition, bits: usize) -> xhermite_core::Result<Vec<OrthogonalityRow>> {
    default_pairs(lambda)
        .into_par_iter()
        .map(|(a, b)| orthogonality_check::<T>(lambda, a, b, default_quad_points(a, b), bits))
        .collect()
}

fn sweep(cfg: &Validated, per_n: &[NReport]) -> SweepSection {
    let mut sec = SweepSection::default();
    for r in per_n {
        let g = r.gersgorin.as_ref();
        let h = r.hessian.as_ref();
        let z = r.zeros.as_ref();
        sec.rows.push(SweepRow {
            n: r.n,
            max_abs_g_r: g.map(|g| g.max_abs_g_r),
            g_e_band: g.map(|g| g.g_e_band),
            inv_block_min: h.and_then(|h| h.inv_block_norm_reciprocal.iter().copied().reduce(f64::min)),
            off_row_max: h.and_then(|h| h.exceptional_off_row_sums.iter().copied().reduce(f64::max)),
            inverse_distance_scan: z.map(|z| z.inverse_distance_scan),
            min_dist: z.and_then(|z| z.deviation.iter().copied().reduce(f64::min)),
            max_dist: z.and_then(|z| z.deviation.iter().copied().reduce(f64::max)),
            ks_distance: r.semicircle.as_ref().map(|s| s.ks_distance),
        });
    }
    let series = |f: fn(&SweepRow) -> Option<f64>| -> Vec<(f64, f64)> {
        sec.rows.iter().filter_map(|r| f(r).map(|v| (r.n as f64, v.abs()))).collect()
    };
    let all = [
        ("max_abs_g_r", series(|r| r.max_abs_g_r)),
        ("g_e_band", series(|r| r.g_e_band)),
        ("inv_block_min", series(|r| r.inv_block_min)),
        ("off_row_max", series(|r| r.off_row_max)),
        ("inverse_distance_scan", series(|r| r.inverse_distance_scan)),
    ];
    for (name, s) in all {
        if !s.is_empty() {
            fit_series(&mut sec, name, s);
        }
    }
    if let Some(nu) = double_part(&cfg.lambda) {
        let rows: Vec<DistanceRow> = sec
            .rows
            .iter()
            .filter_map(|r| {
                let (lo, hi) = (r.min_dist?, r.max_dist?);
                let nf = r.n as f64;
                Some(DistanceRow { n: r.n, min_dist: lo, max_dist: hi, lower_const: lo * nf.sqrt() * nf.ln() })
            })
            .collect();
        match distance_fit_from_rows(nu, rows) {
            Ok(d) => sec.distance = Some(d),
            Err(e) => {
                sec.errors.insert("distance".into(), e.to_string());
            }
        }
    }
    let ks: Vec<f64> = sec.rows.iter().filter_map(|r| r.ks_distance).collect();
    if ks.len() >= 2 {
        sec.ks_non_increasing = Some(ks.windows(2).all(|w| w[1] <= w[0]));
    }
    match at_tier!(cfg.precision_bits, orthogonality_rows(&cfg.lambda, cfg.precision_bits)) {
        Ok(rows) => sec.orthogonality = rows,
        Err(e) => {
            sec.errors.insert("orthogonality".into(), e.to_string());
        }
    }
    sec
}

/// Aggregates a per-`n` predicate: `None` entries were not evaluated.
fn over_n(id: &str, claim: &str, tolerance: String, per_n: &[NReport], f: impl Fn(&NReport) -> Option<(bool, String)>) -> Claim {
    let mut evaluated = 0;
    let mut failed = Vec::new();
    let mut details = Vec::new();
    for r in per_n {
        if let Some((ok, d)) = f(r) {
            evaluated += 1;
            if !ok {
                failed.push(r.n);
            }
            details.push(format!("n={}: {d}", r.n));
        }
    }
    let verdict = if evaluated == 0 {
        Verdict::Skipped
    } else if failed.is_empty() {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    let head = if failed.is_empty() { format!("{evaluated} evaluated") } else { format!("{evaluated} evaluated, failing n = {failed:?}") };
    Claim { id: id.into(), claim: claim.into(), verdict, tolerance, detail: format!("{head}; {}", details.join("; ")) }
}

fn single(id: &str, claim: &str, tolerance: String, v: Option<(bool, String)>) -> Claim {
    let (verdict, detail) = match v {
        None => (Verdict::Skipped, "not evaluated".to_string()),
        Some((ok, d)) => (if ok { Verdict::Pass } else { Verdict::Fail }, d),
    };
    Claim { id: id.into(), claim: claim.into(), verdict, tolerance, detail }
}

fn in_window(x: f64, lo: f64, hi: f64) -> bool {
    x >= lo && x <= hi
}

fn claims(cfg: &Validated, per_n: &[NReport], sweep: Option<&SweepSection>) -> Vec<Claim> {
    let t: &Tolerances = &cfg.tolerances;
    let has = |s: Scenario| cfg.scenarios.contains(&s);
    let mut out = Vec::new();
    if has(Scenario::Construct) {
        out.push(over_n("exceptional_ode", "P_n solves the exceptional Hermite equation with constant 2n−2|λ|", "exact".into(), per_n, |r| {
            r.construct.as_ref().map(|c| (c.ode_exact, format!("constant {}", c.eigen_constant)))
        }));
    }
    if has(Scenario::Zeros) {
        out.push(over_n("interlacing", "regular zeros occupy at least n − r gaps of the classical zeros", "count ≥ n − r".into(), per_n, |r| {
            r.zeros.as_ref().map(|z| (z.interlacing.pass, format!("{}/{}", z.interlacing.occupied, z.interlacing.required)))
        }));
        out.push(over_n(
            "km_identity",
            "exceptional zeros satisfy the identity linking 1/(w_k − z_k) to the other zeros",
            format!("relative ≤ {:e}", t.km_identity_rel),
            per_n,
            |r| r.zeros.as_ref().and_then(|z| z.km_max_relative).map(|v| (v <= t.km_identity_rel, format!("{v:e}"))),
        ));
    }
    if has(Scenario::Hessian) {
        out.push(over_n(
            "stationarity",
            "all first partial derivatives of F vanish at the zeros",
            format!("max |∂F| ≤ {:e}·max(1, n)", t.stationarity),
            per_n,
            |r| r.hessian.as_ref().map(|h| (h.gradient_max <= t.stationarity * (r.n.max(1) as f64), format!("{:e}", h.gradient_max))),
        ));
        out.push(over_n("energy_identity", "F = Re F_c", format!("relative ≤ {:e}", t.energy_identity_rel), per_n, |r| {
            r.hessian.as_ref().map(|h| (h.energy_identity_rel <= t.energy_identity_rel, format!("{:e}", h.energy_identity_rel)))
        }));
        out.push(over_n(
            "hessian_entries",
            "assembled Hessian matches finite differences; exceptional blocks are trace-zero",
            format!("relative ≤ {:e}, step {:e}; trace exact", t.hessian_fd_rel, t.fd_step),
            per_n,
            |r| {
                r.hessian.as_ref().map(|h| (h.fd_max_rel_dev <= t.hessian_fd_rel && h.trace_zero_exact, format!("fd {:e}, trace-zero {}", h.fd_max_rel_dev, h.trace_zero_exact)))
            },
        ));
    }
    if has(Scenario::Gersgorin) {
        out.push(over_n(
            "nonsingular",
            "a diagonal scaling makes the Hessian strictly block diagonally dominant, hence nonsingular",
            "margins > 0 and min |eigenvalue| > 0".into(),
            per_n,
            |r| {
                r.gersgorin.as_ref().map(|g| {
                    let margin = g.scaling.dominance.as_ref().map(|d| d.min_margin());
                    let ok = g.scaling.k.is_some() && margin.is_some_and(|m| m > 0.0) && g.min_abs_eigenvalue > 0.0;
                    (ok, format!("K {:?}, min margin {:?}, min |eig| {:e}", g.scaling.k, margin, g.min_abs_eigenvalue))
                })
            },
        ));
        out.push(over_n("localization", "eigenvalues lie in G_r ∪ G_e and G_r ⊂ (−∞, 0)", "containment slack 1e-10·max|ĥ|".into(), per_n, |r| {
            r.gersgorin.as_ref().map(|g| (g.all_contained && g.g_r_negative, format!("contained {}, G_r negative {}", g.all_contained, g.g_r_negative)))
        }));
    }
    if has(Scenario::Dnu) {
        out.push(over_n(
            "dnu_identities",
            "d_ν: exact ODE, exact product identities, determinant and Christoffel–Darboux forms agree",
            format!("exact; CD relative ≤ {:e}", t.cd_agreement_rel),
            per_n,
            |r| {
                r.dnu.as_ref().map(|d| {
                    let ok = d.ode_exact && d.product_identities.0 && d.product_identities.1 && d.cd_max_rel_dev <= t.cd_agreement_rel;
                    (ok, format!("ode {}, products {:?}, cd {:e}", d.ode_exact, d.product_identities, d.cd_max_rel_dev))
                })
            },
        ));
        out.push(over_n("saddle", "block dominance, negative regular diagonal, trace-zero negative exceptional diagonal", "strict".into(), per_n, |r| {
            r.dnu.as_ref().map(|d| {
                let s = &d.saddle;
                (s.pass(), format!("dominant {}, regular {}, exceptional {}", s.dominant, s.regular_negative, s.exceptional_negative))
            })
        }));
        out.push(over_n(
            "r_mn_crosscheck",
            "exceptional Hessian diagonal equals Re r_{m,n}, off-diagonal equals Im r_{m,n}",
            format!("relative ≤ {:e}", t.r_mn_rel),
            per_n,
            |r| r.dnu.as_ref().map(|d| (d.r_mn_max_rel_dev <= t.r_mn_rel, format!("{:e}", d.r_mn_max_rel_dev))),
        ));
    }
    if has(Scenario::Optimality) {
        out.push(over_n(
            "unique_maximum",
            "regular zeros are the strict maximizer of the w₁ energy and M₁′ < 0",
            format!("gradient ≤ {:e}; max eigenvalue < 0; perturbations strictly lower; M₁′ < 0 on 400 points", t.reduced_stationarity),
            per_n,
            |r| {
                r.optimality.as_ref().map(|o| {
                    let m = &o.maximum;
                    let ok = m.pass(t.reduced_stationarity) && o.m1n_max < 0.0;
                    (ok, format!("grad {:e}, max eig {:e}, failures {}/{}, max M₁′ {:e}", m.stationarity_max, m.hessian_max_eigenvalue, m.failures, m.trials, o.m1n_max))
                })
            },
        ));
        out.push(over_n("qn_ode", "q_n solves its equation with constant 2n", format!("normalized ≤ {:e}", t.qn_ode_rel), per_n, |r| {
            r.optimality.as_ref().map(|o| (o.qn_max_residual <= t.qn_ode_rel, format!("{:e}", o.qn_max_residual)))
        }));
    }
    if let Some(s) = sweep {
        let fit_claim = |id: &str, claim: &str, key: &str, lo: f64, hi: f64| {
            let tol = format!("exponent in [{lo}, {hi}]");
            single(id, claim, tol, s.fits.get(key).map(|f| (in_window(f.exponent, lo, hi), format!("exponent {:.4}, C {:.4}", f.exponent, f.constant))))
        };
        out.push(fit_claim("g_r_growth", "max |G_r| grows at most like n", "max_abs_g_r", f64::NEG_INFINITY, t.g_r_exponent_max));
        out.push(fit_claim("g_e_growth", "G_e band magnitude grows like n", "g_e_band", t.g_e_exponent_min, t.g_e_exponent_max));
        out.push(fit_claim("inv_block_growth", "‖A_kk⁻¹‖⁻¹ grows like n", "inv_block_min", t.inv_block_exponent_min, f64::INFINITY));
        out.push(fit_claim("off_row_growth", "off-diagonal block row sums are O(√n)", "off_row_max", f64::NEG_INFINITY, t.off_row_exponent_max));
        out.push(fit_claim("scan_growth", "Σ 1/((a − x_i)² + b²) grows like √n", "inverse_distance_scan", t.scan_exponent_min, t.scan_exponent_max));
        if let Some(d) = &s.distance {
            let tol = format!("slope in [{}, {}]; min·√n·ln n bounded below", t.distance_slope_min, t.distance_slope_max);
            let ok = in_window(d.upper.exponent, t.distance_slope_min, t.distance_slope_max) && d.lower_bound_ok;
            out.push(single("distance_laws", "c/(√n ln n) ≤ |z_k − w_k| ≤ C/√n", tol, Some((ok, format!("slope {:.4}, lower exponent {:.4}", d.upper.exponent, d.lower.exponent)))));
        }
        let orth = (!s.orthogonality.is_empty()).then(|| {
            let worst = s.orthogonality.iter().map(|r| r.normalized).fold(0.0, f64::max);
            (worst <= t.orthogonality, format!("max {:e} over {:?}", worst, s.orthogonality.iter().map(|r| (r.n1, r.n2)).collect::<Vec<_>>()))
        });
        out.push(single("orthogonality", "P_n are orthogonal for e^{−x²}/H²", format!("normalized ≤ {:e}", t.orthogonality), orth));
        if let Some(non_inc) = s.ks_non_increasing {
            let last = s.rows.iter().rev().find_map(|r| r.ks_distance).unwrap_or(f64::NAN);
            out.push(Claim {
                id: "semicircle".into(),
                claim: "scaled regular zeros approach the semicircle law (conjecture)".into(),
                verdict: Verdict::Report,
                tolerance: format!("reported: non-increasing KS, last < {}", t.semicircle_ks_max),
                detail: format!("non-increasing {non_inc}, last KS {last:.4}, scaling sqrt(2(m+n))"),
            });
        }
    }
    out
}

fn write_bundle(dir: &Path, cfg: &Validated, per_n: &[NReport], sweep: Option<&SweepSection>, summary: &Summary) -> anyhow::Result<Vec<String>> {
    let mut w = BundleWriter::create(dir)?;
    w.json("config.json", cfg)?;
    for r in per_n {
        let n = r.n;
        let err = |s: Scenario| serde_json::json!({ "n": n, "error": r.errors.get(s.name()) });
        let name = |s: Scenario, ext: &str| format!("{}_n{:03}.{}", s.name(), n, ext);
        if cfg.scenarios.contains(&Scenario::Construct) {
            match &r.construct {
                Some(c) => {
                    w.json(&name(Scenario::Construct, "json"), c)?;
                    let d = c.p.coeffs().len().max(c.h.coeffs().len());
                    w.csv(&name(Scenario::Construct, "csv"), &["power", "h", "p"], (0..d).map(|k| vec![k.to_string(), c.h.coeff(k).to_string(), c.p.coeff(k).to_string()]))?;
                }
                None => w.json(&name(Scenario::Construct, "json"), &err(Scenario::Construct))?,
            }
        }
        if cfg.scenarios.contains(&Scenario::Zeros) {
            match &r.zeros {
                Some(z) => {
                    w.json(&name(Scenario::Zeros, "json"), z)?;
                    w.csv(&name(Scenario::Zeros, "csv"), &["kind", "re", "im", "residual"], z.zeros.iter().map(|z| vec![z.kind.clone(), num(z.re), num(z.im), num(z.residual)]))?;
                }
                None => w.json(&name(Scenario::Zeros, "json"), &err(Scenario::Zeros))?,
            }
        }
        if cfg.scenarios.contains(&Scenario::Hessian) {
            match &r.hessian {
                Some(h) => {
                    w.json(&name(Scenario::Hessian, "json"), h)?;
                    if let Some(m) = &h.matrix {
                        let rows = (0..m.rows()).flat_map(|i| (0..m.cols()).map(move |j| (i, j))).map(|(i, j)| vec![i.to_string(), j.to_string(), num(m[(i, j)])]);
                        w.csv(&name(Scenario::Hessian, "csv"), &["i", "j", "value"], rows)?;
                    }
                }
                None => w.json(&name(Scenario::Hessian, "json"), &err(Scenario::Hessian))?,
            }
        }
        if cfg.scenarios.contains(&Scenario::Gersgorin) {
            match &r.gersgorin {
                Some(g) => {
                    w.json(&name(Scenario::Gersgorin, "json"), g)?;
                    let rep = &g.report;
                    let mut rows = Vec::new();
                    for (k, bands) in rep.g_e.iter().enumerate() {
                        rows.extend(bands.iter().map(|iv| vec!["G_e".into(), k.to_string(), num(iv.0), num(iv.1)]));
                    }
                    for (i, iv) in rep.g_r.iter().enumerate() {
                        rows.push(vec!["G_r".into(), (rep.g_e.len() + i).to_string(), num(iv.0), num(iv.1)]);
                    }
                    for (x, c) in rep.eigenvalues.iter().zip(&rep.containment) {
                        rows.push(vec!["eigenvalue".into(), c.map(|c| c.to_string()).unwrap_or_default(), num(*x), num(*x)]);
                    }
                    w.csv(&name(Scenario::Gersgorin, "csv"), &["set", "block", "lo", "hi"], rows)?;
                }
                None => w.json(&name(Scenario::Gersgorin, "json"), &err(Scenario::Gersgorin))?,
            }
        }
        if cfg.scenarios.contains(&Scenario::Dnu) {
            match &r.dnu {
                Some(d) => {
                    w.json(&name(Scenario::Dnu, "json"), d)?;
                    let rows = d.r_mn.iter().map(|l| vec![l.k.to_string(), num(l.h11), num(l.h12), num(l.re_r), num(l.im_r), num(l.rel_dev_re), num(l.rel_dev_im)]);
                    w.csv(&name(Scenario::Dnu, "csv"), &["k", "h11", "h12", "re_r", "im_r", "rel_dev_re", "rel_dev_im"], rows)?;
                }
                None => w.json(&name(Scenario::Dnu, "json"), &err(Scenario::Dnu))?,
            }
        }
        if cfg.scenarios.contains(&Scenario::Optimality) {
            match &r.optimality {
                Some(o) => {
                    w.json(&name(Scenario::Optimality, "json"), o)?;
                    w.csv(&name(Scenario::Optimality, "csv"), &["x", "m1n_derivative"], o.m1n_grid.iter().map(|(x, v)| vec![num(*x), num(*v)]))?;
                }
                None => w.json(&name(Scenario::Optimality, "json"), &err(Scenario::Optimality))?,
            }
        }
        if cfg.scenarios.contains(&Scenario::Semicircle) {
            match &r.semicircle {
                Some(s) => {
                    w.json(&name(Scenario::Semicircle, "json"), s)?;
                    w.csv(&name(Scenario::Semicircle, "csv"), &["t", "empirical_cdf", "semicircle_cdf"], s.points.iter().map(|p| vec![num(p.0), num(p.1), num(p.2)]))?;
                }
                None => w.json(&name(Scenario::Semicircle, "json"), &err(Scenario::Semicircle))?,
            }
        }
    }
    if let Some(s) = sweep {
        w.json("sweep.json", s)?;
        let header = ["n", "max_abs_g_r", "g_e_band", "inv_block_min", "off_row_max", "inverse_distance_scan", "min_dist", "max_dist", "ks_distance"];
        let rows = s.rows.iter().map(|r| {
            vec![
                r.n.to_string(),
                opt(r.max_abs_g_r),
                opt(r.g_e_band),
                opt(r.inv_block_min),
                opt(r.off_row_max),
                opt(r.inverse_distance_scan),
                opt(r.min_dist),
                opt(r.max_dist),
                opt(r.ks_distance),
            ]
        });
        w.csv("sweep.csv", &header, rows)?;
    }
    w.json("summary.json", summary)?;
    Ok(w.files().to_vec())
}

/// Evaluates a validated configuration without writing anything.
pub fn evaluate(cfg: &Validated) -> (Vec<NReport>, Option<SweepSection>, Summary) {
    let per_n: Vec<NReport> = cfg
        .n_values
        .par_iter()
        .map(|&n| at_tier!(cfg.precision_bits, evaluate_n(&cfg.lambda, n, cfg.precision_bits, &cfg.scenarios, &cfg.tolerances, cfg.seed)))
        .collect();
    let sweep = cfg.scenarios.contains(&Scenario::Sweep).then(|| sweep(cfg, &per_n));
    let summary = Summary {
        partition: cfg.lambda.parts().to_vec(),
        n_values: cfg.n_values.clone(),
        precision_bits: cfg.precision_bits,
        seed: cfg.seed,
        claims: claims(cfg, &per_n, sweep.as_ref()),
        errors: per_n.iter().filter(|r| !r.errors.is_empty()).map(|r| (r.n, r.errors.clone())).collect(),
    };
    (per_n, sweep, summary)
}

pub fn run(config: &ScenarioConfig) -> anyhow::Result<Bundle> {
    let cfg = config.validate()?;
    let (per_n, sweep, summary) = evaluate(&cfg);
    let files = write_bundle(&config.output_dir, &cfg, &per_n, sweep.as_ref(), &summary)?;
    Ok(Bundle { config: cfg, per_n, sweep, summary, files })
}
