//! Acceptance criteria 1–14, one line each. Runs as a plain binary so the
//! lines are always printed; exits non-zero if any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use xhermite_core::dnu::{dnu, dnu_ode_check, product_identities_check};
use xhermite_lab::config::{Scenario, ScenarioConfig, Validated};
use xhermite_lab::run::{evaluate, run, SweepSection};
use xhermite_lab::scenarios::NReport;

const PRECISION_BITS: usize = 192;
const SEED: u64 = 7;
const GRID_11: [usize; 5] = [20, 30, 40, 50, 60];
const GRID_22: [usize; 4] = [30, 40, 50, 60];
const SADDLE_GRID: [usize; 4] = [30, 40, 50, 60];

const STATIONARITY: f64 = 1e-8;
const HESSIAN_FD_REL: f64 = 1e-5;
const G_R_EXPONENT_MAX: f64 = 1.15;
const G_E_EXPONENT: (f64, f64) = (0.85, 1.15);
const INV_BLOCK_EXPONENT_MIN: f64 = 0.85;
const OFF_ROW_EXPONENT_MAX: f64 = 0.7;
const SCAN_EXPONENT: (f64, f64) = (0.3, 0.7);
const R_MN_REL: f64 = 1e-6;
const CD_REL: f64 = 1e-10;
const DNU_MAX: usize = 10;
const DISTANCE_SLOPE: (f64, f64) = (-0.65, -0.35);
const KM_REL: f64 = 1e-6;
const REDUCED_GRADIENT: f64 = 1e-8;
const TRIALS: usize = 1000;
const ORTHOGONALITY: f64 = 1e-8;
const KS_MAX: f64 = 0.15;

struct Run {
    per_n: Vec<NReport>,
    sweep: SweepSection,
}

fn config(partition: &[i64], n_values: &[usize], scenarios: &[Scenario], out: &Path) -> ScenarioConfig {
    ScenarioConfig {
        partition: partition.to_vec(),
        n_values: n_values.to_vec(),
        precision_bits: PRECISION_BITS,
        scenarios: scenarios.iter().copied().collect::<BTreeSet<_>>(),
        seed: SEED,
        output_dir: out.to_path_buf(),
        tolerances: BTreeMap::new(),
    }
}

fn evaluate_grid(partition: &[i64], grid: &[usize], scenarios: &[Scenario]) -> Run {
    let v: Validated = config(partition, grid, scenarios, Path::new("unused")).validate().expect("valid config");
    let (per_n, sweep, _) = evaluate(&v);
    Run { per_n, sweep: sweep.expect("sweep requested") }
}

fn at(run: &Run, n: usize) -> &NReport {
    run.per_n.iter().find(|r| r.n == n).expect("n in grid")
}

fn errors(runs: &[(&str, &Run)]) -> String {
    let e: Vec<String> = runs
        .iter()
        .flat_map(|(name, r)| r.per_n.iter().flat_map(move |p| p.errors.iter().map(move |(s, e)| format!("{name} n={} {s}: {e}", p.n))))
        .collect();
    if e.is_empty() {
        String::new()
    } else {
        format!(" errors: {}", e.join("; "))
    }
}

fn window(x: f64, (lo, hi): (f64, f64)) -> bool {
    x >= lo && x <= hi
}

fn fit(run: &Run, key: &str) -> f64 {
    run.sweep.fits.get(key).map(|f| f.exponent).unwrap_or(f64::NAN)
}

struct Ledger {
    failed: Vec<u32>,
}

impl Ledger {
    fn line(&mut self, id: u32, name: &str, pass: bool, detail: String) {
        println!("criterion {id:2} {:4} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
        if !pass {
            self.failed.push(id);
        }
    }
}

fn main() {
    let full = [Scenario::Sweep, Scenario::Dnu, Scenario::Optimality];
    let r11 = evaluate_grid(&[1, 1], &GRID_11, &full);
    let r22 = evaluate_grid(&[2, 2], &GRID_22, &[Scenario::Sweep, Scenario::Dnu]);
    let both = [("(1,1)", &r11), ("(2,2)", &r22)];
    let all = || r11.per_n.iter().map(|r| ("(1,1)", r)).chain(r22.per_n.iter().map(|r| ("(2,2)", r)));
    let mut out = Ledger { failed: Vec::new() };

    // 1
    let bad: Vec<String> = all().filter(|(_, r)| !r.construct.as_ref().is_some_and(|c| c.ode_exact)).map(|(l, r)| format!("{l} n={}", r.n)).collect();
    out.line(1, "exact construction", bad.is_empty(), format!("cleared equation is the zero polynomial at {} (λ, n); failing {bad:?}", all().count()));

    // 2
    let worst = all().map(|(_, r)| r.hessian.as_ref().map(|h| h.gradient_max / (r.n.max(1) as f64)).unwrap_or(f64::INFINITY)).fold(0.0, f64::max);
    out.line(2, "stationarity", worst <= STATIONARITY, format!("max |∂F|/max(1,n) = {worst:e} ≤ {STATIONARITY:e}{}", errors(&both)));

    // 3
    let fd = all().map(|(_, r)| r.hessian.as_ref().map(|h| h.fd_max_rel_dev).unwrap_or(f64::INFINITY)).fold(0.0, f64::max);
    let trace = all().all(|(_, r)| r.hessian.as_ref().is_some_and(|h| h.trace_zero_exact && h.symmetric_exact));
    out.line(3, "hessian entries", fd <= HESSIAN_FD_REL && trace, format!("max relative FD deviation {fd:e} ≤ {HESSIAN_FD_REL:e}; trace-zero and symmetric exactly: {trace}"));

    // 4
    let mut ok = true;
    let mut detail = Vec::new();
    for n in [30, 40, 50, 60] {
        let g = at(&r11, n).gersgorin.as_ref();
        let k = g.and_then(|g| g.scaling.k);
        let margin = g.and_then(|g| g.scaling.dominance.as_ref()).map(|d| d.min_margin()).unwrap_or(f64::NEG_INFINITY);
        let eig = g.map(|g| g.min_abs_eigenvalue).unwrap_or(0.0);
        ok &= k.is_some() && margin > 0.0 && eig > 0.0;
        detail.push(format!("n={n} K={k:?} margin={margin:.4} min|eig|={eig:.4}"));
    }
    out.line(4, "nonsingular hessian (1,1)", ok, detail.join(", "));

    // 5
    let contained = r11.per_n.iter().all(|r| r.gersgorin.as_ref().is_some_and(|g| g.all_contained && g.g_r_negative));
    let (gr, ge) = (fit(&r11, "max_abs_g_r"), fit(&r11, "g_e_band"));
    out.line(
        5,
        "localization (1,1)",
        contained && gr <= G_R_EXPONENT_MAX && window(ge, G_E_EXPONENT),
        format!("all eigenvalues in G_r ∪ G_e with G_r < 0: {contained}; max|G_r| exponent {gr:.4} ≤ {G_R_EXPONENT_MAX}; G_e band exponent {ge:.4} in {G_E_EXPONENT:?}"),
    );

    // 6
    let (inv, off, scan) = (fit(&r11, "inv_block_min"), fit(&r11, "off_row_max"), fit(&r11, "inverse_distance_scan"));
    out.line(
        6,
        "block scaling (1,1)",
        inv >= INV_BLOCK_EXPONENT_MIN && off <= OFF_ROW_EXPONENT_MAX && window(scan, SCAN_EXPONENT),
        format!("‖A_kk⁻¹‖⁻¹ exponent {inv:.4} ≥ {INV_BLOCK_EXPONENT_MIN}; off-row exponent {off:.4} ≤ {OFF_ROW_EXPONENT_MAX}; scan exponent {scan:.4} in {SCAN_EXPONENT:?}"),
    );

    // 7
    let mut saddle_fail = Vec::new();
    let mut r_mn_worst = 0.0f64;
    for (name, run) in both {
        for n in SADDLE_GRID {
            match &at(run, n).dnu {
                Some(d) => {
                    if !d.saddle.pass() {
                        saddle_fail.push(format!("{name} n={n}"));
                    }
                    r_mn_worst = r_mn_worst.max(d.r_mn.iter().map(|l| l.rel_dev_re).fold(0.0, f64::max));
                }
                None => saddle_fail.push(format!("{name} n={n} (not evaluated)")),
            }
        }
    }
    out.line(
        7,
        "saddle structure ν∈{1,2}",
        saddle_fail.is_empty() && r_mn_worst <= R_MN_REL,
        format!("saddle conditions failing at {saddle_fail:?}; max |h11 − Re r|/|h11| = {r_mn_worst:.4e} ≤ {R_MN_REL:e}"),
    );

    // 8
    let mut ok = true;
    let mut cd = 0.0f64;
    for nu in 0..=DNU_MAX {
        let (a, b) = product_identities_check(nu);
        ok &= dnu_ode_check(nu) && a && b;
        cd = cd.max(dnu(nu).cd_max_rel_dev);
    }
    out.line(8, "d_ν identities ν≤10", ok && cd <= CD_REL, format!("exact ODE and product identities: {ok}; determinant vs CD sum max relative {cd:e} ≤ {CD_REL:e}"));

    // 9
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, run) in both {
        match &run.sweep.distance {
            Some(d) => {
                let km = run.per_n.iter().map(|r| r.zeros.as_ref().and_then(|z| z.km_max_relative).unwrap_or(f64::INFINITY)).fold(0.0, f64::max);
                let min_c = d.rows.iter().map(|r| r.lower_const).fold(f64::INFINITY, f64::min);
                ok &= window(d.upper.exponent, DISTANCE_SLOPE) && d.lower_bound_ok && km <= KM_REL && d.rows.len() == run.per_n.len();
                detail.push(format!("{name}: slope {:.4}, min·√n·ln n ≥ {min_c:.4} (exponent {:.4}), identity residual {km:e}", d.upper.exponent, d.lower.exponent));
            }
            None => {
                ok = false;
                detail.push(format!("{name}: no fit"));
            }
        }
    }
    out.line(9, "distance laws", ok, detail.join("; "));

    // 10
    let o = at(&r11, 40).optimality.as_ref();
    let detail = match o {
        Some(o) => format!(
            "gradient {:e}, max eigenvalue {:.4}, {} of {} perturbations did not decrease, max M₁′ {:.4}",
            o.maximum.stationarity_max, o.maximum.hessian_max_eigenvalue, o.maximum.failures, o.maximum.trials, o.m1n_max
        ),
        None => "not evaluated".into(),
    };
    let pass = o.is_some_and(|o| o.maximum.trials == TRIALS && o.maximum.pass(REDUCED_GRADIENT) && o.m1n_max < 0.0 && o.m1n_grid.len() == 400);
    out.line(10, "optimality (1,1) n=40", pass, detail);

    // 11
    let rows: Vec<_> = both.iter().flat_map(|(l, r)| r.sweep.orthogonality.iter().map(move |o| (*l, o))).collect();
    let worst = rows.iter().map(|(_, o)| o.normalized).fold(0.0, f64::max);
    out.line(
        11,
        "orthogonality",
        rows.len() == 6 && worst <= ORTHOGONALITY,
        format!("{} pairs {:?}, max normalized {worst:e} ≤ {ORTHOGONALITY:e}", rows.len(), rows.iter().map(|(l, o)| format!("{l}:({},{})", o.n1, o.n2)).collect::<Vec<_>>()),
    );

    // 12
    let bad: Vec<String> = all()
        .filter(|(_, r)| !r.zeros.as_ref().is_some_and(|z| z.interlacing.pass && !z.interlacing.skipped && z.interlacing.occupied >= z.interlacing.required))
        .map(|(l, r)| format!("{l} n={}", r.n))
        .collect();
    out.line(12, "interlacing", bad.is_empty(), format!("occupied gaps ≥ n − r at every n; failing {bad:?}"));

    // 13
    let ks: Vec<f64> = r11.per_n.iter().filter_map(|r| r.semicircle.as_ref().map(|s| s.ks_distance)).collect();
    let non_inc = ks.windows(2).all(|w| w[1] <= w[0]);
    let last = ks.last().copied().unwrap_or(f64::NAN);
    println!(
        "criterion 13 REPORT semicircle (1,1): KS {:?}; non-increasing {non_inc}; KS at n=60 {last:.4} < {KS_MAX}: {}",
        ks.iter().map(|k| (k * 1e4).round() / 1e4).collect::<Vec<_>>(),
        last < KS_MAX
    );

    // 14
    let tmp = tempfile::tempdir().expect("temp dir");
    let scenarios = Scenario::ALL;
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let ra = run(&config(&[1, 1], &[20, 30], &scenarios, &a)).expect("first run");
    let rb = run(&config(&[1, 1], &[20, 30], &scenarios, &b)).expect("second run");
    let same_list = ra.files == rb.files;
    let differing: Vec<&String> = ra.files.iter().filter(|f| std::fs::read(a.join(f)).ok() != std::fs::read(b.join(f)).ok()).collect();
    out.line(14, "determinism", same_list && differing.is_empty() && !ra.files.is_empty(), format!("{} files compared, differing {differing:?}", ra.files.len()));

    if !out.failed.is_empty() {
        println!("failed criteria: {:?}", out.failed);
        std::process::exit(1);
    }
}
