//! Acceptance suite. One line per criterion; known failures are reported as
//! `FAIL (known)` and do not fail the run. Any other outcome exits nonzero,
//! including a known failure that starts passing.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ncq::assembly::Method;
use ncq::config::RunConfig;
use ncq::correlations::{first_order_four_term, first_order_four_term_as_printed, pair_amplitude, pair_amplitude_as_printed};
use ncq::experiments::{
    fit_gaussian_dip, hom_basis, run_hom_on, stokes_apply, CorrelationCurve, FockKet2Port, HomCase, HomConfig,
    DEFAULT_TRUNCATION,
};
use ncq::modes::{check_orthonormality, default_omega_floor, solve_modes, ModeBasis};
use ncq::tmm::slab_rt;
use ncq::validate::{
    convergence_slopes, dispersion_gap, engine_correlations, ladder_suite, random_vector, stokes_norm_suite,
    time_reversal_gap,
};
use ncq::Complex64;

const THICK_SLAB: &str = include_str!("../../../configs/thick_slab.toml");
const SEED: u64 = 20_240_601;

struct Line {
    id: &'static str,
    what: String,
    passed: bool,
    known_failure: bool,
}

#[derive(Default)]
struct Suite {
    lines: Vec<Line>,
}

impl Suite {
    fn check(&mut self, id: &'static str, what: impl Into<String>, passed: bool) {
        self.record(id, what.into(), passed, false);
    }

    fn known(&mut self, id: &'static str, what: impl Into<String>, passed: bool) {
        self.record(id, what.into(), passed, true);
    }

    fn record(&mut self, id: &'static str, what: String, passed: bool, known_failure: bool) {
        let tag = match (passed, known_failure) {
            (true, false) => "PASS",
            (false, false) => "FAIL",
            (false, true) => "FAIL (known)",
            (true, true) => "PASS (unexpected)",
        };
        println!("{tag:<18} criterion {id}: {what}");
        self.lines.push(Line { id, what, passed, known_failure });
    }

    fn unexpected(&self) -> Vec<&Line> {
        self.lines.iter().filter(|l| l.passed == l.known_failure).collect()
    }
}

fn thick_slab() -> RunConfig {
    RunConfig::from_toml(THICK_SLAB).expect("shipped config parses")
}

fn criterion_1(s: &mut Suite) {
    let r = slab_rt(7.0, 6e-3, 560.0);
    let (r2, t2, dphi) = (r.reflectance(), r.transmittance(), r.phase_difference_deg());
    let ok = (r2 - 0.4987).abs() <= 5e-4 && (t2 - 0.5013).abs() <= 5e-4 && (dphi + 89.16).abs() <= 0.1;
    s.known("1", format!("slab at kappa=560: |R|^2={r2:.4}, |T|^2={t2:.4}, dphi={dphi:.2} deg (want 0.4987/0.5013/-89.16)"), ok);
    let r = slab_rt(7.0, 6e-3, 526.0);
    let (r2, t2, dphi) = (r.reflectance(), r.transmittance(), r.phase_difference_deg());
    println!("{:<18}   kappa=526 gives |R|^2={r2:.4}, |T|^2={t2:.4}, dphi={dphi:.2} deg", "");
}

fn criterion_2(s: &mut Suite) {
    let cfg = thick_slab();
    for method in [Method::Fdm, Method::Fem] {
        let sys = cfg.system(method, std::f64::consts::FRAC_PI_2).unwrap();
        let basis = solve_modes(&sys, default_omega_floor(&sys)).unwrap();
        let o = check_orthonormality(&basis);
        s.check(
            "2",
            format!("{method} Phi^H M Phi: off-diagonal {:.1e}, diagonal deviation {:.1e} (<= 1e-10)", o.max_offdiag, o.max_diag_deviation),
            o.max_offdiag <= 1e-10 && o.max_diag_deviation <= 1e-10,
        );
    }
}

fn criterion_3(s: &mut Suite) {
    let cfg = thick_slab();
    for method in [Method::Fdm, Method::Fem] {
        let gap = dispersion_gap(&cfg, method).unwrap();
        s.check("3", format!("{method} first 4 bands vs transfer matrix over 32 phases: {:.3}% (< 1%)", 100.0 * gap), gap < 1e-2);
    }
}

fn case_curve(cfg: &HomConfig, basis: &Arc<ModeBasis>, case: HomCase) -> CorrelationCurve {
    let (l, r) = case.shapes();
    run_hom_on(&HomConfig { left_shape: l, right_shape: r, ..cfg.clone() }, basis.clone()).unwrap()
}

fn criteria_4_to_6(s: &mut Suite) {
    let cfg = HomConfig::default();
    let basis = hom_basis(&cfg).unwrap();
    let a = case_curve(&cfg, &basis, HomCase::A);
    let baseline = a.baseline.unwrap();
    s.check(
        "4",
        format!("g2(0)={:.4}, baseline={:.4} (g2(0) < 0.1 baseline and < 0.5)", a.dip, baseline),
        a.dip < 0.1 * baseline && a.dip < 0.5,
    );

    let v_default = a.visibility.unwrap();
    let fine_cfg = HomConfig { n0: 5001, ..cfg.clone() };
    let v_fine = run_hom_on(&fine_cfg, hom_basis(&fine_cfg).unwrap()).unwrap().visibility.unwrap();
    s.known(
        "5",
        format!("refined mesh (5001 nodes) visibility {:.2}% (want 93.35%..97.13%)", 100.0 * v_fine),
        (0.9335..=0.9713).contains(&v_fine),
    );
    s.check("5", format!("default mesh (2501 nodes) visibility {:.2}% (>= 90%)", 100.0 * v_default), v_default >= 0.90);

    let c = case_curve(&cfg, &basis, HomCase::C);
    let vc = c.visibility.unwrap();
    let rel = (vc - v_default).abs() / v_default;
    let min = c.min_point().unwrap();
    let centred = min.delta_x0.abs() <= cfg.dx0;
    s.check(
        "6",
        format!(
            "case C visibility {:.2}% vs case A {:.2}% ({:.1}% apart, <= 15%); minimum at c tau = {:.3} m",
            100.0 * vc,
            100.0 * v_default,
            100.0 * rel,
            min.delta_x0
        ),
        rel <= 0.15 && centred && vc > 0.5,
    );
    let x: Vec<f64> = a.points.iter().map(|p| p.delta_x0).collect();
    let y: Vec<f64> = a.points.iter().map(|p| p.g2).collect();
    let r2 = fit_gaussian_dip(&x, &y).map(|f| f.r_squared).unwrap_or(f64::NAN);
    s.check("6", format!("case A Gaussian fit R^2 = {r2:.4} (> 0.95)"), r2 > 0.95);
}

fn criterion_7(s: &mut Suite) {
    let worst = ladder_suite(SEED, 1000);
    s.check("7", format!("1000 random ladder products vs truncated Fock oracle: {worst:.1e} (<= 1e-10)"), worst <= 1e-10);

    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let (mut printed, mut corrected) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let n = rand::Rng::random_range(&mut rng, 1..=4);
        let ai = random_vector(&mut rng, n);
        let aj = random_vector(&mut rng, n);
        let b1 = random_vector(&mut rng, n);
        let b2 = random_vector(&mut rng, n);
        let (first, pair) = engine_correlations(&ai, &aj, &b1, &b2);
        let rel = |x: f64, y: f64| (x - y).abs() / y.abs().max(f64::MIN_POSITIVE);
        let relc = |x: Complex64, y: Complex64| (x - y).norm() / y.norm().max(f64::MIN_POSITIVE);
        printed = printed
            .max(rel(first_order_four_term_as_printed(&ai, &b1, &b2), first))
            .max(relc(pair_amplitude_as_printed(&ai, &aj, &b1, &b2), pair));
        corrected = corrected
            .max(rel(first_order_four_term(&ai, &b1, &b2), first))
            .max(relc(pair_amplitude(&ai, &aj, &b1, &b2), pair));
    }
    s.known("7", format!("closed forms with subtracted cross terms vs engine, 100 sets: {printed:.2e} (<= 1e-10)"), printed <= 1e-10);
    println!("{:<18}   with added cross terms (symmetric pair amplitude): {corrected:.1e}", "");
}

fn criterion_8(s: &mut Suite) {
    let out = stokes_apply(&FockKet2Port::basis(1, 1), DEFAULT_TRUNCATION).unwrap();
    let h = Complex64::new(0.0, std::f64::consts::FRAC_1_SQRT_2);
    let got = [out.amplitude(2, 0), out.amplitude(1, 1), out.amplitude(0, 2)];
    let defect = (got[0] - h).norm() + got[1].norm() + (got[2] - h).norm();
    s.check("8", format!("|1,1> -> amplitudes {:.6}, {:.6}, {:.6} on |2,0>, |1,1>, |0,2> (want i/sqrt2, 0, i/sqrt2)", got[0], got[1], got[2]), defect <= 1e-12);
    let worst = stokes_norm_suite(SEED + 2, 1000, DEFAULT_TRUNCATION).unwrap();
    s.check("8", format!("norm defect over 1000 random inputs: {worst:.1e} (<= 1e-12)"), worst <= 1e-12);
}

fn criterion_9(s: &mut Suite) {
    let cfg = thick_slab();
    for method in [Method::Fdm, Method::Fem] {
        let (_, slopes) = convergence_slopes(method, &[101, 201, 401]).unwrap();
        let ok = slopes.iter().all(|x| (x - 2.0).abs() <= 0.2);
        s.check("9", format!("{method} homogeneous convergence slopes {slopes:.3?} (2.0 +/- 0.2)"), ok);
        let gap = time_reversal_gap(&cfg, method, std::f64::consts::FRAC_PI_2).unwrap();
        s.check("9", format!("{method} +theta0 and -theta0 spectra: {gap:.1e} (<= 1e-9)"), gap <= 1e-9);
    }
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut suite = Suite::default();
    criterion_1(&mut suite);
    criterion_2(&mut suite);
    criterion_3(&mut suite);
    criteria_4_to_6(&mut suite);
    criterion_7(&mut suite);
    criterion_8(&mut suite);
    criterion_9(&mut suite);
    let unexpected = suite.unexpected();
    let known = suite.lines.iter().filter(|l| l.known_failure && !l.passed).count();
    println!(
        "{} checks, {} passed, {} known failures, {} unexpected ({:.0} s)",
        suite.lines.len(),
        suite.lines.iter().filter(|l| l.passed).count(),
        known,
        unexpected.len(),
        start.elapsed().as_secs_f64()
    );
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        for l in unexpected {
            println!("unexpected outcome for criterion {}: {}", l.id, l.what);
        }
        ExitCode::FAILURE
    }
}
