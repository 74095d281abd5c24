//! Aggregated self-checks run by `ncq validate`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::assembly::{BlochSystem, Method};
use crate::config::RunConfig;
use crate::correlations::{first_order_four_term, pair_amplitude};
use crate::error::Result;
use crate::fock::fock_vacuum_expectation;
use crate::ladder::{LadderFactor, LadderKind, LadderProduct};
use crate::medium::{Mesh1D, PermittivityProfile};
use crate::modes::{check_orthonormality, default_omega_floor, fold_dispersion, solve_frequencies, solve_modes};
use crate::stokes::{stokes_apply, FockKet2Port, DEFAULT_TRUNCATION};
use crate::tmm::{band_frequency, design_scan};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub module: &'static str,
    pub invariant: String,
    pub observed: f64,
    pub limit: String,
    pub passed: bool,
}

impl Check {
    fn at_most(module: &'static str, invariant: impl Into<String>, observed: f64, limit: f64) -> Self {
        Self { module, invariant: invariant.into(), observed, limit: format!("<= {limit:e}"), passed: observed <= limit }
    }

    fn within(module: &'static str, invariant: impl Into<String>, observed: f64, lo: f64, hi: f64) -> Self {
        Self {
            module,
            invariant: invariant.into(),
            observed,
            limit: format!("in [{lo}, {hi}]"),
            passed: observed >= lo && observed <= hi,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Random product of at most `max_factors` linear forms over at most `max_modes` modes.
///
/// Three out of four products are particle-number balanced so that most cases
/// have a nonzero vacuum expectation.
pub fn random_ladder_product(rng: &mut impl Rng, max_modes: usize, max_factors: usize) -> LadderProduct {
    let modes = rng.random_range(1..=max_modes);
    let balanced = rng.random_range(0..4) < 3;
    let count = if balanced { 2 * rng.random_range(0..=max_factors / 2) } else { rng.random_range(0..=max_factors) };
    let mut kinds: Vec<LadderKind> = if balanced {
        let mut k = vec![LadderKind::Creation; count];
        for slot in k.iter_mut().take(count / 2) {
            *slot = LadderKind::Annihilation;
        }
        k
    } else {
        (0..count).map(|_| if rng.random_bool(0.5) { LadderKind::Annihilation } else { LadderKind::Creation }).collect()
    };
    // Fisher-Yates shuffle of the kinds
    for i in (1..kinds.len()).rev() {
        let j = rng.random_range(0..=i);
        kinds.swap(i, j);
    }
    let factors = kinds
        .into_iter()
        .map(|kind| LadderFactor { kind, coeff: random_vector(rng, modes) })
        .collect();
    LadderProduct::new(factors)
}

pub fn random_vector(rng: &mut impl Rng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
}

/// `|engine − oracle|` relative to the Cauchy-Schwarz bound `Π‖c_k‖`, which
/// stays meaningful when the exact value cancels to zero.
pub fn oracle_discrepancy(expr: &LadderProduct) -> f64 {
    let engine = expr.vacuum_expectation();
    let oracle = fock_vacuum_expectation(expr);
    let bound: f64 = expr
        .factors
        .iter()
        .map(|f| f.coeff.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt())
        .product();
    let scale = oracle.norm().max(bound).max(f64::MIN_POSITIVE);
    (engine - oracle).norm() / scale
}

/// Worst oracle discrepancy over `cases` seeded random products.
pub fn ladder_suite(seed: u64, cases: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..cases).map(|_| oracle_discrepancy(&random_ladder_product(&mut rng, 4, 6))).fold(0.0, f64::max)
}

/// Worst relative gap between the closed forms and the engine over random
/// coefficient sets: (first-order four-term, pair amplitude).
pub fn closed_form_suite(seed: u64, cases: usize) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = (0.0f64, 0.0f64);
    for _ in 0..cases {
        let n = rng.random_range(1..=4);
        let alpha = random_vector(&mut rng, n);
        let alpha_j = random_vector(&mut rng, n);
        let b1 = random_vector(&mut rng, n);
        let b2 = random_vector(&mut rng, n);
        let (engine_first, engine_pair) = engine_correlations(&alpha, &alpha_j, &b1, &b2);
        let closed = first_order_four_term(&alpha, &b1, &b2);
        worst.0 = worst.0.max((closed - engine_first).abs() / engine_first.abs().max(f64::MIN_POSITIVE));
        let pair = pair_amplitude(&alpha, &alpha_j, &b1, &b2);
        worst.1 = worst.1.max((pair - engine_pair).norm() / engine_pair.norm().max(f64::MIN_POSITIVE));
    }
    worst
}

/// Engine values of `⟨Ψ|Â⁻Â⁺|Ψ⟩` and `⟨0|Â⁺_j Â⁺_i|Ψ⟩` for `|Ψ⟩ = B̂₁†B̂₂†|0⟩`.
pub fn engine_correlations(
    alpha_i: &[Complex64],
    alpha_j: &[Complex64],
    b1: &[Complex64],
    b2: &[Complex64],
) -> (f64, Complex64) {
    let conj = |v: &[Complex64]| -> Vec<Complex64> { v.iter().map(|x| x.conj()).collect() };
    let first = LadderProduct::new(vec![
        LadderFactor::annihilation(conj(b2)),
        LadderFactor::annihilation(conj(b1)),
        LadderFactor::creation(conj(alpha_i)),
        LadderFactor::annihilation(alpha_i.to_vec()),
        LadderFactor::creation(b1.to_vec()),
        LadderFactor::creation(b2.to_vec()),
    ]);
    let pair = LadderProduct::new(vec![
        LadderFactor::annihilation(alpha_j.to_vec()),
        LadderFactor::annihilation(alpha_i.to_vec()),
        LadderFactor::creation(b1.to_vec()),
        LadderFactor::creation(b2.to_vec()),
    ]);
    (first.vacuum_expectation().re, pair.vacuum_expectation())
}

/// Largest relative gap between folded numerical bands and the analytic bands.
pub fn dispersion_gap(cfg: &RunConfig, method: Method) -> Result<f64> {
    let systems: Result<Vec<BlochSystem>> = cfg.theta0_sweep()?.into_iter().map(|t| cfg.system(method, t)).collect();
    let diagram = fold_dispersion(&systems?, cfg.dispersion.bands)?;
    let c = cfg.constants().c();
    let m = &cfg.medium;
    let mut worst: f64 = 0.0;
    for p in &diagram.points {
        match band_frequency(m.eps_s, m.rs, m.rx, p.kappa.abs(), p.band, c) {
            Some(w) if w > 0.0 => worst = worst.max((p.omega - w).abs() / w),
            _ => worst = f64::INFINITY,
        }
    }
    Ok(worst)
}

/// Multiset distance of the `+θ0` and `−θ0` spectra, relative.
pub fn time_reversal_gap(cfg: &RunConfig, method: Method, theta0: f64) -> Result<f64> {
    let plus = solve_frequencies(&cfg.system(method, theta0)?)?;
    let minus = solve_frequencies(&cfg.system(method, -theta0)?)?;
    Ok(plus.iter().zip(&minus).map(|(a, b)| (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)).fold(0.0, f64::max))
}

/// Homogeneous-cell eigenfrequency errors over a refinement ladder and the
/// fitted slopes between successive levels. The error at each level is the
/// largest relative error of the four lowest modes at θ0 = π/2, Rx = 1 m.
pub fn convergence_slopes(method: Method, ladder: &[usize]) -> Result<(Vec<f64>, Vec<f64>)> {
    let constants = crate::medium::PhysicalConstants::CODATA;
    let c = constants.c();
    let theta0 = PI / 2.0;
    let mut exact: Vec<f64> = (-4..4).map(|p| c * (theta0 + 2.0 * PI * p as f64).abs()).collect();
    exact.sort_by(f64::total_cmp);
    let mut errors = Vec::new();
    let mut spacings = Vec::new();
    for &n0 in ladder {
        let mesh = Mesh1D::new(1.0, n0)?;
        spacings.push(mesh.dx());
        let sys = BlochSystem::assemble(method, &mesh, &PermittivityProfile::homogeneous(0.1), theta0, constants)?;
        let w = solve_frequencies(&sys)?;
        let err = w.iter().zip(&exact).take(4).map(|(a, e)| (a - e).abs() / e).fold(0.0, f64::max);
        errors.push(err);
    }
    let slopes = errors
        .windows(2)
        .zip(spacings.windows(2))
        .map(|(e, h)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln())
        .collect();
    Ok((errors, slopes))
}

/// Worst norm defect of `stokes_apply` over random inputs with up to `photons` photons.
pub fn stokes_norm_suite(seed: u64, cases: usize, photons: usize) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let mut ket = FockKet2Port::default();
        for n in 0..=photons {
            for a in 0..=n {
                ket.amplitudes.insert((a, n - a), Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            }
        }
        let norm = ket.norm();
        for v in ket.amplitudes.values_mut() {
            *v /= norm;
        }
        let out = stokes_apply(&ket, photons)?;
        worst = worst.max((out.norm() - 1.0).abs());
    }
    Ok(worst)
}

pub fn run(cfg: &RunConfig) -> Result<Report> {
    let mut report = Report::default();
    let v = &cfg.validate;

    for method in [Method::Fdm, Method::Fem] {
        let sys = cfg.system(method, cfg.solver.theta0)?;
        let floor = cfg.solver.omega_floor.unwrap_or_else(|| default_omega_floor(&sys));
        let mut basis = solve_modes(&sys, floor)?;
        if let Some(col) = v.corrupt_column {
            if col < basis.len() {
                for x in basis.phi.col_mut(col).iter_mut() {
                    *x = Complex64::ZERO;
                }
            }
        }
        let o = check_orthonormality(&basis);
        report.checks.push(Check::at_most("modes", format!("{method} max off-diagonal of Phi^H M Phi"), o.max_offdiag, 1e-10));
        report.checks.push(Check::at_most(
            "modes",
            format!("{method} max diagonal deviation of Phi^H M Phi"),
            o.max_diag_deviation,
            1e-10,
        ));
        let worst_residual = basis.residual.iter().copied().fold(0.0, f64::max);
        report.checks.push(Check::at_most("modes", format!("{method} max relative residual"), worst_residual, 1e-8));
        report.checks.push(Check::at_most(
            "modes",
            format!("{method} folded bands vs transfer matrix, relative omega"),
            dispersion_gap(cfg, method)?,
            1e-2,
        ));
        report.checks.push(Check::at_most(
            "modes",
            format!("{method} +/- theta0 spectra, relative"),
            time_reversal_gap(cfg, method, cfg.solver.theta0)?,
            1e-9,
        ));
        let (_, slopes) = convergence_slopes(method, &v.refinement)?;
        for s in slopes {
            report.checks.push(Check::within("modes", format!("{method} homogeneous convergence order"), s, 1.8, 2.2));
        }
    }

    report.checks.push(Check::at_most(
        "correlations",
        format!("ladder engine vs truncated Fock oracle ({} cases)", v.ladder_cases),
        ladder_suite(v.seed, v.ladder_cases),
        1e-10,
    ));
    let (first, pair) = closed_form_suite(v.seed.wrapping_add(1), v.closed_form_cases);
    report.checks.push(Check::at_most("correlations", "first-order closed form vs engine", first, 1e-10));
    report.checks.push(Check::at_most("correlations", "pair amplitude closed form vs engine", pair, 1e-10));

    let two = stokes_apply(&FockKet2Port::basis(1, 1), DEFAULT_TRUNCATION)?;
    let h = Complex64::new(0.0, std::f64::consts::FRAC_1_SQRT_2);
    let defect = (two.amplitude(2, 0) - h).norm() + (two.amplitude(0, 2) - h).norm() + two.amplitude(1, 1).norm();
    report.checks.push(Check::at_most("experiments", "two-photon beam splitter output", defect, 1e-12));
    report.checks.push(Check::at_most(
        "experiments",
        "beam splitter norm preservation",
        stokes_norm_suite(v.seed.wrapping_add(2), 200, DEFAULT_TRUNCATION)?,
        1e-12,
    ));

    let m = &cfg.medium;
    let worst_energy = design_scan(m.eps_s, m.rs, &cfg.design_kappas())
        .iter()
        .map(|r| (r.r2 + r.t2 - 1.0).abs())
        .fold(0.0, f64::max);
    report.checks.push(Check::at_most("tmm", "|R|^2 + |T|^2 = 1 over the design scan", worst_energy, 1e-12));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_products_are_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let p = random_ladder_product(&mut rng, 4, 6);
            assert!(p.len() <= 6);
            assert!(p.factors.iter().all(|f| (1..=4).contains(&f.coeff.len())));
        }
    }

    #[test]
    fn small_ladder_suite_passes() {
        assert!(ladder_suite(1, 100) < 1e-10);
        let (a, b) = closed_form_suite(2, 20);
        assert!(a < 1e-10 && b < 1e-10);
    }
}
