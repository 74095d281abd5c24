//! Hong-Ou-Mandel delay sweeps on a dielectric-slab beam splitter.
//!
//! The left photon starts at `-x0` moving right, the right photon at
//! `x0 + cτ` moving left. Detectors sit at the nodes nearest `±x0`; the
//! transmitted/reflected pair arrives there at `t0 = 2x0/c` and `t0 + τ`.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;

use crate::assembly::{BlochSystem, Method};
use crate::correlations::{g2, DenominatorConvention, Event};
use crate::error::{Error, Result};
use crate::medium::{Mesh1D, PermittivityProfile, PhysicalConstants};
use crate::modes::{default_omega_floor, solve_modes, ModeBasis};
use crate::packets::{make_two_photon, project_packet, Shape, WavePacket};
use crate::quantize::QuantizedField;

pub use crate::stokes::{stokes_apply, stokes_matrix, FockKet2Port, DEFAULT_TRUNCATION};

/// Relative amplitude below which modes are dropped when truncation is enabled.
pub const MODE_TRUNCATION: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct HomConfig {
    pub rx: f64,
    pub n0: usize,
    pub eps_s: f64,
    pub rs: f64,
    pub theta0: f64,
    pub method: Method,
    pub x0: f64,
    pub dx0: f64,
    pub kappa0: f64,
    pub left_shape: Shape,
    pub right_shape: Shape,
    /// Delays (s).
    pub tau_grid: Vec<f64>,
    pub convention: DenominatorConvention,
    pub truncate_modes: bool,
    pub constants: PhysicalConstants,
}

impl Default for HomConfig {
    fn default() -> Self {
        let constants = PhysicalConstants::CODATA;
        Self {
            rx: 1.5,
            n0: 2501,
            eps_s: 7.0,
            rs: 6e-3,
            theta0: PI / 2.0,
            method: Method::Fem,
            x0: 0.375,
            dx0: 0.03,
            kappa0: 526.0,
            left_shape: Shape::Gaussian,
            right_shape: Shape::Gaussian,
            tau_grid: default_tau_grid(0.12, 41, constants.c()),
            convention: DenominatorConvention::PerEvent,
            truncate_modes: false,
            constants,
        }
    }
}

/// `points` delays with `cτ` uniform over `[-span, span]`.
pub fn default_tau_grid(span: f64, points: usize, c: f64) -> Vec<f64> {
    if points == 1 {
        return vec![0.0];
    }
    (0..points)
        .map(|i| {
            let d = -span + 2.0 * span * i as f64 / (points - 1) as f64;
            // exact zero at the centre
            if (2 * i + 1) == points {
                0.0
            } else {
                d / c
            }
        })
        .collect()
}

impl HomConfig {
    pub fn c(&self) -> f64 {
        self.constants.c()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x0 > 0.0) || !(self.dx0 > 0.0) {
            return Err(Error::Config("x0 and dx0 must be positive".into()));
        }
        if self.tau_grid.is_empty() {
            return Err(Error::Config("tau grid is empty".into()));
        }
        for &tau in &self.tau_grid {
            if !tau.is_finite() || (self.c() * tau).abs() + self.x0 >= 0.5 * self.rx {
                return Err(Error::Config(format!(
                    "delay {tau:e} s moves the right packet out of the cell (|c tau| + x0 must stay below Rx/2)"
                )));
            }
        }
        Ok(())
    }

    pub fn mesh(&self) -> Result<Mesh1D> {
        Mesh1D::new(self.rx, self.n0)
    }

    pub fn profile(&self) -> Result<PermittivityProfile> {
        PermittivityProfile::slab(self.eps_s, self.rs)
    }

    pub fn system(&self) -> Result<BlochSystem> {
        BlochSystem::assemble(self.method, &self.mesh()?, &self.profile()?, self.theta0, self.constants)
    }

    /// Tail window: packets separated by at least four widths.
    pub fn tau_tail(&self) -> f64 {
        4.0 * self.dx0 / self.c()
    }
}

pub fn hom_basis(config: &HomConfig) -> Result<Arc<ModeBasis>> {
    config.validate()?;
    let system = config.system()?;
    let floor = default_omega_floor(&system);
    Ok(Arc::new(solve_modes(&system, floor)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub tau: f64,
    pub delta_x0: f64,
    pub g2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationCurve {
    pub points: Vec<CurvePoint>,
    /// Mean `g²` over `|τ| ≥ τ_tail`; `None` when the grid does not reach the tails.
    pub baseline: Option<f64>,
    /// `g²` at the delay closest to zero.
    pub dip: f64,
    pub dip_tau: f64,
    /// `1 − dip/baseline`.
    pub visibility: Option<f64>,
}

impl CorrelationCurve {
    pub fn from_points(points: Vec<CurvePoint>, tau_tail: f64) -> Self {
        let centre = points
            .iter()
            .min_by(|a, b| a.tau.abs().total_cmp(&b.tau.abs()))
            .copied()
            .unwrap_or(CurvePoint { tau: 0.0, delta_x0: 0.0, g2: f64::NAN });
        // inclusive window, with slack for the rounding of τ = δx0/c
        let cut = tau_tail * (1.0 - 1e-9);
        let tails: Vec<f64> = points.iter().filter(|p| p.tau.abs() >= cut).map(|p| p.g2).collect();
        let baseline = if tails.is_empty() { None } else { Some(tails.iter().sum::<f64>() / tails.len() as f64) };
        let visibility = baseline.map(|b| 1.0 - centre.g2 / b);
        Self { points, baseline, dip: centre.g2, dip_tau: centre.tau, visibility }
    }

    pub fn min_point(&self) -> Option<CurvePoint> {
        self.points.iter().copied().min_by(|a, b| a.g2.total_cmp(&b.g2))
    }
}

/// The HOM sweep on a precomputed basis of the configured system.
pub fn run_hom_on(config: &HomConfig, basis: Arc<ModeBasis>) -> Result<CorrelationCurve> {
    config.validate()?;
    let c = config.c();
    let field = QuantizedField::new(basis.clone());
    let mesh = &basis.system.mesh;
    let left_packet = WavePacket::new(config.left_shape, config.kappa0, -config.x0, config.dx0)?;
    let mut left = project_packet(&left_packet, &basis)?;
    if config.truncate_modes {
        left = left.truncated(MODE_TRUNCATION);
    }
    let right_node = mesh.nearest_dof(config.x0);
    let left_node = mesh.nearest_dof(-config.x0);
    let t0 = 2.0 * config.x0 / c;

    let points: Result<Vec<CurvePoint>> = config
        .tau_grid
        .par_iter()
        .map(|&tau| {
            let shift = c * tau;
            let right_packet = WavePacket::new(config.right_shape, -config.kappa0, config.x0 + shift, config.dx0)?;
            let mut right = project_packet(&right_packet, &basis)?;
            if config.truncate_modes {
                right = right.truncated(MODE_TRUNCATION);
            }
            let state = make_two_photon(left.clone(), right);
            // the earlier arrival is registered first
            let (first, second) = if tau >= 0.0 { (right_node, left_node) } else { (left_node, right_node) };
            let e1 = Event::new(first, t0);
            let e2 = Event::new(second, t0 + tau);
            let value = g2(&field, &state, e1, e2, config.convention)?;
            Ok(CurvePoint { tau, delta_x0: shift, g2: value })
        })
        .collect();
    Ok(CorrelationCurve::from_points(points?, config.tau_tail()))
}

pub fn run_hom(config: &HomConfig) -> Result<CorrelationCurve> {
    let basis = hom_basis(config)?;
    run_hom_on(config, basis)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HomCase {
    /// Gaussian and Gaussian.
    A,
    /// Lorentzian and Lorentzian.
    B,
    /// Gaussian and Lorentzian.
    C,
}

impl HomCase {
    pub fn shapes(self) -> (Shape, Shape) {
        match self {
            HomCase::A => (Shape::Gaussian, Shape::Gaussian),
            HomCase::B => (Shape::Lorentzian, Shape::Lorentzian),
            HomCase::C => (Shape::Gaussian, Shape::Lorentzian),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            HomCase::A => "A",
            HomCase::B => "B",
            HomCase::C => "C",
        }
    }
}

/// Runs each case on one shared basis.
pub fn run_hom_cases(config: &HomConfig, cases: &[HomCase]) -> Result<Vec<(HomCase, CorrelationCurve)>> {
    let basis = hom_basis(config)?;
    cases
        .iter()
        .map(|&case| {
            let (l, r) = case.shapes();
            let cfg = HomConfig { left_shape: l, right_shape: r, ..config.clone() };
            Ok((case, run_hom_on(&cfg, basis.clone())?))
        })
        .collect()
}

/// `y ≈ b − a·exp(−(x−μ)²/(2s²))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianFit {
    pub baseline: f64,
    pub depth: f64,
    pub centre: f64,
    pub sigma: f64,
    pub r_squared: f64,
}

/// Least-squares fit of an inverted Gaussian. `μ` and `s` are searched on a
/// grid followed by local refinement; `b` and `a` are solved linearly.
pub fn fit_gaussian_dip(x: &[f64], y: &[f64]) -> Option<GaussianFit> {
    let n = x.len();
    if n < 4 || y.len() != n {
        return None;
    }
    let xmin = x.iter().copied().fold(f64::INFINITY, f64::min);
    let xmax = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = xmax - xmin;
    if !(span > 0.0) {
        return None;
    }
    let mean = y.iter().sum::<f64>() / n as f64;
    let ss_tot: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();

    let solve = |mu: f64, s: f64| -> Option<(f64, f64, f64)> {
        let phi: Vec<f64> = x.iter().map(|&xi| (-(xi - mu).powi(2) / (2.0 * s * s)).exp()).collect();
        let (sp, spp) = (phi.iter().sum::<f64>(), phi.iter().map(|p| p * p).sum::<f64>());
        let sy: f64 = y.iter().sum();
        let spy: f64 = phi.iter().zip(y).map(|(p, v)| p * v).sum();
        let det = n as f64 * spp - sp * sp;
        if det.abs() < 1e-300 {
            return None;
        }
        let b = (spp * sy - sp * spy) / det;
        let neg_a = (n as f64 * spy - sp * sy) / det;
        let ss: f64 = phi.iter().zip(y).map(|(p, v)| (v - b - neg_a * p).powi(2)).sum();
        Some((b, -neg_a, ss))
    };

    let mut best: Option<(f64, f64, f64, f64, f64)> = None;
    let consider = |mu: f64, s: f64, best: &mut Option<(f64, f64, f64, f64, f64)>| {
        if let Some((b, a, ss)) = solve(mu, s) {
            if best.is_none_or(|bst| ss < bst.4) {
                *best = Some((mu, s, b, a, ss));
            }
        }
    };
    for i in 0..=80 {
        let mu = xmin + span * i as f64 / 80.0;
        for j in 1..=80 {
            let s = span * j as f64 / 160.0;
            consider(mu, s, &mut best);
        }
    }
    let (mut mu_step, mut s_step) = (span / 80.0, span / 160.0);
    for _ in 0..60 {
        let (mu0, s0, ..) = best?;
        for dm in [-1.0, 0.0, 1.0] {
            for ds in [-1.0, 0.0, 1.0] {
                let s = s0 + ds * s_step;
                if s > 0.0 {
                    consider(mu0 + dm * mu_step, s, &mut best);
                }
            }
        }
        mu_step *= 0.7;
        s_step *= 0.7;
    }
    let (mu, s, b, a, ss) = best?;
    let r_squared = if ss_tot > 0.0 { 1.0 - ss / ss_tot } else { 1.0 };
    Some(GaussianFit { baseline: b, depth: a, centre: mu, sigma: s, r_squared })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_is_symmetric_with_exact_zero() {
        let c = PhysicalConstants::CODATA.c();
        let g = default_tau_grid(0.12, 41, c);
        assert_eq!(g.len(), 41);
        assert_eq!(g[20], 0.0);
        assert!((g[0] * c + 0.12).abs() < 1e-15);
        for i in 0..41 {
            assert!((g[i] + g[40 - i]).abs() < 1e-24);
        }
    }

    #[test]
    fn baseline_window_includes_endpoints() {
        let c = PhysicalConstants::CODATA.c();
        let taus = default_tau_grid(0.12, 41, c);
        let points: Vec<CurvePoint> = taus
            .iter()
            .map(|&t| CurvePoint { tau: t, delta_x0: t * c, g2: if t == 0.0 { 0.05 } else { 1.0 } })
            .collect();
        let curve = CorrelationCurve::from_points(points, 4.0 * 0.03 / c);
        assert_eq!(curve.baseline, Some(1.0));
        assert!((curve.visibility.unwrap() - 0.95).abs() < 1e-15);
    }

    #[test]
    fn gaussian_fit_recovers_parameters() {
        let x: Vec<f64> = (0..41).map(|i| -0.12 + 0.006 * i as f64).collect();
        let y: Vec<f64> = x.iter().map(|&v| 1.0 - 0.9 * (-(v - 0.01f64).powi(2) / (2.0 * 0.02f64.powi(2))).exp()).collect();
        let fit = fit_gaussian_dip(&x, &y).unwrap();
        assert!((fit.centre - 0.01).abs() < 1e-6);
        assert!((fit.sigma - 0.02).abs() < 1e-6);
        assert!((fit.depth - 0.9).abs() < 1e-6);
        assert!(fit.r_squared > 1.0 - 1e-10);
    }

    #[test]
    fn config_rejects_escaping_packets() {
        let c = PhysicalConstants::CODATA.c();
        let cfg = HomConfig { tau_grid: vec![0.4 / c], ..HomConfig::default() };
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        assert!(HomConfig::default().validate().is_ok());
    }
}
