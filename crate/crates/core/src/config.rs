//! TOML run configuration. Every section is optional and defaults to the
//! slab beam-splitter parameters; unknown keys are rejected.

use std::f64::consts::PI;
use std::path::Path;

use serde::Deserialize;

use crate::assembly::{BlochSystem, Method};
use crate::correlations::DenominatorConvention;
use crate::error::{Error, Result};
use crate::experiments::{default_tau_grid, HomCase, HomConfig};
use crate::medium::{Mesh1D, PermittivityProfile, PhysicalConstants};
use crate::packets::Shape;

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub medium: MediumSection,
    pub solver: SolverSection,
    pub hom: HomSection,
    pub dispersion: DispersionSection,
    pub design: DesignSection,
    pub validate: ValidateSection,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MediumSection {
    /// Cell length (m).
    pub rx: f64,
    /// Grid points including both cell boundaries.
    pub n0: usize,
    /// Slab relative permittivity.
    pub eps_s: f64,
    /// Slab thickness (m).
    pub rs: f64,
}

impl Default for MediumSection {
    fn default() -> Self {
        Self { rx: 1.5, n0: 2501, eps_s: 7.0, rs: 6e-3 }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub method: Method,
    /// Bloch phase (rad).
    pub theta0: f64,
    /// Modes below this frequency (rad/s) are dropped; defaults to `1e-6·2πc/Rx`.
    pub omega_floor: Option<f64>,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self { method: Method::Fem, theta0: PI / 2.0, omega_floor: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum B1Convention {
    #[default]
    PerEvent,
    Literal,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HomSection {
    /// Launch offset of both photons from the slab (m).
    pub x0: f64,
    /// Packet width parameter (m).
    pub dx0: f64,
    /// Carrier wavenumber (rad/m).
    pub kappa0: f64,
    pub left_shape: Shape,
    pub right_shape: Shape,
    /// Cases to run (`"A"`, `"B"`, `"C"`); empty runs the configured shapes once.
    pub cases: Vec<String>,
    /// Half-width of the `δx0 = cτ` sweep (m).
    pub delta_x0_span: f64,
    pub tau_points: usize,
    /// Explicit delays (s); overrides the uniform sweep when present.
    pub tau_grid: Option<Vec<f64>>,
    pub b1_convention: B1Convention,
    pub truncate_modes: bool,
}

impl Default for HomSection {
    fn default() -> Self {
        Self {
            x0: 0.375,
            dx0: 0.03,
            kappa0: 526.0,
            left_shape: Shape::Gaussian,
            right_shape: Shape::Gaussian,
            cases: Vec::new(),
            delta_x0_span: 0.12,
            tau_points: 41,
            tau_grid: None,
            b1_convention: B1Convention::PerEvent,
            truncate_modes: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DispersionSection {
    /// Number of Bloch phases `θ0 = −π + 2πk/N`, `k = 1..=N`.
    pub theta0_count: usize,
    /// Explicit Bloch phases (rad); overrides `theta0_count`.
    pub theta0_values: Option<Vec<f64>>,
    pub bands: usize,
    /// Wavenumber samples per band for the analytic curve.
    pub tmm_points: usize,
}

impl Default for DispersionSection {
    fn default() -> Self {
        Self { theta0_count: 32, theta0_values: None, bands: 4, tmm_points: 101 }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DesignSection {
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub points: usize,
}

impl Default for DesignSection {
    fn default() -> Self {
        Self { kappa_min: 100.0, kappa_max: 1000.0, points: 901 }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ValidateSection {
    pub seed: u64,
    pub ladder_cases: usize,
    pub closed_form_cases: usize,
    /// Grid sizes of the homogeneous convergence ladder.
    pub refinement: Vec<usize>,
    /// Test hook: zero this mode column before the orthonormality check.
    pub corrupt_column: Option<usize>,
}

impl Default for ValidateSection {
    fn default() -> Self {
        Self { seed: 20_240_601, ladder_cases: 1000, closed_form_cases: 100, refinement: vec![101, 201, 401], corrupt_column: None }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Physical validation of every section.
    pub fn check(&self) -> Result<()> {
        self.mesh()?;
        self.profile()?.check_fits(&self.mesh()?)?;
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be finite")))
            }
        };
        finite("solver.theta0", self.solver.theta0)?;
        if let Some(w) = self.solver.omega_floor {
            if !(w >= 0.0) {
                return Err(Error::Config("solver.omega_floor must be non-negative".into()));
            }
        }
        finite("hom.kappa0", self.hom.kappa0)?;
        if self.hom.tau_points == 0 {
            return Err(Error::Config("hom.tau_points must be at least 1".into()));
        }
        for case in &self.hom.cases {
            parse_case(case)?;
        }
        if self.dispersion.bands == 0 {
            return Err(Error::Config("dispersion.bands must be at least 1".into()));
        }
        if !(self.design.kappa_min > 0.0) || !(self.design.kappa_max >= self.design.kappa_min) || self.design.points == 0 {
            return Err(Error::Config("design scan needs 0 < kappa_min <= kappa_max and points >= 1".into()));
        }
        Ok(())
    }

    pub fn constants(&self) -> PhysicalConstants {
        PhysicalConstants::CODATA
    }

    pub fn mesh(&self) -> Result<Mesh1D> {
        Mesh1D::new(self.medium.rx, self.medium.n0)
    }

    pub fn profile(&self) -> Result<PermittivityProfile> {
        PermittivityProfile::slab(self.medium.eps_s, self.medium.rs)
    }

    pub fn system(&self, method: Method, theta0: f64) -> Result<BlochSystem> {
        BlochSystem::assemble(method, &self.mesh()?, &self.profile()?, theta0, self.constants())
    }

    pub fn theta0_sweep(&self) -> Result<Vec<f64>> {
        let sweep = match &self.dispersion.theta0_values {
            Some(v) => v.clone(),
            None => {
                let n = self.dispersion.theta0_count;
                (1..=n).map(|k| -PI + 2.0 * PI * k as f64 / n as f64).collect()
            }
        };
        if sweep.is_empty() {
            return Err(Error::Config("the Bloch phase sweep is empty".into()));
        }
        Ok(sweep)
    }

    pub fn design_kappas(&self) -> Vec<f64> {
        let d = &self.design;
        if d.points == 1 {
            return vec![d.kappa_min];
        }
        (0..d.points).map(|i| d.kappa_min + (d.kappa_max - d.kappa_min) * i as f64 / (d.points - 1) as f64).collect()
    }

    pub fn hom_cases(&self) -> Result<Vec<HomCase>> {
        self.hom.cases.iter().map(|c| parse_case(c)).collect()
    }

    pub fn hom_config(&self, method: Method) -> HomConfig {
        let constants = self.constants();
        let h = &self.hom;
        let tau_grid = match &h.tau_grid {
            Some(t) => t.clone(),
            None => default_tau_grid(h.delta_x0_span, h.tau_points, constants.c()),
        };
        HomConfig {
            rx: self.medium.rx,
            n0: self.medium.n0,
            eps_s: self.medium.eps_s,
            rs: self.medium.rs,
            theta0: self.solver.theta0,
            method,
            x0: h.x0,
            dx0: h.dx0,
            kappa0: h.kappa0,
            left_shape: h.left_shape,
            right_shape: h.right_shape,
            tau_grid,
            convention: match h.b1_convention {
                B1Convention::PerEvent => DenominatorConvention::PerEvent,
                B1Convention::Literal => DenominatorConvention::LiteralSecondNode,
            },
            truncate_modes: h.truncate_modes,
            constants,
        }
    }
}

fn parse_case(s: &str) -> Result<HomCase> {
    match s.trim().to_ascii_uppercase().as_str() {
        "A" => Ok(HomCase::A),
        "B" => Ok(HomCase::B),
        "C" => Ok(HomCase::C),
        other => Err(Error::Config(format!("unknown case `{other}` (expected A, B or C)"))),
    }
}
