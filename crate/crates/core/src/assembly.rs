//! Stiffness/mass pairs for the 1-D Helmholtz operator under Bloch-periodic
//! boundary conditions.
//!
//! Both discretizations produce `S φ + ω² μ0 M φ = 0` with `S` carrying the
//! Bloch phase on its corner entries:
//! `S[0, n1-1] = e^{-iθ0}/dx` and `S[n1-1, 0] = e^{+iθ0}/dx`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::band::CyclicHermitian;
use crate::error::{Error, Result};
use crate::medium::{Mesh1D, PermittivityProfile, PhysicalConstants};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Fdm,
    Fem,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Fdm => f.write_str("fdm"),
            Method::Fem => f.write_str("fem"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fdm" => Ok(Method::Fdm),
            "fem" => Ok(Method::Fem),
            other => Err(Error::Config(format!("unknown method `{other}` (expected fdm or fem)"))),
        }
    }
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_phase(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    }
    t
}

/// Hermitian matrix pair of the discretized Helmholtz problem.
#[derive(Debug, Clone)]
pub struct BlochSystem {
    /// Stiffness (1/m).
    pub s: CyclicHermitian,
    /// Mass (F).
    pub m: CyclicHermitian,
    pub theta0: f64,
    pub method: Method,
    pub mesh: Mesh1D,
    pub profile: PermittivityProfile,
    pub constants: PhysicalConstants,
}

impl BlochSystem {
    pub fn assemble(
        method: Method,
        mesh: &Mesh1D,
        profile: &PermittivityProfile,
        theta0: f64,
        constants: PhysicalConstants,
    ) -> Result<Self> {
        match method {
            Method::Fdm => assemble_fdm(mesh, profile, theta0, constants),
            Method::Fem => assemble_fem(mesh, profile, theta0, constants),
        }
    }

    pub fn dim(&self) -> usize {
        self.s.dim()
    }

    /// θ0 = 0 admits the constant null mode.
    pub fn has_null_mode(&self) -> bool {
        self.theta0 == 0.0
    }

    /// Largest |X - X†| entry relative to the largest |X| entry, for S and M.
    pub fn hermiticity_defect(&self) -> (f64, f64) {
        (hermitian_defect(&self.s), hermitian_defect(&self.m))
    }
}

fn hermitian_defect(x: &CyclicHermitian) -> f64 {
    let n = x.dim();
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 0..n {
        for j in [i, (i + 1) % n, (i + n - 1) % n] {
            scale = scale.max(x.get(i, j).norm());
            worst = worst.max((x.get(i, j) - x.get(j, i).conj()).norm());
        }
    }
    if scale == 0.0 {
        0.0
    } else {
        worst / scale
    }
}

/// Central-difference discretization with ε sampled at nodes.
pub fn assemble_fdm(
    mesh: &Mesh1D,
    profile: &PermittivityProfile,
    theta0: f64,
    constants: PhysicalConstants,
) -> Result<BlochSystem> {
    profile.check_fits(mesh)?;
    let theta0 = wrap_phase(theta0);
    let n1 = mesh.n1();
    let dx = mesh.dx();
    let forward = Complex64::from_polar(1.0, theta0);
    let mut s = CyclicHermitian::zeros(n1);
    let mut m = CyclicHermitian::zeros(n1);
    for (i, &x) in mesh.dof_nodes().iter().enumerate() {
        s.add_diag(i, -2.0 / dx);
        // coupling to the right neighbour; the left one is its Hermitian image
        let phase = if i + 1 == n1 { forward } else { Complex64::ONE };
        s.add_upper(i, phase / dx);
        m.add_diag(i, profile.sample_eps(x, &constants) * dx);
    }
    Ok(BlochSystem { s, m, theta0, method: Method::Fdm, mesh: mesh.clone(), profile: *profile, constants })
}

/// Linear (hat-function) Galerkin discretization with element-wise constant ε.
/// The hat function straddling the periodic boundary carries `e^{iθ0}` on its
/// right half.
pub fn assemble_fem(
    mesh: &Mesh1D,
    profile: &PermittivityProfile,
    theta0: f64,
    constants: PhysicalConstants,
) -> Result<BlochSystem> {
    if !profile.is_homogeneous() {
        profile.check_alignment(mesh)?;
    } else {
        profile.check_fits(mesh)?;
    }
    let theta0 = wrap_phase(theta0);
    let n1 = mesh.n1();
    let dx = mesh.dx();
    let nodes = mesh.nodes();
    let forward = Complex64::from_polar(1.0, theta0);
    let mut s = CyclicHermitian::zeros(n1);
    let mut m = CyclicHermitian::zeros(n1);
    for e in 0..n1 {
        let (left, right) = (e, (e + 1) % n1);
        // right-hand hat function of the last element is the phased image of node 0
        let phase = if e + 1 == n1 { forward } else { Complex64::ONE };
        let eps = profile.sample_eps(0.5 * (nodes[e] + nodes[e + 1]), &constants);
        // local blocks (1/dx)[[-1, 1], [1, -1]] and (eps dx / 6)[[2, 1], [1, 2]]
        s.add_diag(left, -1.0 / dx);
        s.add_diag(right, -1.0 / dx);
        s.add_upper(left, phase / dx);
        m.add_diag(left, eps * dx / 3.0);
        m.add_diag(right, eps * dx / 3.0);
        m.add_upper(left, phase * (eps * dx / 6.0));
    }
    Ok(BlochSystem { s, m, theta0, method: Method::Fem, mesh: mesh.clone(), profile: *profile, constants })
}
