//! Physical constants, the uniform mesh of the primitive cell, and the slab
//! permittivity profile.

use crate::error::{Error, Result};

/// SI constants. The speed of light is derived from `mu0` and `eps0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub mu0: f64,
    pub eps0: f64,
}

impl PhysicalConstants {
    /// CODATA 2018 values.
    pub const CODATA: PhysicalConstants = PhysicalConstants {
        hbar: 1.054_571_817e-34,
        mu0: 1.256_637_062_12e-6,
        eps0: 8.854_187_812_8e-12,
    };

    pub fn c(&self) -> f64 {
        1.0 / (self.mu0 * self.eps0).sqrt()
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA
    }
}

/// Uniform grid over `[-Rx/2, Rx/2]`. The last node is the Bloch image of the
/// first, so only `n0 - 1` nodes carry unknowns.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D {
    rx: f64,
    n0: usize,
    dx: f64,
    nodes: Vec<f64>,
}

impl Mesh1D {
    pub fn new(rx: f64, n0: usize) -> Result<Self> {
        if !(rx > 0.0) || !rx.is_finite() {
            return Err(Error::InvalidMesh(format!("cell length must be positive, got {rx}")));
        }
        if n0 < 3 {
            return Err(Error::InvalidMesh(format!("need at least 3 grid points, got {n0}")));
        }
        let dx = rx / (n0 - 1) as f64;
        let n1 = n0 - 1;
        // centred form keeps x_i = -x_{n1-i} exactly
        let nodes: Vec<f64> = (0..n0).map(|i| (2 * i as i64 - n1 as i64) as f64 * rx / (2 * n1) as f64).collect();
        Ok(Self { rx, n0, dx, nodes })
    }

    pub fn rx(&self) -> f64 {
        self.rx
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    /// Degrees of freedom under Bloch-periodic identification.
    pub fn n1(&self) -> usize {
        self.n0 - 1
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Coordinates of the `n1` unknowns.
    pub fn dof_nodes(&self) -> &[f64] {
        &self.nodes[..self.n1()]
    }

    /// Index of the unknown nearest to `x`. The right boundary maps onto node 0.
    pub fn nearest_dof(&self, x: f64) -> usize {
        let i = ((x + 0.5 * self.rx) / self.dx).round();
        let i = i.clamp(0.0, (self.n0 - 1) as f64) as usize;
        i % self.n1()
    }
}

/// Centered slab of relative permittivity `eps_s` and thickness `rs` in a
/// uniform background.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PermittivityProfile {
    eps_s: f64,
    rs: f64,
    background: f64,
}

impl PermittivityProfile {
    pub fn slab(eps_s: f64, rs: f64) -> Result<Self> {
        Self::with_background(eps_s, rs, 1.0)
    }

    pub fn with_background(eps_s: f64, rs: f64, background: f64) -> Result<Self> {
        if !(eps_s >= 1.0) || !eps_s.is_finite() {
            return Err(Error::InvalidProfile(format!("slab permittivity must be >= 1, got {eps_s}")));
        }
        if !(rs > 0.0) || !rs.is_finite() {
            return Err(Error::InvalidProfile(format!("slab thickness must be positive, got {rs}")));
        }
        if !(background > 0.0) || !background.is_finite() {
            return Err(Error::InvalidProfile(format!(
                "background permittivity must be positive, got {background}"
            )));
        }
        Ok(Self { eps_s, rs, background })
    }

    /// Vacuum everywhere; the slab geometry is kept only so the profile is well formed.
    pub fn homogeneous(rs: f64) -> Self {
        Self { eps_s: 1.0, rs, background: 1.0 }
    }

    pub fn eps_s(&self) -> f64 {
        self.eps_s
    }

    pub fn rs(&self) -> f64 {
        self.rs
    }

    pub fn background(&self) -> f64 {
        self.background
    }

    pub fn is_homogeneous(&self) -> bool {
        self.eps_s == self.background
    }

    /// Relative permittivity at `x`; interface points belong to the slab.
    pub fn relative_at(&self, x: f64) -> f64 {
        // A few ulps of slack so nodes computed as -Rx/2 + i*dx land inside.
        let half = 0.5 * self.rs * (1.0 + 4.0 * f64::EPSILON);
        if x.abs() <= half {
            self.eps_s
        } else {
            self.background
        }
    }

    /// Absolute permittivity (F/m).
    pub fn sample_eps(&self, x: f64, constants: &PhysicalConstants) -> f64 {
        self.relative_at(x) * constants.eps0
    }

    /// Checks the profile fits the cell and both interfaces sit on mesh nodes.
    pub fn check_alignment(&self, mesh: &Mesh1D) -> Result<()> {
        self.check_fits(mesh)?;
        for edge in [-0.5 * self.rs, 0.5 * self.rs] {
            let offset = (edge + 0.5 * mesh.rx()) / mesh.dx();
            let nearest = -0.5 * mesh.rx() + offset.round() * mesh.dx();
            if (nearest - edge).abs() > 1e-9 * mesh.dx() {
                return Err(Error::MeshAlignment { position: edge, nearest });
            }
        }
        Ok(())
    }

    pub fn check_fits(&self, mesh: &Mesh1D) -> Result<()> {
        if self.rs >= mesh.rx() {
            return Err(Error::InvalidProfile(format!(
                "slab thickness {} m does not fit in cell of {} m",
                self.rs,
                mesh.rx()
            )));
        }
        Ok(())
    }

    /// Number of nodes (including both boundary nodes of the cell) inside the slab.
    pub fn slab_node_count(&self, mesh: &Mesh1D) -> usize {
        mesh.nodes().iter().filter(|&&x| self.relative_at(x) == self.eps_s).count()
    }
}
