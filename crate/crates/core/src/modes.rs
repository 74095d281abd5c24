//! Mass-orthonormal Bloch eigenmodes of an assembled system.
//!
//! `S φ = -ω² μ0 M φ` is reduced to a standard Hermitian problem through the
//! Cholesky factor of `M/ε0`: with `M/ε0 = L L†` and `C = L⁻¹ (-S) L⁻†`, the
//! eigenpairs `C y = k² y` give `φ = L⁻† y / √ε0` and `ω = c k`. The columns
//! of `Φ` then satisfy `Φ† M Φ = I` by construction.

use std::f64::consts::PI;

use faer::{Mat, Side};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::assembly::BlochSystem;
use crate::band::CyclicCholesky;
use crate::error::{Error, Result};

/// Relative eigenvalue spread treated as one degenerate cluster.
pub const CLUSTER_TOLERANCE: f64 = 1e-9;

/// `1e-6 · 2πc/Rx`: removes only the θ0 = 0 constant mode.
pub fn default_omega_floor(system: &BlochSystem) -> f64 {
    1e-6 * 2.0 * PI * system.constants.c() / system.mesh.rx()
}

#[derive(Debug, Clone)]
pub struct ModeBasis {
    /// Columns are mode vectors at the unknowns, units 1/√(F·m).
    pub phi: Mat<Complex64>,
    /// Ascending eigenfrequencies (rad/s).
    pub omega: Vec<f64>,
    /// Unfolded Bloch wavenumber `(θ0 + 2πp)/Rx` of each mode's dominant harmonic.
    pub kappa: Vec<f64>,
    /// `‖Sφ + ω²μ0 Mφ‖ / (ω²μ0 ‖Mφ‖)` per mode.
    pub residual: Vec<f64>,
    pub theta0: f64,
    pub system: BlochSystem,
}

impl ModeBasis {
    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.phi.nrows()
    }

    pub fn column(&self, p: usize) -> Vec<Complex64> {
        self.phi.col(p).iter().copied().collect()
    }

    /// `Φ† M v`: mass projection of a node-space vector onto every mode.
    pub fn project(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mv = self.system.m.apply_vec(v);
        (0..self.len())
            .map(|p| self.phi.col(p).iter().zip(&mv).map(|(a, b)| a.conj() * b).sum())
            .collect()
    }

    /// `Φ g`: node-space field of a modal coefficient vector.
    pub fn reconstruct(&self, g: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        let mut out = vec![Complex64::ZERO; n];
        for (p, &gp) in g.iter().enumerate() {
            if gp == Complex64::ZERO {
                continue;
            }
            for (o, &v) in out.iter_mut().zip(self.phi.col(p).iter()) {
                *o += v * gp;
            }
        }
        out
    }
}

/// Eigenfrequencies only (no vectors), ascending, including any null mode.
pub fn solve_frequencies(system: &BlochSystem) -> Result<Vec<f64>> {
    let (c, _) = reduced_operator(system)?;
    let k2 = c
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::EigenSolver(format!("{e:?}")))?;
    let light = system.constants.c();
    Ok(k2.into_iter().map(|v| light * v.max(0.0).sqrt()).collect())
}

/// Full mode basis; modes below `omega_floor` are dropped.
pub fn solve_modes(system: &BlochSystem, omega_floor: f64) -> Result<ModeBasis> {
    let n = system.dim();
    let (c, chol) = reduced_operator(system)?;
    let evd = c.self_adjoint_eigen(Side::Lower).map_err(|e| Error::EigenSolver(format!("{e:?}")))?;
    drop(c);
    let light = system.constants.c();
    let k2: Vec<f64> = evd.S().column_vector().iter().map(|v| v.re).collect();
    let keep: Vec<usize> = (0..n).filter(|&p| light * k2[p].max(0.0).sqrt() >= omega_floor).collect();

    let inv_sqrt_eps0 = 1.0 / system.constants.eps0.sqrt();
    let u = evd.U();
    let mut phi = Mat::<Complex64>::zeros(n, keep.len());
    let mut buf = vec![Complex64::ZERO; n];
    for (col, &p) in keep.iter().enumerate() {
        for (b, v) in buf.iter_mut().zip(u.col(p).iter()) {
            *b = *v;
        }
        chol.solve_upper_adjoint(&mut buf);
        for (dst, b) in phi.col_mut(col).iter_mut().zip(&buf) {
            *dst = *b * inv_sqrt_eps0;
        }
    }
    drop(evd);
    let omega: Vec<f64> = keep.iter().map(|&p| light * k2[p].max(0.0).sqrt()).collect();

    orthonormalize_clusters(system, &omega, &mut phi);
    fix_phases(&mut phi);
    let kappa = label_wavenumbers(system, &phi);
    let residual = residuals(system, &omega, &phi);
    Ok(ModeBasis { phi, omega, kappa, residual, theta0: system.theta0, system: system.clone() })
}

/// `C = L⁻¹ (-S) L⁻†` with `M/ε0 = L L†`; the scaling keeps eigenvalues at `k² = ω²/c²`.
fn reduced_operator(system: &BlochSystem) -> Result<(Mat<Complex64>, CyclicCholesky)> {
    let n = system.dim();
    let chol = system.m.scaled(1.0 / system.constants.eps0).cholesky()?;
    let neg_s = system.s.scaled(-1.0);
    let mut x = Mat::<Complex64>::zeros(n, n);
    let mut unit = vec![Complex64::ZERO; n];
    let mut column = vec![Complex64::ZERO; n];
    for j in 0..n {
        unit[j] = Complex64::ONE;
        neg_s.apply(&unit, &mut column);
        unit[j] = Complex64::ZERO;
        chol.solve_lower(&mut column);
        // store the adjoint: row j of X† is column j of X conjugated
        for (i, v) in column.iter().enumerate() {
            x[(j, i)] = v.conj();
        }
    }
    // X† = (L⁻¹ A)† = A L⁻†, so C = L⁻¹ X†
    x.par_col_chunks_mut(1).for_each(|mut col| {
        let mut tmp: Vec<Complex64> = (0..n).map(|i| col[(i, 0)]).collect();
        chol.solve_lower(&mut tmp);
        for (i, v) in tmp.into_iter().enumerate() {
            col[(i, 0)] = v;
        }
    });
    Ok((x, chol))
}

fn m_inner(system: &BlochSystem, a: &[Complex64], b: &[Complex64]) -> Complex64 {
    system.m.form(a, b)
}

/// Gram-Schmidt in the M inner product inside each degenerate cluster, then
/// unit M-norm for every column.
fn orthonormalize_clusters(system: &BlochSystem, omega: &[f64], phi: &mut Mat<Complex64>) {
    let n_modes = omega.len();
    let mut start = 0;
    while start < n_modes {
        let mut end = start + 1;
        while end < n_modes && (omega[end] - omega[start]).abs() <= CLUSTER_TOLERANCE * omega[start].abs().max(f64::MIN_POSITIVE) {
            end += 1;
        }
        for p in start..end {
            let mut v: Vec<Complex64> = phi.col(p).iter().copied().collect();
            for q in start..p {
                let u: Vec<Complex64> = phi.col(q).iter().copied().collect();
                let proj = m_inner(system, &u, &v);
                for (vi, ui) in v.iter_mut().zip(&u) {
                    *vi -= proj * ui;
                }
            }
            let norm = m_inner(system, &v, &v).re.sqrt();
            for (dst, vi) in phi.col_mut(p).iter_mut().zip(&v) {
                *dst = vi / norm;
            }
        }
        start = end;
    }
}

/// Rotates each column so its largest-magnitude entry is real and positive.
fn fix_phases(phi: &mut Mat<Complex64>) {
    for p in 0..phi.ncols() {
        // first component within a relative 1e-9 of the largest, so near-ties resolve by index
        let peak = phi.col(p).iter().map(|v| v.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            continue;
        }
        let best = *phi.col(p).iter().find(|v| v.norm() >= peak * (1.0 - 1e-9)).unwrap();
        let rot = best.conj() / best.norm();
        for v in phi.col_mut(p).iter_mut() {
            *v *= rot;
        }
    }
}

/// Dominant spatial harmonic of each mode after removing the Bloch twist.
fn label_wavenumbers(system: &BlochSystem, phi: &Mat<Complex64>) -> Vec<f64> {
    let n = phi.nrows();
    let theta0 = system.theta0;
    let rx = system.mesh.rx();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n);
    let mut buf = vec![Complex64::ZERO; n];
    (0..phi.ncols())
        .map(|p| {
            for (j, (b, v)) in buf.iter_mut().zip(phi.col(p).iter()).enumerate() {
                *b = v * Complex64::from_polar(1.0, -theta0 * j as f64 / n as f64);
            }
            fft.process(&mut buf);
            let mut best = 0;
            for (m, v) in buf.iter().enumerate() {
                if v.norm_sqr() > buf[best].norm_sqr() {
                    best = m;
                }
            }
            // the DFT sums u_j e^{-2πi m j/n}; harmonic index m ↔ p = m (mod n), centred
            let mut harmonic = best as i64;
            if harmonic > (n as i64) / 2 {
                harmonic -= n as i64;
            }
            (theta0 + 2.0 * PI * harmonic as f64) / rx
        })
        .collect()
}

fn residuals(system: &BlochSystem, omega: &[f64], phi: &Mat<Complex64>) -> Vec<f64> {
    let mu0 = system.constants.mu0;
    let n = phi.nrows();
    (0..phi.ncols())
        .map(|p| {
            let v: Vec<Complex64> = phi.col(p).iter().copied().collect();
            let sv = system.s.apply_vec(&v);
            let mv = system.m.apply_vec(&v);
            let lam = omega[p] * omega[p] * mu0;
            let r: f64 = (0..n).map(|i| (sv[i] + mv[i] * lam).norm_sqr()).sum::<f64>().sqrt();
            let scale: f64 = mv.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt() * lam;
            r / scale
        })
        .collect()
}

/// Largest deviations of `Φ† M Φ` from the identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Orthonormality {
    pub max_offdiag: f64,
    pub max_diag_deviation: f64,
}

impl Orthonormality {
    pub fn worst(&self) -> f64 {
        self.max_offdiag.max(self.max_diag_deviation)
    }
}

pub fn check_orthonormality(basis: &ModeBasis) -> Orthonormality {
    let n = basis.dim();
    let k = basis.len();
    let mut mphi = Mat::<Complex64>::zeros(n, k);
    let mut out = vec![Complex64::ZERO; n];
    for p in 0..k {
        let v: Vec<Complex64> = basis.phi.col(p).iter().copied().collect();
        basis.system.m.apply(&v, &mut out);
        for (dst, o) in mphi.col_mut(p).iter_mut().zip(&out) {
            *dst = *o;
        }
    }
    let gram = basis.phi.adjoint() * &mphi;
    let mut result = Orthonormality { max_offdiag: 0.0, max_diag_deviation: 0.0 };
    for j in 0..k {
        for i in 0..k {
            if i == j {
                result.max_diag_deviation = result.max_diag_deviation.max((gram[(i, j)] - 1.0).norm());
            } else {
                result.max_offdiag = result.max_offdiag.max(gram[(i, j)].norm());
            }
        }
    }
    result
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionPoint {
    /// Folded into `[-π/Rx, π/Rx]`.
    pub kappa: f64,
    pub omega: f64,
    pub theta0: f64,
    pub band: usize,
}

#[derive(Debug, Clone, Default)]
pub struct DispersionDiagram {
    pub points: Vec<DispersionPoint>,
}

impl DispersionDiagram {
    /// Points of one band, sorted by folded wavenumber.
    pub fn band(&self, band: usize) -> Vec<DispersionPoint> {
        let mut pts: Vec<_> = self.points.iter().filter(|p| p.band == band).copied().collect();
        pts.sort_by(|a, b| a.kappa.total_cmp(&b.kappa));
        pts
    }
}

/// Lowest `bands` eigenfrequencies of each system, placed at `κ = θ0/Rx`.
///
/// The constant null mode of a θ0 = 0 system occupies band 0 and is not emitted.
pub fn fold_dispersion(systems: &[BlochSystem], bands: usize) -> Result<DispersionDiagram> {
    let per_system: Vec<Result<Vec<DispersionPoint>>> = systems
        .par_iter()
        .map(|sys| {
            let floor = default_omega_floor(sys);
            let omegas = solve_frequencies(sys)?;
            let rx = sys.mesh.rx();
            // band index counts the null mode, so θ0 = 0 keeps its labels aligned with other phases
            Ok(omegas
                .into_iter()
                .take(bands)
                .enumerate()
                .filter(|&(_, w)| w >= floor)
                .map(|(band, omega)| DispersionPoint { kappa: sys.theta0 / rx, omega, theta0: sys.theta0, band })
                .collect())
        })
        .collect();
    let mut diagram = DispersionDiagram::default();
    for pts in per_system {
        diagram.points.extend(pts?);
    }
    Ok(diagram)
}
