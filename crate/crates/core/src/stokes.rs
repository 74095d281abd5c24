//! Two-port beam-splitter algebra on photon-number kets.
//!
//! Input creation operators map as `â†_in → Σ_out U[out, in] â†_out` with
//! `U = (1/√2)[[1, i], [i, 1]]`; output port 2 is row 0 and port 3 is row 1.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const DEFAULT_TRUNCATION: usize = 4;
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Amplitudes over occupation pairs `(n_a, n_b)` of two ports.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FockKet2Port {
    pub amplitudes: BTreeMap<(usize, usize), Complex64>,
}

impl FockKet2Port {
    pub fn basis(n_a: usize, n_b: usize) -> Self {
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert((n_a, n_b), Complex64::ONE);
        Self { amplitudes }
    }

    pub fn vacuum() -> Self {
        Self::basis(0, 0)
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn amplitude(&self, n_a: usize, n_b: usize) -> Complex64 {
        self.amplitudes.get(&(n_a, n_b)).copied().unwrap_or(Complex64::ZERO)
    }

    pub fn max_photons(&self) -> usize {
        self.amplitudes.keys().map(|(a, b)| a + b).max().unwrap_or(0)
    }

    /// Drops entries with negligible amplitude.
    pub fn pruned(mut self, tol: f64) -> Self {
        self.amplitudes.retain(|_, v| v.norm() > tol);
        self
    }
}

/// Symmetric beam-splitter matrix `U[out][in]`.
pub fn stokes_matrix() -> [[Complex64; 2]; 2] {
    let a = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let b = Complex64::new(0.0, FRAC_1_SQRT_2);
    [[a, b], [b, a]]
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn binomial(n: usize, k: usize) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Transforms a ket on input ports (0, 1) into the output ports (2, 3).
///
/// `|n₀, n₁⟩ = (â₀†)^{n₀}(â₁†)^{n₁}|0⟩/√(n₀!n₁!)`; each input power is expanded
/// binomially over the output operators and collected with `√(m!)` factors.
pub fn stokes_apply(input: &FockKet2Port, truncation: usize) -> Result<FockKet2Port> {
    let norm = input.norm();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::Unnormalized { norm });
    }
    let photons = input.max_photons();
    if photons > truncation {
        return Err(Error::TruncationExceeded { photons, limit: truncation });
    }
    let u = stokes_matrix();
    let mut out = FockKet2Port::default();
    for (&(n0, n1), &amp) in &input.amplitudes {
        if amp == Complex64::ZERO {
            continue;
        }
        let prefactor = amp / (factorial(n0) * factorial(n1)).sqrt();
        // (U[0][0] b₂† + U[1][0] b₃†)^{n0} (U[0][1] b₂† + U[1][1] b₃†)^{n1}
        for k0 in 0..=n0 {
            let c0 = u[0][0].powu(k0 as u32) * u[1][0].powu((n0 - k0) as u32) * binomial(n0, k0);
            for k1 in 0..=n1 {
                let c1 = u[0][1].powu(k1 as u32) * u[1][1].powu((n1 - k1) as u32) * binomial(n1, k1);
                let m2 = k0 + k1;
                let m3 = n0 + n1 - m2;
                let weight = (factorial(m2) * factorial(m3)).sqrt();
                *out.amplitudes.entry((m2, m3)).or_insert(Complex64::ZERO) += prefactor * c0 * c1 * weight;
            }
        }
    }
    Ok(out.pruned(1e-15))
}
