//! Quantized field built on a mode basis: the diagonal Hamiltonian `ħω_p` and
//! the positive-frequency field coefficients at a detector node.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ladder::{LadderFactor, LadderProduct};
use crate::medium::PhysicalConstants;
use crate::modes::ModeBasis;
use crate::packets::PhotonState;

/// Allowed deviation of each photon's amplitude norm from 1.
pub const STATE_NORM_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct QuantizedField {
    pub basis: Arc<ModeBasis>,
    /// `ħω_p` (J).
    pub dh: Vec<f64>,
    pub constants: PhysicalConstants,
}

/// `α_p = sqrt(ħ/2ω_p) e^{-iω_p t} Φ[i,p]`, the coefficients of `Â⁽⁺⁾(x_i, t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorCoefficients {
    pub alpha: Vec<Complex64>,
    pub position_index: usize,
    pub time: f64,
}

impl QuantizedField {
    pub fn new(basis: Arc<ModeBasis>) -> Self {
        let constants = basis.system.constants;
        let dh = basis.omega.iter().map(|w| constants.hbar * w).collect();
        Self { basis, dh, constants }
    }

    pub fn mode_count(&self) -> usize {
        self.dh.len()
    }

    /// `Σ ħω_p / 2`, kept out of every expectation value.
    pub fn zero_point_energy(&self) -> f64 {
        0.5 * self.dh.iter().sum::<f64>()
    }

    pub fn detector_alpha(&self, node: usize, t: f64) -> Result<DetectorCoefficients> {
        let n = self.basis.dim();
        if node >= n {
            return Err(Error::IndexOutOfRange { index: node, len: n });
        }
        let hbar = self.constants.hbar;
        let alpha = self
            .basis
            .omega
            .iter()
            .enumerate()
            .map(|(p, &w)| Complex64::from_polar((hbar / (2.0 * w)).sqrt(), -w * t) * self.basis.phi[(node, p)])
            .collect();
        Ok(DetectorCoefficients { alpha, position_index: node, time: t })
    }

    /// `⟨Ψ|Ĥ|Ψ⟩ / ⟨Ψ|Ψ⟩` with the zero-point term excluded.
    ///
    /// Each photon's amplitude vector must be unit norm. The two-photon value is
    /// evaluated mode by mode with the ladder engine.
    pub fn hamiltonian_expectation(&self, state: &PhotonState) -> Result<f64> {
        for b in state.amplitudes() {
            if b.len() != self.mode_count() {
                return Err(Error::DimensionMismatch { expected: self.mode_count(), got: b.len() });
            }
            let norm = b.norm();
            if (norm - 1.0).abs() > STATE_NORM_TOLERANCE {
                return Err(Error::Unnormalized { norm });
            }
        }
        match state {
            PhotonState::Vacuum => Ok(0.0),
            PhotonState::One(b) => Ok(self.dh.iter().zip(b.as_slice()).map(|(e, g)| e * g.norm_sqr()).sum()),
            PhotonState::Two(b1, b2) => {
                let n = self.mode_count();
                let kets = [b1.as_slice().to_vec(), b2.as_slice().to_vec()];
                let bras: Vec<Vec<Complex64>> = kets.iter().map(|k| k.iter().map(|v| v.conj()).collect()).collect();
                let mut energy = 0.0;
                let mut unit = vec![Complex64::ZERO; n];
                for p in 0..n {
                    if b1.as_slice()[p] == Complex64::ZERO && b2.as_slice()[p] == Complex64::ZERO {
                        continue;
                    }
                    unit[p] = Complex64::ONE;
                    let expr = LadderProduct::new(vec![
                        LadderFactor::annihilation(bras[1].clone()),
                        LadderFactor::annihilation(bras[0].clone()),
                        LadderFactor::creation(unit.clone()),
                        LadderFactor::annihilation(unit.clone()),
                        LadderFactor::creation(kets[0].clone()),
                        LadderFactor::creation(kets[1].clone()),
                    ]);
                    unit[p] = Complex64::ZERO;
                    energy += self.dh[p] * expr.vacuum_expectation().re;
                }
                Ok(energy / state.norm_sqr())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{BlochSystem, Method};
    use crate::medium::{Mesh1D, PermittivityProfile};
    use crate::modes::{default_omega_floor, solve_modes};
    use crate::packets::{make_two_photon, ModalAmplitudes};
    use std::f64::consts::PI;

    fn field() -> QuantizedField {
        let mesh = Mesh1D::new(1.0, 61).unwrap();
        let profile = PermittivityProfile::homogeneous(0.1);
        let sys = BlochSystem::assemble(Method::Fem, &mesh, &profile, PI / 2.0, PhysicalConstants::CODATA).unwrap();
        let basis = solve_modes(&sys, default_omega_floor(&sys)).unwrap();
        QuantizedField::new(Arc::new(basis))
    }

    #[test]
    fn energies_are_hbar_omega() {
        let f = field();
        for (e, w) in f.dh.iter().zip(&f.basis.omega) {
            assert_eq!(*e, f.constants.hbar * w);
        }
        let one = PhotonState::One(ModalAmplitudes::unit(f.mode_count(), 4).unwrap());
        assert_eq!(f.hamiltonian_expectation(&one).unwrap(), f.dh[4]);
        assert_eq!(f.hamiltonian_expectation(&PhotonState::Vacuum).unwrap(), 0.0);
    }

    #[test]
    fn alpha_at_time_zero_has_no_phase() {
        let f = field();
        let a = f.detector_alpha(7, 0.0).unwrap();
        for (p, v) in a.alpha.iter().enumerate() {
            let expected = (f.constants.hbar / (2.0 * f.basis.omega[p])).sqrt() * f.basis.phi[(7, p)];
            assert!((v - expected).norm() <= 1e-15 * expected.norm());
        }
        assert!(matches!(f.detector_alpha(60, 0.0), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn two_photon_energy_sums_both_photons() {
        let f = field();
        let n = f.mode_count();
        let a = ModalAmplitudes::unit(n, 2).unwrap();
        let b = ModalAmplitudes::unit(n, 5).unwrap();
        let e = f.hamiltonian_expectation(&make_two_photon(a.clone(), b)).unwrap();
        assert!((e - f.dh[2] - f.dh[5]).abs() <= 1e-12 * e);
        let e = f.hamiltonian_expectation(&make_two_photon(a.clone(), a)).unwrap();
        assert!((e - 2.0 * f.dh[2]).abs() <= 1e-12 * e);
    }

    #[test]
    fn unnormalized_state_is_rejected() {
        let f = field();
        let mut g = vec![Complex64::ZERO; f.mode_count()];
        g[0] = Complex64::new(1.0, 0.0);
        g[1] = Complex64::new(1e-3, 0.0);
        let b = ModalAmplitudes::normalized(g.clone()).unwrap();
        assert!(f.hamiltonian_expectation(&PhotonState::One(b)).is_ok());
        let b = ModalAmplitudes::from_raw(g.clone());
        assert!(matches!(f.hamiltonian_expectation(&PhotonState::One(b)), Err(Error::Unnormalized { .. })));
    }
}
