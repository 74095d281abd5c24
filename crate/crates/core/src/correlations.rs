//! First- and second-order field correlations of one- and two-photon states,
//! and the normalized `g²`.
//!
//! With `Â⁽⁺⁾ = Σ α_p â_p` and `|Ψ⟩ = B̂₁† B̂₂† |0⟩`, the bosonic commutator gives
//! `Â⁽⁺⁾|Ψ⟩ = (αᵗβ₂) B̂₁†|0⟩ + (αᵗβ₁) B̂₂†|0⟩` and
//! `Â⁽⁺⁾(x_j) Â⁽⁺⁾(x_i)|Ψ⟩ = [(α_jᵗβ₂)(α_iᵗβ₁) + (α_iᵗβ₂)(α_jᵗβ₁)] |0⟩`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ladder::contract;
use crate::packets::PhotonState;
use crate::quantize::{DetectorCoefficients, QuantizedField};

/// Intensities below this fraction of `‖α‖²` count as a dead detector.
pub const INTENSITY_FLOOR: f64 = 1e-30;

/// A detection event: mesh node and time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub node: usize,
    pub time: f64,
}

impl Event {
    pub fn new(node: usize, time: f64) -> Self {
        Self { node, time }
    }
}

/// Where the first intensity of the `g²` denominator is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DenominatorConvention {
    /// `B₁` at event 1, `B₂` at event 2.
    #[default]
    PerEvent,
    /// `B₁` at event 2's node and event 1's time, as literally printed.
    LiteralSecondNode,
}

fn dot_conj(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `⟨Ψ|Â⁽⁻⁾Â⁽⁺⁾|Ψ⟩` for the two-photon product state, as the four-term sum.
pub fn first_order_four_term(alpha: &[Complex64], b1: &[Complex64], b2: &[Complex64]) -> f64 {
    let p = contract(alpha, b1);
    let q = contract(alpha, b2);
    let n11 = dot_conj(b1, b1);
    let n22 = dot_conj(b2, b2);
    let n12 = dot_conj(b1, b2);
    (q.norm_sqr() * n11 + p.norm_sqr() * n22 + q.conj() * p * n12 + p.conj() * q * n12.conj()).re
}

/// The four-term expression with the cross terms subtracted, as printed with
/// the opposite commutator sign. Kept only to document the discrepancy.
pub fn first_order_four_term_as_printed(alpha: &[Complex64], b1: &[Complex64], b2: &[Complex64]) -> f64 {
    let p = contract(alpha, b1);
    let q = contract(alpha, b2);
    let n11 = dot_conj(b1, b1);
    let n22 = dot_conj(b2, b2);
    let n12 = dot_conj(b1, b2);
    (q.norm_sqr() * n11 + p.norm_sqr() * n22 - q.conj() * p * n12 - p.conj() * q * n12.conj()).re
}

/// `⟨0|Â⁽⁺⁾(x_j) Â⁽⁺⁾(x_i)|Ψ⟩`.
pub fn pair_amplitude(alpha_i: &[Complex64], alpha_j: &[Complex64], b1: &[Complex64], b2: &[Complex64]) -> Complex64 {
    contract(alpha_j, b2) * contract(alpha_i, b1) + contract(alpha_i, b2) * contract(alpha_j, b1)
}

/// The antisymmetric combination obtained with the opposite commutator sign.
pub fn pair_amplitude_as_printed(
    alpha_i: &[Complex64],
    alpha_j: &[Complex64],
    b1: &[Complex64],
    b2: &[Complex64],
) -> Complex64 {
    contract(alpha_j, b2) * contract(alpha_i, b1) - contract(alpha_i, b2) * contract(alpha_j, b1)
}

fn alpha(field: &QuantizedField, state: &PhotonState, node: usize, t: f64) -> Result<DetectorCoefficients> {
    if let Some(n) = state.mode_count() {
        if n != field.mode_count() {
            return Err(Error::DimensionMismatch { expected: field.mode_count(), got: n });
        }
    }
    field.detector_alpha(node, t)
}

/// `⟨Ψ|Â⁽⁻⁾(x,t)Â⁽⁺⁾(x,t)|Ψ⟩` for the state as stored (not divided by `⟨Ψ|Ψ⟩`).
pub fn first_order(field: &QuantizedField, state: &PhotonState, node: usize, t: f64) -> Result<f64> {
    let a = alpha(field, state, node, t)?;
    Ok(intensity(&a.alpha, state))
}

fn intensity(alpha: &[Complex64], state: &PhotonState) -> f64 {
    match state {
        PhotonState::Vacuum => 0.0,
        PhotonState::One(b) => contract(alpha, b.as_slice()).norm_sqr(),
        PhotonState::Two(b1, b2) => first_order_four_term(alpha, b1.as_slice(), b2.as_slice()),
    }
}

/// `‖Â⁽⁺⁾(x_j,t_j) Â⁽⁺⁾(x_i,t_i)|Ψ⟩‖²`.
pub fn second_order_numerator(field: &QuantizedField, state: &PhotonState, ei: Event, ej: Event) -> Result<f64> {
    let PhotonState::Two(b1, b2) = state else {
        return Err(Error::Arity { expected: "2", got: state.arity() });
    };
    let ai = alpha(field, state, ei.node, ei.time)?;
    let aj = alpha(field, state, ej.node, ej.time)?;
    Ok(pair_amplitude(&ai.alpha, &aj.alpha, b1.as_slice(), b2.as_slice()).norm_sqr())
}

/// `g² = A·⟨Ψ|Ψ⟩ / (B₁B₂)`, the normalized second-order correlation.
///
/// `A` and `B` are expectation values in the unnormalized product state, so the
/// state norm enters once to make the ratio independent of it.
pub fn g2(
    field: &QuantizedField,
    state: &PhotonState,
    e1: Event,
    e2: Event,
    convention: DenominatorConvention,
) -> Result<f64> {
    let PhotonState::Two(b1, b2) = state else {
        return Err(Error::Arity { expected: "2", got: state.arity() });
    };
    let a1 = alpha(field, state, e1.node, e1.time)?;
    let a2 = alpha(field, state, e2.node, e2.time)?;
    let numerator = pair_amplitude(&a1.alpha, &a2.alpha, b1.as_slice(), b2.as_slice()).norm_sqr();
    let d1 = match convention {
        DenominatorConvention::PerEvent => a1.clone(),
        DenominatorConvention::LiteralSecondNode => alpha(field, state, e2.node, e1.time)?,
    };
    let bi1 = checked_intensity(&d1.alpha, state)?;
    let bi2 = checked_intensity(&a2.alpha, state)?;
    Ok(numerator * state.norm_sqr() / (bi1 * bi2))
}

fn checked_intensity(alpha: &[Complex64], state: &PhotonState) -> Result<f64> {
    let b = intensity(alpha, state);
    let scale: f64 = alpha.iter().map(|a| a.norm_sqr()).sum();
    let relative = if scale > 0.0 { b / scale } else { 0.0 };
    if !(relative >= INTENSITY_FLOOR) {
        return Err(Error::DegenerateDenominator { intensity: relative });
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::fock_vacuum_expectation;
    use crate::ladder::{LadderFactor, LadderProduct};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn conj(v: &[Complex64]) -> Vec<Complex64> {
        v.iter().map(|x| x.conj()).collect()
    }

    #[test]
    fn four_term_matches_fock_oracle() {
        let alpha = vec![c(0.3, -0.2), c(1.1, 0.4), c(-0.5, 0.2)];
        let b1 = vec![c(0.6, 0.1), c(-0.2, 0.5), c(0.1, 0.0)];
        let b2 = vec![c(0.2, 0.2), c(0.7, -0.1), c(0.0, 0.4)];
        let expr = LadderProduct::new(vec![
            LadderFactor::annihilation(conj(&b1)),
            LadderFactor::annihilation(conj(&b2)),
            LadderFactor::creation(conj(&alpha)),
            LadderFactor::annihilation(alpha.clone()),
            LadderFactor::creation(b2.clone()),
            LadderFactor::creation(b1.clone()),
        ]);
        let oracle = fock_vacuum_expectation(&expr);
        assert!(oracle.im.abs() < 1e-12);
        let closed = first_order_four_term(&alpha, &b1, &b2);
        assert!((closed - oracle.re).abs() < 1e-12 * oracle.re.abs());
        let printed = first_order_four_term_as_printed(&alpha, &b1, &b2);
        assert!((printed - oracle.re).abs() > 1e-3);
    }

    #[test]
    fn pair_amplitude_matches_fock_oracle() {
        let ai = vec![c(0.3, -0.2), c(1.1, 0.4)];
        let aj = vec![c(-0.7, 0.1), c(0.2, 0.9)];
        let b1 = vec![c(0.6, 0.1), c(-0.2, 0.5)];
        let b2 = vec![c(0.2, 0.2), c(0.7, -0.1)];
        let expr = LadderProduct::new(vec![
            LadderFactor::annihilation(aj.clone()),
            LadderFactor::annihilation(ai.clone()),
            LadderFactor::creation(b2.clone()),
            LadderFactor::creation(b1.clone()),
        ]);
        let oracle = fock_vacuum_expectation(&expr);
        assert!((pair_amplitude(&ai, &aj, &b1, &b2) - oracle).norm() < 1e-12);
        assert!((pair_amplitude_as_printed(&ai, &aj, &b1, &b2) - oracle).norm() > 1e-3);
    }

    #[test]
    fn identical_photons_bunch_at_one_event() {
        let a = vec![c(0.4, 0.3), c(0.1, -0.2)];
        let b = vec![c(0.6, 0.0), c(0.0, 0.8)];
        let amp = pair_amplitude(&a, &a, &b, &b);
        assert!((amp - contract(&a, &b) * contract(&a, &b) * 2.0).norm() < 1e-15);
        assert_eq!(pair_amplitude_as_printed(&a, &a, &b, &b), Complex64::ZERO);
    }
}
