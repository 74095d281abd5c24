//! Wave-packet envelopes, their projection onto the mode basis, and one- and
//! two-photon product states.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modes::ModeBasis;

/// Unit-norm tolerance of modal amplitude vectors.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Projections whose norm falls below this fraction of the packet's own mass
/// norm are treated as orthogonal to the retained modes.
pub const DEGENERATE_PROJECTION: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Gaussian,
    Lorentzian,
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Gaussian => f.write_str("gaussian"),
            Shape::Lorentzian => f.write_str("lorentzian"),
        }
    }
}

impl FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" | "g" => Ok(Shape::Gaussian),
            "lorentzian" | "l" => Ok(Shape::Lorentzian),
            other => Err(Error::Config(format!("unknown packet shape `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavePacket {
    pub shape: Shape,
    /// Signed carrier wavenumber (rad/m); the sign sets the propagation direction.
    pub kappa0: f64,
    pub x0: f64,
    pub dx0: f64,
    pub amplitude: f64,
}

impl WavePacket {
    pub fn new(shape: Shape, kappa0: f64, x0: f64, dx0: f64) -> Result<Self> {
        if !(dx0 > 0.0) || !dx0.is_finite() {
            return Err(Error::Config(format!("packet width must be positive, got {dx0}")));
        }
        if !x0.is_finite() || !kappa0.is_finite() {
            return Err(Error::Config("packet centre and carrier must be finite".into()));
        }
        Ok(Self { shape, kappa0, x0, dx0, amplitude: 1.0 })
    }

    pub fn with_amplitude(mut self, amplitude: f64) -> Self {
        self.amplitude = amplitude;
        self
    }

    pub fn envelope(&self, x: f64) -> f64 {
        let u = x - self.x0;
        match self.shape {
            Shape::Gaussian => (-(u / (std::f64::consts::SQRT_2 * self.dx0)).powi(2)).exp(),
            Shape::Lorentzian => (-u.abs() / self.dx0).exp(),
        }
    }

    pub fn evaluate(&self, x: f64) -> Complex64 {
        Complex64::from_polar(self.amplitude * self.envelope(x), self.kappa0 * (x - self.x0))
    }
}

pub fn evaluate_packet(packet: &WavePacket, x: f64) -> Complex64 {
    packet.evaluate(x)
}

/// Unit-norm complex amplitudes over the modes of a basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalAmplitudes {
    g: Vec<Complex64>,
}

impl ModalAmplitudes {
    pub fn new(g: Vec<Complex64>) -> Result<Self> {
        let norm = l2(&g);
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Unnormalized { norm });
        }
        Ok(Self { g })
    }

    /// Unchecked wrapper; consumers that require unit norm verify it themselves.
    pub fn from_raw(g: Vec<Complex64>) -> Self {
        Self { g }
    }

    /// Rescales `g` to unit norm.
    pub fn normalized(mut g: Vec<Complex64>) -> Result<Self> {
        let norm = l2(&g);
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::DegenerateProjection { norm });
        }
        for v in &mut g {
            *v /= norm;
        }
        Ok(Self { g })
    }

    pub fn unit(len: usize, p: usize) -> Result<Self> {
        if p >= len {
            return Err(Error::IndexOutOfRange { index: p, len });
        }
        let mut g = vec![Complex64::ZERO; len];
        g[p] = Complex64::ONE;
        Ok(Self { g })
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.g
    }

    pub fn len(&self) -> usize {
        self.g.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g.is_empty()
    }

    pub fn norm(&self) -> f64 {
        l2(&self.g)
    }

    /// `self† · other`.
    pub fn inner(&self, other: &ModalAmplitudes) -> Complex64 {
        self.g.iter().zip(&other.g).map(|(a, b)| a.conj() * b).sum()
    }

    /// Zeroes entries below `rel · max|g|` and renormalizes.
    pub fn truncated(&self, rel: f64) -> Self {
        let peak = self.g.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let g: Vec<Complex64> =
            self.g.iter().map(|&v| if v.norm() < rel * peak { Complex64::ZERO } else { v }).collect();
        let norm = l2(&g);
        Self { g: g.into_iter().map(|v| v / norm).collect() }
    }

    pub fn support(&self) -> usize {
        self.g.iter().filter(|v| **v != Complex64::ZERO).count()
    }
}

fn l2(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Packet sampled at the unknowns of the basis mesh.
pub fn sample_packet(packet: &WavePacket, basis: &ModeBasis) -> Vec<Complex64> {
    basis.system.mesh.dof_nodes().iter().map(|&x| packet.evaluate(x)).collect()
}

/// `g = Φ† M G` rescaled to unit norm.
pub fn project_packet(packet: &WavePacket, basis: &ModeBasis) -> Result<ModalAmplitudes> {
    let samples = sample_packet(packet, basis);
    project_samples(&samples, basis)
}

pub fn project_samples(samples: &[Complex64], basis: &ModeBasis) -> Result<ModalAmplitudes> {
    if samples.len() != basis.dim() {
        return Err(Error::DimensionMismatch { expected: basis.dim(), got: samples.len() });
    }
    let mass_norm = basis.system.m.form(samples, samples).re.max(0.0).sqrt();
    let g = basis.project(samples);
    let norm = l2(&g);
    if !(mass_norm > 0.0) || norm < DEGENERATE_PROJECTION * mass_norm {
        return Err(Error::DegenerateProjection { norm });
    }
    ModalAmplitudes::normalized(g)
}

/// Vacuum, one photon `B†|0⟩`, or the product `B₁† B₂† |0⟩`.
#[derive(Debug, Clone, PartialEq)]
pub enum PhotonState {
    Vacuum,
    One(ModalAmplitudes),
    Two(ModalAmplitudes, ModalAmplitudes),
}

impl PhotonState {
    pub fn arity(&self) -> usize {
        match self {
            PhotonState::Vacuum => 0,
            PhotonState::One(_) => 1,
            PhotonState::Two(..) => 2,
        }
    }

    /// `⟨Ψ|Ψ⟩`; a two-photon product state carries `1 + |β₁†β₂|²`.
    pub fn norm_sqr(&self) -> f64 {
        match self {
            PhotonState::Vacuum => 1.0,
            PhotonState::One(b) => b.norm().powi(2),
            PhotonState::Two(b1, b2) => b1.norm().powi(2) * b2.norm().powi(2) + b1.inner(b2).norm_sqr(),
        }
    }

    pub fn amplitudes(&self) -> Vec<&ModalAmplitudes> {
        match self {
            PhotonState::Vacuum => vec![],
            PhotonState::One(b) => vec![b],
            PhotonState::Two(b1, b2) => vec![b1, b2],
        }
    }

    pub fn mode_count(&self) -> Option<usize> {
        self.amplitudes().first().map(|b| b.len())
    }
}

pub fn make_two_photon(left: ModalAmplitudes, right: ModalAmplitudes) -> PhotonState {
    PhotonState::Two(left, right)
}
