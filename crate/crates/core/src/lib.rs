//! Numerical canonical quantization of 1-D Bloch-periodic dielectric media.
//!
//! The pipeline runs mesh and permittivity profile, then Bloch system assembly
//! (FDM or FEM), the mass-orthonormal mode basis, the quantized field, photon
//! states, and finally correlation functions.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assembly;
pub mod band;
pub mod config;
pub mod correlations;
pub mod error;
pub mod experiments;
pub mod fock;
pub mod ladder;
pub mod medium;
pub mod modes;
pub mod packets;
pub mod quantize;
pub mod stokes;
pub mod tmm;
pub mod validate;

pub use assembly::{BlochSystem, Method};
pub use error::{Error, Result};
pub use medium::{Mesh1D, PermittivityProfile, PhysicalConstants};
pub use modes::ModeBasis;
pub use num_complex::Complex64;
