//! C ABI over `ncq`.
//!
//! Every fallible call returns an [`NcqStatus`]; on failure the message is
//! available from [`ncq_last_error_message`] on the same thread. Objects are
//! opaque handles released with their `_free` function.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use ncq::assembly::{BlochSystem, Method};
use ncq::correlations::DenominatorConvention;
use ncq::experiments::{hom_basis, run_hom_on, CorrelationCurve, HomConfig};
use ncq::medium::{Mesh1D, PermittivityProfile, PhysicalConstants};
use ncq::modes::{check_orthonormality, default_omega_floor, solve_modes, ModeBasis};
use ncq::packets::Shape;
use ncq::tmm::{band_frequency, slab_rt};
use ncq::Error;

pub const NCQ_METHOD_FDM: u32 = 0;
pub const NCQ_METHOD_FEM: u32 = 1;
pub const NCQ_SHAPE_GAUSSIAN: u32 = 0;
pub const NCQ_SHAPE_LORENTZIAN: u32 = 1;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NcqStatus {
    Ok = 0,
    NullPointer = 1,
    /// Mesh, profile or parameter rejected before any computation.
    InvalidArgument = 2,
    /// Eigensolver failure, degenerate projection or dark detector.
    Numerical = 3,
    /// Photon state has the wrong arity, norm or dimension.
    InvalidState = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> NcqStatus {
    match e {
        Error::InvalidMesh(_) | Error::InvalidProfile(_) | Error::MeshAlignment { .. } | Error::Config(_) => {
            NcqStatus::InvalidArgument
        }
        Error::Unnormalized { .. }
        | Error::Arity { .. }
        | Error::DimensionMismatch { .. }
        | Error::TruncationExceeded { .. }
        | Error::IndexOutOfRange { .. } => NcqStatus::InvalidState,
        _ => NcqStatus::Numerical,
    }
}

struct Fail(NcqStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> NcqStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NcqStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            NcqStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(NcqStatus::NullPointer, format!("{what} is null"))
}

fn method(code: u32) -> Result<Method, Fail> {
    match code {
        NCQ_METHOD_FDM => Ok(Method::Fdm),
        NCQ_METHOD_FEM => Ok(Method::Fem),
        other => Err(Fail(NcqStatus::InvalidArgument, format!("unknown method code {other}"))),
    }
}

fn shape(code: u32) -> Result<Shape, Fail> {
    match code {
        NCQ_SHAPE_GAUSSIAN => Ok(Shape::Gaussian),
        NCQ_SHAPE_LORENTZIAN => Ok(Shape::Lorentzian),
        other => Err(Fail(NcqStatus::InvalidArgument, format!("unknown shape code {other}"))),
    }
}

/// Copies `src` into the caller's buffer of `len` elements.
///
/// # Safety
/// `dst` must be valid for `len` writes.
unsafe fn copy_out(src: &[f64], dst: *mut f64, len: usize) -> Result<(), Fail> {
    if dst.is_null() {
        return Err(null("output buffer"));
    }
    if len < src.len() {
        return Err(Fail(NcqStatus::BufferTooSmall, format!("buffer holds {len}, need {}", src.len())));
    }
    std::ptr::copy_nonoverlapping(src.as_ptr(), dst, src.len());
    Ok(())
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn ncq_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => c"unknown",
    };
    VERSION.as_ptr()
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ncq_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct NcqSlabResponse {
    pub r_re: f64,
    pub r_im: f64,
    pub t_re: f64,
    pub t_im: f64,
    pub reflectance: f64,
    pub transmittance: f64,
    /// arg R − arg T in degrees.
    pub phase_difference_deg: f64,
}

/// Normal-incidence response of a slab in vacuum.
///
/// # Safety
/// `out` must point to writable memory for one `NcqSlabResponse`.
#[no_mangle]
pub unsafe extern "C" fn ncq_slab_rt(eps_s: f64, rs: f64, kappa: f64, out: *mut NcqSlabResponse) -> NcqStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if !(eps_s > 0.0) || !(rs > 0.0) || !kappa.is_finite() {
            return Err(Fail(NcqStatus::InvalidArgument, "need eps_s > 0, rs > 0 and finite kappa".into()));
        }
        let s = slab_rt(eps_s, rs, kappa);
        *out = NcqSlabResponse {
            r_re: s.r.re,
            r_im: s.r.im,
            t_re: s.t.re,
            t_im: s.t.im,
            reflectance: s.reflectance(),
            transmittance: s.transmittance(),
            phase_difference_deg: s.phase_difference_deg(),
        };
        Ok(())
    })
}

/// Analytic frequency (rad/s) of 0-based `band` at folded wavenumber `kappa`.
///
/// # Safety
/// `out` must point to a writable `double`.
#[no_mangle]
pub unsafe extern "C" fn ncq_band_frequency(
    eps_s: f64,
    rs: f64,
    rx: f64,
    kappa: f64,
    band: usize,
    out: *mut f64,
) -> NcqStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if !(eps_s > 0.0) || !(rs > 0.0) || !(rx > rs) || !kappa.is_finite() {
            return Err(Fail(NcqStatus::InvalidArgument, "need eps_s > 0 and 0 < rs < rx".into()));
        }
        let c = PhysicalConstants::CODATA.c();
        match band_frequency(eps_s, rs, rx, kappa, band, c) {
            Some(w) => {
                *out = w;
                Ok(())
            }
            None => Err(Fail(NcqStatus::Numerical, format!("band {band} not found"))),
        }
    })
}

/// Mass-orthonormal Bloch mode basis of a slab cell.
pub struct NcqModeBasis {
    inner: Arc<ModeBasis>,
}

/// Solves the cell `[-rx/2, rx/2]` with `n0` grid points and a centred slab.
///
/// # Safety
/// `out` must point to a writable handle slot. On success `*out` owns a basis
/// that must be released with `ncq_modes_free`.
#[no_mangle]
pub unsafe extern "C" fn ncq_modes_solve(
    method_code: u32,
    rx: f64,
    n0: usize,
    eps_s: f64,
    rs: f64,
    theta0: f64,
    out: *mut *mut NcqModeBasis,
) -> NcqStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = std::ptr::null_mut();
        let mesh = Mesh1D::new(rx, n0)?;
        let profile = PermittivityProfile::slab(eps_s, rs)?;
        let sys = BlochSystem::assemble(method(method_code)?, &mesh, &profile, theta0, PhysicalConstants::CODATA)?;
        let basis = solve_modes(&sys, default_omega_floor(&sys))?;
        *out = Box::into_raw(Box::new(NcqModeBasis { inner: Arc::new(basis) }));
        Ok(())
    })
}

/// # Safety
/// `basis` must be NULL or a live handle from `ncq_modes_solve`; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn ncq_modes_free(basis: *mut NcqModeBasis) {
    if !basis.is_null() {
        drop(Box::from_raw(basis));
    }
}

/// Number of modes, 0 for NULL.
///
/// # Safety
/// `basis` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ncq_modes_count(basis: *const NcqModeBasis) -> usize {
    basis.as_ref().map_or(0, |b| b.inner.len())
}

/// Number of unknowns (grid points minus one), 0 for NULL.
///
/// # Safety
/// `basis` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ncq_modes_dim(basis: *const NcqModeBasis) -> usize {
    basis.as_ref().map_or(0, |b| b.inner.dim())
}

/// Copies the ascending angular frequencies (rad/s).
///
/// # Safety
/// `basis` must be a live handle and `buf` valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ncq_modes_omega(basis: *const NcqModeBasis, buf: *mut f64, len: usize) -> NcqStatus {
    guard(|| {
        let b = basis.as_ref().ok_or_else(|| null("basis"))?;
        copy_out(&b.inner.omega, buf, len)
    })
}

/// Copies the wavenumber label (rad/m) of each mode.
///
/// # Safety
/// `basis` must be a live handle and `buf` valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ncq_modes_kappa(basis: *const NcqModeBasis, buf: *mut f64, len: usize) -> NcqStatus {
    guard(|| {
        let b = basis.as_ref().ok_or_else(|| null("basis"))?;
        copy_out(&b.inner.kappa, buf, len)
    })
}

/// Copies mode `p` into separate real and imaginary buffers of `len` entries.
///
/// # Safety
/// `basis` must be a live handle; `re` and `im` valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ncq_modes_vector(
    basis: *const NcqModeBasis,
    p: usize,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> NcqStatus {
    guard(|| {
        let b = basis.as_ref().ok_or_else(|| null("basis"))?;
        if p >= b.inner.len() {
            return Err(Error::IndexOutOfRange { index: p, len: b.inner.len() }.into());
        }
        let col = b.inner.column(p);
        copy_out(&col.iter().map(|z| z.re).collect::<Vec<_>>(), re, len)?;
        copy_out(&col.iter().map(|z| z.im).collect::<Vec<_>>(), im, len)
    })
}

/// Largest off-diagonal magnitude and diagonal deviation of `Φ†MΦ`.
///
/// # Safety
/// `basis` must be a live handle; both outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn ncq_modes_orthonormality(
    basis: *const NcqModeBasis,
    max_offdiag: *mut f64,
    max_diag_deviation: *mut f64,
) -> NcqStatus {
    guard(|| {
        let b = basis.as_ref().ok_or_else(|| null("basis"))?;
        if max_offdiag.is_null() || max_diag_deviation.is_null() {
            return Err(null("output"));
        }
        let o = check_orthonormality(&b.inner);
        *max_offdiag = o.max_offdiag;
        *max_diag_deviation = o.max_diag_deviation;
        Ok(())
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct NcqHomParams {
    pub rx: f64,
    pub n0: usize,
    pub eps_s: f64,
    pub rs: f64,
    pub theta0: f64,
    /// `NCQ_METHOD_FDM` or `NCQ_METHOD_FEM`.
    pub method: u32,
    pub x0: f64,
    pub dx0: f64,
    pub kappa0: f64,
    /// `NCQ_SHAPE_GAUSSIAN` or `NCQ_SHAPE_LORENTZIAN`.
    pub left_shape: u32,
    pub right_shape: u32,
    /// Nonzero evaluates the first intensity at the second detector.
    pub literal_denominator: u32,
    /// Nonzero drops modes with negligible packet amplitude.
    pub truncate_modes: u32,
}

impl NcqHomParams {
    fn to_config(self, tau: Vec<f64>) -> Result<HomConfig, Fail> {
        Ok(HomConfig {
            rx: self.rx,
            n0: self.n0,
            eps_s: self.eps_s,
            rs: self.rs,
            theta0: self.theta0,
            method: method(self.method)?,
            x0: self.x0,
            dx0: self.dx0,
            kappa0: self.kappa0,
            left_shape: shape(self.left_shape)?,
            right_shape: shape(self.right_shape)?,
            tau_grid: tau,
            convention: if self.literal_denominator != 0 {
                DenominatorConvention::LiteralSecondNode
            } else {
                DenominatorConvention::PerEvent
            },
            truncate_modes: self.truncate_modes != 0,
            constants: PhysicalConstants::CODATA,
        })
    }
}

/// Fills `out` with the slab beam-splitter defaults.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ncq_hom_params_default(out: *mut NcqHomParams) -> NcqStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let d = HomConfig::default();
        *out = NcqHomParams {
            rx: d.rx,
            n0: d.n0,
            eps_s: d.eps_s,
            rs: d.rs,
            theta0: d.theta0,
            method: NCQ_METHOD_FEM,
            x0: d.x0,
            dx0: d.dx0,
            kappa0: d.kappa0,
            left_shape: NCQ_SHAPE_GAUSSIAN,
            right_shape: NCQ_SHAPE_GAUSSIAN,
            literal_denominator: 0,
            truncate_modes: 0,
        };
        Ok(())
    })
}

/// `g²` against delay for one two-photon experiment.
pub struct NcqHomCurve {
    inner: CorrelationCurve,
}

unsafe fn read_tau(tau: *const f64, n_tau: usize) -> Result<Vec<f64>, Fail> {
    if tau.is_null() {
        return Err(null("tau"));
    }
    Ok(std::slice::from_raw_parts(tau, n_tau).to_vec())
}

/// Solves the modes described by `params` and sweeps the `n_tau` delays (s).
///
/// # Safety
/// `params` must be readable, `tau` valid for `n_tau` doubles, `out` writable.
/// `*out` must be released with `ncq_hom_curve_free`.
#[no_mangle]
pub unsafe extern "C" fn ncq_hom_run(
    params: *const NcqHomParams,
    tau: *const f64,
    n_tau: usize,
    out: *mut *mut NcqHomCurve,
) -> NcqStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = std::ptr::null_mut();
        let p = params.as_ref().ok_or_else(|| null("params"))?;
        let cfg = p.to_config(read_tau(tau, n_tau)?)?;
        let basis = hom_basis(&cfg)?;
        let curve = run_hom_on(&cfg, basis)?;
        *out = Box::into_raw(Box::new(NcqHomCurve { inner: curve }));
        Ok(())
    })
}

/// As `ncq_hom_run` on an existing basis. The medium fields of `params`
/// (`rx`, `n0`, `eps_s`, `rs`, `theta0`, `method`) are taken from the basis.
///
/// # Safety
/// As `ncq_hom_run`; `basis` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ncq_hom_run_with_basis(
    basis: *const NcqModeBasis,
    params: *const NcqHomParams,
    tau: *const f64,
    n_tau: usize,
    out: *mut *mut NcqHomCurve,
) -> NcqStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = std::ptr::null_mut();
        let b = basis.as_ref().ok_or_else(|| null("basis"))?;
        let p = params.as_ref().ok_or_else(|| null("params"))?;
        let sys = &b.inner.system;
        let cfg = HomConfig {
            rx: sys.mesh.rx(),
            n0: sys.mesh.n0(),
            eps_s: sys.profile.eps_s(),
            rs: sys.profile.rs(),
            theta0: sys.theta0,
            method: sys.method,
            ..p.to_config(read_tau(tau, n_tau)?)?
        };
        let curve = run_hom_on(&cfg, b.inner.clone())?;
        *out = Box::into_raw(Box::new(NcqHomCurve { inner: curve }));
        Ok(())
    })
}

/// # Safety
/// `curve` must be NULL or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn ncq_hom_curve_free(curve: *mut NcqHomCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// Number of delays, 0 for NULL.
///
/// # Safety
/// `curve` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ncq_hom_curve_len(curve: *const NcqHomCurve) -> usize {
    curve.as_ref().map_or(0, |c| c.inner.points.len())
}

/// Copies delays (s) and `g²` values, in input order.
///
/// # Safety
/// `curve` must be a live handle; `tau` and `g2` valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ncq_hom_curve_points(
    curve: *const NcqHomCurve,
    tau: *mut f64,
    g2: *mut f64,
    len: usize,
) -> NcqStatus {
    guard(|| {
        let c = curve.as_ref().ok_or_else(|| null("curve"))?;
        copy_out(&c.inner.points.iter().map(|p| p.tau).collect::<Vec<_>>(), tau, len)?;
        copy_out(&c.inner.points.iter().map(|p| p.g2).collect::<Vec<_>>(), g2, len)
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct NcqHomSummary {
    /// `g²` at the delay closest to zero.
    pub dip: f64,
    pub dip_tau: f64,
    /// Mean tail `g²`; NaN when no delay reaches the tails.
    pub baseline: f64,
    /// `1 − dip/baseline`; NaN without a baseline.
    pub visibility: f64,
}

/// # Safety
/// `curve` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ncq_hom_curve_summary(curve: *const NcqHomCurve, out: *mut NcqHomSummary) -> NcqStatus {
    guard(|| {
        let c = curve.as_ref().ok_or_else(|| null("curve"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = NcqHomSummary {
            dip: c.inner.dip,
            dip_tau: c.inner.dip_tau,
            baseline: c.inner.baseline.unwrap_or(f64::NAN),
            visibility: c.inner.visibility.unwrap_or(f64::NAN),
        };
        Ok(())
    })
}
