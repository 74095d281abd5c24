//! Analytic transfer-matrix results: normal-incidence slab response and the
//! Bloch dispersion of a two-layer unit cell.

use std::f64::consts::PI;

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlabResponse {
    pub kappa: f64,
    pub r: Complex64,
    pub t: Complex64,
}

impl SlabResponse {
    pub fn reflectance(&self) -> f64 {
        self.r.norm_sqr()
    }

    pub fn transmittance(&self) -> f64 {
        self.t.norm_sqr()
    }

    /// `arg R − arg T` in degrees, wrapped into `(-180, 180]`.
    pub fn phase_difference_deg(&self) -> f64 {
        let d = (self.r * self.t.conj()).arg().to_degrees();
        if d <= -180.0 {
            d + 360.0
        } else {
            d
        }
    }
}

/// Slab of relative permittivity `eps_s` and thickness `rs` in vacuum.
///
/// `R` is referred to the entry face and `T` carries the transmitted wave back
/// to the entry face (`E_t(x) = T e^{iκ(x + Rs/2)}` is written relative to the
/// entry plane), so `arg R − arg T` is the phase offset between the two output
/// arms as launched from the same reference plane.
pub fn slab_rt(eps_s: f64, rs: f64, kappa: f64) -> SlabResponse {
    let n = eps_s.sqrt();
    let r12 = (1.0 - n) / (1.0 + n);
    let ph = Complex64::from_polar(1.0, n * kappa * rs);
    let ph2 = ph * ph;
    let denom = Complex64::ONE - ph2 * (r12 * r12);
    let r = (Complex64::ONE - ph2) * r12 / denom;
    // exit-face transmission, then the vacuum propagation phase over the slab removed
    let t_exit = ph * (1.0 - r12 * r12) / denom;
    let t = t_exit * Complex64::from_polar(1.0, -kappa * rs);
    SlabResponse { kappa, r, t }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignRow {
    pub kappa: f64,
    pub r2: f64,
    pub t2: f64,
    pub phase_diff_deg: f64,
}

pub fn design_scan(eps_s: f64, rs: f64, kappas: &[f64]) -> Vec<DesignRow> {
    kappas
        .iter()
        .map(|&k| {
            let s = slab_rt(eps_s, rs, k);
            DesignRow { kappa: k, r2: s.reflectance(), t2: s.transmittance(), phase_diff_deg: s.phase_difference_deg() }
        })
        .collect()
}

/// `cos(k₁d₁)cos(k₂d₂) − ½(k₁/k₂ + k₂/k₁) sin(k₁d₁) sin(k₂d₂)`.
pub fn dispersion_trace(eps_s: f64, rs: f64, rx: f64, omega: f64, c: f64) -> f64 {
    let k1 = omega / c;
    let k2 = eps_s.sqrt() * omega / c;
    let d1 = rx - rs;
    let d2 = rs;
    (k1 * d1).cos() * (k2 * d2).cos() - 0.5 * (k1 / k2 + k2 / k1) * (k1 * d1).sin() * (k2 * d2).sin()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BlochSolution {
    /// Folded wavenumber in `[0, π/Rx]`.
    Propagating(f64),
    Gap { trace: f64 },
}

impl BlochSolution {
    pub fn kappa(&self) -> Option<f64> {
        match self {
            BlochSolution::Propagating(k) => Some(*k),
            BlochSolution::Gap { .. } => None,
        }
    }
}

pub fn bloch_dispersion(eps_s: f64, rs: f64, rx: f64, omega: f64, c: f64) -> BlochSolution {
    let trace = dispersion_trace(eps_s, rs, rx, omega, c);
    if trace.abs() > 1.0 {
        BlochSolution::Gap { trace }
    } else {
        BlochSolution::Propagating(trace.acos() / rx)
    }
}

/// Frequency of band `band` (0-based) at folded wavenumber `kappa ∈ [0, π/Rx]`.
///
/// Roots of `trace(ω) = cos(κRx)` are bracketed on a fine ω grid and bisected.
/// At the zone centre and edge, bands of a gapless cell touch the target
/// tangentially; such touches are located as extrema of the trace and counted
/// twice.
pub fn band_frequency(eps_s: f64, rs: f64, rx: f64, kappa: f64, band: usize, c: f64) -> Option<f64> {
    let target = (kappa.abs() * rx).cos();
    let f = |w: f64| dispersion_trace(eps_s, rs, rx, w, c) - target;
    let n_max = eps_s.sqrt().max(1.0);
    // a band spans at least π c/(Rx n_max) in ω
    let step = PI * c / (rx * n_max * 64.0);
    let edge = target.abs() >= 1.0 - 1e-15;
    let mut roots: Vec<f64> = Vec::new();
    if target >= 1.0 - 1e-15 {
        roots.push(0.0);
    }
    let limit = 64 * 4 * (band + 2) * (n_max.ceil() as usize + 1);
    let (mut w_prev, mut f_prev) = (f64::NAN, f64::NAN);
    // offset keeps grid points off the exact band-edge frequencies m·πc/Rx
    let offset = std::f64::consts::FRAC_1_PI;
    // trace(0) = 1; the zone-centre root at ω = 0 is already counted above
    let (mut w0, mut f0) = if roots.is_empty() { (0.0, 1.0 - target) } else { (offset * step, f(offset * step)) };
    for i in 1..limit {
        if roots.len() > band {
            break;
        }
        let w1 = (i as f64 + offset) * step;
        let f1 = f(w1);
        if f0 == 0.0 || f0.signum() != f1.signum() {
            roots.push(bisect(&f, w0, f0, w1));
        } else if edge && f_prev.is_finite() {
            // extremum of f at w0 pointing towards zero
            let towards = if target > 0.0 { f0 > f_prev && f0 > f1 } else { f0 < f_prev && f0 < f1 };
            if towards {
                let w = extremum(&f, w_prev, w1, target > 0.0);
                if f(w).abs() < 1e-10 {
                    roots.push(w);
                    roots.push(w);
                }
            }
        }
        w_prev = w0;
        f_prev = f0;
        w0 = w1;
        f0 = f1;
    }
    roots.get(band).copied()
}

/// Golden-section search for the maximum (or minimum) of `f` on `[a, b]`.
fn extremum(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, maximize: bool) -> f64 {
    let g = |w: f64| if maximize { -f(w) } else { f(w) };
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut g1, mut g2) = (g(x1), g(x2));
    for _ in 0..200 {
        if (b - a) <= 1e-15 * b {
            break;
        }
        if g1 < g2 {
            b = x2;
            x2 = x1;
            g2 = g1;
            x1 = b - r * (b - a);
            g1 = g(x1);
        } else {
            a = x1;
            x1 = x2;
            g1 = g2;
            x2 = a + r * (b - a);
            g2 = g(x2);
        }
    }
    0.5 * (a + b)
}

fn bisect(f: &impl Fn(f64) -> f64, mut a: f64, mut fa: f64, mut b: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 || (b - a) <= 1e-15 * m {
            return m;
        }
        if fa.signum() == fm.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}
