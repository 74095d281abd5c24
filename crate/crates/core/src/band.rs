//! Hermitian matrices with cyclic tridiagonal sparsity, the pattern every
//! Bloch-periodic 1-D stencil produces.

use faer::Mat;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// `X = Σ_i diag[i] e_i e_iᵀ + Σ_i (upper[i] e_i e_{i+1}ᵀ + h.c.)`, indices mod n.
///
/// The sum form stays correct for n = 2, where both couplings land on the same
/// off-diagonal entry.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicHermitian {
    diag: Vec<f64>,
    upper: Vec<Complex64>,
}

impl CyclicHermitian {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 2, "cyclic band needs at least two unknowns");
        Self { diag: vec![0.0; n], upper: vec![Complex64::ZERO; n] }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn add_diag(&mut self, i: usize, v: f64) {
        self.diag[i] += v;
    }

    /// Adds `v` to the coupling between `i` and `i + 1 (mod n)` in row `i`.
    pub fn add_upper(&mut self, i: usize, v: Complex64) {
        self.upper[i] += v;
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn upper(&self) -> &[Complex64] {
        &self.upper
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let n = self.dim();
        let mut v = Complex64::ZERO;
        if i == j {
            v += self.diag[i];
        }
        if j == (i + 1) % n {
            v += self.upper[i];
        }
        if i == (j + 1) % n {
            v += self.upper[j].conj();
        }
        v
    }

    pub fn to_dense(&self) -> Mat<Complex64> {
        let n = self.dim();
        Mat::from_fn(n, n, |i, j| self.get(i, j))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            diag: self.diag.iter().map(|d| d * factor).collect(),
            upper: self.upper.iter().map(|u| u * factor).collect(),
        }
    }

    /// `y = X v`.
    pub fn apply(&self, v: &[Complex64], y: &mut [Complex64]) {
        let n = self.dim();
        for i in 0..n {
            let next = (i + 1) % n;
            let prev = (i + n - 1) % n;
            y[i] = v[i] * self.diag[i] + self.upper[i] * v[next] + self.upper[prev].conj() * v[prev];
        }
    }

    pub fn apply_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::ZERO; v.len()];
        self.apply(v, &mut y);
        y
    }

    /// `⟨u, X v⟩ = u† X v`.
    pub fn form(&self, u: &[Complex64], v: &[Complex64]) -> Complex64 {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let next = (i + 1) % n;
                let prev = (i + n - 1) % n;
                u[i].conj() * (v[i] * self.diag[i] + self.upper[i] * v[next] + self.upper[prev].conj() * v[prev])
            })
            .sum()
    }

    pub fn cholesky(&self) -> Result<CyclicCholesky> {
        CyclicCholesky::new(self)
    }
}

/// Lower factor `L` of a positive definite cyclic band matrix, `X = L L†`.
///
/// `L` is bidiagonal except for its last row, which fills in completely.
#[derive(Debug, Clone)]
pub struct CyclicCholesky {
    diag: Vec<f64>,
    sub: Vec<Complex64>,
    last: Vec<Complex64>,
}

impl CyclicCholesky {
    fn new(x: &CyclicHermitian) -> Result<Self> {
        let n = x.dim();
        let mut diag = vec![0.0; n];
        let mut sub = vec![Complex64::ZERO; n.saturating_sub(2)];
        let mut last = vec![Complex64::ZERO; n - 1];
        for i in 0..n - 1 {
            let mut d = x.get(i, i).re;
            if i > 0 && i - 1 < sub.len() {
                d -= sub[i - 1].norm_sqr();
            }
            if !(d > 0.0) {
                return Err(Error::MassNotPositiveDefinite);
            }
            diag[i] = d.sqrt();
            if i + 1 < n - 1 {
                sub[i] = x.get(i + 1, i) / diag[i];
            }
        }
        let mut acc = x.get(n - 1, n - 1).re;
        for j in 0..n - 1 {
            let mut v = x.get(n - 1, j);
            if j > 0 && j - 1 < sub.len() {
                v -= last[j - 1] * sub[j - 1].conj();
            }
            last[j] = v / diag[j];
            acc -= last[j].norm_sqr();
        }
        if !(acc > 0.0) {
            return Err(Error::MassNotPositiveDefinite);
        }
        diag[n - 1] = acc.sqrt();
        Ok(Self { diag, sub, last })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Solves `L y = b` in place.
    pub fn solve_lower(&self, b: &mut [Complex64]) {
        let n = self.dim();
        for i in 0..n - 1 {
            if i > 0 {
                let prev = b[i - 1];
                b[i] -= self.sub[i - 1] * prev;
            }
            b[i] /= self.diag[i];
        }
        let mut acc = b[n - 1];
        for (l, v) in self.last.iter().zip(&b[..n - 1]) {
            acc -= l * v;
        }
        b[n - 1] = acc / self.diag[n - 1];
    }

    /// Solves `L† x = y` in place.
    pub fn solve_upper_adjoint(&self, y: &mut [Complex64]) {
        let n = self.dim();
        y[n - 1] /= self.diag[n - 1];
        let tail = y[n - 1];
        for i in (0..n - 1).rev() {
            let mut v = y[i] - self.last[i].conj() * tail;
            if i + 1 < n - 1 {
                v -= self.sub[i].conj() * y[i + 1];
            }
            y[i] = v / self.diag[i];
        }
    }

    pub fn to_dense(&self) -> Mat<Complex64> {
        let n = self.dim();
        let mut l = Mat::<Complex64>::zeros(n, n);
        for i in 0..n {
            l[(i, i)] = Complex64::new(self.diag[i], 0.0);
        }
        for (i, &s) in self.sub.iter().enumerate() {
            l[(i + 1, i)] = s;
        }
        for (j, &v) in self.last.iter().enumerate() {
            l[(n - 1, j)] = v;
        }
        l
    }
}
