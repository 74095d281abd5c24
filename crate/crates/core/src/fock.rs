//! Dense truncated Fock-space evaluation of ladder products.
//!
//! Kept independent of the pairing engine: operators act on explicit
//! occupation-number vectors. With a per-mode cutoff equal to the number of
//! creation factors, no intermediate state is ever truncated, so the result
//! is exact.

use num_complex::Complex64;

use crate::ladder::{LadderKind, LadderProduct};

pub const MAX_MODES: usize = 4;

/// Dense state over occupations `0..=cutoff` in each of `modes` modes.
#[derive(Debug, Clone)]
pub struct FockVector {
    modes: usize,
    cutoff: usize,
    amp: Vec<Complex64>,
}

impl FockVector {
    pub fn vacuum(modes: usize, cutoff: usize) -> Self {
        let dim = (cutoff + 1).pow(modes as u32);
        let mut amp = vec![Complex64::ZERO; dim];
        amp[0] = Complex64::ONE;
        Self { modes, cutoff, amp }
    }

    fn stride(&self, p: usize) -> usize {
        (self.cutoff + 1).pow(p as u32)
    }

    fn occupation(&self, index: usize, p: usize) -> usize {
        (index / self.stride(p)) % (self.cutoff + 1)
    }

    /// `Σ_p c_p â_p` applied to the state.
    pub fn annihilate(&self, coeff: &[Complex64]) -> Self {
        let mut out = vec![Complex64::ZERO; self.amp.len()];
        for (idx, &v) in self.amp.iter().enumerate() {
            if v == Complex64::ZERO {
                continue;
            }
            for (p, &cp) in coeff.iter().enumerate().take(self.modes) {
                let n = self.occupation(idx, p);
                if n > 0 {
                    out[idx - self.stride(p)] += cp * (n as f64).sqrt() * v;
                }
            }
        }
        Self { modes: self.modes, cutoff: self.cutoff, amp: out }
    }

    /// `Σ_p c_p â†_p` applied to the state. Panics if the cutoff would be exceeded.
    pub fn create(&self, coeff: &[Complex64]) -> Self {
        let mut out = vec![Complex64::ZERO; self.amp.len()];
        for (idx, &v) in self.amp.iter().enumerate() {
            if v == Complex64::ZERO {
                continue;
            }
            for (p, &cp) in coeff.iter().enumerate().take(self.modes) {
                let n = self.occupation(idx, p);
                if cp == Complex64::ZERO {
                    continue;
                }
                assert!(n < self.cutoff, "Fock cutoff exceeded");
                out[idx + self.stride(p)] += cp * ((n + 1) as f64).sqrt() * v;
            }
        }
        Self { modes: self.modes, cutoff: self.cutoff, amp: out }
    }

    pub fn vacuum_amplitude(&self) -> Complex64 {
        self.amp[0]
    }

    pub fn dim(&self) -> usize {
        self.amp.len()
    }
}

/// `⟨0|expr|0⟩` by explicit state propagation, right to left.
pub fn fock_vacuum_expectation(expr: &LadderProduct) -> Complex64 {
    let modes = expr.factors.iter().map(|f| f.coeff.len()).max().unwrap_or(0);
    assert!(modes <= MAX_MODES, "dense Fock oracle is limited to {MAX_MODES} modes");
    let creations = expr.factors.iter().filter(|f| f.kind == LadderKind::Creation).count();
    let mut state = FockVector::vacuum(modes.max(1), creations.max(1));
    for f in expr.factors.iter().rev() {
        state = match f.kind {
            LadderKind::Annihilation => state.annihilate(&f.coeff),
            LadderKind::Creation => state.create(&f.coeff),
        };
    }
    state.vacuum_amplitude()
}
