//! Vacuum expectations of ordered products of linear forms in bosonic ladder
//! operators.
//!
//! A factor is `Σ_p c_p â_p` or `Σ_p c_p â†_p`. Moving an annihilation form
//! `Â` (coefficients α) past a creation form `B̂` (coefficients β) uses
//! `Â B̂ = B̂ Â + (αᵗ·β) Î`, and `Â|0⟩ = 0`. The vacuum expectation is therefore
//! the sum over complete pairings in which every annihilation factor is
//! matched with a creation factor to its right, each pair contributing `αᵗ·β`.

use std::collections::HashMap;

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LadderKind {
    Annihilation,
    Creation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LadderFactor {
    pub kind: LadderKind,
    pub coeff: Vec<Complex64>,
}

impl LadderFactor {
    pub fn annihilation(coeff: Vec<Complex64>) -> Self {
        Self { kind: LadderKind::Annihilation, coeff }
    }

    pub fn creation(coeff: Vec<Complex64>) -> Self {
        Self { kind: LadderKind::Creation, coeff }
    }

    /// Hermitian adjoint: kind flipped, coefficients conjugated.
    pub fn adjoint(&self) -> Self {
        let kind = match self.kind {
            LadderKind::Annihilation => LadderKind::Creation,
            LadderKind::Creation => LadderKind::Annihilation,
        };
        Self { kind, coeff: self.coeff.iter().map(|c| c.conj()).collect() }
    }
}

/// Ordered product; the rightmost factor acts on the ket first.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LadderProduct {
    pub factors: Vec<LadderFactor>,
}

impl LadderProduct {
    pub fn new(factors: Vec<LadderFactor>) -> Self {
        Self { factors }
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn push(&mut self, f: LadderFactor) {
        self.factors.push(f);
    }

    pub fn vacuum_expectation(&self) -> Complex64 {
        vacuum_expectation(self)
    }
}

/// `αᵗ·β` (no conjugation).
pub fn contract(alpha: &[Complex64], beta: &[Complex64]) -> Complex64 {
    alpha.iter().zip(beta).map(|(a, b)| a * b).sum()
}

pub fn vacuum_expectation(expr: &LadderProduct) -> Complex64 {
    let f = &expr.factors;
    let n = f.len();
    assert!(n <= 64, "ladder products are limited to 64 factors");
    let annihilations = f.iter().filter(|x| x.kind == LadderKind::Annihilation).count();
    if n == 0 {
        return Complex64::ONE;
    }
    if 2 * annihilations != n {
        return Complex64::ZERO;
    }
    let mut table = vec![Complex64::ZERO; n * n];
    for i in 0..n {
        if f[i].kind != LadderKind::Annihilation {
            continue;
        }
        for j in i + 1..n {
            if f[j].kind == LadderKind::Creation {
                table[i * n + j] = contract(&f[i].coeff, &f[j].coeff);
            }
        }
    }
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut memo = HashMap::new();
    pairings(full, f, &table, n, &mut memo)
}

fn pairings(
    remaining: u64,
    f: &[LadderFactor],
    table: &[Complex64],
    n: usize,
    memo: &mut HashMap<u64, Complex64>,
) -> Complex64 {
    if remaining == 0 {
        return Complex64::ONE;
    }
    if let Some(v) = memo.get(&remaining) {
        return *v;
    }
    let i = remaining.trailing_zeros() as usize;
    let mut total = Complex64::ZERO;
    // the leftmost surviving factor must be an annihilator; a creator there kills the bra
    if f[i].kind == LadderKind::Annihilation {
        let rest = remaining & !(1u64 << i);
        let mut scan = rest;
        while scan != 0 {
            let j = scan.trailing_zeros() as usize;
            scan &= scan - 1;
            let c = table[i * n + j];
            if f[j].kind == LadderKind::Creation && c != Complex64::ZERO {
                total += c * pairings(rest & !(1u64 << j), f, table, n, memo);
            }
        }
    }
    memo.insert(remaining, total);
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_contraction() {
        let a = vec![c(1.0, 2.0), c(0.5, -1.0)];
        let b = vec![c(-0.3, 0.1), c(2.0, 0.0)];
        let p = LadderProduct::new(vec![LadderFactor::annihilation(a.clone()), LadderFactor::creation(b.clone())]);
        assert_eq!(p.vacuum_expectation(), contract(&a, &b));
        let reversed = LadderProduct::new(vec![LadderFactor::creation(b), LadderFactor::annihilation(a)]);
        assert_eq!(reversed.vacuum_expectation(), Complex64::ZERO);
    }

    #[test]
    fn unbalanced_products_vanish() {
        let v = vec![c(1.0, 0.0)];
        let p = LadderProduct::new(vec![
            LadderFactor::annihilation(v.clone()),
            LadderFactor::creation(v.clone()),
            LadderFactor::creation(v),
        ]);
        assert_eq!(p.vacuum_expectation(), Complex64::ZERO);
    }

    #[test]
    fn two_photons_in_one_mode_have_norm_two() {
        let v = vec![c(1.0, 0.0)];
        let p = LadderProduct::new(vec![
            LadderFactor::annihilation(v.clone()),
            LadderFactor::annihilation(v.clone()),
            LadderFactor::creation(v.clone()),
            LadderFactor::creation(v),
        ]);
        assert!((p.vacuum_expectation() - c(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn empty_product_is_one() {
        assert_eq!(LadderProduct::default().vacuum_expectation(), Complex64::ONE);
    }

    #[test]
    fn adjoint_flips_kind() {
        let f = LadderFactor::creation(vec![c(1.0, 1.0)]);
        let a = f.adjoint();
        assert_eq!(a.kind, LadderKind::Annihilation);
        assert_eq!(a.coeff[0], c(1.0, -1.0));
    }
}
