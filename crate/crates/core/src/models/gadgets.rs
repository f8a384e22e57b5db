//! Spectral gadgets from the complexity reductions.
//!
//! Clock registers use one qubit per clock position; position `t` is bit `t`
//! of the ancilla index, and the full basis index is `ancilla * d + system`.

use std::f64::consts::PI;

use crate::error::{ensure, Error, Result};
use crate::numlin::{eigh, ComplexMatrix, C64, ONE};

/// Largest operator dimension that gadget constructors will build.
pub const GADGET_DIM_CAP: usize = 4096;

fn ensure_psd(h: &ComplexMatrix) -> Result<()> {
    ensure!(h.is_square(), "gadget input must be square");
    let e = eigh(h)?;
    let floor = -1e-10 * h.max_abs().max(1.0);
    ensure!(e.values[0] >= floor, "gadget input must be positive semidefinite (min eigenvalue {:.3e})", e.values[0]);
    Ok(())
}

fn check_cap(needed: usize) -> Result<()> {
    if needed > GADGET_DIM_CAP {
        return Err(Error::Resource { needed, cap: GADGET_DIM_CAP });
    }
    Ok(())
}

/// The `Nm × Nm` cyclic amplification gadget: identity blocks on the block
/// superdiagonal and `H` in the bottom-left block.
pub fn cyclic_gadget(h: &ComplexMatrix, m: usize) -> Result<ComplexMatrix> {
    ensure!(m >= 1, "cycle length must be at least 1");
    ensure_psd(h)?;
    let n = h.rows();
    check_cap(n * m)?;
    let mut g = ComplexMatrix::zeros(n * m, n * m);
    for b in 0..m.saturating_sub(1) {
        for i in 0..n {
            g[(b * n + i, (b + 1) * n + i)] = ONE;
        }
    }
    for r in 0..n {
        for c in 0..n {
            g[((m - 1) * n + r, c)] += h[(r, c)];
        }
    }
    Ok(g)
}

/// Predicted spectrum `{e^{2πik/m} μ_j^{1/m}}` of [`cyclic_gadget`].
pub fn cyclic_gadget_spectrum(h: &ComplexMatrix, m: usize) -> Result<Vec<C64>> {
    let e = eigh(h)?;
    let mut out = Vec::with_capacity(e.values.len() * m);
    for &mu in &e.values {
        let r = mu.max(0.0).powf(1.0 / m as f64);
        for k in 0..m {
            out.push(C64::from_polar(r, 2.0 * PI * k as f64 / m as f64));
        }
    }
    Ok(out)
}

/// Block-diagonal `Σ_j |j⟩⟨j| ⊗ (H − z_j)`.
pub fn mesh_gadget(h: &ComplexMatrix, z_list: &[f64]) -> Result<ComplexMatrix> {
    ensure!(h.is_square(), "mesh gadget input must be square");
    ensure!(!z_list.is_empty(), "mesh gadget needs at least one grid point");
    let n = h.rows();
    check_cap(n * z_list.len())?;
    let mut a = ComplexMatrix::zeros(n * z_list.len(), n * z_list.len());
    for (j, &z) in z_list.iter().enumerate() {
        for r in 0..n {
            for c in 0..n {
                a[(j * n + r, j * n + c)] = h[(r, c)];
            }
            a[(j * n + r, j * n + r)] -= z;
        }
    }
    Ok(a)
}

/// Parameters of the local-Hamiltonian → pseudospectrum reduction for a
/// promise gap `[a, b]` with `b ≤ 2a`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClockReduction {
    pub m: usize,
    pub eps: f64,
    pub z_list: Vec<f64>,
    pub gamma_pen: f64,
}

impl ClockReduction {
    /// `m = ⌈3a/(b−a)⌉`, `z_j = (b−a)j/3` for `j = 1..=m`, `ε = (b−a)/3`,
    /// penalty `γ = m·a + 3ε`.
    pub fn from_promise(a: f64, b: f64) -> Result<Self> {
        ensure!(a > 0.0 && b > a, "need 0 < a < b, got a = {a}, b = {b}");
        let eps = (b - a) / 3.0;
        let m = (3.0 * a / (b - a)).ceil().max(1.0) as usize;
        let z_list = (1..=m).map(|j| (b - a) * j as f64 / 3.0).collect();
        Ok(Self { m, eps, z_list, gamma_pen: m as f64 * a + 3.0 * eps })
    }
}

/// Unary-clock embedding of [`mesh_gadget`]:
/// `Σ_j n̂_j ⊗ (H − z_j) + γ (Σ_j n̂_j − 1)² ⊗ I` on `m = z_list.len()` clock qubits.
pub fn clock_gadget(h: &ComplexMatrix, z_list: &[f64], gamma_pen: f64) -> Result<ComplexMatrix> {
    ensure!(h.is_square(), "clock gadget input must be square");
    ensure!(!z_list.is_empty(), "clock gadget needs at least one clock qubit");
    let m = z_list.len();
    ensure!(m < usize::BITS as usize - 1, "too many clock qubits");
    let d = h.rows();
    check_cap((1usize << m).saturating_mul(d))?;
    let dim = (1usize << m) * d;
    let mut a = ComplexMatrix::zeros(dim, dim);
    for anc in 0..1usize << m {
        let r = anc.count_ones() as f64;
        let zsum: f64 = (0..m).filter(|t| anc >> t & 1 == 1).map(|t| z_list[t]).sum();
        let base = anc * d;
        for i in 0..d {
            for j in 0..d {
                a[(base + i, base + j)] = h[(i, j)] * r;
            }
            a[(base + i, base + i)] += gamma_pen * (r - 1.0) * (r - 1.0) - zsum;
        }
    }
    Ok(a)
}

/// Default penalty `γ = R + 1` with `R = (m − 1) + ‖H‖`.
pub fn default_hopping_penalty(h: &ComplexMatrix, m: usize) -> Result<f64> {
    Ok(m as f64 - 1.0 + h.spectral_norm()? + 1.0)
}

/// Unary-clock embedding of [`cyclic_gadget`] with hopping terms
/// `Σ_{t≥1} σ⁻_t σ⁺_{t−1} ⊗ I + σ⁻_0 σ⁺_{m−1} ⊗ H` plus the occupation penalty.
pub fn hopping_clock_gadget(h: &ComplexMatrix, m: usize, gamma_pen: f64) -> Result<ComplexMatrix> {
    ensure!(h.is_square(), "hopping clock gadget input must be square");
    ensure!(m >= 2, "hopping clock gadget needs at least 2 clock qubits, got {m}");
    ensure!(m < usize::BITS as usize - 1, "too many clock qubits");
    let d = h.rows();
    check_cap((1usize << m).saturating_mul(d))?;
    let dim = (1usize << m) * d;
    let mut g = ComplexMatrix::zeros(dim, dim);
    for anc in 0..1usize << m {
        // σ⁺_{t−1} creates at t−1, σ⁻_t then annihilates at t.
        for t in 1..m {
            if anc >> t & 1 == 1 && anc >> (t - 1) & 1 == 0 {
                let dst = anc - (1 << t) + (1 << (t - 1));
                for s in 0..d {
                    g[(dst * d + s, anc * d + s)] += ONE;
                }
            }
        }
        if anc & 1 == 1 && anc >> (m - 1) & 1 == 0 {
            let dst = anc - 1 + (1 << (m - 1));
            for r in 0..d {
                for c in 0..d {
                    g[(dst * d + r, anc * d + c)] += h[(r, c)];
                }
            }
        }
        let occ = anc.count_ones() as f64;
        for s in 0..d {
            g[(anc * d + s, anc * d + s)] += gamma_pen * (occ - 1.0) * (occ - 1.0);
        }
    }
    Ok(g)
}

/// Basis indices of the sector with exactly `r` clock excitations, ordered by
/// ancilla index then system index.
pub fn excitation_sector(m: usize, d: usize, r: u32) -> Vec<usize> {
    (0..1usize << m).filter(|a| a.count_ones() == r).flat_map(|a| (0..d).map(move |s| a * d + s)).collect()
}

/// Basis indices of the one-hot sector ordered by clock position `t = 0..m`,
/// so that the restriction lines up block-for-block with the unencoded gadget.
pub fn one_hot_sector(m: usize, d: usize) -> Vec<usize> {
    (0..m).flat_map(|t| (0..d).map(move |s| (1usize << t) * d + s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{eigvals, spectrum_distance};

    fn psd2() -> ComplexMatrix {
        let b = ComplexMatrix::from_rows(&[vec![C64::new(0.7, 0.0), C64::new(0.2, -0.4)], vec![C64::new(-0.1, 0.3), C64::new(0.5, 0.0)]]);
        b.adjoint_mul(&b)
    }

    #[test]
    fn scalar_gadget_lands_on_half_circle() {
        for m in 1..=8 {
            let delta = 2f64.powi(-(m as i32));
            let g = cyclic_gadget(&ComplexMatrix::diag_real(&[delta]), m).unwrap();
            for z in eigvals(&g).unwrap() {
                assert!((z.norm() - 0.5).abs() < 1e-10, "m={m}: {z}");
            }
        }
    }

    #[test]
    fn singular_input_gives_zero_eigenvalue() {
        let h = ComplexMatrix::diag_real(&[0.0, 0.6]);
        let g = cyclic_gadget(&h, 3).unwrap();
        let ev = eigvals(&g).unwrap();
        let smallest = ev.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
        // Zero is a defective eigenvalue of the gadget, accurate only to eps^(1/m).
        assert!(smallest < 1e-4, "{ev:?}");
    }

    #[test]
    fn cyclic_gadget_rejects_bad_inputs() {
        assert!(cyclic_gadget(&ComplexMatrix::diag_real(&[1.0]), 0).is_err());
        assert!(cyclic_gadget(&ComplexMatrix::diag_real(&[-1.0]), 2).is_err());
    }

    #[test]
    fn mesh_with_single_point_is_shift() {
        let h = psd2();
        let a = mesh_gadget(&h, &[0.0]).unwrap();
        assert_eq!(a, h);
    }

    #[test]
    fn clock_reduction_grid() {
        let red = ClockReduction::from_promise(0.3, 0.5).unwrap();
        assert_eq!(red.m, 5);
        assert!((red.eps - 0.2 / 3.0).abs() < 1e-15);
        assert!((red.z_list[4] - 1.0 / 3.0).abs() < 1e-15);
        assert!((red.gamma_pen - (5.0 * 0.3 + 0.2)).abs() < 1e-12);
    }

    #[test]
    fn clock_zero_sector_is_penalty() {
        let h = psd2();
        let g = clock_gadget(&h, &[0.1, 0.2, 0.3], 2.5).unwrap();
        let zero = g.restrict(&excitation_sector(3, 2, 0));
        assert!((&zero - &ComplexMatrix::identity(2).scale_real(2.5)).frobenius_norm() < 1e-14);
    }

    #[test]
    fn hopping_gadget_one_hot_block_is_cyclic_gadget() {
        let h = psd2();
        let m = 3;
        let g = hopping_clock_gadget(&h, m, 4.0).unwrap();
        let restricted = g.restrict(&one_hot_sector(m, 2));
        let cyc = cyclic_gadget(&h, m).unwrap();
        assert!((&restricted - &cyc).frobenius_norm() < 1e-14);
        let ev = eigvals(&restricted).unwrap();
        assert!(spectrum_distance(&ev, &cyclic_gadget_spectrum(&h, m).unwrap()) < 1e-8);
    }

    #[test]
    fn dimension_cap_is_enforced() {
        let h = ComplexMatrix::identity(8);
        let err = clock_gadget(&h, &[0.0; 10], 1.0).unwrap_err();
        assert_eq!(err, Error::Resource { needed: 8192, cap: GADGET_DIM_CAP });
        assert!(hopping_clock_gadget(&h, 1, 1.0).is_err());
    }
}
