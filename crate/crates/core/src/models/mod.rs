//! Operator constructors: the non-Hermitian qubit, Hatano–Nelson chains,
//! Fourier-basis coupling operators, and the complexity gadgets.

mod eigvals;
mod gadgets;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::numlin::{ComplexMatrix, C64, ONE, ZERO};

pub use eigvals::{eigvals, eigvals_sorted, spectrum_distance};
pub use gadgets::{
    clock_gadget, cyclic_gadget, cyclic_gadget_spectrum, default_hopping_penalty, excitation_sector, hopping_clock_gadget,
    mesh_gadget, one_hot_sector, ClockReduction, GADGET_DIM_CAP,
};

/// `H(g) = X − igZ`, which has an order-2 exceptional point at `g = 1`.
pub fn qubit_model(g: f64) -> ComplexMatrix {
    ComplexMatrix::from_rows(&[vec![C64::new(0.0, -g), ONE], vec![ONE, C64::new(0.0, g)]])
}

/// Closed-form eigenvalues `±√(1 − g²)` of [`qubit_model`].
pub fn qubit_model_eigenvalues(g: f64) -> [C64; 2] {
    let r = C64::new(1.0 - g * g, 0.0).sqrt();
    [r, -r]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

/// Hatano–Nelson chain: `n` sites, forward hopping `J + γ`, backward `J − γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HnParams {
    pub n: usize,
    pub hopping: f64,
    pub gamma: f64,
    pub boundary: Boundary,
}

impl HnParams {
    pub fn new(n: usize, hopping: f64, gamma: f64, boundary: Boundary) -> Self {
        Self { n, hopping, gamma, boundary }
    }

    pub fn periodic(n: usize, hopping: f64, gamma: f64) -> Self {
        Self::new(n, hopping, gamma, Boundary::Periodic)
    }

    pub fn open(n: usize, hopping: f64, gamma: f64) -> Self {
        Self::new(n, hopping, gamma, Boundary::Open)
    }
}

/// `Σ_j (J+γ)|j+1⟩⟨j| + (J−γ)|j⟩⟨j+1|`, with wrap-around terms under PBC.
pub fn hatano_nelson(p: &HnParams) -> Result<ComplexMatrix> {
    ensure!(p.n >= 2, "a Hatano–Nelson chain needs at least 2 sites, got {}", p.n);
    ensure!(p.hopping.is_finite() && p.gamma.is_finite(), "hopping parameters must be finite");
    let n = p.n;
    let fwd = C64::new(p.hopping + p.gamma, 0.0);
    let bwd = C64::new(p.hopping - p.gamma, 0.0);
    let mut h = ComplexMatrix::zeros(n, n);
    let bonds = match p.boundary {
        Boundary::Open => n - 1,
        Boundary::Periodic => n,
    };
    for j in 0..bonds {
        let k = (j + 1) % n;
        h[(k, j)] += fwd;
        h[(j, k)] += bwd;
    }
    Ok(h)
}

/// `E_k = 2J cos(2πk/n) − 2iγ sin(2πk/n)` for `k = 0..n`.
pub fn hn_pbc_eigenvalues(n: usize, hopping: f64, gamma: f64) -> Vec<C64> {
    (0..n)
        .map(|k| {
            let th = 2.0 * PI * k as f64 / n as f64;
            C64::new(2.0 * hopping * th.cos(), -2.0 * gamma * th.sin())
        })
        .collect()
}

/// `2√(J² − γ²) cos(jπ/(n+1))` for `j = 1..=n`; complex when `|γ| > |J|`.
pub fn hn_obc_eigenvalues(n: usize, hopping: f64, gamma: f64) -> Vec<C64> {
    let root = C64::new(hopping * hopping - gamma * gamma, 0.0).sqrt() * 2.0;
    (1..=n).map(|j| root * (j as f64 * PI / (n as f64 + 1.0)).cos()).collect()
}

/// Unitary discrete Fourier transform, `U[j][k] = ω^{jk}/√n` with `ω = e^{2πi/n}`.
pub fn qft_matrix(n: usize) -> ComplexMatrix {
    let norm = 1.0 / (n as f64).sqrt();
    ComplexMatrix::from_fn(n, n, |j, k| {
        let phase = 2.0 * PI * ((j * k) % n) as f64 / n as f64;
        C64::from_polar(norm, phase)
    })
}

/// Diagonal phase couplings `O₀ = Σ e^{2πik/n}|k⟩⟨k|` and `O₁ = O₀†`.
pub fn hn_couplings(n: usize) -> (ComplexMatrix, ComplexMatrix) {
    let phases: Vec<C64> = (0..n).map(|k| C64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)).collect();
    let conj: Vec<C64> = phases.iter().map(|z| z.conj()).collect();
    (ComplexMatrix::diag(&phases), ComplexMatrix::diag(&conj))
}

/// Position reversal `R = Σ_k |n−1−k⟩⟨k|`, used as the extra reflection-type
/// coupling away from `z = 0`.
pub fn reflection_coupling(n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |r, c| if r + c == n - 1 { ONE } else { ZERO })
}

/// Pauli matrices, handy for small models.
pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]])
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::diag_real(&[1.0, -1.0])
}
