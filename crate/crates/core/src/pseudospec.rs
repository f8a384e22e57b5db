//! Smallest singular values, ε-pseudospectrum membership, and grid sweeps.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::numlin::{svd, ComplexMatrix, C64};

/// `σ₀(A − zI)`.
pub fn sigma0_at(a: &ComplexMatrix, z: C64) -> Result<f64> {
    ensure!(a.is_square(), "pseudospectra need a square matrix, got {}x{}", a.rows(), a.cols());
    Ok(svd(&a.shifted(z))?.smallest())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    In,
    Out,
    PromiseGap,
}

impl Verdict {
    /// Classify `σ₀` against the promise `σ₀ ≤ ε` versus `σ₀ ≥ 2ε`.
    pub fn classify(sigma0: f64, eps: f64) -> Self {
        if sigma0 <= eps {
            Verdict::In
        } else if sigma0 >= 2.0 * eps {
            Verdict::Out
        } else {
            Verdict::PromiseGap
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::In => "IN",
            Verdict::Out => "OUT",
            Verdict::PromiseGap => "PROMISE_GAP",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MembershipVerdict {
    pub z: (f64, f64),
    pub sigma0: f64,
    pub eps: f64,
    pub verdict: Verdict,
}

pub fn decide_membership(a: &ComplexMatrix, z: C64, eps: f64) -> Result<MembershipVerdict> {
    ensure!(eps > 0.0, "eps must be positive, got {eps}");
    let sigma0 = sigma0_at(a, z)?;
    Ok(MembershipVerdict { z: (z.re, z.im), sigma0, eps, verdict: Verdict::classify(sigma0, eps) })
}

/// Radius `√(2ε + ε²)` of the ε-pseudospectrum of the exceptional-point qubit.
pub fn ep_radius(eps: f64) -> f64 {
    (2.0 * eps + eps * eps).sqrt()
}

/// `σ₀` sampled on a rectangular grid; `sigma0[i][j]` sits at `re_axis[j] + i·im_axis[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoGrid {
    pub re_axis: Vec<f64>,
    pub im_axis: Vec<f64>,
    pub sigma0: Vec<Vec<f64>>,
    pub eps: f64,
}

impl PseudoGrid {
    pub fn contains(&self, i_im: usize, j_re: usize) -> bool {
        self.sigma0[i_im][j_re] <= self.eps
    }

    /// Membership mask at a different threshold.
    pub fn level_set(&self, eps: f64) -> Vec<Vec<bool>> {
        self.sigma0.iter().map(|row| row.iter().map(|&s| s <= eps).collect()).collect()
    }

    pub fn count_inside(&self) -> usize {
        self.sigma0.iter().flatten().filter(|&&s| s <= self.eps).count()
    }

    pub fn min_sigma0(&self) -> f64 {
        self.sigma0.iter().flatten().copied().fold(f64::INFINITY, f64::min)
    }

    /// Writes `re,im,sigma0` rows, row-major over `(im, re)`, with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "re,im,sigma0")?;
        for (i, &im) in self.im_axis.iter().enumerate() {
            for (j, &re) in self.re_axis.iter().enumerate() {
                writeln!(w, "{re:.16e},{im:.16e},{:.16e}", self.sigma0[i][j])?;
            }
        }
        Ok(())
    }
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

/// Evaluate `σ₀` at every node. Nodes are computed independently, so the
/// parallel result is identical to a sequential sweep.
pub fn sweep_grid(a: &ComplexMatrix, re_axis: &[f64], im_axis: &[f64], eps: f64) -> Result<PseudoGrid> {
    ensure!(!re_axis.is_empty() && !im_axis.is_empty(), "grid axes must be nonempty");
    ensure!(strictly_increasing(re_axis) && strictly_increasing(im_axis), "grid axes must be strictly increasing");
    ensure!(a.is_square(), "pseudospectra need a square matrix");
    let nre = re_axis.len();
    let flat: Vec<f64> = (0..nre * im_axis.len())
        .into_par_iter()
        .map(|idx| sigma0_at(a, C64::new(re_axis[idx % nre], im_axis[idx / nre])))
        .collect::<Result<_>>()?;
    let sigma0 = flat.chunks(nre).map(<[f64]>::to_vec).collect();
    Ok(PseudoGrid { re_axis: re_axis.to_vec(), im_axis: im_axis.to_vec(), sigma0, eps })
}
