//! Eigenvalues of general (non-normal) complex matrices.
//!
//! Only used to verify spectra of small model operators and gadgets, so the
//! routine returns eigenvalues without vectors: radix-2 balancing, Householder
//! reduction to Hessenberg form, then single-shift complex QR with deflation.

use crate::error::{ensure, Error, Result};
use crate::numlin::{ComplexMatrix, C64, ZERO};

const MAX_ITERS_PER_EIGENVALUE: usize = 500;

/// All eigenvalues of a square matrix (in no particular order).
pub fn eigvals(a: &ComplexMatrix) -> Result<Vec<C64>> {
    ensure!(a.is_square(), "eigenvalues need a square matrix, got {}x{}", a.rows(), a.cols());
    ensure!(a.is_finite(), "eigenvalue input must be finite");
    let n = a.rows();
    let mut h: Vec<Vec<C64>> = (0..n).map(|r| a.row(r).to_vec()).collect();
    balance(&mut h);
    hessenberg(&mut h);
    shifted_qr(&mut h)
}

/// Eigenvalues sorted by (real, imaginary) part, convenient for comparisons.
pub fn eigvals_sorted(a: &ComplexMatrix) -> Result<Vec<C64>> {
    let mut ev = eigvals(a)?;
    ev.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    Ok(ev)
}

/// Largest distance from each expected value to its nearest computed value,
/// matched one-to-one greedily. Multisets of different sizes compare as infinite.
pub fn spectrum_distance(computed: &[C64], expected: &[C64]) -> f64 {
    if computed.len() != expected.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; computed.len()];
    let mut worst: f64 = 0.0;
    for e in expected {
        let mut best = (usize::MAX, f64::INFINITY);
        for (i, c) in computed.iter().enumerate() {
            if !used[i] {
                let d = (c - e).norm();
                if d < best.1 {
                    best = (i, d);
                }
            }
        }
        used[best.0] = true;
        worst = worst.max(best.1);
    }
    worst
}

fn balance(h: &mut [Vec<C64>]) {
    const RADIX: f64 = 2.0;
    let n = h.len();
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += h[j][i].norm();
                    r += h[i][j].norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let mut g = r / RADIX;
            let mut f = 1.0;
            let s = c + r;
            while c < g {
                f *= RADIX;
                c *= sqrdx;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let g = 1.0 / f;
                for j in 0..n {
                    h[i][j] *= g;
                }
                for row in h.iter_mut() {
                    row[i] *= f;
                }
            }
        }
    }
}

fn hessenberg(h: &mut [Vec<C64>]) {
    let n = h.len();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let x: Vec<C64> = (k + 1..n).map(|i| h[i][k]).collect();
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { C64::new(1.0, 0.0) };
        let alpha = -phase * xnorm;
        let mut v = x.clone();
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        v.iter_mut().for_each(|z| *z /= vnorm);
        // H ← (I − 2vv†) H
        for j in k..n {
            let s: C64 = v.iter().enumerate().map(|(i, vi)| vi.conj() * h[k + 1 + i][j]).sum();
            for (i, vi) in v.iter().enumerate() {
                h[k + 1 + i][j] -= *vi * s * 2.0;
            }
        }
        // H ← H (I − 2vv†)
        for row in h.iter_mut() {
            let s: C64 = v.iter().enumerate().map(|(j, vj)| row[k + 1 + j] * vj).sum();
            for (j, vj) in v.iter().enumerate() {
                row[k + 1 + j] -= s * vj.conj() * 2.0;
            }
        }
        h[k + 1][k] = alpha;
        for row in h.iter_mut().skip(k + 2) {
            row[k] = ZERO;
        }
    }
}

/// Givens pair `(c, s)` with `[[c, s], [−s̄, c]] (a; b) = (r; 0)`.
fn givens(a: C64, b: C64) -> (f64, C64) {
    let an = a.norm();
    let nrm = an.hypot(b.norm());
    if nrm == 0.0 {
        return (1.0, ZERO);
    }
    if an == 0.0 {
        return (0.0, C64::new(1.0, 0.0));
    }
    let alpha = a / an;
    (an / nrm, alpha * b.conj() / nrm)
}

fn shifted_qr(h: &mut [Vec<C64>]) -> Result<Vec<C64>> {
    let n = h.len();
    let mut eigs = Vec::with_capacity(n);
    if n == 0 {
        return Ok(eigs);
    }
    let anorm = h.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut hi = n - 1;
    loop {
        if hi == 0 {
            eigs.push(h[0][0]);
            break;
        }
        let mut iters = 0;
        loop {
            // Locate the start of the active unreduced block.
            let mut lo = hi;
            while lo > 0 {
                let s = h[lo - 1][lo - 1].norm() + h[lo][lo].norm();
                let s = if s == 0.0 { anorm } else { s };
                if h[lo][lo - 1].norm() <= f64::EPSILON * s {
                    h[lo][lo - 1] = ZERO;
                    break;
                }
                lo -= 1;
            }
            if lo == hi {
                eigs.push(h[hi][hi]);
                break;
            }
            iters += 1;
            if iters > MAX_ITERS_PER_EIGENVALUE {
                return Err(Error::Numerical(format!(
                    "QR iteration did not deflate eigenvalue {hi} within {MAX_ITERS_PER_EIGENVALUE} iterations"
                )));
            }
            let shift = if iters % 10 == 0 {
                // Exceptional shift to break cycles.
                h[hi][hi] + C64::new(0.75 * h[hi][hi - 1].norm(), 0.43 * h[hi][hi - 1].norm())
            } else {
                wilkinson_shift(h[hi - 1][hi - 1], h[hi - 1][hi], h[hi][hi - 1], h[hi][hi])
            };
            qr_sweep(h, lo, hi, shift);
        }
        if hi == 0 {
            break;
        }
        hi -= 1;
    }
    Ok(eigs)
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half_tr = (a + d) * 0.5;
    let det = a * d - b * c;
    let disc = (half_tr * half_tr - det).sqrt();
    let l1 = half_tr + disc;
    let l2 = half_tr - disc;
    if (l1 - d).norm() < (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

fn qr_sweep(h: &mut [Vec<C64>], lo: usize, hi: usize, shift: C64) {
    for i in lo..=hi {
        h[i][i] -= shift;
    }
    let mut rots = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let (c, s) = givens(h[k][k], h[k + 1][k]);
        for j in k..=hi {
            let x = h[k][j];
            let y = h[k + 1][j];
            h[k][j] = x * c + s * y;
            h[k + 1][j] = -s.conj() * x + y * c;
        }
        rots.push((c, s));
    }
    for (idx, &(c, s)) in rots.iter().enumerate() {
        let k = lo + idx;
        let top = (k + 2).min(hi);
        for row in h.iter_mut().take(top + 1).skip(lo) {
            let x = row[k];
            let y = row[k + 1];
            row[k] = x * c + y * s.conj();
            row[k + 1] = -x * s + y * c;
        }
    }
    for i in lo..=hi {
        h[i][i] += shift;
    }
}
