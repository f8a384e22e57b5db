//! Analytic mixing for the Hatano–Nelson chain at `z = 0`.
//!
//! With `n = 4m` sites the Fourier populations of the dissipative dynamics
//! fold into an `(m+1)`-state pure-birth chain whose last state is absorbing.
//! Replacing the doubled exit rate of state 0 by 1 turns the absorption time
//! into a sum of `m` unit exponentials, so the total-variation distance is a
//! Poisson CDF and the mixing time has a closed-form upper bound.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::lindblad::{evolve_continuous_observed, highest_energy_state, hn_lindblad_spec, max_continuous_dt};
use crate::models::{qft_matrix, HnParams};
use crate::numlin::ZERO;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainVariant {
    /// Exit rate 2 from state 0, as obtained from the folded Lindblad dynamics.
    Original,
    /// All pre-absorption rates equal to 1.
    Modified,
}

/// Generator of `q' = Lq` on states `0..=m`.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationChain {
    pub m: usize,
    pub generator: Vec<Vec<f64>>,
    pub variant: ChainVariant,
}

pub fn build_population_generator(m: usize, variant: ChainVariant) -> Result<PopulationChain> {
    ensure!(m >= 1, "population chain needs m >= 1");
    let mut l = vec![vec![0.0; m + 1]; m + 1];
    for j in 0..m {
        let rate = if j == 0 && variant == ChainVariant::Original { 2.0 } else { 1.0 };
        l[j][j] = -rate;
        l[j + 1][j] = rate;
    }
    Ok(PopulationChain { m, generator: l, variant })
}

impl PopulationChain {
    fn apply(&self, q: &[f64]) -> Vec<f64> {
        // Lower-bidiagonal: (Lq)_j = L[j][j−1] q_{j−1} + L[j][j] q_j.
        (0..=self.m)
            .map(|j| {
                let diag = self.generator[j][j] * q[j];
                if j == 0 {
                    diag
                } else {
                    diag + self.generator[j][j - 1] * q[j - 1]
                }
            })
            .collect()
    }

    /// Default RK4 step `min(0.01, 0.1/m)`.
    pub fn default_dt(&self) -> f64 {
        0.01f64.min(0.1 / self.m as f64)
    }

    /// Integrates from `q0` to time `t` with RK4.
    pub fn evolve(&self, q0: &[f64], t: f64) -> Result<Vec<f64>> {
        ensure!(q0.len() == self.m + 1, "initial vector has length {}, expected {}", q0.len(), self.m + 1);
        ensure!(t >= 0.0 && t.is_finite(), "time must be non-negative");
        let dt = self.default_dt();
        let steps = (t / dt).ceil() as usize;
        let mut q = q0.to_vec();
        let mut now = 0.0;
        let axpy = |x: &[f64], y: &[f64], a: f64| -> Vec<f64> { x.iter().zip(y).map(|(u, v)| u + a * v).collect() };
        for s in 0..steps {
            let h = if s + 1 == steps { t - now } else { dt };
            let k1 = self.apply(&q);
            let k2 = self.apply(&axpy(&q, &k1, h / 2.0));
            let k3 = self.apply(&axpy(&q, &k2, h / 2.0));
            let k4 = self.apply(&axpy(&q, &k3, h));
            for j in 0..=self.m {
                q[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
            }
            now += h;
        }
        if q.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("population integration produced non-finite values".into()));
        }
        Ok(q)
    }
}

/// `e^{−t} Σ_{k<m} t^k/k!`, summed in log space.
pub fn tv_distance_closed_form(m: usize, t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    let lt = t.ln();
    let mut log_term = -t;
    let mut log_sum = f64::NEG_INFINITY;
    for k in 0..m {
        if k > 0 {
            log_term += lt - (k as f64).ln();
        }
        let (hi, lo) = if log_sum > log_term { (log_sum, log_term) } else { (log_term, log_sum) };
        log_sum = hi + (lo - hi).exp().ln_1p();
    }
    log_sum.exp().min(1.0)
}

/// `1 − q_m(t)` from the ODE started at state 0.
pub fn tv_distance_numeric(chain: &PopulationChain, t: f64) -> Result<f64> {
    let mut q0 = vec![0.0; chain.m + 1];
    q0[0] = 1.0;
    let q = chain.evolve(&q0, t)?;
    Ok(1.0 - q[chain.m])
}

/// `m + 3√(m ln(1/ε))`, valid while `ln(1/ε) ≤ m`.
pub fn mixing_time_bound(m: usize, eps: f64) -> Result<f64> {
    ensure!(m >= 1, "m must be at least 1");
    ensure!(eps > 0.0 && eps <= 1.0, "eps must lie in (0, 1], got {eps}");
    let l = (1.0 / eps).ln();
    if l > m as f64 {
        return Err(Error::OutOfRegime { boundary: (-(m as f64)).exp() });
    }
    Ok(m as f64 + 3.0 * (m as f64 * l).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundRow {
    pub m: usize,
    pub eps: f64,
    pub bound: f64,
    pub tv_at_bound: f64,
}

/// Every in-regime `(m, ε)` pair with the certified TV at the bound.
pub fn bound_table(ms: &[usize], epss: &[f64]) -> Result<Vec<BoundRow>> {
    let mut rows = Vec::new();
    for &m in ms {
        for &eps in epss {
            match mixing_time_bound(m, eps) {
                Ok(bound) => rows.push(BoundRow { m, eps, bound, tv_at_bound: tv_distance_closed_form(m, bound) }),
                Err(Error::OutOfRegime { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
    }
    Ok(rows)
}

pub fn write_bound_csv<W: Write>(rows: &[BoundRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "m,eps,bound,tv_at_bound")?;
    for r in rows {
        writeln!(w, "{},{},{},{}", r.m, r.eps, r.bound, r.tv_at_bound)?;
    }
    Ok(())
}

/// Folds Fourier populations `p_0..p_{4m−1}` into the chain states `q_0..q_m`.
pub fn fold_populations(p: &[f64]) -> Result<Vec<f64>> {
    ensure!(!p.is_empty() && p.len() % 4 == 0, "population vector length must be a positive multiple of 4");
    let m = p.len() / 4;
    let mut q = vec![0.0; m + 1];
    q[0] = p[0] + p[2 * m];
    for j in 1..m {
        q[j] = p[j] + p[2 * m - j] + p[2 * m + j] + p[4 * m - j];
    }
    q[m] = p[m] + p[3 * m];
    Ok(q)
}

/// Hopping parameters used by [`population_vs_full_dynamics`].
pub const FULL_DYNAMICS_HOPPING: f64 = 1.0;
pub const FULL_DYNAMICS_GAMMA: f64 = 0.8;

/// Evolves the full Lindblad equation for the chain at `z = 0` (jumps from
/// `O₀` and `O₁`, highest-energy start), folds its Fourier populations at
/// every step, and returns the largest deviation from the ORIGINAL chain
/// integrated from the same folded start.
pub fn population_vs_full_dynamics(n: usize, t: f64) -> Result<f64> {
    ensure!(n >= 4 && n % 4 == 0 && n <= 32, "need n divisible by 4 with 4 <= n <= 32, got {n}");
    let params = HnParams::periodic(n, FULL_DYNAMICS_HOPPING, FULL_DYNAMICS_GAMMA);
    let spec = hn_lindblad_spec(&params, ZERO, 1.0, false)?;
    let mut rho = highest_energy_state(&spec.hz)?;
    let u = qft_matrix(n);
    let basis: Vec<_> = (0..n).map(|k| u.col(k)).collect();
    let fold = |m: &crate::numlin::ComplexMatrix| -> Result<Vec<f64>> {
        let p: Vec<f64> = basis.iter().map(|v| crate::numlin::inner(v, &m.matvec(v)).re).collect();
        fold_populations(&p)
    };
    let q0 = fold(rho.matrix())?;
    let chain = build_population_generator(n / 4, ChainVariant::Original)?;
    let dt = 1e-3f64.min(max_continuous_dt(&spec)?);
    let mut worst: f64 = 0.0;
    let mut samples = Vec::new();
    evolve_continuous_observed(&spec, &mut rho, t, dt, |time, m| samples.push((time, m.clone())))?;
    // Compare on a coarse subset of the trajectory; the chain is re-integrated
    // from the start for each sample so its step size stays independent.
    let stride = (samples.len() / 50).max(1);
    for (idx, (time, m)) in samples.iter().enumerate() {
        if idx % stride != 0 && idx + 1 != samples.len() {
            continue;
        }
        let q_full = fold(m)?;
        let q_chain = chain.evolve(&q0, *time)?;
        for (a, b) in q_full.iter().zip(&q_chain) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(worst)
}
