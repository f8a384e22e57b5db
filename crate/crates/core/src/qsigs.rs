//! Gaussian-filtered search for the smallest singular value.
//!
//! Evolution times are drawn from a truncated Gaussian of width `T`. At each
//! time the all-zero ancilla outcome of the `sin(tÃ)` singular-value transform
//! occurs with probability `P₀(t) = Σ_m p_m sin²(σ_m t)`; outcomes are recorded
//! as `Z = −1` (all zero) or `Z = +1`. The filter
//! `F(θ) = (1/N) Σ_n Z_n e^{−2iθ t_n}` peaks near the ground singular value.
//!
//! Probabilities come straight from the SVD, so shot simulation is exact up
//! to the Bernoulli sampling.
//!
//! Random streams: ChaCha20 seeded with the config seed. Time sample `i` reads
//! stream `2i`, and the shots at time `i` read stream `2i + 1` (one `u64` per
//! shot). Results therefore do not depend on thread scheduling.

use std::collections::BTreeMap;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::lindblad::DensityMatrix;
use crate::numlin::{svd, ComplexMatrix, SvdResult, C64, ZERO};

/// Hoeffding accuracy used by [`theorem_params`].
pub const DEFAULT_DELTA: f64 = 0.01;
/// Nodes evaluated per recurrence block before an exact restart.
const BLOCK: usize = 256;
/// Singular values closer than this (relative to 1) count as one level when
/// reporting the ground overlap.
const LEVEL_TOL: f64 = 1e-9;

/// Grid spacing parameter `q = √(ln(10/7)/2)`.
pub fn theorem_q() -> f64 {
    ((10.0f64 / 7.0).ln() / 2.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TheoremParams {
    pub q: f64,
    /// Largest grid index, `⌊T/q⌋`.
    pub j: usize,
    /// Sample count from the inverted union bound `4J e^{−Nδ²/128} ≤ η`.
    pub n: usize,
    /// `3q/T`.
    pub conf_halfwidth: f64,
}

pub fn theorem_params(t: f64, eta: f64) -> Result<TheoremParams> {
    theorem_params_with_delta(t, eta, DEFAULT_DELTA)
}

pub fn theorem_params_with_delta(t: f64, eta: f64, delta: f64) -> Result<TheoremParams> {
    ensure!(t > 0.0 && t.is_finite(), "T must be positive, got {t}");
    ensure!(eta > 0.0 && eta < 1.0, "eta must lie in (0, 1), got {eta}");
    ensure!(delta > 0.0, "delta must be positive");
    let q = theorem_q();
    let j = ((t / q).floor() as usize).max(1);
    let n = (128.0 * (4.0 * j as f64 / eta).ln() / (delta * delta)).ceil() as usize;
    Ok(TheoremParams { q, j, n, conf_halfwidth: 3.0 * q / t })
}

/// Candidate set for the peak search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GridSpec {
    /// `θ_j = jq/T` for `j = 0..=⌊T/q⌋`, in rescaled units.
    Theorem { q: f64 },
    /// `nodes` evenly spaced points on `[lo, hi]`, in the operator's original units.
    Uniform { lo: f64, hi: f64, nodes: usize },
}

impl GridSpec {
    pub fn theorem() -> Self {
        GridSpec::Theorem { q: theorem_q() }
    }

    /// `(first node, spacing, node count)` in rescaled units.
    pub fn resolve(&self, t_width: f64, sigma_max: f64) -> Result<(f64, f64, usize)> {
        match *self {
            GridSpec::Theorem { q } => {
                ensure!(q > 0.0, "grid parameter q must be positive");
                let j = (t_width / q).floor() as usize;
                Ok((0.0, q / t_width, j + 1))
            }
            GridSpec::Uniform { lo, hi, nodes } => {
                ensure!(nodes >= 1, "uniform grid needs at least one node");
                ensure!(hi >= lo && lo.is_finite() && hi.is_finite(), "uniform grid needs lo <= hi");
                let step = if nodes == 1 { 0.0 } else { (hi - lo) / (nodes - 1) as f64 };
                Ok((lo / sigma_max, step / sigma_max, nodes))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QsigsConfig {
    /// Gaussian width `T` (maximal coherent time scale).
    pub t_width: f64,
    /// Truncation radius in units of `T`.
    pub sigma_trunc: f64,
    /// Number of sampled times.
    pub n_times: usize,
    pub shots_per_time: usize,
    pub grid: GridSpec,
    pub seed: u64,
}

impl QsigsConfig {
    fn validate(&self) -> Result<()> {
        ensure!(self.t_width > 0.0 && self.t_width.is_finite(), "T must be positive, got {}", self.t_width);
        ensure!(self.sigma_trunc >= 0.0, "sigma_trunc must be non-negative");
        ensure!(self.n_times >= 1, "need at least one time sample");
        ensure!(self.shots_per_time >= 1, "need at least one shot per time");
        Ok(())
    }
}

/// An independent ChaCha20 stream for the given seed.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform draw on `[0, 1)` from the top 53 bits of one `u64`.
fn unit_f64(rng: &mut ChaCha20Rng) -> f64 {
    (rng.random::<u64>() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Singular values of the rescaled operator and the state's weight on each
/// right singular vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralWeights {
    pub sigma: Vec<f64>,
    pub weights: Vec<f64>,
}

impl SpectralWeights {
    pub fn new(a: &ComplexMatrix, state: &DensityMatrix) -> Result<Self> {
        ensure!(a.is_square() && a.rows() == state.dim(), "operator and state dimensions differ");
        Ok(Self::from_svd(&svd(a)?, state))
    }

    fn from_svd(s: &SvdResult, state: &DensityMatrix) -> Self {
        let weights = (0..s.sigma.len()).map(|m| state.population(&s.v.col(m)).clamp(0.0, 1.0)).collect();
        Self { sigma: s.sigma.clone(), weights }
    }

    /// `Σ_m p_m sin²(σ_m t)`.
    pub fn p0(&self, t: f64) -> f64 {
        self.sigma.iter().zip(&self.weights).map(|(s, p)| p * (s * t).sin().powi(2)).sum::<f64>().clamp(0.0, 1.0)
    }

    /// Total weight on the lowest singular level.
    pub fn ground_overlap(&self) -> f64 {
        let s0 = self.sigma[0];
        self.sigma.iter().zip(&self.weights).filter(|(s, _)| **s - s0 <= LEVEL_TOL).map(|(_, p)| p).sum()
    }

    /// Infinite-shot filter expectation `½ Σ_m p_m [e^{−2T²(σ_m−θ)²} + e^{−2T²(σ_m+θ)²}]`.
    pub fn filter_expectation(&self, t_width: f64, theta: f64) -> f64 {
        let g = |x: f64| (-2.0 * t_width * t_width * x * x).exp();
        0.5 * self.sigma.iter().zip(&self.weights).map(|(s, p)| p * (g(s - theta) + g(s + theta))).sum::<f64>()
    }
}

/// `P₀(t)` for an operator whose singular values lie in `[0, 1]`.
pub fn p0_of_t(a: &ComplexMatrix, state: &DensityMatrix, t: f64) -> Result<f64> {
    let w = SpectralWeights::new(a, state)?;
    let smax = w.sigma.last().copied().unwrap_or(0.0);
    ensure!(smax <= 1.0 + 1e-12, "singular values must not exceed 1 (largest is {smax}); rescale first");
    Ok(w.p0(t))
}

/// `(A / σ_max, σ_max)`.
pub fn rescale_operator(a: &ComplexMatrix) -> Result<(ComplexMatrix, f64)> {
    let smax = a.spectral_norm()?;
    ensure!(smax > 0.0, "cannot rescale the zero operator");
    Ok((a.scale_real(1.0 / smax), smax))
}

/// `n_times` draws of `g ~ N(0, T²)`, replaced by 0 when `|g| > sigma_trunc·T`.
pub fn sample_times(cfg: &QsigsConfig) -> Vec<f64> {
    let cut = cfg.sigma_trunc * cfg.t_width;
    (0..cfg.n_times as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(cfg.seed, 2 * i);
            let z: f64 = rng.sample(StandardNormal);
            let g = z * cfg.t_width;
            if g.abs() > cut {
                0.0
            } else {
                g
            }
        })
        .collect()
}

/// Shot records `(t, Z)` with `Z ∈ {−1, +1}`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ShotDataset {
    pub records: Vec<(f64, i8)>,
}

impl ShotDataset {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn mean_z(&self) -> f64 {
        self.records.iter().map(|&(_, z)| z as f64).sum::<f64>() / self.len() as f64
    }

    /// Sum of `Z` per distinct time, ordered by time.
    pub fn aggregate(&self) -> Vec<(f64, f64)> {
        let mut acc: BTreeMap<u64, (f64, f64)> = BTreeMap::new();
        for &(t, z) in &self.records {
            // Fold −0.0 into 0.0 so both land in one bucket.
            let t = if t == 0.0 { 0.0 } else { t };
            acc.entry(t.to_bits()).or_insert((t, 0.0)).1 += z as f64;
        }
        let mut out: Vec<(f64, f64)> = acc.into_values().collect();
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        out
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,Z")?;
        for &(t, z) in &self.records {
            writeln!(w, "{t},{z}")?;
        }
        Ok(())
    }
}

/// Draws `shots_per_time` Born-rule outcomes at each time.
pub fn simulate_shots(weights: &SpectralWeights, times: &[f64], shots_per_time: usize, seed: u64) -> ShotDataset {
    let per_time: Vec<Vec<(f64, i8)>> = times
        .par_iter()
        .enumerate()
        .map(|(i, &t)| {
            let p = weights.p0(t);
            let mut rng = stream_rng(seed, 2 * i as u64 + 1);
            (0..shots_per_time).map(|_| (t, if unit_f64(&mut rng) < p { -1 } else { 1 })).collect()
        })
        .collect();
    ShotDataset { records: per_time.into_iter().flatten().collect() }
}

/// Sampled filter values. `thetas` and `argmax_theta` are in rescaled units;
/// multiply by `sigma_max_rescale` for the original operator.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterCurve {
    pub thetas: Vec<f64>,
    pub values: Vec<C64>,
    pub argmax_index: usize,
    pub argmax_theta: f64,
    pub sigma_max_rescale: f64,
}

impl FilterCurve {
    fn from_values(thetas: Vec<f64>, values: Vec<C64>) -> Self {
        let mut best = 0;
        for (i, v) in values.iter().enumerate() {
            if v.norm() > values[best].norm() {
                best = i;
            }
        }
        Self { argmax_theta: thetas[best], thetas, values, argmax_index: best, sigma_max_rescale: 1.0 }
    }

    pub fn abs_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    /// Writes `theta,re_F,im_F,abs_F` with `theta` in original units.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "theta,re_F,im_F,abs_F")?;
        for (th, v) in self.thetas.iter().zip(&self.values) {
            writeln!(w, "{},{},{},{}", th * self.sigma_max_rescale, v.re, v.im, v.norm())?;
        }
        Ok(())
    }
}

/// `F(θ)` evaluated directly at arbitrary nodes.
pub fn filter_eval(data: &ShotDataset, thetas: &[f64]) -> Result<FilterCurve> {
    ensure!(!data.is_empty(), "filter needs a nonempty dataset");
    ensure!(!thetas.is_empty(), "filter needs at least one node");
    let agg = data.aggregate();
    let inv_n = 1.0 / data.len() as f64;
    let values = thetas
        .par_iter()
        .map(|&th| agg.iter().map(|&(t, c)| C64::from_polar(c, -2.0 * th * t)).sum::<C64>() * inv_n)
        .collect();
    Ok(FilterCurve::from_values(thetas.to_vec(), values))
}

/// `F(θ)` on `θ_k = lo + k·step`, `k < nodes`, by phase recurrence. Each block
/// of nodes restarts from exact phases, which bounds rounding drift.
pub fn filter_eval_uniform(data: &ShotDataset, lo: f64, step: f64, nodes: usize) -> Result<FilterCurve> {
    ensure!(!data.is_empty(), "filter needs a nonempty dataset");
    ensure!(nodes >= 1, "filter needs at least one node");
    let agg = data.aggregate();
    let inv_n = 1.0 / data.len() as f64;
    let n_blocks = nodes.div_ceil(BLOCK);
    let blocks: Vec<Vec<C64>> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let start = b * BLOCK;
            let len = BLOCK.min(nodes - start);
            let mut out = vec![ZERO; len];
            let th0 = lo + start as f64 * step;
            for &(t, c) in &agg {
                let mut ph = C64::from_polar(c, -2.0 * th0 * t);
                let rot = C64::from_polar(1.0, -2.0 * step * t);
                for o in out.iter_mut() {
                    *o += ph;
                    ph *= rot;
                }
            }
            out.iter_mut().for_each(|v| *v *= inv_n);
            out
        })
        .collect();
    let thetas = (0..nodes).map(|k| lo + k as f64 * step).collect();
    Ok(FilterCurve::from_values(thetas, blocks.into_iter().flatten().collect()))
}

#[derive(Debug, Clone)]
pub struct Estimate {
    /// Peak location in the operator's original units.
    pub theta_star: f64,
    pub curve: FilterCurve,
    pub sigma_max: f64,
    /// State weight on the ground right-singular space.
    pub p0: f64,
    /// `3q/T` in original units.
    pub conf_halfwidth: f64,
    pub dataset: ShotDataset,
}

/// Rescale, sample times, simulate shots, evaluate the filter and take its peak.
pub fn estimate_sigma0(a: &ComplexMatrix, state: &DensityMatrix, cfg: &QsigsConfig) -> Result<Estimate> {
    cfg.validate()?;
    let (a_tilde, sigma_max) = rescale_operator(a)?;
    let weights = SpectralWeights::new(&a_tilde, state)?;
    let times = sample_times(cfg);
    let dataset = simulate_shots(&weights, &times, cfg.shots_per_time, cfg.seed);
    let (lo, step, nodes) = cfg.grid.resolve(cfg.t_width, sigma_max)?;
    let mut curve = filter_eval_uniform(&dataset, lo, step, nodes)?;
    curve.sigma_max_rescale = sigma_max;
    Ok(Estimate {
        theta_star: curve.argmax_theta * sigma_max,
        sigma_max,
        p0: weights.ground_overlap(),
        conf_halfwidth: 3.0 * theorem_q() / cfg.t_width * sigma_max,
        curve,
        dataset,
    })
}
