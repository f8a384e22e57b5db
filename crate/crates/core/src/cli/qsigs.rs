use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::common::{apply_overrides, load_config, usage, CliResult, ModelArgs, ModelConfig, ModelKind, OutDir, Summary};
use crate::lindblad::{prepare_dissipative, shifted_gram, DensityMatrix, GroundSpace};
use crate::models::{hn_couplings, pauli_x, reflection_coupling};
use crate::numlin::{C64, ONE, ZERO};
use crate::pseudospec::{sigma0_at, Verdict};
use crate::qsigs::{estimate_sigma0, theorem_q, GridSpec, QsigsConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    /// Simulated dissipative preparation.
    Prepare,
    /// Exact ground right-singular space, bypassing preparation.
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QsigsCliConfig {
    pub model: ModelConfig,
    pub z_re: f64,
    pub z_im: f64,
    pub eps: f64,
    pub t_width: f64,
    pub sigma_trunc: f64,
    pub n_times: usize,
    pub shots_per_time: usize,
    pub grid: GridSpec,
    pub seed: u64,
    pub state: StateKind,
    pub prep_tau: f64,
    pub prep_steps: usize,
    /// Adds the position-reversal coupling to the chain's preparation.
    pub reflection: bool,
}

impl Default for QsigsCliConfig {
    fn default() -> Self {
        Self {
            model: ModelConfig::default(),
            z_re: 0.05,
            z_im: 0.0,
            eps: 0.002,
            t_width: 2000.0,
            sigma_trunc: 10.0,
            n_times: 25,
            shots_per_time: 2000,
            grid: GridSpec::theorem(),
            seed: 7,
            state: StateKind::Prepare,
            prep_tau: 1.0,
            prep_steps: 5,
            reflection: false,
        }
    }
}

#[derive(Debug, clap::Args)]
pub struct Args {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value = "nhps-out/qsigs")]
    pub out: PathBuf,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long = "z-re", allow_hyphen_values = true)]
    pub z_re: Option<f64>,
    #[arg(long = "z-im", allow_hyphen_values = true)]
    pub z_im: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Gaussian width T.
    #[arg(long = "T")]
    pub t_width: Option<f64>,
    #[arg(long = "sigma-trunc")]
    pub sigma_trunc: Option<f64>,
    #[arg(long = "n-times")]
    pub n_times: Option<usize>,
    #[arg(long = "shots")]
    pub shots_per_time: Option<usize>,
    /// `theorem` or `uniform:lo:hi:count` (original units).
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<GridSpec>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub state: Option<StateKind>,
    #[arg(long = "prep-tau")]
    pub prep_tau: Option<f64>,
    #[arg(long = "prep-steps")]
    pub prep_steps: Option<usize>,
    #[arg(long)]
    pub reflection: bool,
}

fn parse_grid(s: &str) -> Result<GridSpec, String> {
    if s == "theorem" {
        return Ok(GridSpec::theorem());
    }
    let bad = || format!("grid '{s}' must be 'theorem' or 'uniform:lo:hi:count'");
    let rest = s.strip_prefix("uniform:").ok_or_else(bad)?;
    let parts: Vec<&str> = rest.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo = parts[0].parse().map_err(|_| bad())?;
    let hi = parts[1].parse().map_err(|_| bad())?;
    let nodes = parts[2].parse().map_err(|_| bad())?;
    Ok(GridSpec::Uniform { lo, hi, nodes })
}

fn initial_state(cfg: &QsigsCliConfig, z: C64) -> CliResult<DensityMatrix> {
    let a = cfg.model.build()?;
    Ok(match cfg.state {
        StateKind::Exact => {
            let ground = GroundSpace::of(&shifted_gram(&a, z))?;
            DensityMatrix::uniform_on(&ground.vectors)?
        }
        StateKind::Prepare => match cfg.model.model {
            ModelKind::Qubit => {
                let start = DensityMatrix::pure(&[ONE, ZERO])?;
                prepare_dissipative(&a, z, &[pauli_x()], cfg.prep_tau, cfg.prep_steps, &start)?
            }
            ModelKind::Hn => {
                let (o0, o1) = hn_couplings(cfg.model.n);
                let mut couplings = vec![o0, o1];
                if cfg.reflection {
                    couplings.push(reflection_coupling(cfg.model.n));
                }
                let start = DensityMatrix::maximally_mixed(cfg.model.n);
                prepare_dissipative(&a, z, &couplings, cfg.prep_tau, cfg.prep_steps, &start)?
            }
        },
    })
}

pub fn run(args: Args) -> CliResult<i32> {
    let mut cfg: QsigsCliConfig = load_config(args.config.as_deref())?;
    args.model.apply(&mut cfg.model);
    apply_overrides!(cfg, args; z_re, z_im, eps, t_width, sigma_trunc, n_times, shots_per_time, grid, seed, state, prep_tau, prep_steps);
    cfg.reflection |= args.reflection;
    if !(cfg.eps > 0.0) {
        return Err(usage("--eps must be positive"));
    }

    let mut summary = Summary::start("qsigs", &cfg, Some(cfg.seed));
    let z = C64::new(cfg.z_re, cfg.z_im);
    let a = cfg.model.build()?;
    let state = initial_state(&cfg, z)?;
    let qcfg = QsigsConfig {
        t_width: cfg.t_width,
        sigma_trunc: cfg.sigma_trunc,
        n_times: cfg.n_times,
        shots_per_time: cfg.shots_per_time,
        grid: cfg.grid.clone(),
        seed: cfg.seed,
    };
    let est = estimate_sigma0(&a.shifted(z), &state, &qcfg)?;
    let truth = sigma0_at(&a, z)?;
    let verdict = Verdict::classify(est.theta_star, cfg.eps);
    let exact_verdict = Verdict::classify(truth, cfg.eps);

    let out = OutDir::create(&args.out)?;
    out.write("dataset.csv", |w| est.dataset.write_csv(w))?;
    out.write("curve.csv", |w| est.curve.write_csv(w))?;
    if cfg.reflection && cfg.model.model == ModelKind::Hn {
        summary.flag("reflection_coupling", "stand-in position-reversal permutation");
    }
    summary.flag("shot_probabilities", "exact, from the singular value decomposition");
    let results = json!({
        "z": [z.re, z.im],
        "theta_star": est.theta_star,
        "sigma0_exact": truth,
        "abs_error": (est.theta_star - truth).abs(),
        "conf_halfwidth_rescaled": 3.0 * theorem_q() / cfg.t_width,
        "conf_halfwidth": est.conf_halfwidth,
        "sigma_max_rescale": est.sigma_max,
        "p0_reported": est.p0,
        "records": est.dataset.len(),
        "grid_nodes": est.curve.thetas.len(),
        "verdict": verdict,
        "exact_verdict": exact_verdict,
    });
    summary.write(&out, results)?;
    println!(
        "qsigs: theta* = {:.6e} (exact sigma0 {:.6e}, p0 {:.4}) -> {}",
        est.theta_star, truth, est.p0, verdict
    );
    Ok(0)
}
