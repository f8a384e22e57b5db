use std::io::Write;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::common::{apply_overrides, load_config, loglog_slope, usage, CliResult, OutDir, Summary};
use crate::lindblad::{highest_energy_state, hn_lindblad_spec, run_trajectory, write_trajectory_csv};
use crate::models::HnParams;
use crate::numlin::C64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MixConfig {
    pub n_values: Vec<usize>,
    pub hopping: f64,
    pub gamma: f64,
    pub tau: f64,
    pub threshold: f64,
    pub max_steps: usize,
    /// Shifts as `[re, im]` pairs.
    pub z_values: Vec<[f64; 2]>,
    pub reflection: bool,
}

impl Default for MixConfig {
    fn default() -> Self {
        Self {
            n_values: vec![8, 12, 16, 20, 24, 28, 32],
            hopping: 1.0,
            gamma: 0.8,
            tau: 0.1,
            threshold: 1e-3,
            max_steps: 10_000,
            z_values: vec![[0.0, 0.0]],
            reflection: false,
        }
    }
}

#[derive(Debug, clap::Args)]
pub struct Args {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value = "nhps-out/mix")]
    pub out: PathBuf,
    /// Single chain length (replaces the sweep).
    #[arg(long, conflicts_with = "n_sweep")]
    pub n: Option<usize>,
    /// Comma-separated chain lengths.
    #[arg(long = "n-sweep", value_delimiter = ',')]
    pub n_sweep: Option<Vec<usize>>,
    #[arg(long = "J")]
    pub hopping: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long = "max-steps")]
    pub max_steps: Option<usize>,
    /// Shift `re,im`; repeat for several shifts.
    #[arg(long = "z", value_parser = parse_z, allow_hyphen_values = true)]
    pub z: Vec<[f64; 2]>,
    #[arg(long)]
    pub reflection: bool,
}

fn parse_z(s: &str) -> Result<[f64; 2], String> {
    let bad = || format!("shift '{s}' must look like re,im");
    let (re, im) = s.split_once(',').ok_or_else(bad)?;
    Ok([re.trim().parse().map_err(|_| bad())?, im.trim().parse().map_err(|_| bad())?])
}

pub fn run(args: Args) -> CliResult<i32> {
    let mut cfg: MixConfig = load_config(args.config.as_deref())?;
    if let Some(n) = args.n {
        cfg.n_values = vec![n];
    }
    if let Some(ns) = &args.n_sweep {
        cfg.n_values = ns.clone();
    }
    if !args.z.is_empty() {
        cfg.z_values = args.z.clone();
    }
    apply_overrides!(cfg, args; hopping, gamma, tau, threshold, max_steps);
    cfg.reflection |= args.reflection;
    if cfg.n_values.is_empty() || cfg.z_values.is_empty() {
        return Err(usage("need at least one chain length and one shift"));
    }
    if !(cfg.threshold > 0.0) {
        return Err(usage("--threshold must be positive"));
    }

    let mut summary = Summary::start("mix", &cfg, None);
    if cfg.reflection {
        summary.flag("reflection_coupling", "stand-in position-reversal permutation");
    }
    let out = OutDir::create(&args.out)?;
    std::fs::create_dir_all(out.path("trajectories"))?;

    let mut lines = Vec::new();
    let mut all_converged = true;
    let mut slopes = Vec::new();
    for (zi, zp) in cfg.z_values.iter().enumerate() {
        let z = C64::new(zp[0], zp[1]);
        let mut pts = Vec::new();
        for &n in &cfg.n_values {
            let spec = hn_lindblad_spec(&HnParams::periodic(n, cfg.hopping, cfg.gamma), z, cfg.tau, cfg.reflection)?;
            let rho0 = highest_energy_state(&spec.hz)?;
            let (rows, _) = run_trajectory(&spec, &rho0, cfg.max_steps, cfg.threshold)?;
            let last = *rows.last().expect("trajectory has an initial row");
            let converged = last.gap <= cfg.threshold;
            out.write(&format!("trajectories/n{n}_z{zi}.csv"), |w| write_trajectory_csv(&rows, w))?;
            if converged {
                if last.t_sim > 0.0 {
                    pts.push((n as f64, last.t_sim));
                }
            } else {
                all_converged = false;
                eprintln!("warning: n = {n}, z = {z} did not reach the threshold in {} steps (gap {:.3e})", last.step, last.gap);
            }
            println!("mix: n = {n:>3}, z = ({}, {}), steps = {}, t_sim = {}, converged = {converged}", z.re, z.im, last.step, last.t_sim);
            lines.push((n, z, last, converged));
        }
        slopes.push(json!({ "z": [z.re, z.im], "loglog_slope": loglog_slope(&pts) }));
    }
    out.write("summary.csv", |w| {
        writeln!(w, "n,z_re,z_im,steps,t_sim,final_gap,converged")?;
        for (n, z, r, c) in &lines {
            writeln!(w, "{n},{},{},{},{},{},{c}", z.re, z.im, r.step, r.t_sim, r.gap)?;
        }
        Ok(())
    })?;
    summary.flag("all_converged", all_converged);
    let runs: Vec<_> = lines
        .iter()
        .map(|(n, z, r, c)| json!({ "n": n, "z": [z.re, z.im], "steps": r.step, "t_sim": r.t_sim, "final_gap": r.gap, "converged": c }))
        .collect();
    summary.write(&out, json!({ "runs": runs, "slopes": slopes }))?;
    Ok(0)
}
