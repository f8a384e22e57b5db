use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::common::{apply_overrides, load_config, parse_axis, CliResult, ModelArgs, ModelConfig, ModelKind, OutDir, Summary};
use crate::models::{hn_obc_eigenvalues, hn_pbc_eigenvalues, Boundary};
use crate::pseudospec::{ep_radius, sigma0_at, sweep_grid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PseudospecConfig {
    pub model: ModelConfig,
    /// Real axis as `lo:hi:count`; model-dependent default when absent.
    pub re: Option<String>,
    pub im: Option<String>,
    pub eps: f64,
}

impl Default for PseudospecConfig {
    fn default() -> Self {
        Self { model: ModelConfig::default(), re: None, im: None, eps: 0.002 }
    }
}

#[derive(Debug, clap::Args)]
pub struct Args {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value = "nhps-out/pseudospec")]
    pub out: PathBuf,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Real axis `lo:hi:count`.
    #[arg(long, allow_hyphen_values = true)]
    pub re: Option<String>,
    /// Imaginary axis `lo:hi:count`.
    #[arg(long, allow_hyphen_values = true)]
    pub im: Option<String>,
    #[arg(long)]
    pub eps: Option<f64>,
}

pub fn run(args: Args) -> CliResult<i32> {
    let mut cfg: PseudospecConfig = load_config(args.config.as_deref())?;
    args.model.apply(&mut cfg.model);
    if let Some(v) = &args.re {
        cfg.re = Some(v.clone());
    }
    if let Some(v) = &args.im {
        cfg.im = Some(v.clone());
    }
    apply_overrides!(cfg, args; eps);
    if !(cfg.eps > 0.0) {
        return Err(super::common::usage("--eps must be positive"));
    }
    let (re_default, im_default) = match cfg.model.model {
        ModelKind::Qubit => ("-0.2:0.2:101", "-0.2:0.2:101"),
        ModelKind::Hn => ("-2.5:2.5:101", "-2:2:81"),
    };
    let re = parse_axis(cfg.re.as_deref().unwrap_or(re_default))?;
    let im = parse_axis(cfg.im.as_deref().unwrap_or(im_default))?;

    let mut summary = Summary::start("pseudospec", &cfg, None);
    let a = cfg.model.build()?;
    let grid = sweep_grid(&a, &re, &im, cfg.eps)?;
    let out = OutDir::create(&args.out)?;
    out.write("grid.csv", |w| grid.write_csv(w))?;

    let mut inside_r: f64 = 0.0;
    let mut outside_r = f64::INFINITY;
    for (i, &y) in im.iter().enumerate() {
        for (j, &x) in re.iter().enumerate() {
            let r = x.hypot(y);
            if grid.contains(i, j) {
                inside_r = inside_r.max(r);
            } else {
                outside_r = outside_r.min(r);
            }
        }
    }
    let mut results = json!({
        "nodes": re.len() * im.len(),
        "inside": grid.count_inside(),
        "min_sigma0": grid.min_sigma0(),
        "max_inside_radius": if grid.count_inside() > 0 { json!(inside_r) } else { json!(null) },
        "min_outside_radius": if outside_r.is_finite() { json!(outside_r) } else { json!(null) },
    });
    match cfg.model.model {
        ModelKind::Qubit => {
            results["ep_radius"] = json!(ep_radius(cfg.eps));
        }
        ModelKind::Hn => {
            let m = &cfg.model;
            let ev = match m.boundary {
                Boundary::Periodic => hn_pbc_eigenvalues(m.n, m.hopping, m.gamma),
                Boundary::Open => hn_obc_eigenvalues(m.n, m.hopping, m.gamma),
            };
            let mut inside = 0;
            for z in &ev {
                if sigma0_at(&a, *z)? <= cfg.eps {
                    inside += 1;
                }
            }
            results["closed_form_eigenvalues"] = json!(ev.len());
            results["closed_form_eigenvalues_inside"] = json!(inside);
        }
    }
    summary.flag("grid_float_format", "17 significant digits");
    println!(
        "pseudospec: {} of {} nodes inside the {}-pseudospectrum -> {}",
        grid.count_inside(),
        re.len() * im.len(),
        cfg.eps,
        out.path("grid.csv").display()
    );
    summary.write(&out, results)?;
    Ok(0)
}
