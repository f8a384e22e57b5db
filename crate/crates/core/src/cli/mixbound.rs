use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::common::{load_config, usage, CliResult, OutDir, Summary};
use crate::hnmix::{bound_table, write_bound_csv};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MixBoundConfig {
    pub m_values: Vec<usize>,
    pub eps_values: Vec<f64>,
}

impl Default for MixBoundConfig {
    fn default() -> Self {
        Self { m_values: vec![4, 8, 16, 32, 64, 128, 256], eps_values: vec![1e-1, 1e-2, 1e-3] }
    }
}

#[derive(Debug, clap::Args)]
pub struct Args {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value = "nhps-out/mix-bound")]
    pub out: PathBuf,
    /// Comma-separated chain sizes m.
    #[arg(long = "m", value_delimiter = ',')]
    pub m_values: Option<Vec<usize>>,
    /// Comma-separated accuracies.
    #[arg(long = "eps", value_delimiter = ',')]
    pub eps_values: Option<Vec<f64>>,
}

pub fn run(args: Args) -> CliResult<i32> {
    let mut cfg: MixBoundConfig = load_config(args.config.as_deref())?;
    if let Some(v) = args.m_values {
        cfg.m_values = v;
    }
    if let Some(v) = args.eps_values {
        cfg.eps_values = v;
    }
    if cfg.m_values.iter().any(|&m| m == 0) || cfg.eps_values.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
        return Err(usage("need m >= 1 and 0 < eps < 1"));
    }
    let summary = Summary::start("mix-bound", &cfg, None);
    let rows = bound_table(&cfg.m_values, &cfg.eps_values)?;
    let skipped = cfg.m_values.len() * cfg.eps_values.len() - rows.len();
    let out = OutDir::create(&args.out)?;
    out.write("bound_table.csv", |w| write_bound_csv(&rows, w))?;
    let violations: Vec<_> = rows.iter().filter(|r| r.tv_at_bound > r.eps).collect();
    for r in &violations {
        eprintln!("violation: m = {}, eps = {}, TV at bound = {:.3e}", r.m, r.eps, r.tv_at_bound);
    }
    println!("mix-bound: {} rows certified, {} out of regime, {} violations", rows.len() - violations.len(), skipped, violations.len());
    summary.write(&out, json!({ "rows": rows, "out_of_regime": skipped, "violations": violations.len() }))?;
    Ok(if violations.is_empty() { 0 } else { 1 })
}
