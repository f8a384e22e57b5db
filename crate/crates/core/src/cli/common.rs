use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::Error;
use crate::models::{hatano_nelson, qubit_model, Boundary, HnParams};
use crate::numlin::ComplexMatrix;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Contract(_) => CliError::Usage(e.to_string()),
            _ => CliError::Failure(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failure(format!("i/o error: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Reads a JSON config, or the defaults when no path is given.
pub fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> CliResult<T> {
    let Some(path) = path else { return Ok(T::default()) };
    let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("invalid config {}: {e}", path.display())))
}

/// Copies every `Some` flag onto the matching config field.
macro_rules! apply_overrides {
    ($cfg:expr, $args:expr; $($field:ident),* $(,)?) => {
        $( if let Some(v) = $args.$field.clone() { $cfg.$field = v.into(); } )*
    };
}
pub(crate) use apply_overrides;

pub struct OutDir {
    dir: PathBuf,
}

impl OutDir {
    pub fn create(dir: &Path) -> CliResult<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn write(&self, name: &str, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> CliResult<PathBuf> {
        let path = self.path(name);
        let mut w = BufWriter::new(File::create(&path)?);
        f(&mut w)?;
        w.flush()?;
        Ok(path)
    }
}

/// Accumulates the fields every `summary.json` carries.
pub struct Summary {
    command: &'static str,
    started: Instant,
    config: Value,
    seed: Option<u64>,
    flags: serde_json::Map<String, Value>,
}

impl Summary {
    pub fn start(command: &'static str, config: &impl Serialize, seed: Option<u64>) -> Self {
        Self {
            command,
            started: Instant::now(),
            config: serde_json::to_value(config).unwrap_or(Value::Null),
            seed,
            flags: serde_json::Map::new(),
        }
    }

    pub fn flag(&mut self, key: &str, value: impl Serialize) {
        self.flags.insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
    }

    pub fn write(self, out: &OutDir, results: Value) -> CliResult<PathBuf> {
        let doc = json!({
            "tool": "nhps",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "config": self.config,
            "seed": self.seed,
            "flags": Value::Object(self.flags),
            "results": results,
            "wall_time_s": self.started.elapsed().as_secs_f64(),
        });
        out.write("summary.json", |w| {
            serde_json::to_writer_pretty(&mut *w, &doc)?;
            writeln!(w)
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Qubit,
    Hn,
}

/// Operator selection shared by commands that act on a model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub model: ModelKind,
    pub g: f64,
    pub n: usize,
    pub hopping: f64,
    pub gamma: f64,
    pub boundary: Boundary,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self { model: ModelKind::Qubit, g: 1.0, n: 20, hopping: 1.0, gamma: 0.8, boundary: Boundary::Periodic }
    }
}

impl ModelConfig {
    pub fn hn_params(&self) -> HnParams {
        HnParams::new(self.n, self.hopping, self.gamma, self.boundary)
    }

    pub fn build(&self) -> CliResult<ComplexMatrix> {
        Ok(match self.model {
            ModelKind::Qubit => qubit_model(self.g),
            ModelKind::Hn => hatano_nelson(&self.hn_params())?,
        })
    }
}

#[derive(Debug, Clone, clap::Args)]
pub struct ModelArgs {
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,
    /// Non-Hermiticity of the qubit model.
    #[arg(long)]
    pub g: Option<f64>,
    /// Chain length.
    #[arg(long)]
    pub n: Option<usize>,
    /// Hopping amplitude J.
    #[arg(long = "J")]
    pub hopping: Option<f64>,
    /// Non-reciprocity γ.
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, value_parser = parse_boundary)]
    pub boundary: Option<Boundary>,
}

impl ModelArgs {
    pub fn apply(&self, cfg: &mut ModelConfig) {
        apply_overrides!(cfg, self; model, g, n, hopping, gamma, boundary);
    }
}

pub fn parse_boundary(s: &str) -> Result<Boundary, String> {
    match s.to_ascii_lowercase().as_str() {
        "obc" | "open" => Ok(Boundary::Open),
        "pbc" | "periodic" => Ok(Boundary::Periodic),
        _ => Err(format!("unknown boundary '{s}' (expected obc or pbc)")),
    }
}

/// `lo:hi:n` into `n` evenly spaced points.
pub fn parse_axis(spec: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || usage(format!("axis '{spec}' must look like lo:hi:count"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if n == 0 {
        return Err(usage(format!("axis '{spec}' has no nodes")));
    }
    if n > 1 && hi <= lo {
        return Err(usage(format!("axis '{spec}' needs lo < hi")));
    }
    Ok(crate::pseudospec::linspace(lo, hi, n))
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let pts: Vec<(f64, f64)> = points.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let num: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    (den > 0.0).then(|| num / den)
}
