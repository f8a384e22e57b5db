use std::io::Write;
use std::path::PathBuf;

use clap::Subcommand;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use serde_json::json;

use super::common::{usage, CliResult, OutDir, Summary};
use crate::models::{
    clock_gadget, cyclic_gadget, cyclic_gadget_spectrum, default_hopping_penalty, eigvals, hopping_clock_gadget, mesh_gadget,
    one_hot_sector, spectrum_distance, ClockReduction,
};
use crate::numlin::{eigh, svd, ComplexMatrix, C64};
use crate::pseudospec::Verdict;
use crate::qsigs::stream_rng;

#[derive(Debug, Subcommand)]
pub enum GadgetCommand {
    /// Cyclic amplification gadget: spectrum against the predicted roots.
    Cyclic(CyclicArgs),
    /// Unary-clock reduction from a promise gap to a membership question.
    Clock(ClockArgs),
    /// Hopping clock encoding of the cyclic gadget.
    HoppingClock(HoppingArgs),
}

#[derive(Debug, clap::Args)]
pub struct Common {
    #[arg(long, default_value = "nhps-out/gadget")]
    pub out: PathBuf,
    /// Dimension of the random positive semidefinite input.
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, clap::Args)]
pub struct CyclicArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 3)]
    pub m: usize,
    /// Smallest eigenvalue of the input.
    #[arg(long = "lambda-min", default_value_t = 0.1)]
    pub lambda_min: f64,
    /// Use the 1 × 1 input `[delta]` instead of a random matrix.
    #[arg(long)]
    pub delta: Option<f64>,
}

#[derive(Debug, clap::Args)]
pub struct ClockArgs {
    #[command(flatten)]
    pub common: Common,
    /// Lower end of the promise gap.
    #[arg(long, default_value_t = 0.3)]
    pub a: f64,
    /// Upper end of the promise gap.
    #[arg(long, default_value_t = 0.5)]
    pub b: f64,
    #[arg(long = "lambda-min", default_value_t = 0.2)]
    pub lambda_min: f64,
}

#[derive(Debug, clap::Args)]
pub struct HoppingArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 3)]
    pub m: usize,
    #[arg(long = "lambda-min", default_value_t = 0.1)]
    pub lambda_min: f64,
    /// Occupation penalty; defaults to one more than the hopping norm bound.
    #[arg(long = "gamma-pen")]
    pub gamma_pen: Option<f64>,
}

#[derive(Debug, Serialize)]
struct Check {
    name: &'static str,
    value: f64,
    limit: f64,
    pass: bool,
}

impl Check {
    fn at_most(name: &'static str, value: f64, limit: f64) -> Self {
        Self { name, value, limit, pass: value <= limit }
    }

    fn at_least(name: &'static str, value: f64, limit: f64) -> Self {
        Self { name, value, limit, pass: value >= limit }
    }
}

/// Random `d × d` PSD matrix with smallest eigenvalue `lambda_min` and the
/// rest spread over `[lambda_min, lambda_min + 1]`.
fn random_psd(d: usize, lambda_min: f64, seed: u64) -> CliResult<ComplexMatrix> {
    if d == 0 {
        return Err(usage("--d must be positive"));
    }
    if !(lambda_min >= 0.0) {
        return Err(usage("--lambda-min must be non-negative"));
    }
    let mut rng = stream_rng(seed, 0);
    let mut g = || C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
    let b = ComplexMatrix::from_fn(d, d, |_, _| g());
    let basis = eigh(&b.hermitian_part())?.vectors;
    let spectrum: Vec<f64> = (0..d).map(|i| lambda_min + i as f64 / d.max(2).saturating_sub(1) as f64).collect();
    Ok(basis.matmul(&ComplexMatrix::diag_real(&spectrum)).mul_adjoint(&basis))
}

fn report(out: &OutDir, command: &'static str, config: serde_json::Value, seed: u64, checks: Vec<Check>, extra: serde_json::Value) -> CliResult<i32> {
    let pass = checks.iter().all(|c| c.pass);
    for c in &checks {
        println!("{} {}: {:.3e} (limit {:.3e})", if c.pass { "PASS" } else { "FAIL" }, c.name, c.value, c.limit);
    }
    out.write("checks.csv", |w| {
        writeln!(w, "check,value,limit,pass")?;
        for c in &checks {
            writeln!(w, "{},{},{},{}", c.name, c.value, c.limit, c.pass)?;
        }
        Ok(())
    })?;
    let summary = Summary::start(command, &config, Some(seed));
    summary.write(out, json!({ "pass": pass, "checks": checks, "details": extra }))?;
    Ok(if pass { 0 } else { 1 })
}

fn cyclic(a: CyclicArgs) -> CliResult<i32> {
    let (h, lambda_min) = match a.delta {
        Some(d) if d > 0.0 => (ComplexMatrix::diag_real(&[d]), d),
        Some(_) => return Err(usage("--delta must be positive")),
        None => (random_psd(a.common.d, a.lambda_min, a.common.seed)?, a.lambda_min),
    };
    let g = cyclic_gadget(&h, a.m)?;
    let ev = eigvals(&g)?;
    let dist = spectrum_distance(&ev, &cyclic_gadget_spectrum(&h, a.m)?);
    // Eigenvalues near the origin are ill-conditioned at order eps^(1/m).
    let tol = 1e-8 / lambda_min.max(1e-3).powf(1.0 - 1.0 / a.m as f64);
    let mut checks = vec![Check::at_most("spectrum_distance", dist, tol)];
    if let Some(d) = a.delta {
        let r = d.powf(1.0 / a.m as f64);
        let worst = ev.iter().map(|z| (z.norm() - r).abs()).fold(0.0, f64::max);
        checks.push(Check::at_most("modulus_deviation", worst, 1e-10));
    }
    let out = OutDir::create(&a.common.out)?;
    out.write("eigenvalues.csv", |w| {
        writeln!(w, "re,im,abs")?;
        for z in &ev {
            writeln!(w, "{},{},{}", z.re, z.im, z.norm())?;
        }
        Ok(())
    })?;
    let cfg = json!({ "d": h.rows(), "m": a.m, "lambda_min": lambda_min, "delta": a.delta });
    report(&out, "gadget cyclic", cfg, a.common.seed, checks, json!({ "dim": g.rows() }))
}

fn sigma_min(m: &ComplexMatrix) -> CliResult<f64> {
    Ok(svd(m)?.smallest())
}

fn clock(a: ClockArgs) -> CliResult<i32> {
    let red = ClockReduction::from_promise(a.a, a.b)?;
    let d = a.common.d;
    let h = random_psd(d, a.lambda_min, a.common.seed)?;
    let g = clock_gadget(&h, &red.z_list, red.gamma_pen)?;
    let mesh = mesh_gadget(&h, &red.z_list)?;
    let one_hot = one_hot_sector(red.m, d);
    let block_err = (&g.restrict(&one_hot) - &mesh).frobenius_norm();

    let in_sector: std::collections::HashSet<usize> = one_hot.iter().copied().collect();
    let rest: Vec<usize> = (0..g.rows()).filter(|i| !in_sector.contains(i)).collect();
    // The gadget is Hermitian and block diagonal by occupation, so the least
    // singular value off the one-hot sector is its smallest |eigenvalue|.
    let off_sigma = eigh(&g.restrict(&rest))?.values.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
    let sigma0 = sigma_min(&g)?;
    let verdict = Verdict::classify(sigma0, red.eps);
    let expected = if a.lambda_min <= a.a {
        Some(Verdict::In)
    } else if a.lambda_min >= a.b {
        Some(Verdict::Out)
    } else {
        None
    };
    let mut checks = vec![
        Check::at_most("one_hot_block_error", block_err, 1e-12),
        Check::at_least("off_sector_sigma_min", off_sigma, 2.0 * red.eps),
    ];
    if let Some(e) = expected {
        checks.push(Check { name: "verdict_matches_promise", value: sigma0, limit: red.eps, pass: verdict == e });
    }
    let out = OutDir::create(&a.common.out)?;
    let cfg = json!({ "d": d, "a": a.a, "b": a.b, "lambda_min": a.lambda_min });
    let extra = json!({
        "m": red.m, "eps": red.eps, "gamma_pen": red.gamma_pen, "z_list": red.z_list,
        "dim": g.rows(), "sigma0": sigma0, "verdict": verdict, "expected": expected,
    });
    report(&out, "gadget clock", cfg, a.common.seed, checks, extra)
}

fn hopping(a: HoppingArgs) -> CliResult<i32> {
    let d = a.common.d;
    let h = random_psd(d, a.lambda_min, a.common.seed)?;
    let gamma = match a.gamma_pen {
        Some(g) => g,
        None => default_hopping_penalty(&h, a.m)?,
    };
    let g = hopping_clock_gadget(&h, a.m, gamma)?;
    let one_hot = one_hot_sector(a.m, d);
    let cyc = cyclic_gadget(&h, a.m)?;
    let restricted = g.restrict(&one_hot);
    let block_err = (&restricted - &cyc).frobenius_norm();

    let in_sector: std::collections::HashSet<usize> = one_hot.iter().copied().collect();
    let mut leak: f64 = 0.0;
    for r in (0..g.rows()).filter(|i| !in_sector.contains(i)) {
        for &c in &one_hot {
            leak = leak.max(g[(r, c)].norm()).max(g[(c, r)].norm());
        }
    }
    let dist = spectrum_distance(&eigvals(&restricted)?, &cyclic_gadget_spectrum(&h, a.m)?);
    let tol = 1e-8 / a.lambda_min.max(1e-3).powf(1.0 - 1.0 / a.m as f64);
    // Occupation is conserved, so the complement is invariant and its
    // eigenvalues are those of its own block.
    let rest: Vec<usize> = (0..g.rows()).filter(|i| !in_sector.contains(i)).collect();
    let separation = eigvals(&g.restrict(&rest))?.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    let checks = vec![
        Check::at_most("one_hot_block_error", block_err, 1e-12),
        Check::at_most("sector_leakage", leak, 0.0),
        Check::at_most("spectrum_distance", dist, tol),
        Check::at_least("complement_min_modulus", separation, gamma - (a.m as f64 - 1.0) - h.spectral_norm()? - 1e-9),
    ];
    let out = OutDir::create(&a.common.out)?;
    let cfg = json!({ "d": d, "m": a.m, "lambda_min": a.lambda_min, "gamma_pen": gamma });
    report(&out, "gadget hopping-clock", cfg, a.common.seed, checks, json!({ "dim": g.rows() }))
}

pub fn run(cmd: GadgetCommand) -> CliResult<i32> {
    match cmd {
        GadgetCommand::Cyclic(a) => cyclic(a),
        GadgetCommand::Clock(a) => clock(a),
        GadgetCommand::HoppingClock(a) => hopping(a),
    }
}
