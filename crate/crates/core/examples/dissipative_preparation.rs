//! Drive the Hatano–Nelson Gram operator at z = 0 toward its ground space with
//! the discrete dissipative channel, then sweep the chain length.
//!
//! cargo run --release --example dissipative_preparation

use nhps::lindblad::{highest_energy_state, hn_lindblad_spec, mixing_time_discrete};
use nhps::models::HnParams;
use nhps::numlin::ZERO;

fn main() -> nhps::error::Result<()> {
    let threshold = 1e-3;
    println!("{:>4} {:>6} {:>8}", "n", "steps", "t_sim");
    let mut pts = Vec::new();
    for n in [8, 12, 16, 20, 24, 28, 32] {
        let spec = hn_lindblad_spec(&HnParams::periodic(n, 1.0, 0.8), ZERO, 0.1, false)?;
        let rho0 = highest_energy_state(&spec.hz)?;
        let mt = mixing_time_discrete(&spec, &rho0, threshold, 10_000)?;
        println!("{n:>4} {:>6} {:>8.1}", mt.steps, mt.t_sim);
        pts.push(((n as f64).ln(), mt.t_sim.ln()));
    }
    let k = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / k, sy / k);
    let num: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    println!("log-log slope of t_sim against n: {:.3}", num / den);
    Ok(())
}
