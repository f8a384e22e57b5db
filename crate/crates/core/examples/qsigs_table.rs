//! Estimate the ground singular value of the exceptional-point qubit at five
//! shifts with simulated shots, and compare against the exact values.
//!
//! cargo run --release --example qsigs_table [seed]

use nhps::reproduce::{run_table, TableConfig};

fn main() -> nhps::error::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let cfg = TableConfig::default();
    println!("{:>6} {:>12} {:>12} {:>10} {:>7}", "z", "theta*", "sigma0", "|diff|", "p0");
    for r in run_table(&cfg, seed)? {
        println!(
            "{:>6} {:>12.3e} {:>12.3e} {:>10.1e} {:>7.4} {}",
            r.z,
            r.theta_star,
            r.sigma0_truth,
            r.abs_error,
            r.p0,
            if r.pass { "ok" } else { "MISS" }
        );
    }
    Ok(())
}
