//! Decide pseudospectrum membership for a few shifts from simulated shot data,
//! and compare with the exact verdicts.
//!
//! cargo run --release --example membership

use nhps::lindblad::{prepare_dissipative, DensityMatrix};
use nhps::models::{pauli_x, qubit_model};
use nhps::numlin::{C64, ONE, ZERO};
use nhps::pseudospec::{decide_membership, Verdict};
use nhps::qsigs::{estimate_sigma0, GridSpec, QsigsConfig};

fn main() -> nhps::error::Result<()> {
    let a = qubit_model(1.0);
    let eps = 2e-3;
    let start = DensityMatrix::pure(&[ONE, ZERO])?;
    for (k, re) in [0.0, 0.03, 0.06, 0.1, 0.12].into_iter().enumerate() {
        let z = C64::new(re, 0.0);
        let state = prepare_dissipative(&a, z, &[pauli_x()], 1.0, 5, &start)?;
        let cfg = QsigsConfig {
            t_width: 2000.0,
            sigma_trunc: 10.0,
            n_times: 25,
            shots_per_time: 2000,
            grid: GridSpec::Uniform { lo: 0.0, hi: 0.02, nodes: 200_000 },
            seed: 11 + k as u64,
        };
        let est = estimate_sigma0(&a.shifted(z), &state, &cfg)?;
        let exact = decide_membership(&a, z, eps)?;
        println!(
            "z = {re:.2}: estimated {:.3e} -> {:<11} exact {:.3e} -> {}",
            est.theta_star,
            Verdict::classify(est.theta_star, eps).as_str(),
            exact.sigma0,
            exact.verdict
        );
    }
    Ok(())
}
