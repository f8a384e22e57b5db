//! Periodic and open Hatano–Nelson chains: the periodic spectrum is an
//! ellipse, the open one collapses onto a real segment, and both agree with
//! the closed forms.
//!
//! cargo run --release --example hatano_nelson_spectra

use nhps::models::{eigvals, hatano_nelson, hn_obc_eigenvalues, hn_pbc_eigenvalues, spectrum_distance, HnParams};
use nhps::pseudospec::sigma0_at;
use nhps::numlin::C64;

fn main() -> nhps::error::Result<()> {
    let (j, g) = (1.0, 0.8);
    for n in [8, 16, 32] {
        let pbc = hatano_nelson(&HnParams::periodic(n, j, g))?;
        let obc = hatano_nelson(&HnParams::open(n, j, g))?;
        let d_pbc = spectrum_distance(&eigvals(&pbc)?, &hn_pbc_eigenvalues(n, j, g));
        let d_obc = spectrum_distance(&eigvals(&obc)?, &hn_obc_eigenvalues(n, j, g));
        println!("n = {n:>2}: eigenvalue error pbc {d_pbc:.1e}, obc {d_obc:.1e}");
    }

    // The open chain's spectrum is real, yet inside the periodic ellipse its
    // resolvent norm grows exponentially with n.
    let z = C64::new(0.0, 0.5);
    for n in [8, 16, 24, 32] {
        let s = sigma0_at(&hatano_nelson(&HnParams::open(n, j, g))?, z)?;
        println!("open chain, n = {n:>2}: sigma0(A - 0.5i) = {s:.3e}");
    }
    Ok(())
}
