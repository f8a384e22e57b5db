//! Spectral gadgets: the cyclic amplifier takes m-th roots of a PSD spectrum,
//! and its hopping clock encoding reproduces it on the one-excitation sector.
//!
//! cargo run --release --example gadgets

use nhps::models::{cyclic_gadget, cyclic_gadget_spectrum, default_hopping_penalty, eigvals, hopping_clock_gadget, one_hot_sector, spectrum_distance};
use nhps::pseudospec::sigma0_at;
use nhps::numlin::{ComplexMatrix, C64, ZERO};

fn main() -> nhps::error::Result<()> {
    // An eigenvalue δ becomes a ring of radius δ^(1/m), so exponentially small
    // gaps turn into constant ones. The least singular value stays at δ.
    for m in [1, 2, 4, 8] {
        let delta = 2f64.powi(-(m as i32));
        let g = cyclic_gadget(&ComplexMatrix::diag_real(&[delta, 1.0]), m)?;
        let closest = eigvals(&g)?.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
        println!("m = {m}: delta = {delta:.4}, nearest eigenvalue {closest:.4}, sigma0 at the origin {:.4}", sigma0_at(&g, ZERO)?);
    }

    let b = ComplexMatrix::from_rows(&[vec![C64::new(0.7, 0.0), C64::new(0.2, -0.4)], vec![C64::new(-0.1, 0.3), C64::new(0.5, 0.0)]]);
    let h = b.adjoint_mul(&b);
    let m = 3;
    let g = hopping_clock_gadget(&h, m, default_hopping_penalty(&h, m)?)?;
    let sector = g.restrict(&one_hot_sector(m, h.rows()));
    let d = spectrum_distance(&eigvals(&sector)?, &cyclic_gadget_spectrum(&h, m)?);
    println!("hopping clock, m = {m}: {} states, one-hot spectrum error {d:.1e}", g.rows());
    Ok(())
}
