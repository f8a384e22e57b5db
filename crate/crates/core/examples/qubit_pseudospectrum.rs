//! The exceptional-point qubit has a single eigenvalue at the origin, but its
//! ε-pseudospectrum is a disk of radius √(2ε + ε²), far wider than ε.
//!
//! cargo run --release --example qubit_pseudospectrum

use nhps::models::qubit_model;
use nhps::pseudospec::{ep_radius, linspace, sweep_grid};

fn main() -> nhps::error::Result<()> {
    let a = qubit_model(1.0);
    let axis = linspace(-0.12, 0.12, 121);
    for eps in [1e-4, 1e-3, 2e-3, 5e-3] {
        let grid = sweep_grid(&a, &axis, &axis, eps)?;
        let mut widest: f64 = 0.0;
        for (i, y) in axis.iter().enumerate() {
            for (j, x) in axis.iter().enumerate() {
                if grid.contains(i, j) {
                    widest = widest.max(x.hypot(*y));
                }
            }
        }
        println!(
            "eps = {eps:.0e}: {:>5} nodes inside, widest node at |z| = {widest:.4}, predicted radius {:.4}",
            grid.count_inside(),
            ep_radius(eps)
        );
    }
    Ok(())
}
