//! The birth chain behind the Hatano–Nelson mixing argument: the closed-form
//! distance to the absorbing state, the same quantity from direct
//! integration, and the m + 3√(m ln 1/ε) bound.
//!
//! cargo run --release --example mixing_bound

use nhps::hnmix::{bound_table, build_population_generator, tv_distance_closed_form, tv_distance_numeric, ChainVariant};

fn main() -> nhps::error::Result<()> {
    let chain = build_population_generator(6, ChainVariant::Modified)?;
    for t in [2.0, 6.0, 12.0] {
        println!("m = 6, t = {t:>4}: closed form {:.6e}, integrated {:.6e}", tv_distance_closed_form(6, t), tv_distance_numeric(&chain, t)?);
    }
    println!("{:>5} {:>7} {:>9} {:>11}", "m", "eps", "bound", "TV there");
    for r in bound_table(&[4, 16, 64, 256], &[1e-1, 1e-3])? {
        println!("{:>5} {:>7.0e} {:>9.2} {:>11.3e}", r.m, r.eps, r.bound, r.tv_at_bound);
    }
    Ok(())
}
