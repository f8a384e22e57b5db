//! Classical simulation of pseudospectrum estimation for non-Hermitian
//! operators.
//!
//! The pipeline prepares the ground right-singular space of `A − z` with a
//! simulated dissipative channel ([`lindblad`]), estimates the smallest
//! singular value from simulated single-ancilla shot data with a Gaussian
//! filter ([`qsigs`]), and turns the estimate into a membership verdict for the
//! ε-pseudospectrum ([`pseudospec`]). [`models`] holds the test operators and
//! the complexity gadgets, [`hnmix`] the analytic mixing bound for the
//! Hatano–Nelson chain, and [`numlin`] the dense complex linear algebra
//! underneath.
//!
//! Runnable examples, one per capability (`cargo run --release --example <name>`):
//!
//! - `qubit_pseudospectrum`: ε-pseudospectra of the exceptional-point qubit
//! - `hatano_nelson_spectra`: periodic and open chain spectra and the skin effect
//! - `dissipative_preparation`: channel mixing times over chain lengths
//! - `membership`: shot-based membership decisions against exact ones
//! - `qsigs_table`: the five-shift ground singular value table
//! - `mixing_bound`: the birth chain, its closed form and the bound
//! - `gadgets`: cyclic amplification and its clock encoding

pub mod cli;
pub mod error;
pub mod hnmix;
pub mod lindblad;
pub mod models;
pub mod numlin;
pub mod pseudospec;
pub mod qsigs;
pub mod reproduce;
