//! Dissipative preparation of ground right singular vectors.
//!
//! Jump operators are synthesized in the eigenbasis of `H_z = A_z† A_z` so that
//! only energy-lowering transitions survive. The state is then driven either by
//! the continuous Lindblad generator (an RK4 reference integrator) or by the
//! discrete channel `Φ_τ`: conjugation by `e^{−iτH_z}` followed by one
//! Stinespring-dilated dissipative step per jump with rotation angle `√τ`.

use std::io::Write;

use serde::Serialize;

use crate::error::{ensure, Error, Result};
use crate::models::{hatano_nelson, hn_couplings, reflection_coupling, HnParams};
use crate::numlin::{eigh, expm_hermitian, hermitian_dilation, ComplexMatrix, EigResult, C64, I, ONE, ZERO};

/// Tolerance on density-matrix invariants.
pub const STATE_TOL: f64 = 1e-10;
/// Default threshold of the sharp step filter.
pub const STEP_TOL: f64 = 1e-10;
/// Relative spread of eigenvalues treated as one degenerate level.
pub const DEGENERACY_TOL: f64 = 1e-9;
/// Dimension cap for the accumulated-ancilla circuit.
pub const DEFERRED_DIM_CAP: usize = 4096;

const DRIFT_TOL: f64 = 1e-6;

/// A Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    rho: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates the state invariants to [`STATE_TOL`].
    pub fn new(rho: ComplexMatrix) -> Result<Self> {
        ensure!(rho.is_square(), "density matrix must be square");
        ensure!(rho.is_finite(), "density matrix entries must be finite");
        let defect = rho.hermiticity_defect();
        ensure!(defect <= STATE_TOL, "density matrix is not Hermitian (defect {defect:.3e})");
        let tr = rho.trace();
        ensure!((tr - ONE).norm() <= STATE_TOL, "density matrix trace is {tr}, expected 1");
        let lo = eigh(&rho.hermitian_part())?.values[0];
        ensure!(lo >= -STATE_TOL, "density matrix has negative eigenvalue {lo:.3e}");
        Ok(Self { rho })
    }

    /// Hermitizes and renormalizes a channel output before validating it.
    pub fn from_channel_output(rho: &ComplexMatrix) -> Result<Self> {
        Self::new(normalize(rho))
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) nonzero vector.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let nrm = crate::numlin::norm(psi);
        ensure!(nrm > 0.0 && nrm.is_finite(), "pure state needs a nonzero finite vector");
        let v: Vec<C64> = psi.iter().map(|z| z / nrm).collect();
        Ok(Self { rho: ComplexMatrix::outer(&v, &v) })
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self { rho: ComplexMatrix::identity(d).scale_real(1.0 / d as f64) }
    }

    /// Uniform mixture over the given orthonormal columns.
    pub fn uniform_on(vectors: &[Vec<C64>]) -> Result<Self> {
        ensure!(!vectors.is_empty(), "need at least one vector");
        let d = vectors[0].len();
        let mut rho = ComplexMatrix::zeros(d, d);
        for v in vectors {
            rho = &rho + &ComplexMatrix::outer(v, v);
        }
        Self::from_channel_output(&rho)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.rho
    }

    pub fn dim(&self) -> usize {
        self.rho.rows()
    }

    /// `Re Tr(O ρ)`.
    pub fn expectation(&self, op: &ComplexMatrix) -> f64 {
        let d = self.dim();
        let mut s = ZERO;
        for r in 0..d {
            for c in 0..d {
                s += op[(r, c)] * self.rho[(c, r)];
            }
        }
        s.re
    }

    /// `⟨v|ρ|v⟩` for a unit vector `v`.
    pub fn population(&self, v: &[C64]) -> f64 {
        crate::numlin::inner(v, &self.rho.matvec(v)).re
    }
}

fn normalize(rho: &ComplexMatrix) -> ComplexMatrix {
    let h = rho.hermitian_part();
    let tr = h.trace().re;
    h.scale_real(1.0 / tr)
}

/// Hamiltonian `H_z`, jump operators applied in declared order, and step size τ.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladSpec {
    pub hz: ComplexMatrix,
    pub jumps: Vec<ComplexMatrix>,
    pub tau: f64,
}

impl LindbladSpec {
    pub fn new(hz: ComplexMatrix, jumps: Vec<ComplexMatrix>, tau: f64) -> Result<Self> {
        ensure!(hz.is_square() && hz.is_hermitian(1e-12), "H_z must be square and Hermitian");
        ensure!(tau > 0.0 && tau.is_finite(), "tau must be positive, got {tau}");
        let d = hz.rows();
        for (i, k) in jumps.iter().enumerate() {
            ensure!(k.rows() == d && k.cols() == d, "jump {i} is {}x{}, expected {d}x{d}", k.rows(), k.cols());
        }
        Ok(Self { hz, jumps, tau })
    }

    pub fn dim(&self) -> usize {
        self.hz.rows()
    }
}

/// The sharp filter `f̂(ω) = 1` for `ω < −tol`, else 0.
pub fn step_filter(tol: f64) -> impl Fn(f64) -> f64 {
    move |w| if w < -tol { 1.0 } else { 0.0 }
}

/// `K = Σ_{j,k} f̂(λ_j − λ_k) ⟨ψ_j|O|ψ_k⟩ |ψ_j⟩⟨ψ_k|` in the eigenbasis of `H_z`.
///
/// `f̂` must vanish on non-negative frequencies; it is sampled at 0 and 1 and
/// rejected if either value exceeds `tol` in magnitude.
pub fn jump_from_coupling(hz: &ComplexMatrix, o: &ComplexMatrix, fhat: &dyn Fn(f64) -> f64, tol: f64) -> Result<ComplexMatrix> {
    ensure!(
        fhat(0.0).abs() <= tol && fhat(1.0).abs() <= tol,
        "filter must vanish for non-negative frequencies (f(0) = {}, f(1) = {})",
        fhat(0.0),
        fhat(1.0)
    );
    ensure!(o.rows() == hz.rows() && o.cols() == hz.cols(), "coupling and H_z dimensions differ");
    let eig = eigh(hz)?;
    Ok(jump_in_eigenbasis(&eig, o, fhat))
}

fn jump_in_eigenbasis(eig: &EigResult, o: &ComplexMatrix, fhat: &dyn Fn(f64) -> f64) -> ComplexMatrix {
    let v = &eig.vectors;
    let lam = &eig.values;
    let mut m = v.adjoint_mul(&o.matmul(v));
    for j in 0..lam.len() {
        for k in 0..lam.len() {
            m[(j, k)] *= fhat(lam[j] - lam[k]);
        }
    }
    v.matmul(&m).mul_adjoint(v)
}

/// Lowest eigenvalue of `H_z` and an orthonormal basis of its eigenspace.
#[derive(Debug, Clone)]
pub struct GroundSpace {
    pub energy: f64,
    pub vectors: Vec<Vec<C64>>,
    pub projector: ComplexMatrix,
}

impl GroundSpace {
    pub fn of(hz: &ComplexMatrix) -> Result<Self> {
        let eig = eigh(hz)?;
        let e0 = eig.values[0];
        let width = DEGENERACY_TOL * eig.values.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        let vectors: Vec<Vec<C64>> =
            (0..eig.values.len()).filter(|&i| eig.values[i] - e0 <= width).map(|i| eig.vectors.col(i)).collect();
        let d = hz.rows();
        let mut projector = ComplexMatrix::zeros(d, d);
        for v in &vectors {
            projector = &projector + &ComplexMatrix::outer(v, v);
        }
        Ok(Self { energy: e0, vectors, projector })
    }

    pub fn fidelity(&self, rho: &DensityMatrix) -> f64 {
        rho.expectation(&self.projector)
    }
}

/// Highest-energy eigenstate of `H_z` (ties broken by the eigensolver's order).
pub fn highest_energy_state(hz: &ComplexMatrix) -> Result<DensityMatrix> {
    let eig = eigh(hz)?;
    DensityMatrix::pure(&eig.vectors.col(eig.values.len() - 1))
}

/// Precomputed generator `L[ρ] = −i(H_eff ρ − ρ H_eff†) + Σ_a K_a ρ K_a†`
/// with `H_eff = H_z − (i/2) Σ_a K_a†K_a`.
struct Generator<'a> {
    heff: ComplexMatrix,
    jumps: &'a [ComplexMatrix],
}

impl<'a> Generator<'a> {
    fn new(spec: &'a LindbladSpec) -> Self {
        let d = spec.dim();
        let mut g = ComplexMatrix::zeros(d, d);
        for k in &spec.jumps {
            g = &g + &k.adjoint_mul(k);
        }
        let heff = &spec.hz - &g.scale(C64::new(0.0, 0.5));
        Self { heff, jumps: &spec.jumps }
    }

    fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let left = self.heff.matmul(rho);
        let right = rho.mul_adjoint(&self.heff);
        let mut out = (&left - &right).scale(-I);
        for k in self.jumps {
            out = &out + &k.matmul(rho).mul_adjoint(k);
        }
        out
    }
}

/// `−i[H_z, ρ] + Σ_a (K_a ρ K_a† − ½{K_a†K_a, ρ})`.
pub fn lindblad_rhs(spec: &LindbladSpec, rho: &DensityMatrix) -> Result<ComplexMatrix> {
    ensure!(rho.dim() == spec.dim(), "state and generator dimensions differ");
    Ok(Generator::new(spec).apply(rho.matrix()))
}

/// Bound on `dt` accepted by [`evolve_continuous`]: `0.01 / (‖H_z‖ + Σ‖K_a‖²)`.
pub fn max_continuous_dt(spec: &LindbladSpec) -> Result<f64> {
    let mut rate = spec.hz.spectral_norm()?;
    for k in &spec.jumps {
        rate += k.spectral_norm()?.powi(2);
    }
    Ok(if rate == 0.0 { f64::INFINITY } else { 0.01 / rate })
}

/// Integrates the Lindblad equation with classic RK4, Hermitizing and
/// renormalizing after every step. The final step is shortened to land
/// exactly on `t_final`.
pub fn evolve_continuous(spec: &LindbladSpec, rho0: &DensityMatrix, t_final: f64, dt: f64) -> Result<DensityMatrix> {
    let mut rho = rho0.clone();
    evolve_continuous_observed(spec, &mut rho, t_final, dt, |_, _| {})?;
    Ok(rho)
}

/// [`evolve_continuous`] with a callback after every step, receiving the time
/// and the current (renormalized) matrix.
pub fn evolve_continuous_observed(
    spec: &LindbladSpec,
    rho: &mut DensityMatrix,
    t_final: f64,
    dt: f64,
    mut observe: impl FnMut(f64, &ComplexMatrix),
) -> Result<()> {
    ensure!(rho.dim() == spec.dim(), "state and generator dimensions differ");
    ensure!(t_final >= 0.0 && t_final.is_finite(), "t_final must be non-negative");
    ensure!(dt > 0.0, "dt must be positive");
    let limit = max_continuous_dt(spec)?;
    ensure!(dt <= limit * (1.0 + 1e-12), "dt = {dt} exceeds the stability limit {limit:.3e}");
    if t_final == 0.0 {
        return Ok(());
    }
    let gen = Generator::new(spec);
    let steps = (t_final / dt).ceil() as usize;
    let mut m = rho.matrix().clone();
    let mut t = 0.0;
    for s in 0..steps {
        let h = if s + 1 == steps { t_final - t } else { dt };
        let k1 = gen.apply(&m);
        let k2 = gen.apply(&(&m + &k1.scale_real(h / 2.0)));
        let k3 = gen.apply(&(&m + &k2.scale_real(h / 2.0)));
        let k4 = gen.apply(&(&m + &k3.scale_real(h)));
        let incr = &(&k1 + &k4) + &(&k2 + &k3).scale_real(2.0);
        m = &m + &incr.scale_real(h / 6.0);
        let herm = m.hermiticity_defect();
        let tr_err = (m.trace() - ONE).norm();
        if herm > DRIFT_TOL || tr_err > DRIFT_TOL || !m.is_finite() {
            return Err(Error::Integration(format!(
                "state drifted at t = {:.4}: Hermiticity defect {herm:.3e}, trace error {tr_err:.3e}",
                t + h
            )));
        }
        m = normalize(&m);
        t = if s + 1 == steps { t_final } else { t + h };
        observe(t, &m);
    }
    *rho = DensityMatrix::new(m)?;
    Ok(())
}

/// The discrete channel in Kraus form: `ρ ↦ UρU†`, then for each jump
/// `ρ ↦ W₀₀ρW₀₀† + W₁₀ρW₁₀†` where `W = e^{−iK̃√τ}` on (ancilla ⊗ system).
#[derive(Debug, Clone)]
pub struct DiscreteChannel {
    pub unitary: ComplexMatrix,
    /// Per jump, the full dilation unitary and its `(W₀₀, W₁₀)` blocks.
    pub dilations: Vec<(ComplexMatrix, ComplexMatrix, ComplexMatrix)>,
}

impl DiscreteChannel {
    pub fn new(spec: &LindbladSpec) -> Result<Self> {
        let d = spec.dim();
        let unitary = expm_hermitian(&spec.hz, spec.tau)?;
        let angle = spec.tau.sqrt();
        let mut dilations = Vec::with_capacity(spec.jumps.len());
        for k in &spec.jumps {
            let w = expm_hermitian(&hermitian_dilation(k)?, angle)?;
            let w00 = w.submatrix(0, 0, d, d);
            let w10 = w.submatrix(d, 0, d, d);
            dilations.push((w, w00, w10));
        }
        Ok(Self { unitary, dilations })
    }

    pub fn apply_matrix(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut m = rho.conjugate_by(&self.unitary);
        for (_, w00, w10) in &self.dilations {
            m = &m.conjugate_by(w00) + &m.conjugate_by(w10);
        }
        m.hermitian_part()
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::from_channel_output(&self.apply_matrix(rho.matrix()))
    }
}

/// One application of `Φ_τ`.
pub fn step_discrete(spec: &LindbladSpec, rho: &DensityMatrix) -> Result<DensityMatrix> {
    ensure!(rho.dim() == spec.dim(), "state and channel dimensions differ");
    DiscreteChannel::new(spec)?.apply(rho)
}

/// `Φ_τ` evaluated literally: embed `|0⟩⟨0|_a ⊗ ρ`, conjugate by the dilation
/// unitary, trace out the ancilla. Used to cross-check the Kraus form.
pub fn step_discrete_dilated(spec: &LindbladSpec, rho: &DensityMatrix) -> Result<DensityMatrix> {
    ensure!(rho.dim() == spec.dim(), "state and channel dimensions differ");
    let ch = DiscreteChannel::new(spec)?;
    let mut m = rho.matrix().conjugate_by(&ch.unitary);
    let ket0 = ComplexMatrix::diag_real(&[1.0, 0.0]);
    for (w, _, _) in &ch.dilations {
        let big = crate::numlin::kron(&ket0, &m).conjugate_by(w);
        m = crate::numlin::partial_trace_first(&big, 2)?;
    }
    DensityMatrix::from_channel_output(&m)
}

/// Applies `k` channel steps with one fresh ancilla per jump per step, keeping
/// every ancilla until the end, then traces them all out. Returns the
/// Frobenius distance to `Φ_τ^k[ρ₀]`.
pub fn deferred_reset_equivalence(spec: &LindbladSpec, rho0: &DensityMatrix, steps: usize) -> Result<f64> {
    ensure!(rho0.dim() == spec.dim(), "state and channel dimensions differ");
    let d = spec.dim();
    let n_anc = steps * spec.jumps.len();
    let big_dim = 1usize.checked_shl(n_anc as u32).and_then(|a| a.checked_mul(d)).unwrap_or(usize::MAX);
    if big_dim > DEFERRED_DIM_CAP {
        return Err(Error::Resource { needed: big_dim, cap: DEFERRED_DIM_CAP });
    }
    let ch = DiscreteChannel::new(spec)?;

    let mut reference = rho0.matrix().clone();
    for _ in 0..steps {
        reference = ch.apply_matrix(&reference);
    }

    // Index layout: ancilla string * d + system, ancilla qubit i is bit i.
    let mut big = ComplexMatrix::zeros(big_dim, big_dim);
    for r in 0..d {
        for c in 0..d {
            big[(r, c)] = rho0.matrix()[(r, c)];
        }
    }
    let mut anc = 0;
    for _ in 0..steps {
        big = conjugate_local(&big, d, None, &ch.unitary);
        for (w, _, _) in &ch.dilations {
            big = conjugate_local(&big, d, Some(anc), w);
            anc += 1;
        }
    }
    let traced = crate::numlin::partial_trace_first(&big, 1 << n_anc)?;
    Ok((&traced - &reference).frobenius_norm())
}

/// `G M G†` where `G` acts on the system alone (`qubit = None`, `u` is d×d) or
/// on (ancilla `qubit`, system) with `u` a 2d×2d matrix whose leading factor is
/// the ancilla. `M` must be Hermitian.
fn conjugate_local(m: &ComplexMatrix, d: usize, qubit: Option<usize>, u: &ComplexMatrix) -> ComplexMatrix {
    let left = apply_local_left(m, d, qubit, u);
    apply_local_left(&left.adjoint(), d, qubit, u)
}

fn apply_local_left(m: &ComplexMatrix, d: usize, qubit: Option<usize>, u: &ComplexMatrix) -> ComplexMatrix {
    let dim = m.rows();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for row in 0..dim {
        let (a, s) = (row / d, row % d);
        match qubit {
            None => {
                for sp in 0..d {
                    let g = u[(s, sp)];
                    if g == ZERO {
                        continue;
                    }
                    let src = a * d + sp;
                    for c in 0..dim {
                        out[(row, c)] += g * m[(src, c)];
                    }
                }
            }
            Some(q) => {
                let x = (a >> q) & 1;
                for y in 0..2 {
                    let a_src = (a & !(1 << q)) | (y << q);
                    for sp in 0..d {
                        let g = u[(x * d + s, y * d + sp)];
                        if g == ZERO {
                            continue;
                        }
                        let src = a_src * d + sp;
                        for c in 0..dim {
                            out[(row, c)] += g * m[(src, c)];
                        }
                    }
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub step: usize,
    pub t_sim: f64,
    pub energy: f64,
    pub gap: f64,
    pub fidelity_ground: f64,
}

/// Runs up to `max_steps` channel steps, stopping early once the energy gap
/// `Tr(H_z ρ) − E₀` falls to `stop_below` (pass a negative value to never stop).
/// Row 0 is the initial state.
pub fn run_trajectory(
    spec: &LindbladSpec,
    rho0: &DensityMatrix,
    max_steps: usize,
    stop_below: f64,
) -> Result<(Vec<TrajectoryRow>, DensityMatrix)> {
    ensure!(rho0.dim() == spec.dim(), "state and channel dimensions differ");
    let ground = GroundSpace::of(&spec.hz)?;
    let ch = DiscreteChannel::new(spec)?;
    let mut rho = rho0.clone();
    let mut rows = Vec::new();
    let record = |step: usize, rho: &DensityMatrix| {
        let energy = rho.expectation(&spec.hz);
        TrajectoryRow {
            step,
            t_sim: step as f64 * spec.tau,
            energy,
            gap: energy - ground.energy,
            fidelity_ground: ground.fidelity(rho),
        }
    };
    rows.push(record(0, &rho));
    for step in 1..=max_steps {
        if rows.last().is_some_and(|r| r.gap <= stop_below) {
            break;
        }
        rho = ch.apply(&rho)?;
        rows.push(record(step, &rho));
    }
    Ok((rows, rho))
}

pub fn write_trajectory_csv<W: Write>(rows: &[TrajectoryRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "step,t_sim,energy,gap,fidelity_ground")?;
    for r in rows {
        writeln!(w, "{},{},{},{},{}", r.step, r.t_sim, r.energy, r.gap, r.fidelity_ground)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixingTime {
    pub steps: usize,
    pub t_sim: f64,
    pub final_gap: f64,
}

/// Smallest `k` with `Tr(H_z Φ_τ^k[ρ₀]) − E₀ ≤ threshold`, and `t_sim = kτ`.
pub fn mixing_time_discrete(spec: &LindbladSpec, rho0: &DensityMatrix, threshold: f64, max_steps: usize) -> Result<MixingTime> {
    ensure!(threshold > 0.0, "threshold must be positive");
    let (rows, _) = run_trajectory(spec, rho0, max_steps, threshold)?;
    let last = rows.last().copied().expect("trajectory has an initial row");
    if last.gap > threshold {
        return Err(Error::NonConvergence { steps: last.step, final_gap: last.gap });
    }
    Ok(MixingTime { steps: last.step, t_sim: last.t_sim, final_gap: last.gap })
}

/// `H_z = (A − z)†(A − z)` for any square `A`.
pub fn shifted_gram(a: &ComplexMatrix, z: C64) -> ComplexMatrix {
    let az = a.shifted(z);
    az.adjoint_mul(&az)
}

/// Lindblad spec for the Hatano–Nelson chain at shift `z`: jumps synthesized
/// from `O₀`, `O₁` and, optionally, the position-reversal coupling, using the
/// sharp step filter.
pub fn hn_lindblad_spec(p: &HnParams, z: C64, tau: f64, with_reflection: bool) -> Result<LindbladSpec> {
    let hz = shifted_gram(&hatano_nelson(p)?, z);
    let (o0, o1) = hn_couplings(p.n);
    let mut couplings = vec![o0, o1];
    if with_reflection {
        couplings.push(reflection_coupling(p.n));
    }
    let eig = eigh(&hz)?;
    let f = step_filter(STEP_TOL);
    let jumps = couplings.iter().map(|o| jump_in_eigenbasis(&eig, o, &f)).collect();
    LindbladSpec::new(hz, jumps, tau)
}

/// Builds `H_z` for `A − z`, synthesizes one jump per coupling with the step
/// filter, and applies `steps` channel steps to `rho0`.
pub fn prepare_dissipative(
    a: &ComplexMatrix,
    z: C64,
    couplings: &[ComplexMatrix],
    tau: f64,
    steps: usize,
    rho0: &DensityMatrix,
) -> Result<DensityMatrix> {
    let hz = shifted_gram(a, z);
    let eig = eigh(&hz)?;
    let f = step_filter(STEP_TOL);
    let jumps = couplings.iter().map(|o| jump_in_eigenbasis(&eig, o, &f)).collect();
    let spec = LindbladSpec::new(hz, jumps, tau)?;
    let ch = DiscreteChannel::new(&spec)?;
    let mut rho = rho0.clone();
    for _ in 0..steps {
        rho = ch.apply(&rho)?;
    }
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{pauli_x, qft_matrix, qubit_model};

    fn qubit_decay(tau: f64) -> LindbladSpec {
        let hz = ComplexMatrix::diag_real(&[0.0, 1.0]);
        let k = ComplexMatrix::from_rows(&[vec![ZERO, ONE], vec![ZERO, ZERO]]);
        LindbladSpec::new(hz, vec![k], tau).unwrap()
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(ComplexMatrix::diag_real(&[0.5, 0.5])).is_ok());
        assert!(DensityMatrix::new(ComplexMatrix::diag_real(&[0.6, 0.5])).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::diag_real(&[1.5, -0.5])).is_err());
        let mut m = ComplexMatrix::diag_real(&[0.5, 0.5]);
        m[(0, 1)] = C64::new(0.1, 0.0);
        assert!(DensityMatrix::new(m).is_err());
        let p = DensityMatrix::pure(&[ONE, ONE]).unwrap();
        assert!((p.matrix()[(0, 1)].re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn identity_coupling_gives_no_jump() {
        let hz = shifted_gram(&qubit_model(0.3), C64::new(0.2, 0.0));
        let k = jump_from_coupling(&hz, &ComplexMatrix::identity(2), &step_filter(STEP_TOL), 0.0).unwrap();
        assert!(k.frobenius_norm() < 1e-14);
    }

    #[test]
    fn filter_sign_condition() {
        let hz = ComplexMatrix::diag_real(&[0.0, 1.0]);
        let bad = |w: f64| if w <= 0.0 { 1.0 } else { 0.0 };
        assert!(matches!(jump_from_coupling(&hz, &pauli_x(), &bad, 0.0), Err(Error::Contract(_))));
    }

    #[test]
    fn jump_lowers_energy_only() {
        let hz = ComplexMatrix::diag_real(&[0.0, 1.0]);
        let k = jump_from_coupling(&hz, &pauli_x(), &step_filter(STEP_TOL), 0.0).unwrap();
        assert!((k[(0, 1)] - ONE).norm() < 1e-14);
        assert!(k[(1, 0)].norm() < 1e-14);
    }

    #[test]
    fn decay_channel_rabi_factor() {
        let tau = 0.1;
        let spec = qubit_decay(tau);
        let rho = DensityMatrix::pure(&[ONE, ONE]).unwrap();
        let out = step_discrete(&spec, &rho).unwrap();
        let expected = 0.5 * tau.sqrt().cos().powi(2);
        assert!((out.matrix()[(1, 1)].re - expected).abs() < 1e-14);
        let lit = step_discrete_dilated(&spec, &rho).unwrap();
        assert!((out.matrix() - lit.matrix()).frobenius_norm() < 1e-13);
    }

    #[test]
    fn no_jumps_is_unitary_conjugation() {
        let h = shifted_gram(&qubit_model(0.7), C64::new(0.1, -0.2));
        let spec = LindbladSpec::new(h.clone(), vec![], 0.37).unwrap();
        let rho = DensityMatrix::pure(&[ONE, C64::new(0.3, 0.4)]).unwrap();
        let out = step_discrete(&spec, &rho).unwrap();
        let u = expm_hermitian(&h, 0.37).unwrap();
        assert!((out.matrix() - &rho.matrix().conjugate_by(&u)).frobenius_norm() < 1e-13);
    }

    #[test]
    fn rhs_vanishes_on_ground_state() {
        let spec = hn_lindblad_spec(&HnParams::periodic(8, 1.0, 0.8), ZERO, 0.1, false).unwrap();
        let g = GroundSpace::of(&spec.hz).unwrap();
        assert_eq!(g.vectors.len(), 2);
        for v in &g.vectors {
            let rho = DensityMatrix::pure(v).unwrap();
            assert!(lindblad_rhs(&spec, &rho).unwrap().frobenius_norm() < 1e-12);
        }
    }

    #[test]
    fn continuous_zero_time_and_dt_guard() {
        let spec = qubit_decay(0.1);
        let rho = DensityMatrix::maximally_mixed(2);
        assert_eq!(evolve_continuous(&spec, &rho, 0.0, 1e-3).unwrap(), rho);
        assert!(evolve_continuous(&spec, &rho, 1.0, 0.1).is_err());
    }

    #[test]
    fn continuous_decay_matches_exponential() {
        let spec = qubit_decay(0.1);
        let rho = DensityMatrix::pure(&[ZERO, ONE]).unwrap();
        let out = evolve_continuous(&spec, &rho, 2.0, 1e-3).unwrap();
        assert!((out.matrix()[(1, 1)].re - (-2.0f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn deferred_reset_single_step_is_exact() {
        let hz = shifted_gram(&qubit_model(1.0), C64::new(0.1, 0.0));
        let k = jump_from_coupling(&hz, &pauli_x(), &step_filter(STEP_TOL), 0.0).unwrap();
        let spec = LindbladSpec::new(hz, vec![k], 0.5).unwrap();
        let rho = DensityMatrix::maximally_mixed(2);
        assert!(deferred_reset_equivalence(&spec, &rho, 1).unwrap() < 1e-13);
        assert!(deferred_reset_equivalence(&spec, &rho, 3).unwrap() < 1e-12);
        assert!(matches!(deferred_reset_equivalence(&spec, &rho, 12), Err(Error::Resource { .. })));
    }

    #[test]
    fn ground_start_mixes_immediately() {
        let spec = hn_lindblad_spec(&HnParams::periodic(8, 1.0, 0.8), ZERO, 0.1, false).unwrap();
        let g = GroundSpace::of(&spec.hz).unwrap();
        let rho = DensityMatrix::pure(&g.vectors[0]).unwrap();
        let mt = mixing_time_discrete(&spec, &rho, 1e-3, 10).unwrap();
        assert_eq!(mt.steps, 0);
        let top = highest_energy_state(&spec.hz).unwrap();
        assert!(matches!(mixing_time_discrete(&spec, &top, 1e-3, 0), Err(Error::NonConvergence { steps: 0, .. })));
    }

    #[test]
    fn hn_jumps_shift_fourier_modes() {
        let n = 8;
        let spec = hn_lindblad_spec(&HnParams::periodic(n, 1.0, 0.8), ZERO, 0.1, false).unwrap();
        let u = qft_matrix(n);
        let k0 = u.adjoint().matmul(&spec.jumps[0]).matmul(&u);
        // Energy |E_k|² falls from k = 0 to m = 2 and from 2m to 3m.
        for r in 0..n {
            for c in 0..n {
                let on = r == c + 1 && matches!(c, 0 | 1 | 4 | 5);
                assert!((k0[(r, c)] - if on { ONE } else { ZERO }).norm() < 1e-10, "({r},{c})");
            }
        }
    }
}
