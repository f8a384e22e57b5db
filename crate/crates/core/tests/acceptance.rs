//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits non-zero if any of them fails.

use std::f64::consts::PI;
use std::time::Instant;

use nhps::hnmix::{
    build_population_generator, mixing_time_bound, population_vs_full_dynamics, tv_distance_closed_form, tv_distance_numeric,
    ChainVariant,
};
use nhps::lindblad::{
    deferred_reset_equivalence, highest_energy_state, hn_lindblad_spec, jump_from_coupling, lindblad_rhs,
    mixing_time_discrete, step_filter, DensityMatrix, DiscreteChannel, LindbladSpec, STEP_TOL,
};
use nhps::models::{
    clock_gadget, cyclic_gadget, cyclic_gadget_spectrum, default_hopping_penalty, eigvals, hatano_nelson, hn_obc_eigenvalues,
    hn_pbc_eigenvalues, hopping_clock_gadget, mesh_gadget, one_hot_sector, pauli_x, qft_matrix, qubit_model, spectrum_distance,
    ClockReduction, HnParams,
};
use nhps::numlin::{eigh, svd, ComplexMatrix, C64, ONE, ZERO};
use nhps::pseudospec::{ep_radius, linspace, sigma0_at, sweep_grid};
use nhps::qsigs::{estimate_sigma0, theorem_q, GridSpec, QsigsConfig};
use nhps::reproduce::{run_table, TableConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{DiscreteCDF, Poisson};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> C64 {
    // Box–Muller on two uniforms; only rough normality is needed here.
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random();
    let r = (-2.0 * u1.ln()).sqrt();
    C64::new(r * (2.0 * PI * u2).cos(), r * (2.0 * PI * u2).sin())
}

fn random_matrix(rng: &mut ChaCha8Rng, d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |_, _| gaussian(rng))
}

fn random_unitary(rng: &mut ChaCha8Rng, d: usize) -> ComplexMatrix {
    eigh(&random_matrix(rng, d).hermitian_part()).unwrap().vectors
}

fn with_spectrum(u: &ComplexMatrix, values: &[f64]) -> ComplexMatrix {
    u.matmul(&ComplexMatrix::diag_real(values)).mul_adjoint(u)
}

fn table_reproduction() -> Outcome {
    let cfg = TableConfig::default();
    let mut full = 0;
    let mut worst: f64 = 0.0;
    let mut truth_ok = true;
    let expected = [4.99e-3, 1.25e-3, 0.0, 1.25e-3, 4.99e-3];
    for seed in 1..=20u64 {
        let rows = run_table(&cfg, seed).map_err(|e| e.to_string())?;
        if rows.iter().all(|r| r.abs_error <= 6e-4) {
            full += 1;
        }
        for (r, e) in rows.iter().zip(expected) {
            worst = worst.max(r.abs_error);
            truth_ok &= (r.sigma0_truth - e).abs() <= 5e-6;
        }
    }
    check(full >= 18 && truth_ok, format!("{full}/20 seeds pass all rows, worst |theta* - sigma0| = {worst:.2e}, truth column ok = {truth_ok}"))
}

fn pseudospectrum_analytics() -> Outcome {
    let a = qubit_model(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let closed = (z.norm_sqr() + 1.0).sqrt() - 1.0;
        worst = worst.max((sigma0_at(&a, z).map_err(|e| e.to_string())? - closed).abs());
    }
    let eps = 0.002;
    let axis = linspace(-0.1, 0.1, 201);
    let cell = axis[1] - axis[0];
    let grid = sweep_grid(&a, &axis, &axis, eps).map_err(|e| e.to_string())?;
    let (mut r_in, mut r_out) = (0.0f64, f64::INFINITY);
    for (i, y) in axis.iter().enumerate() {
        for (j, x) in axis.iter().enumerate() {
            let r = x.hypot(*y);
            if grid.contains(i, j) {
                r_in = r_in.max(r);
            } else {
                r_out = r_out.min(r);
            }
        }
    }
    let r = ep_radius(eps);
    let ok = worst <= 1e-10 && (r_in - r).abs() <= cell && (r_out - r).abs() <= cell && (r - 0.0633).abs() < 5e-5;
    check(ok, format!("closed-form error {worst:.1e}; level set between {r_in:.4} and {r_out:.4}, radius {r:.5}"))
}

fn hatano_nelson_spectra() -> Outcome {
    let (j, g) = (1.0, 0.8);
    let mut worst: f64 = 0.0;
    for n in [4, 8, 12, 20] {
        let pbc = eigvals(&hatano_nelson(&HnParams::periodic(n, j, g)).unwrap()).map_err(|e| e.to_string())?;
        let obc = eigvals(&hatano_nelson(&HnParams::open(n, j, g)).unwrap()).map_err(|e| e.to_string())?;
        worst = worst.max(spectrum_distance(&pbc, &hn_pbc_eigenvalues(n, j, g)));
        worst = worst.max(spectrum_distance(&obc, &hn_obc_eigenvalues(n, j, g)));
    }
    check(worst <= 1e-8, format!("largest eigenvalue mismatch {worst:.1e}"))
}

/// `U† (Σ_{j∈S} |j⟩⟨j+s|) U` with indices taken mod n.
fn fourier_shift(n: usize, range: impl Iterator<Item = usize>, shift: isize) -> ComplexMatrix {
    let u = qft_matrix(n);
    let mut p = ComplexMatrix::zeros(n, n);
    for j in range {
        let k = (j as isize + shift).rem_euclid(n as isize) as usize;
        p[(j % n, k)] = ONE;
    }
    u.adjoint_mul(&p.matmul(&u))
}

fn jump_closed_forms() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in [8, 20] {
        let m = n / 4;
        let spec = hn_lindblad_spec(&HnParams::periodic(n, 1.0, 0.8), ZERO, 0.1, false).map_err(|e| e.to_string())?;
        let k0 = fourier_shift(n, (m..2 * m).chain(3 * m..4 * m), 1);
        let k1 = fourier_shift(n, (1..=m).chain(2 * m + 1..=3 * m), -1);
        worst = worst.max((&spec.jumps[0] - &k0).max_abs()).max((&spec.jumps[1] - &k1).max_abs());
    }
    check(worst <= 1e-10, format!("largest entry mismatch {worst:.1e}"))
}

fn random_instance(rng: &mut ChaCha8Rng, tau: f64) -> (LindbladSpec, Vec<Vec<C64>>) {
    let d = rng.random_range(2..=6);
    let ground = rng.random_range(1..d);
    let mut values: Vec<f64> = (0..d).map(|i| if i < ground { 0.0 } else { rng.random_range(0.2..3.0) }).collect();
    values.sort_by(f64::total_cmp);
    let u = random_unitary(rng, d);
    let hz = with_spectrum(&u, &values);
    let n_jumps = rng.random_range(1..=2);
    let f = step_filter(STEP_TOL);
    let jumps = (0..n_jumps).map(|_| jump_from_coupling(&hz, &random_matrix(rng, d), &f, STEP_TOL).unwrap()).collect();
    let spec = LindbladSpec::new(hz, jumps, tau).unwrap();
    (spec, (0..ground).map(|i| u.col(i)).collect())
}

fn fixed_point_and_trotter() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for i in 0..200 {
        let tau = [0.01, 0.1, 1.0][i % 3];
        let (spec, ground) = random_instance(&mut rng, tau);
        // A random mixed state supported on the ground space, coherences included.
        let d = spec.dim();
        let mut rho = ComplexMatrix::zeros(d, d);
        for _ in 0..ground.len() {
            let coeffs: Vec<C64> = ground.iter().map(|_| gaussian(&mut rng)).collect();
            let phi: Vec<C64> = (0..d).map(|r| ground.iter().zip(&coeffs).map(|(v, c)| v[r] * c).sum()).collect();
            rho = &rho + &ComplexMatrix::outer(&phi, &phi);
        }
        let rho = rho.scale_real(1.0 / rho.trace().re);
        let out = DiscreteChannel::new(&spec).unwrap().apply_matrix(&rho);
        worst = worst.max((&out - &rho).frobenius_norm());
    }
    let mut ratios = Vec::new();
    for _ in 0..10 {
        let (spec, _) = random_instance(&mut rng, 1.0);
        let b = random_matrix(&mut rng, spec.dim());
        let rho = b.mul_adjoint(&b);
        let rho = DensityMatrix::new(rho.scale_real(1.0 / rho.trace().re)).unwrap();
        let l = lindblad_rhs(&spec, &rho).unwrap();
        let err = |tau: f64| {
            let s = LindbladSpec::new(spec.hz.clone(), spec.jumps.clone(), tau).unwrap();
            let out = DiscreteChannel::new(&s).unwrap().apply_matrix(rho.matrix());
            (&(&out - rho.matrix()) - &l.scale_real(tau)).frobenius_norm()
        };
        ratios.push(err(1e-2) / err(5e-3));
    }
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    check(worst <= 1e-10 && lo >= 3.5 && hi <= 4.5, format!("fixed-point drift {worst:.1e} over 200 instances; Richardson ratios in [{lo:.3}, {hi:.3}]"))
}

fn deferred_reset() -> Outcome {
    let a = qubit_model(1.0);
    let mut worst: f64 = 0.0;
    for z in [0.0, 0.05, 0.1] {
        let hz = nhps::lindblad::shifted_gram(&a, C64::new(z, 0.0));
        let k = jump_from_coupling(&hz, &pauli_x(), &step_filter(STEP_TOL), STEP_TOL).unwrap();
        let spec = LindbladSpec::new(hz, vec![k], 0.7).unwrap();
        let rho0 = DensityMatrix::pure(&[ONE, ZERO]).unwrap();
        for steps in 1..=3 {
            worst = worst.max(deferred_reset_equivalence(&spec, &rho0, steps).map_err(|e| e.to_string())?);
        }
    }
    check(worst <= 1e-10, format!("largest deviation {worst:.1e} for k <= 3"))
}

fn mixing_benchmark() -> Outcome {
    let mut pts = Vec::new();
    let mut t20 = f64::NAN;
    for n in [8, 12, 16, 20, 24, 28, 32] {
        let spec = hn_lindblad_spec(&HnParams::periodic(n, 1.0, 0.8), ZERO, 0.1, false).map_err(|e| e.to_string())?;
        let rho0 = highest_energy_state(&spec.hz).unwrap();
        let mt = mixing_time_discrete(&spec, &rho0, 1e-3, 10_000).map_err(|e| e.to_string())?;
        if n == 20 {
            t20 = mt.t_sim;
        }
        pts.push(((n as f64).ln(), mt.t_sim.ln()));
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let slope = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / pts.iter().map(|(x, _)| (x - mx).powi(2)).sum::<f64>();
    check(t20 <= 30.0 && slope <= 1.1, format!("t_sim(n = 20) = {t20:.1}, log-log slope over n = 8..32 is {slope:.3}"))
}

fn mixing_bound() -> Outcome {
    let mut worst_margin = f64::INFINITY;
    let mut oracle_gap: f64 = 0.0;
    let mut rows = 0;
    for m in [4usize, 8, 16, 32, 64, 128] {
        for eps in [1e-1, 1e-2, 1e-3] {
            if (1.0 / eps as f64).ln() > m as f64 {
                continue;
            }
            let t = mixing_time_bound(m, eps).map_err(|e| e.to_string())?;
            // Independent route: the Poisson CDF from a statistics library.
            let cdf = Poisson::new(t).unwrap().cdf(m as u64 - 1);
            oracle_gap = oracle_gap.max((cdf - tv_distance_closed_form(m, t)).abs());
            worst_margin = worst_margin.min(eps - cdf);
            rows += 1;
        }
    }
    let mut ode_gap: f64 = 0.0;
    for m in [1, 3, 8, 20] {
        let chain = build_population_generator(m, ChainVariant::Modified).unwrap();
        for t in [0.5, 2.0, m as f64, 2.0 * m as f64 + 5.0] {
            ode_gap = ode_gap.max((tv_distance_numeric(&chain, t).unwrap() - tv_distance_closed_form(m, t)).abs());
        }
    }
    let full8 = population_vs_full_dynamics(8, 6.0).map_err(|e| e.to_string())?;
    let full12 = population_vs_full_dynamics(12, 10.0).map_err(|e| e.to_string())?;
    let ok = worst_margin >= 0.0 && oracle_gap <= 1e-10 && ode_gap <= 1e-8 && full8 <= 1e-6 && full12 <= 1e-6;
    check(
        ok,
        format!(
            "{rows} in-regime pairs, smallest eps - CDF margin {worst_margin:.2e}; ODE vs closed form {ode_gap:.1e}; full dynamics {full8:.1e} (n = 8), {full12:.1e} (n = 12)"
        ),
    )
}

fn gadget_lemma() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut cyc: f64 = 0.0;
    for _ in 0..5 {
        let b = random_matrix(&mut rng, 3);
        let h = &b.adjoint_mul(&b) + &ComplexMatrix::identity(3).scale_real(0.2);
        for m in [2, 5] {
            let ev = eigvals(&cyclic_gadget(&h, m).unwrap()).unwrap();
            cyc = cyc.max(spectrum_distance(&ev, &cyclic_gadget_spectrum(&h, m).unwrap()));
        }
    }
    let mut scalar: f64 = 0.0;
    for m in 1..=8 {
        let g = cyclic_gadget(&ComplexMatrix::diag_real(&[2f64.powi(-(m as i32))]), m).unwrap();
        for z in eigvals(&g).unwrap() {
            scalar = scalar.max((z.norm() - 0.5).abs());
        }
    }

    // Clock: random PSD on two qubits against the reduction for the gap [0.3, 0.5].
    let red = ClockReduction::from_promise(0.3, 0.5).unwrap();
    let b = random_matrix(&mut rng, 4);
    let h = b.adjoint_mul(&b).scale_real(0.25);
    let g = clock_gadget(&h, &red.z_list, red.gamma_pen).unwrap();
    let hot = one_hot_sector(red.m, 4);
    let clock_block = (&g.restrict(&hot) - &mesh_gadget(&h, &red.z_list).unwrap()).max_abs();
    let rest: Vec<usize> = (0..g.rows()).filter(|i| !hot.contains(i)).collect();
    let clock_sep = eigh(&g.restrict(&rest)).unwrap().values.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);

    // Hopping clock with the default penalty: complement stays at distance ≥ 1.
    let b = random_matrix(&mut rng, 2);
    let h = b.adjoint_mul(&b);
    let m = 4;
    let g = hopping_clock_gadget(&h, m, default_hopping_penalty(&h, m).unwrap()).unwrap();
    let hot = one_hot_sector(m, 2);
    let hop_block = (&g.restrict(&hot) - &cyclic_gadget(&h, m).unwrap()).max_abs();
    let rest: Vec<usize> = (0..g.rows()).filter(|i| !hot.contains(i)).collect();
    let hop_sep = eigvals(&g.restrict(&rest)).unwrap().iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);

    let ok = cyc <= 1e-8 && scalar <= 1e-10 && clock_block <= 1e-12 && clock_sep >= 2.0 * red.eps && hop_block <= 1e-12 && hop_sep >= 1.0;
    check(
        ok,
        format!(
            "cyclic {cyc:.1e}, scalar {scalar:.1e}, clock block {clock_block:.1e} sep {clock_sep:.3} (need {:.3}), hopping block {hop_block:.1e} sep {hop_sep:.3}",
            2.0 * red.eps
        ),
    )
}

fn heisenberg_scaling() -> Outcome {
    // Each seed draws its own σ₀ and singular bases, so the worst case covers
    // arbitrary offsets from the search grid rather than one fixed node.
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let cases: Vec<_> = (0..50)
        .map(|_| {
            let sigma0 = rng.random_range(0.1..0.8);
            let u = random_unitary(&mut rng, 2);
            let v = random_unitary(&mut rng, 2);
            let a = u.matmul(&ComplexMatrix::diag_real(&[sigma0, 1.0])).mul_adjoint(&v);
            let state = DensityMatrix::pure(&v.col(0)).unwrap();
            (a, state)
        })
        .collect();
    let mut report = Vec::new();
    let mut ok = true;
    let mut pts = Vec::new();
    for t in [250.0, 500.0, 1000.0, 2000.0] {
        let mut worst: f64 = 0.0;
        for (seed, (a, state)) in cases.iter().enumerate() {
            let truth = svd(a).unwrap().smallest();
            let cfg =
                QsigsConfig { t_width: t, sigma_trunc: 10.0, n_times: 4000, shots_per_time: 5, grid: GridSpec::theorem(), seed: seed as u64 };
            let est = estimate_sigma0(a, state, &cfg).map_err(|e| e.to_string())?;
            if (est.p0 - 1.0).abs() > 1e-12 {
                return Err(format!("test state has p0 = {}", est.p0));
            }
            worst = worst.max((est.theta_star - truth).abs());
        }
        let bound = 3.0 * theorem_q() / t;
        ok &= worst <= bound;
        pts.push((t, worst));
        report.push(format!("T = {t}: {worst:.2e} <= {bound:.2e}"));
    }
    let scale = pts.last().unwrap().1 / pts[0].1 * 8.0;
    report.push(format!("worst-error ratio T = 2000 vs 250 times 8 = {scale:.2}"));
    check(ok, report.join(", "))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("table reproduction", table_reproduction),
        ("pseudospectrum analytics", pseudospectrum_analytics),
        ("Hatano-Nelson spectra", hatano_nelson_spectra),
        ("jump operator closed forms", jump_closed_forms),
        ("fixed point and Trotter order", fixed_point_and_trotter),
        ("deferred reset", deferred_reset),
        ("mixing benchmark", mixing_benchmark),
        ("mixing bound", mixing_bound),
        ("gadget lemma", gadget_lemma),
        ("Heisenberg scaling", heisenberg_scaling),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (tag, detail) = match f() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} [{:>2}] {name}: {detail} ({:.1} s)", i + 1, start.elapsed().as_secs_f64());
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
