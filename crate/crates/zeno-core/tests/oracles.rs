//! Independent-oracle checks: results computed through one code path are
//! validated against a structurally different computation built only for the
//! test (null-space extraction, a density-matrix master equation).
#![allow(clippy::needless_range_loop)]

use zeno_core::dynamics::{run_trajectory, trajectory_rng};
use zeno_core::hilbert::{
    inner_product, number_operator, projector_from_states, Operator, SpaceConfig, StateVector,
};
use zeno_core::linalg::{expm, kernel_basis};
use zeno_core::model::{
    collective_lowering, dfs_basis, v_system_hamiltonian, v_system_jump_channel, VSystemParams,
    V_FAST, V_METASTABLE,
};
use zeno_core::C64;

#[test]
fn dfs_span_matches_numerical_kernel_for_each_truncation() {
    for n_max in [2usize, 3] {
        let sp = SpaceConfig::new(n_max).unwrap();
        let num = number_operator(sp);
        let jm = collective_lowering(sp);
        let kernel = kernel_basis(&[&num, &jm], 1e-10);
        assert_eq!(kernel.len(), 5, "kernel dimension at n_max = {n_max}");

        let analytic = dfs_basis(sp);
        let p_analytic = projector_from_states(&analytic).unwrap();
        let p_kernel = projector_from_states(&kernel).unwrap();
        assert!(p_analytic.max_abs_diff(&p_kernel) < 1e-10);
        assert!((p_analytic.trace() - C64::new(5.0, 0.0)).norm() < 1e-12);
    }
}

/// Column-stacked Liouvillian of `dρ/dt = −i(Hρ − ρH†) + Σ c ρ c†` with the
/// non-Hermitian conditional `H`. Density matrices are flattened row-major:
/// `vec(ρ)[i·d + j] = ρ_ij`.
fn liouvillian(h: &Operator, channels: &[&Operator]) -> Operator {
    let d = h.dim();
    let mut l = Operator::zeros(d * d);
    let minus_i = C64::new(0.0, -1.0);
    let plus_i = C64::new(0.0, 1.0);
    for i in 0..d {
        for j in 0..d {
            let row = i * d + j;
            for k in 0..d {
                // −i H_{ik} ρ_{kj}
                l.add_assign_at(row, k * d + j, minus_i * h.get(i, k));
                // +i ρ_{ik} conj(H_{jk})
                l.add_assign_at(row, i * d + k, plus_i * h.get(j, k).conj());
            }
            for c in channels {
                for k in 0..d {
                    let cik = c.get(i, k);
                    if cik.norm_sqr() == 0.0 {
                        continue;
                    }
                    for m in 0..d {
                        l.add_assign_at(row, k * d + m, cik * c.get(j, m).conj());
                    }
                }
            }
        }
    }
    l
}

fn steady_state(l: &Operator, d: usize) -> Vec<Vec<C64>> {
    let kernel = kernel_basis(&[l], 1e-10);
    assert_eq!(kernel.len(), 1, "expected a unique steady state");
    let v = &kernel[0];
    let mut rho = vec![vec![C64::new(0.0, 0.0); d]; d];
    for i in 0..d {
        for j in 0..d {
            rho[i][j] = v.amp(i * d + j);
        }
    }
    // Hermitize and normalize the trace.
    let mut trace = C64::new(0.0, 0.0);
    for i in 0..d {
        trace += rho[i][i];
    }
    for i in 0..d {
        for j in 0..d {
            rho[i][j] /= trace;
        }
    }
    rho
}

#[test]
fn v_system_ensemble_matches_master_equation_steady_state() {
    let p = VSystemParams::new(C64::new(0.5, 0.0), C64::new(1.0, 0.0), 0.5).unwrap();
    let h = v_system_hamiltonian(p);
    let channel = v_system_jump_channel(p);
    let l = liouvillian(&h, &[&channel.operator]);

    let rho_ss = steady_state(&l, 3);
    for i in 0..3 {
        assert!(rho_ss[i][i].im.abs() < 1e-12);
        assert!(rho_ss[i][i].re >= 0.0);
    }

    // Oracle self-check: long-time propagation of the master equation from
    // |m⟩⟨m| lands on the kernel steady state.
    let t_relax = 120.0;
    let propagated = expm(&l.scaled(C64::new(t_relax, 0.0)));
    let mut rho0 = StateVector::zeros(9);
    rho0.amps_mut()[V_METASTABLE * 3 + V_METASTABLE] = C64::new(1.0, 0.0);
    let rho_t = propagated.apply(&rho0);
    for i in 0..3 {
        let diag = rho_t.amp(i * 3 + i);
        assert!(
            (diag - rho_ss[i][i]).norm() < 1e-8,
            "master equation has not relaxed on level {i}"
        );
    }

    // Trajectory ensemble: the averaged populations at a late time must
    // reproduce the steady state within Monte-Carlo error.
    let n_traj = 600u64;
    let t_sample = 60.0;
    let mut psi0 = StateVector::zeros(3);
    psi0.amps_mut()[V_METASTABLE] = C64::new(1.0, 0.0);
    let channels = [channel];
    let mut fast_pop = Vec::with_capacity(n_traj as usize);
    let mut meta_pop = Vec::with_capacity(n_traj as usize);
    for id in 0..n_traj {
        let mut rng = trajectory_rng(31_415, id);
        let traj = run_trajectory(&h, &psi0, &channels, t_sample, &mut rng).unwrap();
        fast_pop.push(traj.final_state.amp(V_FAST).norm_sqr());
        meta_pop.push(traj.final_state.amp(V_METASTABLE).norm_sqr());
    }
    for (name, samples, expect) in [
        ("fast", &fast_pop, rho_ss[V_FAST][V_FAST].re),
        ("metastable", &meta_pop, rho_ss[V_METASTABLE][V_METASTABLE].re),
    ] {
        let (mean, se) = zeno_core::stats::mean_and_se(samples);
        assert!(
            (mean - expect).abs() < 3.0 * se,
            "{name} population: ensemble {mean} vs steady state {expect} (se {se})"
        );
    }
}

#[test]
fn sampled_emission_times_reproduce_inverse_square_scaling() {
    // The Monte-Carlo route to the (g/|Ω|)² law: empirical mean waiting
    // times under the CNOT drive, fitted against g/|Ω|, give slope 2 ± 0.1
    // and agree with the deterministic quadrature at every grid point.
    use zeno_core::dynamics::{
        default_pulse_horizon, mean_first_emission_time, EmissionOutcome, EmissionSampler,
        QuadratureConfig,
    };
    use zeno_core::gates::CnotConfig;
    use zeno_core::hilbert::BasisLabel;
    use zeno_core::model::{jump_channels, SystemParams};
    use zeno_core::stats::{geometric_grid, log_log_slope, mean_and_se};

    let sp = SpaceConfig::new(2).unwrap();
    let psi0 = StateVector::basis_state(sp, BasisLabel::new(0, 1, 0)).unwrap();
    let params = SystemParams::new(1.0, 1.0, 0.0).unwrap();
    let channels = jump_channels(params, 1.0, sp).unwrap();
    let omegas = geometric_grid(0.005, 0.05, 8);
    let n_samples = 500u64;

    let mut inv_omega = Vec::new();
    let mut mc_means = Vec::new();
    for (pt, &omega) in omegas.iter().enumerate() {
        let cfg = CnotConfig::new(C64::new(omega, 0.0), params, sp).unwrap();
        let h = cfg.hamiltonian().unwrap();
        let horizon = default_pulse_horizon(1.0, omega);
        let sampler = EmissionSampler::new(&h, &psi0, &channels, horizon, 2048).unwrap();
        let times: Vec<f64> = (0..n_samples)
            .map(|id| {
                let mut rng = trajectory_rng(58_58, pt as u64 * n_samples + id);
                match sampler.sample(&mut rng) {
                    EmissionOutcome::Emitted { time, .. } => time,
                    EmissionOutcome::NoEmissionWithinHorizon { .. } => {
                        panic!("emission beyond 50 (g/omega)^2")
                    }
                }
            })
            .collect();
        let (mc_mean, se) = mean_and_se(&times);
        let quad = mean_first_emission_time(&h, &psi0, &QuadratureConfig::with_horizon(horizon))
            .unwrap();
        assert!(
            (mc_mean - quad.value).abs() < 3.0 * se,
            "omega {omega}: MC {mc_mean} vs quadrature {} (se {se})",
            quad.value
        );
        inv_omega.push(1.0 / omega);
        mc_means.push(mc_mean);
    }
    let slope = log_log_slope(&inv_omega, &mc_means);
    assert!((slope - 2.0).abs() <= 0.1, "sampled slope {slope}");
}

#[test]
fn effective_hamiltonian_embedding_is_projector_sandwich() {
    // P H P computed through the embedding equals the direct sandwich for a
    // non-Hermitian driven Hamiltonian.
    let sp = SpaceConfig::new(2).unwrap();
    let params = zeno_core::model::SystemParams::new(1.0, 0.7, 0.02).unwrap();
    let pulse = zeno_core::gates::cnot_rabi_assignment(C64::new(0.03, 0.0)).unwrap();
    let h = zeno_core::model::conditional_hamiltonian(params, sp)
        .add(&zeno_core::model::laser_hamiltonian(&pulse, sp));
    let dfs = dfs_basis(sp);
    let eff = zeno_core::model::effective_hamiltonian(&h, &dfs).unwrap();
    let p = projector_from_states(&dfs).unwrap();
    let sandwich = p.matmul(&h).matmul(&p);
    assert!(eff.embedded().max_abs_diff(&sandwich) < 1e-13);
    // Coordinates agree with direct inner products.
    for (r, er) in dfs.iter().enumerate() {
        for (c, ec) in dfs.iter().enumerate() {
            let direct = inner_product(er, &h.apply(ec)).unwrap();
            assert!((eff.reduced().get(r, c) - direct).norm() < 1e-14);
        }
    }
}
