//! Statistical checks of the samplers and estimators.

use otoc_core::brickwork::{choi_state, evolve_heisenberg, reduced_choi, BrickworkCircuit};
use otoc_core::otoc::{concentration_experiment, g_monte_carlo, g_reduced};
use otoc_core::random::{haar_unitary, twofold_haar_average, SeededSource};
use otoc_core::stats::{ks_pvalue, ks_statistic_uniform};
use otoc_core::tensor::{kron, pauli, CMat, Site, C64};
use otoc_core::Exec;

#[test]
fn haar_first_moment_vanishes() {
    let mut rng = SeededSource::new(1).rng();
    let n = 10_000;
    let mut acc = CMat::zeros(2, 2);
    for _ in 0..n {
        acc += haar_unitary(2, &mut rng).unwrap();
    }
    let mean = acc / C64::new(n as f64, 0.0);
    assert!(mean.iter().all(|z| z.norm() <= 0.05));
}

#[test]
fn empirical_twofold_channel_matches_the_formula() {
    let mut rng = SeededSource::new(2).rng();
    let x = kron(&pauli(1), &pauli(1));
    let n = 10_000;
    let mut acc = CMat::zeros(4, 4);
    for _ in 0..n {
        let u = haar_unitary(2, &mut rng).unwrap();
        let uu = kron(&u, &u);
        acc += uu.adjoint() * &x * uu;
    }
    let empirical = acc / C64::new(n as f64, 0.0);
    let exact = twofold_haar_average(&x, 2).unwrap();
    assert!((empirical - exact).iter().all(|z| z.norm() <= 0.05));
}

#[test]
fn haar_eigenphases_are_uniform() {
    let mut rng = SeededSource::new(3).rng();
    let mut phases = Vec::new();
    for _ in 0..10_000 / 8 {
        let u = haar_unitary(8, &mut rng).unwrap();
        let ev = u.clone().schur().eigenvalues().unwrap();
        phases.extend(ev.iter().map(|z| (z.arg() / std::f64::consts::TAU).rem_euclid(1.0)));
    }
    let d = ks_statistic_uniform(&phases);
    assert!(ks_pvalue(d, phases.len()) > 0.01);
}

#[test]
fn monte_carlo_agrees_with_the_exact_average() {
    for seed in 0..3u64 {
        let circuit = BrickworkCircuit::haar(6, 3, SeededSource::new(seed), false).unwrap();
        let vt = evolve_heisenberg(&circuit, &pauli(3), 3).unwrap();
        let c = choi_state(&vt).unwrap();
        let (lo, hi) = (Site(2), Site(3));
        let exact = g_reduced(&reduced_choi(&c, lo, hi).unwrap()).unwrap();
        let mc = g_monte_carlo(&c, lo, hi, 2000, SeededSource::new(1000 + seed), Exec::Parallel).unwrap();
        assert!((mc.mean - exact).abs() <= 3.0 * mc.std_error, "seed {seed}: {} vs {exact}", mc.mean);
        assert!(mc.imag_mean.abs() <= 3.0 * mc.imag_std_error.max(1e-15));
    }
}

#[test]
fn monte_carlo_is_independent_of_the_strategy() {
    let circuit = BrickworkCircuit::haar(6, 2, SeededSource::new(9), true).unwrap();
    let vt = evolve_heisenberg(&circuit, &pauli(1), 2).unwrap();
    let c = choi_state(&vt).unwrap();
    let a = g_monte_carlo(&c, Site(1), Site(2), 300, SeededSource::new(4), Exec::Sequential).unwrap();
    let b = g_monte_carlo(&c, Site(1), Site(2), 300, SeededSource::new(4), Exec::Parallel).unwrap();
    assert_eq!(a.mean.to_bits(), b.mean.to_bits());
    assert_eq!(a.samples, b.samples);
}

#[test]
fn swap_circuit_samples_are_exactly_one_outside_the_front() {
    let circuit = BrickworkCircuit::swap(6, 2).unwrap();
    let vt = evolve_heisenberg(&circuit, &pauli(3), 2).unwrap();
    let c = choi_state(&vt).unwrap();
    let mc = g_monte_carlo(&c, Site(-1), Site(-1), 50, SeededSource::new(5), Exec::Parallel).unwrap();
    assert!(mc.samples.iter().all(|z| (z - C64::new(1.0, 0.0)).norm() < 1e-12));
    assert!(mc.std_error < 1e-12);
}

#[test]
fn concentration_tail_is_below_the_levy_bound() {
    let circuit = BrickworkCircuit::haar(8, 3, SeededSource::new(6), true).unwrap();
    let vt = evolve_heisenberg(&circuit, &pauli(1), 3).unwrap();
    let c = choi_state(&vt).unwrap();
    let s = concentration_experiment(&c, Site(2), Site(3), 0.5, 2000, SeededSource::new(7), Exec::Parallel).unwrap();
    assert!(s.empirical_tail <= s.levy_bound + 3.0 * s.binomial_std_error);
    let s = concentration_experiment(&c, Site(2), Site(3), 2.0 + 1e-9, 200, SeededSource::new(8), Exec::Parallel).unwrap();
    assert_eq!(s.empirical_tail, 0.0);
}
