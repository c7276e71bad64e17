//! Cross-checks of every fast path against dense contractions.

mod common;

use approx::assert_abs_diff_eq;
use common::{evolved, left_region, right_region, rng, unit_coeffs};
use otoc_core::brickwork::{
    choi_state, evolve_full_chain, evolve_heisenberg, reduced_choi, BrickworkCircuit,
};
use otoc_core::dual_unitary::{
    g_dual_unitary, g_xxz_closed_form, m_minus, m_plus, pauli_operator, random_du_gate, scaling_series,
    transfer_matrix, xxz_gate, Branch, LightconeCut,
};
use otoc_core::entanglement::{bound_geometric, bound_renyi, entanglement_report, geometric_entanglement};
use otoc_core::otoc::{g_reduced, g_theorem1, g_twofold, otoc_choi, otoc_direct};
use otoc_core::random::{haar_unitary, SeededSource};
use otoc_core::tensor::{kron, max_abs, pauli, site_range, CMat, DenseOperator, Site, C64};
use otoc_core::Exec;

#[test]
fn lightcone_truncation_is_exact() {
    for seed in 0..3 {
        let circuit = BrickworkCircuit::haar(8, 3, SeededSource::new(seed), false).unwrap();
        let v = pauli(1);
        let vt = evolve_heisenberg(&circuit, &v, 3).unwrap();
        let full = evolve_full_chain(&circuit, &v, 3).unwrap();
        let (lo, hi) = circuit.chain();
        let embedded = vt.op.embed(&site_range(lo.0, hi.0)).unwrap();
        assert!(max_abs(&(embedded.data() - full.op.data())) < 1e-12);
    }
}

#[test]
fn evolution_preserves_unitarity_and_trace() {
    let circuit = BrickworkCircuit::haar(12, 5, SeededSource::new(4), false).unwrap();
    for steps in 0..=5 {
        let vt = evolve_heisenberg(&circuit, &pauli(2), steps).unwrap();
        assert!(vt.op.unitarity_residual() < 1e-9);
        assert!(vt.op.trace().norm() < 1e-8);
        let c = choi_state(&vt).unwrap();
        assert_abs_diff_eq!(c.state.norm(), 1.0, epsilon = 1e-9);
    }
}

#[test]
fn swap_circuit_translates_the_operator() {
    let circuit = BrickworkCircuit::swap(6, 3).unwrap();
    let vt = evolve_heisenberg(&circuit, &pauli(3), 3).unwrap();
    let sites = vt.op.sites().to_vec();
    let moved = DenseOperator::new(vec![Site(3)], 2, pauli(3)).unwrap().embed(&sites).unwrap();
    assert!(max_abs(&(vt.op.data() - moved.data())) < 1e-12);
}

#[test]
fn choi_state_is_maximally_mixed_on_the_unprimed_copy() {
    let circuit = BrickworkCircuit::haar(6, 3, SeededSource::new(5), true).unwrap();
    let vt = evolve_heisenberg(&circuit, &pauli(1), 3).unwrap();
    let op = vt.op.data();
    let n = vt.op.sites().len();
    let dim = op.nrows();
    // Choi reduction onto the unprimed copy is V V† / dim
    let c = choi_state(&vt).unwrap();
    let amps = c.state.data();
    let mut rho = CMat::zeros(dim, dim);
    for r in 0..dim {
        for s in 0..dim {
            let mut acc = C64::new(0.0, 0.0);
            for p in 0..dim {
                acc += amps[interleave(r, p, n)] * amps[interleave(s, p, n)].conj();
            }
            rho[(r, s)] = acc;
        }
    }
    let expect = CMat::identity(dim, dim) / C64::new(dim as f64, 0.0);
    assert!(max_abs(&(rho - expect)) < 1e-12);
}

/// Index of `|r⟩|p⟩` in the per-site interleaved ordering of qubits.
fn interleave(r: usize, p: usize, n: usize) -> usize {
    let mut idx = 0;
    for k in 0..n {
        let shift = n - 1 - k;
        idx = idx * 4 + ((r >> shift) & 1) * 2 + ((p >> shift) & 1);
    }
    idx
}

#[test]
fn choi_and_direct_contractions_agree() {
    let mut r = rng(10);
    for seed in 0..20u64 {
        let steps = 1 + (seed % 3) as usize;
        let circuit = BrickworkCircuit::haar(6, steps, SeededSource::new(100 + seed), seed % 2 == 0).unwrap();
        let vt = evolve_heisenberg(&circuit, &pauli(1 + (seed % 3) as usize), steps).unwrap();
        let c = choi_state(&vt).unwrap();
        let width = 1 + (seed % 2) as usize;
        let lo = 1 + (seed % 2) as i32;
        let w = DenseOperator::new(site_range(lo, lo + width as i32 - 1), 2, haar_unitary(1 << width, &mut r).unwrap()).unwrap();
        let a = otoc_direct(&w, &vt).unwrap();
        let b = otoc_choi(&w, &c).unwrap();
        assert!((a.value - b.value).norm() < 1e-10, "seed {seed}");
        assert!(a.value.norm() <= 1.0 + 1e-9);
    }
}

#[test]
fn twofold_twirl_reproduces_the_fidelity_formula() {
    for seed in 0..4u64 {
        let circuit = BrickworkCircuit::haar(6, 3, SeededSource::new(seed), seed % 2 == 1).unwrap();
        let vt = evolve_heisenberg(&circuit, &pauli(3), 3).unwrap();
        let c = choi_state(&vt).unwrap();
        for (lo, hi) in [(1, 3), (2, 3), (1, 4), (-3, -1)] {
            let a = g_theorem1(&c, Site(lo), Site(hi)).unwrap().real_part;
            let b = g_twofold(&vt, Site(lo), Site(hi)).unwrap();
            assert_abs_diff_eq!(a, b.real_part, epsilon = 1e-12);
            assert!(b.value.im.abs() < 1e-12);
        }
    }
}

#[test]
fn bounds_hold_on_random_circuits() {
    for seed in 0..6u64 {
        let circuit = BrickworkCircuit::haar(8, 4, SeededSource::new(seed), seed % 2 == 0).unwrap();
        for steps in 1..=4 {
            let vt = evolve_heisenberg(&circuit, &pauli(1), steps).unwrap();
            let c = choi_state(&vt).unwrap();
            let s = steps as i32;
            for b in (1 - s)..s {
                for (lo, hi) in [right_region(steps, b), left_region(steps, b)] {
                    let nu = reduced_choi(&c, lo, hi).unwrap();
                    let g = g_reduced(&nu).unwrap();
                    let rep = entanglement_report(&nu);
                    let d_a = nu.d_a();
                    assert!(g <= bound_renyi(&rep, d_a).unwrap() + 1e-8);
                    assert!(g <= bound_geometric(&rep, d_a).unwrap() + 1e-8);
                    let da2 = (d_a * d_a) as f64;
                    assert!(g >= -1.0 / (da2 - 1.0) - 1e-12 && g <= 1.0 + 1e-12);
                    let eg = geometric_entanglement(&c.state, &nu.inner).unwrap();
                    assert_abs_diff_eq!(eg, rep.geometric, epsilon = 1e-10);
                }
            }
        }
    }
}

#[test]
fn dual_unitary_formula_matches_dense_evolution() {
    let mut r = rng(20);
    for _ in 0..4 {
        let g = random_du_gate(&mut r);
        let coeffs = unit_coeffs(&mut r);
        let v = pauli_operator(coeffs);
        for steps in 1..=4 {
            let (_, c) = evolved(&g.u, &v, steps);
            let s = steps as i32;
            for b in (1 - s)..s {
                let cut = LightconeCut::new(steps, b).unwrap();
                let (lo, hi) = left_region(steps, b);
                let nu = reduced_choi(&c, lo, hi).unwrap();
                let dense = g_reduced(&nu).unwrap();
                let formula = g_dual_unitary(&g.u, coeffs, cut.columns(), nu.d_a(), Branch::EdgeInComplement).unwrap();
                assert_abs_diff_eq!(dense, formula, epsilon = 1e-9);
                let (lo, hi) = right_region(steps, b);
                let nu = reduced_choi(&c, lo, hi).unwrap();
                let dense = g_reduced(&nu).unwrap();
                let formula = g_dual_unitary(&g.u, coeffs, cut.columns(), nu.d_a(), Branch::EdgeInA).unwrap();
                assert_abs_diff_eq!(dense, formula, epsilon = 1e-9);
            }
        }
    }
}

#[test]
fn xxz_closed_form_matches_dense_evolution() {
    let j = std::f64::consts::PI / 8.0;
    let u = xxz_gate(j);
    for coeffs in [[1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.6, 0.0, 0.8]] {
        for steps in 1..=4 {
            let (_, c) = evolved(&u, &pauli_operator(coeffs), steps);
            let s = steps as i32;
            for b in (1 - s)..s {
                let cut = LightconeCut::new(steps, b).unwrap();
                let (lo, hi) = left_region(steps, b);
                let nu = reduced_choi(&c, lo, hi).unwrap();
                let closed = g_xxz_closed_form(j, coeffs, cut.columns(), nu.d_a()).unwrap();
                assert_abs_diff_eq!(g_reduced(&nu).unwrap(), closed.g, epsilon = 1e-9);
            }
        }
    }
}

#[test]
fn m_minus_matches_a_dense_partial_trace() {
    let mut r = rng(30);
    for _ in 0..3 {
        let g = random_du_gate(&mut r);
        let mm = m_minus(&g.u).unwrap();
        let mp = m_plus(&g.u).unwrap();
        for k in 1..4 {
            // M-(σ_k) = tr_2[U†(1⊗σ_k)U]/2, M+(σ_k) = tr_1[U†(σ_k⊗1)U]/2
            let y = g.u.adjoint() * kron(&CMat::identity(2, 2), &pauli(k)) * &g.u;
            let z = g.u.adjoint() * kron(&pauli(k), &CMat::identity(2, 2)) * &g.u;
            let mut t2 = CMat::zeros(2, 2);
            let mut t1 = CMat::zeros(2, 2);
            for a in 0..2 {
                for b in 0..2 {
                    for c in 0..2 {
                        t2[(a, b)] += y[(a * 2 + c, b * 2 + c)] * 0.5;
                        t1[(a, b)] += z[(c * 2 + a, c * 2 + b)] * 0.5;
                    }
                }
            }
            for row in 0..4 {
                let em = (pauli(row) * &t2).trace() * 0.5;
                let ep = (pauli(row) * &t1).trace() * 0.5;
                assert_abs_diff_eq!(mm.m[(row, k)], em.re, epsilon = 1e-12);
                assert_abs_diff_eq!(mp.m[(row, k)], ep.re, epsilon = 1e-12);
            }
        }
    }
}

#[test]
fn transfer_expressions_match_dense_evolution() {
    let mut r = rng(40);
    for trial in 0..3 {
        let u = haar_unitary(4, &mut r).unwrap();
        let coeffs = unit_coeffs(&mut r);
        let v = pauli_operator(coeffs);
        let cache: Vec<_> = (1..=4).map(|s| evolved(&u, &v, s).1).collect();
        for rows in 1..=3 {
            let series = scaling_series(&u, coeffs, rows, 3, Exec::Sequential).unwrap();
            for e in &series {
                let Ok(cut) = LightconeCut::from_rectangle(e.columns, e.rows) else { continue };
                if cut.steps > 4 {
                    continue;
                }
                let c = &cache[cut.steps - 1];
                let (llo, lhi) = left_region(cut.steps, cut.boundary);
                let (rlo, rhi) = right_region(cut.steps, cut.boundary);
                let left = reduced_choi(c, llo, lhi).unwrap();
                let right = reduced_choi(c, rlo, rhi).unwrap();
                let tag = format!("trial {trial} cols {} rows {}", e.columns, e.rows);
                assert_abs_diff_eq!(e.edge_fidelity, left.phi_plus_fidelity(), epsilon = 1e-9);
                assert_abs_diff_eq!(e.fidelity_term, right.phi_plus_fidelity(), epsilon = 1e-9);
                assert!((e.purity_term - left.purity()).abs() < 1e-9, "{tag}");
                assert!((e.purity_term - right.purity()).abs() < 1e-9, "{tag}");
            }
        }
    }
}

#[test]
fn transfer_spectral_radius_is_at_most_one() {
    let mut r = rng(50);
    for w in 1..=3 {
        let u = haar_unitary(4, &mut r).unwrap();
        let t = transfer_matrix(&u, w).unwrap();
        assert!(t.spectral_radius() <= 1.0 + 1e-8);
    }
}

#[test]
fn swap_circuit_reduced_states() {
    let circuit = BrickworkCircuit::swap(8, 4).unwrap();
    for steps in 1..=4 {
        let vt = evolve_heisenberg(&circuit, &pauli(3), steps).unwrap();
        let c = choi_state(&vt).unwrap();
        let front = steps as i32;
        // A = the two sites ending at the front holds V_t; A without the front does not
        let with = reduced_choi(&c, Site(front - 1), Site(front)).unwrap();
        let without = reduced_choi(&c, Site(front + 1), Site(front + 2)).unwrap();
        if front - 1 > 0 {
            assert_abs_diff_eq!(g_reduced(&with).unwrap(), -1.0 / 15.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(g_reduced(&without).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(entanglement_report(&with).renyi2, 0.0, epsilon = 1e-12);
    }
}

#[test]
fn swap_spectra_stay_finite_on_every_cut() {
    // rank-one reduced states on large regions once broke the eigensolver
    let circuit = BrickworkCircuit::swap(8, 4).unwrap();
    for steps in 1..=4 {
        let c = choi_state(&evolve_heisenberg(&circuit, &pauli(3), steps).unwrap()).unwrap();
        for b in (1 - steps as i32)..steps as i32 {
            for (lo, hi) in [left_region(steps, b), right_region(steps, b)] {
                let rep = entanglement_report(&reduced_choi(&c, lo, hi).unwrap());
                assert!(rep.renyi2.is_finite() && rep.geometric.is_finite(), "steps {steps} [{lo}, {hi}]");
                assert_abs_diff_eq!(rep.renyi2, 0.0, epsilon = 1e-12);
            }
        }
    }
}

#[test]
fn sampling_kernel_matches_the_choi_contraction_on_swap_regions() {
    use otoc_core::otoc::OtocKernel;
    use otoc_core::random::traceless_probe;
    let circuit = BrickworkCircuit::swap(8, 4).unwrap();
    let c = choi_state(&evolve_heisenberg(&circuit, &pauli(3), 4).unwrap()).unwrap();
    let mut r = rng(31);
    for (lo, hi) in [(-3, -1), (2, 4), (1, 4), (3, 4)] {
        let nu = reduced_choi(&c, Site(lo), Site(hi)).unwrap();
        let kernel = OtocKernel::new(&nu).unwrap();
        for _ in 0..3 {
            let w = traceless_probe(nu.d_a(), &mut r).unwrap().value;
            let dense = otoc_choi(&DenseOperator::new(site_range(lo, hi), 2, w.clone()).unwrap(), &c).unwrap();
            assert_abs_diff_eq!(kernel.eval(&w).re, dense.real_part, epsilon = 1e-12);
        }
    }
}
