//! The seven experiments. Each returns its rows; invariants are evaluated
//! separately in [`crate::checks`] so that `verify` can re-run them on a
//! stored record.

use otoc_core::brickwork::{choi_state, choi_vector, evolve_heisenberg, phi_plus, reduced_choi, BrickworkCircuit, ChoiState, ReducedChoi};
use otoc_core::dual_unitary::{
    completely_chaotic_diagnostic, du_edge_fidelity, du_two_channel_expression, g_dual_unitary, g_xxz_closed_form,
    g_xxz_exponential_form, m_minus, m_plus, pauli_operator, pauli_vector, random_du_gate, scaling_series, xxz_gate,
    Branch, LightconeCut,
};
use otoc_core::entanglement::{bound_geometric, bound_renyi, entanglement_report, EntanglementReport};
use otoc_core::otoc::{concentration_stats, g_from_fidelity, g_monte_carlo, g_reduced, sample_otocs, OtocKernel};
use otoc_core::random::{gaussian_pair, haar_unitary, SeededSource};
use otoc_core::stats::mean_stderr;
use otoc_core::tensor::{kron, swap_gate, CMat, Site};
use otoc_core::Exec;

use crate::config::{self, Config, ExperimentKind, Probe};
use crate::error::{LabError, LabResult};
use crate::table::{Cell, Table};

/// Stream ids under the config seed.
const GATE_STREAM: u64 = 0;
const MC_STREAM: u64 = 1;
const PROBE_STREAM: u64 = 2;

pub fn run_experiment(cfg: &Config, exec: Exec) -> LabResult<Table> {
    match cfg.experiment {
        ExperimentKind::SwapCase => swap_case(cfg, cfg.swap_case.as_ref().expect("resolved"), exec),
        ExperimentKind::HaarBoundSweep => haar_bound_sweep(cfg, cfg.haar_bound_sweep.as_ref().expect("resolved"), exec),
        ExperimentKind::XxzDecay => xxz_decay(cfg.xxz_decay.as_ref().expect("resolved"), exec),
        ExperimentKind::DuCrosscheck => du_crosscheck(cfg, cfg.du_crosscheck.as_ref().expect("resolved")),
        ExperimentKind::Concentration => concentration(cfg, cfg.concentration.as_ref().expect("resolved"), exec),
        ExperimentKind::ChaoticDiagnostic => chaotic(cfg, cfg.chaotic_diagnostic.as_ref().expect("resolved")),
        ExperimentKind::GlobalHaarNu => global_haar_nu(cfg, cfg.global_haar_nu.as_ref().expect("resolved"), exec),
    }
}

pub fn expected_columns(kind: ExperimentKind) -> &'static [&'static str] {
    match kind {
        ExperimentKind::SwapCase => &SWAP_COLUMNS,
        ExperimentKind::HaarBoundSweep => &SWEEP_COLUMNS,
        ExperimentKind::XxzDecay => &XXZ_COLUMNS,
        ExperimentKind::DuCrosscheck => &DU_COLUMNS,
        ExperimentKind::Concentration => &CONCENTRATION_COLUMNS,
        ExperimentKind::ChaoticDiagnostic => &CHAOTIC_COLUMNS,
        ExperimentKind::GlobalHaarNu => &NU_COLUMNS,
    }
}

fn probe_operator(p: Probe) -> LabResult<CMat> {
    pauli_vector(p)?;
    Ok(pauli_operator(p))
}

/// Dense runs stop here; the core cap admits wider lightcones than are
/// practical to diagonalise cut by cut.
pub const MAX_DENSE_STEPS: usize = 5;

fn dense_cap(steps: usize) -> LabResult<()> {
    if steps > MAX_DENSE_STEPS {
        return Err(otoc_core::Error::Resource(format!(
            "{steps} dense half steps exceed the cap of {MAX_DENSE_STEPS}"
        ))
        .into());
    }
    Ok(())
}

fn chain_length(requested: Option<usize>, max_steps: usize) -> LabResult<usize> {
    let need = (2 * max_steps).max(2);
    match requested {
        None => Ok(need),
        Some(n) if n >= need => Ok(n),
        Some(n) => Err(LabError::Usage(format!(
            "chain length {n} cannot hold the lightcone of {max_steps} half steps (needs {need})"
        ))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }

    /// `[−(s−1), b]` or `[b+1, s]`.
    pub fn region(self, cut: LightconeCut) -> (i32, i32) {
        match self {
            Side::Left => (cut.left_edge(), cut.boundary),
            Side::Right => (cut.boundary + 1, cut.right_edge()),
        }
    }
}

/// The lightcone edge-holding sides of every cut after `steps` half steps.
fn cuts(steps: usize) -> impl Iterator<Item = LightconeCut> {
    let s = steps as i32;
    ((1 - s)..s).map(move |b| LightconeCut::new(steps, b).expect("boundary inside the lightcone"))
}

struct Instance {
    g: f64,
    report: EntanglementReport,
    bound_renyi: f64,
    bound_geometric: f64,
    d_a: usize,
}

fn instance(nu: &ReducedChoi) -> LabResult<Instance> {
    let report = entanglement_report(nu);
    let d_a = nu.d_a();
    Ok(Instance {
        g: g_reduced(nu)?,
        bound_renyi: bound_renyi(&report, d_a)?,
        bound_geometric: bound_geometric(&report, d_a)?,
        report,
        d_a,
    })
}

struct McCells {
    mean: f64,
    std_error: f64,
    f_min: f64,
    f_max: f64,
}

impl McCells {
    fn absent() -> Self {
        McCells { mean: f64::NAN, std_error: f64::NAN, f_min: f64::NAN, f_max: f64::NAN }
    }
}

fn monte_carlo(c: &ChoiState, lo: i32, hi: i32, samples: usize, src: SeededSource, exec: Exec) -> LabResult<McCells> {
    let est = g_monte_carlo(c, Site(lo), Site(hi), samples, src, exec)?;
    let re = est.samples.iter().map(|z| z.re);
    let f_min = re.clone().fold(f64::INFINITY, f64::min);
    let f_max = re.fold(f64::NEG_INFINITY, f64::max);
    Ok(McCells { mean: est.mean, std_error: est.std_error, f_min, f_max })
}

fn mc_applies(lo: i32, hi: i32, samples: usize, max_sites: usize) -> bool {
    samples >= 2 && (hi - lo + 1) as usize <= max_sites && !(lo..=hi).contains(&0)
}

pub const SWAP_COLUMNS: [&str; 19] = [
    "steps", "x_plus", "x_minus", "boundary", "side", "region_lo", "region_hi", "d_a", "g_exact", "g_expected", "s2",
    "von_neumann", "e_g", "bound_renyi", "bound_geometric", "g_mc", "g_mc_stderr", "f_min", "f_max",
];

fn swap_case(cfg: &Config, p: &config::SwapCase, exec: Exec) -> LabResult<Table> {
    dense_cap(p.max_steps)?;
    let v = probe_operator(p.probe)?;
    let circuit = BrickworkCircuit::swap(chain_length(p.chain_length, p.max_steps)?, p.max_steps)?;
    let mc_root = SeededSource::with_stream(cfg.seed, MC_STREAM);
    let mut t = Table::new(&SWAP_COLUMNS);
    for steps in 1..=p.max_steps {
        let c = choi_state(&evolve_heisenberg(&circuit, &v, steps)?)?;
        for cut in cuts(steps) {
            for side in [Side::Left, Side::Right] {
                let (lo, hi) = side.region(cut);
                let inst = instance(&reduced_choi(&c, Site(lo), Site(hi))?)?;
                let da2 = (inst.d_a * inst.d_a) as f64;
                // V_t sits on the front site, which the right part holds
                let expected = if side == Side::Right { -1.0 / (da2 - 1.0) } else { 1.0 };
                let mc = if mc_applies(lo, hi, p.mc_samples, p.mc_max_sites) {
                    monte_carlo(&c, lo, hi, p.mc_samples, mc_root.fork(t.len() as u64), exec)?
                } else {
                    McCells::absent()
                };
                t.push(vec![
                    ("steps", steps.into()),
                    ("x_plus", cut.x_plus().into()),
                    ("x_minus", cut.x_minus().into()),
                    ("boundary", cut.boundary.into()),
                    ("side", side.name().into()),
                    ("region_lo", lo.into()),
                    ("region_hi", hi.into()),
                    ("d_a", inst.d_a.into()),
                    ("g_exact", inst.g.into()),
                    ("g_expected", expected.into()),
                    ("s2", inst.report.renyi2.into()),
                    ("von_neumann", inst.report.von_neumann.into()),
                    ("e_g", inst.report.geometric.into()),
                    ("bound_renyi", inst.bound_renyi.into()),
                    ("bound_geometric", inst.bound_geometric.into()),
                    ("g_mc", mc.mean.into()),
                    ("g_mc_stderr", mc.std_error.into()),
                    ("f_min", mc.f_min.into()),
                    ("f_max", mc.f_max.into()),
                ]);
            }
        }
    }
    Ok(t)
}

pub const SWEEP_COLUMNS: [&str; 19] = [
    "gate_seed", "steps", "x_plus", "x_minus", "boundary", "side", "region_lo", "region_hi", "d_a", "g_exact", "s2",
    "von_neumann", "e_g", "bound_renyi", "bound_geometric", "g_mc", "g_mc_stderr", "f_min", "f_max",
];

fn haar_bound_sweep(cfg: &Config, p: &config::HaarBoundSweep, exec: Exec) -> LabResult<Table> {
    let v = probe_operator(p.probe)?;
    dense_cap(p.max_steps)?;
    let length = chain_length(p.chain_length, p.max_steps)?;
    let gates = SeededSource::with_stream(cfg.seed, GATE_STREAM);
    let mc_root = SeededSource::with_stream(cfg.seed, MC_STREAM);
    let mut t = Table::new(&SWEEP_COLUMNS);
    for &gate_seed in &p.gate_seeds {
        let circuit = BrickworkCircuit::haar(length, p.max_steps, gates.fork(gate_seed), p.homogeneous)?;
        for steps in 1..=p.max_steps {
            let s = steps as i32;
            if p.boundary < 1 - s || p.boundary >= s {
                continue;
            }
            let cut = LightconeCut::new(steps, p.boundary)?;
            let c = choi_state(&evolve_heisenberg(&circuit, &v, steps)?)?;
            for side in [Side::Left, Side::Right] {
                let (lo, hi) = side.region(cut);
                let inst = instance(&reduced_choi(&c, Site(lo), Site(hi))?)?;
                let mc = if mc_applies(lo, hi, p.mc_samples, p.mc_max_sites) {
                    monte_carlo(&c, lo, hi, p.mc_samples, mc_root.fork(t.len() as u64), exec)?
                } else {
                    McCells::absent()
                };
                t.push(vec![
                    ("gate_seed", gate_seed.into()),
                    ("steps", steps.into()),
                    ("x_plus", cut.x_plus().into()),
                    ("x_minus", cut.x_minus().into()),
                    ("boundary", cut.boundary.into()),
                    ("side", side.name().into()),
                    ("region_lo", lo.into()),
                    ("region_hi", hi.into()),
                    ("d_a", inst.d_a.into()),
                    ("g_exact", inst.g.into()),
                    ("s2", inst.report.renyi2.into()),
                    ("von_neumann", inst.report.von_neumann.into()),
                    ("e_g", inst.report.geometric.into()),
                    ("bound_renyi", inst.bound_renyi.into()),
                    ("bound_geometric", inst.bound_geometric.into()),
                    ("g_mc", mc.mean.into()),
                    ("g_mc_stderr", mc.std_error.into()),
                    ("f_min", mc.f_min.into()),
                    ("f_max", mc.f_max.into()),
                ]);
            }
        }
    }
    Ok(t)
}

pub const XXZ_COLUMNS: [&str; 20] = [
    "coupling", "steps", "boundary", "columns", "rows", "x_plus", "x_minus", "region_lo", "region_hi", "d_a",
    "g_exact", "g_closed", "g_transfer", "g_main_text", "s2", "s2_dense", "von_neumann", "e_g", "bound_renyi",
    "bound_geometric",
];

/// The fixed region `[region_lo, boundary]` keeps `d_A` constant over the run.
fn xxz_decay(p: &config::XxzDecay, exec: Exec) -> LabResult<Table> {
    let v = probe_operator(p.probe)?;
    dense_cap(p.dense_max_steps)?;
    let max_steps = p.steps.iter().copied().max().ok_or_else(|| LabError::Usage("no steps given".into()))?;
    let region_lo = p.region_lo.unwrap_or(1 - max_steps as i32);
    if region_lo > 1 - max_steps as i32 || region_lo > p.boundary {
        return Err(LabError::Usage(format!(
            "region_lo {region_lo} must reach the left lightcone edge {} and lie left of the boundary",
            1 - max_steps as i32
        )));
    }
    let mut t = Table::new(&XXZ_COLUMNS);
    for &j in &p.couplings {
        let u = xxz_gate(j);
        for &steps in &p.steps {
            let cut = LightconeCut::new(steps, p.boundary)?;
            let (cols, rows) = (cut.columns(), cut.rows());
            let d_a = 1usize
                .checked_shl((p.boundary - region_lo + 1) as u32)
                .filter(|d| *d <= 1 << 30)
                .ok_or_else(|| otoc_core::Error::Resource("region too large".into()))?;
            let closed = g_xxz_closed_form(j, p.probe, cols, d_a)?;
            let series = scaling_series(&u, p.probe, rows, cols, exec)?;
            let last = series.last().expect("columns >= 1");
            let g_transfer = g_from_fidelity(last.edge_fidelity, d_a)?;
            let s2 = -last.purity_term.ln();
            let main = g_xxz_exponential_form(j, p.probe, cols as f64, d_a)?;
            let (g_dense, s2_dense, vn, eg) = if steps <= p.dense_max_steps {
                let circuit = BrickworkCircuit::homogeneous(u.clone(), 2 * steps, steps)?;
                let c = choi_state(&evolve_heisenberg(&circuit, &v, steps)?)?;
                let nu = reduced_choi(&c, Site(region_lo), Site(p.boundary))?;
                let rep = entanglement_report(&nu);
                (g_reduced(&nu)?, rep.renyi2, rep.von_neumann, rep.geometric)
            } else {
                (f64::NAN, f64::NAN, f64::NAN, f64::NAN)
            };
            let report = EntanglementReport { renyi2: s2, von_neumann: vn, geometric: eg, purity: last.purity_term };
            let b_renyi = bound_renyi(&report, d_a)?;
            let b_geo = if eg.is_nan() { f64::NAN } else { bound_geometric(&report, d_a)? };
            t.push(vec![
                ("coupling", j.into()),
                ("steps", steps.into()),
                ("boundary", p.boundary.into()),
                ("columns", cols.into()),
                ("rows", rows.into()),
                ("x_plus", cut.x_plus().into()),
                ("x_minus", cut.x_minus().into()),
                ("region_lo", region_lo.into()),
                ("region_hi", p.boundary.into()),
                ("d_a", d_a.into()),
                ("g_exact", g_dense.into()),
                ("g_closed", closed.g.into()),
                ("g_transfer", g_transfer.into()),
                ("g_main_text", main.into()),
                ("s2", s2.into()),
                ("s2_dense", s2_dense.into()),
                ("von_neumann", vn.into()),
                ("e_g", eg.into()),
                ("bound_renyi", b_renyi.into()),
                ("bound_geometric", b_geo.into()),
            ]);
        }
    }
    Ok(t)
}

pub const DU_COLUMNS: [&str; 21] = [
    "gate", "coupling", "a_x", "a_y", "a_z", "steps", "boundary", "side", "columns", "rows", "d_a", "g_exact",
    "g_formula", "abs_diff", "g_two_channel", "s2", "von_neumann", "e_g", "bound_renyi", "bound_geometric",
    "branch",
];

fn unit_probe(src: SeededSource) -> Probe {
    let mut rng = src.rng();
    let (a, b) = gaussian_pair(&mut rng);
    let (c, _) = gaussian_pair(&mut rng);
    let n = (a * a + b * b + c * c).sqrt();
    [a / n, b / n, c / n]
}

fn du_crosscheck(cfg: &Config, p: &config::DuCrosscheck) -> LabResult<Table> {
    let gates = SeededSource::with_stream(cfg.seed, GATE_STREAM);
    let probes = SeededSource::with_stream(cfg.seed, PROBE_STREAM);
    dense_cap(p.max_steps)?;
    let mut t = Table::new(&DU_COLUMNS);
    for i in 0..p.gates {
        let gate = random_du_gate(&mut gates.fork(i as u64).rng());
        let coeffs = if p.random_probe { unit_probe(probes.fork(i as u64)) } else { p.probe };
        let v = probe_operator(coeffs)?;
        let (mp, mm) = (m_plus(&gate.u)?, m_minus(&gate.u)?);
        let vv = pauli_vector(coeffs)?;
        for steps in 1..=p.max_steps {
            let circuit = BrickworkCircuit::homogeneous(gate.u.clone(), 2 * steps, steps)?;
            let c = choi_state(&evolve_heisenberg(&circuit, &v, steps)?)?;
            for cut in cuts(steps) {
                for side in [Side::Left, Side::Right] {
                    let (lo, hi) = side.region(cut);
                    let inst = instance(&reduced_choi(&c, Site(lo), Site(hi))?)?;
                    let branch = match side {
                        Side::Left => Branch::EdgeInComplement,
                        Side::Right => Branch::EdgeInA,
                    };
                    let formula = g_dual_unitary(&gate.u, coeffs, cut.columns(), inst.d_a, branch)?;
                    let two_channel = match side {
                        Side::Left => g_from_fidelity(du_two_channel_expression(&mp, &mm, &vv, cut.columns()), inst.d_a)?,
                        Side::Right => f64::NAN,
                    };
                    debug_assert!(side == Side::Right || (du_edge_fidelity(&mp, &vv, cut.columns()) >= -1e-12));
                    t.push(vec![
                        ("gate", i.into()),
                        ("coupling", gate.coupling.into()),
                        ("a_x", coeffs[0].into()),
                        ("a_y", coeffs[1].into()),
                        ("a_z", coeffs[2].into()),
                        ("steps", steps.into()),
                        ("boundary", cut.boundary.into()),
                        ("side", side.name().into()),
                        ("columns", cut.columns().into()),
                        ("rows", cut.rows().into()),
                        ("d_a", inst.d_a.into()),
                        ("g_exact", inst.g.into()),
                        ("g_formula", formula.into()),
                        ("abs_diff", (inst.g - formula).abs().into()),
                        ("g_two_channel", two_channel.into()),
                        ("s2", inst.report.renyi2.into()),
                        ("von_neumann", inst.report.von_neumann.into()),
                        ("e_g", inst.report.geometric.into()),
                        ("bound_renyi", inst.bound_renyi.into()),
                        ("bound_geometric", inst.bound_geometric.into()),
                        ("branch", match branch {
                            Branch::EdgeInA => "edge-in-a",
                            Branch::EdgeInComplement => "edge-in-complement",
                        }
                        .into()),
                    ]);
                }
            }
        }
    }
    Ok(t)
}

pub const CONCENTRATION_COLUMNS: [&str; 16] = [
    "region_size", "region_lo", "region_hi", "d_a", "epsilon", "samples", "g_exact", "g_mc", "g_mc_stderr",
    "empirical_tail", "levy_bound", "binomial_stderr", "s2", "e_g", "bound_renyi", "bound_geometric",
];

/// Regions `[s+2−k, s+1]` hold the front, avoid the origin and have `d_A = 2^k`.
fn concentration(cfg: &Config, p: &config::Concentration, exec: Exec) -> LabResult<Table> {
    dense_cap(p.steps)?;
    let v = probe_operator(p.probe)?;
    let circuit = BrickworkCircuit::haar(2 * p.steps, p.steps, SeededSource::with_stream(cfg.seed, GATE_STREAM), true)?;
    let c = choi_state(&evolve_heisenberg(&circuit, &v, p.steps)?)?;
    let mc_root = SeededSource::with_stream(cfg.seed, MC_STREAM);
    let mut t = Table::new(&CONCENTRATION_COLUMNS);
    for &k in &p.region_sizes {
        let hi = p.steps as i32 + 1;
        let lo = hi - k as i32 + 1;
        if k == 0 || lo < 1 {
            return Err(LabError::Usage(format!(
                "a region of {k} sites ending at {hi} must stay right of the origin"
            )));
        }
        let nu = reduced_choi(&c, Site(lo), Site(hi))?;
        let inst = instance(&nu)?;
        let kernel = OtocKernel::new(&nu)?;
        let samples = sample_otocs(&kernel, p.samples, mc_root.fork(k as u64), exec)?;
        let re: Vec<f64> = samples.iter().map(|z| z.re).collect();
        let (mean, se) = mean_stderr(&re);
        for &eps in &p.epsilons {
            let stats = concentration_stats(&samples, inst.g, eps, inst.d_a)?;
            t.push(vec![
                ("region_size", k.into()),
                ("region_lo", lo.into()),
                ("region_hi", hi.into()),
                ("d_a", inst.d_a.into()),
                ("epsilon", eps.into()),
                ("samples", p.samples.into()),
                ("g_exact", inst.g.into()),
                ("g_mc", mean.into()),
                ("g_mc_stderr", se.into()),
                ("empirical_tail", stats.empirical_tail.into()),
                ("levy_bound", stats.levy_bound.into()),
                ("binomial_stderr", stats.binomial_std_error.into()),
                ("s2", inst.report.renyi2.into()),
                ("e_g", inst.report.geometric.into()),
                ("bound_renyi", inst.bound_renyi.into()),
                ("bound_geometric", inst.bound_geometric.into()),
            ]);
        }
    }
    Ok(t)
}

pub const CHAOTIC_COLUMNS: [&str; 9] = [
    "gate", "family", "coupling", "width", "eigenvalue_one_dim", "rainbow_count", "minimal", "lambda_minus",
    "lambda_plus",
];

fn chaotic(cfg: &Config, p: &config::ChaoticDiagnostic) -> LabResult<Table> {
    let mut gates: Vec<(String, &str, f64, CMat)> = Vec::new();
    for (i, &j) in p.xxz_couplings.iter().enumerate() {
        gates.push((format!("xxz-{i}"), "xxz", j, xxz_gate(j)));
    }
    if p.include_swap {
        gates.push(("swap".into(), "swap", std::f64::consts::FRAC_PI_4, swap_gate(2)));
    }
    let src = SeededSource::with_stream(cfg.seed, GATE_STREAM);
    for i in 0..p.random_gates {
        let g = random_du_gate(&mut src.fork(i as u64).rng());
        gates.push((format!("du-{i}"), "random-du", g.coupling, g.u));
    }
    let mut t = Table::new(&CHAOTIC_COLUMNS);
    for (label, family, j, u) in &gates {
        let diag = completely_chaotic_diagnostic(u, p.s_max)?;
        for (k, &dim) in diag.eigenvalue_one_dims.iter().enumerate() {
            t.push(vec![
                ("gate", label.as_str().into()),
                ("family", (*family).into()),
                ("coupling", (*j).into()),
                ("width", (k + 1).into()),
                ("eigenvalue_one_dim", dim.into()),
                ("rainbow_count", (k + 2).into()),
                ("minimal", diag.minimal.into()),
                ("lambda_minus", diag.lambda.into()),
                ("lambda_plus", diag.lambda_plus.into()),
            ]);
        }
    }
    Ok(t)
}

pub const NU_COLUMNS: [&str; 8] =
    ["row", "col", "mean_re", "mean_im", "stderr_re", "stderr_im", "expected_re", "expected_im"];

/// Mean of `|V_t⟩⟨V_t|` over global Haar `U` on `qubits` qubits, with `V`
/// on the first qubit, against `(d²ρ_∞ − |φ⁺⟩⟨φ⁺|)/(d² − 1)`.
fn global_haar_nu(cfg: &Config, p: &config::GlobalHaarNu, exec: Exec) -> LabResult<Table> {
    if p.qubits == 0 || p.qubits > 4 {
        return Err(otoc_core::Error::Resource(format!("{} qubits outside [1, 4]", p.qubits)).into());
    }
    if p.samples < 2 {
        return Err(LabError::Usage("need at least two samples".into()));
    }
    let d = 1usize << p.qubits;
    let v = kron(&probe_operator(p.probe)?, &CMat::identity(d / 2, d / 2));
    let src = SeededSource::with_stream(cfg.seed, GATE_STREAM);
    let states = exec.map(p.samples, |i| {
        let u = haar_unitary(d, &mut src.fork(i as u64).rng()).expect("d >= 2");
        choi_vector(&(u.adjoint() * &v * &u), 2, p.qubits)
    });
    let dd = d * d;
    let phi = phi_plus(2, p.qubits);
    let da2 = dd as f64;
    let mut t = Table::new(&NU_COLUMNS);
    let mut re = vec![0.0; p.samples];
    let mut im = vec![0.0; p.samples];
    for r in 0..dd {
        for c in 0..dd {
            for (k, psi) in states.iter().enumerate() {
                let z = psi[r] * psi[c].conj();
                re[k] = z.re;
                im[k] = z.im;
            }
            let (mre, sre) = mean_stderr(&re);
            let (mim, sim) = mean_stderr(&im);
            let rho_inf = if r == c { 1.0 / da2 } else { 0.0 };
            let proj = phi[r] * phi[c].conj();
            let expect_re = (da2 * rho_inf - proj.re) / (da2 - 1.0);
            let expect_im = -proj.im / (da2 - 1.0);
            t.push(vec![
                ("row", r.into()),
                ("col", c.into()),
                ("mean_re", Cell::F(mre)),
                ("mean_im", Cell::F(mim)),
                ("stderr_re", Cell::F(sre)),
                ("stderr_im", Cell::F(sim)),
                ("expected_re", Cell::F(expect_re)),
                ("expected_im", Cell::F(expect_im)),
            ]);
        }
    }
    Ok(t)
}
