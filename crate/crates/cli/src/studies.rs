//! Scaling studies on the transfer-matrix expressions, used by the
//! acceptance harness rather than the CLI.

use otoc_core::dual_unitary::{
    completely_chaotic_diagnostic, fold_operator, folded_identity, g_dual_unitary, pauli_operator, random_du_gate,
    replica_transfer, scaling_series, Branch, TransferMatrix,
};
use otoc_core::random::{haar_unitary, SeededSource};
use otoc_core::stats::linear_fit;
use otoc_core::tensor::{eigenvalues, CMat, CVec, C64, ONE};
use otoc_core::Exec;

use crate::config::Probe;
use crate::error::{LabError, LabResult};

/// Overlaps below this count as a vanishing prefactor.
pub const PREFACTOR_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SlopeComparison {
    pub gate: usize,
    /// Fitted slope of `ln ⟨φ⁺|ν_A|φ⁺⟩` against the column count.
    pub fidelity_slope: f64,
    /// Fitted slope of `½ ln tr ν_A²`.
    pub half_purity_slope: f64,
    pub relative_gap: f64,
    /// Set when the leading non-unit mode drops out of exactly one side.
    pub footnote: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlopeStudy {
    pub rows: usize,
    pub columns: Vec<usize>,
    pub gates: Vec<SlopeComparison>,
}

impl SlopeStudy {
    pub fn surviving(&self) -> impl Iterator<Item = &SlopeComparison> {
        self.gates.iter().filter(|g| g.footnote.is_none())
    }
}

/// Homogeneous Haar-brick circuits: slopes over `fit_columns` at `rows` rows.
pub fn slope_study(seed: u64, gates: usize, rows: usize, fit_columns: &[usize], probe: Probe) -> LabResult<SlopeStudy> {
    let max_col = *fit_columns.iter().max().ok_or_else(|| LabError::Usage("no columns to fit".into()))?;
    if fit_columns.len() < 2 || fit_columns.contains(&0) {
        return Err(LabError::Usage("need at least two positive column counts".into()));
    }
    let src = SeededSource::with_stream(seed, 0);
    let mut out = Vec::with_capacity(gates);
    for gate in 0..gates {
        let u = haar_unitary(4, &mut src.fork(gate as u64).rng())?;
        let series = scaling_series(&u, probe, rows, max_col, Exec::default())?;
        let x: Vec<f64> = fit_columns.iter().map(|&c| c as f64).collect();
        let lf: Vec<f64> = fit_columns.iter().map(|&c| series[c - 1].fidelity_term.ln()).collect();
        let lp: Vec<f64> = fit_columns.iter().map(|&c| 0.5 * series[c - 1].purity_term.ln()).collect();
        let (sf, sp) = (linear_fit(&x, &lf).slope, linear_fit(&x, &lp).slope);
        let scale = sf.abs().max(sp.abs());
        let relative_gap = if scale == 0.0 { 0.0 } else { (sf - sp).abs() / scale };
        out.push(SlopeComparison {
            gate,
            fidelity_slope: sf,
            half_purity_slope: sp,
            relative_gap,
            footnote: footnote(&u, rows, probe)?,
        });
    }
    Ok(SlopeStudy { rows, columns: fit_columns.to_vec(), gates: out })
}

fn boundary_state(rows: usize, probe: Probe) -> CVec {
    let o = folded_identity();
    let v = fold_operator(&pauli_operator(probe)) * C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut ket = v;
    for _ in 1..rows {
        ket = ket.kronecker(&o);
    }
    ket.kronecker(&ket.map(|z| z.conj()))
}

fn inverse_iteration(m: &CMat, mu: C64) -> CVec {
    let n = m.nrows();
    let shift = mu + C64::new(1e-11, 1e-11);
    let lu = (m - CMat::identity(n, n) * shift).lu();
    let mut x = CVec::from_fn(n, |i, _| C64::new(1.0 + (0.37 * i as f64).sin(), 0.1 * (0.11 * i as f64).cos()));
    x /= C64::new(x.norm(), 0.0);
    for _ in 0..40 {
        let y = lu.solve(&x).unwrap_or_else(|| x.clone());
        x = &y / C64::new(y.norm(), 0.0);
    }
    x
}

/// Eigenvector pair of `t` at the eigenvalue closest to `mu`, and the
/// coefficient of `state` along it.
fn mode(t: &TransferMatrix, mu: C64, state: &CVec) -> (CVec, C64) {
    let right = inverse_iteration(&t.matrix, mu);
    let left = inverse_iteration(&t.matrix.adjoint(), mu.conj());
    let coeff = left.dotc(state) / left.dotc(&right);
    (right, coeff)
}

/// Checks whether the leading non-unit eigenmode of the replica transfer
/// has a vanishing prefactor in exactly one of the fidelity and purity
/// expressions.
fn footnote(u: &CMat, rows: usize, probe: Probe) -> LabResult<Option<String>> {
    let t = replica_transfer(u, rows)?;
    if t.eigenvalue_one_dim() != 1 {
        return Ok(Some("eigenvalue-one space is not one-dimensional".into()));
    }
    let ev = eigenvalues(&t.matrix);
    let Some(mu) = ev.iter().copied().filter(|z| (z - ONE).norm() > 1e-6).max_by(|a, b| a.norm().total_cmp(&b.norm()))
    else {
        return Ok(Some("no non-unit eigenvalue".into()));
    };
    let r0 = boundary_state(rows, probe);
    let (fixed, a1) = mode(&t, ONE, &r0);
    let (lead, amu) = mode(&t, mu, &r0);
    let side = 4usize.pow(rows as u32);
    let o = folded_identity();
    let cap = (1..rows).fold(o.clone(), |acc, _| acc.kronecker(&o));
    let mut fid = C64::new(0.0, 0.0);
    let mut pur = C64::new(0.0, 0.0);
    for r in 0..side {
        for c in 0..side {
            fid += cap[r] * lead[r * side + c] * cap[c];
            pur += a1 * (fixed[r * side + c] * lead[c * side + r] + lead[r * side + c] * fixed[c * side + r]);
        }
    }
    let (f, p) = ((amu * fid).norm(), (amu * pur).norm());
    Ok(match (f < PREFACTOR_FLOOR, p < PREFACTOR_FLOOR) {
        (true, false) => Some(format!("fidelity prefactor {f:.1e} vanishes at |mu| = {:.4}", mu.norm())),
        (false, true) => Some(format!("purity prefactor {p:.1e} vanishes at |mu| = {:.4}", mu.norm())),
        _ => None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapPoint {
    pub columns: usize,
    pub rows: usize,
    pub d_a: usize,
    pub g: f64,
    /// `exp(−½ S⁽²⁾)`.
    pub renyi_term: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapTrend {
    pub gate: usize,
    pub coupling: f64,
    pub lambda: f64,
    /// Gap at fixed rows over the requested column counts.
    pub along_columns: Vec<GapPoint>,
    /// Gap at the first column count over rows `1..=rows`.
    pub along_rows: Vec<GapPoint>,
}

impl GapTrend {
    pub fn decreasing_in_columns(&self) -> bool {
        self.along_columns.windows(2).all(|w| w[1].gap < w[0].gap)
    }
}

fn gap_point(u: &CMat, probe: Probe, columns: usize, rows: usize, purity: f64) -> LabResult<GapPoint> {
    // the region left of the cut holds 2·columns sites
    let d_a = 1usize << (2 * columns);
    let g = g_dual_unitary(u, probe, columns, d_a, Branch::EdgeInComplement)?;
    let renyi_term = purity.sqrt();
    Ok(GapPoint { columns, rows, d_a, g, renyi_term, gap: (g - renyi_term).abs() })
}

/// Picks the first random dual-unitary gate that is completely chaotic with
/// `λ ≥ 2^{-1/2}` and tracks `|G − exp(−½S⁽²⁾)|`.
pub fn gap_trend(seed: u64, rows: usize, columns: &[usize], probe: Probe, max_tries: usize) -> LabResult<GapTrend> {
    let src = SeededSource::with_stream(seed, 0);
    let threshold = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..max_tries {
        let gate = random_du_gate(&mut src.fork(i as u64).rng());
        let diag = completely_chaotic_diagnostic(&gate.u, 2)?;
        if !diag.minimal || diag.lambda < threshold {
            continue;
        }
        let max_col = columns.iter().copied().max().unwrap_or(1);
        let series = scaling_series(&gate.u, probe, rows, max_col, Exec::default())?;
        let along_columns = columns
            .iter()
            .map(|&c| gap_point(&gate.u, probe, c, rows, series[c - 1].purity_term))
            .collect::<LabResult<Vec<_>>>()?;
        let c0 = columns.first().copied().unwrap_or(1);
        let along_rows = (1..=rows)
            .map(|r| {
                let s = scaling_series(&gate.u, probe, r, c0, Exec::default())?;
                gap_point(&gate.u, probe, c0, r, s[c0 - 1].purity_term)
            })
            .collect::<LabResult<Vec<_>>>()?;
        return Ok(GapTrend { gate: i, coupling: gate.coupling, lambda: diag.lambda, along_columns, along_rows });
    }
    Err(LabError::Usage(format!("no completely chaotic gate with lambda >= 2^(-1/2) in {max_tries} draws")))
}
