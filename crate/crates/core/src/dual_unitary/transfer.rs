//! Lightcone transfer matrices of a homogeneous brickwork.
//!
//! A column of the lightcone rectangle is swept by a carry leg that enters
//! capped with the folded identity `o`: each brick takes the carry and one
//! row leg, returns the row leg and passes the new carry on. The single-copy
//! column [`transfer_matrix`] caps the outgoing carry with `o`; the replica
//! column [`replica_transfer`] runs a ket and a bra copy side by side and
//! glues their outgoing carries, which is the object whose powers give the
//! purity of `ν_A`.

use super::channel::{fold_operator, folded_heisenberg, folded_identity, pauli_operator};
use super::check_dual_unitarity;
use crate::error::{domain, resource, Result};
use crate::exec::Exec;
use crate::tensor::{eigenvalues, singular_values, CMat, CVec, C64, ZERO};

/// Default and hard caps on the width of a materialized single-copy transfer matrix.
pub const DEFAULT_TRANSFER_WIDTH: usize = 3;
pub const MAX_TRANSFER_WIDTH: usize = 5;
/// Cap on the width of a materialized replica transfer matrix (`16^w` square).
pub const MAX_REPLICA_WIDTH: usize = 3;
/// Cap on the width of matrix-free replica sweeps.
pub const MAX_SWEEP_WIDTH: usize = 5;
/// Singular values of `T − 1` below this count towards the eigenvalue-one space.
pub const EIGENSPACE_TOL: f64 = 1e-8;

/// Brick acting on `(row leg, carry)`: `g[(i2, i1), (o1, o2)] = S[(i1, i2), (o1, o2)]`.
fn column_gate(u: &CMat) -> CMat {
    let s = folded_heisenberg(u);
    CMat::from_fn(16, 16, |r, c| {
        let (i2, i1) = (r / 4, r % 4);
        s[(i1 * 4 + i2, c)]
    })
}

/// Applies a 16 × 16 gate to legs `p` and `q` of a tensor whose legs all have
/// dimension 4 (big-endian); `g[(p', q'), (p, q)]`.
fn apply_pair(data: &[C64], n_legs: usize, p: usize, q: usize, g: &CMat, exec: Exec) -> Vec<C64> {
    let sp = 4usize.pow((n_legs - 1 - p) as u32);
    let sq = 4usize.pow((n_legs - 1 - q) as u32);
    exec.map(data.len(), |idx| {
        let dp = (idx / sp) % 4;
        let dq = (idx / sq) % 4;
        let base = idx - dp * sp - dq * sq;
        let row = dp * 4 + dq;
        let mut acc = ZERO;
        for a in 0..4 {
            for b in 0..4 {
                acc += g[(row, a * 4 + b)] * data[base + a * sp + b * sq];
            }
        }
        acc
    })
}

fn append_leg(data: &[C64], leg: &CVec) -> Vec<C64> {
    let mut out = Vec::with_capacity(data.len() * leg.len());
    for &x in data {
        out.extend(leg.iter().map(|&l| x * l));
    }
    out
}

/// Folded gate for a sweep, cached across columns.
#[derive(Debug, Clone)]
pub struct ColumnGate {
    ket: CMat,
    bra: CMat,
}

impl ColumnGate {
    pub fn new(u: &CMat) -> Self {
        let ket = column_gate(u);
        let bra = ket.map(|z| z.conj());
        ColumnGate { ket, bra }
    }
}

/// One single-copy column on `width` folded legs.
pub fn apply_column(gate: &ColumnGate, state: &[C64], width: usize, exec: Exec) -> Vec<C64> {
    let o = folded_identity();
    let mut x = append_leg(state, &o);
    for v in 0..width {
        x = apply_pair(&x, width + 1, v, width, &gate.ket, exec);
    }
    x.chunks(4).map(|c| c.iter().zip(o.iter()).map(|(a, b)| a * b).sum()).collect()
}

/// One replica column on `width` ket legs followed by `width` bra legs.
pub fn apply_replica(gate: &ColumnGate, state: &[C64], width: usize, exec: Exec) -> Vec<C64> {
    let o = folded_identity();
    let n = 2 * width + 2;
    let mut x = append_leg(&append_leg(state, &o), &o);
    for v in 0..width {
        x = apply_pair(&x, n, v, 2 * width, &gate.ket, exec);
        x = apply_pair(&x, n, width + v, 2 * width + 1, &gate.bra, exec);
    }
    x.chunks(16).map(|c| (0..4).map(|k| c[k * 5]).sum()).collect()
}

#[derive(Debug, Clone)]
pub struct TransferMatrix {
    pub width: usize,
    pub matrix: CMat,
}

impl TransferMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn spectral_radius(&self) -> f64 {
        eigenvalues(&self.matrix).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Dimension of the eigenvalue-one eigenspace, the nullity of `T − 1`.
    pub fn eigenvalue_one_dim(&self) -> usize {
        let n = self.dim();
        let shifted = &self.matrix - CMat::identity(n, n);
        singular_values(&shifted).iter().filter(|&&s| s < EIGENSPACE_TOL).count()
    }
}

fn materialize<F>(width: usize, dim: usize, apply: F) -> TransferMatrix
where
    F: Fn(&[C64]) -> Vec<C64> + Sync + Send,
{
    let cols = Exec::default().map(dim, |k| {
        let mut e = vec![ZERO; dim];
        e[k] = C64::new(1.0, 0.0);
        apply(&e)
    });
    let mut m = CMat::zeros(dim, dim);
    for (k, col) in cols.iter().enumerate() {
        for (r, &z) in col.iter().enumerate() {
            m[(r, k)] = z;
        }
    }
    TransferMatrix { width, matrix: m }
}

fn check_unitary_brick(u: &CMat) -> Result<()> {
    let check = check_dual_unitarity(u)?;
    if !check.time_unitary {
        return Err(domain(format!("brick is not unitary (residual {:.3e})", check.time_residual)));
    }
    Ok(())
}

/// Single-copy column transfer matrix, `4^width` square. Width one is `𝓜₊`
/// in folded form.
pub fn transfer_matrix(u: &CMat, width: usize) -> Result<TransferMatrix> {
    check_unitary_brick(u)?;
    if width == 0 || width > MAX_TRANSFER_WIDTH {
        return Err(resource(format!("transfer width {width} outside [1, {MAX_TRANSFER_WIDTH}]")));
    }
    let gate = ColumnGate::new(u);
    Ok(materialize(width, 4usize.pow(width as u32), |e| apply_column(&gate, e, width, Exec::Sequential)))
}

/// Replica column transfer matrix, `16^width` square.
pub fn replica_transfer(u: &CMat, width: usize) -> Result<TransferMatrix> {
    check_unitary_brick(u)?;
    if width == 0 || width > MAX_REPLICA_WIDTH {
        return Err(resource(format!("replica transfer width {width} outside [1, {MAX_REPLICA_WIDTH}]")));
    }
    let gate = ColumnGate::new(u);
    Ok(materialize(width, 16usize.pow(width as u32), |e| apply_replica(&gate, e, width, Exec::Sequential)))
}

/// Rainbow vector `r_j` in the replica space: the last `glued` rows pair
/// their ket and bra legs maximally, the others carry `o ⊗ o`.
pub fn rainbow_state(width: usize, glued: usize) -> Result<CVec> {
    if glued > width {
        return Err(domain(format!("cannot glue {glued} of {width} rows")));
    }
    let o = folded_identity();
    let half = C64::new(0.5, 0.0);
    let dim = 16usize.pow(width as u32);
    let side = 4usize.pow(width as u32);
    let v = CVec::from_fn(dim, |idx, _| {
        let (ket, bra) = (idx / side, idx % side);
        let mut amp = C64::new(1.0, 0.0);
        for k in 0..width {
            let shift = 2 * (width - 1 - k);
            let (a, b) = ((ket >> shift) & 3, (bra >> shift) & 3);
            amp *= if k >= width - glued {
                if a == b { half } else { ZERO }
            } else {
                o[a] * o[b]
            };
        }
        amp
    });
    Ok(v)
}

/// The three transfer-matrix expressions of a lightcone rectangle with
/// `columns` columns and `rows` rows:
/// `fidelity_term` is `⟨φ⁺|ν_A|φ⁺⟩` for the right region (which holds the
/// front), `edge_fidelity` the same for the left region, and `purity_term`
/// is `tr ν_A²` (equal for both sides).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingExpressions {
    pub columns: usize,
    pub rows: usize,
    pub fidelity_term: f64,
    pub purity_term: f64,
    pub edge_fidelity: f64,
}

/// Expressions for `columns = 1..=max_columns` at fixed `rows`, sharing the sweep.
pub fn scaling_series(u: &CMat, coeffs: [f64; 3], rows: usize, max_columns: usize, exec: Exec) -> Result<Vec<ScalingExpressions>> {
    check_unitary_brick(u)?;
    super::channel::pauli_vector(coeffs)?;
    if rows == 0 || rows > MAX_SWEEP_WIDTH {
        return Err(resource(format!("row count {rows} outside [1, {MAX_SWEEP_WIDTH}]")));
    }
    let gate = ColumnGate::new(u);
    let o = folded_identity();
    let v = fold_operator(&pauli_operator(coeffs)) * C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut ket = vec![C64::new(1.0, 0.0)];
    let mut cap = vec![C64::new(1.0, 0.0)];
    ket = append_leg(&ket, &v);
    for _ in 1..rows {
        ket = append_leg(&ket, &o);
    }
    for _ in 0..rows {
        cap = append_leg(&cap, &o);
    }
    let bra_vec = CVec::from_iterator(ket.len(), ket.iter().map(|z| z.conj()));
    let mut column = ket.clone();
    let mut replica = append_leg(&ket, &bra_vec);
    let side = ket.len();
    let mut out = Vec::with_capacity(max_columns);
    for n in 1..=max_columns {
        column = apply_column(&gate, &column, rows, exec);
        replica = apply_replica(&gate, &replica, rows, exec);
        let edge_fidelity: f64 = column.iter().map(|z| z.norm_sqr()).sum();
        let mut fid = ZERO;
        let mut pur = ZERO;
        for r in 0..side {
            for c in 0..side {
                let x = replica[r * side + c];
                fid += cap[r] * x * cap[c];
                pur += x * replica[c * side + r];
            }
        }
        out.push(ScalingExpressions { columns: n, rows, fidelity_term: fid.re, purity_term: pur.re, edge_fidelity });
    }
    Ok(out)
}

pub fn scaling_expressions(u: &CMat, coeffs: [f64; 3], columns: usize, rows: usize) -> Result<ScalingExpressions> {
    if columns == 0 {
        return Err(domain("need at least one column"));
    }
    Ok(*scaling_series(u, coeffs, rows, columns, Exec::default())?.last().expect("columns >= 1"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChaoticDiagnostic {
    /// Eigenvalue-one dimension of the replica transfer at widths `1..=s_max`.
    pub eigenvalue_one_dims: Vec<usize>,
    /// Every width has exactly the `w + 1` rainbow vectors.
    pub minimal: bool,
    /// Largest nontrivial eigenvalue modulus of `𝓜₋`.
    pub lambda: f64,
    pub lambda_plus: f64,
}

pub fn completely_chaotic_diagnostic(u: &CMat, s_max: usize) -> Result<ChaoticDiagnostic> {
    let mm = super::channel::m_minus(u)?;
    let mp = super::channel::m_plus(u)?;
    let mut dims = Vec::with_capacity(s_max);
    for w in 1..=s_max {
        dims.push(replica_transfer(u, w)?.eigenvalue_one_dim());
    }
    let minimal = dims.iter().enumerate().all(|(k, &d)| d == k + 2);
    Ok(ChaoticDiagnostic {
        eigenvalue_one_dims: dims,
        minimal,
        lambda: mm.nontrivial_radius(),
        lambda_plus: mp.nontrivial_radius(),
    })
}
