//! The folded brick `X ↦ U† X U`, the edge channels `𝓜±` and the exact
//! dual-unitary OTOC.

use nalgebra::{Matrix4, Vector4};

use super::check_dual_unitarity;
use crate::error::{domain, structural, Result};
use crate::tensor::{hermitian_eigenvalues, pauli, CMat, CVec, C64, ZERO};

/// Duality residual above which the `𝓜±` maps are refused.
pub const DUALITY_TOL: f64 = 1e-8;

/// The folded identity `vec(1)/√2`.
pub fn folded_identity() -> CVec {
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    CVec::from_vec(vec![h, ZERO, ZERO, h])
}

/// Folded single-site vector of `X`, entry `2a + b` equal to `X_ab`.
pub fn fold_operator(x: &CMat) -> CVec {
    CVec::from_iterator(4, (0..4).map(|k| x[(k / 2, k % 2)]))
}

/// 16 × 16 matrix of `X ↦ U† X U` on two folded sites. Column `(o1, o2)`
/// holds the image of `|a1 a2⟩⟨b1 b2|` with `o_k = 2a_k + b_k`.
pub fn folded_heisenberg(u: &CMat) -> CMat {
    let ud = u.adjoint();
    let mut s = CMat::zeros(16, 16);
    for k in 0..16 {
        let (p1, p2) = (k / 4, k % 4);
        let (a1, b1, a2, b2) = (p1 / 2, p1 % 2, p2 / 2, p2 % 2);
        // U† |a⟩⟨b| U = (column a of U†)(row b of U)
        let left = ud.column(a1 * 2 + a2);
        let right = u.row(b1 * 2 + b2);
        for r in 0..16 {
            let (q1, q2) = (r / 4, r % 4);
            let row = (q1 / 2) * 2 + q2 / 2;
            let col = (q1 % 2) * 2 + q2 % 2;
            s[(r, k)] = left[row] * right[col];
        }
    }
    s
}

fn folded_channels(u: &CMat) -> (CMat, CMat) {
    let s = folded_heisenberg(u);
    let o = folded_identity();
    let mut plus = CMat::zeros(4, 4);
    let mut minus = CMat::zeros(4, 4);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let x = s[(a * 4 + b, c * 4 + d)];
                    plus[(b, c)] += o[a] * x * o[d];
                    minus[(a, d)] += o[b] * x * o[c];
                }
            }
        }
    }
    (plus, minus)
}

/// Folded `𝓜₊` (acting on a single folded site); no duality check.
pub fn m_plus_folded(u: &CMat) -> CMat {
    folded_channels(u).0
}

pub fn m_minus_folded(u: &CMat) -> CMat {
    folded_channels(u).1
}

/// Columns are `vec(σ_k)/√2` for `k = 0..4`.
fn pauli_basis() -> CMat {
    let mut b = CMat::zeros(4, 4);
    for k in 0..4 {
        let v = fold_operator(&pauli(k)) * C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        b.set_column(k, &v);
    }
    b
}

/// A single-qubit superoperator in the basis `(1, σx, σy, σz)/√2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliChannelMatrix {
    pub m: Matrix4<f64>,
}

impl PauliChannelMatrix {
    /// Converts a folded 4 × 4 superoperator. Fails if it is not Hermiticity
    /// preserving, i.e. has a non-real Pauli matrix.
    pub fn from_folded(folded: &CMat) -> Result<Self> {
        if folded.nrows() != 4 || folded.ncols() != 4 {
            return Err(structural("a single-qubit superoperator is 4x4"));
        }
        let b = pauli_basis();
        let p = b.adjoint() * folded * b;
        let imag = p.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        if imag > DUALITY_TOL {
            return Err(domain(format!("map is not Hermiticity preserving (imaginary part {imag:.3e})")));
        }
        Ok(PauliChannelMatrix { m: Matrix4::from_fn(|r, c| p[(r, c)].re) })
    }

    pub fn identity() -> Self {
        PauliChannelMatrix { m: Matrix4::identity() }
    }

    /// Largest deviation of row and column 0 from `(1, 0, 0, 0)`.
    pub fn unitality_residual(&self) -> f64 {
        let mut r: f64 = 0.0;
        for k in 0..4 {
            let e = if k == 0 { 1.0 } else { 0.0 };
            r = r.max((self.m[(0, k)] - e).abs()).max((self.m[(k, 0)] - e).abs());
        }
        r
    }

    /// Eigenvalue moduli, descending.
    pub fn eigenvalue_moduli(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.m.complex_eigenvalues().iter().map(|z| z.norm()).collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        ev
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalue_moduli()[0]
    }

    /// Largest modulus among the eigenvalues after removing the unital one.
    pub fn nontrivial_radius(&self) -> f64 {
        self.eigenvalue_moduli()[1]
    }

    /// Smallest eigenvalue of the normalized Choi matrix; non-negative for CP maps.
    pub fn choi_min_eigenvalue(&self) -> f64 {
        let b = pauli_basis();
        let mc = CMat::from_fn(4, 4, |r, c| C64::new(self.m[(r, c)], 0.0));
        let folded = &b * mc * b.adjoint();
        // Choi matrix Σ |i⟩⟨j| ⊗ Φ(|i⟩⟨j|) / 2 from the folded map
        let mut choi = CMat::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                let col = folded.column(i * 2 + j);
                for a in 0..2 {
                    for bb in 0..2 {
                        choi[(i * 2 + a, j * 2 + bb)] = col[a * 2 + bb] * 0.5;
                    }
                }
            }
        }
        hermitian_eigenvalues(&choi)[0]
    }

    pub fn apply(&self, v: &Vector4<f64>) -> Vector4<f64> {
        self.m * v
    }

    pub fn pow(&self, n: usize) -> Self {
        PauliChannelMatrix { m: self.m.pow(n as u32) }
    }
}

fn checked_channels(u: &CMat) -> Result<(PauliChannelMatrix, PauliChannelMatrix)> {
    let check = check_dual_unitarity(u)?;
    let worst = check.time_residual.max(check.space_residual);
    if worst > DUALITY_TOL {
        return Err(domain(format!("gate is not dual unitary (residual {worst:.3e})")));
    }
    let (plus, minus) = folded_channels(u);
    Ok((PauliChannelMatrix::from_folded(&plus)?, PauliChannelMatrix::from_folded(&minus)?))
}

pub fn m_plus(u: &CMat) -> Result<PauliChannelMatrix> {
    Ok(checked_channels(u)?.0)
}

pub fn m_minus(u: &CMat) -> Result<PauliChannelMatrix> {
    Ok(checked_channels(u)?.1)
}

/// Pauli coefficients `(0, a_x, a_y, a_z)` of a traceless Hermitian unitary
/// `V = a·σ`, which requires `|a| = 1`.
pub fn pauli_vector(coeffs: [f64; 3]) -> Result<Vector4<f64>> {
    let norm2: f64 = coeffs.iter().map(|a| a * a).sum();
    if (norm2 - 1.0).abs() > 1e-10 {
        return Err(domain(format!("Pauli coefficients have squared norm {norm2}, expected 1")));
    }
    Ok(Vector4::new(0.0, coeffs[0], coeffs[1], coeffs[2]))
}

/// `a_x σx + a_y σy + a_z σz`.
pub fn pauli_operator(coeffs: [f64; 3]) -> CMat {
    (1..4).fold(CMat::zeros(2, 2), |acc, k| acc + pauli(k) * C64::new(coeffs[k - 1], 0.0))
}

/// Which side of the cut holds the right lightcone edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// `A` is the right part and contains the front of `V_t`.
    EdgeInA,
    /// `A` is the left part; the front lies in its complement.
    EdgeInComplement,
}

/// `⟨φ⁺|ν_A|φ⁺⟩ = ‖𝓜₊ⁿ v‖²` for a left region whose lightcone rectangle has
/// `n` columns.
pub fn du_edge_fidelity(mp: &PauliChannelMatrix, v: &Vector4<f64>, n: usize) -> f64 {
    mp.pow(n).apply(v).norm_squared()
}

/// `⟨V|𝓜₊ⁿ 𝓜₋ⁿ|V⟩`, the two-channel form of the same quantity. It differs
/// from [`du_edge_fidelity`] for generic gates and is kept for comparison only.
pub fn du_two_channel_expression(mp: &PauliChannelMatrix, mm: &PauliChannelMatrix, v: &Vector4<f64>, n: usize) -> f64 {
    v.dot(&(mp.pow(n).m * mm.pow(n).m * v))
}

fn g_from_fid(f: f64, d_a: usize) -> Result<f64> {
    if d_a < 2 {
        return Err(domain("G needs d_A >= 2"));
    }
    let da2 = (d_a * d_a) as f64;
    Ok((da2 * f - 1.0) / (da2 - 1.0))
}

/// Exact averaged OTOC of a dual-unitary brickwork. `n` is the number of
/// lightcone columns in `A`, `⌈x₊⌉`.
pub fn g_dual_unitary(u: &CMat, coeffs: [f64; 3], n: usize, d_a: usize, branch: Branch) -> Result<f64> {
    let v = pauli_vector(coeffs)?;
    let mp = m_plus(u)?;
    match branch {
        Branch::EdgeInA => g_from_fid(0.0, d_a),
        Branch::EdgeInComplement => g_from_fid(du_edge_fidelity(&mp, &v, n), d_a),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XxzClosedForm {
    pub g: f64,
    /// `|sin 2J| = 1`: the SWAP point, where `G` does not decay.
    pub degenerate: bool,
}

/// `G = (d_A²((a_x² + a_y²) sin(2J)^{2n} + a_z²) − 1)/(d_A² − 1)` with `n`
/// the number of lightcone columns in `A`.
pub fn g_xxz_closed_form(j: f64, coeffs: [f64; 3], n: usize, d_a: usize) -> Result<XxzClosedForm> {
    pauli_vector(coeffs)?;
    let s = (2.0 * j).sin();
    let transverse = coeffs[0] * coeffs[0] + coeffs[1] * coeffs[1];
    let f = transverse * s.powi(2 * n as i32) + coeffs[2] * coeffs[2];
    Ok(XxzClosedForm { g: g_from_fid(f, d_a)?, degenerate: (s.abs() - 1.0).abs() < 1e-12 })
}

/// `β e^{−αx} + 1 − β` with `α = ln(1/|sin 2J|)` and
/// `β = d_A²(a_x² + a_y²)/(d_A² − 1)`. Agrees with [`g_xxz_closed_form`]
/// only at `x = 2n`.
pub fn g_xxz_exponential_form(j: f64, coeffs: [f64; 3], x: f64, d_a: usize) -> Result<f64> {
    pauli_vector(coeffs)?;
    if d_a < 2 {
        return Err(domain("G needs d_A >= 2"));
    }
    let da2 = (d_a * d_a) as f64;
    let beta = da2 * (coeffs[0] * coeffs[0] + coeffs[1] * coeffs[1]) / (da2 - 1.0);
    let alpha = -(2.0 * j).sin().abs().ln();
    Ok(beta * (-alpha * x).exp() + 1.0 - beta)
}

#[cfg(test)]
mod tests {
    use super::super::{make_du_gate, xxz_gate, Dressings};
    use super::*;
    use crate::random::SeededSource;
    use crate::tensor::{kron, max_abs};
    use approx::assert_abs_diff_eq;

    #[test]
    fn folded_heisenberg_matches_conjugation() {
        let mut rng = SeededSource::new(5).rng();
        let u = crate::random::haar_unitary(4, &mut rng).unwrap();
        let s = folded_heisenberg(&u);
        let x = kron(&pauli(1), &pauli(2));
        let y = u.adjoint() * &x * &u;
        let fold2 = |m: &CMat| {
            CVec::from_fn(16, |k, _| {
                let (p1, p2) = (k / 4, k % 4);
                m[((p1 / 2) * 2 + p2 / 2, (p1 % 2) * 2 + p2 % 2)]
            })
        };
        let got = &s * fold2(&x);
        assert!((got - fold2(&y)).camax() < 1e-12);
    }

    #[test]
    fn xxz_channels_are_diagonal() {
        for j in [0.0, 0.3, 0.7] {
            let u = xxz_gate(j);
            let s = (2.0 * j).sin();
            let expect = Matrix4::from_diagonal(&Vector4::new(1.0, s, s, 1.0));
            assert!((m_plus(&u).unwrap().m - expect).amax() < 1e-12);
            assert!((m_minus(&u).unwrap().m - expect).amax() < 1e-12);
        }
    }

    #[test]
    fn random_du_channels_are_unital_cptp() {
        let mut rng = SeededSource::new(8).rng();
        for _ in 0..5 {
            let g = make_du_gate(0.4, Dressings::random(&mut rng)).unwrap();
            for ch in [m_plus(&g.u).unwrap(), m_minus(&g.u).unwrap()] {
                assert!(ch.unitality_residual() < 1e-12);
                assert!(ch.spectral_radius() < 1.0 + 1e-10);
                assert!(ch.choi_min_eigenvalue() > -1e-10);
            }
        }
    }

    #[test]
    fn non_dual_unitary_gate_is_refused() {
        let mut rng = SeededSource::new(9).rng();
        let u = crate::random::haar_unitary(4, &mut rng).unwrap();
        assert!(matches!(m_plus(&u), Err(crate::Error::Domain(_))));
    }

    #[test]
    fn swap_edge_values() {
        let sw = crate::tensor::swap_gate(2);
        assert_abs_diff_eq!(
            g_dual_unitary(&sw, [1.0, 0.0, 0.0], 3, 4, Branch::EdgeInA).unwrap(),
            -1.0 / 15.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            g_dual_unitary(&sw, [0.0, 0.6, 0.8], 3, 4, Branch::EdgeInComplement).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        assert!(g_dual_unitary(&sw, [1.0, 1.0, 0.0], 1, 4, Branch::EdgeInA).is_err());
    }

    #[test]
    fn xxz_forms() {
        let c = g_xxz_closed_form(std::f64::consts::PI / 8.0, [1.0, 0.0, 0.0], 2, 2).unwrap();
        assert_abs_diff_eq!(c.g, 0.0, epsilon = 1e-14);
        assert!(!c.degenerate);
        let z = g_xxz_closed_form(0.3, [0.0, 0.0, 1.0], 7, 8).unwrap();
        assert_abs_diff_eq!(z.g, 1.0, epsilon = 1e-14);
        assert!(g_xxz_closed_form(std::f64::consts::FRAC_PI_4, [1.0, 0.0, 0.0], 2, 4).unwrap().degenerate);
        let e = g_xxz_exponential_form(0.3, [1.0, 0.0, 0.0], 4.0, 4).unwrap();
        let c = g_xxz_closed_form(0.3, [1.0, 0.0, 0.0], 2, 4).unwrap();
        assert_abs_diff_eq!(e, c.g, epsilon = 1e-14);
    }

    #[test]
    fn pauli_operator_round_trip() {
        let v = pauli_operator([0.6, 0.0, 0.8]);
        let f = fold_operator(&v) * C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let b = pauli_basis();
        let coeffs = b.adjoint() * f;
        assert_abs_diff_eq!(coeffs[1].re, 0.6, epsilon = 1e-14);
        assert_abs_diff_eq!(coeffs[3].re, 0.8, epsilon = 1e-14);
        assert!(max_abs(&(v.adjoint() * &v - CMat::identity(2, 2))) < 1e-14);
    }
}
