//! Dense complex linear algebra on labelled multi-site objects.
//!
//! Multi-indices are big-endian: the first leg is the most significant digit.
//! Matrices are `nalgebra` dense matrices of `Complex64`.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{domain, structural, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Absolute tolerance used when a caller does not pass one.
pub const DEFAULT_TOL: f64 = 1e-10;

/// A chain position, stored as twice its half-integer label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Site(pub i32);

impl Site {
    pub fn from_halves(halves: i32) -> Self {
        Site(halves)
    }

    pub fn halves(self) -> i32 {
        self.0
    }

    pub fn label(self) -> f64 {
        f64::from(self.0) / 2.0
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Sites `lo..=hi` given in halves.
pub fn site_range(lo: i32, hi: i32) -> Vec<Site> {
    (lo..=hi).map(Site).collect()
}

/// Pauli matrix `k` in the order (1, X, Y, Z).
pub fn pauli(k: usize) -> CMat {
    let z = ZERO;
    let o = ONE;
    match k {
        0 => CMat::from_row_slice(2, 2, &[o, z, z, o]),
        1 => CMat::from_row_slice(2, 2, &[z, o, o, z]),
        2 => CMat::from_row_slice(2, 2, &[z, -I, I, z]),
        3 => CMat::from_row_slice(2, 2, &[o, z, z, -o]),
        _ => panic!("pauli index {k} out of range"),
    }
}

pub fn swap_gate(d: usize) -> CMat {
    let n = d * d;
    CMat::from_fn(n, n, |r, c| {
        let (a, b) = (c / d, c % d);
        if r == b * d + a {
            ONE
        } else {
            ZERO
        }
    })
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// `max |U†U − 1|` over entries.
pub fn unitarity_residual(u: &CMat) -> f64 {
    if u.nrows() != u.ncols() {
        return f64::INFINITY;
    }
    let mut p = u.adjoint() * u;
    for k in 0..p.nrows() {
        p[(k, k)] -= ONE;
    }
    max_abs(&p)
}

pub fn hermiticity_residual(h: &CMat) -> f64 {
    if h.nrows() != h.ncols() {
        return f64::INFINITY;
    }
    max_abs(&(h - h.adjoint()))
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Reorders tensor legs: output leg `k` is input leg `perm[k]`.
pub fn permute_legs(data: &[C64], dims: &[usize], perm: &[usize]) -> Vec<C64> {
    let n = dims.len();
    assert_eq!(perm.len(), n, "permutation length mismatch");
    assert_eq!(data.len(), dims.iter().product::<usize>(), "data length mismatch");
    let in_strides = strides(dims);
    let out_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let step: Vec<usize> = perm.iter().map(|&p| in_strides[p]).collect();
    let mut out = Vec::with_capacity(data.len());
    let mut counter = vec![0usize; n];
    let mut src = 0usize;
    for _ in 0..data.len() {
        out.push(data[src]);
        // odometer increment from the last output leg
        for k in (0..n).rev() {
            counter[k] += 1;
            src += step[k];
            if counter[k] < out_dims[k] {
                break;
            }
            src -= step[k] * out_dims[k];
            counter[k] = 0;
        }
    }
    out
}

fn check_subset(keep: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    for &k in keep {
        if k >= n || seen[k] {
            return Err(structural(format!("leg {k} is not a distinct leg of a {n}-leg object")));
        }
        seen[k] = true;
    }
    Ok(())
}

fn complement(keep: &[usize], n: usize) -> Vec<usize> {
    (0..n).filter(|k| !keep.contains(k)).collect()
}

/// Partial trace of an operator on legs `dims`, keeping `keep` (in the given order).
pub fn partial_trace(rho: &CMat, dims: &[usize], keep: &[usize]) -> Result<CMat> {
    let total: usize = dims.iter().product();
    if rho.nrows() != total || rho.ncols() != total {
        return Err(structural(format!(
            "operator is {}x{}, legs multiply to {total}",
            rho.nrows(),
            rho.ncols()
        )));
    }
    check_subset(keep, dims.len())?;
    let traced = complement(keep, dims.len());
    let st = strides(dims);
    let dk: usize = keep.iter().map(|&k| dims[k]).product();
    let dt: usize = traced.iter().map(|&k| dims[k]).product();
    let offsets = |legs: &[usize], count: usize| -> Vec<usize> {
        let mut offs = vec![0usize; count];
        let mut counter = vec![0usize; legs.len()];
        for off in offs.iter_mut() {
            *off = legs.iter().zip(&counter).map(|(&l, &c)| c * st[l]).sum();
            for j in (0..legs.len()).rev() {
                counter[j] += 1;
                if counter[j] < dims[legs[j]] {
                    break;
                }
                counter[j] = 0;
            }
        }
        offs
    };
    let ko = offsets(keep, dk);
    let to = offsets(&traced, dt);
    Ok(CMat::from_fn(dk, dk, |r, c| {
        to.iter().map(|&t| rho[(ko[r] + t, ko[c] + t)]).sum()
    }))
}

/// Reshapes a vector into a matrix whose rows index the legs `left` and
/// whose columns index the remaining legs, both in ascending leg order.
pub fn bipartite_matrix(v: &[C64], dims: &[usize], left: &[usize]) -> Result<CMat> {
    check_subset(left, dims.len())?;
    if v.len() != dims.iter().product::<usize>() {
        return Err(structural("vector length does not match leg dimensions"));
    }
    let right = complement(left, dims.len());
    let mut perm = left.to_vec();
    perm.extend_from_slice(&right);
    let rows: usize = left.iter().map(|&k| dims[k]).product();
    let cols: usize = right.iter().map(|&k| dims[k]).product();
    let data = permute_legs(v, dims, &perm);
    Ok(CMat::from_row_slice(rows, cols, &data))
}

/// Eigenvalues of `M M†` in descending order, computed on the smaller side.
pub fn gram_spectrum(m: &CMat) -> Vec<f64> {
    let g = if m.nrows() <= m.ncols() {
        m * m.adjoint()
    } else {
        m.adjoint() * m
    };
    psd_spectrum(&g)
}

/// Spectrum of a positive semidefinite matrix, descending, negative
/// round-off clamped to zero.
pub fn psd_spectrum(h: &CMat) -> Vec<f64> {
    let mut ev: Vec<f64> = hermitian_eigenvalues(h).into_iter().map(|x| x.max(0.0)).collect();
    ev.reverse();
    ev
}

// Dense decompositions go through faer; nalgebra's Hermitian eigensolver and
// SVD return wrong or non-finite results on some exactly low-rank inputs
// that occur here (reduced Choi states of Clifford circuits).

fn to_faer(m: &CMat) -> faer::Mat<C64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Eigenvalues in ascending order and the matching orthonormal eigenvectors
/// (as columns) of a Hermitian matrix; only the lower triangle is read.
pub fn hermitian_eigen(h: &CMat) -> (Vec<f64>, CMat) {
    let n = h.nrows();
    let eig = to_faer(h).self_adjoint_eigen(faer::Side::Lower).expect("Hermitian eigensolver converges");
    let (u, s) = (eig.U(), eig.S());
    ((0..n).map(|k| s[k].re).collect(), CMat::from_fn(n, n, |i, j| u[(i, j)]))
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(h: &CMat) -> Vec<f64> {
    to_faer(h).self_adjoint_eigenvalues(faer::Side::Lower).expect("Hermitian eigensolver converges")
}

/// Singular values in descending order.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    to_faer(m).singular_values().expect("SVD converges")
}

/// Eigenvalues of a general square matrix, unordered.
pub fn eigenvalues(m: &CMat) -> Vec<C64> {
    to_faer(m).eigenvalues().expect("eigensolver converges")
}

/// `tr[(M M†)²]` evaluated on the smaller side.
pub fn gram_purity(m: &CMat) -> f64 {
    let g = if m.nrows() <= m.ncols() {
        m * m.adjoint()
    } else {
        m.adjoint() * m
    };
    g.iter().map(|z| z.norm_sqr()).sum()
}

/// Schmidt coefficients of `v` across `left : rest`, descending.
pub fn schmidt_values(v: &[C64], dims: &[usize], left: &[usize]) -> Result<Vec<f64>> {
    if left.is_empty() || left.len() == dims.len() {
        return Err(structural("a Schmidt cut needs legs on both sides"));
    }
    let m = bipartite_matrix(v, dims, left)?;
    Ok(gram_spectrum(&m).into_iter().map(f64::sqrt).collect())
}

/// `exp(−iθH)` for Hermitian `H`, through its eigendecomposition.
pub fn herm_expm(h: &CMat, theta: f64) -> Result<CMat> {
    let res = hermiticity_residual(h);
    if res > DEFAULT_TOL {
        return Err(domain(format!("generator is not Hermitian (residual {res:.3e})")));
    }
    let (vals, q) = hermitian_eigen(h);
    let phases = CVec::from_iterator(vals.len(), vals.iter().map(|&l| C64::from_polar(1.0, -theta * l)));
    Ok(&q * CMat::from_diagonal(&phases) * q.adjoint())
}

/// `m ← (1 ⊗ g ⊗ 1) m` with `g` on legs `k, k+1` of an `n`-leg row index.
pub fn apply_left_pair(m: &mut CMat, g: &CMat, d: usize, n: usize, k: usize) {
    assert!(k + 1 < n, "pair ({k}, {}) outside {n} legs", k + 1);
    let dd = d * d;
    let inner = d.pow((n - k - 2) as u32);
    let outer = d.pow(k as u32);
    let mut buf = vec![ZERO; dd];
    for col in 0..m.ncols() {
        for o in 0..outer {
            for i in 0..inner {
                let base = o * dd * inner + i;
                for (p, b) in buf.iter_mut().enumerate() {
                    *b = m[(base + p * inner, col)];
                }
                for r in 0..dd {
                    let mut acc = ZERO;
                    for (p, b) in buf.iter().enumerate() {
                        acc += g[(r, p)] * b;
                    }
                    m[(base + r * inner, col)] = acc;
                }
            }
        }
    }
}

/// `m ← m (1 ⊗ g ⊗ 1)` with `g` on legs `k, k+1` of an `n`-leg column index.
pub fn apply_right_pair(m: &mut CMat, g: &CMat, d: usize, n: usize, k: usize) {
    assert!(k + 1 < n, "pair ({k}, {}) outside {n} legs", k + 1);
    let dd = d * d;
    let inner = d.pow((n - k - 2) as u32);
    let outer = d.pow(k as u32);
    let mut buf = vec![ZERO; dd];
    for row in 0..m.nrows() {
        for o in 0..outer {
            for i in 0..inner {
                let base = o * dd * inner + i;
                for (p, b) in buf.iter_mut().enumerate() {
                    *b = m[(row, base + p * inner)];
                }
                for c in 0..dd {
                    let mut acc = ZERO;
                    for (p, b) in buf.iter().enumerate() {
                        acc += b * g[(p, c)];
                    }
                    m[(row, base + c * inner)] = acc;
                }
            }
        }
    }
}

fn check_sites(sites: &[Site]) -> Result<()> {
    if sites.windows(2).any(|w| w[0] >= w[1]) {
        return Err(structural("site labels must be strictly increasing"));
    }
    Ok(())
}

fn positions(of: &[Site], within: &[Site]) -> Result<Vec<usize>> {
    of.iter()
        .map(|s| {
            within
                .iter()
                .position(|w| w == s)
                .ok_or_else(|| structural(format!("site {s} is not present")))
        })
        .collect()
}

/// Complex matrix on an ordered list of sites of local dimension `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    sites: Vec<Site>,
    d: usize,
    data: CMat,
}

impl DenseOperator {
    pub fn new(sites: Vec<Site>, d: usize, data: CMat) -> Result<Self> {
        check_sites(&sites)?;
        let dim = d.pow(sites.len() as u32);
        if data.nrows() != dim || data.ncols() != dim {
            return Err(structural(format!(
                "{} sites of dimension {d} need a {dim}x{dim} matrix, got {}x{}",
                sites.len(),
                data.nrows(),
                data.ncols()
            )));
        }
        Ok(DenseOperator { sites, d, data })
    }

    pub fn identity(sites: Vec<Site>, d: usize) -> Result<Self> {
        let dim = d.pow(sites.len() as u32);
        Self::new(sites, d, CMat::identity(dim, dim))
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn local_dim(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn data(&self) -> &CMat {
        &self.data
    }

    pub fn into_data(self) -> CMat {
        self.data
    }

    pub fn adjoint(&self) -> Self {
        DenseOperator { sites: self.sites.clone(), d: self.d, data: self.data.adjoint() }
    }

    pub fn trace(&self) -> C64 {
        self.data.trace()
    }

    pub fn compose(&self, rhs: &DenseOperator) -> Result<Self> {
        if self.sites != rhs.sites || self.d != rhs.d {
            return Err(structural("operators act on different sites"));
        }
        Ok(DenseOperator { sites: self.sites.clone(), d: self.d, data: &self.data * &rhs.data })
    }

    pub fn unitarity_residual(&self) -> f64 {
        unitarity_residual(&self.data)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_residual() <= tol
    }

    /// Tensor product; the result is ordered by site label.
    pub fn kron(&self, rhs: &DenseOperator) -> Result<Self> {
        if self.d != rhs.d {
            return Err(structural("local dimensions differ"));
        }
        if self.sites.iter().any(|s| rhs.sites.contains(s)) {
            return Err(structural("kron of operators with overlapping sites"));
        }
        let mut sites = self.sites.clone();
        sites.extend_from_slice(&rhs.sites);
        let raw = kron(&self.data, &rhs.data);
        let mut order: Vec<usize> = (0..sites.len()).collect();
        order.sort_by_key(|&k| sites[k]);
        if order.iter().enumerate().all(|(a, &b)| a == b) {
            return Ok(DenseOperator { sites, d: self.d, data: raw });
        }
        let n = sites.len();
        let dims = vec![self.d; 2 * n];
        let mut perm: Vec<usize> = order.clone();
        perm.extend(order.iter().map(|&k| k + n));
        // row-major flattening of the (rows, cols) tensor
        let flat: Vec<C64> = (0..raw.nrows())
            .flat_map(|r| (0..raw.ncols()).map(move |c| (r, c)))
            .map(|(r, c)| raw[(r, c)])
            .collect();
        let permuted = permute_legs(&flat, &dims, &perm);
        let dim = raw.nrows();
        let sorted: Vec<Site> = order.iter().map(|&k| sites[k]).collect();
        Ok(DenseOperator { sites: sorted, d: self.d, data: CMat::from_row_slice(dim, dim, &permuted) })
    }

    /// Extends the operator by identities onto `sites`, which must contain its own.
    pub fn embed(&self, sites: &[Site]) -> Result<Self> {
        check_sites(sites)?;
        positions(&self.sites, sites)?;
        let extra: Vec<Site> = sites.iter().copied().filter(|s| !self.sites.contains(s)).collect();
        if extra.is_empty() {
            return Ok(self.clone());
        }
        self.kron(&DenseOperator::identity(extra, self.d)?)
    }

    pub fn partial_trace(&self, keep: &[Site]) -> Result<Self> {
        let legs = positions(keep, &self.sites)?;
        let mut sorted = legs.clone();
        sorted.sort_unstable();
        if sorted != legs {
            return Err(structural("kept sites must be listed in chain order"));
        }
        let dims = vec![self.d; self.sites.len()];
        let data = partial_trace(&self.data, &dims, &legs)?;
        Ok(DenseOperator { sites: keep.to_vec(), d: self.d, data })
    }
}

/// Vector on an ordered list of sites. A doubled site carries one leg of
/// dimension `d²` (unprimed digit first).
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    sites: Vec<Site>,
    leg_dim: usize,
    data: CVec,
}

impl StateVector {
    pub fn new(sites: Vec<Site>, leg_dim: usize, data: CVec) -> Result<Self> {
        check_sites(&sites)?;
        let dim = leg_dim.pow(sites.len() as u32);
        if data.len() != dim {
            return Err(structural(format!("expected {dim} amplitudes, got {}", data.len())));
        }
        Ok(StateVector { sites, leg_dim, data })
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn leg_dim(&self) -> usize {
        self.leg_dim
    }

    pub fn data(&self) -> &CVec {
        &self.data
    }

    pub fn norm(&self) -> f64 {
        self.data.norm()
    }

    fn leg_dims(&self) -> Vec<usize> {
        vec![self.leg_dim; self.sites.len()]
    }

    /// Matrix with rows on `left` sites and columns on the rest.
    pub fn bipartite(&self, left: &[Site]) -> Result<CMat> {
        let legs = positions(left, &self.sites)?;
        let mut sorted = legs.clone();
        sorted.sort_unstable();
        bipartite_matrix(self.data.as_slice(), &self.leg_dims(), &sorted)
    }

    pub fn schmidt_values(&self, left: &[Site]) -> Result<Vec<f64>> {
        let mut legs = positions(left, &self.sites)?;
        legs.sort_unstable();
        schmidt_values(self.data.as_slice(), &self.leg_dims(), &legs)
    }

    /// Reduced density operator on `keep`.
    pub fn reduced(&self, keep: &[Site]) -> Result<DenseOperator> {
        let m = self.bipartite(keep)?;
        let mut sites = keep.to_vec();
        sites.sort();
        DenseOperator::new(sites, self.leg_dim, &m * m.adjoint())
    }
}

#[cfg(test)]
mod tests {
    #[test]
    fn decompositions_handle_rank_one_projectors() {
        // |φ⁺⟩⟨φ⁺| padded with exact zeros, the shape that defeats nalgebra
        let n = 64;
        let v = CVec::from_fn(n, |k, _| if k % 9 == 0 && k < 64 { C64::new(0.5, 0.0) } else { ZERO });
        let p = &v * v.adjoint();
        let (vals, q) = hermitian_eigen(&p);
        let rebuilt = &q * CMat::from_diagonal(&CVec::from_iterator(n, vals.iter().map(|&x| C64::new(x, 0.0)))) * q.adjoint();
        assert!(max_abs(&(rebuilt - &p)) < 1e-12);
        let spec = psd_spectrum(&p);
        assert!((spec[0] - v.norm_squared()).abs() < 1e-12 && spec[1].abs() < 1e-12);
        assert!((singular_values(&p)[0] - v.norm_squared()).abs() < 1e-12);
    }

    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn kron_of_x_and_z() {
        let k = kron(&pauli(1), &pauli(3));
        let mut expect = CMat::zeros(4, 4);
        expect[(0, 2)] = c(1.0);
        expect[(1, 3)] = c(-1.0);
        expect[(2, 0)] = c(1.0);
        expect[(3, 1)] = c(-1.0);
        assert_eq!(k, expect);
    }

    #[test]
    fn reversed_kron_is_reordered() {
        let x = DenseOperator::new(vec![Site(2)], 2, pauli(1)).unwrap();
        let z = DenseOperator::new(vec![Site(0)], 2, pauli(3)).unwrap();
        let xz = x.kron(&z).unwrap();
        assert_eq!(xz.sites(), &[Site(0), Site(2)]);
        assert_eq!(xz.data(), &kron(&pauli(3), &pauli(1)));
    }

    #[test]
    fn overlapping_kron_is_rejected() {
        let x = DenseOperator::new(vec![Site(0)], 2, pauli(1)).unwrap();
        assert!(matches!(x.kron(&x), Err(crate::Error::Structural(_))));
    }

    #[test]
    fn permute_legs_transposes() {
        let data: Vec<C64> = (0..6).map(|k| c(k as f64)).collect();
        let t = permute_legs(&data, &[2, 3], &[1, 0]);
        let expect: Vec<C64> = [0.0, 3.0, 1.0, 4.0, 2.0, 5.0].iter().map(|&x| c(x)).collect();
        assert_eq!(t, expect);
    }

    #[test]
    fn phi_plus_reduces_to_half_identity() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = [c(s), ZERO, ZERO, c(s)];
        let rho = CMat::from_fn(4, 4, |r, k| v[r] * v[k].conj());
        let red = partial_trace(&rho, &[2, 2], &[0]).unwrap();
        assert_abs_diff_eq!(max_abs(&(red - CMat::identity(2, 2) * c(0.5))), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn product_state_reduces_to_factor() {
        let mut rho = CMat::zeros(4, 4);
        rho[(1, 1)] = ONE; // |0><0| ⊗ |1><1|
        let red = partial_trace(&rho, &[2, 2], &[0]).unwrap();
        let mut expect = CMat::zeros(2, 2);
        expect[(0, 0)] = ONE;
        assert_eq!(red, expect);
    }

    #[test]
    fn keep_outside_legs_is_structural() {
        let rho = CMat::identity(4, 4);
        assert!(partial_trace(&rho, &[2, 2], &[2]).is_err());
    }

    #[test]
    fn schmidt_of_phi_plus_pair() {
        // two Bell pairs across the cut: d_A = 4, four equal values 1/2
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = CVec::from_vec(vec![c(s), ZERO, ZERO, c(s)]);
        let v = kron(
            &CMat::from_column_slice(4, 1, bell.as_slice()),
            &CMat::from_column_slice(4, 1, bell.as_slice()),
        );
        // legs (p1 q1 p2 q2) with Bell pairs (p1 q1), (p2 q2); the cut separates every pair
        let sv = schmidt_values(v.as_slice(), &[2, 2, 2, 2], &[0, 2]).unwrap();
        assert_eq!(sv.len(), 4);
        for x in sv {
            assert_abs_diff_eq!(x, 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn product_state_has_one_schmidt_value() {
        let v = [ONE, ZERO, ZERO, ZERO];
        let sv = schmidt_values(&v, &[2, 2], &[0]).unwrap();
        assert_abs_diff_eq!(sv[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(sv[1], 0.0, epsilon = 1e-14);
        assert!(schmidt_values(&v, &[2, 2], &[]).is_err());
    }

    #[test]
    fn expm_of_zero_and_swap_generator() {
        let id = herm_expm(&CMat::zeros(4, 4), 1.0).unwrap();
        assert_abs_diff_eq!(max_abs(&(id - CMat::identity(4, 4))), 0.0, epsilon = 1e-15);

        let h = (kron(&pauli(1), &pauli(1)) + kron(&pauli(2), &pauli(2)) + kron(&pauli(3), &pauli(3)))
            * c(std::f64::consts::FRAC_PI_4);
        let u = herm_expm(&h, 1.0).unwrap();
        let sw = swap_gate(2);
        let phase = u[(0, 0)] / sw[(0, 0)];
        assert_abs_diff_eq!(phase.norm(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(max_abs(&(u - sw * phase)), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn expm_rejects_non_hermitian() {
        let mut h = CMat::zeros(2, 2);
        h[(0, 1)] = ONE;
        assert!(matches!(herm_expm(&h, 1.0), Err(crate::Error::Domain(_))));
    }

    #[test]
    fn pair_application_matches_kron() {
        let g = CMat::from_fn(4, 4, |r, k| C64::new((r * 4 + k) as f64, (r as f64) - (k as f64)));
        let m0 = CMat::from_fn(8, 8, |r, k| C64::new((r + 2 * k) as f64 * 0.1, (r * k) as f64 * 0.01));
        for k in 0..2 {
            let full = if k == 0 {
                kron(&g, &CMat::identity(2, 2))
            } else {
                kron(&CMat::identity(2, 2), &g)
            };
            let mut left = m0.clone();
            apply_left_pair(&mut left, &g, 2, 3, k);
            assert_abs_diff_eq!(max_abs(&(left - &full * &m0)), 0.0, epsilon = 1e-10);
            let mut right = m0.clone();
            apply_right_pair(&mut right, &g, 2, 3, k);
            assert_abs_diff_eq!(max_abs(&(right - &m0 * &full)), 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn site_display_uses_halves() {
        assert_eq!(Site(1).to_string(), "1/2");
        assert_eq!(Site(-3).to_string(), "-3/2");
        assert_eq!(Site(4).to_string(), "2");
    }
}
