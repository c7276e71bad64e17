//! Brickwork circuits on a chain, Heisenberg evolution inside the lightcone,
//! and Choi states of the evolved operator.
//!
//! Sites are consecutive integers in units of half a lattice spacing, so
//! `Site(j)` carries the label `j/2`. The operator starts on `origin`. Half
//! step `k = 1, 2, …` conjugates by the gates on bonds `(j, j+1)` with
//! `j − origin ≡ k − 1 (mod 2)`; after `s ≥ 1` half steps the lightcone is
//! `[origin − (s−1), origin + s]`.

use std::collections::HashMap;

use crate::error::{domain, resource, structural, Result};
use crate::random::{haar_unitary, SeededSource};
use crate::tensor::{
    apply_left_pair, apply_right_pair, gram_purity, gram_spectrum, kron, permute_legs, site_range,
    swap_gate, unitarity_residual, CMat, CVec, DenseOperator, Site, StateVector, C64, DEFAULT_TOL,
    ONE, ZERO,
};

/// Largest lightcone window evolved densely (a 4096 × 4096 operator).
pub const MAX_DENSE_SITES: usize = 12;

/// Largest region for which a reduced Choi state is materialised as a matrix.
pub const MAX_REDUCED_SITES: usize = 6;

#[derive(Debug, Clone)]
enum Gates {
    Homogeneous(CMat),
    /// Keyed by (half step, left site of the bond).
    PerBond(HashMap<(usize, i32), CMat>),
}

/// Layered two-site gates on the chain `lo..=hi`.
#[derive(Debug, Clone)]
pub struct BrickworkCircuit {
    lo: i32,
    hi: i32,
    layers: usize,
    origin: i32,
    d: usize,
    gates: Gates,
}

/// Chain of `length` sites placed so that `[−(s−1), s]` fits when `length = 2s`.
pub fn chain_bounds(length: usize) -> (i32, i32) {
    let hi = length.div_ceil(2) as i32;
    (hi - length as i32 + 1, hi)
}

fn bond_sites(lo: i32, hi: i32, origin: i32, step: usize) -> Vec<i32> {
    let parity = ((step + 1) % 2) as i32;
    (lo..hi).filter(|j| (j - origin).rem_euclid(2) == parity).collect()
}

fn check_gate(g: &CMat) -> Result<usize> {
    let n = g.nrows();
    let d = (n as f64).sqrt().round() as usize;
    if g.ncols() != n || d * d != n || d < 2 {
        return Err(structural(format!("a two-site gate must be d²×d², got {}x{}", n, g.ncols())));
    }
    let res = unitarity_residual(g);
    if res > DEFAULT_TOL {
        return Err(domain(format!("gate is not unitary (residual {res:.3e})")));
    }
    Ok(d)
}

impl BrickworkCircuit {
    /// Every bond carries `gate`.
    pub fn homogeneous(gate: CMat, length: usize, layers: usize) -> Result<Self> {
        if length < 2 {
            return Err(domain("a brickwork chain needs at least two sites"));
        }
        let d = check_gate(&gate)?;
        let (lo, hi) = chain_bounds(length);
        Ok(BrickworkCircuit { lo, hi, layers, origin: 0, d, gates: Gates::Homogeneous(gate) })
    }

    pub fn swap(length: usize, layers: usize) -> Result<Self> {
        Self::homogeneous(swap_gate(2), length, layers)
    }

    /// Haar bricks. A homogeneous circuit repeats one sample; otherwise the
    /// brick on `(step, j)` is drawn from its own forked stream.
    pub fn haar(length: usize, layers: usize, src: SeededSource, homogeneous: bool) -> Result<Self> {
        if length < 2 {
            return Err(domain("a brickwork chain needs at least two sites"));
        }
        if homogeneous {
            let gate = haar_unitary(4, &mut src.rng())?;
            return Self::homogeneous(gate, length, layers);
        }
        let (lo, hi) = chain_bounds(length);
        let mut map = HashMap::new();
        for step in 1..=layers {
            for j in lo..hi {
                let key = ((step as u64) << 32) ^ u64::from(j as u32);
                let gate = haar_unitary(4, &mut src.fork(key).rng())?;
                map.insert((step, j), gate);
            }
        }
        Ok(BrickworkCircuit { lo, hi, layers, origin: 0, d: 2, gates: Gates::PerBond(map) })
    }

    pub fn with_origin(mut self, origin: i32) -> Result<Self> {
        if origin < self.lo || origin > self.hi {
            return Err(domain(format!("origin {origin} lies outside the chain")));
        }
        self.origin = origin;
        Ok(self)
    }

    pub fn local_dim(&self) -> usize {
        self.d
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn origin(&self) -> Site {
        Site(self.origin)
    }

    pub fn chain(&self) -> (Site, Site) {
        (Site(self.lo), Site(self.hi))
    }

    /// The homogeneous brick, if there is one.
    pub fn brick(&self) -> Option<&CMat> {
        match &self.gates {
            Gates::Homogeneous(g) => Some(g),
            Gates::PerBond(_) => None,
        }
    }

    pub fn gate(&self, step: usize, j: i32) -> &CMat {
        match &self.gates {
            Gates::Homogeneous(g) => g,
            Gates::PerBond(map) => &map[&(step, j)],
        }
    }

    /// Left sites of the bonds active at half step `step` (1-based).
    pub fn bonds(&self, step: usize) -> Vec<i32> {
        bond_sites(self.lo, self.hi, self.origin, step)
    }

    /// Lightcone window after `steps` half steps, clipped to the chain.
    pub fn lightcone(&self, steps: usize) -> (i32, i32) {
        if steps == 0 {
            return (self.origin, self.origin);
        }
        let s = steps as i32;
        ((self.origin - (s - 1)).max(self.lo), (self.origin + s).min(self.hi))
    }
}

/// `V_t` restricted to its lightcone window.
#[derive(Debug, Clone)]
pub struct HeisenbergOperator {
    pub op: DenseOperator,
    pub steps: usize,
    pub origin: Site,
}

impl HeisenbergOperator {
    pub fn window(&self) -> (Site, Site) {
        let s = self.op.sites();
        (s[0], s[s.len() - 1])
    }
}

fn check_probe(v: &CMat, d: usize) -> Result<()> {
    if v.nrows() != d || v.ncols() != d {
        return Err(structural(format!("initial operator must be {d}x{d}")));
    }
    let res = unitarity_residual(v);
    if res > DEFAULT_TOL {
        return Err(domain(format!("initial operator is not unitary (residual {res:.3e})")));
    }
    let tr = v.trace().norm();
    if tr > DEFAULT_TOL {
        return Err(domain(format!(
            "initial operator has |tr V| = {tr:.3e}; subtract tr(V)/d times the identity \
             (only the traceless part enters the averaged OTOC) and pass that instead"
        )));
    }
    Ok(())
}

fn widen(op: CMat, d: usize, left: usize, right: usize) -> CMat {
    let mut out = op;
    if left > 0 {
        let n = d.pow(left as u32);
        out = kron(&CMat::identity(n, n), &out);
    }
    if right > 0 {
        let n = d.pow(right as u32);
        out = kron(&out, &CMat::identity(n, n));
    }
    out
}

fn conjugate_pair(op: &mut CMat, g: &CMat, d: usize, n: usize, k: usize) {
    apply_left_pair(op, &g.adjoint(), d, n, k);
    apply_right_pair(op, g, d, n, k);
}

/// Heisenberg evolution `V_t = U_t† V U_t` applying only gates inside the lightcone.
pub fn evolve_heisenberg(circuit: &BrickworkCircuit, v: &CMat, steps: usize) -> Result<HeisenbergOperator> {
    let d = circuit.d;
    check_probe(v, d)?;
    if steps > circuit.layers {
        return Err(domain(format!("{steps} half steps requested, circuit has {}", circuit.layers)));
    }
    let (wlo, whi) = circuit.lightcone(steps);
    let width = (whi - wlo + 1) as usize;
    if width > MAX_DENSE_SITES {
        return Err(resource(format!("lightcone of {width} sites exceeds the dense cap of {MAX_DENSE_SITES}")));
    }
    let (mut lo, mut hi) = (circuit.origin, circuit.origin);
    let mut op = v.clone();
    for step in 1..=steps {
        let (nlo, nhi) = circuit.lightcone(step);
        op = widen(op, d, (lo - nlo) as usize, (nhi - hi) as usize);
        lo = nlo;
        hi = nhi;
        let n = (hi - lo + 1) as usize;
        for j in circuit.bonds(step) {
            if j >= lo && j < hi {
                conjugate_pair(&mut op, circuit.gate(step, j), d, n, (j - lo) as usize);
            }
        }
    }
    Ok(HeisenbergOperator { op: DenseOperator::new(site_range(lo, hi), d, op)?, steps, origin: circuit.origin() })
}

/// Evolution on the whole chain with every gate applied; the untruncated reference.
pub fn evolve_full_chain(circuit: &BrickworkCircuit, v: &CMat, steps: usize) -> Result<HeisenbergOperator> {
    let d = circuit.d;
    check_probe(v, d)?;
    let (lo, hi) = (circuit.lo, circuit.hi);
    let n = (hi - lo + 1) as usize;
    if n > MAX_DENSE_SITES {
        return Err(resource(format!("chain of {n} sites exceeds the dense cap of {MAX_DENSE_SITES}")));
    }
    let mut op = widen(v.clone(), d, (circuit.origin - lo) as usize, (hi - circuit.origin) as usize);
    for step in 1..=steps.min(circuit.layers) {
        for j in circuit.bonds(step) {
            conjugate_pair(&mut op, circuit.gate(step, j), d, n, (j - lo) as usize);
        }
    }
    Ok(HeisenbergOperator { op: DenseOperator::new(site_range(lo, hi), d, op)?, steps, origin: circuit.origin() })
}

/// Normalised `(V ⊗ 1)|φ⁺⟩` with each site's unprimed and primed digit fused
/// into one leg of dimension `d²`.
#[derive(Debug, Clone)]
pub struct ChoiState {
    pub state: StateVector,
    pub steps: usize,
    pub origin: Site,
}

/// Per-site `Σ_a |a a⟩/√d`, tensored over `n` sites.
pub fn phi_plus(d: usize, n: usize) -> CVec {
    let dd = d * d;
    let amp = 1.0 / (d as f64).sqrt();
    let mut v = CVec::from_element(1, ONE);
    let site = CVec::from_fn(dd, |k, _| if k / d == k % d { C64::new(amp, 0.0) } else { ZERO });
    for _ in 0..n {
        v = v.kronecker(&site);
    }
    v
}

/// Choi vector of an operator given as a matrix on `n` legs of dimension `d`.
pub fn choi_vector(op: &CMat, d: usize, n: usize) -> CVec {
    let dim = op.nrows();
    let flat: Vec<C64> = (0..dim).flat_map(|r| (0..dim).map(move |c| (r, c))).map(|rc| op[rc]).collect();
    let perm: Vec<usize> = (0..n).flat_map(|k| [k, n + k]).collect();
    let data = permute_legs(&flat, &vec![d; 2 * n], &perm);
    let scale = 1.0 / (dim as f64).sqrt();
    CVec::from_iterator(data.len(), data.into_iter().map(|z| z * scale))
}

/// Inverse of [`choi_vector`], without the normalisation.
pub fn unfold_choi(v: &[C64], d: usize, n: usize) -> CMat {
    let perm: Vec<usize> = (0..n).map(|k| 2 * k).chain((0..n).map(|k| 2 * k + 1)).collect();
    let data = permute_legs(v, &vec![d; 2 * n], &perm);
    let dim = d.pow(n as u32);
    CMat::from_row_slice(dim, dim, &data) * C64::new((dim as f64).sqrt(), 0.0)
}

pub fn choi_state(vt: &HeisenbergOperator) -> Result<ChoiState> {
    let res = vt.op.unitarity_residual();
    if res > 1e-8 {
        return Err(domain(format!("Choi state needs a unitary operator (residual {res:.3e})")));
    }
    let d = vt.op.local_dim();
    let n = vt.op.sites().len();
    let data = choi_vector(vt.op.data(), d, n);
    Ok(ChoiState { state: StateVector::new(vt.op.sites().to_vec(), d * d, data)?, steps: vt.steps, origin: vt.origin })
}

impl ChoiState {
    pub fn window(&self) -> (Site, Site) {
        let s = self.state.sites();
        (s[0], s[s.len() - 1])
    }

    pub fn local_dim(&self) -> usize {
        (self.state.leg_dim() as f64).sqrt().round() as usize
    }

    /// The operator this state encodes.
    pub fn operator(&self) -> CMat {
        unfold_choi(self.state.data().as_slice(), self.local_dim(), self.state.sites().len())
    }
}

/// Reduced Choi state on a contiguous region `A`.
///
/// Stored as a factor `M` with `ν_{A∩window} = M M†`; sites of `A` outside the
/// window each add a `|φ⁺⟩⟨φ⁺|` factor, which changes neither the spectrum
/// nor `⟨φ⁺|ν_A|φ⁺⟩`.
#[derive(Debug, Clone)]
pub struct ReducedChoi {
    pub region: Vec<Site>,
    pub inner: Vec<Site>,
    pub factor: CMat,
    d: usize,
}

/// `ν_A = tr_Ā |V_t⟩⟨V_t|` for the region `a_lo..=a_hi`.
///
/// The region must be disjoint from the lightcone window or contain at least
/// one of its edges; regions strictly inside the window are rejected.
pub fn reduced_choi(c: &ChoiState, a_lo: Site, a_hi: Site) -> Result<ReducedChoi> {
    if a_lo > a_hi {
        return Err(structural("empty region"));
    }
    let (wlo, whi) = c.window();
    let region = site_range(a_lo.0, a_hi.0);
    let inner: Vec<Site> = region.iter().copied().filter(|s| *s >= wlo && *s <= whi).collect();
    if !inner.is_empty() && !inner.contains(&wlo) && !inner.contains(&whi) {
        return Err(domain(format!(
            "region [{a_lo}, {a_hi}] lies strictly inside the lightcone [{wlo}, {whi}]; \
             it must contain a lightcone edge or avoid the lightcone"
        )));
    }
    reduce_region(c, a_lo, a_hi)
}

/// [`reduced_choi`] without the lightcone-edge requirement.
pub fn reduce_region(c: &ChoiState, a_lo: Site, a_hi: Site) -> Result<ReducedChoi> {
    if a_lo > a_hi {
        return Err(structural("empty region"));
    }
    let (wlo, whi) = c.window();
    let region = site_range(a_lo.0, a_hi.0);
    let inner: Vec<Site> = region.iter().copied().filter(|s| *s >= wlo && *s <= whi).collect();
    let factor = c.state.bipartite(&inner)?;
    Ok(ReducedChoi { region, inner, factor, d: c.local_dim() })
}

impl ReducedChoi {
    pub fn d_a(&self) -> usize {
        self.d.pow(self.region.len() as u32)
    }

    /// `⟨φ⁺|ν_A|φ⁺⟩`.
    pub fn phi_plus_fidelity(&self) -> f64 {
        let phi = phi_plus(self.d, self.inner.len());
        let w = self.factor.adjoint() * phi;
        w.norm_squared()
    }

    /// `tr ν_A²`.
    pub fn purity(&self) -> f64 {
        gram_purity(&self.factor)
    }

    /// Nonzero part of the spectrum of `ν_A`, descending.
    pub fn spectrum(&self) -> Vec<f64> {
        gram_spectrum(&self.factor)
    }

    /// `ν_A` as a matrix on the doubled region (local dimension `d²`).
    pub fn to_operator(&self) -> Result<DenseOperator> {
        if self.region.len() > MAX_REDUCED_SITES {
            return Err(resource(format!(
                "reduced state on {} sites exceeds the cap of {MAX_REDUCED_SITES}",
                self.region.len()
            )));
        }
        let dd = self.d * self.d;
        let inner = DenseOperator::new(self.inner.clone(), dd, &self.factor * self.factor.adjoint())?;
        let outer: Vec<Site> = self.region.iter().copied().filter(|s| !self.inner.contains(s)).collect();
        if outer.is_empty() {
            return Ok(inner);
        }
        let phi = phi_plus(self.d, outer.len());
        let proj = DenseOperator::new(outer, dd, &phi * phi.adjoint())?;
        if self.inner.is_empty() {
            return Ok(proj);
        }
        inner.kron(&proj)
    }
}
