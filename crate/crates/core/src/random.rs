//! Seeded sampling of Haar unitaries and traceless probes, and the exact
//! two-fold Haar twirl.
//!
//! Streams come from ChaCha20 (`rand_chacha` 0.9): a fixed `(seed, stream)`
//! pair yields the same sequence on every platform.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{domain, structural, Result};
use crate::tensor::{swap_gate, CMat, CVec, C64, ONE};

/// A 64-bit seed plus a 64-bit stream id selecting an independent ChaCha stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeededSource {
    pub seed: u64,
    pub stream: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl SeededSource {
    pub fn new(seed: u64) -> Self {
        SeededSource { seed, stream: 0 }
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        SeededSource { seed, stream }
    }

    /// Child source for work item `index`; children of distinct indices use distinct streams.
    pub fn fork(&self, index: u64) -> Self {
        SeededSource { seed: self.seed, stream: splitmix64(self.stream ^ splitmix64(index)) }
    }

    pub fn rng(&self) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// Two independent standard normals by Box–Muller.
pub fn gaussian_pair<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    // 1 - u lies in (0, 1], so the logarithm is finite
    let u1 = 1.0 - rng.random::<f64>();
    let u2 = rng.random::<f64>();
    let r = (-2.0 * u1.ln()).sqrt();
    let (s, c) = (TAU * u2).sin_cos();
    (r * c, r * s)
}

/// Complex Gaussian with `E|z|² = 1`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let (a, b) = gaussian_pair(rng);
    C64::new(a, b) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-distributed `dim × dim` unitary: Ginibre matrix, QR, and the phases
/// of `diag(R)` moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<CMat> {
    if dim == 0 {
        return Err(domain("Haar unitary of dimension 0"));
    }
    let mut entries = Vec::with_capacity(dim * dim);
    for _ in 0..dim * dim {
        entries.push(complex_gaussian(rng));
    }
    let g = CMat::from_row_slice(dim, dim, &entries);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..dim {
        let rk = r[(k, k)];
        let phase = if rk.norm() > 0.0 { rk / rk.norm() } else { ONE };
        let mut col = q.column_mut(k);
        col *= phase;
    }
    Ok(q)
}

/// `diag(1, ω, ω², …)` with `ω = exp(2πi/dim)`.
pub fn clock_matrix(dim: usize) -> CMat {
    let diag = CVec::from_iterator(
        dim,
        (0..dim).map(|k| C64::from_polar(1.0, TAU * k as f64 / dim as f64)),
    );
    CMat::from_diagonal(&diag)
}

/// A traceless unitary `W_R = R† W R` with `W` the clock matrix and `R` Haar.
#[derive(Debug, Clone)]
pub struct TracelessProbe {
    pub base: CMat,
    pub frame: CMat,
    pub value: CMat,
}

pub fn traceless_probe<R: Rng + ?Sized>(dim_a: usize, rng: &mut R) -> Result<TracelessProbe> {
    if dim_a < 2 {
        return Err(domain("no traceless unitary exists in dimension 1"));
    }
    let base = clock_matrix(dim_a);
    let frame = haar_unitary(dim_a, rng)?;
    let value = frame.adjoint() * &base * &frame;
    Ok(TracelessProbe { base, frame, value })
}

/// Exact `E_U[(U⊗U)† X (U⊗U)]` over Haar `U` on `C^d`, for `X` on `C^d ⊗ C^d`:
/// `(1·tr X + S·tr SX − S·tr X/d − 1·tr SX/d) / (d² − 1)`.
pub fn twofold_haar_average(x: &CMat, d: usize) -> Result<CMat> {
    if d < 2 {
        return Err(domain("two-fold average needs d >= 2"));
    }
    let n = d * d;
    if x.nrows() != n || x.ncols() != n {
        return Err(structural(format!("expected a {n}x{n} operator on two copies of C^{d}")));
    }
    let s = swap_gate(d);
    let tr_x = x.trace();
    let tr_sx = (&s * x).trace();
    let df = d as f64;
    let id = CMat::identity(n, n);
    let num = &id * tr_x + &s * tr_sx - &s * (tr_x / df) - &id * (tr_sx / df);
    Ok(num / C64::new(df * df - 1.0, 0.0))
}
