//! Dual-unitary qubit gates, their single-site channels `𝓜±`, lightcone
//! transfer matrices, the exact dual-unitary OTOC and the XXZ closed form.
//!
//! Folded legs: an operator `X` on one qubit is the 4-vector with entry
//! `2a + b` equal to `X_ab`. The Heisenberg image of a two-site operator under
//! a brick `U` is the 16 × 16 matrix [`folded_heisenberg`] of `X ↦ U† X U`,
//! with rows indexed by `(i1, i2)` and columns by `(o1, o2)`.

mod channel;
mod transfer;

pub use channel::*;
pub use transfer::*;

use std::f64::consts::FRAC_PI_4;

use rand::Rng;

use crate::error::{domain, structural, Result};
use crate::random::haar_unitary;
use crate::tensor::{herm_expm, kron, pauli, unitarity_residual, CMat, C64, DEFAULT_TOL};

/// `exp[−i(π/4·XX + π/4·YY + J·ZZ)]`.
pub fn xxz_gate(j: f64) -> CMat {
    let h = kron(&pauli(1), &pauli(1)) * C64::new(FRAC_PI_4, 0.0)
        + kron(&pauli(2), &pauli(2)) * C64::new(FRAC_PI_4, 0.0)
        + kron(&pauli(3), &pauli(3)) * C64::new(j, 0.0);
    herm_expm(&h, 1.0).expect("XXZ generator is Hermitian")
}

/// Single-qubit dressings and global phase of `e^{iφ}(u₊⊗u₋)·V[J]·(v₋⊗v₊)`.
#[derive(Debug, Clone)]
pub struct Dressings {
    pub phase: f64,
    pub u_plus: CMat,
    pub u_minus: CMat,
    pub v_minus: CMat,
    pub v_plus: CMat,
}

impl Dressings {
    pub fn trivial() -> Self {
        let id = CMat::identity(2, 2);
        Dressings { phase: 0.0, u_plus: id.clone(), u_minus: id.clone(), v_minus: id.clone(), v_plus: id }
    }

    /// Four independent Haar dressings and a uniform phase.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut draw = || haar_unitary(2, rng).expect("dimension 2 is valid");
        let (u_plus, u_minus, v_minus, v_plus) = (draw(), draw(), draw(), draw());
        let phase = std::f64::consts::TAU * rng.random::<f64>();
        Dressings { phase, u_plus, u_minus, v_minus, v_plus }
    }
}

#[derive(Debug, Clone)]
pub struct DualUnitaryGate {
    pub u: CMat,
    pub coupling: f64,
    pub dressings: Dressings,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualityCheck {
    pub time_residual: f64,
    pub space_residual: f64,
    pub time_unitary: bool,
    pub space_unitary: bool,
}

/// Space-direction reshuffle `ũ_{(o1 i1),(o2 i2)} = u_{(o1 o2),(i1 i2)}`.
pub fn reshuffle(u: &CMat) -> CMat {
    CMat::from_fn(4, 4, |r, c| {
        let (o1, i1) = (r / 2, r % 2);
        let (o2, i2) = (c / 2, c % 2);
        u[(o1 * 2 + o2, i1 * 2 + i2)]
    })
}

pub fn check_dual_unitarity(u: &CMat) -> Result<DualityCheck> {
    if u.nrows() != 4 || u.ncols() != 4 {
        return Err(structural("dual-unitarity is defined for 4x4 qubit bricks"));
    }
    let time_residual = unitarity_residual(u);
    let space_residual = unitarity_residual(&reshuffle(u));
    Ok(DualityCheck {
        time_residual,
        space_residual,
        time_unitary: time_residual <= DEFAULT_TOL,
        space_unitary: space_residual <= DEFAULT_TOL,
    })
}

pub fn make_du_gate(coupling: f64, dressings: Dressings) -> Result<DualUnitaryGate> {
    for (name, m) in [
        ("u+", &dressings.u_plus),
        ("u-", &dressings.u_minus),
        ("v-", &dressings.v_minus),
        ("v+", &dressings.v_plus),
    ] {
        if m.nrows() != 2 || unitarity_residual(m) > DEFAULT_TOL {
            return Err(domain(format!("dressing {name} is not a 2x2 unitary")));
        }
    }
    let u = kron(&dressings.u_plus, &dressings.u_minus)
        * xxz_gate(coupling)
        * kron(&dressings.v_minus, &dressings.v_plus)
        * C64::from_polar(1.0, dressings.phase);
    let check = check_dual_unitarity(&u)?;
    if !(check.time_unitary && check.space_unitary) {
        return Err(domain(format!(
            "constructed brick fails duality checks ({:.3e}, {:.3e})",
            check.time_residual, check.space_residual
        )));
    }
    Ok(DualUnitaryGate { u, coupling, dressings })
}

/// Random-dressing dual-unitary brick with `J` uniform in `[0, π/2)`.
pub fn random_du_gate<R: Rng + ?Sized>(rng: &mut R) -> DualUnitaryGate {
    let coupling = std::f64::consts::FRAC_PI_2 * rng.random::<f64>();
    let dressings = Dressings::random(rng);
    make_du_gate(coupling, dressings).expect("Haar dressings are unitary")
}

/// A cut of the lightcone after `steps` half steps at boundary site `boundary`:
/// the left region is `j ≤ boundary`, the right region `j > boundary`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LightconeCut {
    pub steps: usize,
    pub boundary: i32,
}

impl LightconeCut {
    pub fn new(steps: usize, boundary: i32) -> Result<Self> {
        let s = steps as i32;
        if steps == 0 || boundary < -(s - 1) || boundary >= s {
            return Err(domain(format!(
                "boundary {boundary} does not split the lightcone [{}, {s}]",
                -(s - 1)
            )));
        }
        Ok(LightconeCut { steps, boundary })
    }

    /// `x₊ = t + a` in lattice units.
    pub fn x_plus(&self) -> f64 {
        (self.steps as f64 + f64::from(self.boundary)) / 2.0
    }

    pub fn x_minus(&self) -> f64 {
        (self.steps as f64 - f64::from(self.boundary)) / 2.0
    }

    /// Columns of the lightcone rectangle left of the cut, `⌈x₊⌉`.
    pub fn columns(&self) -> usize {
        (self.steps as i32 + self.boundary + 1) as usize / 2
    }

    /// Rows of the rectangle, `⌈x₋⌉`.
    pub fn rows(&self) -> usize {
        (self.steps as i32 - self.boundary + 1) as usize / 2
    }

    /// Left edge of the lightcone.
    pub fn left_edge(&self) -> i32 {
        -(self.steps as i32 - 1)
    }

    pub fn right_edge(&self) -> i32 {
        self.steps as i32
    }

    /// Cut with the given rectangle, when one exists with an integer `x±`.
    pub fn from_rectangle(columns: usize, rows: usize) -> Result<Self> {
        Self::new(columns + rows, columns as i32 - rows as i32)
    }
}
