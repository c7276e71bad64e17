#![allow(dead_code)]

use otoc_core::brickwork::{choi_state, evolve_heisenberg, BrickworkCircuit, ChoiState, HeisenbergOperator};
use otoc_core::random::{gaussian_pair, SeededSource};
use otoc_core::tensor::{CMat, Site};
use rand::Rng;

/// Homogeneous circuit just wide enough for `steps` half steps.
pub fn evolved(u: &CMat, v: &CMat, steps: usize) -> (HeisenbergOperator, ChoiState) {
    let circuit = BrickworkCircuit::homogeneous(u.clone(), (2 * steps).max(2), steps).unwrap();
    let vt = evolve_heisenberg(&circuit, v, steps).unwrap();
    let c = choi_state(&vt).unwrap();
    (vt, c)
}

pub fn unit_coeffs<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    let (a, b) = gaussian_pair(rng);
    let (c, _) = gaussian_pair(rng);
    let n = (a * a + b * b + c * c).sqrt();
    [a / n, b / n, c / n]
}

/// Left part `[−(s−1), b]` and right part `[b+1, s]` of the lightcone.
pub fn left_region(steps: usize, b: i32) -> (Site, Site) {
    (Site(1 - steps as i32), Site(b))
}

pub fn right_region(steps: usize, b: i32) -> (Site, Site) {
    (Site(b + 1), Site(steps as i32))
}

pub fn rng(seed: u64) -> rand_chacha::ChaCha20Rng {
    SeededSource::new(seed).rng()
}
