//! Local-operator entanglement of Choi states and the two upper bounds it
//! places on the averaged OTOC.
//!
//! Entropies are in nats.

use crate::brickwork::ReducedChoi;
use crate::error::{domain, structural, Result};
use crate::tensor::{hermiticity_residual, psd_spectrum, CMat, Site, StateVector};

/// Eigenvalues below this are treated as zero in the von Neumann entropy.
pub const SPECTRUM_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntanglementReport {
    pub renyi2: f64,
    pub von_neumann: f64,
    pub geometric: f64,
    pub purity: f64,
}

impl EntanglementReport {
    /// From the spectrum of a unit-trace density operator (any order).
    pub fn from_spectrum(spectrum: &[f64]) -> Self {
        let purity: f64 = spectrum.iter().map(|p| p * p).sum();
        let von_neumann = spectrum
            .iter()
            .filter(|&&p| p > SPECTRUM_FLOOR)
            .map(|&p| -p * p.ln())
            .sum::<f64>()
            .max(0.0);
        let top = spectrum.iter().copied().fold(0.0, f64::max);
        EntanglementReport { renyi2: -purity.ln(), von_neumann, geometric: 1.0 - top, purity }
    }
}

/// Report for `ν_A`; the geometric measure is that of the pure Choi state
/// across `A(′) : Ā(′)`.
pub fn entanglement_report(nu: &ReducedChoi) -> EntanglementReport {
    EntanglementReport::from_spectrum(&nu.spectrum())
}

fn density_spectrum(nu: &CMat) -> Result<Vec<f64>> {
    if nu.nrows() != nu.ncols() {
        return Err(structural("density operator must be square"));
    }
    let tr = nu.trace();
    if (tr.re - 1.0).abs() > 1e-8 || tr.im.abs() > 1e-8 {
        return Err(domain(format!("density operator has trace {tr}")));
    }
    if hermiticity_residual(nu) > 1e-8 {
        return Err(domain("density operator is not Hermitian"));
    }
    Ok(psd_spectrum(nu))
}

/// `−log tr ν²`.
pub fn renyi2_entropy(nu: &CMat) -> Result<f64> {
    density_spectrum(nu)?;
    let purity: f64 = nu.iter().map(|z| z.norm_sqr()).sum();
    Ok(-purity.ln())
}

pub fn von_neumann_entropy(nu: &CMat) -> Result<f64> {
    Ok(EntanglementReport::from_spectrum(&density_spectrum(nu)?).von_neumann)
}

/// `1 − max |⟨a ⊗ b|φ⟩|²` over product states, i.e. one minus the largest
/// squared Schmidt coefficient across `cut : rest`.
pub fn geometric_entanglement(state: &StateVector, cut: &[Site]) -> Result<f64> {
    let sv = state.schmidt_values(cut)?;
    Ok(1.0 - sv[0] * sv[0])
}

fn check_da(d_a: usize) -> Result<f64> {
    if d_a < 2 {
        return Err(domain("bounds need d_A >= 2"));
    }
    Ok((d_a * d_a) as f64)
}

/// `1 − d_A²/(d_A²−1) · E_G`.
pub fn bound_geometric(report: &EntanglementReport, d_a: usize) -> Result<f64> {
    let da2 = check_da(d_a)?;
    Ok(1.0 - da2 / (da2 - 1.0) * report.geometric)
}

/// `(d_A² e^{−S⁽²⁾/2} − 1)/(d_A² − 1)`.
pub fn bound_renyi(report: &EntanglementReport, d_a: usize) -> Result<f64> {
    let da2 = check_da(d_a)?;
    Ok((da2 * (-0.5 * report.renyi2).exp() - 1.0) / (da2 - 1.0))
}
