//! Exact OTOCs by two independent contractions, the Haar-averaged OTOC `G`,
//! its Monte-Carlo estimate and the concentration statistics of single draws.
//!
//! `F(W, V_t) = tr[W† V_t† W V_t]/d`, with `d` the dimension of the smallest
//! window containing both the lightcone of `V_t` and the support of `W`.

use crate::brickwork::{phi_plus, reduced_choi, reduce_region, unfold_choi, ChoiState, HeisenbergOperator, ReducedChoi};
use crate::error::{domain, resource, structural, Result};
use crate::exec::Exec;
use crate::random::{clock_matrix, traceless_probe, twofold_haar_average, SeededSource};
use crate::stats::mean_stderr;
use crate::tensor::{hermitian_eigen, kron, permute_legs, site_range, CMat, DenseOperator, Site, C64, DEFAULT_TOL};

/// Largest window used by the direct-trace contraction.
pub const MAX_DIRECT_SITES: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    DirectTrace,
    ChoiExpectation,
    Theorem1Fidelity,
    TwofoldAverage,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OtocResult {
    pub value: C64,
    pub real_part: f64,
    pub method: Method,
}

impl OtocResult {
    fn new(value: C64, method: Method) -> Self {
        OtocResult { value, real_part: value.re, method }
    }
}

fn contiguous(sites: &[Site]) -> Result<(Site, Site)> {
    if sites.is_empty() || sites.windows(2).any(|w| w[1].0 != w[0].0 + 1) {
        return Err(structural("probe support must be a non-empty contiguous window"));
    }
    Ok((sites[0], sites[sites.len() - 1]))
}

fn check_disjoint_from_origin(sites: &[Site], origin: Site) -> Result<()> {
    if sites.contains(&origin) {
        return Err(domain(format!("probe region contains the origin site {origin} of V")));
    }
    Ok(())
}

/// `V_t` and `W` embedded in their common window.
fn common_window(w: &DenseOperator, vt: &HeisenbergOperator) -> Result<(CMat, CMat)> {
    let (wlo, whi) = contiguous(w.sites())?;
    let (vlo, vhi) = vt.window();
    let sites = site_range(wlo.min(vlo).0, whi.max(vhi).0);
    if sites.len() > MAX_DIRECT_SITES {
        return Err(resource(format!("direct OTOC window of {} sites exceeds {MAX_DIRECT_SITES}", sites.len())));
    }
    Ok((w.embed(&sites)?.into_data(), vt.op.embed(&sites)?.into_data()))
}

fn trace_formula(w: &CMat, v: &CMat) -> C64 {
    let wv = w * v;
    let vw = v * w;
    // tr[W† V† W V] = <V W, W V>_HS
    let value: C64 = vw.iter().zip(wv.iter()).map(|(a, b)| a.conj() * b).sum();
    value / C64::new(w.nrows() as f64, 0.0)
}

/// `F(W, V_t)` by the matrix trace; `W` need not be unitary or traceless.
pub fn otoc_trace(w: &DenseOperator, vt: &HeisenbergOperator) -> Result<C64> {
    let (wf, vf) = common_window(w, vt)?;
    Ok(trace_formula(&wf, &vf))
}

/// `F(W, V_t)` for a unitary probe supported away from the origin of `V`.
pub fn otoc_direct(w: &DenseOperator, vt: &HeisenbergOperator) -> Result<OtocResult> {
    check_disjoint_from_origin(w.sites(), vt.origin)?;
    let res = w.unitarity_residual();
    if res > DEFAULT_TOL {
        return Err(domain(format!("probe is not unitary (residual {res:.3e})")));
    }
    Ok(OtocResult::new(otoc_trace(w, vt)?, Method::DirectTrace))
}

/// `W ⊗ W*` with legs fused per site as `(unprimed, primed)`.
pub fn folded_pair(w: &CMat, d: usize, n: usize) -> CMat {
    let x = kron(w, &w.map(|z| z.conj()));
    let dim = x.nrows();
    let flat: Vec<C64> = (0..dim).flat_map(|r| (0..dim).map(move |c| (r, c))).map(|rc| x[rc]).collect();
    // legs [a.., b.., c.., e..] -> [(a1 b1) .., (c1 e1) ..]
    let mut perm: Vec<usize> = (0..n).flat_map(|k| [k, n + k]).collect();
    perm.extend((0..n).flat_map(|k| [2 * n + k, 3 * n + k]));
    let data = permute_legs(&flat, &vec![d; 4 * n], &perm);
    CMat::from_row_slice(dim, dim, &data)
}

/// `⟨V_t|(W ⊗ W*)_A|V_t⟩` through the reduced Choi state on the support of `W`.
pub fn otoc_choi(w: &DenseOperator, c: &ChoiState) -> Result<OtocResult> {
    check_disjoint_from_origin(w.sites(), c.origin)?;
    let res = w.unitarity_residual();
    if res > DEFAULT_TOL {
        return Err(domain(format!("probe is not unitary (residual {res:.3e})")));
    }
    let (lo, hi) = contiguous(w.sites())?;
    let nu = reduce_region(c, lo, hi)?.to_operator()?;
    let d = w.local_dim();
    let ww = folded_pair(w.data(), d, w.sites().len());
    let value: C64 = ww.iter().zip(nu.data().transpose().iter()).map(|(a, b)| a * b).sum();
    Ok(OtocResult::new(value, Method::ChoiExpectation))
}

/// `(d_A² f − 1)/(d_A² − 1)` with `f = ⟨φ⁺|ν_A|φ⁺⟩`.
pub fn g_from_fidelity(fidelity: f64, d_a: usize) -> Result<f64> {
    if d_a < 2 {
        return Err(domain("G needs d_A >= 2"));
    }
    let da2 = (d_a * d_a) as f64;
    Ok((da2 * fidelity - 1.0) / (da2 - 1.0))
}

/// Averaged OTOC from a reduced Choi state given as a matrix on the doubled region.
pub fn g_exact(nu: &DenseOperator) -> Result<f64> {
    let dd = nu.local_dim();
    let d = (dd as f64).sqrt().round() as usize;
    if d * d != dd {
        return Err(structural("reduced Choi state must live on doubled sites"));
    }
    let tr = nu.trace();
    if (tr.re - 1.0).abs() > 1e-8 || tr.im.abs() > 1e-8 {
        return Err(domain(format!("reduced Choi state has trace {tr}")));
    }
    let n = nu.sites().len();
    let phi = phi_plus(d, n);
    let f = (phi.adjoint() * nu.data() * &phi)[(0, 0)].re;
    g_from_fidelity(f, d.pow(n as u32))
}

/// The same quantity from the factored form.
pub fn g_reduced(nu: &ReducedChoi) -> Result<f64> {
    g_from_fidelity(nu.phi_plus_fidelity(), nu.d_a())
}

/// `G` through the reduced Choi state on a region with a lightcone edge.
pub fn g_theorem1(c: &ChoiState, a_lo: Site, a_hi: Site) -> Result<OtocResult> {
    check_disjoint_from_origin(&site_range(a_lo.0, a_hi.0), c.origin)?;
    let g = g_reduced(&reduced_choi(c, a_lo, a_hi)?)?;
    Ok(OtocResult::new(C64::new(g, 0.0), Method::Theorem1Fidelity))
}

/// `G` by twirling `W† ⊗ W` exactly and contracting with two copies of `V_t`.
pub fn g_twofold(vt: &HeisenbergOperator, a_lo: Site, a_hi: Site) -> Result<OtocResult> {
    let region = site_range(a_lo.0, a_hi.0);
    check_disjoint_from_origin(&region, vt.origin)?;
    let d = vt.op.local_dim();
    let d_a = d.pow(region.len() as u32);
    let w = clock_matrix(d_a);
    let y = twofold_haar_average(&kron(&w.adjoint(), &w), d_a)?;

    let probe = DenseOperator::new(region.clone(), d, w)?;
    let (_, v) = common_window(&probe, vt)?;
    let (vlo, vhi) = vt.window();
    let sites = site_range(a_lo.min(vlo).0, a_hi.max(vhi).0);
    let n = sites.len();
    let a_legs: Vec<usize> = region.iter().map(|s| sites.iter().position(|x| x == s).unwrap()).collect();
    let rest: Vec<usize> = (0..n).filter(|k| !a_legs.contains(k)).collect();
    let dim = v.nrows();
    let d_rest = dim / d_a;
    let flat: Vec<C64> = (0..dim).flat_map(|r| (0..dim).map(move |c| (r, c))).map(|rc| v[rc]).collect();
    // legs [row A, col A, row rest, col rest]
    let mut perm: Vec<usize> = a_legs.clone();
    perm.extend(a_legs.iter().map(|k| k + n));
    perm.extend(rest.iter().copied());
    perm.extend(rest.iter().map(|k| k + n));
    let blocks = CMat::from_row_slice(d_a * d_a, d_rest * d_rest, &permute_legs(&flat, &vec![d; 2 * n], &perm));
    // gram[(x,y),(x',y')] = <B_xy, B_x'y'>
    let gram = blocks.map(|z| z.conj()) * blocks.transpose();
    let mut acc = C64::new(0.0, 0.0);
    for a in 0..d_a {
        for b in 0..d_a {
            for c in 0..d_a {
                for e in 0..d_a {
                    acc += y[(a * d_a + c, b * d_a + e)] * gram[(c * d_a + b, e * d_a + a)];
                }
            }
        }
    }
    Ok(OtocResult::new(acc / C64::new(dim as f64, 0.0), Method::TwofoldAverage))
}

/// Spectral form of `ν_A` used to evaluate `F` for many probes on `A`:
/// `F(W) = Σ_k λ_k tr[Ψ_k† W Ψ_k W†]`.
#[derive(Debug, Clone)]
pub struct OtocKernel {
    d_a: usize,
    terms: Vec<(f64, CMat)>,
}

/// Eigenvalues below this do not enter the kernel.
const KERNEL_FLOOR: f64 = 1e-15;

impl OtocKernel {
    pub fn new(nu: &ReducedChoi) -> Result<Self> {
        let op = nu.to_operator()?;
        let n = op.sites().len();
        let d = (op.local_dim() as f64).sqrt().round() as usize;
        let (vals, vecs) = hermitian_eigen(op.data());
        let mut terms = Vec::new();
        for (k, &lambda) in vals.iter().enumerate() {
            if lambda > KERNEL_FLOOR {
                let col: Vec<C64> = vecs.column(k).iter().copied().collect();
                let psi = unfold_choi(&col, d, n) / C64::new((d.pow(n as u32) as f64).sqrt(), 0.0);
                terms.push((lambda, psi));
            }
        }
        Ok(OtocKernel { d_a: nu.d_a(), terms })
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn rank(&self) -> usize {
        self.terms.len()
    }

    pub fn eval(&self, w: &CMat) -> C64 {
        let wd = w.adjoint();
        self.terms
            .iter()
            .map(|(lambda, psi)| {
                let x = w * psi * &wd;
                let v: C64 = psi.iter().zip(x.iter()).map(|(a, b)| a.conj() * b).sum();
                v * *lambda
            })
            .sum()
    }

    /// `F` for the probe drawn from `src`.
    pub fn sample(&self, src: &SeededSource) -> Result<C64> {
        let probe = traceless_probe(self.d_a, &mut src.rng())?;
        Ok(self.eval(&probe.value))
    }
}

#[derive(Debug, Clone)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub imag_mean: f64,
    pub imag_std_error: f64,
    pub samples: Vec<C64>,
}

/// Draws `n_samples` values of `F`, sample `i` from `src.fork(i)`.
pub fn sample_otocs(kernel: &OtocKernel, n_samples: usize, src: SeededSource, exec: Exec) -> Result<Vec<C64>> {
    exec.map(n_samples, |i| kernel.sample(&src.fork(i as u64))).into_iter().collect()
}

impl MonteCarloEstimate {
    pub fn as_result(&self) -> OtocResult {
        OtocResult::new(C64::new(self.mean, self.imag_mean), Method::MonteCarlo)
    }
}

pub fn estimate(samples: Vec<C64>) -> MonteCarloEstimate {
    let re: Vec<f64> = samples.iter().map(|z| z.re).collect();
    let im: Vec<f64> = samples.iter().map(|z| z.im).collect();
    let (mean, std_error) = mean_stderr(&re);
    let (imag_mean, imag_std_error) = mean_stderr(&im);
    MonteCarloEstimate { mean, std_error, imag_mean, imag_std_error, samples }
}

/// Monte-Carlo estimate of `G` over traceless probes on `a_lo..=a_hi`.
pub fn g_monte_carlo(
    c: &ChoiState,
    a_lo: Site,
    a_hi: Site,
    n_samples: usize,
    src: SeededSource,
    exec: Exec,
) -> Result<MonteCarloEstimate> {
    if n_samples < 2 {
        return Err(domain("Monte-Carlo needs at least two samples"));
    }
    check_disjoint_from_origin(&site_range(a_lo.0, a_hi.0), c.origin)?;
    let kernel = OtocKernel::new(&reduced_choi(c, a_lo, a_hi)?)?;
    Ok(estimate(sample_otocs(&kernel, n_samples, src, exec)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcentrationStats {
    pub samples: usize,
    pub epsilon: f64,
    pub empirical_tail: f64,
    pub levy_bound: f64,
    pub binomial_std_error: f64,
}

/// `exp(−d_A² ε² / 64)`.
pub fn levy_bound(d_a: usize, epsilon: f64) -> f64 {
    (-((d_a * d_a) as f64) * epsilon * epsilon / 64.0).exp()
}

/// Fraction of probes with `|F − G| ≥ ε`.
pub fn concentration_stats(samples: &[C64], g: f64, epsilon: f64, d_a: usize) -> Result<ConcentrationStats> {
    if epsilon <= 0.0 {
        return Err(domain("epsilon must be positive"));
    }
    let n = samples.len();
    let hits = samples.iter().filter(|f| (**f - g).norm() >= epsilon).count();
    let bound = levy_bound(d_a, epsilon);
    Ok(ConcentrationStats {
        samples: n,
        epsilon,
        empirical_tail: hits as f64 / n as f64,
        levy_bound: bound,
        binomial_std_error: (bound * (1.0 - bound) / n as f64).sqrt(),
    })
}

pub fn concentration_experiment(
    c: &ChoiState,
    a_lo: Site,
    a_hi: Site,
    epsilon: f64,
    n_samples: usize,
    src: SeededSource,
    exec: Exec,
) -> Result<ConcentrationStats> {
    let nu = reduced_choi(c, a_lo, a_hi)?;
    let g = g_reduced(&nu)?;
    let kernel = OtocKernel::new(&nu)?;
    let samples = sample_otocs(&kernel, n_samples, src, exec)?;
    concentration_stats(&samples, g, epsilon, kernel.d_a())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracelessReduction {
    pub f_full: C64,
    pub f_traceless: C64,
    /// `|tr W|² / d_A²`.
    pub constant: f64,
}

impl TracelessReduction {
    pub fn residual(&self) -> f64 {
        (self.f_full - self.f_traceless - self.constant).norm()
    }
}

/// Splits `W = W′ + (tr W/d_A)·1` and evaluates both OTOCs.
pub fn traceless_reduction_check(w_full: &DenseOperator, vt: &HeisenbergOperator) -> Result<TracelessReduction> {
    check_disjoint_from_origin(w_full.sites(), vt.origin)?;
    let d_a = w_full.dim();
    let tr = w_full.trace();
    let shift = tr / C64::new(d_a as f64, 0.0);
    let mut wp = w_full.data().clone();
    for k in 0..d_a {
        wp[(k, k)] -= shift;
    }
    let w_prime = DenseOperator::new(w_full.sites().to_vec(), w_full.local_dim(), wp)?;
    Ok(TracelessReduction {
        f_full: otoc_trace(w_full, vt)?,
        f_traceless: otoc_trace(&w_prime, vt)?,
        constant: tr.norm_sqr() / (d_a * d_a) as f64,
    })
}
