//! Invariants evaluated on an experiment table. `run` and `verify` share
//! this code, so a stored record is judged exactly like a fresh one.

use serde::{Deserialize, Serialize};

use otoc_core::stats::linear_fit;

use crate::config::{Config, ExperimentKind};
use crate::error::LabResult;
use crate::experiments::expected_columns;
use crate::table::Table;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    /// Decides the exit status.
    Assertion,
    /// Informational only.
    Report,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn assert(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), kind: CheckKind::Assertion, passed, detail: detail.into() }
    }

    fn report(name: &str, detail: impl Into<String>) -> Self {
        Check { name: name.into(), kind: CheckKind::Report, passed: true, detail: detail.into() }
    }

    pub fn line(&self) -> String {
        let tag = match (self.kind, self.passed) {
            (CheckKind::Report, _) => "INFO",
            (CheckKind::Assertion, true) => "PASS",
            (CheckKind::Assertion, false) => "FAIL",
        };
        format!("{tag} {}: {}", self.name, self.detail)
    }
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.kind == CheckKind::Report || c.passed)
}

pub fn evaluate(cfg: &Config, t: &Table) -> LabResult<Vec<Check>> {
    let expected = expected_columns(cfg.experiment);
    let schema_ok = t.columns().iter().map(String::as_str).eq(expected.iter().copied());
    let mut out = vec![Check::assert(
        "schema",
        schema_ok,
        if schema_ok { format!("{} columns, {} rows", expected.len(), t.len()) } else { "column set differs".into() },
    )];
    if !schema_ok {
        return Ok(out);
    }
    out.push(Check::assert("non-empty", !t.is_empty(), format!("{} rows", t.len())));
    match cfg.experiment {
        ExperimentKind::SwapCase => swap_case(cfg, t, &mut out)?,
        ExperimentKind::HaarBoundSweep => haar_sweep(cfg, t, &mut out)?,
        ExperimentKind::XxzDecay => xxz(cfg, t, &mut out)?,
        ExperimentKind::DuCrosscheck => du(cfg, t, &mut out)?,
        ExperimentKind::Concentration => concentration(cfg, t, &mut out)?,
        ExperimentKind::ChaoticDiagnostic => chaotic(cfg, t, &mut out)?,
        ExperimentKind::GlobalHaarNu => global_nu(cfg, t, &mut out)?,
    }
    Ok(out)
}

/// Largest `f(row)` over rows where it is defined, with the worst row.
fn worst<F>(t: &Table, mut f: F) -> LabResult<Option<(f64, usize)>>
where
    F: FnMut(usize) -> LabResult<Option<f64>>,
{
    let mut best: Option<(f64, usize)> = None;
    for r in 0..t.len() {
        if let Some(x) = f(r)? {
            let x = if x.is_nan() { f64::INFINITY } else { x };
            if best.is_none_or(|(b, _)| x > b) {
                best = Some((x, r));
            }
        }
    }
    Ok(best)
}

fn max_check(name: &str, tol: f64, found: Option<(f64, usize)>) -> Check {
    match found {
        None => Check::assert(name, false, "no applicable rows"),
        Some((x, r)) => Check::assert(name, x <= tol, format!("max {x:.3e} (row {}) against {tol:.1e}", r + 1)),
    }
}

/// Theorem-2 inequalities on every row with a defined `G` and bound.
fn bounds(t: &Table, g_column: &str, fallback: Option<&str>, tol: f64, out: &mut Vec<Check>) -> LabResult<()> {
    for (bound, name) in [("bound_renyi", "bound-renyi"), ("bound_geometric", "bound-geometric")] {
        let found = worst(t, |r| {
            let mut g = t.f64(r, g_column)?;
            if g.is_nan() {
                if let Some(fb) = fallback {
                    g = t.f64(r, fb)?;
                }
            }
            let b = t.f64(r, bound)?;
            Ok((!g.is_nan() && !b.is_nan()).then_some(g - b))
        })?;
        match found {
            Some((x, r)) => out.push(Check::assert(
                name,
                x <= tol,
                format!("max G - bound {x:.3e} (row {}), slack {tol:.1e}", r + 1),
            )),
            None => out.push(Check::report(name, "no rows with both values")),
        }
    }
    Ok(())
}

fn g_range(t: &Table, tol: f64, out: &mut Vec<Check>) -> LabResult<()> {
    let found = worst(t, |r| {
        let g = t.f64(r, "g_exact")?;
        let d2 = (t.i64(r, "d_a")? as f64).powi(2);
        let lo = -1.0 / (d2 - 1.0);
        Ok(Some((lo - g).max(g - 1.0)))
    })?;
    out.push(max_check("g-range", tol, found));
    Ok(())
}

fn mc_report(t: &Table, out: &mut Vec<Check>) -> LabResult<()> {
    let mut n = 0;
    let mut within = 0;
    for r in 0..t.len() {
        let (mc, se) = (t.f64(r, "g_mc")?, t.f64(r, "g_mc_stderr")?);
        if mc.is_nan() {
            continue;
        }
        n += 1;
        if (mc - t.f64(r, "g_exact")?).abs() <= 3.0 * se + 1e-12 {
            within += 1;
        }
    }
    out.push(Check::report("monte-carlo", format!("{within}/{n} estimates within 3 standard errors")));
    Ok(())
}

fn swap_case(cfg: &Config, t: &Table, out: &mut Vec<Check>) -> LabResult<()> {
    let tol = cfg.tolerances.swap;
    let found = worst(t, |r| Ok(Some((t.f64(r, "g_exact")? - t.f64(r, "g_expected")?).abs())))?;
    out.push(max_check("swap-g", tol, found));
    let found = worst(t, |r| Ok(Some(t.f64(r, "s2")?.abs())))?;
    out.push(max_check("swap-renyi2-zero", tol, found));
    bounds(t, "g_exact", None, cfg.tolerances.bound, out)?;
    mc_report(t, out)
}

fn haar_sweep(cfg: &Config, t: &Table, out: &mut Vec<Check>) -> LabResult<()> {
    bounds(t, "g_exact", None, cfg.tolerances.bound, out)?;
    g_range(t, cfg.tolerances.bound, out)?;
    mc_report(t, out)
}

fn xxz(cfg: &Config, t: &Table, out: &mut Vec<Check>) -> LabResult<()> {
    let tol = &cfg.tolerances;
    let p = cfg.xxz_decay.as_ref().expect("resolved");
    let diff = |a: &'static str, b: &'static str| {
        move |r: usize| -> LabResult<Option<f64>> {
            let (x, y) = (t.f64(r, a)?, t.f64(r, b)?);
            Ok((!x.is_nan()).then_some((x - y).abs()))
        }
    };
    let dense_rows = (0..t.len()).filter(|&r| t.f64(r, "g_exact").is_ok_and(|g| !g.is_nan())).count();
    if dense_rows > 0 {
        out.push(max_check("closed-vs-dense", tol.exact, worst(t, diff("g_exact", "g_closed"))?));
        out.push(max_check("renyi2-transfer-vs-dense", tol.exact, worst(t, diff("s2_dense", "s2"))?));
    }
    out.push(max_check("transfer-vs-closed", tol.exact, worst(t, diff("g_transfer", "g_closed"))?));
    bounds(t, "g_exact", Some("g_closed"), tol.bound, out)?;

    let mut couplings: Vec<f64> = Vec::new();
    for r in 0..t.len() {
        let j = t.f64(r, "coupling")?;
        if !couplings.contains(&j) {
            couplings.push(j);
        }
    }
    let [ax, ay, az] = p.probe;
    let transverse = ax * ax + ay * ay;
    for j in couplings {
        let rows: Vec<usize> = (0..t.len()).filter(|&r| t.f64(r, "coupling").is_ok_and(|c| c == j)).collect();
        let col = |name: &str| rows.iter().map(|&r| t.f64(r, name)).collect::<LabResult<Vec<f64>>>();
        let steps = col("steps")?;
        let s2 = col("s2")?;
        let cols = col("columns")?;
        let g = col("g_closed")?;
        let tag = format!("J={j:.6}");
        if transverse == 0.0 {
            let dev = g.iter().map(|x| (x - 1.0).abs()).fold(0.0, f64::max);
            out.push(Check::assert(&format!("frozen-probe {tag}"), dev <= tol.exact, format!("max |G - 1| {dev:.3e}")));
            continue;
        }
        // growth is sub-linear: second differences over equally spaced times
        let spaced = steps.windows(3).all(|w| (w[2] - w[1] - (w[1] - w[0])).abs() < 1e-12);
        if steps.len() >= 3 && spaced {
            let dd = s2.windows(3).map(|w| w[2] - 2.0 * w[1] + w[0]).fold(f64::NEG_INFINITY, f64::max);
            out.push(Check::assert(
                &format!("renyi2-sublinear {tag}"),
                dd <= 1e-10,
                format!("max second difference {dd:.3e}"),
            ));
        }
        if az != 0.0 {
            out.push(Check::report(&format!("log-g-linear {tag}"), "probe has a z component; G tends to a constant"));
            continue;
        }
        if g.iter().any(|&x| x <= 0.0) || rows.len() < 3 {
            out.push(Check::report(&format!("log-g-linear {tag}"), "G not positive on every row or too few rows"));
            continue;
        }
        let logs: Vec<f64> = g.iter().map(|x| x.ln()).collect();
        let fit = linear_fit(&cols, &logs);
        out.push(Check::assert(
            &format!("log-g-linear {tag}"),
            fit.r_squared >= tol.min_r_squared,
            format!("R^2 {:.6}", fit.r_squared),
        ));
        let rate = -fit.slope;
        let want = 2.0 * (1.0 / (2.0 * j).sin()).ln();
        let rel = (rate - want).abs() / want;
        out.push(Check::assert(
            &format!("decay-rate {tag}"),
            rel <= tol.rate,
            format!("fitted {rate:.6} per column, channel value {want:.6}, relative {rel:.3e}"),
        ));
        let main = col("g_main_text")?;
        let dev = main.iter().zip(&g).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        out.push(Check::report(&format!("main-text-form {tag}"), format!("max deviation from closed form {dev:.3e}")));
    }
    Ok(())
}

fn du(cfg: &Config, t: &Table, out: &mut Vec<Check>) -> LabResult<()> {
    let found = worst(t, |r| Ok(Some((t.f64(r, "g_exact")? - t.f64(r, "g_formula")?).abs())))?;
    out.push(max_check("formula-vs-dense", cfg.tolerances.exact, found));
    let mut seen = [false, false];
    for r in 0..t.len() {
        match t.str(r, "branch")? {
            "edge-in-a" => seen[0] = true,
            "edge-in-complement" => seen[1] = true,
            _ => {}
        }
    }
    out.push(Check::assert("both-branches", seen == [true, true], format!("edge-in-a {}, edge-in-complement {}", seen[0], seen[1])));
    let lit = worst(t, |r| {
        let x = t.f64(r, "g_two_channel")?;
        Ok((!x.is_nan()).then(|| (x - t.f64(r, "g_exact").unwrap_or(f64::NAN)).abs()))
    })?;
    if let Some((x, _)) = lit {
        out.push(Check::report("two-channel-literal", format!("max deviation from dense {x:.3e}")));
    }
    bounds(t, "g_exact", None, cfg.tolerances.bound, out)
}

fn concentration(cfg: &Config, t: &Table, out: &mut Vec<Check>) -> LabResult<()> {
    let found = worst(t, |r| {
        Ok(Some(t.f64(r, "empirical_tail")? - t.f64(r, "levy_bound")? - 3.0 * t.f64(r, "binomial_stderr")?))
    })?;
    out.push(max_check("levy-tail", 0.0, found));
    mc_report(t, out)?;
    bounds(t, "g_exact", None, cfg.tolerances.bound, out)
}

fn chaotic(cfg: &Config, t: &Table, out: &mut Vec<Check>) -> LabResult<()> {
    let p = cfg.chaotic_diagnostic.as_ref().expect("resolved");
    // per gate: (family, minimal flag, recomputed minimality)
    let mut gates: Vec<(String, String, bool, bool)> = Vec::new();
    for r in 0..t.len() {
        let name = t.str(r, "gate")?.to_string();
        let fits = t.i64(r, "eigenvalue_one_dim")? == t.i64(r, "width")? + 1;
        let minimal = t.bool(r, "minimal")?;
        match gates.iter_mut().find(|g| g.0 == name) {
            Some(g) => g.3 &= fits,
            None => gates.push((name, t.str(r, "family")?.to_string(), minimal, fits)),
        }
    }
    let inconsistent: Vec<&str> = gates.iter().filter(|g| g.2 != g.3).map(|g| g.0.as_str()).collect();
    out.push(Check::assert(
        "minimal-consistent",
        inconsistent.is_empty(),
        if inconsistent.is_empty() { "flags match dimensions".to_string() } else { inconsistent.join(", ") },
    ));
    let wrongly: Vec<&str> =
        gates.iter().filter(|g| g.1 != "random-du" && g.2).map(|g| g.0.as_str()).collect();
    out.push(Check::assert(
        "integrable-not-minimal",
        wrongly.is_empty(),
        if wrongly.is_empty() { "xxz and swap gates are not minimal".to_string() } else { wrongly.join(", ") },
    ));
    let random: Vec<_> = gates.iter().filter(|g| g.1 == "random-du").collect();
    if !random.is_empty() {
        let k = random.iter().filter(|g| g.2).count();
        let frac = k as f64 / random.len() as f64;
        out.push(Check::assert(
            "random-minimal-fraction",
            frac >= p.min_minimal_fraction,
            format!("{k}/{} minimal, need {:.2}", random.len(), p.min_minimal_fraction),
        ));
    }
    Ok(())
}

fn global_nu(cfg: &Config, t: &Table, out: &mut Vec<Check>) -> LabResult<()> {
    let p = cfg.global_haar_nu.as_ref().expect("resolved");
    let found = worst(t, |r| {
        let mut z = f64::NEG_INFINITY;
        for (m, s, e) in [("mean_re", "stderr_re", "expected_re"), ("mean_im", "stderr_im", "expected_im")] {
            let dev = (t.f64(r, m)? - t.f64(r, e)?).abs();
            z = z.max(dev - p.sigmas * t.f64(r, s)? - 1e-12);
        }
        Ok(Some(z))
    })?;
    out.push(max_check("entrywise-within-sigmas", 0.0, found));
    let mut trace = 0.0;
    for r in 0..t.len() {
        if t.i64(r, "row")? == t.i64(r, "col")? {
            trace += t.f64(r, "mean_re")?;
        }
    }
    out.push(Check::assert(
        "unit-trace",
        (trace - 1.0).abs() <= cfg.tolerances.exact,
        format!("trace of the mean {trace:.15}"),
    ));
    Ok(())
}
