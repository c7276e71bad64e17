//! Experiment configuration files.
//!
//! A config is a TOML document with the experiment name, a seed and an
//! optional table named after the experiment:
//!
//! ```toml
//! experiment = "xxz-decay"
//! seed = 3
//!
//! [xxz-decay]
//! couplings = [0.39269908169872414]
//! steps = [2, 4, 6, 8]
//! ```
//!
//! Missing keys take the defaults below. The resolved config is echoed in the
//! JSON sidecar of every record.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, LabResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    SwapCase,
    HaarBoundSweep,
    XxzDecay,
    DuCrosscheck,
    Concentration,
    ChaoticDiagnostic,
    GlobalHaarNu,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::SwapCase,
        ExperimentKind::HaarBoundSweep,
        ExperimentKind::XxzDecay,
        ExperimentKind::DuCrosscheck,
        ExperimentKind::Concentration,
        ExperimentKind::ChaoticDiagnostic,
        ExperimentKind::GlobalHaarNu,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::SwapCase => "swap-case",
            ExperimentKind::HaarBoundSweep => "haar-bound-sweep",
            ExperimentKind::XxzDecay => "xxz-decay",
            ExperimentKind::DuCrosscheck => "du-crosscheck",
            ExperimentKind::Concentration => "concentration",
            ExperimentKind::ChaoticDiagnostic => "chaotic-diagnostic",
            ExperimentKind::GlobalHaarNu => "global-haar-nu",
        }
    }

    pub fn summary(self) -> &'static str {
        match self {
            ExperimentKind::SwapCase => "SWAP brickwork: G is -1/(d_A^2-1) on the side holding V_t and 1 elsewhere",
            ExperimentKind::HaarBoundSweep => "Haar brickwork: exact G against the geometric and Renyi-2 bounds",
            ExperimentKind::XxzDecay => "XXZ brickwork: dense G, closed form, transfer purity and decay fits",
            ExperimentKind::DuCrosscheck => "random dual-unitary gates: channel formula against dense evolution",
            ExperimentKind::Concentration => "single-probe OTOC tails against the concentration bound",
            ExperimentKind::ChaoticDiagnostic => "eigenvalue-one dimensions of the replica transfer matrix",
            ExperimentKind::GlobalHaarNu => "mean Choi projector under global Haar dynamics",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Pauli coefficients `(a_x, a_y, a_z)` of the initial operator.
pub type Probe = [f64; 3];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct SwapCase {
    pub max_steps: usize,
    pub chain_length: Option<usize>,
    pub probe: Probe,
    pub mc_samples: usize,
    /// Monte-Carlo columns are filled for regions of at most this many sites.
    pub mc_max_sites: usize,
}

impl Default for SwapCase {
    fn default() -> Self {
        SwapCase { max_steps: 4, chain_length: None, probe: [0.0, 0.0, 1.0], mc_samples: 200, mc_max_sites: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct HaarBoundSweep {
    pub gate_seeds: Vec<u64>,
    pub homogeneous: bool,
    pub max_steps: usize,
    pub boundary: i32,
    pub chain_length: Option<usize>,
    pub probe: Probe,
    pub mc_samples: usize,
    pub mc_max_sites: usize,
}

impl Default for HaarBoundSweep {
    fn default() -> Self {
        HaarBoundSweep {
            gate_seeds: vec![0, 1, 2, 3, 4],
            homogeneous: true,
            max_steps: 4,
            boundary: 0,
            chain_length: None,
            probe: [0.0, 0.0, 1.0],
            mc_samples: 400,
            mc_max_sites: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct XxzDecay {
    pub couplings: Vec<f64>,
    pub probe: Probe,
    pub boundary: i32,
    pub steps: Vec<usize>,
    /// Dense evolution is run up to this many half steps.
    pub dense_max_steps: usize,
    /// Left end of the fixed region `[region_lo, boundary]`; defaults to the
    /// left lightcone edge at the largest step.
    pub region_lo: Option<i32>,
}

impl Default for XxzDecay {
    fn default() -> Self {
        XxzDecay {
            couplings: vec![PI / 8.0, 0.3],
            probe: [1.0, 0.0, 0.0],
            boundary: 0,
            steps: vec![2, 4, 6, 8],
            dense_max_steps: 4,
            region_lo: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct DuCrosscheck {
    pub gates: usize,
    pub max_steps: usize,
    /// Random unit Pauli vector per gate; otherwise `probe` for every gate.
    pub random_probe: bool,
    pub probe: Probe,
}

impl Default for DuCrosscheck {
    fn default() -> Self {
        DuCrosscheck { gates: 10, max_steps: 4, random_probe: true, probe: [1.0, 0.0, 0.0] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Concentration {
    pub steps: usize,
    pub region_sizes: Vec<usize>,
    pub epsilons: Vec<f64>,
    pub samples: usize,
    pub probe: Probe,
}

impl Default for Concentration {
    fn default() -> Self {
        Concentration {
            steps: 3,
            region_sizes: vec![2, 3, 4],
            epsilons: vec![0.25, 0.5],
            samples: 5000,
            probe: [1.0, 0.0, 0.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct ChaoticDiagnostic {
    pub xxz_couplings: Vec<f64>,
    pub include_swap: bool,
    pub random_gates: usize,
    pub s_max: usize,
    /// Fraction of random gates that must come out minimal.
    pub min_minimal_fraction: f64,
}

impl Default for ChaoticDiagnostic {
    fn default() -> Self {
        ChaoticDiagnostic {
            xxz_couplings: vec![PI / 8.0, 0.3],
            include_swap: true,
            random_gates: 5,
            s_max: 2,
            min_minimal_fraction: 0.8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct GlobalHaarNu {
    pub qubits: usize,
    pub samples: usize,
    pub probe: Probe,
    /// Entries must lie within this many standard errors of the prediction.
    pub sigmas: f64,
}

impl Default for GlobalHaarNu {
    fn default() -> Self {
        GlobalHaarNu { qubits: 3, samples: 500, probe: [0.0, 0.0, 1.0], sigmas: 5.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Tolerances {
    /// Agreement between exact contractions.
    pub exact: f64,
    /// Slack on the bound inequalities.
    pub bound: f64,
    /// Deviations in the SWAP case.
    pub swap: f64,
    /// Relative tolerance on fitted decay rates.
    pub rate: f64,
    pub min_r_squared: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { exact: 1e-9, bound: 1e-8, swap: 1e-12, rate: 0.05, min_r_squared: 0.99 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Config {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub swap_case: Option<SwapCase>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub haar_bound_sweep: Option<HaarBoundSweep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xxz_decay: Option<XxzDecay>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub du_crosscheck: Option<DuCrosscheck>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub concentration: Option<Concentration>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chaotic_diagnostic: Option<ChaoticDiagnostic>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub global_haar_nu: Option<GlobalHaarNu>,
}

impl Config {
    /// Defaults for `kind` with its parameter table filled in.
    pub fn new(kind: ExperimentKind, seed: u64) -> Self {
        let cfg = Config {
            experiment: kind,
            seed,
            tolerances: Tolerances::default(),
            swap_case: None,
            haar_bound_sweep: None,
            xxz_decay: None,
            du_crosscheck: None,
            concentration: None,
            chaotic_diagnostic: None,
            global_haar_nu: None,
        };
        cfg.resolved()
    }

    pub fn from_toml(text: &str) -> LabResult<Self> {
        let cfg: Config = toml::from_str(text).map_err(|e| LabError::Parse(e.to_string()))?;
        cfg.check_sections()?;
        Ok(cfg.resolved())
    }

    pub fn load(path: &Path) -> LabResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            LabError::Parse(msg) => LabError::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Only the table of the selected experiment may be present.
    fn check_sections(&self) -> LabResult<()> {
        let present = [
            (ExperimentKind::SwapCase, self.swap_case.is_some()),
            (ExperimentKind::HaarBoundSweep, self.haar_bound_sweep.is_some()),
            (ExperimentKind::XxzDecay, self.xxz_decay.is_some()),
            (ExperimentKind::DuCrosscheck, self.du_crosscheck.is_some()),
            (ExperimentKind::Concentration, self.concentration.is_some()),
            (ExperimentKind::ChaoticDiagnostic, self.chaotic_diagnostic.is_some()),
            (ExperimentKind::GlobalHaarNu, self.global_haar_nu.is_some()),
        ];
        for (kind, there) in present {
            if there && kind != self.experiment {
                return Err(LabError::Usage(format!(
                    "config selects '{}' but has a [{}] table",
                    self.experiment, kind
                )));
            }
        }
        Ok(())
    }

    fn resolved(mut self) -> Self {
        match self.experiment {
            ExperimentKind::SwapCase => {
                self.swap_case.get_or_insert_with(Default::default);
            }
            ExperimentKind::HaarBoundSweep => {
                self.haar_bound_sweep.get_or_insert_with(Default::default);
            }
            ExperimentKind::XxzDecay => {
                self.xxz_decay.get_or_insert_with(Default::default);
            }
            ExperimentKind::DuCrosscheck => {
                self.du_crosscheck.get_or_insert_with(Default::default);
            }
            ExperimentKind::Concentration => {
                self.concentration.get_or_insert_with(Default::default);
            }
            ExperimentKind::ChaoticDiagnostic => {
                self.chaotic_diagnostic.get_or_insert_with(Default::default);
            }
            ExperimentKind::GlobalHaarNu => {
                self.global_haar_nu.get_or_insert_with(Default::default);
            }
        }
        self
    }
}
