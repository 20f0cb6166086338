//! JSON experiment configuration.
//!
//! ```json
//! {
//!   "schemes": ["ivi", "resolvent_ivi", "population"],
//!   "kernel": { "family": "gamma", "params": { "c": 8.1, "b": 3.0, "alpha": 2.0 } },
//!   "baseline": { "mu": 5.0 },
//!   "horizon": 1.0,
//!   "steps": [32, 128, 512],
//!   "paths": 100000,
//!   "seed": 7,
//!   "outputs": { "laplace": { "w": [-0.2], "reference_mean": true }, "marginals": true }
//! }
//! ```

use std::path::PathBuf;

use hawkes_core::baselines::DEFAULT_SINGULAR_EPSILON;
use hawkes_core::{Baseline, KernelSpec, Variant};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Grid variants (`ivi`, `resolvent_ivi`, `explicit`, `markov_ivi`,
    /// `multifactor_ivi`) and exact samplers (`population`, `ogata`).
    pub schemes: Vec<String>,
    pub kernel: KernelConfig,
    pub baseline: BaselineConfig,
    pub horizon: f64,
    /// Step counts for the grid schemes; ignored by the exact samplers.
    #[serde(default)]
    pub steps: Vec<usize>,
    pub paths: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub outputs: OutputsConfig,
    /// Scheme that the others are compared against. Defaults to
    /// `population` when it is listed, otherwise the first scheme.
    #[serde(default)]
    pub reference: Option<String>,
    /// Kernel shift for Ogata's method on singular kernels.
    #[serde(default = "default_epsilon")]
    pub ogata_epsilon: f64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

fn default_epsilon() -> f64 {
    DEFAULT_SINGULAR_EPSILON
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "family",
    content = "params",
    rename_all = "snake_case",
    deny_unknown_fields
)]
pub enum KernelConfig {
    Zero,
    Exponential {
        c: f64,
        b: f64,
    },
    /// Give either `alpha` or the Hurst index `hurst` (`alpha = hurst + 1/2`).
    Fractional {
        c: f64,
        #[serde(default)]
        alpha: Option<f64>,
        #[serde(default)]
        hurst: Option<f64>,
    },
    Gamma {
        c: f64,
        b: f64,
        alpha: f64,
    },
    MittagLeffler {
        c: f64,
        lambda: f64,
        alpha: f64,
    },
    TemperedMittagLeffler {
        c: f64,
        lambda: f64,
        b: f64,
        alpha: f64,
    },
    SumOfExponentials {
        c: Vec<f64>,
        b: Vec<f64>,
    },
}

impl KernelConfig {
    pub fn build(&self) -> Result<KernelSpec, CliError> {
        let spec = match self {
            Self::Zero => Ok(KernelSpec::zero()),
            Self::Exponential { c, b } => KernelSpec::exponential(*c, *b),
            Self::Fractional { c, alpha, hurst } => match (alpha, hurst) {
                (Some(a), None) => KernelSpec::fractional(*c, *a),
                (None, Some(h)) => KernelSpec::fractional_hurst(*c, *h),
                _ => {
                    return Err(field(
                        "kernel.params",
                        "give exactly one of alpha and hurst",
                    ))
                }
            },
            Self::Gamma { c, b, alpha } => KernelSpec::gamma(*c, *b, *alpha),
            Self::MittagLeffler { c, lambda, alpha } => {
                KernelSpec::mittag_leffler(*c, *lambda, *alpha)
            }
            Self::TemperedMittagLeffler {
                c,
                lambda,
                b,
                alpha,
            } => KernelSpec::tempered_mittag_leffler(*c, *lambda, *b, *alpha),
            Self::SumOfExponentials { c, b } => {
                KernelSpec::sum_of_exponentials(c.clone(), b.clone())
            }
        };
        spec.map_err(|e| field("kernel.params", e))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaselineConfig {
    /// Constant exogenous rate.
    pub mu: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsConfig {
    #[serde(default)]
    pub laplace: Option<LaplaceConfig>,
    /// Two-sample tests against the reference and per-path terminal values.
    #[serde(default)]
    pub marginals: bool,
    #[serde(default)]
    pub time_change: Option<TimeChangeConfig>,
    /// Write `timing.csv`.
    #[serde(default)]
    pub timing: bool,
    /// Path indices written as trajectory files.
    #[serde(default)]
    pub trajectories: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaplaceConfig {
    #[serde(default)]
    pub w: Vec<f64>,
    /// Also evaluate at `w = -1 / E[N_T]`, with the mean taken from the
    /// reference scheme.
    #[serde(default)]
    pub reference_mean: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeChangeConfig {
    /// Number of paths (`0..paths`) that are tested.
    #[serde(default = "one")]
    pub paths: usize,
    /// Significance level used for the reported pass rate.
    #[serde(default = "five_percent")]
    pub level: f64,
}

fn one() -> usize {
    1
}

fn five_percent() -> f64 {
    0.05
}

impl Default for TimeChangeConfig {
    fn default() -> Self {
        Self {
            paths: 1,
            level: 0.05,
        }
    }
}

/// How a scheme name is simulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Grid(Variant),
    Population,
    Ogata,
}

impl Method {
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "population" => Some(Self::Population),
            "ogata" => Some(Self::Ogata),
            _ => Variant::from_name(name).map(Self::Grid),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Grid(v) => v.name(),
            Self::Population => "population",
            Self::Ogata => "ogata",
        }
    }

    pub fn is_exact(self) -> bool {
        !matches!(self, Self::Grid(_))
    }
}

/// A configuration that passed validation, with the kernel built.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub methods: Vec<Method>,
    pub reference: Method,
    pub kernel: KernelSpec,
    pub baseline: Baseline,
}

fn field(name: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{name}: {msg}"))
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }

    pub fn validate(self) -> Result<Experiment, CliError> {
        if self.schemes.is_empty() {
            return Err(field("schemes", "at least one scheme is required"));
        }
        let mut methods = Vec::with_capacity(self.schemes.len());
        for name in &self.schemes {
            let m = Method::from_name(name)
                .ok_or_else(|| field("schemes", format!("unknown scheme '{name}'")))?;
            if methods.contains(&m) {
                return Err(field("schemes", format!("'{name}' is listed twice")));
            }
            methods.push(m);
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(field(
                "horizon",
                format!("must be positive and finite, got {}", self.horizon),
            ));
        }
        if self.paths == 0 {
            return Err(field("paths", "must be at least 1"));
        }
        if methods.iter().any(|m| !m.is_exact()) {
            if self.steps.is_empty() {
                return Err(field("steps", "grid schemes need at least one step count"));
            }
            if self.steps.contains(&0) {
                return Err(field("steps", "step counts must be positive"));
            }
        }
        if let Some(l) = &self.outputs.laplace {
            if let Some(w) = l.w.iter().find(|w| !(**w <= 0.0 && w.is_finite())) {
                return Err(field(
                    "outputs.laplace.w",
                    format!("must be nonpositive, got {w}"),
                ));
            }
        }
        if let Some(tc) = &self.outputs.time_change {
            if tc.paths == 0 || tc.paths > self.paths {
                return Err(field("outputs.time_change.paths", "must lie in 1..=paths"));
            }
            if !(tc.level > 0.0 && tc.level < 1.0) {
                return Err(field("outputs.time_change.level", "must lie in (0, 1)"));
            }
        }
        if let Some(i) = self.outputs.trajectories.iter().find(|i| **i >= self.paths) {
            return Err(field(
                "outputs.trajectories",
                format!("path index {i} is not below paths"),
            ));
        }
        if !(self.ogata_epsilon >= 0.0 && self.ogata_epsilon.is_finite()) {
            return Err(field("ogata_epsilon", "must be nonnegative"));
        }
        let reference = match &self.reference {
            Some(name) => {
                let m = Method::from_name(name)
                    .ok_or_else(|| field("reference", format!("unknown scheme '{name}'")))?;
                if !methods.contains(&m) {
                    return Err(field(
                        "reference",
                        format!("'{name}' is not among the schemes"),
                    ));
                }
                m
            }
            None if methods.contains(&Method::Population) => Method::Population,
            None => methods[0],
        };
        let kernel = self.kernel.build()?;
        let baseline = Baseline::constant(self.baseline.mu).map_err(|e| field("baseline.mu", e))?;
        Ok(Experiment {
            config: self,
            methods,
            reference,
            kernel,
            baseline,
        })
    }
}
