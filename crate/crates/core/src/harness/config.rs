use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::coeffopt::AdjacencyConstraint;
use crate::error::{Error, Result};
use crate::pointcloud::{NoiseKind, ShapeKind, DEFAULT_IMPULSE_SPREAD};

/// Points in the desk-scale denoising cloud.
pub const DEFAULT_TABLE1_POINTS: usize = 397;
pub const DEFAULT_TRIALS: usize = 50;
/// Sampling ratios `C / N` of the curve experiment.
pub const DEFAULT_RATIOS: [f64; 6] = [0.3, 0.5, 0.7, 0.9, 0.98, 1.0];

/// A denoising method column of the comparison table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "HGSP")]
    Hgsp,
    #[serde(rename = "GSP-TV")]
    GspTv,
    #[serde(rename = "MLS-standin")]
    MlsStandin,
    #[serde(rename = "LR")]
    Lr,
    #[serde(rename = "Noisy")]
    Noisy,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Hgsp, Method::GspTv, Method::MlsStandin, Method::Lr, Method::Noisy];

    pub fn label(self) -> &'static str {
        match self {
            Method::Hgsp => "HGSP",
            Method::GspTv => "GSP-TV",
            Method::MlsStandin => "MLS-standin",
            Method::Lr => "LR",
            Method::Noisy => "Noisy",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::invalid(format!("unknown method '{s}'")))
    }
}

/// The five noise rows of the comparison table. Gaussian parameters are
/// variances, so `N(0, 0.08)` has standard deviation `sqrt(0.08)`.
pub fn table1_noise_rows() -> Vec<NoiseKind> {
    vec![
        NoiseKind::Uniform { lo: -0.03, hi: 0.03 },
        NoiseKind::Uniform { lo: 0.08, hi: 0.16 },
        NoiseKind::Gaussian { mean: 0.0, variance: 0.08 },
        NoiseKind::Gaussian { mean: 0.02, variance: 0.08 },
        NoiseKind::Impulse {
            p: 0.08,
            spread: DEFAULT_IMPULSE_SPREAD,
        },
    ]
}

/// Experiment settings. The JSON file form uses these field names; command
/// line flags override whatever the file sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Cloud file; when absent a synthetic `shape` is generated.
    pub input: Option<PathBuf>,
    pub shape: String,
    /// Cloud size. A larger input file is uniformly subsampled to this size.
    pub points: usize,
    pub noise_rows: Vec<NoiseKind>,
    pub methods: Vec<Method>,
    /// HGSP weights; `None` picks the pipeline default (0.5 / 1 for
    /// denoising, 1e-3 / 1 for fitting a clean cloud).
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub iters: usize,
    pub adjacency: AdjacencyConstraint,
    pub tv_alpha: f64,
    pub lr_alpha: f64,
    pub mls_iterations: usize,
    pub mls_step: f64,
    /// Graph kernel width and squared-distance threshold; `None` uses the
    /// data-adaptive defaults.
    pub delta: Option<f64>,
    pub t: Option<f64>,
    pub ratios: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    /// Record wall-clock runtimes. Off by default so reports are
    /// byte-reproducible.
    pub timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            input: None,
            shape: "sphere".into(),
            points: DEFAULT_TABLE1_POINTS,
            noise_rows: table1_noise_rows(),
            methods: Method::ALL.to_vec(),
            alpha: None,
            beta: None,
            iters: 3,
            adjacency: AdjacencyConstraint::Relax,
            tv_alpha: crate::baselines::DEFAULT_TV_ALPHA,
            lr_alpha: crate::baselines::DEFAULT_LR_ALPHA,
            mls_iterations: crate::baselines::DEFAULT_MLS_ITERATIONS,
            mls_step: crate::baselines::DEFAULT_MLS_STEP,
            delta: None,
            t: None,
            ratios: DEFAULT_RATIOS.to_vec(),
            trials: DEFAULT_TRIALS,
            seed: 0,
            timing: false,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive, got {v}")))
            }
        };
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.points < 2 {
            return Err(Error::Config("points must be at least 2".into()));
        }
        if self.iters == 0 {
            return Err(Error::Config("iters must be at least 1".into()));
        }
        if self.noise_rows.is_empty() || self.methods.is_empty() || self.ratios.is_empty() {
            return Err(Error::Config("noise rows, methods and ratios must be nonempty".into()));
        }
        for kind in &self.noise_rows {
            kind.validate()?;
        }
        for &r in &self.ratios {
            if !(r > 0.0 && r <= 1.0) {
                return Err(Error::Config(format!("ratio {r} outside (0, 1]")));
            }
        }
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta), ("delta", self.delta), ("t", self.t)] {
            if let Some(v) = v {
                positive(name, v)?;
            }
        }
        positive("tv_alpha", self.tv_alpha)?;
        positive("lr_alpha", self.lr_alpha)?;
        if self.mls_iterations == 0 || !(self.mls_step > 0.0 && self.mls_step <= 1.0) {
            return Err(Error::Config("mls needs iterations >= 1 and step in (0, 1]".into()));
        }
        ShapeKind::from_str(&self.shape)?;
        if let Some(p) = &self.input {
            if !p.is_file() {
                return Err(Error::Config(format!("input {} does not exist", p.display())));
            }
        }
        Ok(())
    }
}
