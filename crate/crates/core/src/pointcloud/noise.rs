use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::PointCloud;
use crate::error::{Error, Result};
use crate::rng;

pub const DEFAULT_IMPULSE_SPREAD: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NoiseKind {
    /// Independent `U(lo, hi)` offset per coordinate.
    Uniform { lo: f64, hi: f64 },
    /// Independent `N(mean, variance)` offset per coordinate.
    Gaussian { mean: f64, variance: f64 },
    /// Each point is hit with probability `p`; a hit point moves by an offset
    /// drawn uniformly from `[-spread, spread]^3`.
    Impulse { p: f64, spread: f64 },
}

impl NoiseKind {
    pub fn label(&self) -> String {
        match *self {
            NoiseKind::Uniform { lo, hi } => format!("Uniform~U({lo},{hi})"),
            NoiseKind::Gaussian { mean, variance } => format!("Gaussian~N({mean},{variance})"),
            NoiseKind::Impulse { p, .. } => format!("Impulse(p={p})"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |v: f64, name: &str| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(format!("{name} must be finite")))
            }
        };
        match *self {
            NoiseKind::Uniform { lo, hi } => {
                finite(lo, "lo")?;
                finite(hi, "hi")?;
                if lo >= hi {
                    return Err(Error::invalid(format!("uniform noise needs lo < hi ({lo} >= {hi})")));
                }
            }
            NoiseKind::Gaussian { mean, variance } => {
                finite(mean, "mean")?;
                finite(variance, "variance")?;
                if variance < 0.0 {
                    return Err(Error::invalid("gaussian variance must be >= 0"));
                }
            }
            NoiseKind::Impulse { p, spread } => {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::invalid("impulse probability must lie in [0, 1]"));
                }
                finite(spread, "spread")?;
                if spread <= 0.0 {
                    return Err(Error::invalid("impulse spread must be > 0"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    #[serde(flatten)]
    pub kind: NoiseKind,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(kind: NoiseKind, seed: u64) -> Self {
        Self { kind, seed }
    }
}

/// Returns `cloud` plus a seeded perturbation.
///
/// Draw order is fixed (row-major over points, x then y then z) so the same
/// spec and input always give bit-identical output.
pub fn add_noise(cloud: &PointCloud, spec: &NoiseSpec) -> Result<PointCloud> {
    spec.kind.validate()?;
    let n = cloud.len();
    let mut rng = rng::seeded(spec.seed);
    let mut offsets = DMatrix::<f64>::zeros(n, 3);
    match spec.kind {
        NoiseKind::Uniform { lo, hi } => {
            for i in 0..n {
                for j in 0..3 {
                    offsets[(i, j)] = rng.random_range(lo..=hi);
                }
            }
        }
        NoiseKind::Gaussian { mean, variance } => {
            let dist = Normal::new(mean, variance.sqrt())
                .map_err(|e| Error::invalid(format!("gaussian noise: {e}")))?;
            for i in 0..n {
                for j in 0..3 {
                    offsets[(i, j)] = dist.sample(&mut rng);
                }
            }
        }
        NoiseKind::Impulse { p, spread } => {
            for i in 0..n {
                if rng.random_bool(p) {
                    for j in 0..3 {
                        offsets[(i, j)] = rng.random_range(-spread..=spread);
                    }
                }
            }
        }
    }
    PointCloud::new(cloud.coords() + offsets)
}
