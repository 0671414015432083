use std::sync::{Arc, OnceLock};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::basis::SpectrumBasis;
use crate::error::{Error, Result};

/// Normalized coefficients may exceed 1 or drop below 0 by at most this much.
const SIGMA_SLACK: f64 = 1e-12;

/// Spectrum basis plus normalized frequency coefficients `σ_r = λ_r / λ_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPairs {
    basis: SpectrumBasis,
    sigma: DVector<f64>,
    lambda_max: f64,
}

impl SpectralPairs {
    /// Requires `0 <= σ_r <= 1`, `max σ = 1` and a finite `λ_max >= 0`.
    ///
    /// `λ_max = 0` is accepted so that the all-zero coefficient vector is
    /// representable; operations that divide by `λ_max` reject it.
    pub fn new(basis: SpectrumBasis, sigma: DVector<f64>, lambda_max: f64) -> Result<Self> {
        if sigma.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: sigma.len(),
            });
        }
        if !(lambda_max.is_finite() && lambda_max >= 0.0) {
            return Err(Error::invalid(format!("lambda_max must be finite and >= 0, got {lambda_max}")));
        }
        let mut max = f64::NEG_INFINITY;
        for &s in sigma.iter() {
            if !(s.is_finite() && (-SIGMA_SLACK..=1.0 + SIGMA_SLACK).contains(&s)) {
                return Err(Error::invalid(format!("normalized coefficient {s} outside [0, 1]")));
            }
            max = max.max(s);
        }
        if (max - 1.0).abs() > SIGMA_SLACK {
            return Err(Error::invalid(format!("largest normalized coefficient must be 1, got {max}")));
        }
        let sigma = sigma.map(|s| s.clamp(0.0, 1.0));
        Ok(Self {
            basis,
            sigma,
            lambda_max,
        })
    }

    /// Builds pairs from unnormalized coefficients, `λ_max = max λ_r`.
    pub fn from_lambdas(basis: SpectrumBasis, lambdas: &DVector<f64>) -> Result<Self> {
        let lambda_max = lambdas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if lambda_max <= 0.0 {
            if lambdas.iter().all(|&l| l == 0.0) {
                return Self::new(basis, DVector::from_element(lambdas.len(), 1.0), 0.0);
            }
            return Err(Error::invalid("frequency coefficients must be nonnegative"));
        }
        Self::new(basis, lambdas / lambda_max, lambda_max)
    }

    pub fn basis(&self) -> &SpectrumBasis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn sigma(&self) -> &DVector<f64> {
        &self.sigma
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    /// Unnormalized coefficients `λ_r = σ_r λ_max`.
    pub fn lambdas(&self) -> DVector<f64> {
        &self.sigma * self.lambda_max
    }

    pub fn supporting_matrix(&self) -> SupportingMatrix {
        supporting_matrix(self)
    }
}

/// `P_s = V diag(σ) Vᵀ`, kept in factored form.
///
/// Products are evaluated as `V (σ ∘ (Vᵀ x))`; the dense matrix is only
/// formed on request (and cached), since it costs `O(N³)`.
#[derive(Debug, Clone)]
pub struct SupportingMatrix {
    v: Arc<DMatrix<f64>>,
    sigma: DVector<f64>,
    dense: OnceLock<DMatrix<f64>>,
}

pub fn supporting_matrix(pairs: &SpectralPairs) -> SupportingMatrix {
    SupportingMatrix {
        v: pairs.basis.shared(),
        sigma: pairs.sigma.clone(),
        dense: OnceLock::new(),
    }
}

impl SupportingMatrix {
    pub fn dim(&self) -> usize {
        self.sigma.len()
    }

    /// Eigenvalues of `P_s`, in basis order.
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.sigma
    }

    pub fn basis_matrix(&self) -> &DMatrix<f64> {
        &self.v
    }

    /// `P_s x`
    pub fn apply(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        self.check(x)?;
        let coeffs = self.v.tr_mul(x).component_mul(&self.sigma);
        Ok(&*self.v * coeffs)
    }

    /// `(I - P_s) x`, the Haar-like high-pass filter.
    pub fn apply_highpass(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        Ok(x - self.apply(x)?)
    }

    /// `V diag(g(σ_r)) Vᵀ x` for an arbitrary spectral gain.
    pub fn apply_spectral(&self, x: &DVector<f64>, gain: impl Fn(f64) -> f64) -> Result<DVector<f64>> {
        self.check(x)?;
        let coeffs = self.v.tr_mul(x).zip_map(&self.sigma, |c, s| c * gain(s));
        Ok(&*self.v * coeffs)
    }

    /// Dense symmetric `P_s`, exactly symmetrized.
    pub fn dense(&self) -> &DMatrix<f64> {
        self.dense.get_or_init(|| {
            let mut scaled = (*self.v).clone();
            for (mut col, s) in scaled.column_iter_mut().zip(self.sigma.iter()) {
                col *= *s;
            }
            let p = scaled * self.v.transpose();
            (&p + p.transpose()) * 0.5
        })
    }

    fn check(&self, x: &DVector<f64>) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(())
    }
}

pub const PAIRS_SCHEMA_VERSION: u32 = 1;

/// On-disk form of [`SpectralPairs`]: `V` is stored row-major.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub struct PairsFile {
    pub version: u32,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub lambda_max: f64,
    pub sigma: Vec<f64>,
    #[serde(rename = "V")]
    pub v: Vec<f64>,
    #[serde(default)]
    pub source_rank: usize,
}

impl PairsFile {
    pub fn from_pairs(pairs: &SpectralPairs, order: usize) -> Self {
        let vm = pairs.basis.matrix();
        let n = vm.nrows();
        let mut v = Vec::with_capacity(n * n);
        for i in 0..n {
            v.extend(vm.row(i).iter());
        }
        Self {
            version: PAIRS_SCHEMA_VERSION,
            n,
            m: order,
            lambda_max: pairs.lambda_max,
            sigma: pairs.sigma.iter().copied().collect(),
            v,
            source_rank: pairs.basis.source_rank(),
        }
    }

    pub fn into_pairs(self) -> Result<(SpectralPairs, usize)> {
        if self.version != PAIRS_SCHEMA_VERSION {
            return Err(Error::Config(format!("unsupported pairs schema version {}", self.version)));
        }
        if self.v.len() != self.n * self.n || self.sigma.len() != self.n {
            return Err(Error::Config("pairs file sizes do not match N".into()));
        }
        if self.m < 2 {
            return Err(Error::Config("order M must be at least 2".into()));
        }
        let v = DMatrix::from_row_slice(self.n, self.n, &self.v);
        let basis = SpectrumBasis::from_matrix(v, self.source_rank)?;
        let pairs = SpectralPairs::new(basis, DVector::from_vec(self.sigma), self.lambda_max)?;
        Ok((pairs, self.m))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs_identity(sigma: &[f64]) -> SpectralPairs {
        let n = sigma.len();
        SpectralPairs::new(SpectrumBasis::identity(n), DVector::from_row_slice(sigma), 1.0).unwrap()
    }

    #[test]
    fn diagonal_case() {
        let p = pairs_identity(&[1.0, 0.5]).supporting_matrix();
        let d = p.dense();
        assert_eq!(d, &DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.5]));
    }

    #[test]
    fn all_ones_is_identity() {
        let basis = crate::spectral::random_basis(7, 3);
        let pairs = SpectralPairs::new(basis, DVector::from_element(7, 1.0), 2.0).unwrap();
        let d = pairs.supporting_matrix().dense().clone();
        assert!((d - DMatrix::<f64>::identity(7, 7)).abs().max() < 1e-12);
    }

    #[test]
    fn dense_is_symmetric_and_matches_apply() {
        let pairs = crate::spectral::random_pairs(9, 11);
        let p = pairs.supporting_matrix();
        let d = p.dense();
        assert!((d - d.transpose()).abs().max() <= 1e-12);
        let x = DVector::from_fn(9, |i, _| (i as f64).sin());
        assert!((d * &x - p.apply(&x).unwrap()).abs().max() < 1e-12);
    }

    #[test]
    fn validation() {
        let b = SpectrumBasis::identity(2);
        assert!(SpectralPairs::new(b.clone(), DVector::from_row_slice(&[0.5, 0.5]), 1.0).is_err());
        assert!(SpectralPairs::new(b.clone(), DVector::from_row_slice(&[1.0, -0.1]), 1.0).is_err());
        assert!(SpectralPairs::new(b.clone(), DVector::from_row_slice(&[1.0, 0.1]), -1.0).is_err());
        assert!(SpectralPairs::new(b, DVector::from_row_slice(&[1.0]), 1.0).is_err());
    }

    #[test]
    fn from_lambdas_normalizes() {
        let p = SpectralPairs::from_lambdas(SpectrumBasis::identity(2), &DVector::from_row_slice(&[2.0, 1.0]))
            .unwrap();
        assert_eq!(p.sigma().as_slice(), &[1.0, 0.5]);
        assert_eq!(p.lambda_max(), 2.0);
        let z = SpectralPairs::from_lambdas(SpectrumBasis::identity(2), &DVector::zeros(2)).unwrap();
        assert_eq!(z.lambdas(), DVector::zeros(2));
    }

    #[test]
    fn json_round_trip() {
        let pairs = crate::spectral::random_pairs(5, 4);
        let file = PairsFile::from_pairs(&pairs, 3);
        let text = serde_json::to_string(&file).unwrap();
        assert!(text.contains("\"N\":5") && text.contains("\"M\":3") && text.contains("\"version\":1"));
        let (back, m) = serde_json::from_str::<PairsFile>(&text).unwrap().into_pairs().unwrap();
        assert_eq!(m, 3);
        assert_eq!(back, pairs);
    }
}
