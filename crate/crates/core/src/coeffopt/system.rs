use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::pointcloud::PointCloud;
use crate::spectral::SpectrumBasis;

/// Smoothness data for one cloud on one basis.
///
/// `W_i` has column `r` equal to `(f_rᵀ X_i) f_r`, so `W_i σ = V (c_i ∘ σ)`
/// with `c_i = Vᵀ X_i`. Only the coefficient vectors `c_i` are stored.
#[derive(Debug, Clone)]
pub struct SmoothnessSystem {
    v: Arc<DMatrix<f64>>,
    signals: [DVector<f64>; 3],
    coeffs: [DVector<f64>; 3],
}

pub fn build_smoothness_system(cloud: &PointCloud, basis: &SpectrumBasis) -> Result<SmoothnessSystem> {
    if cloud.len() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: cloud.len(),
        });
    }
    let signals = cloud.columns();
    let coeffs = [
        basis.analyze(&signals[0]),
        basis.analyze(&signals[1]),
        basis.analyze(&signals[2]),
    ];
    Ok(SmoothnessSystem {
        v: basis.shared(),
        signals,
        coeffs,
    })
}

impl SmoothnessSystem {
    pub fn dim(&self) -> usize {
        self.v.nrows()
    }

    pub fn signal(&self, i: usize) -> &DVector<f64> {
        &self.signals[i]
    }

    /// `c_i = Vᵀ X_i`
    pub fn coefficients(&self, i: usize) -> &DVector<f64> {
        &self.coeffs[i]
    }

    /// Dense `W_i`.
    pub fn w_matrix(&self, i: usize) -> DMatrix<f64> {
        let mut w = (*self.v).clone();
        for (mut col, c) in w.column_iter_mut().zip(self.coeffs[i].iter()) {
            col *= *c;
        }
        w
    }

    /// `e_r = Σ_i (f_rᵀ X_i)²`
    pub fn energy(&self) -> DVector<f64> {
        self.coeffs[0].component_mul(&self.coeffs[0])
            + self.coeffs[1].component_mul(&self.coeffs[1])
            + self.coeffs[2].component_mul(&self.coeffs[2])
    }

    /// `Σ_i ‖X_i - W_i σ‖²`, evaluated directly.
    pub fn smooth(&self, sigma: &DVector<f64>) -> Result<f64> {
        if sigma.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: sigma.len(),
            });
        }
        let mut total = 0.0;
        for i in 0..3 {
            let fitted = &*self.v * self.coeffs[i].component_mul(sigma);
            total += (&self.signals[i] - fitted).norm_squared();
        }
        Ok(total)
    }
}

/// Diagonal form of the normalized coefficient objective
/// `α Σ_i ‖X_i - W_i σ‖² + β σᵀσ = α Σ_r e_r (1 - σ_r)² + β Σ_r σ_r²`,
/// exact because `V` is orthonormal and complete.
#[derive(Debug, Clone)]
pub(crate) struct DiagonalObjective {
    pub energy: DVector<f64>,
    pub alpha: f64,
    pub beta: f64,
}

impl DiagonalObjective {
    pub fn new(system: &SmoothnessSystem, alpha: f64, beta: f64) -> Self {
        Self {
            energy: system.energy(),
            alpha,
            beta,
        }
    }

    pub fn value(&self, sigma: &DVector<f64>) -> f64 {
        self.energy
            .iter()
            .zip(sigma.iter())
            .map(|(e, s)| self.alpha * e * (1.0 - s).powi(2) + self.beta * s * s)
            .sum()
    }

    /// Curvature `h_r = 2(α e_r + β)`.
    pub fn curvature(&self, r: usize) -> f64 {
        2.0 * (self.alpha * self.energy[r] + self.beta)
    }

    /// Linear coefficient `b_r = 2 α e_r` (objective `½ h σ² - b σ + const`).
    pub fn linear(&self, r: usize) -> f64 {
        2.0 * self.alpha * self.energy[r]
    }

    /// Box-only minimizer with `σ_forced = 1`.
    pub fn box_optimum(&self, forced: usize) -> DVector<f64> {
        let mut s = DVector::from_fn(self.energy.len(), |r, _| {
            let ae = self.alpha * self.energy[r];
            if ae + self.beta > 0.0 {
                ae / (ae + self.beta)
            } else {
                0.0
            }
        });
        s[forced] = 1.0;
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointcloud::{generate_shape, ShapeKind, ShapeParams};
    use crate::spectral::{estimate_spectrum, random_basis};

    #[test]
    fn zero_data() {
        let cloud = PointCloud::new(DMatrix::zeros(4, 3)).unwrap();
        let sys = build_smoothness_system(&cloud, &SpectrumBasis::identity(4)).unwrap();
        for i in 0..3 {
            assert!(sys.w_matrix(i).iter().all(|&w| w == 0.0));
        }
        assert_eq!(sys.smooth(&DVector::from_element(4, 0.3)).unwrap(), 0.0);
    }

    #[test]
    fn identity_basis_expansion() {
        let cloud = PointCloud::from_points(&[[1.0, 2.0, -1.0], [0.5, 0.0, 3.0], [2.0, -2.0, 0.1]]).unwrap();
        let sys = build_smoothness_system(&cloud, &SpectrumBasis::identity(3)).unwrap();
        for i in 0..3 {
            assert_eq!(sys.w_matrix(i), DMatrix::from_diagonal(&cloud.column(i)));
        }
        let sigma = DVector::from_row_slice(&[0.2, 1.0, 0.7]);
        let mut expect = 0.0f64;
        for i in 0..3 {
            for n in 0..3 {
                expect += cloud.coords()[(n, i)].powi(2) * (1.0f64 - sigma[n]).powi(2);
            }
        }
        assert!((sys.smooth(&sigma).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn columns_have_coefficient_norm() {
        let cloud = generate_shape(ShapeKind::Cube, 12, &ShapeParams::default(), 1).unwrap();
        let basis = random_basis(12, 2);
        let sys = build_smoothness_system(&cloud, &basis).unwrap();
        let w = sys.w_matrix(1);
        for r in 0..12 {
            assert!((w.column(r).norm() - sys.coefficients(1)[r].abs()).abs() < 1e-12);
        }
    }

    #[test]
    fn diagonal_form_matches_direct() {
        let cloud = generate_shape(ShapeKind::Cylinder, 30, &ShapeParams::default(), 4).unwrap();
        let basis = estimate_spectrum(&cloud);
        let sys = build_smoothness_system(&cloud, &basis).unwrap();
        let obj = DiagonalObjective::new(&sys, 0.3, 1.2);
        let sigma = DVector::from_fn(30, |r, _| (r as f64 * 0.37).fract());
        let direct = 0.3 * sys.smooth(&sigma).unwrap() + 1.2 * sigma.norm_squared();
        assert!((obj.value(&sigma) - direct).abs() < 1e-10 * direct.max(1.0));
        // spanned directions reproduce the data exactly at σ = 1
        let ones = DVector::from_element(30, 1.0);
        assert!(sys.smooth(&ones).unwrap() < 1e-20);
    }
}
