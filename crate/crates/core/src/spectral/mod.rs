//! Hypergraph spectrum estimation, the supporting matrix, total variation
//! and the hypergraph Fourier transform pair.

mod basis;
mod pairs;
mod transform;

pub use basis::{
    centered_signals, covariance, estimate_spectrum, orthonormality_deviation, SpectrumBasis,
    COMPLETION_SKIP_NORM, ORTHONORMAL_TOLERANCE, RANK_TOLERANCE,
};
pub use pairs::{supporting_matrix, PairsFile, SpectralPairs, SupportingMatrix, PAIRS_SCHEMA_VERSION};
pub use transform::{
    hgft, ihgft, order_by_frequency, total_variation_component, total_variation_signal,
    HgftCoefficients,
};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::rng;

/// Haar-distributed random orthonormal basis (QR of a Gaussian matrix with
/// the `R` diagonal signs folded into `Q`).
pub fn random_basis(n: usize, seed: u64) -> SpectrumBasis {
    let mut rng = rng::seeded(seed);
    let g = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for (c, mut col) in q.column_iter_mut().enumerate() {
        if r[(c, c)] < 0.0 {
            col.neg_mut();
        }
    }
    SpectrumBasis::from_matrix(q, n.min(3)).expect("QR factor is orthonormal")
}

/// Random pairs: Haar basis, `σ_r ~ U(0, 1)` with one random entry set to 1,
/// `λ_max ~ U(0.5, 2)`.
pub fn random_pairs(n: usize, seed: u64) -> SpectralPairs {
    let basis = random_basis(n, seed);
    let mut rng = rng::seeded(seed ^ 0x5EED_0F_5167A);
    let mut sigma = DVector::from_fn(n, |_, _| rng.random_range(0.0..1.0));
    sigma[rng.random_range(0..n)] = 1.0;
    let lambda_max = rng.random_range(0.5..2.0);
    SpectralPairs::new(basis, sigma, lambda_max).expect("valid by construction")
}
