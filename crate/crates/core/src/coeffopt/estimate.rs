use log::{info, warn};
use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::qp::{AdjacencyConstraint, CoeffConfig, QpContext, QpSolution};
use super::system::{build_smoothness_system, SmoothnessSystem};
use crate::error::{Error, Result};
use crate::pointcloud::PointCloud;
use crate::spectral::{estimate_spectrum, SpectralPairs, SpectrumBasis};

/// Up to this size every index is a candidate for the maximal coefficient.
pub const FULL_CANDIDATE_LIMIT: usize = 64;
/// Above [`FULL_CANDIDATE_LIMIT`], the candidates are the indices with the
/// largest data energy `Σ_i (f_rᵀ X_i)²`.
pub const ENERGY_CANDIDATES: usize = 16;

pub fn default_candidates(system: &SmoothnessSystem) -> Vec<usize> {
    let n = system.dim();
    if n <= FULL_CANDIDATE_LIMIT {
        return (0..n).collect();
    }
    let energy = system.energy();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| energy[b].total_cmp(&energy[a]).then(a.cmp(&b)));
    idx.truncate(ENERGY_CANDIDATES);
    idx.sort_unstable();
    idx
}

/// Runs the fixed-max solve for each candidate and keeps the lowest
/// objective (ties to the lowest index), enforcing the adjacency constraint.
pub fn estimate_coefficients(
    cloud: &PointCloud,
    basis: &SpectrumBasis,
    alpha: f64,
    beta: f64,
    candidates: &[usize],
) -> Result<QpSolution> {
    let system = build_smoothness_system(cloud, basis)?;
    let config = CoeffConfig::with_weights(alpha, beta);
    Ok(estimate_with(&system, basis, &config, candidates)?.solution)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientEstimate {
    pub solution: QpSolution,
    /// Set when every candidate was infeasible and the box-only problem was
    /// solved instead.
    pub relaxed: bool,
    pub candidates_tried: usize,
    pub candidates_feasible: usize,
}

pub fn estimate_with(
    system: &SmoothnessSystem,
    basis: &SpectrumBasis,
    config: &CoeffConfig,
    candidates: &[usize],
) -> Result<CoefficientEstimate> {
    if candidates.is_empty() {
        return Err(Error::invalid("candidate set is empty"));
    }
    let mut sorted = candidates.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let ctx = QpContext::new(system, basis, *config)?;

    let mut best_feasible: Option<QpSolution> = None;
    let mut best_any: Option<QpSolution> = None;
    let mut feasible = 0;
    for &c in &sorted {
        let sol = ctx.solve(c)?;
        let better = |cur: &Option<QpSolution>| cur.as_ref().is_none_or(|b| sol.objective < b.objective);
        if sol.is_feasible() {
            feasible += 1;
            if better(&best_feasible) {
                best_feasible = Some(sol.clone());
            }
        }
        if better(&best_any) {
            best_any = Some(sol);
        }
    }
    if let Some(solution) = best_feasible {
        return Ok(CoefficientEstimate {
            solution,
            relaxed: false,
            candidates_tried: sorted.len(),
            candidates_feasible: feasible,
        });
    }
    let best = best_any.expect("at least one candidate");
    if config.adjacency != AdjacencyConstraint::EnforceOrRelax {
        return Err(Error::AllCandidatesInfeasible { best: Box::new(best) });
    }
    warn!(
        "adjacency constraint infeasible for all {} candidates; solving without it",
        sorted.len()
    );
    let relaxed_config = CoeffConfig {
        adjacency: AdjacencyConstraint::Relax,
        ..*config
    };
    let relaxed_ctx = QpContext::new(system, basis, relaxed_config)?;
    let mut best: Option<QpSolution> = None;
    for &c in &sorted {
        let sol = relaxed_ctx.solve(c)?;
        if best.as_ref().is_none_or(|b| sol.objective < b.objective) {
            best = Some(sol);
        }
    }
    Ok(CoefficientEstimate {
        solution: best.expect("at least one candidate"),
        relaxed: true,
        candidates_tried: sorted.len(),
        candidates_feasible: 0,
    })
}

/// Result of the end-to-end hypergraph estimation of one cloud.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub pairs: SpectralPairs,
    pub estimate: CoefficientEstimate,
}

/// Scale attached to fitted pairs; the normalized problem does not
/// determine `λ_max`.
pub const DEFAULT_LAMBDA_MAX: f64 = 1.0;

/// Spectrum estimation followed by coefficient estimation over the default
/// candidate set.
pub fn fit_hypergraph(cloud: &PointCloud, config: &CoeffConfig) -> Result<FitResult> {
    let basis = estimate_spectrum(cloud);
    let system = build_smoothness_system(cloud, &basis)?;
    let candidates = default_candidates(&system);
    let estimate = estimate_with(&system, &basis, config, &candidates)?;
    info!(
        "fitted coefficients: forced index {}, objective {:.6e}, relaxed {}",
        estimate.solution.forced_index, estimate.solution.objective, estimate.relaxed
    );
    let sigma = DVector::from_column_slice(&estimate.solution.sigma);
    let pairs = SpectralPairs::new(basis, sigma, DEFAULT_LAMBDA_MAX)?;
    Ok(FitResult { pairs, estimate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    #[test]
    fn zero_data_tie_break() {
        let cloud = PointCloud::new(DMatrix::zeros(3, 3)).unwrap();
        let basis = SpectrumBasis::identity(3);
        let sol = estimate_coefficients(&cloud, &basis, 1e-3, 2.0, &[0, 1, 2]).unwrap();
        assert_eq!(sol.forced_index, 0);
        assert_eq!(sol.objective, 2.0);
    }

    #[test]
    fn singleton_matches_direct_solve() {
        let cloud = PointCloud::from_points(&[[0.1, 0.2, 0.3], [0.5, 0.1, 0.0], [0.2, 0.2, 0.9], [0.0, 0.3, 0.1]])
            .unwrap();
        let basis = SpectrumBasis::identity(4);
        let sys = build_smoothness_system(&cloud, &basis).unwrap();
        let direct = super::super::solve_qp_fixed_max(&sys, &basis, 2, 0.5, 1.0).unwrap();
        let looped = estimate_coefficients(&cloud, &basis, 0.5, 1.0, &[2]).unwrap();
        assert_eq!(direct, looped);
    }

    #[test]
    fn empty_candidates_rejected() {
        let cloud = PointCloud::new(DMatrix::zeros(2, 3)).unwrap();
        assert!(estimate_coefficients(&cloud, &SpectrumBasis::identity(2), 1.0, 1.0, &[]).is_err());
    }
}
