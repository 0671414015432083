//! Joint hypergraph estimation and point-cloud denoising.
//!
//! Each outer iteration fits normalized coefficients on the current
//! observation, denoises every coordinate with the spectral filter
//! `[I + α (I - P_s)ᵀ (I - P_s)]⁻¹`, then re-estimates the spectrum from the
//! denoised cloud.

use log::{debug, info};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::coeffopt::{
    build_smoothness_system, default_candidates, estimate_with, most_violated_triples, AdjacencyConstraint,
    CoeffConfig, SmoothnessSystem, DEFAULT_CUT_BUDGET, DEFAULT_MAX_ROUNDS, DEFAULT_LAMBDA_MAX,
};
use crate::error::{Error, Result};
use crate::pointcloud::PointCloud;
use crate::spectral::{estimate_spectrum, SpectralPairs, SupportingMatrix};

/// Relative residual bound for the per-coordinate linear solves.
pub const SOLVE_RESIDUAL_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DenoiseConfig {
    pub alpha: f64,
    pub beta: f64,
    pub outer_iters: usize,
    pub trace: bool,
    pub adjacency: AdjacencyConstraint,
    pub cut_budget: usize,
    pub max_rounds: usize,
    /// Stop once `‖Y_new - Y_old‖_max` falls below this; `None` runs every
    /// iteration.
    pub early_stop: Option<f64>,
}

impl Default for DenoiseConfig {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            beta: 1.0,
            outer_iters: 3,
            trace: true,
            adjacency: AdjacencyConstraint::EnforceOrRelax,
            cut_budget: DEFAULT_CUT_BUDGET,
            max_rounds: DEFAULT_MAX_ROUNDS,
            early_stop: None,
        }
    }
}

impl DenoiseConfig {
    pub fn validate(&self) -> Result<()> {
        self.coeff_config().validate()?;
        if self.outer_iters == 0 {
            return Err(Error::invalid("outer_iters must be at least 1"));
        }
        if let Some(tol) = self.early_stop {
            if !(tol.is_finite() && tol > 0.0) {
                return Err(Error::invalid("early-stop tolerance must be positive"));
            }
        }
        Ok(())
    }

    fn coeff_config(&self) -> CoeffConfig {
        CoeffConfig {
            alpha: self.alpha,
            beta: self.beta,
            adjacency: self.adjacency,
            cut_budget: self.cut_budget,
            max_rounds: self.max_rounds,
        }
    }
}

/// Closed-form solve of `min_Y ‖X_i - Y_i‖² + α ‖(I - P_s) Y_i‖²` per coordinate.
#[derive(Debug, Clone)]
pub struct ClosedFormSolve {
    pub denoised: PointCloud,
    /// `‖[I + α (I-P_s)ᵀ(I-P_s)] Y_i - X_i‖ / ‖X_i‖` per coordinate.
    pub relative_residuals: [f64; 3],
}

/// `Y_i = [I + α (I - P_s)ᵀ (I - P_s)]⁻¹ X_i` for each coordinate.
///
/// `P_s = V diag(σ) Vᵀ` shares its eigenvectors with the system matrix, so
/// the SPD system is diagonalized by `V` and solved as
/// `Y_i = V diag(1 / (1 + α (1 - σ_r)²)) Vᵀ X_i`. The residual is then
/// checked against the operator applied directly.
pub fn denoise_closed_form(x: &PointCloud, p: &SupportingMatrix, alpha: f64) -> Result<PointCloud> {
    Ok(denoise_closed_form_checked(x, p, alpha)?.denoised)
}

pub fn denoise_closed_form_checked(x: &PointCloud, p: &SupportingMatrix, alpha: f64) -> Result<ClosedFormSolve> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::invalid(format!("alpha must be positive, got {alpha}")));
    }
    if x.len() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: x.len(),
        });
    }
    let mut cols = x.columns();
    let mut residuals = [0.0; 3];
    for (i, col) in cols.iter_mut().enumerate() {
        let y = p.apply_spectral(col, |s| 1.0 / (1.0 + alpha * (1.0 - s) * (1.0 - s)))?;
        let hy = p.apply_highpass(&y)?;
        let applied = &y + p.apply_highpass(&hy)? * alpha;
        let norm = col.norm();
        let res = (&applied - &*col).norm();
        residuals[i] = if norm > 0.0 { res / norm } else { res };
        if !(res <= SOLVE_RESIDUAL_TOLERANCE * norm) {
            return Err(Error::Numerical(format!(
                "denoising solve residual {res:e} exceeds tolerance for coordinate {i}"
            )));
        }
        *col = y;
    }
    Ok(ClosedFormSolve {
        denoised: PointCloud::from_columns(&cols)?,
        relative_residuals: residuals,
    })
}

/// `Σ_i [‖X_i - Y_i‖² + α ‖X_i - W_i σ‖²] + β σᵀσ`, with `W_i` taken from
/// `system` (built on the current observation).
pub fn eval_joint_objective(
    x: &PointCloud,
    y: &PointCloud,
    system: &SmoothnessSystem,
    sigma: &DVector<f64>,
    alpha: f64,
    beta: f64,
) -> Result<f64> {
    if x.len() != y.len() || x.len() != system.dim() {
        return Err(Error::DimensionMismatch {
            expected: system.dim(),
            found: if x.len() != system.dim() { x.len() } else { y.len() },
        });
    }
    let fidelity = (x.coords() - y.coords()).norm_squared();
    Ok(fidelity + alpha * system.smooth(sigma)? + beta * sigma.norm_squared())
}

/// `Σ_i ‖X_i - Y_i‖² + α ‖(I - P_s) Y_i‖²`, the objective the closed-form
/// step minimizes at fixed coefficients.
pub fn denoise_step_objective(x: &PointCloud, y: &PointCloud, p: &SupportingMatrix, alpha: f64) -> Result<f64> {
    let mut total = (x.coords() - y.coords()).norm_squared();
    for col in y.columns() {
        total += alpha * p.apply_highpass(&col)?.norm_squared();
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Substep {
    /// Coefficient objective at the previous coefficients, current observation.
    CoeffBefore,
    Coeff,
    /// Denoising objective at `Y = X`.
    DenoiseBefore,
    Denoise,
    /// Full joint objective after the iteration.
    Joint,
}

impl Substep {
    pub fn label(&self) -> &'static str {
        match self {
            Substep::CoeffBefore => "coeff-before",
            Substep::Coeff => "coeff",
            Substep::DenoiseBefore => "denoise-before",
            Substep::Denoise => "denoise",
            Substep::Joint => "joint",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iter: usize,
    pub substep: Substep,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationInfo {
    pub iter: usize,
    pub forced_index: usize,
    /// Adjacency constraint dropped because no candidate was feasible.
    pub relaxed: bool,
    /// The previous coefficients lie in this iteration's feasible set, so the
    /// coefficient-step comparison is meaningful.
    pub coeff_comparable: bool,
    pub max_relative_residual: f64,
    pub max_change: f64,
}

#[derive(Debug, Clone)]
pub struct DenoiseResult {
    pub denoised: PointCloud,
    pub pairs: SpectralPairs,
    pub objective_trace: Vec<TraceEntry>,
    pub iterations: Vec<IterationInfo>,
}

/// Outcome of one substep monotonicity comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotoneCheck {
    pub iter: usize,
    pub substep: Substep,
    pub before: f64,
    pub after: f64,
    pub comparable: bool,
}

impl MonotoneCheck {
    pub fn holds(&self) -> bool {
        !self.comparable || self.after <= self.before + 1e-12 * self.before.abs().max(1.0)
    }
}

impl DenoiseResult {
    /// Pairs each substep result with its "before" value.
    pub fn monotone_checks(&self) -> Vec<MonotoneCheck> {
        let find = |iter: usize, s: Substep| {
            self.objective_trace
                .iter()
                .find(|e| e.iter == iter && e.substep == s)
                .map(|e| e.objective)
        };
        let mut out = Vec::new();
        for info in &self.iterations {
            for (before, after, comparable) in [
                (Substep::CoeffBefore, Substep::Coeff, info.coeff_comparable),
                (Substep::DenoiseBefore, Substep::Denoise, true),
            ] {
                if let (Some(b), Some(a)) = (find(info.iter, before), find(info.iter, after)) {
                    out.push(MonotoneCheck {
                        iter: info.iter,
                        substep: after,
                        before: b,
                        after: a,
                        comparable,
                    });
                }
            }
        }
        out
    }

    /// Trace as CSV with columns `iter,substep,objective`.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("iter,substep,objective\n");
        for e in &self.objective_trace {
            out.push_str(&format!("{},{},{}\n", e.iter, e.substep.label(), e.objective));
        }
        out
    }
}

pub fn joint_denoise(x: &PointCloud, config: &DenoiseConfig) -> Result<DenoiseResult> {
    config.validate()?;
    let coeff = config.coeff_config();
    let n = x.len();
    let mut observation = x.clone();
    let mut basis = estimate_spectrum(&observation);
    let mut sigma_prev = DVector::from_element(n, 1.0);
    let mut trace = Vec::new();
    let mut iterations = Vec::new();
    let mut last_pairs = None;

    for iter in 1..=config.outer_iters {
        let system = build_smoothness_system(&observation, &basis)?;
        let mut candidates = default_candidates(&system);
        let prev_max = sigma_prev.imax();
        if !candidates.contains(&prev_max) {
            candidates.push(prev_max);
        }
        let before = config.alpha * system.smooth(&sigma_prev)? + config.beta * sigma_prev.norm_squared();
        let estimate = estimate_with(&system, &basis, &coeff, &candidates)?;
        let sigma = estimate.solution.sigma_vector();
        let after = estimate.solution.objective;
        let coeff_comparable = estimate.relaxed
            || config.adjacency == AdjacencyConstraint::Relax
            || most_violated_triples(&basis, &sigma_prev, 1).is_empty();

        let pairs = SpectralPairs::new(basis.clone(), sigma.clone(), DEFAULT_LAMBDA_MAX)?;
        let p = pairs.supporting_matrix();
        let denoise_before = denoise_step_objective(&observation, &observation, &p, config.alpha)?;
        let solved = denoise_closed_form_checked(&observation, &p, config.alpha)?;
        let y = solved.denoised;
        let denoise_after = denoise_step_objective(&observation, &y, &p, config.alpha)?;
        let joint = eval_joint_objective(&observation, &y, &system, &sigma, config.alpha, config.beta)?;
        for v in [before, after, denoise_before, denoise_after, joint] {
            if !v.is_finite() {
                return Err(Error::Numerical(format!("non-finite objective in iteration {iter}")));
            }
        }
        if config.trace {
            for (substep, objective) in [
                (Substep::CoeffBefore, before),
                (Substep::Coeff, after),
                (Substep::DenoiseBefore, denoise_before),
                (Substep::Denoise, denoise_after),
                (Substep::Joint, joint),
            ] {
                trace.push(TraceEntry {
                    iter,
                    substep,
                    objective,
                });
            }
        }
        let max_change = (y.coords() - observation.coords()).amax();
        iterations.push(IterationInfo {
            iter,
            forced_index: estimate.solution.forced_index,
            relaxed: estimate.relaxed,
            coeff_comparable,
            max_relative_residual: solved.relative_residuals.iter().copied().fold(0.0, f64::max),
            max_change,
        });
        debug!("iteration {iter}: coeff {before:.6e} -> {after:.6e}, denoise {denoise_before:.6e} -> {denoise_after:.6e}");

        observation = y;
        sigma_prev = sigma;
        last_pairs = Some(pairs);
        if config.early_stop.is_some_and(|tol| max_change < tol) {
            info!("early stop after iteration {iter} (max change {max_change:e})");
            break;
        }
        if iter < config.outer_iters {
            basis = estimate_spectrum(&observation);
        }
    }

    Ok(DenoiseResult {
        denoised: observation,
        pairs: last_pairs.expect("at least one iteration"),
        objective_trace: trace,
        iterations,
    })
}

/// Dense `I + α (I - P_s)ᵀ (I - P_s)`, for inspection and oracles.
pub fn system_matrix(p: &SupportingMatrix, alpha: f64) -> DMatrix<f64> {
    let n = p.dim();
    let h = DMatrix::<f64>::identity(n, n) - p.dense();
    DMatrix::<f64>::identity(n, n) + h.tr_mul(&h) * alpha
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointcloud::{generate_shape, ShapeKind, ShapeParams};
    use crate::spectral::{random_pairs, SpectrumBasis};

    fn cloud(n: usize, seed: u64) -> PointCloud {
        generate_shape(ShapeKind::Cylinder, n, &ShapeParams::default(), seed).unwrap()
    }

    #[test]
    fn tiny_alpha_is_identity() {
        let pairs = random_pairs(20, 1);
        let x = cloud(20, 2);
        let y = denoise_closed_form(&x, &pairs.supporting_matrix(), 1e-12).unwrap();
        assert!((y.coords() - x.coords()).amax() < 1e-9);
    }

    #[test]
    fn all_pass_leaves_input() {
        let pairs = SpectralPairs::new(SpectrumBasis::identity(6), DVector::from_element(6, 1.0), 1.0).unwrap();
        let x = cloud(6, 3);
        let y = denoise_closed_form(&x, &pairs.supporting_matrix(), 50.0).unwrap();
        assert_eq!(y, x);
    }

    #[test]
    fn matches_dense_inverse() {
        let pairs = random_pairs(5, 7);
        let p = pairs.supporting_matrix();
        let x = cloud(5, 4);
        let y = denoise_closed_form(&x, &p, 0.8).unwrap();
        let inv = system_matrix(&p, 0.8).try_inverse().unwrap();
        let oracle = inv * x.coords();
        assert!((y.coords() - oracle).amax() < 1e-9);
    }

    #[test]
    fn joint_objective_terms() {
        let x = cloud(8, 5);
        let basis = estimate_spectrum(&x);
        let system = build_smoothness_system(&x, &basis).unwrap();
        let sigma = DVector::from_fn(8, |r, _| r as f64 / 7.0);
        let v = eval_joint_objective(&x, &x, &system, &sigma, 1e-300, 2.0).unwrap();
        assert!((v - 2.0 * sigma.norm_squared()).abs() < 1e-12);
        let zero = PointCloud::new(DMatrix::zeros(4, 3)).unwrap();
        let zs = build_smoothness_system(&zero, &SpectrumBasis::identity(4)).unwrap();
        assert_eq!(eval_joint_objective(&zero, &zero, &zs, &DVector::zeros(4), 1.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn joint_denoise_substeps_monotone() {
        let x = cloud(60, 9);
        let result = joint_denoise(&x, &DenoiseConfig::default()).unwrap();
        assert_eq!(result.iterations.len(), 3);
        let checks = result.monotone_checks();
        assert_eq!(checks.len(), 6);
        assert!(checks.iter().all(|c| c.holds()), "{checks:?}");
        assert!(result.trace_csv().starts_with("iter,substep,objective\n1,coeff-before,"));
    }

    #[test]
    fn deterministic() {
        let x = cloud(40, 10);
        let a = joint_denoise(&x, &DenoiseConfig::default()).unwrap();
        let b = joint_denoise(&x, &DenoiseConfig::default()).unwrap();
        assert_eq!(a.denoised, b.denoised);
        assert_eq!(a.objective_trace, b.objective_trace);
    }
}
