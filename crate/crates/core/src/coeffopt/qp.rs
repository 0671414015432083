use std::collections::{BTreeSet, HashSet};
use std::sync::OnceLock;

use log::debug;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::separation::{self, ViolatedTriple, VIOLATION_TOLERANCE};
use super::system::{DiagonalObjective, SmoothnessSystem};
use crate::error::{Error, Result};
use crate::spectral::SpectrumBasis;

pub const DEFAULT_CUT_BUDGET: usize = 256;
pub const DEFAULT_MAX_ROUNDS: usize = 50;

/// How the adjacency nonnegativity constraint `a_{ijk} >= 0` is treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdjacencyConstraint {
    /// Cutting planes; an infeasible candidate is reported as such.
    Enforce,
    /// Enforce, but fall back to the box-only problem when every candidate
    /// is infeasible.
    EnforceOrRelax,
    /// Box and max constraints only.
    Relax,
}

impl std::str::FromStr for AdjacencyConstraint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "enforce" => Ok(Self::Enforce),
            "enforce-or-relax" => Ok(Self::EnforceOrRelax),
            "relax" => Ok(Self::Relax),
            other => Err(Error::invalid(format!("unknown adjacency mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CoeffConfig {
    pub alpha: f64,
    pub beta: f64,
    pub adjacency: AdjacencyConstraint,
    pub cut_budget: usize,
    pub max_rounds: usize,
}

impl Default for CoeffConfig {
    fn default() -> Self {
        Self {
            alpha: 1e-3,
            beta: 1.0,
            adjacency: AdjacencyConstraint::Enforce,
            cut_budget: DEFAULT_CUT_BUDGET,
            max_rounds: DEFAULT_MAX_ROUNDS,
        }
    }
}

impl CoeffConfig {
    pub fn with_weights(alpha: f64, beta: f64) -> Self {
        Self {
            alpha,
            beta,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if self.cut_budget == 0 || self.max_rounds == 0 {
            return Err(Error::invalid("cut budget and round cap must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QpStatus {
    /// No adjacency entry below tolerance at the returned point.
    Optimal,
    /// Adjacency constraint not imposed.
    Unconstrained,
    /// A single cut cannot be satisfied anywhere in the box.
    Infeasible,
    /// Round cap reached with violations left.
    RoundCap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QpSolution {
    pub sigma: Vec<f64>,
    pub objective: f64,
    pub forced_index: usize,
    pub active_cuts: Vec<[usize; 3]>,
    pub kkt_residual: f64,
    pub cut_count: usize,
    pub rounds: usize,
    pub status: QpStatus,
    /// Objective after each inner solve, starting with the cut-free solve.
    pub round_objectives: Vec<f64>,
    /// Most negative adjacency entry found at the returned point (0 if none).
    pub worst_violation: f64,
}

impl QpSolution {
    pub fn sigma_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.sigma)
    }

    /// True when the returned point satisfies every imposed constraint.
    pub fn is_feasible(&self) -> bool {
        matches!(self.status, QpStatus::Optimal | QpStatus::Unconstrained)
    }
}

/// Shared per-(system, weights) state reused across forced indices.
pub(crate) struct QpContext<'a> {
    pub basis: &'a SpectrumBasis,
    pub objective: DiagonalObjective,
    pub config: CoeffConfig,
    /// Unforced box optimum.
    base: DVector<f64>,
    base_family: OnceLock<DMatrix<f64>>,
}

impl<'a> QpContext<'a> {
    pub fn new(system: &SmoothnessSystem, basis: &'a SpectrumBasis, config: CoeffConfig) -> Result<Self> {
        config.validate()?;
        if system.dim() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: system.dim(),
            });
        }
        let objective = DiagonalObjective::new(system, config.alpha, config.beta);
        let n = basis.dim();
        let base = DVector::from_fn(n, |r, _| objective.linear(r) / objective.curvature(r));
        Ok(Self {
            basis,
            objective,
            config,
            base,
            base_family: OnceLock::new(),
        })
    }

    fn initial_family(&self, forced: usize) -> DMatrix<f64> {
        let base = self
            .base_family
            .get_or_init(|| separation::diagonal_family(self.basis.matrix(), &self.base));
        let mut t = base.clone();
        separation::update_diagonal_family(&mut t, self.basis.matrix(), forced, 1.0 - self.base[forced]);
        t
    }

    pub fn solve(&self, forced: usize) -> Result<QpSolution> {
        let n = self.basis.dim();
        if forced >= n {
            return Err(Error::OutOfRange {
                index: forced,
                max: n.saturating_sub(1),
            });
        }
        let mut sigma = self.objective.box_optimum(forced);
        let mut objectives = vec![self.objective.value(&sigma)];
        if self.config.adjacency == AdjacencyConstraint::Relax {
            return Ok(self.finish(sigma, forced, &[], &[], 0.0, 0, QpStatus::Unconstrained, objectives, 0.0));
        }

        let v = self.basis.matrix();
        let mut cuts: Vec<ViolatedTriple> = Vec::new();
        let mut rows: Vec<DVector<f64>> = Vec::new();
        let mut seen: HashSet<[usize; 3]> = HashSet::new();
        let mut mu: Vec<f64> = Vec::new();
        let mut kkt = 0.0;
        let mut family = Some(self.initial_family(forced));
        let mut rounds = 0;
        loop {
            let violated = separation::separate(self.basis, &sigma, self.config.cut_budget, family.take());
            let worst = violated.first().map_or(0.0, |t| t.value);
            if violated.is_empty() {
                return Ok(self.finish(sigma, forced, &cuts, &mu, kkt, rounds, QpStatus::Optimal, objectives, 0.0));
            }
            for t in &violated {
                let row = separation::cut_coefficients(v, t.triple);
                if cut_unsatisfiable(&row, forced) {
                    debug!("forced index {forced}: cut {:?} cannot be satisfied in the box", t.triple);
                    return Ok(self.finish(sigma, forced, &cuts, &mu, kkt, rounds, QpStatus::Infeasible, objectives, worst));
                }
                if seen.insert(t.triple) {
                    cuts.push(*t);
                    rows.push(row);
                }
            }
            if rounds == self.config.max_rounds {
                return Ok(self.finish(sigma, forced, &cuts, &mu, kkt, rounds, QpStatus::RoundCap, objectives, worst));
            }
            rounds += 1;
            let inner = InnerQp {
                objective: &self.objective,
                forced,
                rows: &rows,
            };
            // a cut that no box point satisfies, found at the penalty iterate
            let probe = |x: &DVector<f64>| {
                separation::separate(self.basis, x, self.config.cut_budget, None)
                    .iter()
                    .any(|t| cut_unsatisfiable(&separation::cut_coefficients(v, t.triple), forced))
            };
            match inner.solve(&sigma, rounds, probe)? {
                InnerOutcome::Solved(x, m) => {
                    sigma = x;
                    mu = m;
                }
                InnerOutcome::Infeasible => {
                    debug!("forced index {forced}: aggregated cuts cannot be satisfied in the box");
                    return Ok(self.finish(sigma, forced, &cuts, &mu, kkt, rounds, QpStatus::Infeasible, objectives, worst));
                }
            }
            kkt = inner.kkt_residual(&sigma, &mu);
            let value = self.objective.value(&sigma);
            if !value.is_finite() {
                return Err(Error::Numerical("non-finite coefficient objective".into()));
            }
            objectives.push(value);
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn finish(
        &self,
        sigma: DVector<f64>,
        forced: usize,
        cuts: &[ViolatedTriple],
        mu: &[f64],
        kkt_residual: f64,
        rounds: usize,
        status: QpStatus,
        round_objectives: Vec<f64>,
        worst_violation: f64,
    ) -> QpSolution {
        let v = self.basis.matrix();
        let active_cuts = cuts
            .iter()
            .zip(mu.iter().chain(std::iter::repeat(&0.0)))
            .filter(|(t, &m)| {
                m > 0.0 || separation::cut_coefficients(v, t.triple).dot(&sigma).abs() <= VIOLATION_TOLERANCE
            })
            .map(|(t, _)| t.triple)
            .collect();
        QpSolution {
            objective: self.objective.value(&sigma),
            sigma: sigma.iter().copied().collect(),
            forced_index: forced,
            active_cuts,
            kkt_residual,
            cut_count: cuts.len(),
            rounds,
            status,
            round_objectives,
            worst_violation,
        }
    }
}

/// `max_{σ in box, σ_f = 1} aᵀσ < -tol` proves the cut alone is infeasible.
fn cut_unsatisfiable(row: &DVector<f64>, forced: usize) -> bool {
    let best: f64 = row
        .iter()
        .enumerate()
        .map(|(r, &a)| if r == forced { a } else { a.max(0.0) })
        .sum();
    best < -VIOLATION_TOLERANCE
}

enum InnerOutcome {
    Solved(DVector<f64>, Vec<f64>),
    /// The accumulated cuts admit no point of the box.
    Infeasible,
}

/// `min ½ Σ h_r σ_r² - b_r σ_r` over `0 <= σ <= 1`, `σ_f = 1`, `A σ >= 0`.
struct InnerQp<'a> {
    objective: &'a DiagonalObjective,
    forced: usize,
    rows: &'a [DVector<f64>],
}

const FISTA_MAX_ITERS: usize = 4000;
const POLISH_MAX_ITERS: usize = 2000;

impl InnerQp<'_> {
    fn n(&self) -> usize {
        self.objective.energy.len()
    }

    /// Penalty warm start followed by an exact active-set polish; when the
    /// polish cannot certify a KKT point the penalty iterate is kept.
    /// `probe` sees the penalty iterate first and may prove infeasibility,
    /// which skips the polish.
    fn solve(
        &self,
        start: &DVector<f64>,
        round: usize,
        probe: impl FnOnce(&DVector<f64>) -> bool,
    ) -> Result<InnerOutcome> {
        let h_max = (0..self.n()).map(|r| self.objective.curvature(r)).fold(0.0, f64::max);
        let a_max = self.rows.iter().map(|a| a.norm_squared()).fold(0.0, f64::max);
        let rho = 10.0 * h_max / a_max.max(f64::MIN_POSITIVE) * 10f64.powi(round.min(12) as i32);
        let warm = self.penalty_solve(start, rho);
        if self.aggregate_unsatisfiable(&warm) || probe(&warm) {
            return Ok(InnerOutcome::Infeasible);
        }
        if let Some((x, mu)) = self.polish(&warm) {
            return Ok(InnerOutcome::Solved(x, mu));
        }
        debug!("active-set polish did not converge; keeping penalty iterate");
        let mu = self.rows.iter().map(|a| rho * (-a.dot(&warm)).max(0.0)).collect();
        Ok(InnerOutcome::Solved(warm, mu))
    }

    /// Farkas test on the violation-weighted sum of the cuts. Near the
    /// penalty limit the weights `y_k = max(0, -a_kᵀσ)` make `Σ y_k a_k`
    /// unsatisfiable whenever the cut set itself is; any nonnegative
    /// combination is a valid inequality, so a pass is a proof.
    fn aggregate_unsatisfiable(&self, x: &DVector<f64>) -> bool {
        let mut combo = DVector::zeros(self.n());
        let mut any = false;
        for a in self.rows {
            let c = a.dot(x);
            if c < 0.0 {
                combo.axpy(-c, a, 1.0);
                any = true;
            }
        }
        if !any {
            return false;
        }
        let scale = combo.amax();
        scale > 0.0 && cut_unsatisfiable(&(combo / scale), self.forced)
    }

    fn penalty_solve(&self, start: &DVector<f64>, rho: f64) -> DVector<f64> {
        let n = self.n();
        let h: Vec<f64> = (0..n).map(|r| self.objective.curvature(r)).collect();
        let b: Vec<f64> = (0..n).map(|r| self.objective.linear(r)).collect();
        let row_mass: f64 = self
            .rows
            .iter()
            .map(|a| a.iter().enumerate().filter(|&(r, _)| r != self.forced).map(|(_, x)| x * x).sum::<f64>())
            .sum();
        let lipschitz = h.iter().copied().fold(0.0, f64::max) + rho * row_mass;
        let step = 1.0 / lipschitz;
        let mut x = start.clone();
        x[self.forced] = 1.0;
        let mut x_prev = x.clone();
        let mut y = x.clone();
        let mut t = 1.0f64;
        let mut grad = DVector::zeros(n);
        for _ in 0..FISTA_MAX_ITERS {
            for r in 0..n {
                grad[r] = h[r] * y[r] - b[r];
            }
            for a in self.rows {
                let c = a.dot(&y);
                if c < 0.0 {
                    grad.axpy(rho * c, a, 1.0);
                }
            }
            let mut change = 0.0f64;
            for r in 0..n {
                let next = if r == self.forced {
                    1.0
                } else {
                    (y[r] - step * grad[r]).clamp(0.0, 1.0)
                };
                change = change.max((next - x[r]).abs());
                x_prev[r] = x[r];
                x[r] = next;
            }
            let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            let momentum = (t - 1.0) / t_next;
            for r in 0..n {
                y[r] = x[r] + momentum * (x[r] - x_prev[r]);
            }
            t = t_next;
            if change < 1e-14 {
                break;
            }
        }
        x
    }

    /// Active-set iteration on (cuts, lower bounds, upper bounds), each step
    /// solving the equality-constrained problem exactly.
    fn polish(&self, warm: &DVector<f64>) -> Option<(DVector<f64>, Vec<f64>)> {
        let n = self.n();
        let scale = (0..n).map(|r| self.objective.curvature(r)).fold(0.0, f64::max);
        let mut lower: BTreeSet<usize> = BTreeSet::new();
        let mut upper: BTreeSet<usize> = BTreeSet::new();
        for r in (0..n).filter(|&r| r != self.forced) {
            if warm[r] <= 1e-10 {
                lower.insert(r);
            } else if warm[r] >= 1.0 - 1e-10 {
                upper.insert(r);
            }
        }
        let free_count = n - 1 - lower.len() - upper.len();
        let mut by_slack: Vec<(f64, usize)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(t, a)| (a.dot(warm), t))
            .filter(|&(c, _)| c <= 1e-9)
            .collect();
        by_slack.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut work: BTreeSet<usize> = by_slack.iter().take(free_count).map(|&(_, t)| t).collect();

        let mut visited: HashSet<(Vec<usize>, Vec<usize>, Vec<usize>)> = HashSet::new();
        for _ in 0..POLISH_MAX_ITERS {
            let key = (
                work.iter().copied().collect(),
                lower.iter().copied().collect(),
                upper.iter().copied().collect(),
            );
            if !visited.insert(key) {
                return None;
            }
            let (x, mu_w) = self.equality_solve(&work, &lower, &upper)?;

            // primal: add the most violated bound or cut
            let mut worst = 1e-12;
            let mut add: Option<(u8, usize)> = None;
            for r in 0..n {
                if r == self.forced || lower.contains(&r) || upper.contains(&r) {
                    continue;
                }
                if -x[r] > worst {
                    worst = -x[r];
                    add = Some((0, r));
                }
                if x[r] - 1.0 > worst {
                    worst = x[r] - 1.0;
                    add = Some((1, r));
                }
            }
            for (t, a) in self.rows.iter().enumerate() {
                if !work.contains(&t) {
                    let c = a.dot(&x);
                    if -c > worst {
                        worst = -c;
                        add = Some((2, t));
                    }
                }
            }
            if let Some((kind, idx)) = add {
                match kind {
                    0 => lower.insert(idx),
                    1 => upper.insert(idx),
                    _ => work.insert(idx),
                };
                continue;
            }

            // dual: drop the most negative multiplier
            let mut g = DVector::from_fn(n, |r, _| self.objective.curvature(r) * x[r] - self.objective.linear(r));
            for (&t, &m) in work.iter().zip(&mu_w) {
                g.axpy(-m, &self.rows[t], 1.0);
            }
            let tol = -1e-12 * scale.max(1.0);
            let mut most = tol;
            let mut drop: Option<(u8, usize)> = None;
            for (&t, &m) in work.iter().zip(&mu_w) {
                if m < most {
                    most = m;
                    drop = Some((2, t));
                }
            }
            for &r in &lower {
                if g[r] < most {
                    most = g[r];
                    drop = Some((0, r));
                }
            }
            for &r in &upper {
                if -g[r] < most {
                    most = -g[r];
                    drop = Some((1, r));
                }
            }
            match drop {
                Some((0, r)) => {
                    lower.remove(&r);
                }
                Some((1, r)) => {
                    upper.remove(&r);
                }
                Some((_, t)) => {
                    work.remove(&t);
                }
                None => {
                    let mut x = x;
                    for r in 0..n {
                        x[r] = x[r].clamp(0.0, 1.0);
                    }
                    x[self.forced] = 1.0;
                    let mut mu = vec![0.0; self.rows.len()];
                    for (&t, &m) in work.iter().zip(&mu_w) {
                        mu[t] = m.max(0.0);
                    }
                    return Some((x, mu));
                }
            }
        }
        None
    }

    /// Minimizes over free coordinates with the working cuts as equalities.
    fn equality_solve(
        &self,
        work: &BTreeSet<usize>,
        lower: &BTreeSet<usize>,
        upper: &BTreeSet<usize>,
    ) -> Option<(DVector<f64>, Vec<f64>)> {
        let n = self.n();
        let is_free = |r: usize| r != self.forced && !lower.contains(&r) && !upper.contains(&r);
        let mut fixed = DVector::zeros(n);
        fixed[self.forced] = 1.0;
        for &r in upper {
            fixed[r] = 1.0;
        }
        let h: Vec<f64> = (0..n).map(|r| self.objective.curvature(r)).collect();
        let b: Vec<f64> = (0..n).map(|r| self.objective.linear(r)).collect();
        let w: Vec<f64> = (0..n).map(|r| if is_free(r) { 1.0 / h[r] } else { 0.0 }).collect();
        let ids: Vec<usize> = work.iter().copied().collect();
        let k = ids.len();
        let mut mu = DVector::zeros(k);
        if k > 0 {
            // rows of the working cuts, scaled by sqrt(1/h) on free coordinates
            let mut a = DMatrix::zeros(k, n);
            let mut rhs = DVector::zeros(k);
            for (p, &t) in ids.iter().enumerate() {
                let ap = &self.rows[t];
                let mut acc = 0.0;
                for r in 0..n {
                    if w[r] > 0.0 {
                        acc += ap[r] * b[r] * w[r];
                        a[(p, r)] = ap[r] * w[r].sqrt();
                    } else {
                        acc += ap[r] * fixed[r];
                    }
                }
                rhs[p] = -acc;
            }
            let s = &a * a.transpose();
            mu = match s.clone().cholesky() {
                Some(ch) => ch.solve(&rhs),
                None => {
                    let eps = 1e-12 * s.abs().max().max(f64::MIN_POSITIVE);
                    let sol = s.clone().svd(true, true).solve(&rhs, eps).ok()?;
                    if (&s * &sol - &rhs).amax() > 1e-9 * (1.0 + rhs.amax()) {
                        return None;
                    }
                    sol
                }
            };
            if mu.iter().any(|m| !m.is_finite()) {
                return None;
            }
        }
        let mut x = fixed;
        for r in (0..n).filter(|&r| w[r] > 0.0) {
            let mut num = b[r];
            for (p, &t) in ids.iter().enumerate() {
                num += mu[p] * self.rows[t][r];
            }
            x[r] = num / h[r];
        }
        Some((x, mu.iter().copied().collect()))
    }

    fn kkt_residual(&self, x: &DVector<f64>, mu: &[f64]) -> f64 {
        let n = self.n();
        let mut worst = 0.0f64;
        let mut g = DVector::from_fn(n, |r, _| self.objective.curvature(r) * x[r] - self.objective.linear(r));
        for (a, &m) in self.rows.iter().zip(mu) {
            let c = a.dot(x);
            worst = worst.max((-c).max(0.0)).max((m * c).abs()).max((-m).max(0.0));
            g.axpy(-m, a, 1.0);
        }
        for r in (0..n).filter(|&r| r != self.forced) {
            let stationarity = if x[r] <= 0.0 {
                (-g[r]).max(0.0)
            } else if x[r] >= 1.0 {
                g[r].max(0.0)
            } else {
                g[r].abs()
            };
            worst = worst.max(stationarity);
        }
        worst
    }
}

/// Solves the normalized coefficient problem with `σ_forced = 1` under the
/// default cut budget and round cap, enforcing the adjacency constraint.
pub fn solve_qp_fixed_max(
    system: &SmoothnessSystem,
    basis: &SpectrumBasis,
    forced: usize,
    alpha: f64,
    beta: f64,
) -> Result<QpSolution> {
    solve_qp_with(system, basis, forced, &CoeffConfig::with_weights(alpha, beta))
}

pub fn solve_qp_with(
    system: &SmoothnessSystem,
    basis: &SpectrumBasis,
    forced: usize,
    config: &CoeffConfig,
) -> Result<QpSolution> {
    QpContext::new(system, basis, *config)?.solve(forced)
}
