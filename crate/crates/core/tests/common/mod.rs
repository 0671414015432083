//! Oracles and instance generators shared by the integration test targets.
#![allow(dead_code)]

use hgsp::coeffopt::{build_smoothness_system, SmoothnessSystem};
use hgsp::pointcloud::PointCloud;
use hgsp::spectral::SpectrumBasis;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Orthonormal basis whose column 0 is the constant vector `1/sqrt(N)`.
/// With `σ_0 = 1` every adjacency entry gets a positive `N^{-3/2}` floor,
/// so the constrained problem is feasible (`σ = e_0` satisfies it).
pub fn basis_with_constant_column(n: usize, seed: u64) -> SpectrumBasis {
    let mut r = rng(seed);
    let mut m = DMatrix::<f64>::from_fn(n, n, |_, _| r.random_range(-1.0..1.0));
    m.column_mut(0).fill(1.0);
    let qr = m.qr();
    let mut q = qr.q();
    if q[(0, 0)] < 0.0 {
        q.column_mut(0).neg_mut();
    }
    SpectrumBasis::from_matrix(q, 0).unwrap()
}

pub fn random_cloud(n: usize, seed: u64) -> PointCloud {
    let mut r = rng(seed);
    PointCloud::new(DMatrix::from_fn(n, 3, |_, _| r.random_range(-1.0..1.0))).unwrap()
}

pub fn feasible_instance(n: usize, seed: u64) -> (PointCloud, SpectrumBasis, SmoothnessSystem) {
    let basis = basis_with_constant_column(n, seed);
    let cloud = random_cloud(n, seed.wrapping_add(1000));
    let system = build_smoothness_system(&cloud, &basis).unwrap();
    (cloud, basis, system)
}

/// All `i <= j <= k` cut rows `a_r = f_{r,i} f_{r,j} f_{r,k}`.
pub fn all_triple_rows(basis: &SpectrumBasis) -> Vec<DVector<f64>> {
    let v = basis.matrix();
    let n = v.nrows();
    let mut rows = Vec::new();
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                rows.push(DVector::from_fn(n, |r, _| v[(i, r)] * v[(j, r)] * v[(k, r)]));
            }
        }
    }
    rows
}

pub struct OracleSolution {
    pub sigma: DVector<f64>,
    pub objective: f64,
    pub max_violation: f64,
}

/// Dense reference solve of
/// `min α Σ_i ‖X_i - W_i σ‖² + β σᵀσ` s.t. `0 <= σ <= 1`, `σ_forced = 1` and
/// every enumerated triple entry `>= 0`, by accelerated projected gradient
/// ascent on the Lagrange dual. The inner minimization over the box is
/// separable with the dense `W_i` assembled explicitly.
pub fn exhaustive_qp_oracle(
    system: &SmoothnessSystem,
    basis: &SpectrumBasis,
    forced: usize,
    alpha: f64,
    beta: f64,
) -> OracleSolution {
    let n = basis.dim();
    // Hessian and linear term from the dense W_i: 2α Σ W_iᵀW_i + 2β I, 2α Σ W_iᵀX_i.
    let mut hess = DMatrix::<f64>::identity(n, n) * (2.0 * beta);
    let mut lin = DVector::<f64>::zeros(n);
    let mut constant = 0.0;
    for i in 0..3 {
        let w = system.w_matrix(i);
        hess += w.tr_mul(&w) * (2.0 * alpha);
        lin += w.tr_mul(system.signal(i)) * (2.0 * alpha);
        constant += alpha * system.signal(i).norm_squared();
    }
    let off = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| hess[(i, j)].abs())
        .fold(0.0, f64::max);
    assert!(off < 1e-9 * hess.amax(), "W_iᵀW_i must be diagonal for an orthonormal basis");
    let h = hess.diagonal();

    let rows = all_triple_rows(basis);
    let m = rows.len();
    let primal = |mu: &DVector<f64>| -> DVector<f64> {
        let mut s = DVector::from_fn(n, |r, _| lin[r]);
        for (a, &w) in rows.iter().zip(mu.iter()) {
            s.axpy(w, a, 1.0);
        }
        let mut s = DVector::from_fn(n, |r, _| (s[r] / h[r]).clamp(0.0, 1.0));
        s[forced] = 1.0;
        s
    };
    let lipschitz: f64 = rows
        .iter()
        .map(|a| (0..n).filter(|&r| r != forced).map(|r| a[r] * a[r] / h[r]).sum::<f64>())
        .sum::<f64>()
        .max(1e-300);
    let step = 1.0 / lipschitz;
    let mut mu = DVector::<f64>::zeros(m);
    let mut mu_prev = mu.clone();
    let mut y = mu.clone();
    let mut t = 1.0f64;
    for it in 0..400_000 {
        let s = primal(&y);
        let grad = DVector::from_fn(m, |k, _| rows[k].dot(&s));
        mu_prev.copy_from(&mu);
        mu = (&y - grad * step).map(|x| x.max(0.0));
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        y = &mu + (&mu - &mu_prev) * ((t - 1.0) / t_next);
        t = t_next;
        if it % 500 == 499 {
            // restart keeps the dual iterates monotone-ish on this piecewise quadratic
            t = 1.0;
            let s = primal(&mu);
            let viol = rows.iter().map(|a| -a.dot(&s)).fold(0.0, f64::max);
            let comp = rows.iter().zip(mu.iter()).map(|(a, &w)| (w * a.dot(&s)).abs()).fold(0.0, f64::max);
            if viol < 1e-13 && comp < 1e-13 && (&mu - &mu_prev).amax() < 1e-15 {
                break;
            }
        }
    }
    let sigma = primal(&mu);
    let objective = 0.5 * sigma.dot(&h.component_mul(&sigma)) - lin.dot(&sigma) + constant;
    let max_violation = rows.iter().map(|a| -a.dot(&sigma)).fold(0.0, f64::max);
    OracleSolution {
        sigma,
        objective,
        max_violation,
    }
}
