use std::sync::Arc;

use log::warn;
use nalgebra::{DMatrix, DVector, Matrix3, SymmetricEigen};

use crate::error::{Error, Result};
use crate::pointcloud::PointCloud;

/// Relative eigenvalue floor below which a covariance direction counts as null.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Orthonormality tolerance enforced on every basis.
pub const ORTHONORMAL_TOLERANCE: f64 = 1e-9;

/// Canonical vectors whose residual norm after projection falls below this
/// are skipped during null-space completion.
pub const COMPLETION_SKIP_NORM: f64 = 1e-3;

/// An orthonormal `N x N` spectrum basis with columns `f_1 .. f_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumBasis {
    v: Arc<DMatrix<f64>>,
    source_rank: usize,
}

impl SpectrumBasis {
    /// Wraps an existing matrix after checking it is square and orthonormal.
    pub fn from_matrix(v: DMatrix<f64>, source_rank: usize) -> Result<Self> {
        if v.nrows() != v.ncols() {
            return Err(Error::DimensionMismatch {
                expected: v.nrows(),
                found: v.ncols(),
            });
        }
        if v.nrows() == 0 {
            return Err(Error::Empty);
        }
        let deviation = orthonormality_deviation(&v);
        if !(deviation <= ORTHONORMAL_TOLERANCE) {
            return Err(Error::NotOrthonormal { deviation });
        }
        Ok(Self {
            v: Arc::new(v),
            source_rank: source_rank.min(3),
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            v: Arc::new(DMatrix::identity(n, n)),
            source_rank: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.v.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.v
    }

    pub(crate) fn shared(&self) -> Arc<DMatrix<f64>> {
        Arc::clone(&self.v)
    }

    pub fn component(&self, r: usize) -> DVector<f64> {
        self.v.column(r).into_owned()
    }

    /// Number of covariance eigenvalues above `RANK_TOLERANCE * trace(R)`.
    pub fn source_rank(&self) -> usize {
        self.source_rank
    }

    /// True when the input had no spread after centering.
    pub fn is_degenerate(&self) -> bool {
        self.source_rank == 0
    }

    /// `Vᵀ x`
    pub fn analyze(&self, x: &DVector<f64>) -> DVector<f64> {
        self.v.tr_mul(x)
    }

    /// `V c`
    pub fn synthesize(&self, c: &DVector<f64>) -> DVector<f64> {
        &*self.v * c
    }
}

pub fn orthonormality_deviation(v: &DMatrix<f64>) -> f64 {
    let g = v.tr_mul(v);
    let n = g.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - target).abs());
        }
    }
    worst
}

/// Row-centered signals `s' = [X_1 - s̄, X_2 - s̄, X_3 - s̄]` with
/// `s̄ = (X_1 + X_2 + X_3) / 3` (the mean of each point's three coordinates).
pub fn centered_signals(cloud: &PointCloud) -> DMatrix<f64> {
    let c = cloud.coords();
    DMatrix::from_fn(c.nrows(), 3, |i, j| {
        let mean = (c[(i, 0)] + c[(i, 1)] + c[(i, 2)]) / 3.0;
        c[(i, j)] - mean
    })
}

/// Dense `R = s' s'ᵀ`. Only for inspection and tests; the estimator never forms it.
pub fn covariance(cloud: &PointCloud) -> DMatrix<f64> {
    let s = centered_signals(cloud);
    &s * s.transpose()
}

/// Estimates the hypergraph spectrum of a point cloud from its
/// stationarity: the eigenvectors of `R = s' s'ᵀ` by descending eigenvalue.
///
/// `R` has rank at most three, so its nonzero eigenpairs are read off the
/// `3 x 3` Gram matrix `s'ᵀ s'` (`f = s' u / sqrt(mu)`). The remaining null
/// space is completed by modified Gram–Schmidt of the canonical vectors
/// `e_1, e_2, ...` in index order against everything accepted so far; see
/// [`complete_basis`]. Each column is then sign-normalized so its
/// largest-magnitude entry is positive (ties go to the lowest index).
///
/// A cloud with no spread after centering yields the pure canonical
/// completion (the identity) with `source_rank == 0` and a logged warning.
pub fn estimate_spectrum(cloud: &PointCloud) -> SpectrumBasis {
    let s = centered_signals(cloud);
    let gram: Matrix3<f64> = {
        let g = s.tr_mul(&s);
        Matrix3::from_fn(|i, j| 0.5 * (g[(i, j)] + g[(j, i)]))
    };
    let trace = gram.trace();
    let eig = SymmetricEigen::new(gram);
    let mut pairs: Vec<(f64, usize)> = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .map(|(i, mu)| (mu, i))
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));

    let mut informative: Vec<DVector<f64>> = Vec::new();
    if trace > 0.0 {
        for &(mu, idx) in &pairs {
            if mu <= RANK_TOLERANCE * trace {
                continue;
            }
            let u = eig.eigenvectors.column(idx);
            let mut f = &s * u / mu.sqrt();
            // one re-orthogonalization pass against earlier directions
            for prev in &informative {
                let proj = prev.dot(&f);
                f.axpy(-proj, prev, 1.0);
            }
            let norm = f.norm();
            if norm > 0.0 {
                informative.push(f / norm);
            }
        }
    }
    if informative.is_empty() {
        warn!("point cloud has no spread after row-centering; returning canonical basis");
    }

    let n = cloud.len();
    let mut v = complete_basis(n, &informative);
    for mut col in v.column_iter_mut() {
        let mut best = 0usize;
        for i in 1..col.len() {
            if col[i].abs() > col[best].abs() {
                best = i;
            }
        }
        if col[best] < 0.0 {
            col.neg_mut();
        }
    }
    let source_rank = informative.len();
    SpectrumBasis {
        v: Arc::new(v),
        source_rank,
    }
}

/// Builds `[F | Q]` where `F` holds the given orthonormal columns and `Q` is
/// the modified Gram–Schmidt orthonormalization of `e_1, e_2, ...` against
/// `F` and earlier accepted vectors, skipping any `e_j` whose residual norm
/// is below [`COMPLETION_SKIP_NORM`].
///
/// Gram–Schmidt of `P⊥ e_j` (with `P⊥ = I - F Fᵀ`) equals `P⊥ E L⁻ᵀ` where
/// `L Lᵀ = I - G Gᵀ` and `G` holds the selected rows of `F`. That Cholesky
/// factor has the generator form `L_ij = -g_iᵀ p_j`, `L_jj = d_j` with
/// `p_j = (I + A_j) g_j / d_j`, `A_j = Σ_{l<j} p_l p_lᵀ`,
/// `d_j² = 1 - g_jᵀ (I + A_j) g_j`, so the whole completion costs `O(N² k)`
/// instead of `O(N³)`.
pub(crate) fn complete_basis(n: usize, informative: &[DVector<f64>]) -> DMatrix<f64> {
    let k = informative.len();
    let mut v = DMatrix::<f64>::zeros(n, n);
    for (r, f) in informative.iter().enumerate() {
        v.set_column(r, f);
    }
    let needed = n - k;
    if needed == 0 {
        return v;
    }
    let row = |j: usize| -> Vec<f64> { informative.iter().map(|f| f[j]).collect() };

    // Forward pass: choose accepted canonical indices, record generators.
    let mut accepted: Vec<usize> = Vec::with_capacity(needed);
    let mut gens_g: Vec<Vec<f64>> = Vec::with_capacity(needed);
    let mut gens_p: Vec<Vec<f64>> = Vec::with_capacity(needed);
    let mut diag: Vec<f64> = Vec::with_capacity(needed);
    let mut a = vec![0.0; k * k]; // A_j, row-major k x k
    for j in 0..n {
        if accepted.len() == needed {
            break;
        }
        let g = row(j);
        // (I + A) g
        let mut ig = g.clone();
        for r in 0..k {
            for c in 0..k {
                ig[r] += a[r * k + c] * g[c];
            }
        }
        let d2 = 1.0 - g.iter().zip(&ig).map(|(x, y)| x * y).sum::<f64>();
        if d2 < COMPLETION_SKIP_NORM * COMPLETION_SKIP_NORM {
            continue;
        }
        let d = d2.sqrt();
        let p: Vec<f64> = ig.iter().map(|x| x / d).collect();
        for r in 0..k {
            for c in 0..k {
                a[r * k + c] += p[r] * p[c];
            }
        }
        accepted.push(j);
        gens_g.push(g);
        gens_p.push(p);
        diag.push(d);
    }
    if accepted.len() < needed {
        // Only reachable for pathological inputs; fall back to dense MGS.
        return dense_mgs_completion(n, informative);
    }

    // Column t of Q = P⊥ E u with Lᵀ u = e_t (back substitution).
    let mut u = vec![0.0; needed];
    let mut w = vec![0.0; k];
    for t in 0..needed {
        w.iter_mut().for_each(|x| *x = 0.0);
        u[t] = 1.0 / diag[t];
        for (wr, gr) in w.iter_mut().zip(&gens_g[t]) {
            *wr += gr * u[t];
        }
        for s in (0..t).rev() {
            let us = gens_p[s].iter().zip(&w).map(|(p, w)| p * w).sum::<f64>() / diag[s];
            u[s] = us;
            for (wr, gr) in w.iter_mut().zip(&gens_g[s]) {
                *wr += gr * us;
            }
        }
        let mut col = v.column_mut(k + t);
        for s in 0..=t {
            col[accepted[s]] = u[s];
        }
        // subtract F (Fᵀ E u) = F w
        for (r, f) in informative.iter().enumerate() {
            col.axpy(-w[r], f, 1.0);
        }
    }
    v
}

fn dense_mgs_completion(n: usize, informative: &[DVector<f64>]) -> DMatrix<f64> {
    let mut cols: Vec<DVector<f64>> = informative.to_vec();
    for j in 0..n {
        if cols.len() == n {
            break;
        }
        let mut e = DVector::<f64>::zeros(n);
        e[j] = 1.0;
        for _ in 0..2 {
            for q in &cols {
                let proj = q.dot(&e);
                e.axpy(-proj, q, 1.0);
            }
        }
        let norm = e.norm();
        if norm > 1e-8 {
            cols.push(e / norm);
        }
    }
    DMatrix::from_columns(&cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointcloud::{generate_shape, ShapeKind, ShapeParams};

    /// Literal modified Gram–Schmidt in index order, dense, as an oracle.
    fn mgs_oracle(n: usize, informative: &[DVector<f64>]) -> DMatrix<f64> {
        let mut cols: Vec<DVector<f64>> = informative.to_vec();
        for j in 0..n {
            if cols.len() == n {
                break;
            }
            let mut e = DVector::<f64>::zeros(n);
            e[j] = 1.0;
            for q in &cols {
                let proj = q.dot(&e);
                e -= q * proj;
            }
            let norm = e.norm();
            if norm >= COMPLETION_SKIP_NORM {
                cols.push(e / norm);
            }
        }
        DMatrix::from_columns(&cols)
    }

    fn random_orthonormal(n: usize, k: usize, seed: u64) -> Vec<DVector<f64>> {
        use rand::Rng;
        let mut rng = crate::rng::seeded(seed);
        let m = DMatrix::<f64>::from_fn(n, k, |_, _| rng.random_range(-1.0..1.0));
        let qr = m.qr();
        let q = qr.q();
        (0..k).map(|c| q.column(c).into_owned()).collect()
    }

    #[test]
    fn structured_completion_matches_mgs() {
        for (n, k, seed) in [(5, 2, 1), (12, 2, 2), (30, 3, 3), (9, 1, 4), (4, 0, 5)] {
            let f = random_orthonormal(n, k, seed);
            let fast = complete_basis(n, &f);
            let slow = mgs_oracle(n, &f);
            assert_eq!(slow.ncols(), n);
            let diff = (&fast - &slow).abs().max();
            assert!(diff < 1e-10, "n={n} k={k}: diff {diff}");
        }
    }

    #[test]
    fn completion_skips_dependent_canonical_vectors() {
        // F contains e_1 exactly, so e_1 must be skipped.
        let mut f = DVector::<f64>::zeros(4);
        f[0] = 1.0;
        let fast = complete_basis(4, &[f.clone()]);
        let slow = mgs_oracle(4, &[f]);
        assert!((&fast - &slow).abs().max() < 1e-12);
        assert!(orthonormality_deviation(&fast) < 1e-12);
    }

    #[test]
    fn identity_coordinates_example() {
        let cloud = PointCloud::new(DMatrix::identity(3, 3)).unwrap();
        let basis = estimate_spectrum(&cloud);
        assert_eq!(basis.source_rank(), 2);
        let null = basis.component(2);
        let expect = 1.0 / 3f64.sqrt();
        for i in 0..3 {
            assert!((null[i] - expect).abs() < 1e-12);
        }
        let r = covariance(&cloud);
        let d = basis.matrix().transpose() * &r * basis.matrix();
        assert!((d[(0, 0)] - 1.0).abs() < 1e-12);
        assert!((d[(1, 1)] - 1.0).abs() < 1e-12);
        assert!(d[(2, 2)].abs() < 1e-12);
    }

    #[test]
    fn informative_directions_match_dense_eigensolver() {
        let cloud = generate_shape(ShapeKind::Cylinder, 40, &ShapeParams::default(), 8).unwrap();
        let basis = estimate_spectrum(&cloud);
        let r = covariance(&cloud);
        let dense = SymmetricEigen::new(r.clone());
        let mut order: Vec<usize> = (0..40).collect();
        order.sort_by(|&a, &b| dense.eigenvalues[b].total_cmp(&dense.eigenvalues[a]));
        for (slot, &idx) in order.iter().take(basis.source_rank()).enumerate() {
            let ours = basis.component(slot);
            let theirs = dense.eigenvectors.column(idx);
            assert!((ours.dot(&theirs).abs() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn sign_convention_applied() {
        let cloud = generate_shape(ShapeKind::Cube, 50, &ShapeParams::default(), 2).unwrap();
        let basis = estimate_spectrum(&cloud);
        for col in basis.matrix().column_iter() {
            let (mut best, mut val) = (0, 0.0f64);
            for (i, x) in col.iter().enumerate() {
                if x.abs() > val.abs() {
                    best = i;
                    val = *x;
                }
            }
            assert!(col[best] > 0.0);
        }
    }

    #[test]
    fn degenerate_cloud_flagged() {
        let cloud = PointCloud::from_points(&[[1.0, 1.0, 1.0], [2.0, 2.0, 2.0], [5.0, 5.0, 5.0]])
            .unwrap();
        let basis = estimate_spectrum(&cloud);
        assert!(basis.is_degenerate());
        assert_eq!(basis.matrix(), &DMatrix::<f64>::identity(3, 3));
    }

    #[test]
    fn from_matrix_rejects_non_orthonormal() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(matches!(
            SpectrumBasis::from_matrix(m, 0),
            Err(Error::NotOrthonormal { .. })
        ));
    }
}
