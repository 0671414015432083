use std::cmp::Ordering;
use std::collections::BinaryHeap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::spectral::SpectrumBasis;

/// Adjacency entries below `-VIOLATION_TOLERANCE` count as violated.
pub const VIOLATION_TOLERANCE: f64 = 1e-8;

/// A tensor entry `a_{ijk} = Σ_r σ_r f_{r,i} f_{r,j} f_{r,k}` with `i <= j <= k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViolatedTriple {
    pub triple: [usize; 3],
    pub value: f64,
}

impl ViolatedTriple {
    fn rank(&self, other: &Self) -> Ordering {
        self.value
            .total_cmp(&other.value)
            .then_with(|| self.triple.cmp(&other.triple))
    }
}

/// Heap wrapper: the worst kept entry (largest value) sits on top.
struct Ranked(ViolatedTriple);

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        self.0.rank(&other.0) == Ordering::Equal
    }
}
impl Eq for Ranked {}
impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.rank(&other.0)
    }
}

struct TopK {
    budget: usize,
    heap: BinaryHeap<Ranked>,
}

impl TopK {
    fn new(budget: usize) -> Self {
        Self {
            budget,
            heap: BinaryHeap::with_capacity(budget + 1),
        }
    }

    fn offer(&mut self, triple: [usize; 3], value: f64) {
        if !(value < -VIOLATION_TOLERANCE) {
            return;
        }
        let cand = Ranked(ViolatedTriple { triple, value });
        if self.heap.len() < self.budget {
            self.heap.push(cand);
        } else if let Some(top) = self.heap.peek() {
            if cand < *top {
                self.heap.pop();
                self.heap.push(cand);
            }
        }
    }

    fn into_sorted(self) -> Vec<ViolatedTriple> {
        self.heap.into_sorted_vec().into_iter().map(|r| r.0).collect()
    }
}

pub fn triple_value(basis: &SpectrumBasis, sigma: &DVector<f64>, [i, j, k]: [usize; 3]) -> f64 {
    let v = basis.matrix();
    (0..v.ncols())
        .map(|r| sigma[r] * v[(i, r)] * v[(j, r)] * v[(k, r)])
        .sum()
}

/// Per-component products `f_{r,i} f_{r,j} f_{r,k}`, the cut row for `triple`.
pub fn cut_coefficients(v: &DMatrix<f64>, [i, j, k]: [usize; 3]) -> DVector<f64> {
    DVector::from_fn(v.ncols(), |r, _| v[(i, r)] * v[(j, r)] * v[(k, r)])
}

/// Exhaustive scan of all `i <= j <= k`, returning up to `budget` entries
/// below `-1e-8`, most negative first (ties by index triple).
///
/// For each `i` the block `B_i = V diag(σ ∘ V[i,:]) Vᵀ` over rows `j >= i`
/// holds every entry `a_{ijk}`; total cost is `O(N⁴ / 3)`.
pub fn most_violated_triples(basis: &SpectrumBasis, sigma: &DVector<f64>, budget: usize) -> Vec<ViolatedTriple> {
    let budget = budget.max(1);
    let v = basis.matrix();
    let n = v.nrows();
    let mut top = TopK::new(budget);
    if sigma.iter().all(|&s| s == 0.0) {
        return Vec::new();
    }
    for i in 0..n {
        let tail = v.rows(i, n - i);
        let mut scaled = tail.clone_owned();
        for (r, mut col) in scaled.column_iter_mut().enumerate() {
            col *= sigma[r] * v[(i, r)];
        }
        let block = scaled * tail.transpose();
        for a in 0..n - i {
            for b in a..n - i {
                top.offer([i, i + a, i + b], block[(a, b)]);
            }
        }
    }
    top.into_sorted()
}

/// `T[i, j] = a_{iij} = Σ_r σ_r f_{r,i}² f_{r,j}`, the `(i, i, j)` family.
pub(crate) fn diagonal_family(v: &DMatrix<f64>, sigma: &DVector<f64>) -> DMatrix<f64> {
    let mut sq = v.component_mul(v);
    for (r, mut col) in sq.column_iter_mut().enumerate() {
        col *= sigma[r];
    }
    sq * v.transpose()
}

/// Adds `delta (f_r ∘ f_r) f_rᵀ` to a diagonal-family matrix, i.e. the
/// effect of changing `σ_r` by `delta`.
pub(crate) fn update_diagonal_family(t: &mut DMatrix<f64>, v: &DMatrix<f64>, r: usize, delta: f64) {
    let f = v.column(r);
    let n = f.len();
    for j in 0..n {
        let fj = delta * f[j];
        if fj == 0.0 {
            continue;
        }
        for i in 0..n {
            t[(i, j)] += f[i] * f[i] * fj;
        }
    }
}

pub(crate) fn family_violations(t: &DMatrix<f64>, budget: usize) -> Vec<ViolatedTriple> {
    let mut top = TopK::new(budget.max(1));
    let n = t.nrows();
    for j in 0..n {
        for i in 0..n {
            let triple = if i <= j { [i, i, j] } else { [j, i, i] };
            top.offer(triple, t[(i, j)]);
        }
    }
    top.into_sorted()
}

/// Cut separation used inside the solver: the cheap `(i, i, j)` family
/// first (`O(N³)` once), then the exhaustive scan only if that family is
/// clean. Any returned triple is genuinely violated; an empty result means
/// no entry at all is below `-1e-8`.
pub(crate) fn separate(
    basis: &SpectrumBasis,
    sigma: &DVector<f64>,
    budget: usize,
    family: Option<DMatrix<f64>>,
) -> Vec<ViolatedTriple> {
    let t = family.unwrap_or_else(|| diagonal_family(basis.matrix(), sigma));
    let found = family_violations(&t, budget);
    if !found.is_empty() {
        return found;
    }
    most_violated_triples(basis, sigma, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::random_basis;

    fn brute_force(basis: &SpectrumBasis, sigma: &DVector<f64>) -> Vec<ViolatedTriple> {
        let n = basis.dim();
        let mut all = Vec::new();
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    let value = triple_value(basis, sigma, [i, j, k]);
                    if value < -VIOLATION_TOLERANCE {
                        all.push(ViolatedTriple {
                            triple: [i, j, k],
                            value,
                        });
                    }
                }
            }
        }
        all.sort_by(|a, b| a.rank(b));
        all
    }

    #[test]
    fn identity_basis_has_no_violations() {
        let sigma = DVector::from_row_slice(&[0.3, 1.0, 0.0, 0.8]);
        assert!(most_violated_triples(&SpectrumBasis::identity(4), &sigma, 10).is_empty());
    }

    #[test]
    fn zero_sigma_has_no_violations() {
        let b = random_basis(6, 1);
        assert!(most_violated_triples(&b, &DVector::zeros(6), 10).is_empty());
    }

    #[test]
    fn matches_exhaustive_enumeration() {
        for seed in 0..6 {
            let b = random_basis(4 + seed as usize % 3, seed);
            let n = b.dim();
            let sigma = DVector::from_fn(n, |r, _| ((r as f64 + 1.0) * 0.29 + seed as f64 * 0.1).fract());
            let oracle = brute_force(&b, &sigma);
            let full = most_violated_triples(&b, &sigma, 1000);
            assert_eq!(full.len(), oracle.len());
            for (a, o) in full.iter().zip(&oracle) {
                assert_eq!(a.triple, o.triple);
                assert!((a.value - o.value).abs() < 1e-14);
            }
            let few = most_violated_triples(&b, &sigma, 3);
            assert_eq!(few.len(), oracle.len().min(3));
            for (a, o) in few.iter().zip(&oracle) {
                assert_eq!(a.triple, o.triple);
            }
        }
    }

    #[test]
    fn family_update_matches_rebuild() {
        let b = random_basis(9, 4);
        let sigma = DVector::from_fn(9, |r, _| (r as f64 * 0.13).fract());
        let mut t = diagonal_family(b.matrix(), &sigma);
        let mut moved = sigma.clone();
        moved[5] = 1.0;
        update_diagonal_family(&mut t, b.matrix(), 5, 1.0 - sigma[5]);
        let fresh = diagonal_family(b.matrix(), &moved);
        assert!((t - &fresh).abs().max() < 1e-14);
        for i in 0..9 {
            for j in 0..9 {
                let tv = triple_value(&b, &moved, [i, i, j]);
                assert!((fresh[(i, j)] - tv).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn staged_separation_is_exact_when_empty() {
        let b = random_basis(7, 8);
        let sigma = DVector::from_fn(7, |r, _| if r == 2 { 1.0 } else { 0.05 });
        let found = separate(&b, &sigma, 50, None);
        let oracle = brute_force(&b, &sigma);
        assert_eq!(found.is_empty(), oracle.is_empty());
        for t in &found {
            assert!(t.value < -VIOLATION_TOLERANCE);
            assert!((triple_value(&b, &sigma, t.triple) - t.value).abs() < 1e-14);
        }
    }
}
