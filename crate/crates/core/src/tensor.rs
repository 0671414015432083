//! Supersymmetric adjacency tensors in orthogonal CP form.
//!
//! Production code only ever touches the factored `(V, λ)` representation.
//! [`AdjacencyTensor`] materializes the dense `N^M` array for inspection and
//! as a test oracle, behind [`DEFAULT_DENSE_CAP`].

use std::fmt::Write as _;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::spectral::SpectralPairs;

pub const DEFAULT_DENSE_CAP: u128 = 10_000_000;

/// Dense `M`-th order tensor with `N^M` entries, row-major (last index fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacencyTensor {
    order: usize,
    dim: usize,
    entries: Vec<f64>,
}

impl AdjacencyTensor {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, index: &[usize]) -> f64 {
        assert_eq!(index.len(), self.order, "index arity must equal tensor order");
        self.entries[self.flat(index)]
    }

    fn flat(&self, index: &[usize]) -> usize {
        index.iter().fold(0, |acc, &i| {
            assert!(i < self.dim, "tensor index out of range");
            acc * self.dim + i
        })
    }

    fn unflat(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.order];
        for slot in idx.iter_mut().rev() {
            *slot = flat % self.dim;
            flat /= self.dim;
        }
        idx
    }

    /// `Σ a²` over every entry.
    pub fn frobenius_sq(&self) -> f64 {
        self.entries.iter().map(|a| a * a).sum()
    }

    pub fn min_entry(&self) -> f64 {
        self.entries.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest `|a_π(i) - a_i|` over all entries and index permutations `π`.
    pub fn symmetry_defect(&self) -> f64 {
        let perms = permutations(self.order);
        let mut worst = 0.0f64;
        for flat in 0..self.entries.len() {
            let idx = self.unflat(flat);
            let a = self.entries[flat];
            for p in &perms {
                let permuted: Vec<usize> = p.iter().map(|&k| idx[k]).collect();
                worst = worst.max((self.entries[self.flat(&permuted)] - a).abs());
            }
        }
        worst
    }

    /// `out_i = Σ a_{i i2 .. iM} s_{i2} .. s_{iM}`
    pub fn contract(&self, s: &DVector<f64>) -> Result<DVector<f64>> {
        if s.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: s.len(),
            });
        }
        let mut cur = self.entries.clone();
        for _ in 1..self.order {
            cur = cur
                .chunks_exact(self.dim)
                .map(|chunk| chunk.iter().zip(s.iter()).map(|(a, b)| a * b).sum())
                .collect();
        }
        Ok(DVector::from_vec(cur))
    }

    /// CSV dump with header `i1,..,iM,value` (zero-based indices).
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = (1..=self.order).map(|k| format!("i{k}")).collect();
        let _ = writeln!(out, "{},value", header.join(","));
        for (flat, a) in self.entries.iter().enumerate() {
            let idx: Vec<String> = self.unflat(flat).iter().map(|i| i.to_string()).collect();
            let _ = writeln!(out, "{},{a}", idx.join(","));
        }
        out
    }
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for k in 0..used.len() {
            if !used[k] {
                used[k] = true;
                prefix.push(k);
                rec(prefix, used, out);
                prefix.pop();
                used[k] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; m], &mut out);
    out
}

/// `a_{i1..iM} = Σ_r λ_r f_{r,i1} .. f_{r,iM}` under the default cap.
pub fn reconstruct_adjacency(pairs: &SpectralPairs, order: usize) -> Result<AdjacencyTensor> {
    reconstruct_adjacency_capped(pairs, order, DEFAULT_DENSE_CAP)
}

pub fn reconstruct_adjacency_capped(pairs: &SpectralPairs, order: usize, cap: u128) -> Result<AdjacencyTensor> {
    if order < 2 {
        return Err(Error::invalid("tensor order M must be at least 2"));
    }
    let n = pairs.dim();
    let entries = (n as u128).checked_pow(order as u32).unwrap_or(u128::MAX);
    if entries > cap {
        return Err(Error::CapExceeded { entries, cap });
    }
    let v = pairs.basis().matrix();
    let lambdas = pairs.lambdas();
    let mut dense = vec![0.0; entries as usize];
    let mut term = Vec::with_capacity(entries as usize);
    let mut next = Vec::with_capacity(entries as usize);
    for r in 0..n {
        if lambdas[r] == 0.0 {
            continue;
        }
        let f = v.column(r);
        term.clear();
        term.push(lambdas[r]);
        for _ in 0..order {
            next.clear();
            for &t in &term {
                next.extend(f.iter().map(|x| t * x));
            }
            std::mem::swap(&mut term, &mut next);
        }
        for (d, t) in dense.iter_mut().zip(&term) {
            *d += t;
        }
    }
    Ok(AdjacencyTensor {
        order,
        dim: n,
        entries: dense,
    })
}

/// `Σ_r λ_r (f_rᵀ s)^(M-1) f_r` without materializing the tensor.
pub fn contract_factored(pairs: &SpectralPairs, s: &DVector<f64>, order: usize) -> Result<DVector<f64>> {
    if order < 2 {
        return Err(Error::invalid("tensor order M must be at least 2"));
    }
    if s.len() != pairs.dim() {
        return Err(Error::DimensionMismatch {
            expected: pairs.dim(),
            found: s.len(),
        });
    }
    let exp = (order - 1) as i32;
    let coeffs = pairs
        .basis()
        .analyze(s)
        .zip_map(&pairs.lambdas(), |c, l| l * c.powi(exp));
    Ok(pairs.basis().synthesize(&coeffs))
}

/// Contraction `A s^[M-1]` from either representation.
pub trait Contract {
    fn contract_signal(&self, s: &DVector<f64>, order: usize) -> Result<DVector<f64>>;
}

impl Contract for AdjacencyTensor {
    fn contract_signal(&self, s: &DVector<f64>, order: usize) -> Result<DVector<f64>> {
        if order != self.order {
            return Err(Error::DimensionMismatch {
                expected: self.order,
                found: order,
            });
        }
        self.contract(s)
    }
}

impl Contract for SpectralPairs {
    fn contract_signal(&self, s: &DVector<f64>, order: usize) -> Result<DVector<f64>> {
        contract_factored(self, s, order)
    }
}

/// `‖A‖² = Σ_r λ_r²` for an orthonormal basis.
pub fn tensor_norm_sq(pairs: &SpectralPairs) -> f64 {
    pairs.lambdas().norm_squared()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{random_pairs, SpectrumBasis};

    fn diag_pairs(lambdas: &[f64]) -> SpectralPairs {
        SpectralPairs::from_lambdas(
            SpectrumBasis::identity(lambdas.len()),
            &DVector::from_row_slice(lambdas),
        )
        .unwrap()
    }

    #[test]
    fn hand_expansion_identity_basis() {
        let t = reconstruct_adjacency(&diag_pairs(&[2.0, 1.0]), 3).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    let expect = match (i, j, k) {
                        (0, 0, 0) => 2.0,
                        (1, 1, 1) => 1.0,
                        _ => 0.0,
                    };
                    assert_eq!(t.get(&[i, j, k]), expect);
                }
            }
        }
        assert_eq!(t.frobenius_sq(), 5.0);
        assert_eq!(tensor_norm_sq(&diag_pairs(&[2.0, 1.0])), 5.0);
    }

    #[test]
    fn zero_coefficients_give_zero_tensor() {
        let p = diag_pairs(&[0.0, 0.0, 0.0]);
        let t = reconstruct_adjacency(&p, 3).unwrap();
        assert!(t.entries().iter().all(|&a| a == 0.0));
        assert_eq!(tensor_norm_sq(&p), 0.0);
    }

    #[test]
    fn dense_and_factored_agree() {
        for seed in 0..5 {
            let p = random_pairs(6, seed);
            for order in [2, 3, 4] {
                let t = reconstruct_adjacency(&p, order).unwrap();
                let s = DVector::from_fn(6, |i, _| ((i + seed as usize) as f64).sin());
                let a = t.contract_signal(&s, order).unwrap();
                let b = p.contract_signal(&s, order).unwrap();
                assert!((a - b).abs().max() < 1e-10);
            }
        }
    }

    #[test]
    fn eigen_identity_and_symmetry() {
        let p = random_pairs(5, 9);
        let l = p.lambdas();
        for r in 0..5 {
            let f = p.basis().component(r);
            let out = contract_factored(&p, &f, 3).unwrap();
            assert!((out - &f * l[r]).abs().max() < 1e-12);
        }
        assert!(reconstruct_adjacency(&p, 3).unwrap().symmetry_defect() <= 1e-12);
        assert!(contract_factored(&p, &DVector::zeros(5), 3).unwrap().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn cap_enforced() {
        let p = random_pairs(30, 1);
        assert!(matches!(
            reconstruct_adjacency_capped(&p, 3, 1000),
            Err(Error::CapExceeded { entries: 27000, cap: 1000 })
        ));
    }

    #[test]
    fn csv_dump() {
        let csv = reconstruct_adjacency(&diag_pairs(&[2.0, 1.0]), 3).unwrap().to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("i1,i2,i3,value"));
        assert_eq!(lines.next(), Some("0,0,0,2"));
        assert_eq!(csv.lines().count(), 9);
    }
}
