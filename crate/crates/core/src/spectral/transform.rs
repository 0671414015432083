use nalgebra::DVector;

use super::pairs::{SpectralPairs, SupportingMatrix};
use crate::error::{Error, Result};
use crate::tensor::contract_factored;

/// `TV(f_r) = ‖f_r - A f_r^[M-1] / λ_max‖₁`, with the contraction evaluated
/// in factored form.
pub fn total_variation_component(pairs: &SpectralPairs, r: usize, order: usize) -> Result<f64> {
    if pairs.lambda_max() == 0.0 {
        return Err(Error::ZeroLambdaMax);
    }
    if r >= pairs.dim() {
        return Err(Error::OutOfRange {
            index: r,
            max: pairs.dim().saturating_sub(1),
        });
    }
    let f = pairs.basis().component(r);
    let shifted = contract_factored(pairs, &f, order)? / pairs.lambda_max();
    Ok((f - shifted).lp_norm(1))
}

/// `‖x - P_s x‖₂²`
pub fn total_variation_signal(p: &SupportingMatrix, x: &DVector<f64>) -> Result<f64> {
    Ok(p.apply_highpass(x)?.norm_squared())
}

/// Component indices sorted by ascending total variation (low to high
/// frequency), ties to the lower index.
///
/// With an orthonormal basis the contraction `A f_r^[M-1]` equals `λ_r f_r`
/// for every order, so `TV(f_r) = (1 - σ_r) ‖f_r‖₁` and no contraction is
/// needed here.
pub fn order_by_frequency(pairs: &SpectralPairs) -> Vec<usize> {
    let v = pairs.basis().matrix();
    let tv: Vec<f64> = pairs
        .sigma()
        .iter()
        .enumerate()
        .map(|(r, s)| (1.0 - s) * v.column(r).lp_norm(1))
        .collect();
    let mut order: Vec<usize> = (0..pairs.dim()).collect();
    order.sort_by(|&a, &b| tv[a].total_cmp(&tv[b]).then(a.cmp(&b)));
    order
}

/// Hypergraph Fourier coefficients of one signal, stored in frequency order:
/// slot `k` belongs to basis component `order[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HgftCoefficients {
    /// `f_rᵀ s`
    pub signed: DVector<f64>,
    /// `(f_rᵀ s)^(M-1)`
    pub powered: DVector<f64>,
    pub hyperedge_order: usize,
    pub order: Vec<usize>,
}

pub fn hgft(pairs: &SpectralPairs, s: &DVector<f64>, hyperedge_order: usize) -> Result<HgftCoefficients> {
    if hyperedge_order < 2 {
        return Err(Error::invalid("hyperedge order M must be at least 2"));
    }
    if s.len() != pairs.dim() {
        return Err(Error::DimensionMismatch {
            expected: pairs.dim(),
            found: s.len(),
        });
    }
    let raw = pairs.basis().analyze(s);
    let order = order_by_frequency(pairs);
    let signed = DVector::from_iterator(order.len(), order.iter().map(|&r| raw[r]));
    let exp = (hyperedge_order - 1) as i32;
    let powered = signed.map(|c| c.powi(exp));
    Ok(HgftCoefficients {
        signed,
        powered,
        hyperedge_order,
        order,
    })
}

/// `Σ_{k < C} signed_k f_{order[k]}`
pub fn ihgft(pairs: &SpectralPairs, coeffs: &HgftCoefficients, keep: usize) -> Result<DVector<f64>> {
    let n = pairs.dim();
    if coeffs.signed.len() != n || coeffs.order.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: coeffs.signed.len(),
        });
    }
    if keep == 0 || keep > n {
        return Err(Error::OutOfRange { index: keep, max: n });
    }
    let v = pairs.basis().matrix();
    let mut out = DVector::zeros(n);
    for k in 0..keep {
        out.axpy(coeffs.signed[k], &v.column(coeffs.order[k]), 1.0);
    }
    Ok(out)
}
