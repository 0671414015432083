//! Feature-preserving resampling with the Haar-like high-pass filter
//! `H = I - P_s`, and bandlimited downsampling through the hypergraph
//! Fourier transform.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::pointcloud::{error_metrics, PointCloud};
use crate::spectral::{hgft, ihgft, SpectralPairs, SupportingMatrix};

/// Per-point high-pass energy `‖s_i - Σ_j (P_s)_ij s_j‖²`.
#[derive(Debug, Clone, PartialEq)]
pub struct HpfScores {
    pub scores: DVector<f64>,
}

pub fn hpf_scores(cloud: &PointCloud, p: &SupportingMatrix) -> Result<HpfScores> {
    if cloud.len() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: cloud.len(),
        });
    }
    let mut scores = DVector::zeros(cloud.len());
    for col in cloud.columns() {
        let h = p.apply_highpass(&col)?;
        scores += h.component_mul(&h);
    }
    Ok(HpfScores { scores })
}

/// The `k` highest-scoring points (ties to the lower index) and their
/// indices in descending score order.
pub fn sample_top_k(scores: &HpfScores, cloud: &PointCloud, k: usize) -> Result<(PointCloud, Vec<usize>)> {
    let n = cloud.len();
    if scores.scores.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: scores.scores.len(),
        });
    }
    if k == 0 || k > n {
        return Err(Error::OutOfRange { index: k, max: n });
    }
    let s = &scores.scores;
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| s[b].total_cmp(&s[a]).then(a.cmp(&b)));
    idx.truncate(k);
    Ok((cloud.select(&idx)?, idx))
}

#[derive(Debug, Clone)]
pub struct HgftDownsample {
    /// Kept signed coefficients per coordinate, in frequency order.
    pub coefficients: [DVector<f64>; 3],
    pub recovered: PointCloud,
}

/// Keeps the first `C` frequency-ordered coefficients of each coordinate and
/// reconstructs with the signed inverse transform.
pub fn hgft_downsample(cloud: &PointCloud, pairs: &SpectralPairs, keep: usize) -> Result<HgftDownsample> {
    let n = pairs.dim();
    if cloud.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: cloud.len(),
        });
    }
    if keep == 0 || keep > n {
        return Err(Error::OutOfRange { index: keep, max: n });
    }
    let cols = cloud.columns();
    let mut kept: Vec<DVector<f64>> = Vec::with_capacity(3);
    let mut rec: Vec<DVector<f64>> = Vec::with_capacity(3);
    for col in &cols {
        let c = hgft(pairs, col, 3)?;
        rec.push(ihgft(pairs, &c, keep)?);
        kept.push(c.signed.rows(0, keep).into_owned());
    }
    let [a, b, c]: [DVector<f64>; 3] = kept.try_into().expect("three coordinates");
    let [x, y, z]: [DVector<f64>; 3] = rec.try_into().expect("three coordinates");
    Ok(HgftDownsample {
        coefficients: [a, b, c],
        recovered: PointCloud::from_columns(&[x, y, z])?,
    })
}

/// Keep count for a sampling ratio, `C = round(ratio * N)` clamped to `1..=N`.
pub fn keep_for_ratio(ratio: f64, n: usize) -> Result<usize> {
    if !(ratio > 0.0 && ratio <= 1.0) {
        return Err(Error::invalid(format!("sampling ratio must lie in (0, 1], got {ratio}")));
    }
    Ok(((ratio * n as f64).round() as usize).clamp(1, n))
}

/// MSE of the recovered cloud at each keep count.
pub fn hgft_mse_curve(cloud: &PointCloud, pairs: &SpectralPairs, keeps: &[usize]) -> Result<Vec<f64>> {
    keeps
        .iter()
        .map(|&c| Ok(error_metrics(&hgft_downsample(cloud, pairs, c)?.recovered, cloud)?.mse))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{random_pairs, SpectrumBasis};
    use nalgebra::DMatrix;

    fn small_cloud() -> PointCloud {
        PointCloud::from_points(&[
            [0.0, 1.0, 2.0],
            [1.0, -1.0, 0.5],
            [0.3, 0.3, 0.3],
            [2.0, 0.0, -1.0],
            [-0.5, 0.2, 0.1],
            [1.5, 1.5, 0.0],
        ])
        .unwrap()
    }

    #[test]
    fn all_pass_and_all_stop() {
        let c = small_cloud();
        let ones = SpectralPairs::new(SpectrumBasis::identity(6), DVector::from_element(6, 1.0), 1.0).unwrap();
        assert!(hpf_scores(&c, &ones.supporting_matrix()).unwrap().scores.iter().all(|&s| s == 0.0));
        let mut sigma = DVector::zeros(6);
        sigma[0] = 1.0;
        let p = SpectralPairs::new(random_pairs(6, 1).basis().clone(), sigma, 1.0).unwrap();
        let s = hpf_scores(&c, &p.supporting_matrix()).unwrap();
        let h = DMatrix::<f64>::identity(6, 6) - p.supporting_matrix().dense();
        let filtered = h * c.coords();
        for i in 0..6 {
            assert!((s.scores[i] - filtered.row(i).norm_squared()).abs() < 1e-10);
        }
    }

    #[test]
    fn top_k_tie_break() {
        let c = PointCloud::new(DMatrix::from_fn(9, 3, |i, _| i as f64)).unwrap();
        let mut scores = DVector::from_element(9, 0.1);
        scores[3] = 2.0;
        scores[7] = 2.0;
        let (sub, idx) = sample_top_k(&HpfScores { scores: scores.clone() }, &c, 1).unwrap();
        assert_eq!(idx, vec![3]);
        assert_eq!(sub.point(0), [3.0; 3]);
        let (_, all) = sample_top_k(&HpfScores { scores }, &c, 9).unwrap();
        assert_eq!(&all[..3], &[3, 7, 0]);
        assert!(sample_top_k(&HpfScores { scores: DVector::zeros(9) }, &c, 0).is_err());
    }

    #[test]
    fn full_keep_recovers() {
        let c = small_cloud();
        let pairs = random_pairs(6, 3);
        let out = hgft_downsample(&c, &pairs, 6).unwrap();
        assert!((out.recovered.coords() - c.coords()).amax() < 1e-9);
        assert_eq!(out.coefficients[0].len(), 6);
        assert!(hgft_downsample(&c, &pairs, 7).is_err());
    }

    #[test]
    fn ratio_to_keep() {
        assert_eq!(keep_for_ratio(0.3, 397).unwrap(), 119);
        assert_eq!(keep_for_ratio(1.0, 10).unwrap(), 10);
        assert_eq!(keep_for_ratio(0.01, 10).unwrap(), 1);
        assert!(keep_for_ratio(0.0, 10).is_err());
    }
}
