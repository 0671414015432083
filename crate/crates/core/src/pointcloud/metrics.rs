use serde::{Deserialize, Serialize};

use super::PointCloud;
use crate::error::{Error, Result};

/// Reconstruction error between two clouds of equal size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    /// `sum_i sum_j |X_ji - Y_ji|`
    pub l1_error: f64,
    /// `(1 / 3N) sum (X_ji - Y_ji)^2`
    pub mse: f64,
    pub per_axis: [f64; 3],
}

pub fn error_metrics(observed: &PointCloud, reference: &PointCloud) -> Result<ErrorReport> {
    if observed.len() != reference.len() {
        return Err(Error::DimensionMismatch {
            expected: reference.len(),
            found: observed.len(),
        });
    }
    let mut per_axis = [0.0; 3];
    let mut sq = 0.0;
    for (axis, slot) in per_axis.iter_mut().enumerate() {
        for (a, b) in observed
            .coords()
            .column(axis)
            .iter()
            .zip(reference.coords().column(axis).iter())
        {
            let d = a - b;
            *slot += d.abs();
            sq += d * d;
        }
    }
    Ok(ErrorReport {
        l1_error: per_axis.iter().sum(),
        mse: sq / (3 * observed.len()) as f64,
        per_axis,
    })
}
