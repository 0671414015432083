//! Point-cloud data model: an `N x 3` coordinate matrix whose columns are the
//! three coordinate signals `X_1, X_2, X_3` and whose rows are the points.

mod io;
mod metrics;
mod noise;
mod shapes;

pub use io::{load, parse_ply, parse_xyz, save, to_ply_string, to_xyz_string, Format};
pub use metrics::{error_metrics, ErrorReport};
pub use noise::{add_noise, NoiseKind, NoiseSpec, DEFAULT_IMPULSE_SPREAD};
pub use shapes::{cube_edge_distance, generate_shape, ShapeKind, ShapeParams};

use nalgebra::{DMatrix, DVector};
use rand::seq::index;

use crate::error::{Error, Result};
use crate::rng;

/// A point cloud with `N >= 1` finite points.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    coords: DMatrix<f64>,
}

impl PointCloud {
    pub fn new(coords: DMatrix<f64>) -> Result<Self> {
        if coords.ncols() != 3 {
            return Err(Error::DimensionMismatch {
                expected: 3,
                found: coords.ncols(),
            });
        }
        if coords.nrows() == 0 {
            return Err(Error::Empty);
        }
        if let Some(pos) = coords.iter().position(|v| !v.is_finite()) {
            // column-major storage
            return Err(Error::NonFinite {
                line: pos % coords.nrows() + 1,
            });
        }
        Ok(Self { coords })
    }

    pub fn from_points(points: &[[f64; 3]]) -> Result<Self> {
        let n = points.len();
        Self::new(DMatrix::from_fn(n, 3, |i, j| points[i][j]))
    }

    pub fn from_columns(columns: &[DVector<f64>; 3]) -> Result<Self> {
        let n = columns[0].len();
        if columns.iter().any(|c| c.len() != n) {
            return Err(Error::invalid("coordinate columns differ in length"));
        }
        Self::new(DMatrix::from_fn(n, 3, |i, j| columns[j][i]))
    }

    pub fn len(&self) -> usize {
        self.coords.nrows()
    }

    /// Always false; kept for the `len`/`is_empty` convention.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coords(&self) -> &DMatrix<f64> {
        &self.coords
    }

    pub fn into_coords(self) -> DMatrix<f64> {
        self.coords
    }

    pub fn point(&self, i: usize) -> [f64; 3] {
        [self.coords[(i, 0)], self.coords[(i, 1)], self.coords[(i, 2)]]
    }

    pub fn points(&self) -> impl Iterator<Item = [f64; 3]> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }

    /// Coordinate signal `X_axis` (0-based axis).
    pub fn column(&self, axis: usize) -> DVector<f64> {
        self.coords.column(axis).into_owned()
    }

    pub fn columns(&self) -> [DVector<f64>; 3] {
        [self.column(0), self.column(1), self.column(2)]
    }

    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.len()) {
            return Err(Error::OutOfRange {
                index: bad + 1,
                max: self.len(),
            });
        }
        Self::new(DMatrix::from_fn(indices.len(), 3, |i, j| {
            self.coords[(indices[i], j)]
        }))
    }

    /// Uniform subsample of `n` distinct points, returned in ascending index order.
    pub fn subsample(&self, n: usize, seed: u64) -> Result<Self> {
        if n == 0 || n > self.len() {
            return Err(Error::OutOfRange {
                index: n,
                max: self.len(),
            });
        }
        let mut rng = rng::seeded(seed);
        let mut picked = index::sample(&mut rng, self.len(), n).into_vec();
        picked.sort_unstable();
        self.select(&picked)
    }
}
