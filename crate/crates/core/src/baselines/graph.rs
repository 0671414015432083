use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pointcloud::PointCloud;

/// Neighbour rank used for the default distance threshold.
pub const DEFAULT_THRESHOLD_NEIGHBOR: usize = 8;

/// Gaussian-kernel graph with an ε-threshold on squared distance.
#[derive(Debug, Clone)]
pub struct GspGraph {
    w: DMatrix<f64>,
    laplacian: DMatrix<f64>,
    degree: Vec<f64>,
    delta: f64,
    t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphParams {
    pub delta: f64,
    pub t: f64,
}

fn squared_distances(cloud: &PointCloud) -> DMatrix<f64> {
    let c = cloud.coords();
    let n = c.nrows();
    let mut d = DMatrix::zeros(n, n);
    for j in 0..n {
        for i in (j + 1)..n {
            let mut acc = 0.0;
            for a in 0..3 {
                let diff = c[(i, a)] - c[(j, a)];
                acc += diff * diff;
            }
            d[(i, j)] = acc;
            d[(j, i)] = acc;
        }
    }
    d
}

/// Data-adaptive `(δ, t)`: `t` is the median over points of the squared
/// distance to the 8th nearest neighbour; `δ²` is the mean of the nonzero
/// squared distances kept by that threshold.
pub fn default_graph_params(cloud: &PointCloud) -> Result<GraphParams> {
    let n = cloud.len();
    if n < 2 {
        return Err(Error::invalid("a graph needs at least two points"));
    }
    let d = squared_distances(cloud);
    let k = DEFAULT_THRESHOLD_NEIGHBOR.min(n - 1);
    let mut kth: Vec<f64> = (0..n)
        .map(|i| {
            let mut row: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| d[(i, j)]).collect();
            row.select_nth_unstable_by(k - 1, f64::total_cmp);
            row[k - 1]
        })
        .collect();
    kth.sort_by(f64::total_cmp);
    let t = if n % 2 == 1 {
        kth[n / 2]
    } else {
        0.5 * (kth[n / 2 - 1] + kth[n / 2])
    };
    let (mut sum, mut count) = (0.0, 0usize);
    for j in 0..n {
        for i in (j + 1)..n {
            let v = d[(i, j)];
            if v > 0.0 && v <= t {
                sum += v;
                count += 1;
            }
        }
    }
    let t = if t > 0.0 { t } else { f64::MIN_POSITIVE };
    let delta2 = if count > 0 { sum / count as f64 } else { t };
    Ok(GraphParams {
        delta: delta2.sqrt(),
        t,
    })
}

/// `W_ij = exp(-‖s_i - s_j‖² / δ²)` when `‖s_i - s_j‖² <= t` and `i != j`.
pub fn build_gaussian_graph(cloud: &PointCloud, delta: f64, t: f64) -> Result<GspGraph> {
    for (name, v) in [("delta", delta), ("t", t)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::invalid(format!("{name} must be positive, got {v}")));
        }
    }
    let d = squared_distances(cloud);
    let n = cloud.len();
    let d2 = delta * delta;
    let w = DMatrix::from_fn(n, n, |i, j| {
        if i != j && d[(i, j)] <= t {
            (-d[(i, j)] / d2).exp()
        } else {
            0.0
        }
    });
    let degree: Vec<f64> = w.row_iter().map(|r| r.sum()).collect();
    let mut laplacian = -w.clone();
    for (i, &deg) in degree.iter().enumerate() {
        laplacian[(i, i)] = deg;
    }
    Ok(GspGraph {
        w,
        laplacian,
        degree,
        delta,
        t,
    })
}

pub fn build_default_graph(cloud: &PointCloud) -> Result<GspGraph> {
    let p = default_graph_params(cloud)?;
    build_gaussian_graph(cloud, p.delta, p.t)
}

impl GspGraph {
    pub fn dim(&self) -> usize {
        self.w.nrows()
    }

    pub fn adjacency(&self) -> &DMatrix<f64> {
        &self.w
    }

    /// `L = D - W`
    pub fn laplacian(&self) -> &DMatrix<f64> {
        &self.laplacian
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degree
    }

    pub fn params(&self) -> GraphParams {
        GraphParams {
            delta: self.delta,
            t: self.t,
        }
    }

    pub fn is_isolated(&self, i: usize) -> bool {
        self.degree[i] == 0.0
    }

    /// `D⁻¹ W` with zero rows for isolated nodes.
    pub fn row_normalized(&self) -> DMatrix<f64> {
        let mut m = self.w.clone();
        for (i, mut row) in m.row_iter_mut().enumerate() {
            if self.degree[i] > 0.0 {
                row /= self.degree[i];
            }
        }
        m
    }

    /// Edge list CSV `i,j,weight` over `i < j` with nonzero weight.
    pub fn edge_list_csv(&self) -> String {
        let mut out = String::from("i,j,weight\n");
        let n = self.dim();
        for i in 0..n {
            for j in (i + 1)..n {
                let v = self.w[(i, j)];
                if v != 0.0 {
                    let _ = writeln!(out, "{i},{j},{v}");
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coincident_points_have_unit_weight() {
        let c = PointCloud::from_points(&[[0.0; 3], [0.0; 3], [5.0, 0.0, 0.0]]).unwrap();
        let g = build_gaussian_graph(&c, 1.0, 1.0).unwrap();
        assert_eq!(g.adjacency()[(0, 1)], 1.0);
        assert_eq!(g.adjacency()[(0, 0)], 0.0);
        assert_eq!(g.adjacency()[(0, 2)], 0.0);
        assert!(g.is_isolated(2));
    }

    #[test]
    fn threshold_is_inclusive() {
        let c = PointCloud::from_points(&[[0.0; 3], [1.0, 0.0, 0.0]]).unwrap();
        assert!(build_gaussian_graph(&c, 1.0, 1.0).unwrap().adjacency()[(0, 1)] > 0.0);
        assert_eq!(build_gaussian_graph(&c, 1.0, 1.0 - 1e-12).unwrap().adjacency()[(0, 1)], 0.0);
    }

    #[test]
    fn equilateral_triangle() {
        let h = 3f64.sqrt() / 2.0;
        let c = PointCloud::from_points(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.5, h, 0.0]]).unwrap();
        let g = build_gaussian_graph(&c, 2.0, 1.5).unwrap();
        let expect = (-1.0f64 / 4.0).exp();
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!((g.adjacency()[(i, j)] - expect).abs() < 1e-12);
                }
            }
            assert!(g.laplacian().row(i).sum().abs() < 1e-12);
        }
        assert_eq!(g.edge_list_csv().lines().count(), 4);
    }

    #[test]
    fn default_params_positive() {
        let c = crate::pointcloud::generate_shape(
            crate::pointcloud::ShapeKind::Sphere,
            200,
            &Default::default(),
            1,
        )
        .unwrap();
        let p = default_graph_params(&c).unwrap();
        assert!(p.delta > 0.0 && p.t > 0.0);
        let g = build_gaussian_graph(&c, p.delta, p.t).unwrap();
        assert!((g.adjacency() - g.adjacency().transpose()).amax() == 0.0);
    }
}
