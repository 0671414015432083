use nalgebra::{DMatrix, SymmetricEigen};

use super::graph::GspGraph;
use crate::error::{Error, Result};
use crate::pointcloud::PointCloud;

/// Laplacian eigenvectors sorted by ascending eigenvalue (ties by index).
#[derive(Debug, Clone)]
pub struct GftBasis {
    pub eigenvalues: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

pub fn gft_basis(graph: &GspGraph) -> GftBasis {
    let eig = SymmetricEigen::new(graph.laplacian().clone());
    let n = graph.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    let mut vectors = DMatrix::zeros(n, n);
    for (slot, &k) in order.iter().enumerate() {
        vectors.set_column(slot, &eig.eigenvectors.column(k));
    }
    GftBasis {
        eigenvalues: order.iter().map(|&k| eig.eigenvalues[k]).collect(),
        vectors,
    }
}

/// Projects each coordinate onto the first `keep` GFT components.
pub fn gft_project(cloud: &PointCloud, basis: &GftBasis, keep: usize) -> Result<PointCloud> {
    let n = basis.vectors.nrows();
    if cloud.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: cloud.len(),
        });
    }
    if keep == 0 || keep > n {
        return Err(Error::OutOfRange { index: keep, max: n });
    }
    let u = basis.vectors.columns(0, keep);
    let coeffs = u.tr_mul(cloud.coords());
    PointCloud::new(u * coeffs)
}

pub fn gft_downsample(cloud: &PointCloud, graph: &GspGraph, keep: usize) -> Result<PointCloud> {
    gft_project(cloud, &gft_basis(graph), keep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::build_default_graph;
    use crate::pointcloud::{error_metrics, generate_shape, ShapeKind, ShapeParams};

    #[test]
    fn full_and_constant_recovery() {
        let c = generate_shape(ShapeKind::Sphere, 80, &ShapeParams::default(), 2).unwrap();
        let g = build_default_graph(&c).unwrap();
        let b = gft_basis(&g);
        let back = gft_project(&c, &b, 80).unwrap();
        assert!((back.coords() - c.coords()).amax() < 1e-8);
        let mut flat = c.coords().clone();
        flat.column_mut(2).fill(0.7);
        let flat = PointCloud::new(flat).unwrap();
        // constants sit in the null space when the graph is connected
        if b.eigenvalues[1] > 1e-9 {
            let one = gft_project(&flat, &b, 1).unwrap();
            assert!(one.column(2).iter().all(|z| (z - 0.7).abs() < 1e-9));
        }
        let mut last = f64::INFINITY;
        for keep in [5, 20, 40, 60, 80] {
            let mse = error_metrics(&gft_project(&c, &b, keep).unwrap(), &c).unwrap().mse;
            assert!(mse <= last + 1e-15);
            last = mse;
        }
    }
}
