use nalgebra::DMatrix;

use super::graph::GspGraph;
use crate::error::{Error, Result};
use crate::pointcloud::PointCloud;

pub const DEFAULT_TV_ALPHA: f64 = 1.0;
pub const DEFAULT_LR_ALPHA: f64 = 1.0;
pub const DEFAULT_MLS_ITERATIONS: usize = 3;
pub const DEFAULT_MLS_STEP: f64 = 0.5;

fn check(x: &PointCloud, graph: &GspGraph, alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::invalid(format!("alpha must be positive, got {alpha}")));
    }
    if x.len() != graph.dim() {
        return Err(Error::DimensionMismatch {
            expected: graph.dim(),
            found: x.len(),
        });
    }
    Ok(())
}

fn spd_solve(a: DMatrix<f64>, rhs: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let ch = a
        .cholesky()
        .ok_or_else(|| Error::Numerical("system matrix is not positive definite".into()))?;
    Ok(ch.solve(rhs))
}

/// `min ‖X_i - Y_i‖² + α ‖(I - W̃) Y_i‖²` with row-normalized `W̃`.
/// Isolated nodes are left out of the smoothing term, so they keep their
/// input position.
pub fn gsp_tv_denoise(x: &PointCloud, graph: &GspGraph, alpha: f64) -> Result<PointCloud> {
    check(x, graph, alpha)?;
    let n = graph.dim();
    let mut m = DMatrix::<f64>::identity(n, n) - graph.row_normalized();
    for i in (0..n).filter(|&i| graph.is_isolated(i)) {
        m.row_mut(i).fill(0.0);
    }
    let a = DMatrix::<f64>::identity(n, n) + m.tr_mul(&m) * alpha;
    PointCloud::new(spd_solve(a, x.coords())?)
}

/// `Y_i = (I + α L)⁻¹ X_i`
pub fn laplacian_reg_denoise(x: &PointCloud, graph: &GspGraph, alpha: f64) -> Result<PointCloud> {
    check(x, graph, alpha)?;
    let n = graph.dim();
    let a = DMatrix::<f64>::identity(n, n) + graph.laplacian() * alpha;
    PointCloud::new(spd_solve(a, x.coords())?)
}

/// Umbrella-operator smoothing `Y <- Y - step D⁻¹ L Y`; isolated nodes stay put.
/// Stands in for the mesh Laplacian smoother of the comparison.
pub fn mls_denoise(x: &PointCloud, graph: &GspGraph, iterations: usize, step: f64) -> Result<PointCloud> {
    if iterations == 0 {
        return Err(Error::invalid("iterations must be at least 1"));
    }
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::invalid(format!("step must lie in (0, 1], got {step}")));
    }
    check(x, graph, 1.0)?;
    let wn = graph.row_normalized();
    let mut y = x.coords().clone();
    for _ in 0..iterations {
        let avg = &wn * &y;
        for i in (0..graph.dim()).filter(|&i| !graph.is_isolated(i)) {
            for a in 0..3 {
                y[(i, a)] += step * (avg[(i, a)] - y[(i, a)]);
            }
        }
    }
    PointCloud::new(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::{build_default_graph, build_gaussian_graph};
    use crate::pointcloud::{generate_shape, ShapeKind, ShapeParams};

    fn complete_graph_cloud() -> PointCloud {
        PointCloud::from_points(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 0.0]]).unwrap()
    }

    #[test]
    fn tiny_alpha_is_identity() {
        let c = generate_shape(ShapeKind::Sphere, 30, &ShapeParams::default(), 1).unwrap();
        let g = build_default_graph(&c).unwrap();
        for y in [gsp_tv_denoise(&c, &g, 1e-12).unwrap(), laplacian_reg_denoise(&c, &g, 1e-12).unwrap()] {
            assert!((y.coords() - c.coords()).amax() < 1e-9);
        }
    }

    #[test]
    fn constants_unchanged() {
        let c = complete_graph_cloud();
        let g = build_gaussian_graph(&c, 1.0, 10.0).unwrap();
        let flat = PointCloud::new(DMatrix::from_element(4, 3, 0.25)).unwrap();
        for y in [
            gsp_tv_denoise(&flat, &g, 3.0).unwrap(),
            laplacian_reg_denoise(&flat, &g, 3.0).unwrap(),
            mls_denoise(&flat, &g, 4, 1.0).unwrap(),
        ] {
            assert!((y.coords() - flat.coords()).amax() < 1e-12);
        }
    }

    #[test]
    fn mls_unit_step_moves_to_neighbor_centroid() {
        // equal weights: every pair at the same distance
        let c = PointCloud::from_points(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        let g = build_gaussian_graph(&c, 1.0, 10.0).unwrap();
        let y = mls_denoise(&c, &g, 1, 1.0).unwrap();
        assert!((y.point(0)[0] - 0.0).abs() < 1e-12);
        assert!((y.point(0)[1] - 0.5).abs() < 1e-12);
        assert!((y.point(0)[2] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn dense_inverse_oracles() {
        let c = generate_shape(ShapeKind::Cube, 5, &ShapeParams::default(), 3).unwrap();
        let g = build_gaussian_graph(&c, 1.5, 20.0).unwrap();
        let n = 5;
        let lr = (DMatrix::<f64>::identity(n, n) + g.laplacian() * 0.7).try_inverse().unwrap() * c.coords();
        assert!((laplacian_reg_denoise(&c, &g, 0.7).unwrap().coords() - lr).amax() < 1e-9);
        let m = DMatrix::<f64>::identity(n, n) - g.row_normalized();
        let tv = (DMatrix::<f64>::identity(n, n) + m.transpose() * &m * 0.7).try_inverse().unwrap() * c.coords();
        assert!((gsp_tv_denoise(&c, &g, 0.7).unwrap().coords() - tv).amax() < 1e-9);
    }

    #[test]
    fn isolated_nodes_keep_position() {
        let c = PointCloud::from_points(&[[0.0; 3], [0.1, 0.0, 0.0], [9.0, 9.0, 9.0]]).unwrap();
        let g = build_gaussian_graph(&c, 1.0, 1.0).unwrap();
        assert_eq!(gsp_tv_denoise(&c, &g, 5.0).unwrap().point(2), [9.0; 3]);
        assert_eq!(mls_denoise(&c, &g, 3, 0.5).unwrap().point(2), [9.0; 3]);
    }
}
