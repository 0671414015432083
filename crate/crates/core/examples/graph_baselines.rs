// Gaussian-kernel graph baselines: graph-TV, Laplacian-regularized and
// umbrella-smoothing denoisers on a noisy sphere.
//
//     cargo run --release --example graph_baselines

use hgsp::baselines::{
    build_default_graph, gsp_tv_denoise, laplacian_reg_denoise, mls_denoise, DEFAULT_LR_ALPHA,
    DEFAULT_MLS_ITERATIONS, DEFAULT_MLS_STEP, DEFAULT_TV_ALPHA,
};
use hgsp::pointcloud::{add_noise, error_metrics, generate_shape, NoiseKind, NoiseSpec, ShapeKind, ShapeParams};

fn run_example() -> hgsp::Result<Vec<(&'static str, f64)>> {
    let clean = generate_shape(ShapeKind::Sphere, 300, &ShapeParams::default(), 8)?;
    let noisy = add_noise(&clean, &NoiseSpec::new(NoiseKind::Uniform { lo: -0.03, hi: 0.03 }, 9))?;
    let graph = build_default_graph(&noisy)?;
    let edges = graph.edge_list_csv().lines().count() - 1;
    let p = graph.params();
    println!("graph: {edges} edges, delta {:.4}, t {:.4}", p.delta, p.t);
    Ok(vec![
        ("noisy", error_metrics(&noisy, &clean)?.l1_error),
        ("GSP-TV", error_metrics(&gsp_tv_denoise(&noisy, &graph, DEFAULT_TV_ALPHA)?, &clean)?.l1_error),
        ("LR", error_metrics(&laplacian_reg_denoise(&noisy, &graph, DEFAULT_LR_ALPHA)?, &clean)?.l1_error),
        (
            "MLS-standin",
            error_metrics(&mls_denoise(&noisy, &graph, DEFAULT_MLS_ITERATIONS, DEFAULT_MLS_STEP)?, &clean)?.l1_error,
        ),
    ])
}

#[allow(dead_code)]
fn main() -> hgsp::Result<()> {
    for (name, l1) in run_example()? {
        println!("{name:<12} l1 {l1:.3}");
    }
    Ok(())
}
