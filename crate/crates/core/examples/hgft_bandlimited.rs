// Hypergraph Fourier transform on fitted pairs: frequency ordering, exact
// round trip, and perfect recovery of a bandlimited cloud from its first C
// coefficients.
//
//     cargo run --release --example hgft_bandlimited

use hgsp::coeffopt::{fit_hypergraph, AdjacencyConstraint, CoeffConfig};
use hgsp::pointcloud::{error_metrics, generate_shape, PointCloud, ShapeKind, ShapeParams};
use hgsp::sampling::hgft_downsample;
use hgsp::spectral::{hgft, ihgft, order_by_frequency};
use nalgebra::DVector;

fn run_example() -> hgsp::Result<Vec<(usize, f64)>> {
    let cloud = generate_shape(ShapeKind::Sphere, 200, &ShapeParams::default(), 11)?;
    let config = CoeffConfig {
        adjacency: AdjacencyConstraint::Relax,
        ..CoeffConfig::default()
    };
    let pairs = fit_hypergraph(&cloud, &config)?.pairs;
    let order = order_by_frequency(&pairs);
    let n = pairs.dim();

    // round trip of the raw x coordinate
    let x = cloud.column(0);
    let back = ihgft(&pairs, &hgft(&pairs, &x, 3)?, n)?;
    assert!((back - &x).amax() < 1e-10);

    // clouds built from the C lowest-frequency components come back exactly
    let mut out = Vec::new();
    for keep in [1, n / 4, n / 2, n] {
        let column = |axis: usize| {
            let mut s = DVector::zeros(n);
            for (slot, &r) in order.iter().take(keep).enumerate() {
                let w = ((slot + 1) as f64 * (axis as f64 + 0.3)).sin();
                s += pairs.basis().component(r) * w;
            }
            s
        };
        let band = PointCloud::from_columns(&[column(0), column(1), column(2)])?;
        let rec = hgft_downsample(&band, &pairs, keep)?.recovered;
        out.push((keep, error_metrics(&rec, &band)?.mse));
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> hgsp::Result<()> {
    for (keep, mse) in run_example()? {
        println!("C = {keep:>3}: recovery MSE {mse:.2e}");
    }
    Ok(())
}
