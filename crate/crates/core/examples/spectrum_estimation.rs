// Estimates the hypergraph spectrum of a cylinder and checks the two
// properties the estimate guarantees: an orthonormal basis whose leading
// columns diagonalize the centered covariance.
//
//     cargo run --release --example spectrum_estimation

use hgsp::pointcloud::{generate_shape, ShapeKind, ShapeParams};
use hgsp::spectral::{covariance, estimate_spectrum, orthonormality_deviation};

pub struct SpectrumSummary {
    pub n: usize,
    pub source_rank: usize,
    pub orthonormality: f64,
    pub relative_off_diagonal: f64,
}

fn run_example() -> hgsp::Result<SpectrumSummary> {
    let cloud = generate_shape(ShapeKind::Cylinder, 300, &ShapeParams::default(), 3)?;
    let basis = estimate_spectrum(&cloud);
    let r = covariance(&cloud);
    let d = basis.matrix().transpose() * &r * basis.matrix();
    let mut off = 0.0f64;
    for i in 0..d.nrows() {
        for j in 0..d.ncols() {
            if i != j {
                off = off.max(d[(i, j)].abs());
            }
        }
    }
    Ok(SpectrumSummary {
        n: basis.dim(),
        source_rank: basis.source_rank(),
        orthonormality: orthonormality_deviation(basis.matrix()),
        relative_off_diagonal: off / r.norm().max(f64::MIN_POSITIVE),
    })
}

#[allow(dead_code)]
fn main() -> hgsp::Result<()> {
    let s = run_example()?;
    println!("N = {}, covariance rank {}", s.n, s.source_rank);
    println!("max |VᵀV - I|            = {:.2e}", s.orthonormality);
    println!("max off-diag VᵀRV / ‖R‖  = {:.2e}", s.relative_off_diagonal);
    Ok(())
}
