// Generates each synthetic surface, perturbs it with every comparison-table
// noise model and reports the injected l1 error.
//
//     cargo run --release --example synth_and_noise

use hgsp::harness::table1_noise_rows;
use hgsp::pointcloud::{add_noise, error_metrics, generate_shape, NoiseSpec, ShapeKind, ShapeParams};

fn run_example() -> hgsp::Result<Vec<(String, String, f64)>> {
    let mut rows = Vec::new();
    for shape in [ShapeKind::Cube, ShapeKind::Cylinder, ShapeKind::Planes, ShapeKind::Sphere] {
        let clean = generate_shape(shape, 400, &ShapeParams::default(), 7)?;
        for (i, kind) in table1_noise_rows().into_iter().enumerate() {
            let noisy = add_noise(&clean, &NoiseSpec::new(kind, i as u64))?;
            let l1 = error_metrics(&noisy, &clean)?.l1_error;
            rows.push((format!("{shape:?}"), kind.label(), l1));
        }
    }
    Ok(rows)
}

#[allow(dead_code)]
fn main() -> hgsp::Result<()> {
    for (shape, noise, l1) in run_example()? {
        println!("{shape:<9} {noise:<28} l1 = {l1:.3}");
    }
    Ok(())
}
