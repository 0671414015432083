// Recovery error against sampling ratio for hypergraph and graph Fourier
// downsampling, written as CSV.
//
//     cargo run --release --example sampling_curve

use hgsp::harness::{run_msecurve, ExperimentConfig, ExperimentReport};

fn run_example() -> hgsp::Result<ExperimentReport> {
    let config = ExperimentConfig {
        shape: "cube".into(),
        points: 300,
        ..ExperimentConfig::default()
    };
    run_msecurve(&config)
}

#[allow(dead_code)]
fn main() -> hgsp::Result<()> {
    let report = run_example()?;
    print!("{}", report.to_csv());
    println!("{:?}", report.curve_checks);
    Ok(())
}
