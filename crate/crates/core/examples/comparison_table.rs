// A reduced denoising comparison: every noise row and method, a few trials,
// printed as the report CSV with the HGSP orderings.
//
//     cargo run --release --example comparison_table

use hgsp::harness::{run_table1, ExperimentConfig, ExperimentReport};

fn run_example() -> hgsp::Result<ExperimentReport> {
    let config = ExperimentConfig {
        points: 150,
        trials: 3,
        seed: 42,
        ..ExperimentConfig::default()
    };
    run_table1(&config)
}

#[allow(dead_code)]
fn main() -> hgsp::Result<()> {
    let report = run_example()?;
    print!("{}", report.to_csv());
    for o in &report.orderings {
        println!("{o:?}");
    }
    Ok(())
}
