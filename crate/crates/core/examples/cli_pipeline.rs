// Drives the command line in-process: synthesize a cube, sample it with the
// high-pass filter, then noise and denoise a sphere.
//
//     cargo run --release --example cli_pipeline

use hgsp::harness::cli_main;

fn run_example() -> hgsp::Result<Vec<i32>> {
    let dir = std::env::temp_dir().join(format!("hgsp-cli-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| hgsp::Error::Numerical(e.to_string()))?;
    let p = |name: &str| dir.join(name).to_string_lossy().into_owned();
    let codes = vec![
        cli_main(["hgsp", "synth", "--shape", "cube", "--n", "2000", "--out", &p("cube.xyz")]),
        cli_main(["hgsp", "sample-hpf", "--in", &p("cube.xyz"), "--k", "200"]),
        cli_main(["hgsp", "synth", "--shape", "sphere", "--n", "200", "--out", &p("sphere.xyz")]),
        cli_main(["hgsp", "noise", "--in", &p("sphere.xyz"), "--out", &p("noisy.xyz"), "--kind", "gaussian"]),
        cli_main(["hgsp", "denoise", "--in", &p("noisy.xyz"), "--adjacency", "relax"]),
    ];
    let _ = std::fs::remove_dir_all(&dir);
    Ok(codes)
}

#[allow(dead_code)]
fn main() -> hgsp::Result<()> {
    println!("exit codes: {:?}", run_example()?);
    Ok(())
}
