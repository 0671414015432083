// Builds the third-order adjacency tensor from random spectral pairs and
// checks the norm identity and the contraction eigen-identity against the
// dense tensor.
//
//     cargo run --release --example tensor_identities

use hgsp::spectral::random_pairs;
use hgsp::tensor::{reconstruct_adjacency, tensor_norm_sq, Contract};

fn run_example() -> hgsp::Result<(f64, f64)> {
    let mut worst_norm = 0.0f64;
    let mut worst_eigen = 0.0f64;
    for seed in 0..10 {
        let pairs = random_pairs(6 + seed as usize % 4, seed);
        let a = reconstruct_adjacency(&pairs, 3)?;
        let lambda_sq = tensor_norm_sq(&pairs);
        worst_norm = worst_norm.max((a.frobenius_sq() - lambda_sq).abs() / lambda_sq.max(1.0));
        let lambdas = pairs.lambdas();
        for r in 0..pairs.dim() {
            let f = pairs.basis().component(r);
            let image = a.contract_signal(&f, 3)?;
            worst_eigen = worst_eigen.max((image - &f * lambdas[r]).amax());
        }
    }
    Ok((worst_norm, worst_eigen))
}

#[allow(dead_code)]
fn main() -> hgsp::Result<()> {
    let (norm, eigen) = run_example()?;
    println!("max relative |Σa² - Σλ²|     = {norm:.2e}");
    println!("max |A f_r - λ_r f_r| entry  = {eigen:.2e}");
    Ok(())
}
