pub mod baselines;
pub mod coeffopt;
pub mod denoise;
pub mod error;
pub mod harness;
pub mod pointcloud;
pub mod rng;
pub mod sampling;
pub mod spectral;
pub mod tensor;

pub use error::{Error, Result};
