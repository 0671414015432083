//! Graph-signal-processing comparison methods on a Gaussian-kernel graph.

mod denoisers;
mod gft;
mod graph;

pub use denoisers::{
    gsp_tv_denoise, laplacian_reg_denoise, mls_denoise, DEFAULT_LR_ALPHA, DEFAULT_MLS_ITERATIONS,
    DEFAULT_MLS_STEP, DEFAULT_TV_ALPHA,
};
pub use gft::{gft_basis, gft_downsample, gft_project, GftBasis};
pub use graph::{
    build_default_graph, build_gaussian_graph, default_graph_params, GraphParams, GspGraph,
    DEFAULT_THRESHOLD_NEIGHBOR,
};
