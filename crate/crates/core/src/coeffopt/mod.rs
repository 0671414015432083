//! Frequency-coefficient estimation: per-candidate box-constrained
//! quadratic programs with the adjacency nonnegativity constraint handled by
//! cutting planes.

mod estimate;
mod qp;
mod separation;
mod system;

pub use estimate::{
    default_candidates, estimate_coefficients, estimate_with, fit_hypergraph, CoefficientEstimate,
    FitResult, DEFAULT_LAMBDA_MAX, ENERGY_CANDIDATES, FULL_CANDIDATE_LIMIT,
};
pub use qp::{
    solve_qp_fixed_max, solve_qp_with, AdjacencyConstraint, CoeffConfig, QpSolution, QpStatus,
    DEFAULT_CUT_BUDGET, DEFAULT_MAX_ROUNDS,
};
pub use separation::{cut_coefficients, most_violated_triples, triple_value, ViolatedTriple, VIOLATION_TOLERANCE};
pub use system::{build_smoothness_system, SmoothnessSystem};
