mod common;

use common::{exhaustive_qp_oracle, feasible_instance};
use hgsp::coeffopt::{most_violated_triples, solve_qp_fixed_max, QpStatus};

#[test]
fn cutting_plane_matches_exhaustive_oracle() {
    for seed in 0..20u64 {
        let n = 4 + (seed as usize % 5);
        let (_, basis, system) = feasible_instance(n, seed);
        let (alpha, beta) = (1.0, 0.5);
        let sol = solve_qp_fixed_max(&system, &basis, 0, alpha, beta).unwrap();
        let oracle = exhaustive_qp_oracle(&system, &basis, 0, alpha, beta);
        let rel = (sol.objective - oracle.objective).abs() / oracle.objective.abs().max(1e-12);
        println!(
            "seed {seed} n {n}: ours {:.12} oracle {:.12} rel {rel:.2e} cuts {} rounds {} kkt {:.1e} oracle viol {:.1e}",
            sol.objective, oracle.objective, sol.cut_count, sol.rounds, sol.kkt_residual, oracle.max_violation
        );
        assert_eq!(sol.status, QpStatus::Optimal);
        assert!(rel <= 1e-6, "seed {seed}: rel {rel}");
        assert!(most_violated_triples(&basis, &sol.sigma_vector(), 1).is_empty());
    }
}
