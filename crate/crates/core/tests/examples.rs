//! Runs every example in `examples/` and checks what it reports.

mod synth_and_noise {
    include!("../examples/synth_and_noise.rs");

    #[test]
    fn every_shape_and_noise_row() {
        let rows = run_example().unwrap();
        assert_eq!(rows.len(), 4 * 5);
        assert!(rows.iter().all(|(_, _, l1)| l1.is_finite() && *l1 > 0.0));
    }
}

mod spectrum_estimation {
    include!("../examples/spectrum_estimation.rs");

    #[test]
    fn basis_is_orthonormal_and_diagonalizing() {
        let s = run_example().unwrap();
        assert_eq!(s.n, 300);
        assert!(s.source_rank >= 1 && s.source_rank <= 3);
        assert!(s.orthonormality <= 1e-9);
        assert!(s.relative_off_diagonal <= 1e-8);
    }
}

mod tensor_identities {
    include!("../examples/tensor_identities.rs");

    #[test]
    fn identities_hold() {
        let (norm, eigen) = run_example().unwrap();
        assert!(norm <= 1e-9 && eigen <= 1e-9);
    }
}

mod hgft_bandlimited {
    include!("../examples/hgft_bandlimited.rs");

    #[test]
    fn bandlimited_clouds_recover() {
        let out = run_example().unwrap();
        assert_eq!(out.iter().map(|p| p.0).collect::<Vec<_>>(), vec![1, 50, 100, 200]);
        assert!(out.iter().all(|p| p.1 <= 1e-9));
    }
}

mod coefficient_fit {
    include!("../examples/coefficient_fit.rs");

    #[test]
    fn feasible_instance_solves_cleanly() {
        let s = run_example().unwrap();
        assert_eq!(s.status, QpStatus::Optimal);
        assert_eq!(s.remaining_violations, 0);
    }
}

mod joint_denoising {
    include!("../examples/joint_denoising.rs");

    #[test]
    fn trace_is_monotone_per_substep() {
        let s = run_example().unwrap();
        assert!(s.monotone);
        assert!(s.noisy_l1.is_finite() && s.denoised_l1.is_finite());
        assert!(s.trace_csv.starts_with("iter,substep,objective\n"));
        assert_eq!(s.trace_csv.lines().count(), 1 + 3 * 5);
    }
}

mod hpf_sampling {
    include!("../examples/hpf_sampling.rs");

    #[test]
    fn selections_concentrate_at_edges() {
        let trials = run_example().unwrap();
        assert!(!trials.is_empty());
        assert!(trials.iter().all(|t| t.concentrated()));
    }
}

mod graph_baselines {
    include!("../examples/graph_baselines.rs");

    #[test]
    fn all_methods_report() {
        let rows = run_example().unwrap();
        let names: Vec<&str> = rows.iter().map(|r| r.0).collect();
        assert_eq!(names, vec!["noisy", "GSP-TV", "LR", "MLS-standin"]);
        assert!(rows.iter().all(|r| r.1.is_finite()));
    }
}

mod sampling_curve {
    include!("../examples/sampling_curve.rs");

    #[test]
    fn curve_is_monotone_and_exact_at_full_ratio() {
        let r = run_example().unwrap();
        let checks = r.curve_checks.clone().unwrap();
        assert!(checks.hgsp_nonincreasing && checks.gsp_nonincreasing);
        let last = r.curve.iter().find(|p| p.ratio == 1.0).unwrap();
        assert!(last.mse_hgsp <= 1e-12 && last.mse_gsp <= 1e-12);
    }
}

mod comparison_table {
    include!("../examples/comparison_table.rs");

    #[test]
    fn table_is_complete() {
        let r = run_example().unwrap();
        assert_eq!(r.table.len(), 5 * 5);
        assert_eq!(r.orderings.len(), 5);
        assert!(r.table.iter().all(|c| c.failure.is_some() || c.mean_l1.is_some()));
    }
}

mod cli_pipeline {
    include!("../examples/cli_pipeline.rs");

    #[test]
    fn every_step_succeeds() {
        assert!(run_example().unwrap().iter().all(|&c| c == 0));
    }
}
