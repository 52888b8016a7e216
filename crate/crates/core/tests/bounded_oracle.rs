use disk_sssp::bounded::{solve_bounded_with, BoundedConfig};
use disk_sssp::generate::{generate, GenKind, GeneratorSpec};
use disk_sssp::model::{validate_result, EdgeCheck};
use disk_sssp::oracle::solve_oracle;

#[test]
fn bounded_matches_oracle_on_mixed_instances() {
    let mut seed = 0u64;
    for &psi in &[1.0, 4.0, 64.0, 1024.0] {
        for kind in GenKind::ALL {
            for n in [2usize, 17, 120, 300] {
                seed += 1;
                let mut spec = GeneratorSpec::new(kind, n, psi, seed);
                if kind == GenKind::UniformSquare {
                    spec = spec.with_side(4.0 * (n as f64).sqrt() * psi.sqrt().sqrt());
                }
                let inst = generate(&spec).unwrap();
                let (res, stats) = solve_bounded_with(&inst, BoundedConfig::default());
                let want = solve_oracle(&inst).unwrap();
                assert_eq!(
                    res.first_dist_mismatch(&want),
                    None,
                    "{kind} n={n} psi={psi} seed={seed}"
                );
                assert!(validate_result(&inst, &res, EdgeCheck::Full).is_empty());
                assert!(stats.max_firings_per_cell <= 33);
                assert_eq!(stats.k_decreases, 0);
            }
        }
    }
}
