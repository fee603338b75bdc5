use mipd_cli::verify::{asymptotic_z, run_suite};
use mipd_core::{Complex, ProtocolParams};

#[test]
fn deviations_do_not_drift_with_sample_count() {
    let small = run_suite(1, 100, &asymptotic_z);
    let large = run_suite(1, 1000, &asymptotic_z);
    for (s, l) in small.checks.iter().zip(&large.checks) {
        assert!(s.passed() && l.passed(), "{s:?} {l:?}");
        // more samples may find a slightly larger extreme, never a trend
        assert!(l.max_deviation <= 10.0 * s.max_deviation.max(1e-15), "{s:?} {l:?}");
    }
}

#[test]
fn corrupted_generator_entry_is_caught() {
    let corrupted = |p: &ProtocolParams| -> mipd_core::Result<Complex> {
        let mut l = mipd_core::replica::lambda_matrix(p.strength, p.asymmetry, p.theta, p.direction);
        l.0[0][1] += Complex::new(0.02, 0.0);
        Ok(mipd_core::spinlin::mat_exp(&l)?[(0, 0)])
    };
    let report = run_suite(0, 100, &corrupted);
    let failed = report.first_failure().expect("corruption detected");
    assert_eq!(failed.name, "symmetries");
    assert!(failed.max_deviation > 1e-6);
}
