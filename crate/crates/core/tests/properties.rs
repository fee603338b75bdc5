use std::f64::consts::PI;

use mipd_core::protocol::kraus_full;
use mipd_core::replica::{asymptotic_z, transfer_signal};
use mipd_core::spinlin::{mat_exp, tensor2, ComplexMat2};
use mipd_core::trajectories::estimate_signal;
use mipd_core::{Complex, Direction, ProtocolParams, Readout};
use proptest::prelude::*;

fn direction() -> impl Strategy<Value = Direction> {
    prop_oneof![Just(Direction::Forward), Just(Direction::Backward)]
}

fn mat2() -> impl Strategy<Value = ComplexMat2> {
    proptest::array::uniform8(-2.0f64..2.0).prop_map(|v| {
        ComplexMat2::from_rows([
            [Complex::new(v[0], v[1]), Complex::new(v[2], v[3])],
            [Complex::new(v[4], v[5]), Complex::new(v[6], v[7])],
        ])
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn tensor_product_is_multiplicative(a in mat2(), b in mat2(), c in mat2(), d in mat2()) {
        let lhs = tensor2(&a, &b) * tensor2(&c, &d);
        let rhs = tensor2(&(a * c), &(b * d));
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
    }

    #[test]
    fn exponential_of_doubled_matrix_squares(a in mat2()) {
        // exp(2a) = exp(a)²
        let e = mat_exp(&a).unwrap();
        let e2 = mat_exp(&a.scale(Complex::new(2.0, 0.0))).unwrap();
        prop_assert!((e * e).max_abs_diff(&e2) <= 1e-10 * e2.norm_inf().max(1.0));
    }

    #[test]
    fn kraus_operators_are_complete(
        strength in 0.0f64..10.0, asymmetry in -3.0f64..3.0, theta in 0.0f64..=PI,
        d in direction(), n in 1u32..500, k_frac in 0.0f64..1.0,
    ) {
        let p = ProtocolParams::finite(strength, asymmetry, theta, d, n).unwrap();
        let k = 1 + ((n - 1) as f64 * k_frac) as u32;
        let mut sum = ComplexMat2::zeros();
        for r in Readout::BOTH {
            let m = kraus_full(k, r, &p).unwrap();
            sum = sum + m.dagger() * m;
        }
        prop_assert!(sum.max_abs_diff(&ComplexMat2::identity()) <= 1e-12);
    }

    #[test]
    fn coherence_never_exceeds_one(
        strength in 0.0f64..6.0, asymmetry in -3.0f64..3.0, theta in 0.0f64..=PI,
        d in direction(), n in 1u32..300,
    ) {
        let zf = transfer_signal(&ProtocolParams::finite(strength, asymmetry, theta, d, n).unwrap()).unwrap().z;
        let za = asymptotic_z(strength, asymmetry, theta, d).unwrap();
        prop_assert!(zf.norm() <= 1.0 + 1e-12);
        prop_assert!(za.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn asymptotic_symmetries(
        strength in 0.0f64..4.0, asymmetry in -2.0f64..2.0, theta in 0.0f64..=PI, d in direction(),
    ) {
        let z = asymptotic_z(strength, asymmetry, theta, d).unwrap();
        let reversed = asymptotic_z(strength, -asymmetry, theta, d.reversed()).unwrap();
        let swapped = asymptotic_z(strength, asymmetry, PI - theta, d.reversed()).unwrap();
        prop_assert!((reversed - z.conj()).norm() <= 1e-10);
        prop_assert!((swapped - z).norm() <= 1e-10);
    }
}

#[test]
fn estimates_depend_only_on_seed() {
    let p = ProtocolParams::finite(1.2, -0.4, 2.0, Direction::Backward, 30).unwrap();
    let pool = |n| rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap();
    let a = pool(1).install(|| estimate_signal(&p, 5000, 17).unwrap());
    let b = pool(3).install(|| estimate_signal(&p, 5000, 17).unwrap());
    let c = estimate_signal(&p, 5000, 18).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.z_hat, c.z_hat);
}
