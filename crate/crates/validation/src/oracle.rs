//! Reference computations built directly from the protocol definition,
//! sharing no code with the library.

use num_complex::Complex64 as C64;

pub type M2 = [[C64; 2]; 2];

pub fn mul(a: &M2, b: &M2) -> M2 {
    let mut out = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn dagger(a: &M2) -> M2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

pub fn apply(a: &M2, v: [C64; 2]) -> [C64; 2] {
    [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]]
}

/// Rotation taking the spin along `(θ, φ)` to `|↑⟩`.
pub fn rotation(theta: f64, phi: f64) -> M2 {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let e = C64::from_polar(1.0, -phi);
    [[C64::new(c, 0.0), e * s], [C64::new(s, 0.0), -e * c]]
}

/// Kraus operator of the k-th measurement (1-based) for readout `r`.
pub fn kraus(strength: f64, asymmetry: f64, theta: f64, d: i32, n: u32, k: u32, r: u8) -> M2 {
    let zero = C64::new(0.0, 0.0);
    let m = if r == 0 {
        [[C64::new(1.0, 0.0), zero], [zero, (C64::new(-2.0 * strength, -2.0 * asymmetry) / n as f64).exp()]]
    } else {
        [[zero, zero], [zero, C64::new((1.0 - (-4.0 * strength / n as f64).exp()).sqrt(), 0.0)]]
    };
    let phi = 2.0 * std::f64::consts::PI * k as f64 * d as f64 / (n as f64 + 1.0);
    let rot = rotation(theta, phi);
    mul(&dagger(&rot), &mul(&m, &rot))
}

pub fn initial(theta: f64) -> [C64; 2] {
    [C64::new((theta / 2.0).cos(), 0.0), C64::new((theta / 2.0).sin(), 0.0)]
}

pub struct Totals {
    pub z: C64,
    /// `Σ ‖v‖²` over sequences: both final outcomes together.
    pub probability: f64,
}

/// Sums over all `2^N` sequences independently, one product per sequence.
pub fn enumerate(strength: f64, asymmetry: f64, theta: f64, d: i32, n: u32) -> Totals {
    let ops: Vec<[M2; 2]> = (1..=n).map(|k| [0, 1].map(|r| kraus(strength, asymmetry, theta, d, n, k, r))).collect();
    let psi0 = initial(theta);
    let mut z = C64::new(0.0, 0.0);
    let mut probability = 0.0;
    for bits in 0u64..(1 << n) {
        let mut v = psi0;
        for (k, op) in ops.iter().enumerate() {
            v = apply(&op[((bits >> k) & 1) as usize], v);
        }
        let amp = psi0[0].conj() * v[0] + psi0[1].conj() * v[1];
        z += amp * amp;
        probability += v[0].norm_sqr() + v[1].norm_sqr();
    }
    Totals { z, probability }
}

/// `⟨ψ₀|𝓜_N⋯𝓜_1|ψ₀⟩²` for unmeasured (C = 0) runs, where the product is unitary.
pub fn unitary_signal(asymmetry: f64, theta: f64, d: i32, n: u32) -> C64 {
    let mut u = [[C64::new(1.0, 0.0), C64::new(0.0, 0.0)], [C64::new(0.0, 0.0), C64::new(1.0, 0.0)]];
    for k in 1..=n {
        u = mul(&kraus(0.0, asymmetry, theta, d, n, k, 0), &u);
    }
    let psi0 = initial(theta);
    let v = apply(&u, psi0);
    let amp = psi0[0].conj() * v[0] + psi0[1].conj() * v[1];
    amp * amp
}

/// N → ∞ limit of [`unitary_signal`]: the rotating-frame product becomes
/// `exp(−i(2A·P_n + 2πd·P_↓))` with `P_n` the projector on `−n₀`.
pub fn unitary_signal_limit(asymmetry: f64, theta: f64, d: i32) -> C64 {
    // H = 2A·|−n₀⟩⟨−n₀| + 2πd·|↓⟩⟨↓| = h0·I + h·σ, evaluated in the ↑/↓ basis
    let (st, ct) = (theta.sin(), theta.cos());
    let pi = std::f64::consts::PI;
    // |−n₀⟩⟨−n₀| = (I − n₀·σ)/2, |↓⟩⟨↓| = (I − σz)/2
    let h0 = asymmetry + pi * d as f64;
    let h = [-asymmetry * st, 0.0, -asymmetry * ct - pi * d as f64];
    let norm = (h[0] * h[0] + h[1] * h[1] + h[2] * h[2]).sqrt();
    let (cn, sn) = (norm.cos(), norm.sin());
    let i = C64::new(0.0, 1.0);
    // exp(−iH) = e^{−ih0}(cos|h| − i sin|h| ĥ·σ)
    let (nx, nz) = if norm > 0.0 { (h[0] / norm, h[2] / norm) } else { (0.0, 0.0) };
    let g = C64::from_polar(1.0, -h0);
    let u: M2 = [[g * (cn - i * sn * nz), g * (-i * sn * nx)], [g * (-i * sn * nx), g * (cn + i * sn * nz)]];
    // back in the lab frame at φ = 2πd the frame rotation is the identity
    let r0 = rotation(theta, 0.0);
    let up = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    let v = apply(&r0, apply(&u, apply(&dagger(&r0), up)));
    v[0] * v[0]
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use mipd_core::replica::{asymptotic_z, transfer_signal};
    use mipd_core::{Direction, ProtocolParams};
    use proptest::prelude::*;

    fn direction() -> impl Strategy<Value = Direction> {
        prop_oneof![Just(Direction::Forward), Just(Direction::Backward)]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn transfer_matches_independent_enumeration(
            strength in 0.0f64..4.0, asymmetry in -2.0f64..2.0, theta in 0.0f64..=PI,
            d in direction(), n in 1u32..=7,
        ) {
            let z = transfer_signal(&ProtocolParams::finite(strength, asymmetry, theta, d, n).unwrap()).unwrap().z;
            let reference = enumerate(strength, asymmetry, theta, d.sign(), n);
            prop_assert!((z - reference.z).norm() <= 1e-12);
            prop_assert!((reference.probability - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn unmeasured_runs_match_unitary_product(
            asymmetry in -3.0f64..3.0, theta in 0.0f64..=PI, d in direction(), n in 1u32..200,
        ) {
            let z = transfer_signal(&ProtocolParams::finite(0.0, asymmetry, theta, d, n).unwrap()).unwrap().z;
            prop_assert!((z - unitary_signal(asymmetry, theta, d.sign(), n)).norm() <= 1e-10);
            let z_inf = asymptotic_z(0.0, asymmetry, theta, d).unwrap();
            prop_assert!((z_inf - unitary_signal_limit(asymmetry, theta, d.sign())).norm() <= 1e-10);
        }
    }

    #[test]
    fn oracle_reproduces_pole_limit() {
        // θ = 0: every axis is the pole, nothing happens
        for d in [1, -1] {
            let t = enumerate(1.3, 0.7, 0.0, d, 6);
            assert!((t.z - 1.0).norm() <= 1e-14);
            assert!((unitary_signal_limit(0.7, 0.0, d) - 1.0).norm() <= 1e-14);
        }
    }
}
