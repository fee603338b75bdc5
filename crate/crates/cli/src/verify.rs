//! Invariant suite behind `mipd verify`.

use std::f64::consts::PI;

use mipd_core::protocol::kraus_full;
use mipd_core::replica::{asymptotic_signal, brute_force_signal, transfer_signal, verify_symmetries_with};
use mipd_core::spinlin::ComplexMat2;
use mipd_core::topology::{unwrap_phase, DEFAULT_RESOLUTION};
use mipd_core::{Complex, Direction, ProtocolParams, Readout, Steps};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Asymptotic evaluator under test; the suite swaps it out for negative controls.
pub type Evaluator<'a> = &'a (dyn Fn(&ProtocolParams) -> mipd_core::Result<Complex> + Sync);

pub fn asymptotic_z(p: &ProtocolParams) -> mipd_core::Result<Complex> {
    asymptotic_signal(p).map(|s| s.z)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub max_deviation: f64,
    pub tolerance: f64,
    /// Parameter points (or draws) examined.
    pub cases: usize,
    pub error: Option<String>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.max_deviation <= self.tolerance
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub seed: u64,
    pub samples: usize,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn first_failure(&self) -> Option<&CheckResult> {
        self.checks.iter().find(|c| !c.passed())
    }
}

/// Fixed points for the O(1/N) convergence check, away from zeros of z.
pub const CONVERGENCE_POINTS: [(f64, f64, f64, Direction); 5] = [
    (2.0, 1.0, 0.75 * PI, Direction::Forward),
    (0.5, 0.3, 1.0, Direction::Forward),
    (1.5, -0.7, 2.0, Direction::Backward),
    (3.0, 0.5, 0.6, Direction::Forward),
    (1.0, 1.5, 2.5, Direction::Backward),
];

fn random_point(rng: &mut ChaCha8Rng) -> (f64, f64, f64, Direction) {
    let strength = 4.0 * rng.random::<f64>();
    let asymmetry = 4.0 * rng.random::<f64>() - 2.0;
    let theta = PI * rng.random::<f64>();
    let d = if rng.random::<bool>() { Direction::Forward } else { Direction::Backward };
    (strength, asymmetry, theta, d)
}

struct Check {
    result: CheckResult,
}

impl Check {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Check { result: CheckResult { name, max_deviation: 0.0, tolerance, cases: 0, error: None } }
    }

    fn record(&mut self, deviation: mipd_core::Result<f64>) {
        self.result.cases += 1;
        match deviation {
            Ok(d) if d.is_nan() => self.result.max_deviation = f64::INFINITY,
            Ok(d) => self.result.max_deviation = self.result.max_deviation.max(d),
            Err(e) => {
                self.result.max_deviation = f64::INFINITY;
                self.result.error.get_or_insert_with(|| e.to_string());
            }
        }
    }
}

pub fn run_suite(seed: u64, samples: usize, eval: Evaluator) -> VerifyReport {
    let samples = samples.max(1);
    let checks = vec![
        oracle_equivalence(seed, samples),
        completeness(seed, samples),
        symmetries(seed, samples, eval),
        coherence_bound(seed, samples, eval),
        convergence_slope(eval),
        winding_integrality(seed, samples),
    ];
    VerifyReport { seed, samples, checks }
}

fn oracle_equivalence(seed: u64, samples: usize) -> CheckResult {
    let mut check = Check::new("oracle-equivalence", 1e-12);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x01);
    for _ in 0..(samples / 5).clamp(4, 200) {
        let (cc, a, t, d) = random_point(&mut rng);
        let n = rng.random_range(1..=10);
        check.record((|| {
            let p = ProtocolParams::finite(cc, a, t, d, n)?;
            Ok((brute_force_signal(&p)?.z - transfer_signal(&p)?.z).norm())
        })());
    }
    check.result
}

fn completeness(seed: u64, samples: usize) -> CheckResult {
    let mut check = Check::new("completeness", 1e-12);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x02);
    for _ in 0..samples {
        let (cc, a, t, d) = random_point(&mut rng);
        let n = rng.random_range(1..=500);
        let k = rng.random_range(1..=n);
        check.record((|| {
            let p = ProtocolParams::finite(cc, a, t, d, n)?;
            let mut sum = ComplexMat2::zeros();
            for r in Readout::BOTH {
                let m = kraus_full(k, r, &p)?;
                sum = sum + m.dagger() * m;
            }
            Ok(sum.max_abs_diff(&ComplexMat2::identity()))
        })());
    }
    check.result
}

fn symmetries(seed: u64, samples: usize, eval: Evaluator) -> CheckResult {
    let mut check = Check::new("symmetries", 1e-10);
    check.record(
        verify_symmetries_with(samples, seed ^ 0x03, f64::INFINITY, eval)
            .map(|r| r.reversal_conjugation.max(r.hemisphere_swap).max(r.combined)),
    );
    check.result.cases = samples;
    check.result
}

fn coherence_bound(seed: u64, samples: usize, eval: Evaluator) -> CheckResult {
    let mut check = Check::new("coherence-bound", 1e-12);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x04);
    for _ in 0..samples {
        let (cc, a, t, d) = random_point(&mut rng);
        let n = rng.random_range(1..=400);
        check.record((|| {
            let zf = transfer_signal(&ProtocolParams::finite(cc, a, t, d, n)?)?.z;
            let za = eval(&ProtocolParams::asymptotic(cc, a, t, d)?)?;
            Ok((zf.norm().max(za.norm()) - 1.0).max(0.0))
        })());
    }
    check.result
}

/// Error ratio `|z_N − z_∞| / |z_2N − z_∞|` at `N = 1000` should be 2.
fn convergence_slope(eval: Evaluator) -> CheckResult {
    let mut check = Check::new("convergence-slope", 0.3);
    for (cc, a, t, d) in CONVERGENCE_POINTS {
        check.record((|| {
            let z_inf = eval(&ProtocolParams::asymptotic(cc, a, t, d)?)?;
            let err = |n: u32| -> mipd_core::Result<f64> {
                Ok((transfer_signal(&ProtocolParams::new(cc, a, t, d, Steps::Finite(n))?)?.z - z_inf).norm())
            };
            Ok((err(1000)? / err(2000)? - 2.0).abs())
        })());
    }
    check.result
}

/// `χ̄(π)/π` distance from the nearest integer on comfortably regular paths.
fn winding_integrality(seed: u64, samples: usize) -> CheckResult {
    let mut check = Check::new("winding-integrality", 1e-6);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x05);
    for _ in 0..(samples / 10).clamp(5, 100) {
        let (cc, a, _, d) = random_point(&mut rng);
        match unwrap_phase(cc, a, d, DEFAULT_RESOLUTION) {
            Ok(curve) if curve.min_modulus.1 < 1e-3 => {}
            Ok(curve) => {
                let end = curve.chi_unwrapped.last().copied().unwrap_or(0.0) / PI;
                check.record(Ok((end - end.round()).abs()));
            }
            Err(e) => check.record(Err(e)),
        }
    }
    check.result
}
