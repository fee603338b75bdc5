//! The averaged coherence factor `z = Σ_{r} (⟨ψ₀|𝓜_N⋯𝓜_1|ψ₀⟩)² = e^{2iχ̄−α}`,
//! computed three ways:
//!
//! * [`brute_force_signal`] enumerates all `2^N` readout sequences;
//! * [`transfer_signal`] contracts the exact 4×4 replica step `N` times;
//! * [`asymptotic_signal`] takes the `N → ∞` limit as an element of `exp(Λ)`.
//!
//! Dephasing `α = −ln|z|` and the principal phase `χ̄ = arg(z)/2` are views of
//! `z`, which stays smooth through the zeros where they are singular.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::protocol::{
    delta_rotation, kraus_backaction, Direction, KrausSchedule, ProtocolParams, Readout, StateVec2, Steps,
};
use crate::spinlin::{c, mat_exp, tensor2, Complex, ComplexMat4};

/// Below this `|z|` the dephasing is reported as undefined.
pub const SIGNAL_FLOOR: f64 = 1e-14;

/// Largest `N` accepted by [`brute_force_signal`].
pub const BRUTE_FORCE_MAX_STEPS: u32 = 20;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignalPoint {
    pub z: Complex,
    /// `−ln|z|`, `+∞` when undefined.
    pub alpha: f64,
    /// `arg(z)/2` in `(−π/2, π/2]`, NaN when undefined.
    pub chi_principal: f64,
    pub defined: bool,
}

impl SignalPoint {
    pub fn from_z(z: Complex) -> Self {
        let modulus = z.norm();
        if !(modulus >= SIGNAL_FLOOR) {
            return SignalPoint { z, alpha: f64::INFINITY, chi_principal: f64::NAN, defined: false };
        }
        let mut chi = z.arg() / 2.0;
        if chi <= -FRAC_PI_2 {
            chi += PI;
        }
        // `0 − ln` rather than `−ln`: α = +0, not −0, at |z| = 1
        SignalPoint { z, alpha: 0.0 - modulus.ln(), chi_principal: chi, defined: true }
    }
}

/// Exact finite-N replica step `Σ_r (M⁽ʳ⁾δR)⊗(M⁽ʳ⁾δR)` and boundary `δR⊗δR`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReplicaStep {
    pub m: ComplexMat4,
    pub boundary: ComplexMat4,
}

impl ReplicaStep {
    pub fn exact(p: &ProtocolParams) -> Result<Self> {
        let n = p.finite_steps()?;
        let dr = delta_rotation(p)?;
        let (m0, m1) = kraus_backaction(p.strength, p.asymmetry, n);
        let (a0, a1) = (m0 * dr, m1 * dr);
        Ok(ReplicaStep { m: tensor2(&a0, &a0) + tensor2(&a1, &a1), boundary: tensor2(&dr, &dr) })
    }

    /// `N(𝔐 − I)` expressed in the frame of [`lambda_matrix`].
    ///
    /// The literal step `𝔐` equals `e^{−2πid/N} U (I + Λ/N) U + O(N⁻²)` with
    /// `U = diag(1,−1,−1,1)`; both factors leave the `(↑↑,↑↑)` element of the
    /// N-th power unchanged, so they are undone here before comparing to `Λ`.
    pub fn generator_estimate(&self, p: &ProtocolParams) -> Result<ComplexMat4> {
        let n = p.finite_steps()? as f64;
        let phase = Complex::from_polar(1.0, 2.0 * PI * p.direction.as_f64() / n);
        let u = replica_parity();
        let aligned = (u * self.m * u).scale(phase);
        Ok((aligned - ComplexMat4::identity()).scale(c(n, 0.0)))
    }
}

/// `U = diag(1, −1, −1, 1)`.
pub fn replica_parity() -> ComplexMat4 {
    let one = c(1.0, 0.0);
    ComplexMat4::diag([one, -one, -one, one])
}

/// Result of running one readout sequence through the protocol.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SequenceOutcome {
    /// `⟨ψ₀|𝓜_N⋯𝓜_1|ψ₀⟩`.
    pub amplitude: Complex,
    /// `‖𝓜_N⋯𝓜_1 ψ₀‖²`, the probability before the final projective measurement.
    pub norm2: f64,
}

pub fn sequence_outcome(p: &ProtocolParams, readouts: &[Readout]) -> Result<SequenceOutcome> {
    let schedule = KrausSchedule::new(p)?;
    outcome_with_schedule(&schedule, readouts)
}

pub(crate) fn outcome_with_schedule(schedule: &KrausSchedule, readouts: &[Readout]) -> Result<SequenceOutcome> {
    if readouts.len() != schedule.len() {
        return Err(Error::InvalidParam {
            name: "readouts",
            reason: format!("expected {} readouts, got {}", schedule.len(), readouts.len()),
        });
    }
    let psi0 = *schedule.initial();
    let v = readouts.iter().enumerate().fold(psi0, |v, (i, &r)| v.apply(schedule.operator(i + 1, r)));
    Ok(SequenceOutcome { amplitude: psi0.inner(&v), norm2: v.norm2() })
}

/// `⟨ψ₀|𝓜_N^{(r_N)}⋯𝓜_1^{(r_1)}|ψ₀⟩`; `|·|²` is the sequence probability and
/// the argument is the sequence phase.
pub fn amplitude_for_sequence(p: &ProtocolParams, readouts: &[Readout]) -> Result<Complex> {
    sequence_outcome(p, readouts).map(|o| o.amplitude)
}

/// Totals over all `2^N` readout sequences.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Enumeration {
    /// `Σ amplitude²`.
    pub z: Complex,
    /// Probability that the final projective readout is 0: `Σ |amplitude|²`.
    pub accepted: f64,
    /// Probability that it is 1: `Σ (‖v‖² − |amplitude|²)`.
    pub rejected: f64,
}

pub fn enumerate_sequences(p: &ProtocolParams) -> Result<Enumeration> {
    let n = p.finite_steps()?;
    if n > BRUTE_FORCE_MAX_STEPS {
        return Err(Error::TooLarge { n, max: BRUTE_FORCE_MAX_STEPS });
    }
    let schedule = KrausSchedule::new(p)?;
    let psi0 = *schedule.initial();
    let mut acc = Enumeration { z: c(0.0, 0.0), accepted: 0.0, rejected: 0.0 };
    descend(&schedule, &psi0, psi0, 1, &mut acc);
    Ok(acc)
}

fn descend(schedule: &KrausSchedule, psi0: &StateVec2, v: StateVec2, k: usize, acc: &mut Enumeration) {
    if k > schedule.len() {
        let amp = psi0.inner(&v);
        let p_acc = amp.norm_sqr();
        acc.z += amp * amp;
        acc.accepted += p_acc;
        acc.rejected += v.norm2() - p_acc;
        return;
    }
    for r in Readout::BOTH {
        let next = v.apply(schedule.operator(k, r));
        if next.0[0] == c(0.0, 0.0) && next.0[1] == c(0.0, 0.0) {
            continue;
        }
        descend(schedule, psi0, next, k + 1, acc);
    }
}

/// Reference signal by summing `amplitude²` over every readout sequence.
pub fn brute_force_signal(p: &ProtocolParams) -> Result<SignalPoint> {
    enumerate_sequences(p).map(|e| SignalPoint::from_z(e.z))
}

/// `z = ⟨↑↑| (δR⊗δR) 𝔐^N |↑↑⟩` by `N` row-vector products.
pub fn transfer_signal(p: &ProtocolParams) -> Result<SignalPoint> {
    let n = p.finite_steps()?;
    let step = ReplicaStep::exact(p)?;
    let mut row = step.boundary.0[0];
    for _ in 0..n {
        row = ComplexMat4::vec_mul(&row, &step.m);
    }
    Ok(SignalPoint::from_z(row[0]))
}

/// Generator `Λ` of the replica step in the `N → ∞` limit.
pub fn lambda_matrix(strength: f64, asymmetry: f64, theta: f64, direction: Direction) -> ComplexMat4 {
    let d = direction.as_f64();
    let (sin_t, cos_t) = theta.sin_cos();
    let hop = c(0.0, -PI * d * sin_t);
    let mixed = c(-2.0 * strength, -2.0 * asymmetry);
    let zero = c(0.0, 0.0);
    ComplexMat4::from_rows([
        [c(0.0, 2.0 * PI * d * cos_t), hop, hop, zero],
        [hop, mixed, zero, hop],
        [hop, zero, mixed, hop],
        [zero, hop, hop, c(0.0, -2.0 * PI * d * cos_t - 4.0 * asymmetry)],
    ])
}

/// `z = exp(Λ)_{↑↑,↑↑}`; the `steps` field of `p` is ignored.
pub fn asymptotic_signal(p: &ProtocolParams) -> Result<SignalPoint> {
    let e = mat_exp(&lambda_matrix(p.strength, p.asymmetry, p.theta, p.direction))?;
    Ok(SignalPoint::from_z(e[(0, 0)]))
}

/// Transfer contraction for finite `N`, `exp(Λ)` otherwise.
pub fn signal(p: &ProtocolParams) -> Result<SignalPoint> {
    match p.steps {
        Steps::Finite(_) => transfer_signal(p),
        Steps::Asymptotic => asymptotic_signal(p),
    }
}

/// Asymptotic `z` at a bare parameter point.
pub fn asymptotic_z(strength: f64, asymmetry: f64, theta: f64, direction: Direction) -> Result<Complex> {
    let e = mat_exp(&lambda_matrix(strength, asymmetry, theta, direction))?;
    Ok(e[(0, 0)])
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DephasingSplit {
    pub alpha_sym: f64,
    pub alpha_asym: f64,
    pub chi_plus: f64,
    pub chi_minus: f64,
}

/// Even and odd parts of `α^{(d)}` under `d → −d`, using
/// `α^{(−1)}(C,A,θ) = α^{(+1)}(C,−A,θ)`.
pub fn split_dephasing(strength: f64, asymmetry: f64, theta: f64) -> Result<DephasingSplit> {
    let eval = |a: f64, d: Direction| -> Result<SignalPoint> {
        let point = asymptotic_signal(&ProtocolParams::asymptotic(strength, a, theta, d)?)?;
        if !point.defined {
            return Err(Error::Undefined { context: format!("C={strength} A={a} theta={theta} d={d}") });
        }
        Ok(point)
    };
    let forward = eval(asymmetry, Direction::Forward)?;
    let mirrored = eval(-asymmetry, Direction::Forward)?;
    let backward = asymptotic_signal(&ProtocolParams::asymptotic(strength, asymmetry, theta, Direction::Backward)?)?;
    Ok(DephasingSplit {
        alpha_sym: 0.5 * (forward.alpha + mirrored.alpha),
        alpha_asym: 0.5 * (forward.alpha - mirrored.alpha),
        chi_plus: forward.chi_principal,
        chi_minus: backward.chi_principal,
    })
}

/// Largest deviations seen by [`verify_symmetries`].
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SymmetryReport {
    pub samples: usize,
    /// `z^{(−d)}(C,−A,θ)` vs `conj z^{(d)}(C,A,θ)`.
    pub reversal_conjugation: f64,
    /// `z^{(−d)}(C,A,π−θ)` vs `z^{(d)}(C,A,θ)`.
    pub hemisphere_swap: f64,
    /// `z^{(+1)}(C,−A,π−θ)` vs `conj z^{(+1)}(C,A,θ)`.
    pub combined: f64,
}

pub const SYMMETRY_TOLERANCE: f64 = 1e-10;

/// Checks the three z-level symmetries on `samples` random points with
/// `C ∈ [0,4]`, `A ∈ [−2,2]`, `θ ∈ [0,π]` using the asymptotic engine.
pub fn verify_symmetries(samples: usize, seed: u64) -> Result<SymmetryReport> {
    verify_symmetries_with(samples, seed, SYMMETRY_TOLERANCE, |p| asymptotic_signal(p).map(|s| s.z))
}

/// [`verify_symmetries`] with a caller-supplied evaluator.
pub fn verify_symmetries_with<F>(samples: usize, seed: u64, tol: f64, eval: F) -> Result<SymmetryReport>
where
    F: Fn(&ProtocolParams) -> Result<Complex>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SymmetryReport { samples, ..Default::default() };
    for _ in 0..samples {
        let strength = 4.0 * rng.random::<f64>();
        let asymmetry = 4.0 * rng.random::<f64>() - 2.0;
        let theta = PI * rng.random::<f64>();
        let d = if rng.random::<bool>() { Direction::Forward } else { Direction::Backward };
        let at = |a: f64, t: f64, dir: Direction| -> Result<Complex> {
            eval(&ProtocolParams::asymptotic(strength, a, t.clamp(0.0, PI), dir)?)
        };
        let z = at(asymmetry, theta, d)?;
        let describe = || format!("C={strength} A={asymmetry} theta={theta} d={d}");

        let dev = (at(-asymmetry, theta, d.reversed())? - z.conj()).norm();
        report.reversal_conjugation = report.reversal_conjugation.max(dev);
        if !(dev <= tol) {
            return Err(Error::SymmetryViolation {
                relation: "reversal-conjugation",
                deviation: dev,
                params: describe(),
            });
        }

        let dev = (at(asymmetry, PI - theta, d.reversed())? - z).norm();
        report.hemisphere_swap = report.hemisphere_swap.max(dev);
        if !(dev <= tol) {
            return Err(Error::SymmetryViolation { relation: "hemisphere-swap", deviation: dev, params: describe() });
        }

        let zf = at(asymmetry, theta, Direction::Forward)?;
        let dev = (at(-asymmetry, PI - theta, Direction::Forward)? - zf.conj()).norm();
        report.combined = report.combined.max(dev);
        if !(dev <= tol) {
            return Err(Error::SymmetryViolation { relation: "combined", deviation: dev, params: describe() });
        }
    }
    Ok(report)
}
