//! The measurement protocol: parameters, axis rotations, Kraus back-action
//! and the initial state.
//!
//! The k-th measurement axis is `n_k = (sinθ cosφ_k, sinθ sinφ_k, cosθ)` with
//! `φ_k = 2πkd/(N+1)`; the final projective measurement closes the loop along
//! `n_{N+1} = n_0`.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::spinlin::{c, Complex, ComplexMat2};

/// Sense in which the measurement axes wind around the parallel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn sign(self) -> i32 {
        match self {
            Direction::Forward => 1,
            Direction::Backward => -1,
        }
    }

    pub fn as_f64(self) -> f64 {
        self.sign() as f64
    }

    pub fn reversed(self) -> Self {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

impl TryFrom<i32> for Direction {
    type Error = Error;

    fn try_from(d: i32) -> Result<Self> {
        match d {
            1 => Ok(Direction::Forward),
            -1 => Ok(Direction::Backward),
            other => {
                Err(Error::InvalidParam { name: "d", reason: format!("directionality must be +1 or -1, got {other}") })
            }
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}", self.sign())
    }
}

/// Number of generalized measurements, or the quasicontinuous limit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Steps {
    Finite(u32),
    Asymptotic,
}

/// Readout of one generalized measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Readout {
    Zero,
    One,
}

impl Readout {
    pub const BOTH: [Readout; 2] = [Readout::Zero, Readout::One];

    pub fn bit(self) -> u8 {
        match self {
            Readout::Zero => 0,
            Readout::One => 1,
        }
    }

    /// Readouts `r_1..r_N` encoded in the low `n` bits of `bits`, `r_1` in bit 0.
    pub fn sequence_from_bits(bits: u64, n: u32) -> Vec<Readout> {
        (0..n).map(|k| if bits >> k & 1 == 1 { Readout::One } else { Readout::Zero }).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProtocolParams {
    /// Measurement strength `C >= 0`.
    pub strength: f64,
    /// Asymmetry `A`; rotates the state about the axis on a null readout.
    pub asymmetry: f64,
    /// Polar angle of the parallel, in `[0, π]`.
    pub theta: f64,
    pub direction: Direction,
    pub steps: Steps,
}

impl ProtocolParams {
    pub fn new(strength: f64, asymmetry: f64, theta: f64, direction: Direction, steps: Steps) -> Result<Self> {
        let p = ProtocolParams { strength, asymmetry, theta, direction, steps };
        p.validate()?;
        Ok(p)
    }

    pub fn asymptotic(strength: f64, asymmetry: f64, theta: f64, direction: Direction) -> Result<Self> {
        Self::new(strength, asymmetry, theta, direction, Steps::Asymptotic)
    }

    pub fn finite(strength: f64, asymmetry: f64, theta: f64, direction: Direction, n: u32) -> Result<Self> {
        Self::new(strength, asymmetry, theta, direction, Steps::Finite(n))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason: String| Err(Error::InvalidParam { name, reason });
        if !self.strength.is_finite() || self.strength < 0.0 {
            return bad("C", format!("measurement strength must be finite and >= 0, got {}", self.strength));
        }
        if !self.asymmetry.is_finite() {
            return bad("A", format!("asymmetry must be finite, got {}", self.asymmetry));
        }
        if !(0.0..=PI).contains(&self.theta) {
            return bad("theta", format!("polar angle must lie in [0, pi], got {}", self.theta));
        }
        if self.steps == Steps::Finite(0) {
            return bad("N", "number of measurements must be >= 1".into());
        }
        Ok(())
    }

    /// `N`, or [`Error::NeedsFiniteSteps`] in asymptotic mode.
    pub fn finite_steps(&self) -> Result<u32> {
        match self.steps {
            Steps::Finite(n) => Ok(n),
            Steps::Asymptotic => Err(Error::NeedsFiniteSteps),
        }
    }

    pub fn with_steps(self, steps: Steps) -> Self {
        ProtocolParams { steps, ..self }
    }

    /// Azimuth `φ_k` of the k-th measurement axis.
    pub fn azimuth(&self, k: u32) -> Result<f64> {
        let n = self.finite_steps()?;
        Ok(2.0 * PI * k as f64 * self.direction.as_f64() / (n as f64 + 1.0))
    }
}

impl fmt::Display for ProtocolParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C={} A={} theta={} d={}", self.strength, self.asymmetry, self.theta, self.direction)?;
        match self.steps {
            Steps::Finite(n) => write!(f, " N={n}"),
            Steps::Asymptotic => write!(f, " N=inf"),
        }
    }
}

/// Two-component spinor in the `(↑, ↓)` basis. Not necessarily normalized.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateVec2(pub [Complex; 2]);

impl StateVec2 {
    pub const UP: StateVec2 = StateVec2([c(1.0, 0.0), c(0.0, 0.0)]);

    pub fn norm2(&self) -> f64 {
        self.0[0].norm_sqr() + self.0[1].norm_sqr()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVec2) -> Complex {
        self.0[0].conj() * other.0[0] + self.0[1].conj() * other.0[1]
    }

    pub fn apply(&self, m: &ComplexMat2) -> StateVec2 {
        StateVec2(m.mul_vec(&self.0))
    }
}

/// Rotation `R(n)` taking the `+n` spin state to `|↑⟩`; unitary.
pub fn rotation(theta: f64, phi: f64) -> ComplexMat2 {
    let (s, co) = (theta / 2.0).sin_cos();
    let e = Complex::from_polar(1.0, -phi);
    ComplexMat2::from_rows([[c(co, 0.0), e * s], [c(s, 0.0), -e * co]])
}

/// Back-action operators `(M⁽⁰⁾, M⁽¹⁾)` for a measurement of `S_z`.
pub fn kraus_backaction(strength: f64, asymmetry: f64, n: u32) -> (ComplexMat2, ComplexMat2) {
    let n = n as f64;
    let null_weight = (c(-2.0 * strength, -2.0 * asymmetry) / n).exp();
    // 1 - e^{-4C/N} without cancellation for small C/N
    let click = (-(-4.0 * strength / n).exp_m1()).max(0.0).sqrt();
    let m0 = ComplexMat2::diag([c(1.0, 0.0), null_weight]);
    let m1 = ComplexMat2::diag([c(0.0, 0.0), c(click, 0.0)]);
    (m0, m1)
}

/// Kraus operator `R⁻¹(n_k) M⁽ʳ⁾ R(n_k)` of the k-th measurement.
pub fn kraus_full(k: u32, readout: Readout, p: &ProtocolParams) -> Result<ComplexMat2> {
    let n = p.finite_steps()?;
    if k == 0 || k > n {
        return Err(Error::InvalidParam {
            name: "k",
            reason: format!("measurement index must lie in 1..={n}, got {k}"),
        });
    }
    let r = rotation(p.theta, p.azimuth(k)?);
    let (m0, m1) = kraus_backaction(p.strength, p.asymmetry, n);
    let m = match readout {
        Readout::Zero => m0,
        Readout::One => m1,
    };
    Ok(r.dagger() * m * r)
}

/// Step rotation `δR = R(n_{k+1}) R⁻¹(n_k)`, the same for every k.
pub fn delta_rotation(p: &ProtocolParams) -> Result<ComplexMat2> {
    delta_rotation_between(p, 0)
}

/// `R(n_{k+1}) R⁻¹(n_k)` evaluated literally at a given k.
pub fn delta_rotation_between(p: &ProtocolParams, k: u32) -> Result<ComplexMat2> {
    let next = rotation(p.theta, p.azimuth(k + 1)?);
    let here = rotation(p.theta, p.azimuth(k)?);
    Ok(next * here.dagger())
}

/// Kraus operators `(𝓜_k⁽⁰⁾, 𝓜_k⁽¹⁾)` for every step of a finite protocol.
#[derive(Clone, Debug)]
pub struct KrausSchedule {
    steps: Vec<[ComplexMat2; 2]>,
    initial: StateVec2,
}

impl KrausSchedule {
    pub fn new(p: &ProtocolParams) -> Result<Self> {
        let n = p.finite_steps()?;
        let (m0, m1) = kraus_backaction(p.strength, p.asymmetry, n);
        let steps = (1..=n)
            .map(|k| {
                let r = rotation(p.theta, p.azimuth(k)?);
                let r_inv = r.dagger();
                Ok([r_inv * m0 * r, r_inv * m1 * r])
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(KrausSchedule { steps, initial: initial_state(p.theta) })
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Operator for step `k` (1-based) and readout `r`.
    pub fn operator(&self, k: usize, r: Readout) -> &ComplexMat2 {
        &self.steps[k - 1][r.bit() as usize]
    }

    pub fn initial(&self) -> &StateVec2 {
        &self.initial
    }
}

/// `cos(θ/2)|↑⟩ + sin(θ/2)|↓⟩`, the `+1/2` eigenstate along `n_0`.
pub fn initial_state(theta: f64) -> StateVec2 {
    let (s, co) = (theta / 2.0).sin_cos();
    StateVec2([c(co, 0.0), c(s, 0.0)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn random_params(rng: &mut ChaCha8Rng, n: u32) -> ProtocolParams {
        let d = if rng.random::<bool>() { Direction::Forward } else { Direction::Backward };
        ProtocolParams::finite(
            4.0 * rng.random::<f64>(),
            4.0 * rng.random::<f64>() - 2.0,
            PI * rng.random::<f64>(),
            d,
            n,
        )
        .unwrap()
    }

    #[test]
    fn rotation_special_values() {
        let r = rotation(0.0, 0.0);
        assert!(r.max_abs_diff(&ComplexMat2::diag([c(1.0, 0.0), c(-1.0, 0.0)])) <= 1e-15);
        let r = rotation(PI / 2.0, 0.0);
        let h =
            ComplexMat2::from_rows([[c(SQRT_HALF, 0.0), c(SQRT_HALF, 0.0)], [c(SQRT_HALF, 0.0), c(-SQRT_HALF, 0.0)]]);
        assert!(r.max_abs_diff(&h) <= 1e-15);
    }

    #[test]
    fn rotation_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..100 {
            let r = rotation(PI * rng.random::<f64>(), 2.0 * PI * rng.random::<f64>());
            assert!((r.dagger() * r).max_abs_diff(&ComplexMat2::identity()) <= 1e-14);
        }
    }

    #[test]
    fn backaction_limits() {
        let (m0, m1) = kraus_backaction(0.0, 0.0, 1);
        assert_eq!(m0, ComplexMat2::identity());
        assert_eq!(m1, ComplexMat2::zeros());

        let (m0, m1) = kraus_backaction(50.0, 0.7, 1);
        assert!(m0.max_abs_diff(&ComplexMat2::diag([c(1.0, 0.0), c(0.0, 0.0)])) <= 1e-40);
        assert!(m1.max_abs_diff(&ComplexMat2::diag([c(0.0, 0.0), c(1.0, 0.0)])) <= 1e-15);

        let (_, m1) = kraus_backaction(std::f64::consts::LN_2 / 2.0, 0.0, 2);
        assert!((m1[(1, 1)] - c(SQRT_HALF, 0.0)).norm() <= 1e-15);
    }

    #[test]
    fn kraus_completeness() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let n = rng.random_range(1..40);
            let p = random_params(&mut rng, n);
            for k in 1..=n {
                let a = kraus_full(k, Readout::Zero, &p).unwrap();
                let b = kraus_full(k, Readout::One, &p).unwrap();
                let total = a.dagger() * a + b.dagger() * b;
                assert!(total.max_abs_diff(&ComplexMat2::identity()) <= 1e-14);
            }
        }
    }

    #[test]
    fn kraus_on_axis_eigenstates() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..20 {
            let n = rng.random_range(1..30);
            let p = random_params(&mut rng, n);
            let k = rng.random_range(1..=n);
            let r = rotation(p.theta, p.azimuth(k).unwrap());
            let plus = StateVec2::UP.apply(&r.dagger());
            let minus = StateVec2([c(0.0, 0.0), c(1.0, 0.0)]).apply(&r.dagger());
            let m0 = kraus_full(k, Readout::Zero, &p).unwrap();
            let m1 = kraus_full(k, Readout::One, &p).unwrap();

            let out = plus.apply(&m0);
            assert!((out.norm2() - 1.0).abs() <= 1e-14);
            assert!((plus.inner(&out).norm() - 1.0).abs() <= 1e-14);

            let null = (-4.0 * p.strength / n as f64).exp();
            assert!((minus.apply(&m0).norm2() - null).abs() <= 1e-14);
            assert!((minus.apply(&m1).norm2() - (1.0 - null)).abs() <= 1e-14);
        }
    }

    #[test]
    fn delta_rotation_at_pole() {
        for d in [Direction::Forward, Direction::Backward] {
            let p = ProtocolParams::finite(1.0, 0.5, 0.0, d, 7).unwrap();
            let dphi = 2.0 * PI * d.as_f64() / 8.0;
            let want = ComplexMat2::diag([c(1.0, 0.0), Complex::from_polar(1.0, -dphi)]);
            assert!(delta_rotation(&p).unwrap().max_abs_diff(&want) <= 1e-15);
        }
    }

    #[test]
    fn delta_rotation_is_k_independent_and_closes() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..20 {
            let p = random_params(&mut rng, 10);
            let dr = delta_rotation(&p).unwrap();
            assert!((dr.dagger() * dr).max_abs_diff(&ComplexMat2::identity()) <= 1e-14);
            for k in 0..=10 {
                assert!(delta_rotation_between(&p, k).unwrap().max_abs_diff(&dr) <= 1e-13);
            }
            assert!(dr.powi(11).max_abs_diff(&ComplexMat2::identity()) <= 1e-10);
        }
    }

    #[test]
    fn initial_state_is_rotated_to_up() {
        assert_eq!(initial_state(0.0), StateVec2::UP);
        let south = initial_state(PI);
        assert!((south.0[1] - c(1.0, 0.0)).norm() <= 1e-15 && south.0[0].norm() <= 1e-15);
        let eq = initial_state(PI / 2.0);
        assert!((eq.0[0] - c(SQRT_HALF, 0.0)).norm() <= 1e-15);
        assert!((eq.0[1] - c(SQRT_HALF, 0.0)).norm() <= 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..100 {
            let theta = PI * rng.random::<f64>();
            let up = initial_state(theta).apply(&rotation(theta, 0.0));
            assert!((up.0[0] - c(1.0, 0.0)).norm() <= 1e-14 && up.0[1].norm() <= 1e-14);
        }
    }

    #[test]
    fn validation() {
        assert!(ProtocolParams::asymptotic(-0.1, 0.0, 1.0, Direction::Forward).is_err());
        assert!(ProtocolParams::asymptotic(1.0, 0.0, 1.5 * PI, Direction::Forward).is_err());
        assert!(ProtocolParams::finite(1.0, 0.0, 1.0, Direction::Forward, 0).is_err());
        assert!(Direction::try_from(0).is_err());
        assert_eq!(Direction::try_from(-1).unwrap(), Direction::Backward);
        let p = ProtocolParams::asymptotic(1.0, 0.0, 1.0, Direction::Forward).unwrap();
        assert!(matches!(kraus_full(1, Readout::Zero, &p), Err(Error::NeedsFiniteSteps)));
    }
}
