//! Monte Carlo sampling of individual protocol runs.
//!
//! Each shot draws its readouts one measurement at a time with the Born
//! probabilities of the current (unnormalized) state, then the final
//! projective readout. Accepted shots contribute `e^{2i·arg(amplitude)}` and
//! rejected ones contribute 0, which makes the shot mean an unbiased estimator
//! of `z`: a sequence is sampled with weight `‖v‖²` and accepted with
//! probability `|⟨ψ₀|v⟩|²/‖v‖²`, so its expected contribution is `amplitude²`.
//!
//! Shot `i` of a run with master seed `s` uses ChaCha8 stream `i` of key `s`,
//! independent of how shots are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::protocol::{KrausSchedule, ProtocolParams, Readout, StateVec2};
use crate::spinlin::{c, Complex};

/// Branch probabilities within this distance outside `[0, 1]` are clamped.
pub const PROBABILITY_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRecord {
    pub readouts: Vec<Readout>,
    /// `⟨ψ₀|𝓜_N⋯𝓜_1|ψ₀⟩` along the sampled readouts.
    pub amplitude: Complex,
    /// `‖𝓜_N⋯𝓜_1 ψ₀‖²`.
    pub pre_postselection_norm2: f64,
    /// Final projective readout was 0.
    pub accepted: bool,
}

impl TrajectoryRecord {
    pub fn readout_bits(&self) -> String {
        self.readouts.iter().map(|r| if *r == Readout::One { '1' } else { '0' }).collect()
    }

    fn contribution(&self) -> Complex {
        if self.accepted && self.amplitude.norm() > 0.0 {
            let phase = self.amplitude / self.amplitude.norm();
            phase * phase
        } else {
            c(0.0, 0.0)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub z_hat: Complex,
    /// Standard error of the real part in `re`, of the imaginary part in `im`.
    pub stderr: Complex,
    pub shots: u64,
    pub accept_rate: f64,
    pub seed: u64,
}

/// Samples trajectories of one protocol; reusable across shots.
#[derive(Clone, Debug)]
pub struct TrajectorySampler {
    schedule: KrausSchedule,
}

impl TrajectorySampler {
    pub fn new(p: &ProtocolParams) -> Result<Self> {
        Ok(TrajectorySampler { schedule: KrausSchedule::new(p)? })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<TrajectoryRecord> {
        let psi0 = *self.schedule.initial();
        let n = self.schedule.len();
        let mut state = psi0;
        // ‖v‖² = exp(log_norm2) · ‖state‖², with `state` kept at unit norm
        let mut log_norm2 = 0.0f64;
        let mut readouts = Vec::with_capacity(n);

        for k in 1..=n {
            let zero = state.apply(self.schedule.operator(k, Readout::Zero));
            let p_zero = checked_probability(zero.norm2() / state.norm2(), k as u32)?;
            let r = if rng.random::<f64>() < p_zero { Readout::Zero } else { Readout::One };
            let next = match r {
                Readout::Zero => zero,
                Readout::One => state.apply(self.schedule.operator(k, Readout::One)),
            };
            let w = next.norm2();
            log_norm2 += w.ln();
            state = scale(&next, 1.0 / w.sqrt());
            readouts.push(r);
        }

        let overlap = psi0.inner(&state);
        let p_accept = checked_probability(overlap.norm_sqr(), n as u32 + 1)?;
        let accepted = rng.random::<f64>() < p_accept;
        let norm = (0.5 * log_norm2).exp();
        Ok(TrajectoryRecord { readouts, amplitude: overlap * norm, pre_postselection_norm2: norm * norm, accepted })
    }
}

fn scale(v: &StateVec2, s: f64) -> StateVec2 {
    StateVec2([v.0[0] * s, v.0[1] * s])
}

fn checked_probability(p: f64, step: u32) -> Result<f64> {
    if !(-PROBABILITY_SLACK..=1.0 + PROBABILITY_SLACK).contains(&p) {
        return Err(Error::DegenerateProbability { step, probability: p });
    }
    Ok(p.clamp(0.0, 1.0))
}

/// Independent random stream for one shot.
pub fn shot_rng(seed: u64, shot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot);
    rng
}

/// One trajectory drawn from `rng`.
pub fn sample_trajectory<R: Rng + ?Sized>(p: &ProtocolParams, rng: &mut R) -> Result<TrajectoryRecord> {
    TrajectorySampler::new(p)?.sample(rng)
}

/// Records for shots `0..shots`, in shot order.
pub fn sample_records(p: &ProtocolParams, shots: u64, seed: u64) -> Result<Vec<TrajectoryRecord>> {
    let sampler = TrajectorySampler::new(p)?;
    (0..shots).into_par_iter().map(|shot| sampler.sample(&mut shot_rng(seed, shot))).collect()
}

/// Monte Carlo estimate of `z` from `shots` independent runs.
pub fn estimate_signal(p: &ProtocolParams, shots: u64, seed: u64) -> Result<McEstimate> {
    if shots == 0 {
        return Err(Error::InvalidParam { name: "shots", reason: "need at least one shot".into() });
    }
    let sampler = TrajectorySampler::new(p)?;
    let contributions: Vec<(Complex, bool)> = (0..shots)
        .into_par_iter()
        .map(|shot| {
            let rec = sampler.sample(&mut shot_rng(seed, shot))?;
            Ok((rec.contribution(), rec.accepted))
        })
        .collect::<Result<_>>()?;

    // fixed shot order, compensated sums: independent of the thread count
    let mut re = NeumaierSum::default();
    let mut im = NeumaierSum::default();
    let mut accepted = 0u64;
    for (w, acc) in &contributions {
        re.add(w.re);
        im.add(w.im);
        accepted += u64::from(*acc);
    }
    let n = shots as f64;
    let mean = c(re.total() / n, im.total() / n);
    let mut dev_re = NeumaierSum::default();
    let mut dev_im = NeumaierSum::default();
    for (w, _) in &contributions {
        dev_re.add((w.re - mean.re).powi(2));
        dev_im.add((w.im - mean.im).powi(2));
    }
    let dof = if shots > 1 { n - 1.0 } else { 1.0 };
    let stderr = c((dev_re.total() / dof / n).sqrt(), (dev_im.total() / dof / n).sqrt());

    Ok(McEstimate { z_hat: mean, stderr, shots, accept_rate: accepted as f64 / n, seed })
}

#[derive(Clone, Copy, Debug, Default)]
struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}
