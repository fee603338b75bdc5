//! Command-line grammar.
//!
//! Angles accept plain radians or multiples of π (`0.75pi`, `pi`, `-0.5pi`);
//! ranges are `start:end:count`; directions are `+1` or `-1`.

use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use mipd_core::topology::{AxisSpec, DEFAULT_RESOLUTION};
use mipd_core::{Direction, Steps};

#[derive(Debug, Parser)]
#[command(
    name = "mipd",
    version,
    about = "Measurement-induced phases of a spin qubit: signals, scans, windings, critical lines"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Averaged signal at one parameter point, printed as JSON
    Signal(SignalArgs),
    /// Signal over a (C, A) grid, written as CSV
    Scan(ScanArgs),
    /// Winding number of the averaged phase over θ ∈ [0, π]
    Winding(WindingArgs),
    /// Unwrapped averaged phase χ̄(θ), written as CSV
    Curve(CurveArgs),
    /// Critical points (z = 0) over a range of A, written as CSV
    Critical(CriticalArgs),
    /// Monte Carlo estimate of the signal from sampled trajectories
    Sample(SampleArgs),
    /// Run the invariant suite
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, Args)]
pub struct ModeArgs {
    /// Number of measurements (finite-N mode)
    #[arg(long = "N", value_name = "INT", conflicts_with = "asymptotic", value_parser = clap::value_parser!(u32).range(1..))]
    pub n: Option<u32>,
    /// N → ∞ limit via exp(Λ) (default)
    #[arg(long)]
    pub asymptotic: bool,
}

impl ModeArgs {
    pub fn steps(&self) -> Steps {
        match self.n {
            Some(n) => Steps::Finite(n),
            None => Steps::Asymptotic,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SignalArgs {
    /// Measurement strength C
    #[arg(long = "C", value_parser = parse_real, allow_hyphen_values = true)]
    pub strength: f64,
    /// Asymmetry A
    #[arg(long = "A", value_parser = parse_real, allow_hyphen_values = true)]
    pub asymmetry: f64,
    /// Polar angle θ ∈ [0, π]
    #[arg(long, value_parser = parse_theta, allow_hyphen_values = true)]
    pub theta: f64,
    /// Direction d (+1 or -1)
    #[arg(long = "d", value_parser = parse_direction, allow_hyphen_values = true)]
    pub direction: Direction,
    #[command(flatten)]
    pub mode: ModeArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    /// C axis as start:end:count
    #[arg(long = "C", value_parser = parse_axis, allow_hyphen_values = true)]
    pub strength: AxisSpec,
    /// A axis as start:end:count
    #[arg(long = "A", value_parser = parse_axis, allow_hyphen_values = true)]
    pub asymmetry: AxisSpec,
    #[arg(long, value_parser = parse_theta, allow_hyphen_values = true)]
    pub theta: f64,
    #[arg(long = "d", value_parser = parse_direction, allow_hyphen_values = true)]
    pub direction: Direction,
    #[command(flatten)]
    pub mode: ModeArgs,
    /// Output CSV path
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct WindingArgs {
    #[arg(long = "C", value_parser = parse_real, allow_hyphen_values = true)]
    pub strength: f64,
    #[arg(long = "A", value_parser = parse_real, allow_hyphen_values = true)]
    pub asymmetry: f64,
    #[arg(long = "d", value_parser = parse_direction, allow_hyphen_values = true)]
    pub direction: Direction,
    /// Base number of θ samples before adaptive refinement
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    pub resolution: usize,
}

#[derive(Debug, Clone, Args)]
pub struct CurveArgs {
    #[command(flatten)]
    pub point: WindingArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct CriticalArgs {
    /// A axis as start:end:count
    #[arg(long = "A", value_parser = parse_axis, allow_hyphen_values = true)]
    pub asymmetry: AxisSpec,
    #[arg(long = "d", value_parser = parse_direction, allow_hyphen_values = true)]
    pub direction: Direction,
    /// C axis of the seeding grid
    #[arg(long = "C", value_parser = parse_axis, default_value = "0:6:121", allow_hyphen_values = true)]
    pub strength: AxisSpec,
    /// θ samples of the seeding grid
    #[arg(long, default_value_t = 91)]
    pub theta_count: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SampleArgs {
    #[arg(long = "C", value_parser = parse_real, allow_hyphen_values = true)]
    pub strength: f64,
    #[arg(long = "A", value_parser = parse_real, allow_hyphen_values = true)]
    pub asymmetry: f64,
    #[arg(long, value_parser = parse_theta, allow_hyphen_values = true)]
    pub theta: f64,
    #[arg(long = "d", value_parser = parse_direction, allow_hyphen_values = true)]
    pub direction: Direction,
    /// Number of measurements
    #[arg(long = "N", value_parser = clap::value_parser!(u32).range(1..))]
    pub n: u32,
    #[arg(long, default_value_t = 10_000)]
    pub shots: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write one CSV row per shot to this path
    #[arg(long)]
    pub log: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random parameter points per check
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
}

/// A real number, optionally followed by `pi` (`0.75pi`, `pi`, `-2pi`).
pub fn parse_real(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let value = match t.strip_suffix("pi") {
        Some(coef) => {
            let coef = coef.strip_suffix('*').unwrap_or(coef);
            let k = match coef {
                "" | "+" => 1.0,
                "-" => -1.0,
                _ => coef.parse::<f64>().map_err(|_| format!("not a number: {s:?}"))?,
            };
            k * PI
        }
        None => t.parse::<f64>().map_err(|_| format!("not a number: {s:?}"))?,
    };
    if !value.is_finite() {
        return Err(format!("not finite: {s:?}"));
    }
    Ok(value)
}

pub fn parse_theta(s: &str) -> Result<f64, String> {
    let theta = parse_real(s)?;
    if !(0.0..=PI).contains(&theta) {
        return Err(format!("theta = {theta} is outside [0, pi]"));
    }
    Ok(theta)
}

pub fn parse_direction(s: &str) -> Result<Direction, String> {
    match s.trim() {
        "+1" | "1" | "+" => Ok(Direction::Forward),
        "-1" | "-" => Ok(Direction::Backward),
        _ => Err(format!("direction must be +1 or -1, got {s:?}")),
    }
}

pub fn parse_axis(s: &str) -> Result<AxisSpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [start, end, count] = parts[..] else {
        return Err(format!("expected start:end:count, got {s:?}"));
    };
    let count = count.trim().parse::<usize>().map_err(|_| format!("bad count in {s:?}"))?;
    AxisSpec::new(parse_real(start)?, parse_real(end)?, count).map_err(|e| e.to_string())
}
