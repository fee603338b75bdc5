use thiserror::Error;

use crate::topology::CriticalPoint;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter {name}: {reason}")]
    InvalidParam { name: &'static str, reason: String },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("matrix exponential out of range: norm {norm:.3e} exceeds {limit:.3e}")]
    Overflow { norm: f64, limit: f64 },

    #[error("operation needs a finite number of measurements, got asymptotic mode")]
    NeedsFiniteSteps,

    #[error("brute-force enumeration limited to N <= {max}, got N = {n}")]
    TooLarge { n: u32, max: u32 },

    #[error("dephasing undefined: |z| below floor at {context}")]
    Undefined { context: String },

    #[error("symmetry {relation} violated by {deviation:.3e} at {params}")]
    SymmetryViolation { relation: &'static str, deviation: f64, params: String },

    #[error("branch probability {probability:.3e} outside [0, 1] at step {step}")]
    DegenerateProbability { step: u32, probability: f64 },

    #[error("phase path ill-defined: |z| = {modulus:.3e} at theta = {theta:.6}")]
    IllDefinedPath { theta: f64, modulus: f64 },

    #[error("no convergence after {iterations} iterations, best residual {residual:.3e} at {best:?}")]
    NoConvergence { iterations: usize, residual: f64, best: [f64; 2] },

    #[error("iterate left the domain: {0}")]
    OutOfDomain(String),

    #[error("continuation stalled at A = {:.6} after {} points", .last.asymmetry, .traced.len())]
    ContinuationStalled { last: CriticalPoint, traced: Vec<CriticalPoint> },
}
