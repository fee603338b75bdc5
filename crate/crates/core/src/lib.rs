//! Measurement-induced phases and dephasing of a spin-1/2 steered around a
//! parallel of the Bloch sphere by a sequence of weak measurements.
//!
//! * [`spinlin`]: fixed-size complex matrices and the matrix exponential.
//! * [`protocol`]: parameters, Kraus operators and the step rotation.
//! * [`replica`]: the averaged signal `z = e^{2iχ̄−α}` by enumeration, exact
//!   transfer matrix and the `N → ∞` generator.
//! * [`trajectories`]: Monte Carlo sampling of single runs.
//! * [`topology`]: phase winding over θ, zeros of `z` and the critical line.

// `!(x <= tol)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod protocol;
pub mod replica;
pub mod solve;
pub mod spinlin;
pub mod topology;
pub mod trajectories;

pub use error::{Error, Result};
pub use protocol::{Direction, ProtocolParams, Readout, Steps};
pub use replica::SignalPoint;
pub use spinlin::Complex;
