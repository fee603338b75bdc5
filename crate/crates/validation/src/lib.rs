//! Reference computations for checking `mipd-core`, plus (under `tests/`)
//! the acceptance harness.

pub mod oracle;
