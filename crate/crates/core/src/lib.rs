//! Heisenberg-operator Choi states, local-operator entanglement and
//! out-of-time-order correlators of brickwork circuits.
//!
//! Sites carry half-integer labels stored as `Site(2y)`. A Heisenberg
//! operator starts on the origin site and its lightcone after `s` half steps
//! spans `[−(s−1), s]` in those units.

pub mod brickwork;
pub mod dual_unitary;
pub mod entanglement;
pub mod error;
pub mod exec;
pub mod otoc;
pub mod random;
pub mod stats;
pub mod tensor;

pub use error::{Error, Result};
pub use exec::Exec;
