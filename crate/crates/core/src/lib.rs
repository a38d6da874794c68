//! Stochastic resonance in lossy bosonic channels with threshold decoding.
//!
//! The crate is organised bottom-up:
//!
//! - [`gaussian`]: Gaussian-noise threshold detection reduced to a binary
//!   channel, with success probability, mutual information and a Monte Carlo
//!   sampling oracle.
//! - [`analysis`]: the classical, entanglement-assisted and channel
//!   discrimination schemes, their critical noise levels and forbidden
//!   threshold intervals.
//! - [`qubit`]: a qubit carried by a bosonic mode with a coherent threshold
//!   decoder; average fidelity, Choi state and logarithmic negativity.
//! - [`fock`]: truncated Fock-space numerics for single-mode Gaussian states.
//! - [`private`]: private communication rate against an eavesdropper holding
//!   the beamsplitter's conjugate output.
//! - [`cli`]: the command-line front end and its CSV/JSON report formats.
//!
//! Quadratures follow `q = (a + a†)/√2`, so the vacuum variance is 1/2.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod private;
pub mod qubit;

pub use error::{Error, Result};
