//! Desk-scale simulation laboratory for quantum conditional random field
//! (QCRF) training.
//!
//! The crate has three layers:
//!
//! * [`crf`] — a classical linear-chain CRF with node features: potential,
//!   conditional probability, negative log-likelihood and three
//!   interchangeable gradient back-ends (naive enumeration, factorized
//!   exact, Gibbs sampling), plus a gradient-descent training loop.
//! * [`model`] — the quantum operator algebra: lazy diagonal Hamiltonians,
//!   projective measurements, the trace identities they satisfy, and the
//!   exact quantum-form probability and gradient.
//! * [`sim`] — a register-fidelity simulator of the trace-estimation
//!   algorithm: uniform superposition, phase estimation of diagonal
//!   observables into r-bit registers, reversible fixed-point EXP and
//!   multiply arithmetic, controlled rotation with post-selection, and
//!   sampled projector measurement, assembled into a gradient estimator.
//!
//! All randomness flows from explicit 64-bit seeds; re-running any
//! computation with the same seed reproduces it bit for bit.

pub mod crf;
pub mod error;
pub mod instances;
pub mod model;
pub mod seeding;
pub mod sim;

pub use error::{QcrfError, Result};
