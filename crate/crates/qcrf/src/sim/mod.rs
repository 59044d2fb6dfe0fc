//! Register-fidelity simulation of the trace-estimation algorithm:
//! uniform superposition, phase estimation of diagonal observables into
//! r-bit registers, reversible fixed-point EXP/multiply arithmetic,
//! controlled rotation with post-selection, and sampled projector
//! measurement, assembled into trace and gradient estimators.

mod backend;
mod config;
mod estimate;
mod fixed;
mod ops;
mod split;
mod state;

pub use backend::QuantumBackend;
pub use config::{PhaseWindow, PrecisionConfig};
pub use estimate::{
    estimate_gradient, estimate_gradient_prefixes, estimate_trace, estimate_trace_prefixes,
    ComponentTraces, EstimatorSettings, PassStats, QuantumGradient, TraceEstimate, TraceKind,
};
pub use fixed::{FixedPointCodec, INT_BITS};
pub use ops::{
    analytic_success_probability, apply_exp, apply_exp_inverse, apply_multiply,
    apply_multiply_inverse, collapse_postselected, controlled_rotation_postselect,
    measure_projector, phase_estimate, phase_estimate_inverse, prepare_uniform,
    PrecisionRegister, SIMULATION_BRANCH_CAP,
};
pub use split::SignSplit;
pub use state::{BranchKey, RegisterState};
