//! The QCRF operator algebra: diagonal Hamiltonians over feature-sign
//! registers, projective measurements selecting label-consistent basis
//! states, and the trace identities connecting them to the classical
//! chain CRF.

mod build;
mod layout;
mod operator;
mod trace;

pub use build::{build_h, build_lambda_x, build_lambda_xy, dh_dw, sigma_z, QcrfInstance};
pub use layout::{RegisterLayout, RegisterMode};
pub use operator::{dump_diagonal, DiagonalOperator, Projector, DUMP_DIM_CAP};
pub use trace::{
    log_trace_lambda_exp, quantum_gradient_exact, quantum_probability, trace_lambda_exp,
    trace_lambda_exp_weighted, weighted_trace_ratio,
};
