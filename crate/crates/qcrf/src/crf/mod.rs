//! Classical linear-chain CRF with node features.
//!
//! The model assigns a labeling `y` of an observation sequence `x` the
//! probability `P(y|x) = exp(E(x,y)) / Z` where the potential
//! `E(x,y) = sum_i sum_k w_k f_k(x_i, y_i)` is built from ±1-valued
//! feature functions and Boltzmann weights, and `Z` sums `exp(E)` over
//! every labeling. With node features only, `Z` factorizes over
//! positions, which gives the exact polynomial-time gradient back-end.

mod gradient;
mod io;
mod prob;
mod train;
mod types;

pub use gradient::{
    gradient_factorized, gradient_gibbs, gradient_gibbs_detailed, gradient_naive,
    FactorizedBackend, GibbsBackend, GibbsGradient, GradientBackend, NaiveBackend,
    ENUMERATION_CAP,
};
pub use io::{format_f64_17, read_dataset_tokens, read_feature_table, write_feature_table};
pub use prob::{conditional_probability, log_conditional_probability, nll, potential};
pub use train::{train, TrainStep};
pub use types::{DataRecord, Dataset, FeatureTable, LabelAlphabet, Sequence, Weights};
