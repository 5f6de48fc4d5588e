//! Realizations feeding the estimator: Gegenbauer moving-average paths and
//! exact Gaussian draws of filter coefficients.

mod exact;
mod panel;
mod path;

pub use exact::{
    cholesky_with_jitter, coefficient_covariance, coefficient_variance, exact_coefficient_sample, shift_covariance,
    ExactSampler, LevelFactor, MAX_EXACT_SHIFTS,
};
pub use panel::{CoefficientPanel, PanelLevel, Provenance};
pub use path::{gegenbauer_path, gegenbauer_path_covering, innovation, PathRealization};
